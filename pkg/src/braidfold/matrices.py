"""Exact nonnegative integer matrix kernel.

Transition matrices of paths in a folding automaton are small square
matrices with nonnegative integer entries.  The search prunes on their
entry sum, detects primitivity (Perron-Frobenius property) over the
boolean semiring, and certifies spectral radii either through exact
leading-principal-minor tests or through Sturm bisection on the exact
characteristic polynomial.  All arithmetic is arbitrary precision; the
compiled search kernel has its own checked 64-bit fast path.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence, Union

from .polynomials import IntPolynomial, largest_real_root, count_real_roots, root_bound

Rational = Union[int, Fraction]


class MatrixError(ValueError):
    pass


class TransMatrix:
    """Square nonnegative integer matrix, immutable, rows as tuples."""

    __slots__ = ("rows",)

    def __init__(self, rows: Iterable[Iterable[int]]):
        rs = tuple(tuple(int(x) for x in row) for row in rows)
        n = len(rs)
        if n == 0:
            raise MatrixError("dimension must be at least 1")
        for row in rs:
            if len(row) != n:
                raise MatrixError("matrix must be square")
            for x in row:
                if x < 0:
                    raise MatrixError("entries must be nonnegative")
        self.rows = rs

    @property
    def n(self) -> int:
        return len(self.rows)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, TransMatrix) and self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        return "TransMatrix(%r)" % ([list(r) for r in self.rows],)

    def __mul__(self, other: "TransMatrix") -> "TransMatrix":
        if self.n != other.n:
            raise MatrixError("dimension mismatch: %d vs %d" % (self.n, other.n))
        bt = tuple(zip(*other.rows))
        return TransMatrix(
            tuple(sum(a * b for a, b in zip(row, col)) for col in bt) for row in self.rows
        )

    def __pow__(self, k: int) -> "TransMatrix":
        if k < 1:
            raise MatrixError("positive power required")
        acc = None
        base = self
        while k:
            if k & 1:
                acc = base if acc is None else acc * base
            base = base * base
            k >>= 1
        return acc

    @staticmethod
    def identity(n: int) -> "TransMatrix":
        return TransMatrix(tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    def row_sums(self) -> tuple[int, ...]:
        return tuple(sum(r) for r in self.rows)

    def col_sums(self) -> tuple[int, ...]:
        return tuple(sum(c) for c in zip(*self.rows))

    def is_permutation(self) -> bool:
        return (
            all(sum(r) == 1 and max(r) == 1 for r in self.rows)
            and all(sum(c) == 1 for c in zip(*self.rows))
        )


def entry_sum(m: TransMatrix) -> int:
    return sum(sum(r) for r in m.rows)


def max_norm_bound(lambda_bound: Rational, n: int) -> int:
    """floor(lambda^n + n - 1), the entry-sum bound for dilatations below
    lambda in dimension n.

    The bound is evaluated in exact rational arithmetic, so it is never
    undercut by rounding.  Floats are interpreted through their shortest
    decimal representation (2.02 means 202/100, not the binary float).
    """
    if n < 1:
        raise MatrixError("dimension must be at least 1")
    lam = _as_fraction(lambda_bound)
    if lam <= 1:
        raise MatrixError("lambda bound must exceed 1")
    val = lam**n + n - 1
    return val.numerator // val.denominator


def _as_fraction(x: Rational) -> Fraction:
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def bool_pattern(m: TransMatrix) -> tuple[int, ...]:
    """Row bitmasks of the zero/positive pattern."""
    out = []
    for row in m.rows:
        bits = 0
        for j, x in enumerate(row):
            if x:
                bits |= 1 << j
        out.append(bits)
    return tuple(out)


def _bool_mul(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    out = []
    for abits in a:
        bits = 0
        rem = abits
        while rem:
            k = (rem & -rem).bit_length() - 1
            bits |= b[k]
            rem &= rem - 1
        out.append(bits)
    return tuple(out)


def is_perron_frobenius(m: TransMatrix) -> bool:
    """Primitivity test: the pattern of M^(n^2-2n+2) is everywhere positive.

    Powers are taken over the boolean semiring so entries never grow; the
    loop exits early once a power is positive (positivity persists because
    a positive power forbids zero rows and columns).
    """
    n = m.n
    full = (1 << n) - 1
    pat = bool_pattern(m)
    target = n * n - 2 * n + 2
    cur = pat
    if all(b == full for b in cur):
        return True
    seen = {cur}
    for _ in range(target - 1):
        cur = _bool_mul(cur, pat)
        if all(b == full for b in cur):
            return True
        if cur in seen:
            return False
        seen.add(cur)
    return False


def pf_oracle(m: TransMatrix) -> bool:
    """Independent primitivity oracle: strong connectivity plus aperiodicity.

    Strong connectivity by forward/backward reachability; aperiodicity as
    gcd over all edges u->v of (level(u) + 1 - level(v)) on a BFS layering.
    """
    n = m.n
    adj = [[j for j in range(n) if m.rows[i][j]] for i in range(n)]
    radj = [[i for i in range(n) if m.rows[i][j]] for j in range(n)]

    def reach(start: int, nbrs: list[list[int]]) -> set[int]:
        seen = {start}
        todo = [start]
        while todo:
            u = todo.pop()
            for v in nbrs[u]:
                if v not in seen:
                    seen.add(v)
                    todo.append(v)
        return seen

    if len(reach(0, adj)) != n or len(reach(0, radj)) != n:
        return False

    from math import gcd

    level = [-1] * n
    level[0] = 0
    queue = [0]
    while queue:
        u = queue.pop(0)
        for v in adj[u]:
            if level[v] < 0:
                level[v] = level[u] + 1
                queue.append(v)
    g = 0
    for u in range(n):
        for v in adj[u]:
            g = gcd(g, level[u] + 1 - level[v])
    return g == 1


def same_pattern(a: TransMatrix, b: TransMatrix) -> bool:
    if a.n != b.n:
        raise MatrixError("dimension mismatch: %d vs %d" % (a.n, b.n))
    return bool_pattern(a) == bool_pattern(b)


def dominates(a: TransMatrix, b: TransMatrix) -> bool:
    """Entrywise a >= b."""
    if a.n != b.n:
        raise MatrixError("dimension mismatch: %d vs %d" % (a.n, b.n))
    return all(x >= y for ra, rb in zip(a.rows, b.rows) for x, y in zip(ra, rb))


def char_poly(m: TransMatrix) -> IntPolynomial:
    """Exact monic characteristic polynomial det(xI - M) by Faddeev-LeVerrier.

    All divisions in the recurrence are exact over the integers; Python
    integers make the computation overflow-free.
    """
    n = m.n
    a = [list(r) for r in m.rows]
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    mk = [row[:] for row in a]
    for k in range(1, n + 1):
        tr = sum(mk[i][i] for i in range(n))
        if tr % k:
            raise MatrixError("Faddeev-LeVerrier divisibility failed")
        c = -(tr // k)
        coeffs[n - k] = c
        if k == n:
            break
        for i in range(n):
            mk[i][i] += c
        mk = [
            [sum(a[i][t] * mk[t][j] for t in range(n)) for j in range(n)]
            for i in range(n)
        ]
    return IntPolynomial(coeffs)


def rho_less_than(m: TransMatrix, bound: Rational) -> bool:
    """Exact test spectral_radius(M) < bound for nonnegative M.

    For a rational bound a/b > 0, rho(M) < a/b iff aI - bM is a nonsingular
    M-matrix iff all leading principal minors of aI - bM are positive.  The
    minors come out of fraction-free Gaussian elimination (Bareiss), so the
    whole test is integer-exact.
    """
    t = _as_fraction(bound)
    if t <= 0:
        return False
    a, b = t.numerator, t.denominator
    n = m.n
    w = [[(a if i == j else 0) - b * m.rows[i][j] for j in range(n)] for i in range(n)]
    prev = 1
    for k in range(n):
        piv = w[k][k]
        if piv <= 0:
            return False
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                w[i][j] = (w[i][j] * piv - w[i][k] * w[k][j]) // prev
        prev = piv
    return True


def rho_less_equal(m: TransMatrix, bound: Rational) -> bool:
    """Exact test spectral_radius(M) <= bound (Sturm count above the bound)."""
    t = _as_fraction(bound)
    if rho_less_than(m, t):
        return True
    p = char_poly(m)
    hi = Fraction(root_bound(p))
    if hi <= t:
        return True
    return count_real_roots(p, t, hi) == 0


def spectral_radius(m: TransMatrix, tol: Rational = Fraction(1, 10**9)) -> tuple[Fraction, Fraction]:
    """Certified interval of width <= tol containing the spectral radius.

    The spectral radius of a nonnegative matrix is its largest real
    eigenvalue, so bisecting the exact characteristic polynomial encloses
    it.  For non-primitive input this is still a true enclosure.
    """
    tol = Fraction(tol)
    if tol <= 0:
        raise MatrixError("tolerance must be positive")
    return largest_real_root(char_poly(m), tol)


def pf_eigenvector(m: TransMatrix, tol: float = 1e-9, max_iter: int = 200000) -> list[float]:
    """Positive eigenvector of a primitive matrix, normalized to sum 1.

    Power iteration; the returned vector v satisfies ||Mv - lambda v||_inf
    <= tol with lambda the Rayleigh-style quotient sum(Mv)/sum(v).
    """
    if not is_perron_frobenius(m):
        raise MatrixError("matrix is not Perron-Frobenius")
    n = m.n
    v = [1.0 / n] * n
    for _ in range(max_iter):
        w = [sum(m.rows[i][j] * v[j] for j in range(n)) for i in range(n)]
        s = sum(w)
        w = [x / s for x in w]
        lam = s  # since v was normalized to sum 1
        resid = max(abs(sum(m.rows[i][j] * w[j] for j in range(n)) - lam * w[i]) for i in range(n))
        v = w
        if resid <= tol:
            return v
    raise MatrixError("power iteration did not converge to tolerance %g" % tol)


def lemma31_check(m: TransMatrix) -> bool:
    """Entry-sum bound for primitive matrices: lambda^n >= |M| - n + 1.

    Exact: lambda^n is the spectral radius of M^n, so the inequality is
    equivalent to NOT (rho(M^n) < |M| - n + 1).
    """
    if not is_perron_frobenius(m):
        raise MatrixError("matrix is not Perron-Frobenius")
    n = m.n
    c = entry_sum(m) - n + 1
    if c <= 0:
        return True
    return not rho_less_than(m**n, c)
