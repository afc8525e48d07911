"""Exact integer polynomials with certified real-root isolation.

Dilatations of the maps we search for are largest real roots of integer
characteristic polynomials, and the acceptance thresholds sit close to the
actual roots.  Everything here therefore runs on exact arithmetic: integer
coefficients, rational sample points, and Sturm chains for root counting.
Floating point never decides anything.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence, Union

Rational = Union[int, Fraction]


class PolynomialError(ValueError):
    pass


def _strip(coeffs: Sequence[int]) -> tuple[int, ...]:
    cs = list(coeffs)
    while cs and cs[-1] == 0:
        cs.pop()
    return tuple(cs)


class IntPolynomial:
    """Polynomial with integer coefficients, stored low degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[int]):
        for c in coeffs:
            if not isinstance(c, int):
                raise PolynomialError("integer coefficients required, got %r" % (c,))
        self.coeffs = _strip(coeffs)

    @property
    def degree(self) -> int:
        # degree of the zero polynomial is -1 by convention
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        if not self.coeffs:
            raise PolynomialError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other: object) -> bool:
        return isinstance(other, IntPolynomial) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return "IntPolynomial(%r)" % (list(self.coeffs),)

    def __call__(self, x: Rational) -> Rational:
        acc: Rational = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __neg__(self) -> "IntPolynomial":
        return IntPolynomial([-c for c in self.coeffs])

    def __add__(self, other: "IntPolynomial") -> "IntPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0] * (n - len(self.coeffs))
        b = list(other.coeffs) + [0] * (n - len(other.coeffs))
        return IntPolynomial([x + y for x, y in zip(a, b)])

    def __sub__(self, other: "IntPolynomial") -> "IntPolynomial":
        return self + (-other)

    def __mul__(self, other: "IntPolynomial") -> "IntPolynomial":
        if self.is_zero() or other.is_zero():
            return IntPolynomial([])
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return IntPolynomial(out)

    def derivative(self) -> "IntPolynomial":
        return IntPolynomial([i * c for i, c in enumerate(self.coeffs)][1:])

    def reverse(self) -> "IntPolynomial":
        """Coefficient reversal x^n p(1/x)."""
        return IntPolynomial(list(reversed(self.coeffs)))

    def content(self) -> int:
        g = 0
        for c in self.coeffs:
            g = gcd(g, c)
        return g

    def primitive(self) -> "IntPolynomial":
        # divide by the (positive) content; the sign of the polynomial is kept
        g = self.content()
        if g <= 1:
            return self
        return IntPolynomial([c // g for c in self.coeffs])


def divides(p: IntPolynomial, q: IntPolynomial) -> bool:
    """Whether p divides q exactly over the integers."""
    if p.is_zero():
        return q.is_zero()
    if q.is_zero():
        return True
    if q.degree < p.degree:
        return False
    rem = [Fraction(c) for c in q.coeffs]
    lead = Fraction(p.leading)
    quot = [Fraction(0)] * (q.degree - p.degree + 1)
    for k in range(q.degree - p.degree, -1, -1):
        c = rem[k + p.degree] / lead
        quot[k] = c
        if c:
            for i, pc in enumerate(p.coeffs):
                rem[k + i] -= c * pc
    if any(rem):
        return False
    return all(c.denominator == 1 for c in quot)


def exact_quotient(p: IntPolynomial, q: IntPolynomial) -> IntPolynomial:
    """q / p, raising unless the division is exact over the integers."""
    if not divides(p, q):
        raise PolynomialError("%r does not divide %r" % (p, q))
    rem = [Fraction(c) for c in q.coeffs]
    lead = Fraction(p.leading)
    quot = [Fraction(0)] * max(q.degree - p.degree + 1, 0)
    for k in range(q.degree - p.degree, -1, -1):
        c = rem[k + p.degree] / lead
        quot[k] = c
        if c:
            for i, pc in enumerate(p.coeffs):
                rem[k + i] -= c * pc
    return IntPolynomial([int(c) for c in quot])


def _frac_poly_rem(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a = a[:]
    while len(a) >= len(b) and any(a):
        if a[-1] == 0:
            a.pop()
            continue
        c = a[-1] / b[-1]
        off = len(a) - len(b)
        for i, bc in enumerate(b):
            a[off + i] -= c * bc
        a.pop()
    while a and a[-1] == 0:
        a.pop()
    return a


def squarefree_part(p: IntPolynomial) -> IntPolynomial:
    """p / gcd(p, p'), primitive over the integers; same real roots as p."""
    if p.is_zero() or p.degree == 0:
        return p
    a = [Fraction(c) for c in p.coeffs]
    b = [Fraction(c) for c in p.derivative().coeffs]
    while b:
        a, b = b, _frac_poly_rem(a, b)
    # a is gcd(p, p') up to a rational factor; divide it out of p
    den = 1
    for c in a:
        den = den * c.denominator // gcd(den, c.denominator)
    g = IntPolynomial([int(c * den) for c in a]).primitive()
    if g.degree <= 0:
        return p.primitive()
    return exact_quotient(g, p.primitive()).primitive()


def sturm_chain(p: IntPolynomial) -> list[IntPolynomial]:
    chain = [p, p.derivative()]
    while not chain[-1].is_zero() and chain[-1].degree > 0:
        a = [Fraction(c) for c in chain[-2].coeffs]
        b = [Fraction(c) for c in chain[-1].coeffs]
        r = _frac_poly_rem(a, b)
        if not r:
            break
        den = 1
        for c in r:
            den = den * c.denominator // gcd(den, c.denominator)
        chain.append(-IntPolynomial([int(c * den) for c in r]).primitive())
    return chain


def _sign_variations(chain: Sequence[IntPolynomial], x: Rational) -> int:
    signs = []
    for q in chain:
        v = q(x)
        if v > 0:
            signs.append(1)
        elif v < 0:
            signs.append(-1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_real_roots(p: IntPolynomial, a: Rational, b: Rational) -> int:
    """Number of distinct real roots of p in the half-open interval (a, b]."""
    if p.is_zero():
        raise PolynomialError("zero polynomial")
    q = squarefree_part(p)
    if q.degree <= 0:
        return 0
    chain = sturm_chain(q)
    return _sign_variations(chain, a) - _sign_variations(chain, b)


def root_bound(p: IntPolynomial) -> int:
    """Integer Cauchy bound: all real roots lie in [-B, B]."""
    if p.is_zero() or p.degree == 0:
        return 1
    lead = abs(p.leading)
    m = max(abs(c) for c in p.coeffs[:-1]) if p.degree > 0 else 0
    return 1 + (m + lead - 1) // lead


def _divisors(n: int) -> list[int]:
    n = abs(n)
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            out.append(n // d)
        d += 1
    return sorted(set(out))


def _largest_rational_root(q: IntPolynomial) -> Fraction | None:
    """Largest rational root of q, or None (rational root theorem)."""
    coeffs = list(q.coeffs)
    zero_root = False
    while coeffs and coeffs[0] == 0:
        zero_root = True
        coeffs.pop(0)
    best = Fraction(0) if zero_root else None
    if len(coeffs) > 1:
        g = IntPolynomial(coeffs)
        for num in _divisors(g.coeffs[0]):
            for den in _divisors(g.leading):
                for cand in (Fraction(num, den), Fraction(-num, den)):
                    if g(cand) == 0 and (best is None or cand > best):
                        best = cand
    return best


def largest_real_root(p: IntPolynomial, tol: Rational) -> tuple[Fraction, Fraction]:
    """Certified interval of width <= tol around the largest real root of p.

    Raises if p has no real root or tol <= 0.  The interval endpoints are
    exact rationals; a rational largest root comes back as a point
    interval.
    """
    tol = Fraction(tol)
    if tol <= 0:
        raise PolynomialError("tolerance must be positive")
    if p.is_zero() or p.degree <= 0:
        raise PolynomialError("constant polynomial has no roots")
    q = squarefree_part(p)
    chain = sturm_chain(q)
    hi = Fraction(root_bound(q))
    lo = -hi
    if _sign_variations(chain, lo) - _sign_variations(chain, hi) < 1:
        raise PolynomialError("polynomial has no real root")

    r = _largest_rational_root(q)
    if r is not None and _sign_variations(chain, r) - _sign_variations(chain, hi) == 0:
        return (r, r)

    # keep exactly the largest root inside (lo, hi]
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if q(mid) == 0:
            # mid is a root; it is the largest iff none lie above
            if _sign_variations(chain, mid) - _sign_variations(chain, hi) == 0:
                return (mid, mid)
            lo = mid
            continue
        if _sign_variations(chain, mid) - _sign_variations(chain, hi) >= 1:
            lo = mid
        else:
            hi = mid
    return (lo, hi)
