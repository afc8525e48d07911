"""Braid words: free reduction, puncture permutations, and a homological
dilatation cross-check.

Words are tuples of nonzero integers: letter ``i`` is the positive half
twist swapping punctures i and i+1, ``-i`` its inverse.  The Burau
representation evaluated at t = -1 is integral and, for the braids
handled here (all with orientable-double-cover invariant foliations),
its characteristic polynomial contains the braid's dilatation polynomial
as a factor; this gives an exact, figure-free consistency check for
curated word annotations.
"""

from __future__ import annotations

from .polynomials import IntPolynomial, divides


class BraidError(ValueError):
    pass


def check_word(word, n: int) -> tuple[int, ...]:
    w = tuple(int(x) for x in word)
    for x in w:
        if x == 0 or abs(x) > n - 1:
            raise BraidError("letter %d out of range for %d strands" % (x, n))
    return w


def free_reduce(word) -> tuple[int, ...]:
    out: list[int] = []
    for x in word:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(int(x))
    return tuple(out)


def cyclic_rotations(word) -> list[tuple[int, ...]]:
    w = tuple(word)
    return [w[i:] + w[:i] for i in range(len(w))] or [()]


def equal_up_to_rotation(a, b) -> bool:
    """Equality of freely reduced words up to cyclic rotation."""
    ra, rb = free_reduce(a), free_reduce(b)
    return any(free_reduce(r) == rb for r in cyclic_rotations(ra))


def inverse(word) -> tuple[int, ...]:
    return tuple(-x for x in reversed(word))


def permutation(word, n: int) -> tuple[int, ...]:
    """Image of punctures 0..n-1 under the braid (letters act in word order)."""
    check_word(word, n)
    perm = list(range(n))
    for x in word:
        i = abs(x) - 1
        # position-level crossing: the strands at slots i, i+1 swap
        pi = perm.index(i)
        pj = perm.index(i + 1)
        perm[pi], perm[pj] = perm[pj], perm[pi]
    return tuple(perm)


def cycle_type(perm) -> tuple[int, ...]:
    seen = set()
    sizes = []
    for i in range(len(perm)):
        if i in seen:
            continue
        j, size = i, 0
        while j not in seen:
            seen.add(j)
            j = perm[j]
            size += 1
        sizes.append(size)
    return tuple(sorted(sizes, reverse=True))


def _mat_mul(a, b):
    n = len(a)
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def burau_minus_one(word, n: int) -> list[list[int]]:
    """Unreduced Burau matrix of the braid at t = -1 (n x n, integral)."""
    check_word(word, n)
    mat = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for x in word:
        i = abs(x) - 1
        g = [[1 if a == b else 0 for b in range(n)] for a in range(n)]
        if x > 0:
            # [[1-t, t], [1, 0]] at t = -1
            g[i][i], g[i][i + 1] = 2, -1
            g[i + 1][i], g[i + 1][i + 1] = 1, 0
        else:
            # inverse block [[0, -t], [-1/t, 1-1/t]] at t = -1
            g[i][i], g[i][i + 1] = 0, 1
            g[i + 1][i], g[i + 1][i + 1] = -1, 2
        mat = _mat_mul(mat, g)
    return mat


def _char_poly_int(mat) -> IntPolynomial:
    # Faddeev-LeVerrier over the integers; works for any integer matrix
    n = len(mat)
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    mk = [row[:] for row in mat]
    for k in range(1, n + 1):
        tr = sum(mk[i][i] for i in range(n))
        assert tr % k == 0
        c = -(tr // k)
        coeffs[n - k] = c
        if k == n:
            break
        for i in range(n):
            mk[i][i] += c
        mk = _mat_mul(mat, mk)
    return IntPolynomial(coeffs)


def burau_char_poly(word, n: int) -> IntPolynomial:
    return _char_poly_int(burau_minus_one(word, n))


def dilatation_poly_matches(word, n: int, poly: IntPolynomial) -> bool:
    """Whether the braid's Burau spectrum at t = -1 contains the claimed
    dilatation polynomial (up to coefficient reversal, since eigenvalue
    reciprocals correspond to inverse braids / transposed actions).

    Sees the dilatation only when the invariant foliations orient on the
    double cover; a False here is inconclusive (use growth_estimate).
    """
    chi = burau_char_poly(word, n)
    if divides(poly, chi) or divides(poly.reverse(), chi):
        return True
    neg = IntPolynomial([c if i % 2 == 0 else -c for i, c in enumerate(poly.coeffs)])
    return divides(neg, chi) or divides(neg.reverse(), chi)


# ---------------------------------------------------------------------------
# growth of the induced free-group automorphism

def _artin_images(word, n: int) -> list[tuple[int, ...]]:
    """Images of the free generators x_1..x_n (punctures' loops) under the
    braid's Artin action.  Generators encoded 1..n, inverses negative."""
    check_word(word, n)
    images = [(i,) for i in range(1, n + 1)]

    def sub(target: tuple[int, ...], maps: dict[int, tuple[int, ...]]) -> tuple[int, ...]:
        out: list[int] = []
        for g in target:
            img = maps.get(abs(g), (abs(g),))
            seq = img if g > 0 else tuple(-x for x in reversed(img))
            for x in seq:
                if out and out[-1] == -x:
                    out.pop()
                else:
                    out.append(x)
        return tuple(out)

    for letter in word:
        i = abs(letter)
        if letter > 0:
            maps = {i: (i, i + 1, -i), i + 1: (i,)}
        else:
            maps = {i: (i + 1,), i + 1: (-(i + 1), i, i + 1)}
        images = [sub(img, maps) for img in images]
    return images


def _cyclic_reduce(w: tuple[int, ...]) -> tuple[int, ...]:
    w = free_reduce(w)
    while len(w) > 1 and w[0] == -w[-1]:
        w = free_reduce(w[1:-1])
    return w


def growth_estimate(word, n: int, iterations: int = 14) -> float:
    """Growth rate of the induced automorphism of the free group on the
    puncture loops; equals the dilatation for pseudo-Anosov braids.

    Numeric consistency check only (ratios of cyclically reduced word
    lengths), not a certificate.
    """
    maps = {i + 1: img for i, img in enumerate(_artin_images(word, n))}

    def apply(w: tuple[int, ...]) -> tuple[int, ...]:
        out: list[int] = []
        for g in w:
            img = maps[abs(g)]
            seq = img if g > 0 else tuple(-x for x in reversed(img))
            for x in seq:
                if out and out[-1] == -x:
                    out.pop()
                else:
                    out.append(x)
        return tuple(out)

    # single puncture loops stay conjugates of generators, so iterate an
    # essential non-peripheral element instead
    cur = _cyclic_reduce((1, -2))
    prev_len = len(cur)
    ratio = 0.0
    for _ in range(iterations):
        cur = _cyclic_reduce(apply(cur))
        ratio = len(cur) / prev_len
        prev_len = len(cur)
    return ratio
