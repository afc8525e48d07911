"""Pure-Python search kernel.

Reference implementation of the depth-first path extension loop.  The
compiled kernel in ``_speedups`` mirrors this exactly; results must be
identical.  Arithmetic here is arbitrary-precision, so this backend also
serves as the fallback when a requested norm bound exceeds the compiled
kernel's checked 64-bit range.
"""

from __future__ import annotations

from typing import Optional

_DEPTH_HISTOGRAM_CAP = 1 << 20


class KernelContext:
    """Preprocessed automaton and pruning parameters for the kernels."""

    __slots__ = (
        "edge_dim", "num_vertices", "arrow_dst", "arrow_perm_inv", "arrow_m",
        "arrow_n", "out_arrows", "maxnorm", "sum_threshold", "avoid_by_last",
        "lam_num", "lam_den", "equality_bucket", "pf_exponent", "max_depth",
    )

    def __init__(self, edge_dim, num_vertices, arrow_dst, arrow_perm_inv, arrow_m,
                 arrow_n, out_arrows, maxnorm, sum_threshold, avoid_by_last,
                 lam_num, lam_den, equality_bucket):
        self.edge_dim = edge_dim
        self.num_vertices = num_vertices
        self.arrow_dst = arrow_dst
        self.arrow_perm_inv = arrow_perm_inv
        self.arrow_m = arrow_m
        self.arrow_n = arrow_n
        self.out_arrows = out_arrows
        self.maxnorm = maxnorm
        self.sum_threshold = sum_threshold
        self.avoid_by_last = avoid_by_last
        self.lam_num = lam_num
        self.lam_den = lam_den
        self.equality_bucket = equality_bucket
        n = edge_dim
        self.pf_exponent = n * n - 2 * n + 2
        # each extension raises the entry sum by at least 1 from dim+1
        self.max_depth = max(maxnorm - edge_dim, 0) + 1


class ResourceCap(RuntimeError):
    def __init__(self, expansions):
        super().__init__("expansion cap exceeded at %d" % expansions)
        self.expansions = expansions


def apply_arrow(rows, perm_inv, m, n_col, dim):
    """rows * (P + E[m, n]) for the arrow's permutation P."""
    out = []
    for row in rows:
        extra = row[m]
        new_row = tuple(
            row[perm_inv[k]] + extra if k == n_col else row[perm_inv[k]]
            for k in range(dim)
        )
        out.append(new_row)
    return tuple(out)


def _is_primitive(rows, dim, exponent):
    """Primitivity via boolean pattern squarings.

    A positive power forbids zero rows and columns, so positivity persists
    upward; checking the squarings M^(2^k) up to 2^k >= exponent is
    equivalent to checking M^exponent itself.
    """
    full = (1 << dim) - 1
    pat = []
    for row in rows:
        bits = 0
        for j in range(dim):
            if row[j]:
                bits |= 1 << j
        pat.append(bits)
    if all(b == full for b in pat):
        return True
    reach = 1
    while reach < exponent:
        nxt = []
        for abits in pat:
            bits = 0
            rem = abits
            while rem:
                k = (rem & -rem).bit_length() - 1
                bits |= pat[k]
                rem &= rem - 1
            nxt.append(bits)
        pat = nxt
        if all(b == full for b in pat):
            return True
        reach <<= 1
    return False


def _rho_less(rows, dim, a, b):
    """Exact spectral radius < a/b via leading principal minors of aI - bM."""
    w = [[(a if i == j else 0) - b * rows[i][j] for j in range(dim)] for i in range(dim)]
    prev = 1
    for k in range(dim):
        piv = w[k][k]
        if piv <= 0:
            return False
        for i in range(k + 1, dim):
            wi = w[i]
            wk = w[k]
            f = wi[k]
            for j in range(k + 1, dim):
                wi[j] = (wi[j] * piv - f * wk[j]) // prev
        prev = piv
    return True


def extend(seed_word, seed_start, seed_end, seed_rows, seed_norm, ctx: KernelContext,
           max_expansions: Optional[int] = None):
    """Exhaust all extensions of one seed path (iterative DFS).

    Returns (raw candidates, stats).  Raw candidates are
    (word, start, maybe_equal) with maybe_equal set for closed primitive
    paths that failed rho < lambda while the equality bucket is on; the
    caller settles those exactly.  Stats: (expansions, eigen_tested,
    pruned_norm, pruned_sums, pruned_avoid, depth_expansions list).
    """
    dim = ctx.edge_dim
    t = ctx.sum_threshold
    maxnorm = ctx.maxnorm
    avoid_by_last = ctx.avoid_by_last
    out_arrows = ctx.out_arrows
    dsts = ctx.arrow_dst
    perm_invs = ctx.arrow_perm_inv
    ms = ctx.arrow_m
    ns = ctx.arrow_n
    a_num, b_den = ctx.lam_num, ctx.lam_den
    pf_exponent = ctx.pf_exponent
    equality_bucket = ctx.equality_bucket

    expansions = 0
    eigen_tested = 0
    pruned_norm = 0
    pruned_sums = 0
    pruned_avoid = 0
    seed_len = len(seed_word)
    hist_len = min(seed_len + ctx.max_depth + 3, _DEPTH_HISTOGRAM_CAP)
    depth_expansions = [0] * hist_len
    candidates = []
    word = list(seed_word)

    # stack frames: (vertex, rows, norm, iterator over outgoing arrows)
    stack = [(seed_end, seed_rows, seed_norm, iter(out_arrows[seed_end]))]
    while stack:
        vertex, rows, norm, it = stack[-1]
        ai = next(it, None)
        if ai is None:
            stack.pop()
            if word and len(word) > seed_len:
                word.pop()
            continue
        expansions += 1
        depth = len(word) + 1
        if depth < hist_len:
            depth_expansions[depth] += 1
        if max_expansions is not None and expansions > max_expansions:
            raise ResourceCap(expansions)
        m = ms[ai]
        gain = sum(row[m] for row in rows)
        if norm + gain > maxnorm:
            pruned_norm += 1
            continue
        new_rows = apply_arrow(rows, perm_invs[ai], m, ns[ai], dim)
        ok_row = any(sum(r) < t for r in new_rows)
        ok_col = ok_row and any(
            sum(r[k] for r in new_rows) < t for k in range(dim)
        )
        if not (ok_row and ok_col):
            pruned_sums += 1
            continue
        word.append(ai)
        hit = False
        for wlen, wtuple in avoid_by_last.get(ai, ()):
            if len(word) >= wlen and tuple(word[-wlen:]) == wtuple:
                hit = True
                break
        if hit:
            pruned_avoid += 1
            word.pop()
            continue
        dst = dsts[ai]
        if dst == seed_start and _is_primitive(new_rows, dim, pf_exponent):
            eigen_tested += 1
            if _rho_less(new_rows, dim, a_num, b_den):
                candidates.append((tuple(word), seed_start, False))
            elif equality_bucket:
                candidates.append((tuple(word), seed_start, True))
        stack.append((dst, new_rows, norm + gain, iter(out_arrows[dst])))

    return candidates, (expansions, eigen_tested, pruned_norm, pruned_sums,
                        pruned_avoid, depth_expansions)
