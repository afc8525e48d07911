# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled search kernel: identical semantics to ``_search_py.extend``.

Matrices live in 64-bit integers; the entry-sum gate keeps every entry at
or below ``maxnorm`` before anything is materialized, so the fast path is
overflow-safe by construction.  The spectral-radius test runs a
fraction-free elimination in 128-bit integers; ``supports`` checks the
Hadamard bound so the caller can fall back to the arbitrary-precision
backend when the numbers could outgrow it.
"""

from libc.stdlib cimport free, malloc, realloc
from libc.string cimport memset

from . import _search_py

ctypedef long long i64
cdef extern from *:
    ctypedef long long i128 "__int128"
cdef extern from *:
    int __builtin_ctzll(unsigned long long) nogil


def supports(int dim, object maxnorm, object lam):
    """Whether the compiled kernel's integer ranges cover this search.

    The norm gate keeps every matrix entry at or below maxnorm, so 64-bit
    matrices are safe up to the stack-size cap; the elimination in the
    spectral test must additionally fit 128-bit integers (Hadamard bound).
    """
    if dim < 1 or dim > 12:
        return False
    if maxnorm > 4096:
        return False
    a = lam.numerator
    b = lam.denominator
    entry_bound = a + b * int(maxnorm)
    hadamard = entry_bound ** dim
    for _ in range(dim // 2 + 1):
        hadamard *= dim
    return hadamard < (1 << 126)


cdef bint _is_primitive(i64 *rows, int dim, unsigned int exponent) noexcept nogil:
    """Primitivity via boolean pattern squarings up to 2^k >= exponent."""
    cdef unsigned long long pat[12]
    cdef unsigned long long nxt[12]
    cdef unsigned long long full = (<unsigned long long> 1 << dim) - 1
    cdef int i, j, k
    cdef unsigned long long bits, rem
    cdef bint allfull = True
    for i in range(dim):
        bits = 0
        for j in range(dim):
            if rows[i * dim + j] != 0:
                bits |= <unsigned long long> 1 << j
        pat[i] = bits
        if bits != full:
            allfull = False
    if allfull:
        return True
    cdef unsigned int reach = 1
    while reach < exponent:
        allfull = True
        for i in range(dim):
            bits = 0
            rem = pat[i]
            while rem:
                k = __builtin_ctzll(rem)
                bits |= pat[k]
                rem &= rem - 1
            nxt[i] = bits
            if bits != full:
                allfull = False
        for i in range(dim):
            pat[i] = nxt[i]
        if allfull:
            return True
        reach <<= 1
    return False


cdef bint _rho_less(i64 *rows, int dim, i64 a, i64 b) noexcept nogil:
    """Exact spectral radius < a/b: leading principal minors of aI - bM."""
    cdef i128 w[144]
    cdef i128 piv, prev, f
    cdef int i, j, k
    for i in range(dim):
        for j in range(dim):
            w[i * dim + j] = (a if i == j else 0) - <i128> b * rows[i * dim + j]
    prev = 1
    for k in range(dim):
        piv = w[k * dim + k]
        if piv <= 0:
            return False
        for i in range(k + 1, dim):
            f = w[i * dim + k]
            for j in range(k + 1, dim):
                w[i * dim + j] = (w[i * dim + j] * piv - f * w[k * dim + j]) // prev
        prev = piv
    return True


cdef struct CandBuf:
    int *data          # concatenated: count entries of (len, eq, word...)
    size_t used
    size_t cap


cdef int _cand_push(CandBuf *buf, int *word, int length, int eq) noexcept nogil:
    cdef size_t need = buf.used + 2 + <size_t> length
    cdef int *nd
    if need > buf.cap:
        while buf.cap < need:
            buf.cap *= 2
        nd = <int *> realloc(buf.data, buf.cap * sizeof(int))
        if nd == NULL:
            return -1
        buf.data = nd
    buf.data[buf.used] = length
    buf.data[buf.used + 1] = eq
    cdef int i
    for i in range(length):
        buf.data[buf.used + 2 + i] = word[i]
    buf.used = need
    return 0


def extend(seed_word, int seed_start, int seed_end, seed_rows, object seed_norm,
           object ctx, object max_expansions):
    """Mirror of ``_search_py.extend`` on C integers."""
    cdef int dim = ctx.edge_dim
    cdef int num_arrows = len(ctx.arrow_dst)
    cdef int t = ctx.sum_threshold
    cdef i64 maxnorm = ctx.maxnorm
    cdef i64 a_num = ctx.lam_num
    cdef i64 b_den = ctx.lam_den
    cdef bint equality_bucket = 1 if ctx.equality_bucket else 0
    cdef unsigned int pf_exponent = ctx.pf_exponent
    cdef int max_depth = ctx.max_depth
    cdef long long cap = -1
    if max_expansions is not None:
        cap = max_expansions

    cdef int seed_len = len(seed_word)
    cdef int total_word = seed_len + max_depth + 2
    cdef int nv = ctx.num_vertices

    # --- pack the automaton ---
    cdef int *dst = <int *> malloc(num_arrows * sizeof(int))
    cdef int *arr_m = <int *> malloc(num_arrows * sizeof(int))
    cdef int *arr_n = <int *> malloc(num_arrows * sizeof(int))
    cdef int *perm_inv = <int *> malloc(num_arrows * dim * sizeof(int))
    cdef int *out_off = <int *> malloc((nv + 1) * sizeof(int))
    cdef int i, j, k
    for i in range(num_arrows):
        dst[i] = ctx.arrow_dst[i]
        arr_m[i] = ctx.arrow_m[i]
        arr_n[i] = ctx.arrow_n[i]
        pi = ctx.arrow_perm_inv[i]
        for j in range(dim):
            perm_inv[i * dim + j] = pi[j]
    total_out = sum(len(x) for x in ctx.out_arrows)
    cdef int *out_flat = <int *> malloc(total_out * sizeof(int))
    k = 0
    for i in range(nv):
        out_off[i] = k
        for aid in ctx.out_arrows[i]:
            out_flat[k] = aid
            k += 1
    out_off[nv] = k

    # --- avoid words, grouped by final arrow ---
    avoid_items = []
    for last, entries in ctx.avoid_by_last.items():
        for ln, wt in entries:
            avoid_items.append((last, ln, wt))
    cdef int n_avoid = len(avoid_items)
    cdef int *av_last = <int *> malloc(max(n_avoid, 1) * sizeof(int))
    cdef int *av_len = <int *> malloc(max(n_avoid, 1) * sizeof(int))
    cdef int *av_off = <int *> malloc(max(n_avoid + 1, 1) * sizeof(int))
    total_av = sum(it[1] for it in avoid_items)
    cdef int *av_flat = <int *> malloc(max(total_av, 1) * sizeof(int))
    k = 0
    for i, (last, ln, wt) in enumerate(avoid_items):
        av_last[i] = last
        av_len[i] = ln
        av_off[i] = k
        for x in wt:
            av_flat[k] = x
            k += 1
    av_off[n_avoid] = k

    # --- DFS state ---
    cdef i64 *rows_stack = <i64 *> malloc((max_depth + 2) * dim * dim * sizeof(i64))
    cdef i64 *norm_stack = <i64 *> malloc((max_depth + 2) * sizeof(i64))
    cdef int *vtx_stack = <int *> malloc((max_depth + 2) * sizeof(int))
    cdef int *pos_stack = <int *> malloc((max_depth + 2) * sizeof(int))
    cdef int *word = <int *> malloc(total_word * sizeof(int))
    cdef long long *depth_exp = <long long *> malloc((seed_len + max_depth + 3) * sizeof(long long))
    memset(depth_exp, 0, (seed_len + max_depth + 3) * sizeof(long long))

    for i in range(seed_len):
        word[i] = seed_word[i]
    for i in range(dim):
        row = seed_rows[i]
        for j in range(dim):
            rows_stack[i * dim + j] = row[j]
    norm_stack[0] = seed_norm
    vtx_stack[0] = seed_end
    pos_stack[0] = 0

    cdef CandBuf buf
    buf.cap = 256
    buf.used = 0
    buf.data = <int *> malloc(buf.cap * sizeof(int))

    cdef long long expansions = 0, eigen_tested = 0
    cdef long long pruned_norm = 0, pruned_sums = 0, pruned_avoid = 0
    cdef int level = 0, ai, v, pos, m, ncol, d, wl, ok
    cdef i64 gain, norm
    cdef i64 *cur
    cdef i64 *nxt
    cdef i64 s
    cdef bint ok_row, ok_col, hit
    cdef int status = 0  # 1 = cap hit, 2 = out of memory

    with nogil:
        while level >= 0:
            v = vtx_stack[level]
            pos = pos_stack[level]
            if out_off[v] + pos >= out_off[v + 1]:
                level -= 1
                continue
            pos_stack[level] = pos + 1
            ai = out_flat[out_off[v] + pos]
            expansions += 1
            depth_exp[seed_len + level + 1] += 1
            if cap >= 0 and expansions > cap:
                status = 1
                break
            cur = rows_stack + level * dim * dim
            m = arr_m[ai]
            gain = 0
            for i in range(dim):
                gain += cur[i * dim + m]
            norm = norm_stack[level]
            if norm + gain > maxnorm:
                pruned_norm += 1
                continue
            nxt = rows_stack + (level + 1) * dim * dim
            ncol = arr_n[ai]
            for i in range(dim):
                for j in range(dim):
                    s = cur[i * dim + perm_inv[ai * dim + j]]
                    if j == ncol:
                        s += cur[i * dim + m]
                    nxt[i * dim + j] = s
            ok_row = False
            ok_col = False
            for i in range(dim):
                s = 0
                for j in range(dim):
                    s += nxt[i * dim + j]
                if s < t:
                    ok_row = True
                    break
            if ok_row:
                for j in range(dim):
                    s = 0
                    for i in range(dim):
                        s += nxt[i * dim + j]
                    if s < t:
                        ok_col = True
                        break
            if not (ok_row and ok_col):
                pruned_sums += 1
                continue
            wl = seed_len + level
            word[wl] = ai
            hit = False
            for i in range(n_avoid):
                if av_last[i] != ai:
                    continue
                d = av_len[i]
                if wl + 1 < d:
                    continue
                ok = 1
                for j in range(d):
                    if word[wl + 1 - d + j] != av_flat[av_off[i] + j]:
                        ok = 0
                        break
                if ok:
                    hit = True
                    break
            if hit:
                pruned_avoid += 1
                continue
            if dst[ai] == seed_start and _is_primitive(nxt, dim, pf_exponent):
                eigen_tested += 1
                if _rho_less(nxt, dim, a_num, b_den):
                    if _cand_push(&buf, word, wl + 1, 0) < 0:
                        status = 2
                        break
                elif equality_bucket:
                    if _cand_push(&buf, word, wl + 1, 1) < 0:
                        status = 2
                        break
            level += 1
            vtx_stack[level] = dst[ai]
            norm_stack[level] = norm + gain
            pos_stack[level] = 0

    candidates = []
    cdef size_t off = 0
    cdef int length, eq
    if status == 0:
        while off < buf.used:
            length = buf.data[off]
            eq = buf.data[off + 1]
            w = tuple(buf.data[off + 2 + i] for i in range(length))
            candidates.append((w, seed_start, bool(eq)))
            off += 2 + length
    depths = [depth_exp[i] for i in range(seed_len + max_depth + 3)]

    free(dst); free(arr_m); free(arr_n); free(perm_inv)
    free(out_off); free(out_flat)
    free(av_last); free(av_len); free(av_off); free(av_flat)
    free(rows_stack); free(norm_stack); free(vtx_stack); free(pos_stack)
    free(word); free(depth_exp); free(buf.data)

    if status == 1:
        raise _search_py.ResourceCap(expansions)
    if status == 2:
        raise MemoryError("candidate buffer allocation failed")
    return candidates, (expansions, eigen_tested, pruned_norm, pruned_sums,
                        pruned_avoid, depths)
