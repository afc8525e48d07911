"""Layered/depth-first enumeration of low-dilatation closed paths.

The search walks all paths of a folding automaton whose transition
matrices keep entry sum at most ``maxnorm`` (the entry-sum bound for the
requested dilatation bound), avoid a set of certified-redundant loop
powers, and keep at least one row and one column sum below a threshold.
Closed surviving paths with primitive matrix and certified dilatation
below the bound are the candidates; they are reported up to cyclic
rotation of the arrow word.

Seeds are produced breadth-first (the layered structure of the original
procedure); each seed subtree is then exhausted independently, which is
what the worker threads parallelize over.  The candidate list is merged,
deduplicated and sorted at the end, so results do not depend on the
thread count or backend.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from typing import Iterable, Optional, Sequence, Union

from . import _search_py
from .automaton import FoldingAutomaton
from .matrices import (
    TransMatrix,
    char_poly,
    dominates,
    entry_sum,
    is_perron_frobenius,
    max_norm_bound,
    rho_less_equal,
    rho_less_than,
    same_pattern,
    spectral_radius,
    _as_fraction,
)
from .polynomials import IntPolynomial

Rational = Union[int, float, Fraction, str]

log = logging.getLogger(__name__)


class SearchError(ValueError):
    pass


class ResourceCapExceeded(RuntimeError):
    """Loud abort: the expansion cap was hit before the search completed."""

    def __init__(self, message, stats=None):
        super().__init__(message)
        self.stats = stats


def _backend_modules():
    mods = {"py": _search_py}
    try:
        from . import _speedups  # compiled extension, optional

        mods["cy"] = _speedups
    except ImportError:
        pass
    return mods


def available_backends() -> list[str]:
    return sorted(_backend_modules())


def default_backend() -> str:
    env = os.environ.get("BRAIDFOLD_BACKEND")
    mods = _backend_modules()
    if env:
        if env not in mods:
            raise SearchError("backend %r not available (have %s)" % (env, sorted(mods)))
        return env
    return "cy" if "cy" in mods else "py"


@dataclass(frozen=True)
class SearchPath:
    arrows: tuple[int, ...]
    start: int
    end: int
    rows: tuple[tuple[int, ...], ...]
    norm: int

    def matrix(self) -> TransMatrix:
        return TransMatrix(self.rows)


@dataclass(frozen=True)
class AvoidEntry:
    word: tuple[int, ...]      # forbidden arrow word: loop ** (n0 + k)
    loop: tuple[int, ...]
    n0: int
    k: int


@dataclass(frozen=True)
class AvoidSet:
    entries: tuple[AvoidEntry, ...]

    def words(self) -> list[tuple[int, ...]]:
        return [e.word for e in self.entries]

    def by_last(self) -> dict[int, list[tuple[int, tuple[int, ...]]]]:
        out: dict[int, list[tuple[int, tuple[int, ...]]]] = {}
        for e in self.entries:
            out.setdefault(e.word[-1], []).append((len(e.word), e.word))
        return out

    def content(self) -> tuple:
        return tuple((e.word, e.loop, e.n0, e.k) for e in self.entries)


EMPTY_AVOID = AvoidSet(())


@dataclass(frozen=True)
class Candidate:
    word: tuple[int, ...]          # canonical (minimal) rotation of the arrow word
    start: int
    matrix: TransMatrix
    norm: int
    poly: IntPolynomial
    dilatation: tuple[Fraction, Fraction]
    is_equality: bool = False


@dataclass
class SearchStats:
    expansions: int = 0
    eigen_tested: int = 0
    pruned_norm: int = 0
    pruned_sums: int = 0
    pruned_avoid: int = 0
    depth_expansions: list[int] = field(default_factory=list)
    seeds: int = 0
    threads: int = 1
    backend: str = "py"

    def merge_raw(self, raw: tuple) -> None:
        expansions, eigen, pn, ps, pa, depths = raw
        self.expansions += expansions
        self.eigen_tested += eigen
        self.pruned_norm += pn
        self.pruned_sums += ps
        self.pruned_avoid += pa
        if len(self.depth_expansions) < len(depths):
            self.depth_expansions += [0] * (len(depths) - len(self.depth_expansions))
        for i, d in enumerate(depths):
            self.depth_expansions[i] += d

    def as_dict(self) -> dict:
        return {
            "expansions": self.expansions,
            "eigen_tested": self.eigen_tested,
            "pruned_norm": self.pruned_norm,
            "pruned_sums": self.pruned_sums,
            "pruned_avoid": self.pruned_avoid,
            "max_depth_reached": max(
                (i for i, d in enumerate(self.depth_expansions) if d), default=0
            ),
            "depth_expansions": list(self.depth_expansions),
            "seeds": self.seeds,
            "threads": self.threads,
            "backend": self.backend,
        }


@dataclass
class SearchResult:
    candidates: list[Candidate]
    equality_candidates: list[Candidate]
    stats: SearchStats
    params: dict


def min_rotation(word: Sequence[int]) -> tuple[int, ...]:
    w = tuple(word)
    return min(w[i:] + w[:i] for i in range(len(w))) if w else w


# ---------------------------------------------------------------------------
# avoid set construction (certified loop-power redundancy)


def _pattern(m: TransMatrix) -> tuple[tuple[bool, ...], ...]:
    return tuple(tuple(x > 0 for x in row) for row in m.rows)


def build_avoid_set(automaton: FoldingAutomaton, max_loop_len: int = 2,
                    probe_exponent: int = 64) -> AvoidSet:
    """Forbidden words from loops whose matrix powers pattern-stabilize.

    For a loop word g with matrix A, find the least n0, k with
    pattern(A^(n0+k)) = pattern(A^n0) and A^(n0+k) >= A^n0.  Pattern
    evolution is deterministic, and domination propagates under further
    multiplication, so both properties then hold for every larger
    exponent; g**(n0+k) can be excluded from the search without changing
    the minimum dilatation.  Loops that fail to stabilize within the probe
    bound are skipped.
    """
    if not automaton.vertices:
        return EMPTY_AVOID
    matrices = automaton.arrow_matrices()
    out = automaton.out_arrows()
    loops: list[tuple[int, ...]] = []

    def walk(start: int, v: int, word: list[int]):
        if word and v == start:
            loops.append(tuple(word))
        if len(word) >= max_loop_len:
            return
        for ai in out[v]:
            word.append(ai)
            walk(start, automaton.arrows[ai].target, word)
            word.pop()

    for v in range(len(automaton.vertices)):
        walk(v, v, [])
    loops.sort()

    entries = []
    for loop in loops:
        a = matrices[loop[0]]
        for ai in loop[1:]:
            a = a * matrices[ai]
        powers = [a]
        pat_index = {_pattern(a): 1}
        n0 = k = None
        for e in range(2, probe_exponent + 1):
            powers.append(powers[-1] * a)
            p = _pattern(powers[-1])
            if p in pat_index:
                n0, k = pat_index[p], e - pat_index[p]
                break
            pat_index[p] = e
        if n0 is None:
            continue
        if not dominates(powers[n0 + k - 1], powers[n0 - 1]):
            continue
        if not same_pattern(powers[n0 + k - 1], powers[n0 - 1]):
            continue
        entries.append(AvoidEntry(word=loop * (n0 + k), loop=loop, n0=n0, k=k))
    return AvoidSet(tuple(entries))


# ---------------------------------------------------------------------------
# layered expansion (the spec'd one-layer operation, also used for seeding)


def _initial_paths(automaton: FoldingAutomaton, maxnorm: int, sum_threshold: int) -> list[SearchPath]:
    paths = []
    for ai, arrow in enumerate(automaton.arrows):
        m = arrow.matrix()
        norm = entry_sum(m)
        if norm > maxnorm:
            continue
        if not (any(s < sum_threshold for s in m.row_sums())
                and any(s < sum_threshold for s in m.col_sums())):
            continue
        paths.append(SearchPath((ai,), arrow.source, arrow.target, m.rows, norm))
    return paths


def children(layer: Iterable[SearchPath], automaton: FoldingAutomaton, maxnorm: int,
             avoid: AvoidSet, sum_threshold: int) -> list[SearchPath]:
    """One breadth-first layer: all surviving one-arrow extensions."""
    by_last = avoid.by_last()
    out = automaton.out_arrows()
    dim = automaton.edge_count
    arrow_data = [
        (a.target, _perm_inv(a.perm)) + (a.rule if a.rule is not None else (0, -1))
        for a in automaton.arrows
    ]
    res = []
    for path in layer:
        for ai in out[path.end]:
            dst, perm_inv, m_row, n_col = arrow_data[ai]
            gain = sum(row[m_row] for row in path.rows) if n_col >= 0 else 0
            if path.norm + gain > maxnorm:
                continue
            rows = _search_py.apply_arrow(path.rows, perm_inv, m_row, n_col, dim)
            if not (any(sum(r) < sum_threshold for r in rows)
                    and any(sum(r[k] for r in rows) < sum_threshold for k in range(dim))):
                continue
            word = path.arrows + (ai,)
            if any(len(word) >= ln and word[-ln:] == wt for ln, wt in by_last.get(ai, ())):
                continue
            res.append(SearchPath(word, path.start, dst, rows, path.norm + gain))
    return res


def _perm_inv(perm: Sequence[int]) -> tuple[int, ...]:
    inv = [0] * len(perm)
    for i, p in enumerate(perm):
        inv[p] = i
    return tuple(inv)


# ---------------------------------------------------------------------------
# closed-path classification


def classify_closed(path: SearchPath, lambda_bound: Rational,
                    tol: Rational = Fraction(1, 10**9),
                    equality_bucket: bool = False):
    """Classify a closed path: Candidate, or a rejection reason string.

    Rejections are "not-PF" and "dilatation >= bound".  With the equality
    bucket on, paths whose dilatation is exactly the bound come back as
    Candidates flagged ``is_equality``.
    """
    if path.start != path.end:
        raise SearchError("path is not closed")
    lam = _as_fraction(lambda_bound)
    m = path.matrix()
    if not is_perron_frobenius(m):
        return "not-PF"
    if rho_less_than(m, lam):
        lo, hi = spectral_radius(m, tol)
        return Candidate(min_rotation(path.arrows), path.start, m, path.norm,
                         char_poly(m), (lo, hi), False)
    if equality_bucket:
        p = char_poly(m)
        if p(lam) == 0 and rho_less_equal(m, lam):
            return Candidate(min_rotation(path.arrows), path.start, m, path.norm,
                             p, (lam, lam), True)
    return "dilatation >= bound"


# ---------------------------------------------------------------------------
# the full search


def search(automaton: FoldingAutomaton, lambda_bound: Rational, *,
           maxnorm: Optional[int] = None,
           avoid: Union[str, AvoidSet, None] = "auto",
           sum_threshold: Optional[int] = None,
           equality_bucket: bool = False,
           threads: int = 1,
           tol: Rational = Fraction(1, 10**9),
           max_expansions: Optional[int] = None,
           seed_depth: int = 3,
           backend: Optional[str] = None) -> SearchResult:
    """Complete enumeration of candidate closed paths below ``lambda_bound``.

    ``maxnorm`` defaults to floor(lambda^n + n - 1) and may only be raised
    above it (a smaller bound would lose completeness).  ``avoid`` is
    "auto" (build from the automaton), None, or an explicit AvoidSet.
    Results are independent of ``threads`` and ``backend``.
    """
    lam = _as_fraction(lambda_bound)
    if lam <= 1:
        raise SearchError("lambda bound must exceed 1")
    dim = automaton.edge_count
    if not automaton.vertices:
        return SearchResult([], [], SearchStats(), {"lambda": str(lam), "empty": True})
    computed = max_norm_bound(lam, dim)
    if maxnorm is None:
        maxnorm = computed
    elif maxnorm < computed:
        raise SearchError(
            "maxnorm %d undercuts the completeness bound %d for lambda=%s"
            % (maxnorm, computed, lam)
        )
    if sum_threshold is None:
        sum_threshold = max(3, ceil(lam))
    if avoid == "auto":
        avoid_set = build_avoid_set(automaton)
    elif avoid is None:
        avoid_set = EMPTY_AVOID
    else:
        avoid_set = avoid
    if threads < 1:
        raise SearchError("threads must be >= 1")
    backend_name = backend or default_backend()
    mods = _backend_modules()
    if backend_name not in mods:
        raise SearchError("backend %r not available" % backend_name)
    kernel = mods[backend_name]
    if backend_name == "cy" and not kernel.supports(dim, maxnorm, lam):
        backend_name, kernel = "py", mods["py"]

    arrows = automaton.arrows
    if any(a.rule is None for a in arrows):
        # isomorphism arrows have norm gain 0, which would break the
        # termination argument; none of the strata in scope produce them
        raise SearchError("search over automata with isomorphism arrows is not supported")
    ctx = _search_py.KernelContext(
        edge_dim=dim,
        num_vertices=len(automaton.vertices),
        arrow_dst=[a.target for a in arrows],
        arrow_perm_inv=[_perm_inv(a.perm) for a in arrows],
        arrow_m=[a.rule[0] if a.rule is not None else 0 for a in arrows],
        arrow_n=[a.rule[1] if a.rule is not None else -1 for a in arrows],
        out_arrows=automaton.out_arrows(),
        maxnorm=maxnorm,
        sum_threshold=sum_threshold,
        avoid_by_last=avoid_set.by_last(),
        lam_num=lam.numerator,
        lam_den=lam.denominator,
        equality_bucket=equality_bucket,
    )

    stats = SearchStats(threads=threads, backend=backend_name)
    raw_candidates: list[tuple[tuple[int, ...], int, bool]] = []

    # breadth-first seeding, collecting closed candidates along the way
    out = automaton.out_arrows()
    layer = _initial_paths(automaton, maxnorm, sum_threshold)
    stats.expansions += len(automaton.arrows)
    stats.depth_expansions = [0, len(automaton.arrows)]
    for path in layer:
        _collect_closed(path, ctx, raw_candidates, stats)
    depth = 1
    while layer and depth < seed_depth:
        attempts = sum(len(out[p.end]) for p in layer)
        layer = children(layer, automaton, maxnorm, avoid_set, sum_threshold)
        depth += 1
        stats.expansions += attempts
        stats.depth_expansions += [0] * max(0, depth + 1 - len(stats.depth_expansions))
        stats.depth_expansions[depth] += attempts
        for path in layer:
            _collect_closed(path, ctx, raw_candidates, stats)
    stats.seeds = len(layer)

    tasks = [
        (p.arrows, p.start, p.end, p.rows, p.norm)
        for p in sorted(layer, key=lambda p: p.arrows)
    ]

    def run_task(task):
        word, start, end, rows, norm = task
        return kernel.extend(word, start, end, rows, norm, ctx, max_expansions)

    try:
        if threads == 1 or not tasks:
            results = [run_task(t) for t in tasks]
        else:
            from concurrent.futures import ThreadPoolExecutor

            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(run_task, tasks))
    except _search_py.ResourceCap as exc:
        raise ResourceCapExceeded(
            "search aborted: expansion cap %s exceeded (partial expansions=%d)"
            % (max_expansions, exc.expansions),
            stats,
        ) from exc

    for cands, raw in results:
        raw_candidates.extend(cands)
        stats.merge_raw(raw)
    log.debug(
        "search lambda=%s maxnorm=%d: %d seeds, %d expansions, %d eigenvalue tests, "
        "deepest layer %d",
        lam, maxnorm, stats.seeds, stats.expansions, stats.eigen_tested,
        max((i for i, d in enumerate(stats.depth_expansions) if d), default=0),
    )
    if max_expansions is not None and stats.expansions > max_expansions:
        raise ResourceCapExceeded(
            "search aborted: total expansions %d exceeded cap %d"
            % (stats.expansions, max_expansions),
            stats,
        )

    candidates, equality = _finalize(raw_candidates, automaton, lam, tol, equality_bucket)
    params = {
        "lambda": str(lam),
        "maxnorm": maxnorm,
        "maxnorm_computed": computed,
        "sum_threshold": sum_threshold,
        "avoid_words": len(avoid_set.entries),
        "equality_bucket": equality_bucket,
        "tol": str(Fraction(_as_fraction(tol))),
        "seed_depth": seed_depth,
    }
    return SearchResult(candidates, equality, stats, params)


def _collect_closed(path: SearchPath, ctx, raw, stats) -> None:
    if path.start != path.end:
        return
    if not _search_py._is_primitive(path.rows, ctx.edge_dim, ctx.pf_exponent):
        return
    stats.eigen_tested += 1
    if _search_py._rho_less(path.rows, ctx.edge_dim, ctx.lam_num, ctx.lam_den):
        raw.append((path.arrows, path.start, False))
    elif ctx.equality_bucket:
        raw.append((path.arrows, path.start, True))


def _path_matrix(word: Sequence[int], automaton: FoldingAutomaton) -> TransMatrix:
    matrices = automaton.arrow_matrices()
    m = matrices[word[0]]
    for ai in word[1:]:
        m = m * matrices[ai]
    return m


def _finalize(raw, automaton, lam, tol, equality_bucket):
    seen = {}
    for word, start, maybe_eq in raw:
        key = min_rotation(word)
        if key not in seen:
            seen[key] = (start, maybe_eq)
    candidates = []
    equality = []
    for key in sorted(seen, key=lambda w: (len(w), w)):
        start, maybe_eq = seen[key]
        rot_start = automaton.arrows[key[0]].source
        m = _path_matrix(key, automaton)
        p = char_poly(m)
        if not maybe_eq:
            lo, hi = spectral_radius(m, tol)
            cand = Candidate(key, rot_start, m, entry_sum(m), p, (lo, hi), False)
            candidates.append(cand)
        else:
            if p(lam) == 0 and rho_less_equal(m, lam):
                equality.append(Candidate(key, rot_start, m, entry_sum(m), p, (lam, lam), True))
            # else: a rotation with rho < lam exists in `seen` separately
    candidates.sort(key=lambda c: (c.norm, len(c.word), c.word))
    equality.sort(key=lambda c: (c.norm, len(c.word), c.word))
    return candidates, equality
