"""Combinatorial train tracks on a punctured disk.

A track in the simplified local model is a union of infinitesimal polygons
(one per interior singularity) joined by expanding edges.  Every
complementary region except the one containing the boundary puncture is
the inside of an infinitesimal polygon, so the polygons-with-legs graph
must be a tree embedded in the plane: a ribbon tree.

The representation:

* a polygon has cyclically ordered corners; each corner carries a linearly
  ordered list of legs (expanding-edge endpoints);
* an expanding edge is an id appearing in exactly two leg slots;
* cusps of the outer region sit between two consecutive legs of the same
  corner, which is where folds happen.

The boundary word of the outer region ("peripheral walk") visits every
edge twice.  Reading it from a cusp and numbering edges by first
appearance yields a complete isomorphism invariant; the canonical form is
the minimum of that serialization over starting cusps.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence


class TrackError(ValueError):
    """Structural validation failure; the message names the violations."""


@dataclass(frozen=True)
class Polygon:
    punctured: bool
    corners: tuple[tuple[int, ...], ...]  # corners[c] = edge ids of the legs, in order

    @property
    def size(self) -> int:
        return len(self.corners)


@dataclass(frozen=True)
class TrainTrack:
    polygons: tuple[Polygon, ...]

    @property
    def num_edges(self) -> int:
        ids = [e for poly in self.polygons for corner in poly.corners for e in corner]
        return max(ids) + 1 if ids else 0

    def leg_slots(self) -> list[tuple[int, int, int]]:
        return [
            (p, c, j)
            for p, poly in enumerate(self.polygons)
            for c, corner in enumerate(poly.corners)
            for j in range(len(corner))
        ]

    def edge_at(self, slot: tuple[int, int, int]) -> int:
        p, c, j = slot
        return self.polygons[p].corners[c][j]


@dataclass(frozen=True)
class StratumSpec:
    """Singularity data: interior (prongs, punctured) pairs plus the prong
    count at the distinguished boundary puncture."""

    interior: tuple[tuple[int, bool], ...]
    boundary_prongs: int

    def __post_init__(self):
        object.__setattr__(self, "interior", tuple(sorted(tuple(x) for x in self.interior)))

    def violations(self) -> list[str]:
        out = []
        if not self.interior:
            out.append("stratum has no interior singularities")
        for k, punctured in self.interior:
            if k < 1:
                out.append("interior singularity with %d prongs" % k)
            if not punctured and k < 3:
                out.append("non-punctured singularity with %d prongs (needs >= 3)" % k)
        if self.boundary_prongs < 1:
            out.append("boundary puncture with %d prongs (needs >= 1)" % self.boundary_prongs)
        total = sum(Fraction(2 - k, 2) for k, _ in self.interior)
        total += Fraction(2 - self.boundary_prongs, 2)
        if total != 2:
            out.append("singularity data violates sum_k (1 - k/2) n_k = 2 (got %s)" % total)
        return out

    def validate(self) -> None:
        v = self.violations()
        if v:
            raise TrackError("; ".join(v))

    @property
    def interior_punctures(self) -> int:
        return sum(1 for _, punctured in self.interior if punctured)


def monogon_stratum(punctures: int, extras: Sequence[tuple[int, bool]] = (), boundary_prongs: int = 1) -> StratumSpec:
    interior = [(1, True)] * punctures + [tuple(x) for x in extras]
    return StratumSpec(tuple(interior), boundary_prongs)


NAMED_STRATA = {
    # 4-braids: one non-punctured trigon, 1-pronged boundary puncture
    "one-trigon": (4, monogon_stratum(4, [(3, False)])),
    # 5-braids, the three searched strata of the main theorem
    "four-prong": (5, monogon_stratum(5, [(4, False)])),
    "two-trigon": (5, monogon_stratum(5, [(3, False), (3, False)])),
    "boundary-3prong": (5, monogon_stratum(5, [], boundary_prongs=3)),
}


# ---------------------------------------------------------------------------
# validation


def validate(track: TrainTrack) -> list[str]:
    """Deterministic, order-stable report of violated invariants."""
    out: list[str] = []
    if not track.polygons:
        return ["track has no polygons"]
    for p, poly in enumerate(track.polygons):
        if poly.size == 0:
            out.append("polygon %d has no corners" % p)
        if not poly.punctured and poly.size < 3:
            out.append("non-punctured polygon %d is a %d-gon (needs >= 3)" % (p, poly.size))
        for c, corner in enumerate(poly.corners):
            if not corner:
                out.append("corner (%d, %d) has no legs" % (p, c))

    counts: dict[int, list[int]] = {}
    for p, poly in enumerate(track.polygons):
        for corner in poly.corners:
            for e in corner:
                counts.setdefault(e, []).append(p)
    if not counts:
        out.append("track has no expanding edges")
        return out
    ids = sorted(counts)
    if ids != list(range(len(ids))):
        out.append("edge ids are not 0..%d" % (len(ids) - 1))
    for e in ids:
        ps = counts[e]
        if len(ps) != 2:
            out.append("edge %d has %d endpoints (needs 2)" % (e, len(ps)))
        elif ps[0] == ps[1]:
            out.append(
                "edge %d joins polygon %d to itself "
                "(bounds a complementary region away from the boundary puncture)" % (e, ps[0])
            )
    if any("endpoints" in v or "ids" in v for v in out):
        return out

    # the collapsed graph (polygons as vertices) must be a tree
    V = len(track.polygons)
    E = len(ids)
    parent = list(range(V))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    cyclic = False
    for e in ids:
        ps = counts[e]
        if len(ps) != 2 or ps[0] == ps[1]:
            continue
        a, b = find(ps[0]), find(ps[1])
        if a == b:
            cyclic = True
        else:
            parent[a] = b
    if cyclic:
        out.append("expanding edges form a cycle (extra complementary region not bounded by infinitesimal edges)")
    if len({find(x) for x in range(V)}) != 1:
        out.append("track is not connected")
    if not cyclic and E != V - 1:
        out.append("edge count %d differs from polygon count - 1 = %d" % (E, V - 1))

    legs = sum(len(c) for poly in track.polygons for c in poly.corners)
    corners = sum(poly.size for poly in track.polygons)
    if not out and legs - corners < 1:
        out.append("outer region has no cusp (boundary puncture needs >= 1 prong)")
    return out


def _require_valid(track: TrainTrack) -> None:
    v = validate(track)
    if v:
        raise TrackError("; ".join(v))


def cusps(track: TrainTrack) -> list[tuple[int, int, int]]:
    """Foldable cusps as (polygon, corner, j): between legs j and j+1."""
    _require_valid(track)
    out = []
    for p, poly in enumerate(track.polygons):
        for c, corner in enumerate(poly.corners):
            for j in range(len(corner) - 1):
                out.append((p, c, j))
    return out


def stratum_of(track: TrainTrack) -> StratumSpec:
    _require_valid(track)
    interior = tuple((poly.size, poly.punctured) for poly in track.polygons)
    legs = sum(len(c) for poly in track.polygons for c in poly.corners)
    corners = sum(poly.size for poly in track.polygons)
    return StratumSpec(interior, legs - corners)


# ---------------------------------------------------------------------------
# peripheral walk and canonical form

_SEP_CUSP = 0
_SEP_SIDE = 1


def _end_slots(track: TrainTrack) -> dict[int, list[tuple[int, int, int]]]:
    ends: dict[int, list[tuple[int, int, int]]] = {}
    for slot in track.leg_slots():
        ends.setdefault(track.edge_at(slot), []).append(slot)
    return ends


@dataclass(frozen=True)
class WalkData:
    code: tuple[int, ...]
    edge_order: tuple[int, ...]       # edge ids in first-ascent order
    polygon_order: tuple[int, ...]    # polygon indices in first-visit order
    corner_first: tuple[int, ...]     # per polygon (original index): first corner visited


def peripheral_walk(track: TrainTrack, start: tuple[int, int, int]) -> WalkData:
    """Trace the outer-region boundary from the cusp ``start`` = (p, c, j).

    The walk ascends leg j+1 first.  After descending into a slot it makes
    a cusp turn to the next leg of the same corner, or, past the last leg,
    follows the infinitesimal side to the next corner of the same polygon.
    """
    ends = _end_slots(track)

    def partner(slot: tuple[int, int, int]) -> tuple[int, int, int]:
        a, b = ends[track.edge_at(slot)]
        return b if slot == a else a

    p, c, j = start
    pos = (p, c, j + 1)
    first_pos = pos
    word: list[tuple[int, int]] = []
    edge_order: list[int] = []
    edge_num: dict[int, int] = {}
    polygon_order: list[int] = []
    polygon_seen: dict[int, int] = {}
    corner_first: dict[int, int] = {}
    total = sum(len(cr) for poly in track.polygons for cr in poly.corners)

    for _ in range(total):
        pp, cc, jj = pos
        if pp not in polygon_seen:
            polygon_seen[pp] = len(polygon_order)
            polygon_order.append(pp)
            corner_first[pp] = cc
        e = track.edge_at(pos)
        if e not in edge_num:
            edge_num[e] = len(edge_order)
            edge_order.append(e)
        qq, dd, ii = partner(pos)
        corner = track.polygons[qq].corners[dd]
        if ii < len(corner) - 1:
            sep = _SEP_CUSP
            pos = (qq, dd, ii + 1)
        else:
            sep = _SEP_SIDE
            pos = (qq, (dd + 1) % track.polygons[qq].size, 0)
        word.append((edge_num[e], sep))

    if pos != first_pos:
        raise TrackError("peripheral walk did not close up (track is not a one-face ribbon tree)")

    flat: list[int] = [len(edge_order), len(track.polygons)]
    for num, sep in word:
        flat.append(num)
        flat.append(sep)
    for pp in polygon_order:
        poly = track.polygons[pp]
        k = poly.size
        rot = corner_first[pp]
        flat.append(k)
        flat.append(1 if poly.punctured else 0)
        for t in range(k):
            flat.append(len(poly.corners[(rot + t) % k]))

    return WalkData(
        code=tuple(flat),
        edge_order=tuple(edge_order),
        polygon_order=tuple(polygon_order),
        corner_first=tuple(corner_first.get(p, 0) for p in range(len(track.polygons))),
    )


@dataclass(frozen=True)
class CanonicalData:
    code: tuple[int, ...]
    track: TrainTrack                  # relabeled representative
    edge_map: tuple[int, ...]          # original edge id -> canonical number
    polygon_map: tuple[int, ...]       # original polygon index -> canonical index
    automorphisms: tuple[tuple[int, ...], ...]  # nontrivial edge perms, canonical labels


def _apply_walk_labels(track: TrainTrack, walk: WalkData) -> TrainTrack:
    edge_map = {e: i for i, e in enumerate(walk.edge_order)}
    polys = []
    for pp in walk.polygon_order:
        poly = track.polygons[pp]
        k = poly.size
        rot = walk.corner_first[pp]
        corners = tuple(
            tuple(edge_map[e] for e in poly.corners[(rot + t) % k]) for t in range(k)
        )
        polys.append(Polygon(poly.punctured, corners))
    return TrainTrack(tuple(polys))


def canonical_data(track: TrainTrack) -> CanonicalData:
    """Canonical form: minimal peripheral serialization over starting cusps.

    Ties between starting cusps are exactly the nontrivial isomorphisms of
    the track; they are returned as edge permutations in canonical labels.
    """
    _require_valid(track)
    walks = [(peripheral_walk(track, cusp), cusp) for cusp in cusps(track)]
    walks.sort(key=lambda wc: wc[0].code)
    best = walks[0][0]
    rep = _apply_walk_labels(track, best)

    best_edge_map = {e: i for i, e in enumerate(best.edge_order)}
    auts = []
    for walk, _ in walks[1:]:
        if walk.code != best.code:
            break
        other_map = {e: i for i, e in enumerate(walk.edge_order)}
        # automorphism in canonical labels: a -> other_map[edge with best label a]
        inv_best = {i: e for e, i in best_edge_map.items()}
        perm = tuple(other_map[inv_best[a]] for a in range(len(inv_best)))
        if perm != tuple(range(len(perm))):
            auts.append(perm)

    return CanonicalData(
        code=best.code,
        track=rep,
        edge_map=tuple(best_edge_map[e] for e in range(len(best_edge_map))),
        polygon_map=tuple(
            {pp: i for i, pp in enumerate(best.polygon_order)}[p]
            for p in range(len(track.polygons))
        ),
        automorphisms=tuple(auts),
    )


def canonical_form(track: TrainTrack) -> tuple[int, ...]:
    return canonical_data(track).code


def canonical_track(track: TrainTrack) -> TrainTrack:
    return canonical_data(track).track


# ---------------------------------------------------------------------------
# exhaustive enumeration of a stratum

def _polygon_template(stratum: StratumSpec) -> list[tuple[int, bool]]:
    # deterministic order: large polygons first, then unpunctured before punctured
    return sorted(stratum.interior, key=lambda kp: (-kp[0], kp[1]))


def _matchings(slots: list[tuple[int, int, int]], slot_poly: list[int], num_polys: int) -> Iterator[list[tuple[int, int]]]:
    """Perfect matchings of leg slots whose collapsed graph is a tree."""
    n = len(slots)
    parent = list(range(num_polys))

    def find(x: int) -> int:
        while parent[x] != x:
            x = parent[x]
        return x

    used = [False] * n
    pairs: list[tuple[int, int]] = []

    def rec() -> Iterator[list[tuple[int, int]]]:
        try:
            a = used.index(False)
        except ValueError:
            yield list(pairs)
            return
        used[a] = True
        ra = find(slot_poly[a])
        for b in range(a + 1, n):
            if used[b]:
                continue
            rb = find(slot_poly[b])
            if ra == rb:
                continue
            used[b] = True
            saved = parent[rb]
            parent[rb] = ra
            pairs.append((a, b))
            yield from rec()
            pairs.pop()
            parent[rb] = saved
            used[b] = False
        used[a] = False

    yield from rec()


def enumerate_tracks(stratum: StratumSpec, punctures: int) -> list[TrainTrack]:
    """All diffeomorphism types of simplified tracks in the stratum.

    Exhaustive generation over leg distributions and slot pairings, with
    tree pruning, deduplicated by canonical form.  Returns canonical
    representatives sorted by code.
    """
    stratum.validate()
    if stratum.interior_punctures != punctures:
        raise TrackError(
            "stratum has %d interior punctures, expected %d"
            % (stratum.interior_punctures, punctures)
        )
    template = _polygon_template(stratum)
    V = len(template)
    E = V - 1
    corners = [(p, c) for p, (k, _) in enumerate(template) for c in range(k)]
    extras = 2 * E - len(corners)
    if E < 1 or extras < 0:
        # validated strata always admit tracks (the Euler identity fixes the
        # leg budget); kept as an explicit empty result, not a crash
        return []

    found: dict[tuple[int, ...], TrainTrack] = {}
    for extra in itertools.combinations_with_replacement(range(len(corners)), extras):
        leg_count = [1] * len(corners)
        for i in extra:
            leg_count[i] += 1
        slots = []
        slot_poly = []
        for idx, (p, c) in enumerate(corners):
            for j in range(leg_count[idx]):
                slots.append((p, c, j))
                slot_poly.append(p)
        for pairs in _matchings(slots, slot_poly, V):
            legs: dict[tuple[int, int], list[int]] = {pc: [0] * leg_count[i] for i, pc in enumerate(corners)}
            for e, (a, b) in enumerate(pairs):
                for s in (a, b):
                    p, c, j = slots[s]
                    legs[(p, c)][j] = e
            polys = tuple(
                Polygon(punctured, tuple(tuple(legs[(p, c)]) for c in range(k)))
                for p, (k, punctured) in enumerate(template)
            )
            track = TrainTrack(polys)
            if validate(track):
                continue
            data = canonical_data(track)
            if data.code not in found:
                found[data.code] = data.track
    return [found[code] for code in sorted(found)]
