"""Folding automata: vertices are track types, arrows are composite folds.

An arrow folds one expanding edge over the other edge at a cusp and then
absorbs the adjacent infinitesimal side, so the moved endpoint slides past
the far corner of the absorbed edge.  At the cusp between legs j (east)
and j+1 (west) of a corner there are exactly two folds:

* right fold: the east edge absorbs the west edge; its endpoint re-attaches
  at the corner counterclockwise after the west edge's far corner, as the
  first leg;
* left fold: the west edge absorbs the east edge; its endpoint re-attaches
  at the corner clockwise before the east edge's far corner, as the last
  leg.

Transition matrices act on the right (row convention): the matrix of an
arrow is the permutation of canonical edge labels plus one extra unit
entry at (mover, new label of the absorbed edge).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .matrices import TransMatrix
from .tracks import (
    Polygon,
    StratumSpec,
    TrackError,
    TrainTrack,
    canonical_data,
    cusps,
    enumerate_tracks,
    validate,
)


@dataclass(frozen=True)
class FoldArrow:
    source: int
    target: int
    perm: tuple[int, ...]                 # old canonical label -> new canonical label
    rule: Optional[tuple[int, int]]       # (m, n): extra unit entry; None for isomorphisms
    kind: str                             # "fold" or "iso"
    polygon_perm: tuple[int, ...]         # old polygon index -> new polygon index
    identity_flag: Optional[bool] = None  # True when isotopic to the identity; None = unknown
    braid_word: Optional[tuple[int, ...]] = None

    def matrix(self) -> TransMatrix:
        n = len(self.perm)
        rows = [[0] * n for _ in range(n)]
        for j in range(n):
            rows[j][self.perm[j]] = 1
        if self.rule is not None:
            m, c = self.rule
            rows[m][c] += 1
        return TransMatrix(rows)

    def key(self) -> tuple:
        return (self.source, self.target, self.perm, self.rule)


@dataclass(frozen=True)
class FoldingAutomaton:
    stratum: StratumSpec
    punctures: int
    vertices: tuple[TrainTrack, ...]      # canonical representatives, sorted by code
    codes: tuple[tuple[int, ...], ...]
    arrows: tuple[FoldArrow, ...]
    metadata: dict = field(default_factory=dict, compare=False)

    @property
    def edge_count(self) -> int:
        return self.vertices[0].num_edges if self.vertices else 0

    def out_arrows(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in self.vertices]
        for i, a in enumerate(self.arrows):
            out[a.source].append(i)
        return out

    def arrow_matrices(self) -> list[TransMatrix]:
        return [a.matrix() for a in self.arrows]

    def is_connected(self) -> bool:
        if not self.vertices:
            return True
        seen = {0}
        todo = [0]
        nbrs: list[set[int]] = [set() for _ in self.vertices]
        for a in self.arrows:
            nbrs[a.source].add(a.target)
            nbrs[a.target].add(a.source)
        while todo:
            v = todo.pop()
            for w in nbrs[v]:
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        return len(seen) == len(self.vertices)


def _other_end(track: TrainTrack, edge: int, slot: tuple[int, int, int]) -> tuple[int, int, int]:
    found = [
        (p, c, j)
        for p, poly in enumerate(track.polygons)
        for c, corner in enumerate(poly.corners)
        for j, e in enumerate(corner)
        if e == edge
    ]
    a, b = found
    return b if slot == a else a


def _move_leg(track: TrainTrack, src: tuple[int, int, int], dst_polygon: int, dst_corner: int, first: bool) -> TrainTrack:
    """Detach the leg at ``src`` and re-attach its edge at the target corner."""
    p, c, j = src
    edge = track.polygons[p].corners[c][j]
    polys = [
        [list(corner) for corner in poly.corners]
        for poly in track.polygons
    ]
    del polys[p][c][j]
    if first:
        polys[dst_polygon][dst_corner].insert(0, edge)
    else:
        polys[dst_polygon][dst_corner].append(edge)
    return TrainTrack(
        tuple(
            Polygon(track.polygons[i].punctured, tuple(tuple(cr) for cr in poly))
            for i, poly in enumerate(polys)
        )
    )


def fold_moves(track: TrainTrack) -> list[tuple[dict, TrainTrack]]:
    """All composite elementary folds from a canonical track.

    Returns (arrow data, canonical target) pairs; arrow data holds the edge
    permutation, the (mover -> absorbed) rule and the polygon permutation,
    all in canonical labels of source and target.
    """
    bad = validate(track)
    if bad:
        raise TrackError("; ".join(bad))
    out = []
    for (p, c, j) in cusps(track):
        east = track.polygons[p].corners[c][j]
        west = track.polygons[p].corners[c][j + 1]
        for mover, absorbed, mover_slot in (
            (east, west, (p, c, j)),
            (west, east, (p, c, j + 1)),
        ):
            right = mover == east
            p2, c2, _ = _other_end(track, absorbed, (p, c, j if not right else j + 1))
            k2 = track.polygons[p2].size
            target_corner = (c2 + 1) % k2 if right else (c2 - 1) % k2
            moved = _move_leg(track, mover_slot, p2, target_corner, first=right)
            data = canonical_data(moved)
            perm = tuple(data.edge_map[e] for e in range(track.num_edges))
            arrow = {
                "perm": perm,
                "rule": (mover, data.edge_map[absorbed]),
                "polygon_perm": data.polygon_map,
                "cusp": (p, c, j),
                "direction": "right" if right else "left",
            }
            out.append((arrow, data.track))
    return out


def isomorphism_arrows(tracks: list[TrainTrack]) -> list[FoldArrow]:
    """Nontrivial self-isomorphism arrows of each canonical track."""
    out = []
    for i, track in enumerate(tracks):
        data = canonical_data(track)
        for perm in data.automorphisms:
            out.append(
                FoldArrow(
                    source=i,
                    target=i,
                    perm=perm,
                    rule=None,
                    kind="iso",
                    polygon_perm=tuple(range(len(track.polygons))),
                )
            )
    return out


def build_automaton(stratum: StratumSpec, punctures: int) -> FoldingAutomaton:
    """Enumerate the stratum and compute all fold and isomorphism arrows."""
    stratum.validate()
    try:
        tracks = enumerate_tracks(stratum, punctures)
    except TrackError:
        raise
    if not tracks:
        return FoldingAutomaton(stratum, punctures, (), (), (), {"vertex_count": 0, "arrow_count": 0})

    codes = []
    index = {}
    for i, t in enumerate(tracks):
        code = canonical_data(t).code
        codes.append(code)
        index[code] = i

    arrows: list[FoldArrow] = []
    for i, track in enumerate(tracks):
        for data, target in fold_moves(track):
            tcode = canonical_data(target).code
            if tcode not in index:
                raise TrackError("fold left the enumerated stratum; enumeration incomplete")
            arrows.append(
                FoldArrow(
                    source=i,
                    target=index[tcode],
                    perm=data["perm"],
                    rule=data["rule"],
                    kind="fold",
                    polygon_perm=data["polygon_perm"],
                )
            )
    arrows.extend(isomorphism_arrows(tracks))

    seen = {}
    deduped = []
    for a in arrows:
        k = a.key()
        if k in seen:
            continue
        seen[k] = True
        deduped.append(a)
    deduped.sort(key=lambda a: (a.source, a.target, a.kind, a.perm, a.rule or (-1, -1)))

    fold_count = sum(1 for a in deduped if a.kind == "fold")
    auto = FoldingAutomaton(
        stratum=stratum,
        punctures=punctures,
        vertices=tuple(tracks),
        codes=tuple(codes),
        arrows=tuple(deduped),
        metadata={
            "vertex_count": len(tracks),
            "arrow_count": len(deduped),
            "fold_arrow_count": fold_count,
            "iso_arrow_count": len(deduped) - fold_count,
            # parallel arrows between one ordered vertex pair collapse to a
            # single drawn edge; this is the count a picture of the graph has
            "drawn_edge_count": len({(a.source, a.target) for a in deduped}),
        },
    )
    return auto
