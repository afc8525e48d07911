"""Folding automata: fold surgery, arrow data, counts, isomorphisms."""

import pytest

from braidfold.automaton import build_automaton, isomorphism_arrows
from braidfold.matrices import entry_sum
from braidfold.tracks import (
    NAMED_STRATA,
    Polygon,
    StratumSpec,
    TrackError,
    TrainTrack,
    canonical_data,
    enumerate_tracks,
)


def build(name):
    punctures, stratum = NAMED_STRATA[name]
    return build_automaton(stratum, punctures)


def label(arrow):
    perm = "".join(str(p + 1) for p in arrow.perm)
    return (arrow.source, arrow.target, perm, (arrow.rule[0] + 1, arrow.rule[1] + 1))


def test_d4_automaton_structure():
    auto = build("one-trigon")
    assert len(auto.vertices) == 3
    assert len(auto.arrows) == 6
    # the full arrow set, worked out by hand from the fold surgery
    assert {label(a) for a in auto.arrows} == {
        (0, 1, "1342", (1, 2)),
        (0, 2, "1234", (4, 1)),
        (1, 0, "1234", (1, 2)),
        (1, 1, "1234", (2, 1)),
        (2, 0, "3124", (4, 3)),
        (2, 2, "1234", (1, 4)),
    }


def test_arrow_matrix_shape():
    for name in ("one-trigon", "two-trigon"):
        auto = build(name)
        E = auto.edge_count
        for a in auto.arrows:
            m = a.matrix()
            assert entry_sum(m) == E + 1
            # permutation plus one extra unit entry
            doubled = [i for i, row in enumerate(m.rows) if sum(row) == 2]
            assert doubled == [a.rule[0]]


def test_two_trigon_counts_and_regularity():
    auto = build("two-trigon")
    assert len(auto.vertices) == 9
    assert len(auto.arrows) == 18
    out = [0] * 9
    inn = [0] * 9
    for a in auto.arrows:
        out[a.source] += 1
        inn[a.target] += 1
    assert out == [2] * 9 and inn == [2] * 9
    assert auto.is_connected()
    assert auto.metadata["iso_arrow_count"] == 0


def test_two_trigon_published_loop_labels():
    """The automaton contains the two documented length-2 loops with
    exactly the published permutation-and-rule labels."""
    auto = build("two-trigon")
    labels = {label(a)[2:] for a in auto.arrows}
    assert ("123564", (1, 4)) in labels
    assert ("123456", (1, 4)) in labels
    assert ("123456", (4, 1)) in labels
    assert ("312456", (4, 3)) in labels
    by_lab = {label(a)[2:]: a for a in auto.arrows}
    a1, a2 = by_lab[("123564", (1, 4))], by_lab[("123456", (1, 4))]
    assert a1.target == a2.source and a2.target == a1.source
    b1, b2 = by_lab[("123456", (4, 1))], by_lab[("312456", (4, 3))]
    assert b1.target == b2.source and b2.target == b1.source


def test_boundary_3prong_counts():
    auto = build("boundary-3prong")
    assert len(auto.vertices) == 11
    # fifty drawn edges; sixteen of them carry two parallel fold labels
    assert auto.metadata["drawn_edge_count"] == 50
    assert len(auto.arrows) == 66
    out = [0] * 11
    for a in auto.arrows:
        out[a.source] += 1
    assert out == [6] * 11


def test_fold_closure_and_targets():
    for name in ("one-trigon", "two-trigon", "boundary-3prong", "four-prong"):
        auto = build(name)
        codes = set(auto.codes)
        for a in auto.arrows:
            assert auto.codes[a.target] in codes
        # arrows are deduplicated
        keys = [a.key() for a in auto.arrows]
        assert len(set(keys)) == len(keys)


def test_fold_unfold_roundtrip():
    """Moving a leg and moving it back is the identity surgery."""
    from braidfold.automaton import _move_leg, _other_end

    punctures, stratum = NAMED_STRATA["two-trigon"]
    for track in enumerate_tracks(stratum, punctures):
        from braidfold.tracks import cusps

        for (p, c, j) in cusps(track):
            east = track.polygons[p].corners[c][j]
            west = track.polygons[p].corners[c][j + 1]
            p2, c2, _ = _other_end(track, west, (p, c, j + 1))
            k2 = track.polygons[p2].size
            moved = _move_leg(track, (p, c, j), p2, (c2 + 1) % k2, first=True)
            back = _move_leg(moved, (p2, (c2 + 1) % k2, 0), p, c, first=False)
            # re-insert at the end of the corner, then compare up to slot order
            assert sorted(back.polygons[p].corners[c]) == sorted(track.polygons[p].corners[c])


def test_polygon_perm_preserves_puncturing():
    auto = build("two-trigon")
    for a in auto.arrows:
        src = auto.vertices[a.source]
        dst = auto.vertices[a.target]
        for i, poly in enumerate(src.polygons):
            assert dst.polygons[a.polygon_perm[i]].punctured == poly.punctured


def test_isomorphism_arrows_two_trigon_empty():
    punctures, stratum = NAMED_STRATA["two-trigon"]
    tracks = enumerate_tracks(stratum, punctures)
    assert isomorphism_arrows(tracks) == []


def symmetric_track():
    """Punctured bigon center with four leaf monogons: an order-2 symmetry."""
    return TrainTrack((
        Polygon(True, ((0, 1), (2, 3))),
        Polygon(True, ((0,),)),
        Polygon(True, ((1,),)),
        Polygon(True, ((2,),)),
        Polygon(True, ((3,),)),
    ))


def test_isomorphism_arrows_synthetic_symmetry():
    track = canonical_data(symmetric_track()).track
    arrows = isomorphism_arrows([track])
    assert len(arrows) == 1
    perm = arrows[0].perm
    assert perm != tuple(range(len(perm)))
    # the order-2 symmetry composed with itself is the identity
    assert tuple(perm[perm[i]] for i in range(len(perm))) == tuple(range(len(perm)))
    assert arrows[0].matrix().is_permutation()


def test_automaton_with_iso_arrows_builds():
    spec = StratumSpec(((1, True),) * 4 + ((2, True),), 2)
    auto = build_automaton(spec, 5)
    assert auto.metadata["iso_arrow_count"] >= 1
    assert any(a.kind == "iso" for a in auto.arrows)


def test_empty_stratum_gives_empty_automaton(monkeypatch):
    # a validated stratum always carries tracks (the Euler identity fixes
    # the leg budget), so exercise the contract directly: no tracks must
    # yield an explicit empty automaton, not a crash
    import braidfold.automaton as automaton_mod

    monkeypatch.setattr(automaton_mod, "enumerate_tracks", lambda s, p: [])
    punctures, stratum = NAMED_STRATA["two-trigon"]
    auto = automaton_mod.build_automaton(stratum, punctures)
    assert auto.vertices == () and auto.arrows == ()
    assert auto.metadata["vertex_count"] == 0


def test_build_deterministic():
    a1 = build("two-trigon")
    a2 = build("two-trigon")
    assert a1.codes == a2.codes
    assert [x.key() for x in a1.arrows] == [x.key() for x in a2.arrows]


def test_inconsistent_stratum_rejected():
    with pytest.raises(TrackError):
        build_automaton(StratumSpec(((1, True),) * 5, 2), 5)
