"""Braid words, Artin/Burau actions, and curated annotation checks."""

import pytest

from braidfold import braids
from braidfold.automaton import build_automaton
from braidfold.certify import compose_word
from braidfold.io import apply_annotations, packaged_annotations
from braidfold.polynomials import IntPolynomial
from braidfold.search import search
from braidfold.tracks import NAMED_STRATA

LAM5 = IntPolynomial([1, -1, -1, -1, 1])


def test_free_reduce():
    assert braids.free_reduce([1, -1]) == ()
    assert braids.free_reduce([2, 1, -1, -2, 3]) == (3,)
    assert braids.free_reduce([1, 2, -2, 2]) == (1, 2)


def test_inverse_and_rotation():
    w = (1, 2, -3)
    assert braids.free_reduce(w + braids.inverse(w)) == ()
    assert braids.equal_up_to_rotation((1, 2, 3), (3, 1, 2))
    assert not braids.equal_up_to_rotation((1, 2), (2, -1))
    # rotation equality sees through free reduction
    assert braids.equal_up_to_rotation((1, 2, -2, 3), (3, 1))


def test_permutation_and_cycle_type():
    assert braids.permutation([1], 3) == (1, 0, 2)
    perm = braids.permutation([1, 2, 3, 4, 1, 2], 5)
    assert braids.cycle_type(perm) == (5,)
    assert braids.cycle_type(braids.permutation([3, 2, -1], 4)) == (4,)
    with pytest.raises(braids.BraidError):
        braids.permutation([5], 3)


def test_burau_is_a_representation():
    for n in (3, 4, 5):
        for i in range(1, n - 1):
            lhs = braids.burau_minus_one([i, i + 1, i], n)
            rhs = braids.burau_minus_one([i + 1, i, i + 1], n)
            assert lhs == rhs
        assert braids.burau_minus_one([1, -1], n) == [
            [1 if i == j else 0 for j in range(n)] for i in range(n)
        ]
    assert braids.burau_minus_one([1, 3], 4) == braids.burau_minus_one([3, 1], 4)


def test_burau_detects_lam5():
    assert braids.dilatation_poly_matches([1, 2, 3, 4, 1, 2], 5, LAM5)
    assert not braids.dilatation_poly_matches([1, 2, 3, 4, 1, 2], 5,
                                              IntPolynomial([1, -2, 0, -2, 1]))


@pytest.mark.parametrize(
    "word,n,lam",
    [
        ([1, 2, 3, 4, 1, 2], 5, 1.7220838057),
        ([3, 2, -1], 4, 2.2966302629),
        ([4, 3, -1, -2], 5, 2.0153571813),
        ([4, 3, 2, -1], 5, 2.1537213755),
    ],
)
def test_growth_estimates_match_dilatations(word, n, lam):
    assert abs(braids.growth_estimate(word, n, 17) - lam) < 5e-3


def annotated(name):
    punctures, stratum = NAMED_STRATA[name]
    auto = build_automaton(stratum, punctures)
    overlay = packaged_annotations(name)
    assert overlay is not None
    return apply_annotations(auto, overlay), punctures


def test_compose_word_boundary_3prong_witness():
    auto, punctures = annotated("boundary-3prong")
    res = search(auto, "1.7221")
    witness = res.candidates[0]
    word = compose_word(witness.word, auto)
    assert word is not None
    assert braids.equal_up_to_rotation(word, (1, 2, 3, 4, 1, 2))


def test_compose_word_two_trigon_witness():
    auto, punctures = annotated("two-trigon")
    res = search(auto, "2.02", maxnorm=72)
    witness = res.candidates[0]
    word = compose_word(witness.word, auto)
    assert word is not None
    assert braids.equal_up_to_rotation(word, (4, 3, -1, -2))


def test_compose_word_rotation_consistency():
    auto, _ = annotated("one-trigon")
    res = search(auto, "2.3", maxnorm=30)
    witness = next(c for c in res.candidates if compose_word(c.word, auto) is not None)
    base = compose_word(witness.word, auto)
    for k in range(len(witness.word)):
        rot = witness.word[k:] + witness.word[:k]
        w = compose_word(rot, auto)
        assert w is not None and braids.equal_up_to_rotation(w, base)


def test_compose_word_unannotated_marker():
    punctures, stratum = NAMED_STRATA["one-trigon"]
    auto = build_automaton(stratum, punctures)  # no annotations applied
    res = search(auto, "2.3", maxnorm=30)
    assert compose_word(res.candidates[0].word, auto) is None


def test_compose_word_identity_arrows_contribute_nothing():
    from braidfold.automaton import FoldArrow, FoldingAutomaton

    punctures, stratum = NAMED_STRATA["one-trigon"]
    auto = build_automaton(stratum, punctures)
    arrows = tuple(
        FoldArrow(a.source, a.target, a.perm, a.rule, a.kind, a.polygon_perm,
                  identity_flag=True, braid_word=None)
        for a in auto.arrows
    )
    dashed = FoldingAutomaton(auto.stratum, auto.punctures, auto.vertices,
                              auto.codes, arrows, dict(auto.metadata))
    res = search(dashed, "2.3", maxnorm=30)
    assert compose_word(res.candidates[0].word, dashed) == ()


def test_curated_blocks_are_permutation_consistent():
    """Each curated arrow word must move punctures the way the arrow's
    polygon permutation does, under one labeling along the witness cycle."""
    import sys
    from pathlib import Path

    sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tools"))
    import curate_annotations as tool

    for name in ("boundary-3prong", "two-trigon", "one-trigon", "four-prong"):
        punctures, stratum = NAMED_STRATA[name]
        auto = build_automaton(stratum, punctures)
        overlay = packaged_annotations(name)
        cycle = [  # reconstruct the annotated cycle in overlay order
            next(i for i, a in enumerate(auto.arrows)
                 if (a.source, a.target) == (e["source"], e["target"])
                 and [p + 1 for p in a.perm] == e["perm"])
            for e in overlay["arrows"]
        ]
        word = sum((tuple(e["braid_word"]) for e in overlay["arrows"]), ())
        blocks = tool.consistent_assignment(word, tuple(cycle), auto, punctures)
        assert blocks is not None
