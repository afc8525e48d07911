"""The compiled kernel must reproduce the pure-Python backend exactly."""

import pytest

from braidfold.automaton import build_automaton
from braidfold.search import available_backends, search
from braidfold.tracks import NAMED_STRATA

HAVE_CY = "cy" in available_backends()

pytestmark = pytest.mark.skipif(not HAVE_CY, reason="compiled kernel not built")


def result_key(res):
    return (
        [(c.word, c.start, c.norm, c.poly.coeffs, c.dilatation) for c in res.candidates],
        [(c.word, c.norm) for c in res.equality_candidates],
        res.stats.expansions,
        res.stats.eigen_tested,
        res.stats.pruned_norm,
        res.stats.pruned_sums,
        res.stats.pruned_avoid,
        res.stats.depth_expansions,
    )


@pytest.mark.parametrize(
    "name,lam,maxnorm,eq",
    [
        ("one-trigon", "2.3", 30, False),
        ("one-trigon", "2.3", 31, False),
        ("one-trigon", "2", None, True),
        ("boundary-3prong", "1.7221", None, False),
        ("four-prong", "2.2", 56, False),
    ],
)
def test_backends_identical(name, lam, maxnorm, eq):
    punctures, stratum = NAMED_STRATA[name]
    auto = build_automaton(stratum, punctures)
    r_py = search(auto, lam, maxnorm=maxnorm, equality_bucket=eq, backend="py")
    r_cy = search(auto, lam, maxnorm=maxnorm, equality_bucket=eq, backend="cy")
    assert result_key(r_py) == result_key(r_cy)


def test_backend_env_override(monkeypatch):
    from braidfold.search import default_backend

    monkeypatch.setenv("BRAIDFOLD_BACKEND", "py")
    assert default_backend() == "py"
    monkeypatch.setenv("BRAIDFOLD_BACKEND", "nope")
    from braidfold.search import SearchError

    with pytest.raises(SearchError):
        default_backend()


def test_supports_bounds():
    from fractions import Fraction

    from braidfold import _speedups

    assert _speedups.supports(6, 72, Fraction("2.02"))
    assert _speedups.supports(4, 30, Fraction("2.3"))
    assert not _speedups.supports(13, 72, Fraction("2.02"))
    assert not _speedups.supports(6, 2**40, Fraction("2.02"))


def test_cy_falls_back_when_unsupported():
    # a huge override norm bound pushes past the 64-bit fast path; the
    # search must use the arbitrary-precision backend (and, with no norm
    # pruning to speak of, abort loudly at the expansion cap)
    from braidfold.search import ResourceCapExceeded

    punctures, stratum = NAMED_STRATA["one-trigon"]
    auto = build_automaton(stratum, punctures)
    with pytest.raises(ResourceCapExceeded) as info:
        search(auto, "2.3", maxnorm=2**40, backend="cy", max_expansions=200000)
    assert info.value.stats.backend == "py"
