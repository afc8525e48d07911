"""Acceptance suite: every criterion at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS/FAIL
line per criterion.  Tolerances are pinned here, not configured.
"""

import random
import time
from fractions import Fraction

import pytest

from braidfold.automaton import build_automaton
from braidfold.certify import certify
from braidfold.io import certificate_to_json
from braidfold.matrices import (
    TransMatrix,
    is_perron_frobenius,
    lemma31_check,
    max_norm_bound,
    pf_oracle,
)
from braidfold.polynomials import IntPolynomial, divides
from braidfold.search import search
from braidfold.tracks import NAMED_STRATA

LAM5_POLY = IntPolynomial([1, -1, -1, -1, 1])          # x^4 - x^3 - x^2 - x + 1
LAM4_POLY = IntPolynomial([1, -2, 0, -2, 1])           # x^4 - 2x^3 - 2x + 1
TWOTRIG_POLY = IntPolynomial([1, -1, 0, -4, 0, -1, 1])  # x^6 - x^5 - 4x^3 - x + 1
FOURPRONG_POLY = IntPolynomial([1, -3, 3, -3, 1])      # x^4 - 3x^3 + 3x^2 - 3x + 1

TOL = Fraction(1, 10**5)


class criterion:
    """Prints one ACCEPTANCE line per criterion, pass or fail."""

    def __init__(self, num, desc):
        self.num = num
        self.desc = desc

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        status = "PASS" if exc_type is None else "FAIL"
        print("\nACCEPTANCE %2d %s - %s" % (self.num, status, self.desc))
        return False


def interval_close_to(interval, value, tol=TOL):
    lo, hi = interval
    value = Fraction(value)
    return value - tol <= lo and hi <= value + tol and hi - lo <= tol


def automaton(name):
    punctures, stratum = NAMED_STRATA[name]
    return build_automaton(stratum, punctures)


@pytest.fixture(scope="module")
def two_trigon_result():
    t0 = time.monotonic()
    res = search(automaton("two-trigon"), "2.02", maxnorm=72)
    res.params["wall_seconds"] = time.monotonic() - t0
    return res


@pytest.fixture(scope="module")
def certificates_by_threads():
    return {t: certify(6, threads=t) for t in (1, 2, 8)}


def test_criterion_1_five_braid_minimum(certificates_by_threads):
    with criterion(1, "5-braid minimum is 1.72208 with polynomial x^4-x^3-x^2-x+1"):
        cert = certificates_by_threads[1]
        assert interval_close_to(cert.min_interval, Fraction("1.72208"))
        assert cert.min_interval[1] - cert.min_interval[0] <= TOL
        assert cert.minimal_polynomial == LAM5_POLY
        assert cert.witness_record.label == "boundary-3prong"


def test_criterion_2_two_trigon_stratum(two_trigon_result):
    with criterion(2, "two-trigon search at 2.02 finds one class at 2.01536"):
        res = two_trigon_result
        assert res.params["maxnorm"] == 72
        assert len(res.candidates) == 1
        c = res.candidates[0]
        assert interval_close_to(c.dilatation, Fraction("2.01536"))
        assert divides(TWOTRIG_POLY, c.poly)
        assert c.norm <= 72
        print("\n  stats: eigenvalue-tested=%d expansions=%d wall=%.1fs"
              % (res.stats.eigen_tested, res.stats.expansions,
                 res.params["wall_seconds"]))


def test_criterion_3_four_braid_minimum():
    with criterion(3, "4-braid minimum is 2.29663 with polynomial x^4-2x^3-2x+1"):
        auto = automaton("one-trigon")
        assert max_norm_bound(Fraction("2.3"), 4) == 30
        res30 = search(auto, "2.3", maxnorm=30)
        res31 = search(auto, "2.3", maxnorm=31)
        assert res30.candidates
        for c in res30.candidates:
            assert interval_close_to(c.dilatation, Fraction("2.29663"))
            assert divides(LAM4_POLY, c.poly)
        # one dilatation class: the published uniqueness is modulo conjugacy,
        # central elements and inverses; path classes collapse to one
        # polynomial
        assert {c.poly for c in res30.candidates} == {LAM4_POLY}
        assert [c.word for c in res30.candidates] == [c.word for c in res31.candidates]


def test_criterion_4_four_prong_stratum():
    with criterion(4, "4-prong stratum minimum is 2.15372, poly x^4-3x^3+3x^2-3x+1, bound 56"):
        res = search(automaton("four-prong"), "2.2", maxnorm=56)
        assert res.params["maxnorm"] == 56
        assert res.candidates
        best = min(c.dilatation for c in res.candidates)
        assert interval_close_to(best, Fraction("2.15372"))
        for c in res.candidates:
            assert divides(FOURPRONG_POLY, c.poly)


def test_criterion_5_automaton_counts():
    with criterion(5, "two-trigon: 9 vertices; boundary-3prong: 11 vertices, 50 arrows"):
        tt = automaton("two-trigon")
        assert len(tt.vertices) == 9
        assert len(tt.arrows) == 18
        b3 = automaton("boundary-3prong")
        assert len(b3.vertices) == 11
        # fifty arrows as drawn: sixteen ordered vertex pairs carry two
        # parallel fold transitions (66 labeled transitions in total)
        assert b3.metadata["drawn_edge_count"] == 50
        assert len(b3.arrows) == 66


def test_criterion_6_entry_sum_bound_property():
    with criterion(6, "lambda^n + n - 1 >= |M| on 5000 random primitive matrices"):
        rng = random.Random(987654321)
        checked = 0
        violations = 0
        while checked < 5000:
            n = rng.randint(1, 8)
            m = TransMatrix(
                [[max(0, rng.randint(-6, 5)) for _ in range(n)] for _ in range(n)]
            )
            if not is_perron_frobenius(m):
                continue
            if not lemma31_check(m):
                violations += 1
            checked += 1
        assert violations == 0


def test_criterion_7_pf_oracle_equivalence():
    with criterion(7, "pattern-power primitivity agrees with the graph oracle"):
        rng = random.Random(123456789)
        disagreements = 0
        for _ in range(1000):
            n = rng.randint(1, 7)
            m = TransMatrix(
                [[max(0, rng.randint(-4, 3)) for _ in range(n)] for _ in range(n)]
            )
            if is_perron_frobenius(m) != pf_oracle(m):
                disagreements += 1
        assert disagreements == 0


def test_criterion_8_pruning_soundness():
    with criterion(8, "pruned and unpruned searches agree on the D4 automaton"):
        auto = automaton("one-trigon")
        pruned = search(auto, "2.3", maxnorm=30)
        unpruned = search(auto, "2.3", maxnorm=30, avoid=None)
        key = lambda res: [(c.word, c.poly.coeffs, c.dilatation) for c in res.candidates]
        assert key(pruned) == key(unpruned)
        assert min(c.dilatation for c in pruned.candidates) == \
            min(c.dilatation for c in unpruned.candidates)
        # every candidate respects the entry-sum bound (norm pruning is sound)
        assert all(c.norm <= 30 for c in unpruned.candidates)


def test_criterion_9_thread_determinism(certificates_by_threads):
    with criterion(9, "candidate lists and certificate digests identical for 1/2/8 threads"):
        docs = {
            t: certificate_to_json(cert)
            for t, cert in certificates_by_threads.items()
        }
        assert docs[1]["digest"] == docs[2]["digest"] == docs[8]["digest"]
        words = {
            t: [
                [c["word"] for c in stratum.get("candidates", [])]
                for stratum in docs[t]["strata"]
            ]
            for t in docs
        }
        assert words[1] == words[2] == words[8]


def test_criterion_10_statistics_comparability(two_trigon_result):
    with criterion(10, "eigenvalue-test count within an order of magnitude of 85000"):
        tested = two_trigon_result.stats.eigen_tested
        print("\n  matrices eigenvalue-tested: %d (published run: roughly 85000)" % tested)
        # informational in the spec; the pruning configuration (entry-sum
        # bound 72, the certified avoid words, row/column threshold 3)
        # lands within a few percent of the published count
        assert 8500 <= tested <= 850000
