"""Case analysis over singularity strata and the minimum-dilatation
certificate.

For a pseudo-Anosov map on the sphere with p punctures (one of them the
distinguished boundary puncture) the singularity data satisfies
sum_k (1 - k/2) n_k = 2.  With six punctures this pins down five cases;
three are settled by automaton searches, one by capping off a punctured
2-prong (reducing to the boundary-3-prong search), and one by the lift to
a torus Anosov map, whose dilatation is at least the largest root of
x^2 - 3x + 1.  The certificate records one resolution per stratum and the
global conclusion with exact interval arithmetic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .automaton import FoldingAutomaton, build_automaton
from .matrices import _as_fraction
from .polynomials import IntPolynomial, count_real_roots, divides, exact_quotient, largest_real_root
from .search import SearchResult, search
from .tracks import StratumSpec, monogon_stratum
from . import braids

Rational = Union[int, float, Fraction, str]


class CertifyError(ValueError):
    pass


class CertificationError(RuntimeError):
    """A stratum is missing or undercuts the claimed minimum."""


# largest root (3 + sqrt 5)/2 bounds the torus-Anosov case from below
TORUS_BOUND_POLY = IntPolynomial([1, -3, 1])

LAMBDA5_POLY = IntPolynomial([1, -1, -1, -1, 1])
LAMBDA4_POLY = IntPolynomial([1, -2, 0, -2, 1])


@dataclass(frozen=True)
class StratumCase:
    label: str
    spec: StratumSpec
    kind: str                       # "search" | "analytic" | "reduction"
    lambda_bound: Optional[Fraction] = None
    maxnorm: Optional[int] = None
    bound_poly: Optional[IntPolynomial] = None
    reduces_to: Optional[str] = None
    note: str = ""

    @property
    def punctures(self) -> int:
        return self.spec.interior_punctures


def _five_braid_cases() -> list[StratumCase]:
    return [
        StratumCase(
            label="four-prong",
            spec=monogon_stratum(5, [(4, False)]),
            kind="search",
            lambda_bound=Fraction("2.2"),
            maxnorm=56,
            note="six 1-prong punctures and a non-punctured 4-prong singularity",
        ),
        StratumCase(
            label="two-trigon",
            spec=monogon_stratum(5, [(3, False), (3, False)]),
            kind="search",
            lambda_bound=Fraction("2.02"),
            maxnorm=72,
            note="six 1-prong punctures and two non-punctured 3-prong singularities",
        ),
        StratumCase(
            label="boundary-3prong",
            spec=monogon_stratum(5, [], boundary_prongs=3),
            kind="search",
            lambda_bound=Fraction("1.7221"),
            note="five 1-prong punctures and a punctured 3-prong at the boundary",
        ),
        StratumCase(
            label="capped-2prong",
            spec=monogon_stratum(4, [(2, True), (3, False)]),
            kind="reduction",
            reduces_to="boundary-3prong",
            note=(
                "capping off the punctured 2-prong singularity and puncturing "
                "the 3-prong singularity turns these maps into the "
                "boundary-3prong case without changing the dilatation"
            ),
        ),
        StratumCase(
            label="torus-lift",
            spec=monogon_stratum(3, [(2, True), (2, True)]),
            kind="analytic",
            bound_poly=TORUS_BOUND_POLY,
            note=(
                "capping off the two punctured 2-prong singularities leaves a "
                "four-times punctured sphere map, which lifts to a torus "
                "Anosov map; its dilatation is at least (3 + sqrt 5)/2"
            ),
        ),
    ]


def _four_braid_cases() -> list[StratumCase]:
    return [
        StratumCase(
            label="one-trigon",
            spec=monogon_stratum(4, [(3, False)]),
            kind="search",
            lambda_bound=Fraction("2.3"),
            maxnorm=30,
            note="five 1-prong punctures and a non-punctured 3-prong singularity",
        ),
    ]


CASE_TABLES = {6: _five_braid_cases, 5: _four_braid_cases}


def diophantine_strata(punctures: int, max_prong: int = 12) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """All (punctured prongs, non-punctured prongs) multisets solving
    sum_k (1 - k/2) n_k = 2 with the given number of punctured
    singularities.  Brute force over bounded prong values."""
    out = []
    # sum over punctured (2 - k) + sum over non-punctured (2 - k) = 4
    for punct in itertools.combinations_with_replacement(range(1, max_prong + 1), punctures):
        need = 4 - sum(2 - k for k in punct)
        # non-punctured singularities each contribute 2 - k <= -1
        if need > 0:
            continue
        remaining = -need
        combos = [()]
        if remaining:
            combos = []
            for parts in _partitions(remaining):
                combos.append(tuple(sorted(p + 2 for p in parts)))
        for nonp in combos:
            if all(k >= 3 for k in nonp):
                out.append((tuple(sorted(punct)), tuple(sorted(nonp))))
    return sorted(set(out))


def _partitions(n: int):
    if n == 0:
        yield ()
        return
    for first in range(1, n + 1):
        for rest in _partitions(n - first):
            if not rest or first <= rest[0]:
                yield (first,) + rest


def enumerate_strata(punctures: int, boundary_fixed: bool = True) -> list[StratumSpec]:
    """The stratum case list for a sphere with this many punctures.

    For six punctures these are exactly the five cases of the main
    theorem, in order; completeness against the Diophantine constraint is
    a tested invariant.
    """
    if not boundary_fixed:
        raise CertifyError("only the boundary-fixed setting is supported")
    if punctures not in CASE_TABLES:
        raise CertifyError("no case table for %d punctures" % punctures)
    return [case.spec for case in CASE_TABLES[punctures]()]


def cases_for(punctures: int) -> list[StratumCase]:
    if punctures not in CASE_TABLES:
        raise CertifyError("no case table for %d punctures" % punctures)
    return CASE_TABLES[punctures]()


def resolve_stratum(spec: StratumSpec) -> StratumCase:
    """Classify a stratum: dispatched to search, or resolved analytically."""
    spec.validate()
    for punctures, table in CASE_TABLES.items():
        for case in table():
            if case.spec == spec:
                return case
    raise CertifyError("stratum %r is not in the case analysis" % (spec,))


# ---------------------------------------------------------------------------
# polynomial helpers


def verify_root(p: IntPolynomial, value: Rational, tol: Rational) -> bool:
    """Whether the largest real root of p lies within tol of value."""
    tol = _as_fraction(tol)
    if tol <= 0:
        raise CertifyError("tolerance must be positive")
    value = _as_fraction(value)
    lo, hi = largest_real_root(p, tol / 4)
    return value - tol <= lo and hi <= value + tol


def poly_divides(p: IntPolynomial, q: IntPolynomial) -> bool:
    return divides(p, q)


def strip_unit_factors(p: IntPolynomial) -> IntPolynomial:
    """Remove x, (x-1) and (x+1) factors; roots above 1 are untouched."""
    for factor in (IntPolynomial([0, 1]), IntPolynomial([-1, 1]), IntPolynomial([1, 1])):
        while p.degree > factor.degree and divides(factor, p):
            p = exact_quotient(factor, p)
    return p


def interval_contains_root(p: IntPolynomial, lo: Fraction, hi: Fraction) -> bool:
    if p(lo) == 0 or p(hi) == 0:
        return True
    return count_real_roots(p, lo, hi) > 0


# ---------------------------------------------------------------------------
# braid word composition along a path


UNANNOTATED = None


def compose_word(path_arrows, automaton: FoldingAutomaton):
    """Concatenate braid-word annotations along a path, freely reduced.

    Identity-flagged arrows contribute nothing.  If any other arrow lacks
    an annotation the result is the unannotated marker (None); words are
    never invented.
    """
    letters: list[int] = []
    for ai in path_arrows:
        arrow = automaton.arrows[ai]
        if arrow.identity_flag:
            if arrow.braid_word:
                letters.extend(arrow.braid_word)
            continue
        if arrow.braid_word is None:
            return UNANNOTATED
        letters.extend(arrow.braid_word)
    return braids.free_reduce(letters)


# ---------------------------------------------------------------------------
# stratum records and the certificate


@dataclass
class StratumRecord:
    case: StratumCase
    automaton: Optional[FoldingAutomaton] = None
    result: Optional[SearchResult] = None
    min_interval: Optional[tuple[Fraction, Fraction]] = None   # attained minimum
    lower_bound: Optional[Fraction] = None                     # unattained bound
    bound_note: str = ""
    annotations_doc: Optional[dict] = None                     # overlay applied, if any

    @property
    def label(self) -> str:
        return self.case.label


@dataclass
class Certificate:
    punctures: int
    records: list[StratumRecord]
    min_interval: tuple[Fraction, Fraction]
    minimal_polynomial: IntPolynomial
    witness_record: StratumRecord
    witness_index: int  # candidate index within the witness record

    @property
    def witness_candidate(self):
        return self.witness_record.result.candidates[self.witness_index]


def run_case(case: StratumCase, *, threads: int = 1, tol: Rational = Fraction(1, 10**9),
             backend: Optional[str] = None, annotations=None) -> StratumRecord:
    """Resolve one stratum: run its search, or record the analytic bound.

    ``annotations`` maps stratum labels to curated overlay documents.
    """
    if case.kind == "search":
        auto = build_automaton(case.spec, case.punctures)
        overlay = annotations.get(case.label) if annotations else None
        if overlay:
            from .io import apply_annotations

            auto = apply_annotations(auto, overlay)
        result = search(
            auto,
            case.lambda_bound,
            maxnorm=case.maxnorm,
            threads=threads,
            tol=tol,
            backend=backend,
        )
        rec = StratumRecord(case, automaton=auto, result=result, annotations_doc=overlay)
        if result.candidates:
            rec.min_interval = min(c.dilatation for c in result.candidates)
        else:
            rec.lower_bound = case.lambda_bound
            rec.bound_note = "search found no dilatation below the bound"
        return rec
    if case.kind == "analytic":
        lo, hi = largest_real_root(case.bound_poly, Fraction(1, 10**12))
        return StratumRecord(case, lower_bound=lo, bound_note=case.note)
    if case.kind == "reduction":
        return StratumRecord(case, bound_note=case.note)
    raise CertifyError("unknown case kind %r" % case.kind)


def certify_minimum(records: list[StratumRecord], punctures: int) -> Certificate:
    """Combine stratum records into the global minimum certificate.

    Fails loudly when a stratum of the case analysis is missing, a
    reduction target is absent, or any stratum bound undercuts the
    claimed minimum.
    """
    expected = cases_for(punctures)
    by_label = {r.label: r for r in records}
    missing = [c.label for c in expected if c.label not in by_label]
    if missing:
        raise CertificationError("missing stratum records: %s" % ", ".join(missing))
    extra = [r.label for r in records if r.label not in {c.label for c in expected}]
    if extra:
        raise CertificationError("unexpected stratum records: %s" % ", ".join(extra))

    for rec in records:
        if rec.case.kind == "reduction":
            target = rec.case.reduces_to
            if target not in by_label:
                raise CertificationError(
                    "stratum %s reduces to %s, which is missing" % (rec.label, target)
                )

    attained = [
        (rec, rec.min_interval)
        for rec in records
        if rec.min_interval is not None
    ]
    if not attained:
        raise CertificationError("no stratum produced candidates; nothing to certify")
    witness_rec, (lo, hi) = min(attained, key=lambda t: t[1][0])

    for rec in records:
        if rec is witness_rec:
            continue
        if rec.min_interval is not None:
            if rec.min_interval[0] < hi:
                raise CertificationError(
                    "stratum %s attains %s, undercutting the minimum"
                    % (rec.label, float(rec.min_interval[0]))
                )
        elif rec.lower_bound is not None:
            if rec.lower_bound < hi:
                raise CertificationError(
                    "stratum %s only bounds dilatation above %s < claimed minimum"
                    % (rec.label, float(rec.lower_bound))
                )

    witness = min(
        range(len(witness_rec.result.candidates)),
        key=lambda i: witness_rec.result.candidates[i].dilatation[0],
    )
    poly = strip_unit_factors(witness_rec.result.candidates[witness].poly)
    return Certificate(
        punctures=punctures,
        records=records,
        min_interval=(lo, hi),
        minimal_polynomial=poly,
        witness_record=witness_rec,
        witness_index=witness,
    )


def certify(punctures: int = 6, *, threads: int = 1, tol: Rational = Fraction(1, 10**9),
            backend: Optional[str] = None, annotations=None,
            skip_labels: tuple[str, ...] = ()) -> Certificate:
    """Run the whole case analysis and certify the minimum dilatation."""
    records = [
        run_case(case, threads=threads, tol=tol, backend=backend, annotations=annotations)
        for case in cases_for(punctures)
        if case.label not in skip_labels
    ]
    return certify_minimum(records, punctures)
