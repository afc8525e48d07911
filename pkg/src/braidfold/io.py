"""File formats: automata, stratum records, certificates, annotations.

Documents are versioned JSON with a canonical key order.  The digest of a
document is the SHA-256 of the canonical dump with the ``digest`` field
emptied and the ``environment`` object dropped; semantic content (strata,
arrows, candidates, bounds, parameters) is digested, while provenance
(tool version, invocation, thread count, runtime statistics) is recorded
but does not perturb the digest.  Two runs with different ``--threads``
therefore produce byte-identical payloads and equal digests.

Permutations, edge labels and braid letters are 1-based on disk (matching
the published figures) and 0-based in memory.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from typing import Optional

from . import __version__
from .automaton import FoldArrow, FoldingAutomaton
from .certify import Certificate, StratumRecord, cases_for, interval_contains_root, strip_unit_factors
from .polynomials import IntPolynomial
from .search import Candidate, SearchResult
from .tracks import Polygon, StratumSpec, TrainTrack, canonical_data

FORMAT_VERSION = 1


class FormatError(ValueError):
    pass


def canonical_dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def digest_of(doc: dict) -> str:
    stripped = {k: v for k, v in doc.items() if k not in ("digest", "environment")}
    stripped["digest"] = ""
    return hashlib.sha256(canonical_dump(stripped).encode()).hexdigest()


def _seal(doc: dict) -> dict:
    doc["digest"] = digest_of(doc)
    return doc


def _check_seal(doc: dict, what: str) -> None:
    if doc.get("digest") != digest_of(doc):
        raise FormatError("%s digest mismatch (file corrupted or edited)" % what)


def _environment(invocation=None, extra=None) -> dict:
    env = {"tool_version": __version__}
    if invocation is not None:
        env["invocation"] = list(invocation)
    if extra:
        env.update(extra)
    return env


# ---------------------------------------------------------------------------
# strata


def stratum_to_json(spec: StratumSpec) -> dict:
    return {
        "interior": [[k, bool(p)] for k, p in spec.interior],
        "boundary_prongs": spec.boundary_prongs,
    }


def stratum_from_json(doc: dict) -> StratumSpec:
    return StratumSpec(
        tuple((int(k), bool(p)) for k, p in doc["interior"]),
        int(doc["boundary_prongs"]),
    )


# ---------------------------------------------------------------------------
# automata


def automaton_to_json(auto: FoldingAutomaton) -> dict:
    doc = {
        "format_version": FORMAT_VERSION,
        "kind": "automaton",
        "stratum": stratum_to_json(auto.stratum),
        "punctures": auto.punctures,
        "edge_count": auto.edge_count,
        "vertices": [
            {
                "code": list(code),
                "polygons": [
                    [bool(poly.punctured), [[e + 1 for e in corner] for corner in poly.corners]]
                    for poly in track.polygons
                ],
            }
            for code, track in zip(auto.codes, auto.vertices)
        ],
        "arrows": [
            {
                "source": a.source,
                "target": a.target,
                "perm": [p + 1 for p in a.perm],
                "rule": [a.rule[0] + 1, a.rule[1] + 1] if a.rule is not None else None,
                "kind": a.kind,
                "identity": a.identity_flag,
                "braid_word": list(a.braid_word) if a.braid_word is not None else None,
                "polygon_perm": list(a.polygon_perm),
            }
            for a in auto.arrows
        ],
        "metadata": dict(auto.metadata),
        "environment": _environment(),
        "digest": "",
    }
    return _seal(doc)


def automaton_from_json(doc: dict) -> FoldingAutomaton:
    if doc.get("kind") != "automaton":
        raise FormatError("not an automaton document")
    if doc.get("format_version") != FORMAT_VERSION:
        raise FormatError("unsupported format version %r" % doc.get("format_version"))
    _check_seal(doc, "automaton")
    stratum = stratum_from_json(doc["stratum"])
    vertices = []
    codes = []
    for v in doc["vertices"]:
        polys = tuple(
            Polygon(bool(punctured), tuple(tuple(e - 1 for e in corner) for corner in corners))
            for punctured, corners in v["polygons"]
        )
        track = TrainTrack(polys)
        data = canonical_data(track)
        if list(data.code) != list(v["code"]):
            raise FormatError("vertex code does not match its structure")
        vertices.append(track)
        codes.append(data.code)
    n_vertices = len(vertices)
    edge_count = int(doc["edge_count"])
    arrows = []
    for a in doc["arrows"]:
        perm = tuple(p - 1 for p in a["perm"])
        if sorted(perm) != list(range(edge_count)):
            raise FormatError("arrow permutation is not a bijection of 1..%d" % edge_count)
        if not (0 <= a["source"] < n_vertices and 0 <= a["target"] < n_vertices):
            raise FormatError("arrow references an undeclared vertex")
        rule = None
        if a["rule"] is not None:
            rule = (a["rule"][0] - 1, a["rule"][1] - 1)
        arrows.append(
            FoldArrow(
                source=a["source"],
                target=a["target"],
                perm=perm,
                rule=rule,
                kind=a["kind"],
                polygon_perm=tuple(a["polygon_perm"]),
                identity_flag=a["identity"],
                braid_word=tuple(a["braid_word"]) if a["braid_word"] is not None else None,
            )
        )
    return FoldingAutomaton(
        stratum=stratum,
        punctures=int(doc["punctures"]),
        vertices=tuple(vertices),
        codes=tuple(codes),
        arrows=tuple(arrows),
        metadata=dict(doc.get("metadata", {})),
    )


def write_automaton(auto: FoldingAutomaton, path: str) -> dict:
    doc = automaton_to_json(auto)
    write_json(doc, path)
    return doc


def read_automaton(path: str) -> FoldingAutomaton:
    return automaton_from_json(read_json(path))


# ---------------------------------------------------------------------------
# curated annotations (braid words, identity flags)


def apply_annotations(auto: FoldingAutomaton, overlay: dict) -> FoldingAutomaton:
    """Merge a curated overlay into an automaton.

    Entries are keyed by (source, target, perm, rule); unmatched overlay
    entries are an error, so stale curation is caught instead of silently
    dropped.
    """
    if overlay.get("kind") != "annotations":
        raise FormatError("not an annotations document")
    want = {}
    for entry in overlay["arrows"]:
        key = (
            entry["source"],
            entry["target"],
            tuple(p - 1 for p in entry["perm"]),
            tuple(x - 1 for x in entry["rule"]) if entry["rule"] is not None else None,
        )
        want[key] = entry
    arrows = []
    for a in auto.arrows:
        entry = want.pop(a.key(), None)
        if entry is None:
            arrows.append(a)
            continue
        word = entry.get("braid_word")
        arrows.append(
            FoldArrow(
                source=a.source,
                target=a.target,
                perm=a.perm,
                rule=a.rule,
                kind=a.kind,
                polygon_perm=a.polygon_perm,
                identity_flag=entry.get("identity", a.identity_flag),
                braid_word=tuple(word) if word is not None else a.braid_word,
            )
        )
    if want:
        raise FormatError("annotations reference %d arrows not in the automaton" % len(want))
    return FoldingAutomaton(
        stratum=auto.stratum,
        punctures=auto.punctures,
        vertices=auto.vertices,
        codes=auto.codes,
        arrows=tuple(arrows),
        metadata=dict(auto.metadata),
    )


def read_annotations(path: str) -> dict:
    doc = read_json(path)
    if doc.get("kind") != "annotations":
        raise FormatError("not an annotations document")
    return doc


def packaged_annotations(stratum_name: str) -> Optional[dict]:
    """Curated overlay shipped with the package, if any."""
    import importlib.resources as resources

    ref = resources.files("braidfold").joinpath("data/annotations/%s.json" % stratum_name)
    if not ref.is_file():
        return None
    return json.loads(ref.read_text())


# ---------------------------------------------------------------------------
# search results and certificates


def _frac(x: Fraction) -> str:
    return "%d/%d" % (x.numerator, x.denominator)


def candidate_to_json(c: Candidate) -> dict:
    return {
        "word": list(c.word),
        "start": c.start,
        "norm": c.norm,
        "matrix": [x for row in c.matrix.rows for x in row],  # row-major
        "char_poly": list(c.poly.coeffs),
        "dilatation": [_frac(c.dilatation[0]), _frac(c.dilatation[1])],
        "dilatation_float": float((c.dilatation[0] + c.dilatation[1]) / 2),
        "equality": c.is_equality,
    }


def search_result_to_json(result: SearchResult, automaton_doc: dict,
                          invocation=None) -> dict:
    stats = result.stats.as_dict()
    env_stats = {k: stats.pop(k) for k in ("threads", "backend")}
    doc = {
        "format_version": FORMAT_VERSION,
        "kind": "stratum-record",
        "automaton_digest": automaton_doc["digest"],
        "stratum": automaton_doc["stratum"],
        "params": dict(result.params),
        "candidates": [candidate_to_json(c) for c in result.candidates],
        "equality_candidates": [candidate_to_json(c) for c in result.equality_candidates],
        "stats": stats,
        "environment": _environment(invocation, env_stats),
        "digest": "",
    }
    return _seal(doc)


def record_to_json(rec: StratumRecord) -> tuple[dict, dict]:
    """Semantic record plus its environment-only diagnostics."""
    case = rec.case
    doc = {
        "label": case.label,
        "kind": case.kind,
        "stratum": stratum_to_json(case.spec),
        "note": case.note,
    }
    env = {}
    if case.kind == "search":
        auto_doc = automaton_to_json(rec.automaton)
        doc["automaton_digest"] = auto_doc["digest"]
        if rec.annotations_doc is not None:
            doc["annotations"] = rec.annotations_doc
        doc["automaton_counts"] = {
            "vertices": len(rec.automaton.vertices),
            "arrows": len(rec.automaton.arrows),
            "drawn_edges": rec.automaton.metadata.get("drawn_edge_count"),
        }
        doc["params"] = dict(rec.result.params)
        doc["candidates"] = [candidate_to_json(c) for c in rec.result.candidates]
        doc["equality_candidates"] = [
            candidate_to_json(c) for c in rec.result.equality_candidates
        ]
        stats = rec.result.stats.as_dict()
        env = {k: stats.pop(k) for k in ("threads", "backend")}
        doc["stats"] = stats
    if rec.min_interval is not None:
        doc["min_dilatation"] = [_frac(rec.min_interval[0]), _frac(rec.min_interval[1])]
        doc["min_dilatation_float"] = float(
            (rec.min_interval[0] + rec.min_interval[1]) / 2
        )
    if rec.lower_bound is not None:
        doc["dilatation_lower_bound"] = _frac(rec.lower_bound)
        doc["dilatation_lower_bound_float"] = float(rec.lower_bound)
    if case.kind == "analytic":
        doc["bound_poly"] = list(case.bound_poly.coeffs)
    if case.kind == "reduction":
        doc["reduces_to"] = case.reduces_to
    if rec.bound_note:
        doc["bound_note"] = rec.bound_note
    return doc, env


def certificate_to_json(cert: Certificate, invocation: Optional[list[str]] = None,
                        witness_braid_word=None) -> dict:
    witness = cert.witness_candidate
    strata = []
    env_stats = {}
    for rec in cert.records:
        doc, env = record_to_json(rec)
        strata.append(doc)
        if env:
            env_stats[rec.label] = env
    doc = {
        "format_version": FORMAT_VERSION,
        "kind": "certificate",
        "punctures": cert.punctures,
        "braid_index": cert.punctures - 1,
        "strata": strata,
        "conclusion": {
            "min_dilatation": [_frac(cert.min_interval[0]), _frac(cert.min_interval[1])],
            "min_dilatation_float": float(
                (cert.min_interval[0] + cert.min_interval[1]) / 2
            ),
            "minimal_polynomial": list(cert.minimal_polynomial.coeffs),
            "witness": {
                "stratum": cert.witness_record.label,
                "word": list(witness.word),
                "char_poly": list(witness.poly.coeffs),
                "braid_word": list(witness_braid_word) if witness_braid_word else None,
            },
        },
        "environment": _environment(invocation, {"per_stratum": env_stats}),
        "digest": "",
    }
    return _seal(doc)


def write_json(doc: dict, path: str, fmt: str = "json") -> None:
    with open(path, "w") as fh:
        if fmt == "compact":
            fh.write(canonical_dump(doc))
        else:
            json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


def read_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


# ---------------------------------------------------------------------------
# certificate verification (recompute everything from the stored data)


def verify_certificate(doc: dict) -> list[str]:
    """Recompute a certificate's content; return the list of mismatches.

    Every candidate's matrix is rebuilt from its arrow word on a freshly
    generated automaton (checked against the recorded digest), its
    primitivity retested, its characteristic polynomial and certified
    dilatation interval recomputed at the recorded tolerance, and the
    global conclusion re-derived.  An empty list means the certificate
    reproduces.
    """
    from .automaton import build_automaton
    from .matrices import char_poly, entry_sum, is_perron_frobenius, spectral_radius
    from .search import _path_matrix

    failures: list[str] = []
    if doc.get("kind") != "certificate":
        return ["not a certificate document"]
    if doc.get("digest") != digest_of(doc):
        failures.append("certificate digest mismatch")

    try:
        expected_labels = [c.label for c in cases_for(doc["punctures"])]
    except Exception as exc:
        return failures + ["bad puncture count: %s" % exc]
    got_labels = [s["label"] for s in doc["strata"]]
    if sorted(expected_labels) != sorted(got_labels):
        failures.append(
            "stratum coverage mismatch: expected %s, got %s"
            % (sorted(expected_labels), sorted(got_labels))
        )

    min_candidates: list[tuple[Fraction, Fraction, dict, str]] = []
    for srec in doc["strata"]:
        label = srec["label"]
        if srec["kind"] != "search":
            continue
        spec = stratum_from_json(srec["stratum"])
        auto = build_automaton(spec, spec.interior_punctures)
        if srec.get("annotations") is not None:
            auto = apply_annotations(auto, srec["annotations"])
        auto_doc = automaton_to_json(auto)
        if auto_doc["digest"] != srec["automaton_digest"]:
            failures.append("%s: automaton digest mismatch" % label)
            continue
        tol = Fraction(srec["params"]["tol"])
        lam = Fraction(srec["params"]["lambda"])
        for i, cand in enumerate(srec["candidates"]):
            word = tuple(cand["word"])
            try:
                m = _path_matrix(word, auto)
            except Exception as exc:
                failures.append("%s candidate %d: bad word (%s)" % (label, i, exc))
                continue
            if entry_sum(m) != cand["norm"]:
                failures.append("%s candidate %d: entry sum mismatch" % (label, i))
            if [x for row in m.rows for x in row] != list(cand["matrix"]):
                failures.append("%s candidate %d: matrix mismatch" % (label, i))
            if not is_perron_frobenius(m):
                failures.append("%s candidate %d: matrix is not Perron-Frobenius" % (label, i))
            p = char_poly(m)
            if list(p.coeffs) != list(cand["char_poly"]):
                failures.append("%s candidate %d: characteristic polynomial mismatch" % (label, i))
                continue
            rlo, rhi = Fraction(cand["dilatation"][0]), Fraction(cand["dilatation"][1])
            lo, hi = spectral_radius(m, tol)
            if (lo, hi) != (rlo, rhi):
                failures.append("%s candidate %d: dilatation interval mismatch" % (label, i))
            if not interval_contains_root(p, rlo, rhi):
                failures.append(
                    "%s candidate %d: recorded interval contains no root of the "
                    "characteristic polynomial" % (label, i)
                )
            if not cand["equality"] and not rhi < lam:
                failures.append("%s candidate %d: dilatation not below the bound" % (label, i))
            min_candidates.append((rlo, rhi, cand, label))
        if srec.get("min_dilatation") is not None and srec["candidates"]:
            best = min(Fraction(c["dilatation"][0]) for c in srec["candidates"])
            if Fraction(srec["min_dilatation"][0]) != best:
                failures.append("%s: recorded stratum minimum mismatch" % label)

    conclusion = doc["conclusion"]
    if min_candidates:
        lo, hi, cand, label = min(min_candidates, key=lambda t: t[0])
        if [_frac(lo), _frac(hi)] != conclusion["min_dilatation"]:
            failures.append("conclusion: minimum interval mismatch")
        if conclusion["witness"]["stratum"] != label or \
                list(conclusion["witness"]["word"]) != list(cand["word"]):
            failures.append("conclusion: witness mismatch")
        poly = strip_unit_factors(IntPolynomial(cand["char_poly"]))
        if list(poly.coeffs) != list(conclusion["minimal_polynomial"]):
            failures.append("conclusion: minimal polynomial mismatch")
    else:
        failures.append("no candidates recorded; nothing to conclude")
    return failures
