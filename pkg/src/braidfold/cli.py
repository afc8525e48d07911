"""Command line front end.

Subcommands: ``gen`` (build an automaton file for a named stratum),
``search`` (enumerate candidates in an automaton file), ``certify`` (run
the full case analysis and write the certificate), ``verify`` (recompute
a certificate).  Exit codes: 0 success, 2 validation or domain error,
3 resource-cap abort, 4 certification failure, 5 verification mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__
from .automaton import build_automaton
from .certify import (
    CertificationError,
    CertifyError,
    certify,
    compose_word,
    cases_for,
)
from .io import (
    FormatError,
    apply_annotations,
    automaton_to_json,
    certificate_to_json,
    read_annotations,
    read_automaton,
    read_json,
    search_result_to_json,
    verify_certificate,
    write_json,
)
from .search import ResourceCapExceeded, SearchError, search
from .tracks import NAMED_STRATA, TrackError

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RESOURCE = 3
EXIT_CERTIFICATION = 4
EXIT_VERIFY = 5


def _parse_lambda(s: str) -> Fraction:
    try:
        val = Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError("not a number: %r" % s)
    return val


def _add_common_search_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--threads", type=int, default=1, help="worker threads (default 1)")
    p.add_argument("--tol", default="1e-9",
                   help="certification tolerance for dilatation intervals (default 1e-9)")
    p.add_argument("--backend", choices=["py", "cy"], default=None,
                   help="search kernel (default: compiled when available)")
    p.add_argument("--max-expansions", type=int, default=None,
                   help="abort the search after this many path extensions")
    p.add_argument("--stats-out", default=None, help="write search statistics to this file")


def _decimal_fraction(s: str) -> Fraction:
    try:
        return Fraction(s)
    except ValueError:
        # allow scientific notation like 1e-9
        return Fraction(repr(float(s)))


def cmd_gen(args) -> int:
    if args.stratum not in NAMED_STRATA:
        print("unknown stratum %r (have: %s)" % (args.stratum, ", ".join(sorted(NAMED_STRATA))),
              file=sys.stderr)
        return EXIT_VALIDATION
    punctures, spec = NAMED_STRATA[args.stratum]
    if args.punctures != punctures:
        print("stratum %s lives on %d interior punctures, not %d"
              % (args.stratum, punctures, args.punctures), file=sys.stderr)
        return EXIT_VALIDATION
    auto = build_automaton(spec, punctures)
    if args.annotations:
        auto = apply_annotations(auto, read_annotations(args.annotations))
    doc = automaton_to_json(auto)
    write_json(doc, args.output)
    print("wrote %s: %d vertices, %d arrows (%d drawn edges), digest %s"
          % (args.output, len(auto.vertices), len(auto.arrows),
             auto.metadata["drawn_edge_count"], doc["digest"][:16]))
    return EXIT_OK


def cmd_search(args) -> int:
    auto = read_automaton(args.automaton)
    avoid = "auto" if args.avoid == "auto" else None
    try:
        result = search(
            auto,
            args.lambda_bound,
            maxnorm=args.maxnorm,
            avoid=avoid,
            threads=args.threads,
            tol=_decimal_fraction(args.tol),
            equality_bucket=args.equality_bucket,
            max_expansions=args.max_expansions,
            backend=args.backend,
        )
    except ResourceCapExceeded as exc:
        if args.stats_out and exc.stats is not None:
            write_json(exc.stats.as_dict(), args.stats_out)
        raise
    doc = search_result_to_json(result, automaton_to_json(auto))
    if args.output:
        write_json(doc, args.output, fmt=args.format)
    print("candidates: %d (equality bucket: %d)"
          % (len(result.candidates), len(result.equality_candidates)))
    for c in result.candidates:
        word = compose_word(c.word, auto)
        note = "" if word is None else "  braid %s" % _word_str(word)
        print("  word %s  norm %d  dilatation ~ %.6f%s"
              % (list(c.word), c.norm,
                 float((c.dilatation[0] + c.dilatation[1]) / 2), note))
    for c in result.equality_candidates:
        print("  (equality) word %s  dilatation = bound exactly" % (list(c.word),))
    print("matrices eigenvalue-tested: %d, expansions: %d"
          % (result.stats.eigen_tested, result.stats.expansions))
    if args.stats_out:
        write_json(result.stats.as_dict(), args.stats_out)
    return EXIT_OK


def _word_str(word) -> str:
    if not word:
        return "(identity)"
    return " ".join(("s%d" % x) if x > 0 else ("s%d^-1" % -x) for x in word)


def cmd_certify(args) -> int:
    punctures = args.braid_index + 1
    cases = cases_for(punctures)  # validate early: domain error when unsupported
    if args.annotations:
        doc = read_annotations(args.annotations)
        annotations = {doc.get("stratum", ""): doc}
    else:
        from .io import packaged_annotations

        annotations = {}
        for case in cases:
            doc = packaged_annotations(case.label)
            if doc is not None:
                annotations[case.label] = doc
    cert = certify(
        punctures,
        threads=args.threads,
        tol=_decimal_fraction(args.tol),
        backend=args.backend,
        annotations=annotations,
    )
    witness = cert.witness_candidate
    braid_word = None
    if cert.witness_record.automaton is not None:
        braid_word = compose_word(witness.word, cert.witness_record.automaton)
    doc = certificate_to_json(cert, invocation=sys.argv[1:], witness_braid_word=braid_word)
    if args.output:
        write_json(doc, args.output)
    lo, hi = cert.min_interval
    print("minimum dilatation of %d-braids: %.6f (certified interval width %.2g)"
          % (args.braid_index, float((lo + hi) / 2), float(hi - lo)))
    print("minimal polynomial: %s" % _poly_str(cert.minimal_polynomial))
    print("witness stratum: %s, path word %s"
          % (cert.witness_record.label, list(witness.word)))
    if braid_word is not None:
        print("witness braid word: %s" % _word_str(braid_word))
    if args.stats_out:
        stats = {
            rec.label: rec.result.stats.as_dict()
            for rec in cert.records
            if rec.result is not None
        }
        write_json(stats, args.stats_out)
    return EXIT_OK


def _poly_str(p) -> str:
    terms = []
    for i in range(p.degree, -1, -1):
        c = p.coeffs[i]
        if not c:
            continue
        mono = "x^%d" % i if i > 1 else ("x" if i == 1 else "1")
        if c == 1 and i > 0:
            terms.append("+ %s" % mono)
        elif c == -1 and i > 0:
            terms.append("- %s" % mono)
        else:
            terms.append("%s %s%s" % ("+" if c > 0 else "-", abs(c),
                                      " " + mono if i > 0 else ""))
    s = " ".join(terms)
    return s[2:] if s.startswith("+ ") else s


def cmd_verify(args) -> int:
    doc = read_json(args.certificate)
    failures = verify_certificate(doc)
    if failures:
        print("FAIL: certificate does not reproduce", file=sys.stderr)
        for f in failures:
            print("  - %s" % f, file=sys.stderr)
        return EXIT_VERIFY
    print("PASS: certificate reproduces (%d strata checked)" % len(doc["strata"]))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="braidfold",
        description="folding automata and certified minimum-dilatation search",
    )
    parser.add_argument("--version", action="version", version="braidfold %s" % __version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a folding automaton file")
    p.add_argument("--punctures", type=int, required=True,
                   help="interior punctures of the disk (strands of the braid group)")
    p.add_argument("--stratum", required=True,
                   help="named stratum: %s" % ", ".join(sorted(NAMED_STRATA)))
    p.add_argument("--annotations", default=None, help="curated annotation overlay to merge")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("search", help="search an automaton for low-dilatation closed paths")
    p.add_argument("automaton", help="automaton file from gen")
    p.add_argument("--lambda", dest="lambda_bound", type=_parse_lambda, required=True,
                   help="dilatation upper bound (decimal or fraction)")
    p.add_argument("--maxnorm", type=int, default=None,
                   help="entry-sum bound override (may only exceed the computed bound)")
    p.add_argument("--avoid", choices=["auto", "none"], default="auto")
    p.add_argument("--equality-bucket", action="store_true",
                   help="also report candidates with dilatation exactly at the bound")
    p.add_argument("--format", choices=["json", "compact"], default="json",
                   help="output layout: indented json or one canonical line")
    p.add_argument("-o", "--output", default=None)
    _add_common_search_flags(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("certify", help="run the full case analysis and certify the minimum")
    p.add_argument("--braid-index", type=int, default=5, help="4 or 5 (default 5)")
    p.add_argument("--annotations", default=None)
    p.add_argument("-o", "--output", default=None)
    _add_common_search_flags(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("verify", help="recompute and check a certificate file")
    p.add_argument("certificate")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ResourceCapExceeded as exc:
        print("ABORT: %s" % exc, file=sys.stderr)
        return EXIT_RESOURCE
    except CertificationError as exc:
        print("CERTIFICATION FAILURE: %s" % exc, file=sys.stderr)
        return EXIT_CERTIFICATION
    except (TrackError, SearchError, CertifyError, FormatError, FileNotFoundError,
            json.JSONDecodeError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
