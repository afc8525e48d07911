"""Benchmark the compiled search kernel against the pure-Python backend.

Runs the documented searches on both backends, checks that the candidate
lists and statistics agree exactly, and prints a timing table.

    python benchmarks/bench_search.py [--heavy]

--heavy includes the two-trigon search at its full norm bound 72, which
is the configuration that dominated the original computation.
"""

import argparse
import sys
import time

from braidfold.automaton import build_automaton
from braidfold.search import available_backends, search
from braidfold.tracks import NAMED_STRATA

RUNS = [
    ("one-trigon", "2.3", 30),
    ("four-prong", "2.2", 56),
    ("boundary-3prong", "1.7221", None),
]
HEAVY = [("two-trigon", "2.02", 72)]


def result_key(res):
    return (
        [(c.word, c.norm, c.poly.coeffs, c.dilatation) for c in res.candidates],
        res.stats.expansions,
        res.stats.eigen_tested,
    )


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--heavy", action="store_true",
                        help="include the full two-trigon search")
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args()

    backends = available_backends()
    runs = RUNS + (HEAVY if args.heavy else [])
    print("backends available: %s" % ", ".join(backends))
    print("%-18s %-8s %10s %12s %10s %9s" % (
        "stratum", "lambda", "py [s]", "compiled [s]", "speedup", "agree"))
    for name, lam, maxnorm in runs:
        punctures, stratum = NAMED_STRATA[name]
        auto = build_automaton(stratum, punctures)
        times = {}
        results = {}
        for backend in backends:
            t0 = time.perf_counter()
            results[backend] = search(auto, lam, maxnorm=maxnorm,
                                      threads=args.threads, backend=backend)
            times[backend] = time.perf_counter() - t0
        agree = True
        if "cy" in results:
            agree = result_key(results["py"]) == result_key(results["cy"])
        print("%-18s %-8s %10.3f %12s %10s %9s" % (
            name, lam, times["py"],
            "%.3f" % times["cy"] if "cy" in times else "n/a",
            "%.1fx" % (times["py"] / times["cy"]) if "cy" in times else "n/a",
            "yes" if agree else "NO"))
        if not agree:
            print("BACKEND MISMATCH on %s" % name, file=sys.stderr)
            return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
