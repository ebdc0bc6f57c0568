"""Run the corpus pipeline and write the JSON report.

    python scripts/run_corpus.py --seed 0 --trials 5 --out corpus.json
"""
import argparse
import sys

from arcwise.corpus import run_corpus
from arcwise.report import RunConfig, Stopwatch


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--trials", type=int, default=3)
    ap.add_argument("--names", default=None, help="comma separated entry names")
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    names = args.names.split(",") if args.names else None
    with Stopwatch() as sw:
        report = run_corpus(RunConfig(seed=args.seed), names, tracking_trials=args.trials)
    text = report.to_json()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for c in report.checks:
        mark = {True: "ok", False: "FAIL", None: "doc"}[c["pass"]]
        print(f"{mark:5s} {c['name']}", file=sys.stderr)
    print(f"{len(report.checks)} checks in {sw.elapsed:.1f} s", file=sys.stderr)
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
