"""Trivialization suite on z^2 - (1+t)^2 x^2 for both weight families.

Same grid and t values as the acceptance run; --per-axis 7 gives a quick look.
"""
import argparse
import json
from fractions import Fraction as Q

import mpmath

from arcwise.polycore import parse_polynomial
from arcwise.report import jsonable
from arcwise.tower import build_parametric_tower
from arcwise.trivialize import (TrivConfig, build_trivialization, check_identities, check_level_preservation,
                                check_regularity, check_round_trip, make_grid)


def suite(kind, per_axis, ts):
    F = parse_polynomial("z^2 - (1+t)^2*x^2", ("t", "x", "z"))
    sys_, _, _ = build_parametric_tower(F, ("t",), ("x", "z"))
    Phi = build_trivialization(sys_, (0,), TrivConfig(kind=kind, on_certificate_failure="record",
                                                      inverse_mode="observed"))
    grid = make_grid((-1, -1), (1, 1), per_axis)
    with mpmath.workprec(256):
        out = {"identities": check_identities(Phi, grid, ts),
               "round_trip": check_round_trip(Phi, grid, ts),
               "level": check_level_preservation(Phi, F, grid, ts),
               "regularity": check_regularity(Phi, grid, ts)}
    out["stats"] = dict(Phi.stats)
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--per-axis", type=int, default=21)
    ap.add_argument("--family", choices=("abs", "sympow", "both"), default="both")
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()
    ts = [Q(-1, 4), Q(-1, 8), Q(0), Q(1, 8), Q(1, 4)]
    kinds = ("abs", "sympow") if args.family == "both" else (args.family,)
    for kind in kinds:
        out = suite(kind, args.per_axis, ts)
        if args.json:
            print(json.dumps(jsonable({"family": kind, **out}), sort_keys=True, indent=2))
            continue
        rt = out["round_trip"]
        print(f"{kind}: identities {out['identities']['pass']}, round trip {rt['pass']} "
              f"(max {rt['max_error']:.2e}, {rt['violations']} bad), level {out['level']['pass']} "
              f"{out['level']['stats']}, regularity {out['regularity']['pass']}")


if __name__ == "__main__":
    main()
