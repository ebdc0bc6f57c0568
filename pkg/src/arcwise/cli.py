"""Command line front end: ``arcwise <group> <action> [flags]``.

Every run emits a JSON RunReport (stdout, or the file given by --json).
Exit codes: 0 all checks pass, 1 some check failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import re
import sys
import time
from fractions import Fraction

import mpmath

from . import corpus as corpus_mod
from .interp import PsiEval, lipschitz_certificate, make_family, psi_inverse, whitney_psi, SYMPOW_MAX_N
from .numeric import mp_of
from .polycore import GaussianRational, PolyError, format_poly, parse_polynomial, parse_rational, parse_var_spec
from .puiseux import expansion_report, newton_puiseux, puiseux_pairs, puiseux_with_parameter
from .report import RunConfig, RunReport
from .stratification import build_filtration, classify_point
from .tower import (PseudoPolySystem, build_parametric_tower, build_tower, check_equisingular,
                    check_transverse, verify_invariants)
from .trivialize import (TrivConfig, build_trivialization, check_identities, check_level_preservation,
                         check_regularity, check_round_trip, eval_phi, make_grid, grid_spec)


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- input parsing

def _rat(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except PolyError as exc:
        raise UsageError(str(exc)) from exc


def _point(text: str):
    """'re' or 're,im' with exact rationals / decimals."""
    parts = text.split(",")
    if len(parts) == 1:
        return _rat(parts[0])
    if len(parts) == 2:
        re, im = _rat(parts[0]), _rat(parts[1])
        return re if im == 0 else GaussianRational(re, im)
    raise UsageError(f"bad complex number {text!r} (expected re or re,im)")


def _coords(text: str) -> list:
    """Comma separated real coordinates, e.g. '1/2,0,-1'."""
    return [_rat(v) for v in text.split(",") if v.strip()]


def _variables(args, default: str | None = None) -> tuple[tuple[str, ...], tuple[str, ...]]:
    spec = args.vars or default
    if spec is None:
        raise UsageError("--vars is required (e.g. 't;x,y,z')")
    try:
        params, space = parse_var_spec(spec)
    except PolyError as exc:
        raise UsageError(str(exc)) from exc
    if args.order:
        order = tuple(v.strip() for v in args.order.split(",") if v.strip())
        if sorted(order) != sorted(space):
            raise UsageError(f"--order {args.order!r} is not a permutation of the space variables {space}")
        space = tuple(reversed(order))
    return params, space


def _poly(args, params, space):
    if not args.poly:
        raise UsageError("--poly is required")
    try:
        return parse_polynomial(args.poly, params + space)
    except PolyError as exc:
        raise UsageError(f"cannot parse --poly: {exc}") from exc


def _config(args) -> RunConfig:
    return RunConfig(prec=args.prec, trunc=args.trunc, steps=args.steps, tol=args.tol, seed=args.seed,
                     grid=args.grid)


def _t_values(args, default) -> list:
    return [_rat(v) for v in args.t] if args.t else list(default)


# ---------------------------------------------------------------- tower / strat

def _build_system(args):
    params, space = _variables(args)
    F = _poly(args, params, space)
    return params, space, F


def cmd_tower_build(args, report: RunReport):
    params, space, F = _build_system(args)
    report.inputs.update(poly=format_poly(F), params=list(params), space_vars=list(space))
    if params:
        sys_, change, _ = build_parametric_tower(F, params, space, seed=args.seed)
        ts = _t_values(args, corpus_mod.T_SAMPLES)
        per_t = {str(t): check_equisingular(sys_, (t,)) for t in ts}
        report.add("equisingular", all(per_t.values()), samples=per_t)
        report.result["equisingular"] = all(per_t.values())
    else:
        sys_, change = build_tower(F, space, seed=args.seed)
        eq = check_equisingular(sys_)
        report.add("equisingular", eq)
        report.result["equisingular"] = eq
    inv = verify_invariants(sys_)
    report.add("invariants", inv["ok"], **{k: v for k, v in inv.items() if k != "ok"})
    report.result["tower"] = sys_.to_dict()


def _load_tower(args) -> PseudoPolySystem:
    if args.tower:
        import json
        try:
            with open(args.tower) as fh:
                doc = json.load(fh)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read tower file: {exc}") from exc
        doc = doc.get("result", {}).get("tower", doc)  # a full report or a bare tower document
        try:
            return PseudoPolySystem.from_dict(doc)
        except (PolyError, KeyError) as exc:
            raise UsageError(f"bad tower document: {exc}") from exc
    params, space, F = _build_system(args)
    if params:
        return build_parametric_tower(F, params, space, seed=args.seed)[0]
    return build_tower(F, space, seed=args.seed)[0]


def cmd_tower_check(args, report: RunReport):
    sys_ = _load_tower(args)
    inv = verify_invariants(sys_)
    report.add("invariants", inv["ok"], **{k: v for k, v in inv.items() if k != "ok"})
    ts = _t_values(args, corpus_mod.T_SAMPLES) if sys_.param_vars else [None]
    for t in ts:
        t0 = () if t is None else (t,)
        report.add(f"equisingular[{t}]", check_equisingular(sys_, t0))
        tr = check_transverse(sys_, t0)
        report.add(f"transverse[{t}]", None, **tr)  # informational: transversality is not required
    report.result["degrees"] = list(sys_.degrees)


def _absolute_tower(args):
    params, space, F = _build_system(args)
    if params:
        t0 = _t_values(args, [Fraction(0)])[0]
        sys_ = build_parametric_tower(F, params, space, seed=args.seed)[0].at_parameter((t0,))
    else:
        sys_ = build_tower(F, space, seed=args.seed)[0]
    return sys_


def cmd_strat_build(args, report: RunReport):
    sys_ = _absolute_tower(args)
    filt = build_filtration(sys_)
    report.add("tower_invariants", True)
    report.result["filtration"] = filt.to_dict()


def cmd_strat_classify(args, report: RunReport):
    if not args.point:
        raise UsageError("--point is required")
    sys_ = _absolute_tower(args)
    if not sys_.coordinate_change.is_identity():
        report.add("coordinates", None, notice="point is read in the tower's changed coordinates")
    filt = build_filtration(sys_)
    out = []
    for p in args.point:
        pt = _coords(p)
        lab = classify_point(filt, pt)  # exact coordinates: exact zero tests
        out.append(lab.to_dict(pt))
    report.add("classified", True, count=len(out))
    report.result["labels"] = out


# ---------------------------------------------------------------- interp

def _psi_inputs(args):
    if not args.a or not args.b:
        raise UsageError("--a and --b are required")
    a = [_point(v) for v in args.a]
    b = [_point(v) for v in args.b]
    if len(a) != len(b):
        raise UsageError("--a and --b need the same number of points")
    kind = args.family
    if kind == "auto":
        kind = "sympow" if len(a) <= SYMPOW_MAX_N else "abs"
    try:
        fam = make_family(kind, len(a))
        with mpmath.workprec(args.prec):
            ev = PsiEval.build([mp_of(x) for x in a], [mp_of(y) for y in b], fam, args.prec)
    except PolyError as exc:
        raise UsageError(str(exc)) from exc
    return a, b, ev


def cmd_interp_eval(args, report: RunReport):
    a, b, ev = _psi_inputs(args)
    zs = [_point(v) for v in (args.z or [])]
    report.inputs.update(a=a, b=b, z=zs, family=ev.family.kind)
    with mpmath.workprec(args.prec):
        nodes = max(abs(whitney_psi(mp_of(x), ev) - mp_of(y)) for x, y in zip(a, b))
        vals = [whitney_psi(mp_of(z), ev) for z in zs]
    report.add("interpolation", bool(nodes <= mpmath.mpf(2) ** (-(args.prec // 2))), max_error=nodes)
    report.result["values"] = vals


def cmd_interp_cert(args, report: RunReport):
    a, b, ev = _psi_inputs(args)
    report.inputs.update(a=a, b=b, family=ev.family.kind)
    cert = lipschitz_certificate(ev)
    report.add("bilipschitz", cert.bilipschitz)
    report.result.update(cert.to_dict())
    report.result["L"] = cert.L_forward


def cmd_interp_invert(args, report: RunReport):
    a, b, ev = _psi_inputs(args)
    ps = [_point(v) for v in (args.p or [])]
    report.inputs.update(a=a, b=b, p=ps, family=ev.family.kind, mode=args.mode)
    out = []
    for p in ps:
        with mpmath.workprec(args.prec):
            z, it = psi_inverse(mp_of(p), ev, mode=args.mode)
        with mpmath.workprec(args.prec):
            res = abs(whitney_psi(z, ev) - mp_of(p))
        out.append({"p": p, "z": z, "iterations": it, "residual": res})
    report.add("inverted", True, count=len(out))
    report.result["inverses"] = out


# ---------------------------------------------------------------- puiseux

def _puiseux_vars(args):
    params, space = _variables(args, default="x,z")
    if len(space) != 2:
        raise UsageError("puiseux needs exactly two space variables: x (base) and z (main), e.g. --vars x,z")
    return params, space


def cmd_puiseux_expand(args, report: RunReport):
    params, (x, z) = _puiseux_vars(args)
    if params:
        raise UsageError("puiseux expand takes no parameters; use puiseux param")
    F = _poly(args, params, (x, z))
    branches = newton_puiseux(F, args.trunc, args.prec, var=z, xvar=x)
    rep = expansion_report(branches)
    report.add("residuals_certified", True, branches=len(branches))
    report.result.update(rep)
    report.result["ramification"] = sorted({e.d for e in branches})


def cmd_puiseux_pairs(args, report: RunReport):
    params, (x, z) = _puiseux_vars(args)
    F = _poly(args, params, (x, z))
    branches = newton_puiseux(F, args.trunc, args.prec, var=z, xvar=x)
    rows = []
    for e in branches:
        rows.append({"branch": e.branch_id, "d": e.d, "pairs": [list(p) for p in puiseux_pairs(e)]})
    report.add("pairs", True, branches=len(rows))
    report.result["pairs"] = rows
    report.result["contacts"] = expansion_report(branches)["contacts"]


def cmd_puiseux_param(args, report: RunReport):
    params, (x, z) = _puiseux_vars(args)
    if len(params) != 1:
        raise UsageError("puiseux param needs one parameter, e.g. --vars 't;x,z'")
    F = _poly(args, params, (x, z))
    ts = _t_values(args, [Fraction(0), Fraction(1, 10), Fraction(1, 5)])
    bs = puiseux_with_parameter(F, ts, args.trunc, args.prec, tvar=params[0], xvar=x, zvar=z)
    inv = bs.invariant_in_t()
    report.add("invariant_in_t", all(inv.values()), **inv)
    report.result.update(bs.to_dict())


# ---------------------------------------------------------------- triv

def _trivialization(args, report: RunReport):
    params, space, F = _build_system(args)
    if len(params) != 1:
        raise UsageError("triv needs one parameter, e.g. --vars 't;x,z'")
    sys_, change, _ = build_parametric_tower(F, params, space, seed=args.seed)
    t0 = _rat(args.t0)
    kind = "sympow" if args.family == "auto" else args.family
    cfg = TrivConfig(steps=args.steps, prec=args.prec, kind=kind, on_certificate_failure=args.policy,
                     inverse_mode="observed" if args.policy == "record" else "certified")
    Phi = build_trivialization(sys_, (t0,), cfg)
    report.inputs.update(poly=format_poly(F), t0=t0, family=kind, policy=args.policy)
    return F, sys_, Phi


def cmd_triv_build(args, report: RunReport):
    F, sys_, Phi = _trivialization(args, report)
    report.add("equisingular_at_t0", True)
    report.result["map"] = Phi.to_dict()
    if args.point:
        ts = _t_values(args, [Phi.t0[0]])
        vals = []
        for t in ts:
            for p in args.point:
                x = _coords(p)
                vals.append({"t": t, "x": x, "phi": list(eval_phi(Phi, t, x)[1])})
        report.result["values"] = vals


def cmd_triv_check(args, report: RunReport):
    F, sys_, Phi = _trivialization(args, report)
    n = sys_.n
    lo, hi = [-_rat(args.box)] * n, [_rat(args.box)] * n
    grid = make_grid(lo, hi, args.grid)
    ts = _t_values(args, [Fraction(-1, 4), Fraction(-1, 8), Fraction(0), Fraction(1, 8), Fraction(1, 4)])
    report.inputs.update(grid=grid_spec(lo, hi, args.grid), t_values=ts)
    for name, res in (("identities", check_identities(Phi, grid, ts)),
                      ("level_preservation", check_level_preservation(Phi, F, grid, ts)),
                      ("round_trip", check_round_trip(Phi, grid, ts)),
                      ("regularity", check_regularity(Phi, grid, ts))):
        res = dict(res)
        res.pop("$schema", None)
        report.add(name, **res)
    report.result["stats"] = dict(Phi.stats)


# ---------------------------------------------------------------- corpus

def cmd_corpus_list(args, report: RunReport):
    entries = corpus_mod.corpus_registry()
    report.add("registry", len(entries) == 4, count=len(entries))
    report.result["entries"] = [e.to_dict() for e in entries]


def cmd_corpus_run(args, report: RunReport):
    names = args.names.split(",") if args.names else None
    if names:
        known = {e.name for e in corpus_mod.corpus_registry()}
        bad = [nm for nm in names if nm not in known]
        if bad:
            raise UsageError(f"unknown corpus entries {bad}; see 'corpus list'")
    rep = corpus_mod.run_corpus(report.config, names, args.trials)
    report.inputs.update(rep.inputs)
    report.checks.extend(rep.checks)
    report.result.update(rep.result)


COMMANDS = {
    ("tower", "build"): cmd_tower_build, ("tower", "check"): cmd_tower_check,
    ("strat", "build"): cmd_strat_build, ("strat", "classify"): cmd_strat_classify,
    ("interp", "eval"): cmd_interp_eval, ("interp", "cert"): cmd_interp_cert,
    ("interp", "invert"): cmd_interp_invert,
    ("puiseux", "expand"): cmd_puiseux_expand, ("puiseux", "param"): cmd_puiseux_param,
    ("puiseux", "pairs"): cmd_puiseux_pairs,
    ("triv", "build"): cmd_triv_build, ("triv", "check"): cmd_triv_check,
    ("corpus", "list"): cmd_corpus_list, ("corpus", "run"): cmd_corpus_run,
}


class _Parser(argparse.ArgumentParser):
    """Treats "-1,0" and "-1/2" as values, not as options."""

    def __init__(self, *args, **kw):
        super().__init__(*args, **kw)
        self._negative_number_matcher = re.compile(r"^-[\d.][\d./,i+-]*$")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("global")
    g.add_argument("--prec", type=int, default=256, help="working precision in bits")
    g.add_argument("--trunc", type=int, default=20, help="Puiseux truncation M")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--tol", type=float, default=2.0 ** -64)
    g.add_argument("--steps", type=int, default=64, help="continuation steps")
    g.add_argument("--grid", type=int, default=21, help="grid points per axis")
    g.add_argument("--json", metavar="PATH", help="write the report here instead of stdout")
    g.add_argument("--vars", help="'t;x,y,z': parameters before ';'")
    g.add_argument("--order", help="elimination order, first variable eliminated first")
    g.add_argument("--timing", action="store_true", help="include wall time (breaks byte-identity)")
    g.add_argument("--poly")
    g.add_argument("--t", action="append", help="parameter sample (repeatable)")

    p = _Parser(prog="arcwise", description=__doc__.splitlines()[0])
    groups = p.add_subparsers(dest="group", required=True)

    def sub(group, action, **extra):
        return subs[group].add_parser(action, parents=[common], **extra)

    subs = {}
    for name in ("tower", "strat", "interp", "puiseux", "triv", "corpus"):
        subs[name] = groups.add_parser(name).add_subparsers(dest="action", required=True)

    sub("tower", "build")
    sub("tower", "check").add_argument("--tower", help="tower JSON (bare or inside a report)")
    sub("strat", "build")
    sub("strat", "classify").add_argument("--point", action="append", help="coordinates, e.g. 0,1/2")
    for action in ("eval", "cert", "invert"):
        q = sub("interp", action)
        q.add_argument("--a", nargs="+", help="nodes as re,im")
        q.add_argument("--b", nargs="+", help="targets as re,im")
        q.add_argument("--family", choices=("auto", "abs", "sympow"), default="auto")
        if action == "eval":
            q.add_argument("--z", nargs="+")
        if action == "invert":
            q.add_argument("--p", nargs="+")
            q.add_argument("--mode", choices=("certified", "observed"), default="certified")
    for action in ("expand", "param", "pairs"):
        sub("puiseux", action)
    for action in ("build", "check"):
        q = sub("triv", action)
        q.add_argument("--t0", default="0")
        q.add_argument("--family", choices=("auto", "abs", "sympow"), default="auto")
        q.add_argument("--policy", choices=("raise", "record"), default="record",
                       help="on a failed bi-Lipschitz certificate")
        q.add_argument("--box", default="1", help="grid box half-width")
        q.add_argument("--point", action="append")
    sub("corpus", "list")
    q = sub("corpus", "run")
    q.add_argument("--names", help="comma separated entry names")
    q.add_argument("--trials", type=int, default=3, help="random lines per entry for the tracking check")
    return p


def run_command(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    cfg = _config(args)
    report = RunReport(f"{args.group} {args.action}", {}, cfg)
    t_start = time.perf_counter()
    try:
        with mpmath.workprec(args.prec):
            COMMANDS[(args.group, args.action)](args, report)
    except UsageError as exc:
        print(f"arcwise: error: {exc}", file=sys.stderr)
        return 2
    except PolyError as exc:
        report.add("error", False, error_type=type(exc).__name__, message=str(exc))
    if args.timing:
        report.wall_time = time.perf_counter() - t_start
    text = report.to_json()
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(text)
        print(f"{report.command}: {'pass' if report.passed else 'FAIL'} -> {args.json}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    return 0 if report.passed else 1


def main() -> None:
    sys.exit(run_command())
