"""The four equisingularity test families and the corpus pipeline.

Each entry records which of the conditions (1)-(4) the literature asserts for
it. Only positive, machine-checkable assertions are verified here: condition
(1) through the stated projection chain, and equimultiplicity along the
parameter axis. Non-existence claims ("(3) fails") stay documentation.

    (1) Zariski equisingularity for the given chain (tower with F_0(t) != 0)
    (2) existence of a regular arc-wise analytic trivialization
    (3) transversality of the projections
    (4) existence of a derivation complete system
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .numeric import compile_upoly
from .polycore import GaussianRational, MPoly, format_poly, multiplicity_at, parse_polynomial
from .report import RunConfig, RunReport
from .tower import build_parametric_tower, check_equisingular
from .tracking import CoeffPath, TrackingError, same_pairing, track_roots

T_SAMPLES = (Fraction(0), Fraction(1, 10), Fraction(-1, 10), Fraction(1, 2), Fraction(-1, 2))


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    polynomial: str
    vars: str  # "t;x,y,z"
    order: tuple[str, ...]  # elimination order, first = distinguished variable of the top level
    asserted: dict  # condition -> "holds" / "fails"
    citation: str

    @property
    def param_vars(self) -> tuple[str, ...]:
        return tuple(v for v in self.vars.split(";")[0].split(",") if v)

    @property
    def space_vars(self) -> tuple[str, ...]:
        """x_1..x_n: the reversed elimination order."""
        return tuple(reversed(self.order))

    @property
    def chain(self) -> str:
        steps = [self.order[k:] for k in range(len(self.order))]
        return " -> ".join("(" + ",".join(sorted(s)) + ")" if len(s) > 1 else s[0] for s in steps)

    def poly(self) -> MPoly:
        return parse_polynomial(self.polynomial, self.param_vars + self.space_vars)

    def to_dict(self) -> dict:
        return {"name": self.name, "polynomial": self.polynomial, "vars": self.vars,
                "order": list(self.order), "chain": self.chain, "asserted": dict(self.asserted),
                "citation": self.citation}


def corpus_registry() -> list[CorpusEntry]:
    return [
        CorpusEntry("briancon-speder", "z^5+t*y^6*z+y^7*x+x^15", "t;x,y,z", ("x", "y", "z"),
                    {"(1)": "holds", "(2)": "fails", "(4)": "fails"},
                    "Briancon-Speder family; equisingular for the projections (x,y,z) -> (y,z) -> z"),
        CorpusEntry("derivation-complete-nontransverse", "z^3+t*x^4*z+y^6+x^6", "t;x,y,z", ("y", "z", "x"),
                    {"(1)": "holds", "(3)": "fails", "(4)": "holds"},
                    "second displayed family; equisingular for (x,y,z) -> (x,z) -> x"),
        CorpusEntry("regular-nontransverse", "z^16+t*y*z^3*x^7+y^6*z^4+y^10+x^10", "t;x,y,z", ("z", "y", "x"),
                    {"(2)": "holds", "(3)": "fails"},
                    "third displayed family; regular trivialization without transversality"),
        CorpusEntry("not-zariski", "x^9+y^12+z^15+t*x^3*y^4*z^5", "t;x,y,z", ("x", "y", "z"),
                    {"(1)": "fails", "(4)": "holds"},
                    "fourth displayed family; derivation complete but not Zariski equisingular"),
    ]


def entry_by_name(name: str) -> CorpusEntry:
    for e in corpus_registry():
        if e.name == name:
            return e
    raise KeyError(name)


# ---------------------------------------------------------------- checks

def equimultiplicity(entry: CorpusEntry, t_samples=T_SAMPLES) -> dict:
    """mult at (t, 0) of F, for each sample t."""
    F = entry.poly()
    rows = []
    for t in t_samples:
        point = [t] + [0] * len(entry.space_vars)
        rows.append({"t": str(t), "mult": multiplicity_at(F, point)})
    vals = sorted({r["mult"] for r in rows})
    return {"samples": rows, "values": vals, "pass": len(vals) == 1}


def condition_one(entry: CorpusEntry, t_samples=T_SAMPLES, seed: int = 0) -> dict:
    sys, change, _ = build_parametric_tower(entry.poly(), entry.param_vars, entry.space_vars, seed=seed)
    per_t = {str(t): check_equisingular(sys, (t,)) for t in t_samples}
    return {"degrees": list(sys.degrees), "coordinate_change_identity": change.is_identity(),
            "exceptional_locus_terms": [len(P) for P in sys.exceptional_locus],
            "equisingular": per_t, "pass": all(per_t.values())}


def _gauss(rng, scale: Fraction, den: int = 1024) -> GaussianRational:
    re, im = rng.integers(-den, den + 1, size=2)
    return GaussianRational(Fraction(int(re), den) * scale, Fraction(int(im), den) * scale)


def random_line(entry: CorpusEntry, rng, radius: Fraction = Fraction(1, 2)) -> dict:
    """Fixed real t in [-1/2, 1/2], complex segment in the base of the top projection."""
    t = Fraction(int(rng.integers(-512, 513)), 1024)
    base = entry.space_vars[:-1]
    p0 = [_gauss(rng, radius) for _ in base]
    p1 = [_gauss(rng, radius) for _ in base]
    return {"t": t, "p0": p0, "p1": p1}


def tracking_refinement(entry: CorpusEntry, trials: int, rng, steps: int = 64, prec: int = 256) -> dict:
    """Pairings of the top-level roots along random lines, at steps and 2 * steps."""
    F = entry.poly()
    main = entry.space_vars[-1]
    others = entry.param_vars + entry.space_vars[:-1]
    up = compile_upoly(F, main, others)
    rows = []
    for _ in range(trials):
        line = random_line(entry, rng)
        a = [line["t"]] + line["p0"]
        b = [line["t"]] + line["p1"]
        path = CoeffPath.segment(up, a, b)
        try:
            coarse = track_roots(path, steps=steps, prec=prec)
            fine = track_roots(path, steps=2 * steps, prec=prec, start=coarse.start)
            ok = same_pairing(coarse, fine)
            err = None
        except TrackingError as exc:
            ok, err = False, str(exc)
        rows.append({"t": line["t"], "p0": line["p0"], "p1": line["p1"], "same_pairing": ok, "error": err})
    bad = sum(1 for r in rows if not r["same_pairing"])
    return {"trials": trials, "violations": bad, "lines": rows, "pass": bad == 0}


def run_corpus(config: RunConfig | None = None, names=None, tracking_trials: int = 3) -> RunReport:
    config = config or RunConfig()
    rng = np.random.default_rng(config.seed)
    entries = [e for e in corpus_registry() if names is None or e.name in names]
    report = RunReport("corpus run", {"entries": [e.name for e in entries],
                                      "t_samples": [str(t) for t in T_SAMPLES],
                                      "tracking_trials": tracking_trials}, config)
    for e in entries:
        F = e.poly()
        report.add(f"{e.name}:grammar", parse_polynomial(format_poly(F), F.variables) == F,
                   printed=format_poly(F))
        report.add(f"{e.name}:equimultiplicity", **equimultiplicity(e))
        for cond, claim in sorted(e.asserted.items()):
            if cond == "(1)" and claim == "holds":
                report.add(f"{e.name}:condition(1)", **condition_one(e, seed=config.seed), chain=e.chain)
            else:
                report.add(f"{e.name}:condition{cond}", None, asserted=claim, status="documented, not verified")
        report.add(f"{e.name}:tracking", **tracking_refinement(e, tracking_trials, rng, config.steps, config.prec))
    report.result = {"registry": [e.to_dict() for e in entries]}
    return report
