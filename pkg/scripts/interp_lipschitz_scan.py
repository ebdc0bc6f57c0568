"""Worst sampled Lipschitz quotient of psi against K gamma + 1, per family and N.

Prints one row per (family, N): gamma range, worst q / L and the median of q / L,
which shows how loose the certified bound is in practice.
"""
import argparse

import mpmath
import numpy as np

from arcwise.interp import PsiEval, lipschitz_certificate, make_family, psi_np


def scan(kind, N, configs, pairs, rng):
    ratios, gammas = [], []
    for _ in range(configs):
        a = rng.uniform(-1, 1, N) + 1j * rng.uniform(-1, 1, N)
        b = a + 10 ** rng.uniform(-3, 0) * (rng.normal(size=N) + 1j * rng.normal(size=N))
        ev = PsiEval.build(list(a), list(b), make_family(kind, N))
        cert = lipschitz_certificate(ev)
        L = float(min(cert.L_forward, mpmath.mpf(1e300)))
        z1 = rng.uniform(-2, 2, pairs) + 1j * rng.uniform(-2, 2, pairs)
        z2 = z1 + 1e-3 * (rng.normal(size=pairs) + 1j * rng.normal(size=pairs))
        q = np.abs(psi_np(z1, a, b, kind) - psi_np(z2, a, b, kind)) / np.abs(z1 - z2)
        ratios.append(q / L)
        gammas.append(float(cert.gamma))
    r = np.concatenate(ratios)
    return min(gammas), max(gammas), r.max(), np.median(r)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--configs", type=int, default=20)
    ap.add_argument("--pairs", type=int, default=2000)
    ap.add_argument("--maxN", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    print(f"{'family':7s} {'N':>2s} {'gamma_min':>10s} {'gamma_max':>10s} {'max q/L':>10s} {'med q/L':>10s}")
    for kind in ("abs", "sympow"):
        for N in range(1, args.maxN + 1):
            gmin, gmax, worst, med = scan(kind, N, args.configs, args.pairs, rng)
            print(f"{kind:7s} {N:2d} {gmin:10.3g} {gmax:10.3g} {worst:10.3g} {med:10.3g}")


if __name__ == "__main__":
    main()
