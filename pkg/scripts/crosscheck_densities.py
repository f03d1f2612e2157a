"""Averaging the conditional laws over u against the closed-form limit densities.

Prints the largest deviation over interior grid points for each parameter set.

    python3 scripts/crosscheck_densities.py --points 100
"""
import argparse
from dataclasses import dataclass

import numpy as np

from betaspec.ensembles import EnsembleParams
from betaspec.limits import expected_density_numeric, limit_law


@dataclass
class CrosscheckConfig:
    hermite_betas: tuple[float, ...] = (0.5, 1.0, 2.0, 4.0)
    laguerre_betas: tuple[float, ...] = (1.0, 2.0)
    gammas: tuple[float, ...] = (1.0, 2.0, 4.0)
    points: int = 100
    quad_tol: float = 1e-11


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=CrosscheckConfig.points)
    ap.add_argument("--quad-tol", type=float, default=CrosscheckConfig.quad_tol)
    a = ap.parse_args(argv)
    cfg = CrosscheckConfig(points=a.points, quad_tol=a.quad_tol)
    cases = [EnsembleParams.hermite(b) for b in cfg.hermite_betas]
    cases += [EnsembleParams.laguerre(b, g) for b in cfg.laguerre_betas for g in cfg.gammas]
    print("ensemble,beta,gamma,max_abs_dev")
    for p in cases:
        law = limit_law(p)
        xs = law.lo + (law.hi - law.lo) * np.arange(1, cfg.points + 1) / (cfg.points + 1)
        dev = max(abs(expected_density_numeric(p, x, cfg.quad_tol) - law.density(x)) for x in xs)
        g = "" if p.gamma is None else f"{p.gamma:g}"
        print(f"{p.kind.value},{p.beta:g},{g},{dev:.2e}")


if __name__ == "__main__":
    main()
