"""Wall time and accuracy of the tridiagonal eigensolver against LAPACK.

LAPACK's dstev is used as the reference for sizes where it is affordable;
above that only the trace identities are checked.

    python3 scripts/eigensolver_benchmark.py --sizes 1000,10000,100000
"""
import argparse
import time
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from betaspec.ensembles import EnsembleParams, sample_matrix
from betaspec.sampling import RngStream
from betaspec.spectral import eigenvalues


@dataclass
class BenchConfig:
    sizes: tuple[int, ...] = (1000, 10**4, 10**5)
    beta: float = 1.0
    seed: int = 3
    lapack_max: int = 20000


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default=",".join(map(str, BenchConfig.sizes)))
    ap.add_argument("--beta", type=float, default=BenchConfig.beta)
    ap.add_argument("--seed", type=int, default=BenchConfig.seed)
    ap.add_argument("--lapack-max", type=int, default=BenchConfig.lapack_max)
    a = ap.parse_args(argv)
    cfg = BenchConfig(tuple(int(s) for s in a.sizes.split(",")), a.beta, a.seed, a.lapack_max)
    params = EnsembleParams.hermite(cfg.beta)
    eigenvalues(sample_matrix(params, 16, RngStream(0)))  # jit warm-up
    print("n,seconds,max_err_vs_lapack,trace1_err,trace2_err")
    for n in cfg.sizes:
        T = sample_matrix(params, n, RngStream(cfg.seed).substream(n))
        t0 = time.perf_counter()
        lam = eigenvalues(T)
        dt = time.perf_counter() - t0
        err = ""
        if n <= cfg.lapack_max:
            ref = eigh_tridiagonal(T.diag, T.offdiag, eigvals_only=True)
            err = f"{np.max(np.abs(lam - ref)):.2e}"
        tr1 = abs(lam.sum() - T.diag.sum())
        tr2 = abs((lam ** 2).sum() - (T.diag ** 2).sum() - 2 * (T.offdiag ** 2).sum())
        print(f"{n},{dt:.2f},{err},{tr1:.2e},{tr2:.2e}")


if __name__ == "__main__":
    main()
