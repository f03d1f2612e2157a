"""Eigenvalues and spectral measures of symmetric tridiagonal matrices.

The solver isolates every eigenvalue by bisection on Sturm counts and then
polishes it with bracketed Newton steps on the characteristic polynomial.
All shifts of one round go through a compiled kernel that evaluates 32
shifts per pass over the matrix (see ``_kernels``). The per-root masses
come from a twisted factorisation at each eigenvalue.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack

from . import _kernels
from .ensembles import TridiagonalMatrix
from .errors import ParameterError

_EPS = np.finfo(float).eps
# Scaled units: every entry has magnitude < 1 after prescaling.
_NEWTON_TOL = 2e-13
_WIDTH_TOL = 2e-12
_MAX_NEWTON = 200
MERGE_RTOL = 1e-12
# eigenvalues closer than this (scaled) get explicitly orthogonalised vectors
_CLUSTER_GAP = 1e-6


@dataclass(frozen=True)
class PointMeasure:
    """Finite atomic measure with ascending ``locations`` and nonnegative ``masses``."""

    locations: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        loc = np.asarray(self.locations, dtype=float).ravel()
        mass = np.asarray(self.masses, dtype=float).ravel()
        if loc.shape != mass.shape:
            raise ParameterError("locations and masses must have equal length")
        if np.any(mass < 0):
            raise ParameterError("masses must be nonnegative")
        if np.any(np.diff(loc) < 0):
            order = np.argsort(loc, kind="stable")
            loc, mass = loc[order], mass[order]
        object.__setattr__(self, "locations", loc)
        object.__setattr__(self, "masses", mass)

    def __len__(self):
        return self.locations.size

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return list(zip(self.locations.tolist(), self.masses.tolist()))

    def total_mass(self) -> float:
        return float(self.masses.sum())

    def cdf(self, x):
        """Mass of (-inf, x]."""
        c = np.concatenate([[0.0], np.cumsum(self.masses)])
        return c[np.searchsorted(self.locations, x, side="right")]

    def merged(self, atol: float) -> "PointMeasure":
        """Merge runs of atoms whose consecutive gaps are <= atol, summing masses."""
        if len(self) == 0:
            return self
        new_group = np.r_[True, np.diff(self.locations) > atol]
        gid = np.cumsum(new_group) - 1
        masses = np.bincount(gid, weights=self.masses)
        counts = np.bincount(gid)
        locs = np.bincount(gid, weights=self.locations) / counts
        return PointMeasure(locs, masses)


# --- eigensolver ----------------------------------------------------------

def _prescale(T: TridiagonalMatrix) -> int:
    """Exponent k with 2**k * max|entry| in (1/2, 1]; applied with ldexp so subnormals scale exactly."""
    m = T.max_abs_entry()
    if m == 0.0:
        return 0
    _, k = np.frexp(m)
    return -int(k)


def _blocks(d: np.ndarray, e: np.ndarray) -> list[tuple[int, int]]:
    """Half-open row ranges of the unreduced blocks; negligible couplings split."""
    if e.size == 0:
        return [(0, d.size)]
    norm = max(np.abs(d).max(), np.abs(e).max())
    small = ((np.abs(e) <= _EPS * np.sqrt(np.abs(d[:-1]) * np.abs(d[1:])))
             | (np.abs(e) <= _EPS * norm) | (np.abs(e) < 1e-150))
    cuts = np.flatnonzero(small) + 1
    edges = np.r_[0, cuts, d.size]
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:])]


class _Evaluator:
    """Runs the compiled Sturm kernels over arbitrary numbers of shifts."""

    def __init__(self, d, e, workers=1):
        self.d = np.ascontiguousarray(d, dtype=float)
        self.e2 = np.r_[0.0, np.asarray(e, dtype=float) ** 2]
        self.workers = max(1, int(workers))
        self._pool = ThreadPoolExecutor(self.workers) if self.workers > 1 else None

    def close(self):
        if self._pool is not None:
            self._pool.shutdown()

    def _run(self, kernel, xs, n_out):
        m = xs.size
        W = _kernels._W
        padded = -(-m // W) * W
        xp = np.empty(padded)
        xp[:m] = xs
        xp[m:] = xs[-1] if m else 0.0
        outs = [np.empty(padded) for _ in range(n_out)]
        if self._pool is None or padded <= W:
            kernel(self.d, self.e2, xp, *outs)
        else:
            # fixed partition on block boundaries: results do not depend on scheduling
            nblk = padded // W
            bounds = np.linspace(0, nblk, min(self.workers, nblk) + 1).astype(int) * W
            jobs = [(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
            list(self._pool.map(lambda ab: kernel(self.d, self.e2, xp[ab[0]:ab[1]],
                                                  *[o[ab[0]:ab[1]] for o in outs]), jobs))
        return [o[:m] for o in outs]

    def counts(self, xs):
        return self._run(_kernels.sturm_counts, xs, 1)[0]

    def newton(self, xs):
        return self._run(_kernels.sturm_newton, xs, 2)


def _block_eigenvalues(d: np.ndarray, e: np.ndarray, workers: int = 1) -> np.ndarray:
    """Eigenvalues of one unreduced block with entries of magnitude <= 1."""
    m = d.size
    if m == 1:
        return d.copy()
    if m == 2:
        # closed form avoids a kernel round trip
        mean = 0.5 * (d[0] + d[1])
        rad = np.hypot(0.5 * (d[0] - d[1]), e[0])
        return np.array([mean - rad, mean + rad])

    ev = _Evaluator(d, e, workers)
    try:
        off = np.zeros(m)
        off[:-1] += np.abs(e)
        off[1:] += np.abs(e)
        lo = float(np.min(d - off))
        hi = float(np.max(d + off))
        pad = 4 * _EPS * max(1.0, abs(lo), abs(hi)) + 1e-14
        lo -= pad
        hi += pad

        out = np.empty(m)
        # interval tree: (L, H, count(L), count(H))
        L = np.array([lo])
        H = np.array([hi])
        CL = np.array([0.0])
        CH = np.array([float(m)])
        iso_L, iso_H, iso_k = [], [], []
        while L.size:
            width = H - L
            multi = CH - CL > 1
            one = ~multi
            if np.any(one):
                iso_L.append(L[one])
                iso_H.append(H[one])
                iso_k.append(CL[one])
            tight = multi & (width <= _WIDTH_TOL)
            for l_, h_, a_, b_ in zip(L[tight], H[tight], CL[tight], CH[tight]):
                out[int(a_):int(b_)] = 0.5 * (l_ + h_)
            act = multi & ~tight
            L, H, CL, CH = L[act], H[act], CL[act], CH[act]
            if not L.size:
                break
            mid = 0.5 * (L + H)
            c = np.floor(ev.counts(mid))
            c = np.clip(c, CL, CH)
            left = c > CL
            right = CH > c
            L = np.r_[L[left], mid[right]]
            H = np.r_[mid[left], H[right]]
            CL, CH = np.r_[CL[left], c[right]], np.r_[c[left], CH[right]]

        if iso_L:
            L = np.concatenate(iso_L)
            H = np.concatenate(iso_H)
            K = np.concatenate(iso_k).astype(np.int64)
            out[K] = _polish(ev, L, H, K.astype(float))
    finally:
        ev.close()
    return out


def _polish(ev: _Evaluator, L, H, K) -> np.ndarray:
    """Bracketed Newton on isolated eigenvalues.

    The eigenvalue with index K[i] lies in the half-open bracket [L[i], H[i]).
    """
    L = L.copy()
    H = H.copy()
    res = np.empty(L.size)
    x = 0.5 * (L + H)
    prev = np.full(L.size, np.inf)
    idx = np.arange(L.size)
    for _ in range(_MAX_NEWTON):
        if not idx.size:
            break
        cnt, step = ev.newton(x)
        hit = cnt - K == 0.5
        below = cnt >= K + 1  # eigenvalue < x
        H = np.where(below, x, H)
        L = np.where(~below & ~hit, x, L)
        y = x - step
        inside = (y >= L) & (y < H)
        # near the root the count and the Newton step may disagree by rounding
        near = (np.abs(step) <= _NEWTON_TOL) & (y >= L - _NEWTON_TOL) & (y <= H + _NEWTON_TOL)
        # quadratic phase: the next correction is about (|step| / prev**2) * step**2
        with np.errstate(over="ignore", invalid="ignore"):
            predicted = np.abs(step) ** 3 / (prev * prev)
        near |= inside & np.isfinite(prev) & (np.abs(step) <= 1e-6) & (predicted <= 0.1 * _NEWTON_TOL)
        conv = hit | near | (H - L <= _WIDTH_TOL)
        res[idx[conv]] = np.where(hit[conv], x[conv],
                                  np.where(near[conv], np.clip(y[conv], L[conv], H[conv]),
                                           0.5 * (L[conv] + H[conv])))
        take = inside & (np.abs(step) <= 0.5 * prev)
        nxt = np.where(take, y, 0.5 * (L + H))
        prev = np.where(take, np.abs(step), np.inf)
        keep = ~conv
        idx, L, H, K, x, prev = idx[keep], L[keep], H[keep], K[keep], nxt[keep], prev[keep]
    if idx.size:
        res[idx] = 0.5 * (L + H)
    return res


def _cluster_root_masses(d, e, lam, o) -> np.ndarray:
    """Root masses for a cluster of close eigenvalues of one unreduced block.

    Inverse iteration at each eigenvalue with modified Gram-Schmidt against the
    cluster vectors found so far, so that the vectors stay orthogonal even when
    the eigenvalues agree to working precision.
    """
    m = d.size
    k = lam.size
    rng = np.random.default_rng(12345)  # fixed start vectors keep results reproducible
    norm = max(np.abs(d).max(), np.abs(e).max(initial=0.0), 1e-300)
    Q = np.zeros((k, m))
    for j in range(k):
        shift = lam[j]
        for attempt in range(4):
            dl, dd, du, du2, ipiv, info = lapack.dgttrf(e, d - shift, e)
            if info == 0:
                break
            shift += (attempt + 1) * 4 * _EPS * norm
        x = rng.standard_normal(m)
        for _ in range(5):
            x, info = lapack.dgttrs(dl, dd, du, du2, ipiv, x)
            if info != 0 or not np.all(np.isfinite(x)):
                raise FloatingPointError("inverse iteration broke down")
            for i in range(j):
                x -= (Q[i] @ x) * Q[i]
            x /= np.linalg.norm(x)
        Q[j] = x
    return Q[:, o] ** 2


def _root_masses_2x2(d, e, o) -> np.ndarray:
    """Closed form for [[a, b], [b, c]]; each mass is taken from its cancellation-free expression."""
    t = 0.5 * (d[0] - d[1])
    r = np.hypot(t, e[0])
    big = 0.5 * (1.0 + abs(t) / r)
    small = e[0] * e[0] / (2.0 * r * (r + abs(t)))
    # row 0 leans towards the upper eigenvector when a >= c
    lower0, upper0 = (small, big) if t >= 0 else (big, small)
    return np.array([lower0, upper0]) if o == 0 else np.array([upper0, lower0])


def _root_masses(d, e, lam, o) -> np.ndarray:
    """|e_m(o)|^2 for every eigenvalue of one unreduced block (scaled units)."""
    if d.size == 2:
        return _root_masses_2x2(d, e, o)
    w = np.zeros(lam.size)
    _kernels.twisted_root_weights(np.ascontiguousarray(d), np.ascontiguousarray(e), lam, o, w)
    new = np.r_[True, np.diff(lam) > _CLUSTER_GAP]
    starts = np.flatnonzero(new)
    ends = np.r_[starts[1:], lam.size]
    for a, b in zip(starts, ends):
        if b - a > 1:
            w[a:b] = _cluster_root_masses(d, e, lam[a:b], o)
    return w


def _merge_tol(d: np.ndarray, e: np.ndarray, k: int) -> float:
    """MERGE_RTOL * ||T||_inf from the scaled entries, so it cannot overflow."""
    rows = np.abs(d).copy()
    rows[:-1] += np.abs(e)
    rows[1:] += np.abs(e)
    return max(float(np.ldexp(MERGE_RTOL * rows.max(), -k)), np.finfo(float).tiny)


def _scaled_blocks(T: TridiagonalMatrix):
    k = _prescale(T)
    d = np.ldexp(T.diag, k)
    e = np.ldexp(T.offdiag, k)
    return k, d, e, _blocks(d, e)


def eigenvalues(T: TridiagonalMatrix, workers: int = 1) -> np.ndarray:
    """All eigenvalues of T in ascending order."""
    s, d, e, blocks = _scaled_blocks(T)
    parts = [_block_eigenvalues(d[a:b], e[a:b - 1], workers) for a, b in blocks]
    return np.ldexp(np.sort(np.concatenate(parts)), -s)


def spectral_measure_at_root(T: TridiagonalMatrix, o: int) -> PointMeasure:
    """Atoms (lambda_m, |e_m(o)|^2) over the full spectrum, near-degenerate atoms merged."""
    if not (isinstance(o, (int, np.integer)) and 0 <= o < T.n):
        raise ParameterError(f"root {o!r} outside 0..{T.n - 1}")
    s, d, e, blocks = _scaled_blocks(T)
    locs, masses = [], []
    for a, b in blocks:
        lam = _block_eigenvalues(d[a:b], e[a:b - 1])
        w = np.zeros(lam.size)
        if a <= o < b:
            if b - a == 1:
                w[0] = 1.0
            else:
                w = _root_masses(d[a:b], e[a:b - 1], lam, o - a)
        locs.append(lam)
        masses.append(w)
    mu = PointMeasure(np.ldexp(np.concatenate(locs), -s), np.concatenate(masses))
    return mu.merged(_merge_tol(d, e, s))


def expected_spectral_measure(T: TridiagonalMatrix, workers: int = 1) -> PointMeasure:
    """Uniform root average: mass 1/n at each eigenvalue."""
    k, d, e, blocks = _scaled_blocks(T)
    parts = [_block_eigenvalues(d[a:b], e[a:b - 1], workers) for a, b in blocks]
    lam = np.ldexp(np.sort(np.concatenate(parts)), -k)
    mu = PointMeasure(lam, np.full(lam.size, 1.0 / lam.size))
    return mu.merged(_merge_tol(d, e, k))
