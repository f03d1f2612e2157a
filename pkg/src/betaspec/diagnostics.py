"""Empirical versus limiting laws: KS distance, histograms, sweeps over n, ball statistics."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .ensembles import (EnsembleKind, EnsembleParams, hermite_diag_entries, hermite_offdiag_entries,
                        laguerre_diag_entries, laguerre_offdiag_entries, sample_matrix)
from .errors import ParameterError
from .limits import DEFAULT_QUAD_TOL, ContinuousLaw, Uniform, limit_law
from .sampling import RngStream
from .spectral import eigenvalues


# --- KS and histograms ----------------------------------------------------

def ks_statistic(samples, reference: ContinuousLaw | Callable, quad_tol: float = DEFAULT_QUAD_TOL) -> float:
    """sup |F_emp - F| over the sample points, using both one-sided limits of F_emp."""
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    m = x.size
    if m == 0:
        raise ParameterError("KS statistic of an empty sample")
    if isinstance(reference, ContinuousLaw):
        F = reference.cdf(x, quad_tol)
    else:
        F = np.asarray(reference(x), dtype=float)
    i = np.arange(1, m + 1)
    return float(max(np.max(i / m - F), np.max(F - (i - 1) / m)))


@dataclass(frozen=True)
class Histogram:
    bin_edges: np.ndarray
    counts: np.ndarray
    density: np.ndarray
    total: int

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.bin_edges)

    def rows(self):
        for a, b, c, d in zip(self.bin_edges[:-1], self.bin_edges[1:], self.counts, self.density):
            yield float(a), float(b), int(c), float(d)


def histogram(samples, edges) -> Histogram:
    """Counts per bin (last bin closed) and count / (total * width); total includes out-of-range samples."""
    edges = np.asarray(edges, dtype=float).ravel()
    if edges.size < 2:
        raise ParameterError("need at least two bin edges")
    if np.any(np.diff(edges) <= 0):
        raise ParameterError("bin edges must be strictly increasing")
    x = np.asarray(samples, dtype=float).ravel()
    counts, _ = np.histogram(x, bins=edges)
    total = x.size
    dens = counts / (max(total, 1) * np.diff(edges))
    return Histogram(edges, counts.astype(np.int64), dens, total)


def parse_grid(spec: str) -> np.ndarray:
    """``lo:hi:count`` -> ``count`` evenly spaced points including both ends."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise ParameterError(f"grid must look like lo:hi:count, got {spec!r}")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ParameterError(f"bad grid {spec!r}: {exc}") from None
    if count < 1 or not (np.isfinite(lo) and np.isfinite(hi)) or (count > 1 and hi <= lo):
        raise ParameterError(f"bad grid {spec!r}")
    return np.linspace(lo, hi, count)


def empirical_moments(samples, kmax: int) -> np.ndarray:
    x = np.asarray(samples, dtype=float)
    return np.array([np.mean(x ** k) for k in range(kmax + 1)])


# --- convergence sweeps ---------------------------------------------------

@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    trials: int
    ks_mean: float
    ks_std: float


@dataclass(frozen=True)
class ConvergenceReport:
    rows: tuple[ConvergenceRow, ...]
    ks_values: tuple[tuple[float, ...], ...] = field(default=(), repr=False)

    def __post_init__(self):
        ns = [r.n for r in self.rows]
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ParameterError("sizes must be strictly increasing")

    @property
    def ks_mean(self) -> np.ndarray:
        return np.array([r.ks_mean for r in self.rows])

    def strictly_decreasing(self) -> bool:
        m = self.ks_mean
        return bool(np.all(np.diff(m) < 0))


def trial_stream(stream: RngStream, n: int, trial: int) -> RngStream:
    """Substream for one (size, trial) cell; independent of which other cells run."""
    return stream.substream(n).substream(trial)


def ks_of_trial(params: EnsembleParams, n: int, stream: RngStream, law: ContinuousLaw | None = None) -> float:
    T = sample_matrix(params, n, stream)
    return ks_statistic(eigenvalues(T), law or limit_law(params))


def convergence_sweep(params: EnsembleParams, sizes: Sequence[int], trials: int, stream: RngStream,
                      workers: int = 1) -> ConvergenceReport:
    """Mean and sample standard deviation of the KS distance to the limit law, per size."""
    if int(trials) != trials or trials < 1:
        raise ParameterError("trials must be a positive integer")
    sizes = [int(n) for n in sizes]
    if any(n < 2 for n in sizes):
        raise ParameterError("sizes must be >= 2")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ParameterError("sizes must be strictly increasing")
    law = limit_law(params)
    cells = [(n, t) for n in sizes for t in range(trials)]

    def run(cell):
        n, t = cell
        return ks_of_trial(params, n, trial_stream(stream, n, t), law)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            values = list(pool.map(run, cells))  # map keeps cell order
    else:
        values = [run(c) for c in cells]
    rows, per_size = [], []
    for i, n in enumerate(sizes):
        ks = np.array(values[i * trials:(i + 1) * trials])
        std = float(ks.std(ddof=1)) if trials > 1 else 0.0
        rows.append(ConvergenceRow(n, int(trials), float(ks.mean()), std))
        per_size.append(tuple(ks.tolist()))
    return ConvergenceReport(tuple(rows), tuple(per_size))


# --- local (ball) statistics ---------------------------------------------

@dataclass(frozen=True)
class BallStatistics:
    """Weights of r-balls around uniformly drawn roots of one size-n ensemble.

    ``loops`` has shape (draws, 2r+1) and ``edges`` shape (draws, 2r), centred on
    the root; positions that fall outside the matrix hold NaN. ``root_edge`` is
    the edge to the right of the root, or to the left for the last vertex.
    """

    params: EnsembleParams
    n: int
    radius: int
    roots: np.ndarray
    loops: np.ndarray
    edges: np.ndarray
    root_edge: np.ndarray

    @property
    def root_loop(self) -> np.ndarray:
        return self.loops[:, self.radius]

    @property
    def u(self) -> np.ndarray:
        """Relative root position (root + 1) / n."""
        return (self.roots + 1.0) / self.n

    def scaled_root_edge(self) -> np.ndarray:
        """root edge**2 / beta; tends to Uniform[0, 1] for the Hermite ensemble."""
        return self.root_edge ** 2 / self.params.beta

    def edge_spread(self) -> np.ndarray:
        """Largest minus smallest edge weight inside each ball."""
        return np.nanmax(self.edges, axis=1) - np.nanmin(self.edges, axis=1)

    def loop_reference(self) -> ContinuousLaw:
        """Law of beta (gamma + 1 - 2U) with U uniform (Laguerre loop weights)."""
        b, g = self.params.beta, self.params.gamma
        return Uniform(b * (g - 1.0), b * (g + 1.0))

    def root_edge_limit_cdf(self, w):
        """CDF of the root edge weight in the local limit, with u uniform on [0, 1].

        Hermite: sqrt(beta u). Laguerre: beta sqrt((gamma - u)(1 - u)), which is
        decreasing in u, so P(w <= t) = 1 - u*(t) with u* the root in [0, 1].
        """
        w = np.asarray(w, dtype=float)
        b = self.params.beta
        if self.params.kind is EnsembleKind.HERMITE:
            return np.clip(w * w / b, 0.0, 1.0)
        g = self.params.gamma
        disc = (g - 1.0) ** 2 + 4.0 * (w / b) ** 2
        u_star = 0.5 * ((g + 1.0) - np.sqrt(disc))
        return np.clip(1.0 - u_star, 0.0, 1.0)

    def ks_root_edge(self) -> float:
        """KS distance of the root edge weights to their local-limit law."""
        if self.params.kind is EnsembleKind.HERMITE:
            return ks_statistic(self.scaled_root_edge(), Uniform(0.0, 1.0))
        return ks_statistic(self.root_edge, self.root_edge_limit_cdf)

    def ks_root_loop(self) -> float:
        if self.params.kind is not EnsembleKind.LAGUERRE:
            raise ParameterError("the loop-weight law is only nontrivial for Laguerre")
        return ks_statistic(self.root_loop, self.loop_reference())


def ball_statistics(params: EnsembleParams, n: int, r: int, draws: int, stream: RngStream) -> BallStatistics:
    """Sample only the O(r) entries around each uniformly chosen root.

    Entries of different draws come from disjoint rows of the same vectorised
    draw, so they are independent; each ball is distributed exactly as the
    corresponding ball of a full matrix.
    """
    n, r, draws = int(n), int(r), int(draws)
    if r < 0 or draws < 1 or n < 2:
        raise ParameterError("need r >= 0, draws >= 1, n >= 2")
    if r >= n / 2:
        raise ParameterError(f"radius {r} is not small against n={n}")
    roots = stream.substream(0).integers(0, n, size=draws)
    offs = np.arange(-r, r + 1)
    verts = roots[:, None] + offs[None, :]
    vmask = (verts >= 0) & (verts < n)
    # edge k joins verts[:, k] and verts[:, k+1]; offdiag index = left vertex
    eleft = verts[:, :-1]
    emask = (eleft >= 0) & (eleft < n - 1)

    loops = np.full(verts.shape, np.nan)
    edges = np.full(eleft.shape, np.nan)
    s_loop, s_edge = stream.substream(1), stream.substream(2)
    b = params.beta
    if params.kind is EnsembleKind.HERMITE:
        loops[vmask] = hermite_diag_entries(n, b, verts[vmask] + 1, s_loop)
        edges[emask] = hermite_offdiag_entries(n, b, eleft[emask] + 1, s_edge)
    else:
        g = params.gamma
        loops[vmask] = laguerre_diag_entries(n, b, g, verts[vmask], s_loop)
        edges[emask] = laguerre_offdiag_entries(n, b, g, eleft[emask] + 1, s_edge)
    right = edges[:, r] if r > 0 else None
    if r == 0:
        # no edges in a 0-ball: draw the root edge on its own
        lab = np.where(roots < n - 1, roots, roots - 1) + 1
        if params.kind is EnsembleKind.HERMITE:
            root_edge = hermite_offdiag_entries(n, b, lab, stream.substream(3))
        else:
            root_edge = laguerre_offdiag_entries(n, b, params.gamma, lab, stream.substream(3))
    else:
        root_edge = np.where(roots < n - 1, right, edges[:, r - 1])
    return BallStatistics(params, n, r, roots, loops, edges, root_edge)
