"""Seeded random streams and normal / chi / chi-square variates.

Every stream is a Philox (counter-based) generator keyed by
``(seed, stream_index, *path)`` through :class:`numpy.random.SeedSequence`,
so a substream can be rebuilt anywhere without replaying its siblings.

Chi and chi-square draws with real, non-integer degrees of freedom go
through a Marsaglia-Tsang gamma sampler: ``chi2(k) = 2 * Gamma(k/2)`` and
``chi(k) = sqrt(chi2(k))``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError

_SEED_MAX = 2**64 - 1


@dataclass
class RngStream:
    """Deterministic random stream identified by ``(seed, stream_index)``.

    ``path`` holds further nested substream ids created by :meth:`substream`.
    A stream carries mutable generator state and must not be shared between
    concurrent tasks; derive one substream per task instead.
    """

    seed: int
    stream_index: int = 0
    path: tuple[int, ...] = ()
    _gen: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.seed, (int, np.integer)) or not 0 <= self.seed <= _SEED_MAX:
            raise ParameterError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if self.stream_index < 0 or any(p < 0 for p in self.path):
            raise ParameterError("stream indices must be nonnegative")
        self.seed = int(self.seed)
        self.stream_index = int(self.stream_index)
        self.path = tuple(int(p) for p in self.path)
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_index, *self.path))
        self._gen = np.random.Generator(np.random.Philox(ss))

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def substream(self, index: int) -> "RngStream":
        """Independent child stream; depends only on the ids, not on how far this one has advanced."""
        return RngStream(self.seed, self.stream_index, self.path + (int(index),))

    def uniform(self, size=None):
        return self._gen.random(size)

    def standard_normal(self, size=None):
        return self._gen.standard_normal(size)

    def integers(self, low: int, high: int, size=None):
        """Uniform integers on ``[low, high)``."""
        return self._gen.integers(low, high, size=size)


def _check_dof(k) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    if not np.all(np.isfinite(k)) or np.any(k <= 0):
        raise ParameterError("degrees of freedom must be finite and > 0")
    return k


def sample_normal(stream: RngStream, mean: float = 0.0, std_dev: float = 1.0, size=None):
    """Draw from Normal(mean, std_dev**2)."""
    if not np.isfinite(mean):
        raise ParameterError("mean must be finite")
    if not np.isfinite(std_dev) or std_dev <= 0:
        raise ParameterError(f"std_dev must be finite and > 0, got {std_dev!r}")
    z = stream.standard_normal(size)
    return mean + std_dev * z


def standard_gamma(stream: RngStream, shape, size=None):
    """Gamma(shape, scale=1) variates by Marsaglia and Tsang's squeeze method.

    ``shape`` may be an array (broadcast against ``size``). Shapes below one
    are boosted: ``G(a) = G(a + 1) * U**(1/a)``.
    """
    a = np.asarray(shape, dtype=float)
    if not np.all(np.isfinite(a)) or np.any(a <= 0):
        raise ParameterError("gamma shape must be finite and > 0")
    if size is None:
        out_shape = a.shape
    else:
        out_shape = np.broadcast_shapes(a.shape, tuple(np.atleast_1d(size)))
    a = np.broadcast_to(a, out_shape).ravel()
    m = a.size
    boost = a < 1.0
    aa = np.where(boost, a + 1.0, a)
    d = aa - 1.0 / 3.0
    c = 1.0 / np.sqrt(9.0 * d)

    out = np.empty(m)
    todo = np.arange(m)
    while todo.size:
        x = stream.standard_normal(todo.size)
        u = stream.uniform(todo.size)
        cx = c[todo] * x
        v = (1.0 + cx) ** 3
        ok = v > 0
        dt = d[todo]
        x2 = x * x
        with np.errstate(divide="ignore", invalid="ignore"):
            logv = np.log(np.where(ok, v, 1.0))
            accept = ok & ((u < 1.0 - 0.0331 * x2 * x2)
                           | (np.log(u) < 0.5 * x2 + dt * (1.0 - v + logv)))
        out[todo[accept]] = dt[accept] * v[accept]
        todo = todo[~accept]

    if np.any(boost):
        idx = np.flatnonzero(boost)
        u = stream.uniform(idx.size)
        # log-space keeps tiny shapes from underflowing to exactly 0 too often
        out[idx] = np.exp(np.log(out[idx]) + np.log(u) / a[idx])

    out = out.reshape(out_shape)
    return float(out) if out.ndim == 0 else out


def sample_chi_square(stream: RngStream, k, size=None):
    """Chi-square with ``k > 0`` (real) degrees of freedom."""
    k = _check_dof(k)
    return 2.0 * standard_gamma(stream, k / 2.0, size)


def sample_chi(stream: RngStream, k, size=None):
    """Chi with ``k > 0`` (real) degrees of freedom, density proportional to x^(k-1) exp(-x^2/2)."""
    x = np.sqrt(sample_chi_square(stream, k, size))
    return float(x) if np.ndim(x) == 0 else x
