"""Tridiagonal beta-Hermite / beta-Laguerre matrices and their local limits.

Index mapping (1-based entry labels -> 0-based arrays):

* Hermite: ``a_j`` for j = 1..n lives at ``diag[j-1]``; ``b_j`` for
  j = 1..n-1 at ``offdiag[j-1]``.
* Laguerre: ``a_j`` for j = 0..n-1 lives at ``diag[j]``; ``b_j`` for
  j = 1..n-1 at ``offdiag[j-1]``.

The per-entry samplers take explicit label arrays so that a handful of
entries around a root of a huge matrix can be drawn without building it.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ParameterError, UnsupportedRegimeError
from .sampling import RngStream, sample_chi, sample_chi_square, sample_normal


class EnsembleKind(str, Enum):
    HERMITE = "hermite"
    LAGUERRE = "laguerre"


@dataclass(frozen=True)
class TridiagonalMatrix:
    """Real symmetric tridiagonal matrix: loop weights ``diag``, edge weights ``offdiag``."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        d = np.array(self.diag, dtype=float).ravel()
        e = np.array(self.offdiag, dtype=float).ravel()
        if d.size < 1:
            raise ParameterError("a tridiagonal matrix needs n >= 1")
        if e.size != d.size - 1:
            raise ParameterError(f"offdiag must have n-1={d.size - 1} entries, got {e.size}")
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
            raise ParameterError("entries must be finite")
        d.setflags(write=False)
        e.setflags(write=False)
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)

    @property
    def n(self) -> int:
        return self.diag.size

    def norm_inf(self) -> float:
        """Max absolute row sum."""
        rows = np.abs(self.diag).copy()
        rows[:-1] += np.abs(self.offdiag)
        rows[1:] += np.abs(self.offdiag)
        return float(rows.max())

    def max_abs_entry(self) -> float:
        return float(max(np.abs(self.diag).max(), np.abs(self.offdiag).max(initial=0.0)))

    def matvec(self, f) -> np.ndarray:
        f = np.asarray(f, dtype=float)
        out = self.diag * f
        out[:-1] += self.offdiag * f[1:]
        out[1:] += self.offdiag * f[:-1]
        return out

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)


@dataclass(frozen=True)
class EnsembleParams:
    kind: EnsembleKind
    beta: float
    gamma: float | None = None

    def __post_init__(self):
        kind = EnsembleKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if not np.isfinite(self.beta) or self.beta <= 0:
            raise ParameterError(f"beta must be > 0, got {self.beta!r}")
        if kind is EnsembleKind.LAGUERRE:
            if self.gamma is None or not np.isfinite(self.gamma):
                raise ParameterError("Laguerre ensemble needs a finite gamma")
            if self.gamma < 1:
                raise UnsupportedRegimeError(
                    f"gamma={self.gamma} < 1: the tridiagonal model here requires gamma >= 1")

    @classmethod
    def hermite(cls, beta: float) -> "EnsembleParams":
        return cls(EnsembleKind.HERMITE, beta)

    @classmethod
    def laguerre(cls, beta: float, gamma: float) -> "EnsembleParams":
        return cls(EnsembleKind.LAGUERRE, beta, gamma)

    def alpha(self, n: int) -> float:
        """alpha = beta * gamma * (n - 1) / 2 (Laguerre only)."""
        if self.kind is not EnsembleKind.LAGUERRE:
            raise ParameterError("alpha is only defined for the Laguerre ensemble")
        return self.beta * self.gamma * (n - 1) / 2.0


@dataclass(frozen=True)
class LimitWeights:
    """Constant loop / edge weight of the bi-infinite limit path at root parameter u."""

    loop_weight: float
    edge_weight: float
    u: float


def _check_n(n) -> int:
    if int(n) != n or n < 1:
        raise ParameterError(f"n must be a positive integer, got {n!r}")
    return int(n)


# --- per-entry laws -------------------------------------------------------

def hermite_diag_entries(n: int, beta: float, labels, stream: RngStream) -> np.ndarray:
    """a_j ~ N(0, 2) / sqrt(n) for the given 1-based labels j."""
    labels = np.asarray(labels)
    return sample_normal(stream, 0.0, np.sqrt(2.0), size=labels.shape) / np.sqrt(n)


def hermite_offdiag_entries(n: int, beta: float, labels, stream: RngStream) -> np.ndarray:
    """b_j ~ chi_{beta j} / sqrt(n) for 1-based labels j in 1..n-1."""
    j = np.asarray(labels, dtype=float)
    if j.size == 0:
        return np.empty(j.shape)
    return sample_chi(stream, beta * j) / np.sqrt(n)


def laguerre_diag_entries(n: int, beta: float, gamma: float, labels, stream: RngStream) -> np.ndarray:
    """a_0 ~ chi2_{2 alpha} / n and a_j ~ chi2_{2 alpha + beta (n - 2j)} / n for j >= 1."""
    j = np.asarray(labels, dtype=float)
    if j.size == 0:
        return np.empty(j.shape)
    two_alpha = beta * gamma * (n - 1)
    dof = np.where(j == 0, two_alpha, two_alpha + beta * (n - 2.0 * j))
    return sample_chi_square(stream, dof) / n


def laguerre_offdiag_entries(n: int, beta: float, gamma: float, labels, stream: RngStream) -> np.ndarray:
    """b_j ~ chi_{2 alpha - beta (j - 1)} * chi_{beta (n - j)} / n, two independent chi draws."""
    j = np.asarray(labels, dtype=float)
    if j.size == 0:
        return np.empty(j.shape)
    two_alpha = beta * gamma * (n - 1)
    left = sample_chi(stream, two_alpha - beta * (j - 1.0))
    right = sample_chi(stream, beta * (n - j))
    return left * right / n


# --- whole matrices -------------------------------------------------------

def sample_hermite(n: int, beta: float, stream: RngStream) -> TridiagonalMatrix:
    """One beta-Hermite matrix; diagonal drawn first, then the off-diagonal."""
    n = _check_n(n)
    EnsembleParams.hermite(beta)
    diag = hermite_diag_entries(n, beta, np.arange(1, n + 1), stream)
    off = hermite_offdiag_entries(n, beta, np.arange(1, n), stream)
    return TridiagonalMatrix(diag, off)


def sample_laguerre(n: int, beta: float, gamma: float, stream: RngStream) -> TridiagonalMatrix:
    """One beta-Laguerre matrix (gamma >= 1, n >= 2)."""
    n = _check_n(n)
    EnsembleParams.laguerre(beta, gamma)
    if n < 2:
        raise ParameterError("Laguerre matrices need n >= 2 (n = 1 gives a chi-square with 0 dof)")
    diag = laguerre_diag_entries(n, beta, gamma, np.arange(0, n), stream)
    off = laguerre_offdiag_entries(n, beta, gamma, np.arange(1, n), stream)
    return TridiagonalMatrix(diag, off)


def sample_matrix(params: EnsembleParams, n: int, stream: RngStream) -> TridiagonalMatrix:
    if params.kind is EnsembleKind.HERMITE:
        return sample_hermite(n, params.beta, stream)
    return sample_laguerre(n, params.beta, params.gamma, stream)


def limit_weights(params: EnsembleParams, u: float) -> LimitWeights:
    """Loop and edge weight of the limiting path graph for a root at relative position u."""
    if not 0.0 <= u <= 1.0:
        raise ParameterError(f"u must lie in [0, 1], got {u!r}")
    b = params.beta
    if params.kind is EnsembleKind.HERMITE:
        return LimitWeights(0.0, float(np.sqrt(b * u)), float(u))
    g = params.gamma
    return LimitWeights(float(b * (g + 1.0 - 2.0 * u)),
                        float(b * np.sqrt(g - u) * np.sqrt(1.0 - u)), float(u))
