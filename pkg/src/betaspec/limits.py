"""Limiting spectral laws, conditional laws at a root parameter, and their quadrature.

Every law here lives on a compact interval ``[lo, hi]``. Quadrature runs in the
angle variable ``x = lo + (hi - lo) * sin(theta / 2)**2`` for theta in [0, pi].
That substitution absorbs both square-root vanishing densities and
inverse-square-root endpoint singularities, so the integrand in theta is smooth
for all families.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate

from .ensembles import EnsembleKind, EnsembleParams
from .errors import AccuracyError, EndpointSingularityError, ParameterError, UnsupportedRegimeError

DEFAULT_QUAD_TOL = 1e-10

_GL_LO = leggauss(8)
_GL_HI = leggauss(16)
_MAX_REFINE = 8


def _check_beta(beta):
    if not np.isfinite(beta) or beta <= 0:
        raise ParameterError(f"beta must be > 0, got {beta!r}")


def _check_gamma(gamma):
    if not np.isfinite(gamma):
        raise ParameterError("gamma must be finite")
    if gamma < 1:
        raise UnsupportedRegimeError(f"gamma={gamma} < 1 is not supported")


def mp_edges(beta: float, gamma: float) -> tuple[float, float]:
    """(L-, L+) = beta * (1 -/+ sqrt(gamma))**2."""
    r = math.sqrt(gamma)
    return beta * (1.0 - r) ** 2, beta * (1.0 + r) ** 2


def laguerre_c1(u, beta: float, gamma: float):
    return beta * (gamma + 1.0 - 2.0 * np.asarray(u, dtype=float))


def laguerre_c2(u, beta: float, gamma: float):
    u = np.asarray(u, dtype=float)
    return beta * np.sqrt(gamma - u) * np.sqrt(1.0 - u)


def _angle(lo, hi, x):
    x = np.clip(x, lo, hi)
    return 2.0 * np.arctan2(np.sqrt(x - lo), np.sqrt(hi - x))


@dataclass(frozen=True)
class ContinuousLaw:
    """Base class. Subclasses provide ``lo``, ``hi`` and the angle integrand ``_g``."""

    @property
    def support(self) -> tuple[float, float]:
        return self.lo, self.hi

    @property
    def width(self) -> float:
        return self.hi - self.lo

    # -- to override ------------------------------------------------------
    def _raw_density(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _g(self, theta: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _singular_points(self) -> tuple[float, ...]:
        return ()

    def _scales(self) -> tuple[float, ...]:
        """Angles below which the integrand has structure (used to grade the grid)."""
        return ()

    # -- public -----------------------------------------------------------
    def density(self, x, at_singular: str = "raise"):
        """Density at x; 0 outside the support.

        At a singular endpoint ``at_singular="raise"`` raises
        :class:`EndpointSingularityError`, ``"inf"`` returns ``inf``.
        """
        xa = np.asarray(x, dtype=float)
        out = np.zeros(xa.shape)
        sing = np.zeros(xa.shape, dtype=bool)
        for p in self._singular_points():
            sing |= xa == p
        if np.any(sing) and at_singular == "raise":
            raise EndpointSingularityError(
                f"density is unbounded at {xa[sing].ravel()[0]!r}; integrate around it")
        inside = (xa > self.lo) & (xa < self.hi) & ~sing
        if np.any(inside):
            out[inside] = self._raw_density(xa[inside])
        # non-singular endpoints have a finite limit
        edge = ((xa == self.lo) | (xa == self.hi)) & ~sing
        if np.any(edge):
            out[edge] = self._edge_value(xa[edge])
        out[sing] = np.inf
        return float(out) if out.ndim == 0 else out

    def _edge_value(self, x):
        return np.zeros(np.shape(x))

    def x_of_angle(self, theta):
        return self.lo + self.width * np.sin(0.5 * np.asarray(theta, dtype=float)) ** 2

    def angle_of_x(self, x):
        return _angle(self.lo, self.hi, np.asarray(x, dtype=float))

    def _base_grid(self, segments: int = 32) -> np.ndarray:
        pts = [np.linspace(0.0, np.pi, segments + 1)]
        for s in self._scales():
            if 0 < s < 0.5:
                k = np.arange(-6, int(np.ceil(np.log2(np.pi / s))) + 1)
                pts.append(np.clip(s * 2.0 ** k, 0.0, np.pi))
        return np.unique(np.concatenate(pts))

    def _cumulative(self, fun, thetas: np.ndarray, quad_tol: float) -> np.ndarray:
        """Integral of fun over [0, theta] for each theta, composite Gauss-Legendre.

        The error is estimated by comparing 8- and 16-point rules per segment;
        the grid is bisected until the estimate is below ``quad_tol``.
        """
        grid = self._base_grid()
        for _ in range(_MAX_REFINE):
            pts = np.unique(np.concatenate([grid, thetas]))
            a, b = pts[:-1], pts[1:]
            half = 0.5 * (b - a)
            mid = 0.5 * (a + b)
            segs = []
            for t, w in (_GL_LO, _GL_HI):
                vals = fun(mid[:, None] + half[:, None] * t[None, :])
                segs.append(half * (vals @ w))
            err = np.abs(segs[1] - segs[0])
            if err.sum() <= quad_tol:
                cum = np.concatenate([[0.0], np.cumsum(segs[1])])
                return cum[np.searchsorted(pts, thetas)]
            bad = err > quad_tol / max(pts.size, 1)
            grid = np.unique(np.concatenate([pts, mid[bad]]))
        raise AccuracyError(f"quadrature did not reach tolerance {quad_tol:g}")

    def cdf(self, x, quad_tol: float = DEFAULT_QUAD_TOL):
        """Mass of (-inf, x], clamped to [0, 1]. Accepts scalars or arrays."""
        xa = np.asarray(x, dtype=float)
        th = self.angle_of_x(xa).ravel()
        order = np.argsort(th)
        vals = np.empty(th.size)
        vals[order] = self._cumulative(self._g, th[order], quad_tol)
        vals = np.clip(vals, 0.0, 1.0)
        vals[(xa.ravel() >= self.hi)] = 1.0
        vals[(xa.ravel() < self.lo)] = 0.0
        vals = vals.reshape(xa.shape)
        return float(vals) if vals.ndim == 0 else vals

    def moment(self, k: int, quad_tol: float = DEFAULT_QUAD_TOL) -> float:
        """Integral of x**k against the law."""
        if int(k) != k or k < 0:
            raise ParameterError("moment order must be a nonnegative integer")
        fun = lambda th: self.x_of_angle(th) ** int(k) * self._g(th)  # noqa: E731
        return float(self._cumulative(fun, np.array([np.pi]), quad_tol)[0])

    def ppf(self, p, quad_tol: float = 1e-12):
        """Quantile function by Newton iteration in the angle variable.

        The CDF is tabulated once; each Newton step integrates only from the
        nearest table node with a 16-point rule.
        """
        pa = np.asarray(p, dtype=float)
        if np.any((pa < 0) | (pa > 1)):
            raise ParameterError("probabilities must lie in [0, 1]")
        grid = np.unique(np.concatenate([self._base_grid(), np.linspace(0.0, np.pi, 1025)]))
        table = self._cumulative(self._g, grid, quad_tol)
        flat = pa.ravel()
        j = np.clip(np.searchsorted(table, flat) - 1, 0, grid.size - 2)
        lo_t, hi_t = grid[j], grid[j + 1]
        frac = (flat - table[j]) / np.maximum(table[j + 1] - table[j], 1e-300)
        th = lo_t + np.clip(frac, 0, 1) * (hi_t - lo_t)
        t, w = _GL_HI
        for _ in range(4):
            half = 0.5 * (th - lo_t)
            nodes = (lo_t + half)[:, None] + half[:, None] * t[None, :]
            F = table[j] + half * (self._g(nodes) @ w)
            g = self._g(th)
            safe = g > 0
            step = np.where(safe, (F - flat) / np.where(safe, g, 1.0), 0.0)
            th = np.clip(th - step, lo_t, hi_t)
        out = self.x_of_angle(th).reshape(pa.shape)
        return float(out) if out.ndim == 0 else out

    def sample(self, stream, size):
        """Inverse-CDF draws."""
        return self.ppf(stream.uniform(size))


@dataclass(frozen=True)
class Semicircle(ContinuousLaw):
    """sqrt(4 beta - x^2) / (2 pi beta) on [-2 sqrt(beta), 2 sqrt(beta)]."""

    beta: float = 1.0

    def __post_init__(self):
        _check_beta(self.beta)

    @property
    def lo(self):
        return -2.0 * math.sqrt(self.beta)

    @property
    def hi(self):
        return 2.0 * math.sqrt(self.beta)

    def _raw_density(self, x):
        return np.sqrt((x - self.lo) * (self.hi - x)) / (2.0 * np.pi * self.beta)

    def _g(self, theta):
        s = np.sin(theta)
        return self.width ** 2 * s * s / (8.0 * np.pi * self.beta)


@dataclass(frozen=True)
class MarchenkoPastur(ContinuousLaw):
    """sqrt((x - L-)(L+ - x)) / (2 pi beta x) on [L-, L+], gamma >= 1."""

    beta: float = 1.0
    gamma: float = 1.0

    def __post_init__(self):
        _check_beta(self.beta)
        _check_gamma(self.gamma)

    @property
    def lo(self):
        return mp_edges(self.beta, self.gamma)[0]

    @property
    def hi(self):
        return mp_edges(self.beta, self.gamma)[1]

    def _singular_points(self):
        return (0.0,) if self.lo == 0.0 else ()

    def _scales(self):
        # the integrand turns over where width * sin(theta/2)^2 ~ lo
        if self.lo <= 0.0:
            return ()
        return (2.0 * math.sqrt(self.lo / self.width),)

    def _raw_density(self, x):
        return np.sqrt((x - self.lo) * (self.hi - x)) / (2.0 * np.pi * self.beta * x)

    def _g(self, theta):
        s2 = np.sin(0.5 * theta) ** 2
        c2 = np.cos(0.5 * theta) ** 2
        w = self.width
        if self.lo == 0.0:
            ratio = np.full(np.shape(theta), 1.0 / w)
        else:
            ratio = s2 / (self.lo + w * s2)
        return w * w * ratio * c2 / (2.0 * np.pi * self.beta)


@dataclass(frozen=True)
class _Arcsine(ContinuousLaw):
    """1 / (pi sqrt((x - lo)(hi - x))): law of center + radius * cos(omega), omega uniform."""

    def _singular_points(self):
        return (self.lo, self.hi)

    def _raw_density(self, x):
        return 1.0 / (np.pi * np.sqrt((x - self.lo) * (self.hi - x)))

    def _g(self, theta):
        return np.full(np.shape(theta), 1.0 / np.pi)


@dataclass(frozen=True)
class HermiteConditional(_Arcsine):
    """Spectral measure at the root of the constant path with edge weight sqrt(beta u), 0 < u <= 1."""

    u: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        _check_beta(self.beta)
        if not 0.0 < self.u <= 1.0:
            raise ParameterError(f"u must lie in (0, 1], got {self.u!r} (u = 0 is a point mass)")

    @property
    def lo(self):
        return -2.0 * math.sqrt(self.beta * self.u)

    @property
    def hi(self):
        return 2.0 * math.sqrt(self.beta * self.u)


@dataclass(frozen=True)
class LaguerreConditional(_Arcsine):
    """Root spectral measure of the constant path with loop c1(u), edge c2(u), 0 <= u < 1."""

    u: float = 0.5
    beta: float = 1.0
    gamma: float = 1.0

    def __post_init__(self):
        _check_beta(self.beta)
        _check_gamma(self.gamma)
        if not 0.0 <= self.u < 1.0:
            raise ParameterError(f"u must lie in [0, 1), got {self.u!r} (u = 1 is a point mass)")

    @property
    def c1(self) -> float:
        return float(laguerre_c1(self.u, self.beta, self.gamma))

    @property
    def c2(self) -> float:
        return float(laguerre_c2(self.u, self.beta, self.gamma))

    @property
    def lo(self):
        return self.c1 - 2.0 * self.c2

    @property
    def hi(self):
        return self.c1 + 2.0 * self.c2


@dataclass(frozen=True)
class Uniform(ContinuousLaw):
    """Uniform law on [a, b]."""

    a: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.a) and np.isfinite(self.b) and self.a < self.b):
            raise ParameterError("need finite a < b")

    @property
    def lo(self):
        return self.a

    @property
    def hi(self):
        return self.b

    def _raw_density(self, x):
        return np.full(np.shape(x), 1.0 / self.width)

    def _edge_value(self, x):
        return np.full(np.shape(x), 1.0 / self.width)

    def _g(self, theta):
        return 0.5 * np.sin(theta)


# --- ensemble-level helpers ---------------------------------------------

def limit_law(params: EnsembleParams) -> ContinuousLaw:
    if params.kind is EnsembleKind.HERMITE:
        return Semicircle(params.beta)
    return MarchenkoPastur(params.beta, params.gamma)


def conditional_law(params: EnsembleParams, u: float) -> ContinuousLaw:
    if params.kind is EnsembleKind.HERMITE:
        return HermiteConditional(u, params.beta)
    return LaguerreConditional(u, params.beta, params.gamma)


def mode_eigenvalue(params: EnsembleParams, u, omega):
    """Eigenvalue of the limit path at root parameter u for the Fourier mode exp(i omega v)."""
    u = np.asarray(u, dtype=float)
    omega = np.asarray(omega, dtype=float)
    if np.any((u < 0) | (u > 1)):
        raise ParameterError("u must lie in [0, 1]")
    if np.any(np.abs(omega) > np.pi):
        raise ParameterError("omega must lie in [-pi, pi]")
    b = params.beta
    if params.kind is EnsembleKind.HERMITE:
        lam = 2.0 * np.sqrt(b * u) * np.cos(omega)
    else:
        g = params.gamma
        lam = laguerre_c1(u, b, g) + 2.0 * laguerre_c2(u, b, g) * np.cos(omega)
    return float(lam) if np.ndim(lam) == 0 else lam


def laguerre_u_max(x, beta: float, gamma: float):
    """Largest u in [0, 1] whose conditional support contains x.

    The support condition 4 c2(u)^2 >= (x - c1(u))^2 is linear in u and gives
    u <= (L+ - x)(x - L-) / (4 beta x). Returns 0 outside (L-, L+).
    """
    _check_beta(beta)
    _check_gamma(gamma)
    lo, hi = mp_edges(beta, gamma)
    xa = np.asarray(x, dtype=float)
    out = np.zeros(xa.shape)
    ok = (xa > lo) & (xa < hi)
    if np.any(ok):
        xv = xa[ok]
        out[ok] = np.clip((hi - xv) * (xv - lo) / (4.0 * beta * xv), 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def expected_density_numeric(params: EnsembleParams, x: float,
                             quad_tol: float = DEFAULT_QUAD_TOL) -> float:
    """Average of the conditional density at x over u ~ Uniform[0, 1], by adaptive quadrature.

    Only u with x inside the conditional support contribute. The endpoint where
    x touches the support edge carries an inverse square root singularity in u;
    writing that end as ``u_edge +/- t**2`` removes it.
    """
    x = float(x)
    b = params.beta
    if params.kind is EnsembleKind.HERMITE:
        u_min = x * x / (4.0 * b)
        if not u_min < 1.0:
            return 0.0
        span = math.sqrt(1.0 - u_min)

        def integrand(t):
            return 2.0 * t * HermiteConditional(u_min + t * t, b).density(x)
    else:
        g = params.gamma
        u_max = laguerre_u_max(x, b, g)
        if u_max <= 0.0:
            return 0.0
        span = math.sqrt(u_max)

        def integrand(t):
            u = u_max - t * t
            if u >= 1.0:
                return 0.0
            return 2.0 * t * LaguerreConditional(u, b, g).density(x, at_singular="inf")

    val, err, info = integrate.quad(integrand, 0.0, span, epsabs=quad_tol, epsrel=0.0,
                                    limit=200, full_output=True)[:3]
    if err > quad_tol or not np.isfinite(val):
        raise AccuracyError(f"quadrature error estimate {err:g} exceeds {quad_tol:g} at x={x!r}")
    return float(val)
