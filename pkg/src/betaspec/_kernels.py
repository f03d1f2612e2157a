"""Compiled inner loops for the tridiagonal eigensolver.

Both Sturm kernels run the three-term determinant recurrence

    p_i = (d_i - x) p_{i-1} - e_{i-1}^2 p_{i-2}

for a block of ``_W`` shifts at once; the shift loop is innermost so LLVM
vectorises it. The recurrence is division-free; every ``_R`` rows the state
is renormalised, which changes neither the sign pattern nor p/p'.

A sign change between consecutive p's is a negative pivot of the LDL^T
factorisation of T - x. Each product t = p_i p_{i-1} contributes
([t < 0] + [t <= 0]) / 2, so an isolated exact zero p_i (x hits an
eigenvalue of a leading block) is still counted once over the pair of
products it enters, and x equal to an eigenvalue of T itself yields a
half-integer count. Two consecutive zeros need a zero coupling; callers
split the matrix at such couplings first.

Callers must also prescale matrices so all entries are O(1).
"""
from __future__ import annotations

import numpy as np
from numba import njit

_W = 32
_R = 16

_opts = dict(nogil=True, fastmath=True, error_model="numpy", cache=True)


@njit(**_opts)
def sturm_counts(d, e2, xs, counts):
    """counts[k] = #eigenvalues < xs[k] (+0.5 per eigenvalue equal to it); len(xs) % _W == 0.

    ``e2[i]`` is the squared coupling between rows i-1 and i; ``e2[0]`` must be 0.
    """
    n = d.shape[0]
    st = np.empty((4, _W))
    for b in range(0, xs.shape[0], _W):
        x = st[3]
        p0 = st[0]
        p1 = st[1]
        cc = st[2]
        for k in range(_W):
            x[k] = xs[b + k]
            p0[k] = 0.0
            p1[k] = 1.0
            cc[k] = 0.0
        i = 0
        while i < n:
            stop = min(n, i + _R)
            j = i
            while j + 1 < stop:
                dj = d[j]
                ej = e2[j]
                dk = d[j + 1]
                ek = e2[j + 1]
                for k in range(_W):
                    a = p1[k]
                    xk = x[k]
                    pn = (dj - xk) * a - ej * p0[k]
                    pm = (dk - xk) * pn - ek * a
                    u1 = pn * a
                    u2 = pm * pn
                    cc[k] += ((1.0 if u1 < 0.0 else 0.0) + (1.0 if u1 <= 0.0 else 0.0)
                              + (1.0 if u2 < 0.0 else 0.0) + (1.0 if u2 <= 0.0 else 0.0))
                    p0[k] = pn
                    p1[k] = pm
                j += 2
            if j < stop:
                dj = d[j]
                ej = e2[j]
                for k in range(_W):
                    a = p1[k]
                    pn = (dj - x[k]) * a - ej * p0[k]
                    u1 = pn * a
                    cc[k] += (1.0 if u1 < 0.0 else 0.0) + (1.0 if u1 <= 0.0 else 0.0)
                    p0[k] = a
                    p1[k] = pn
            for k in range(_W):
                s = 1.0 / (abs(p1[k]) + abs(p0[k]))
                p0[k] *= s
                p1[k] *= s
            i = stop
        for k in range(_W):
            counts[b + k] = 0.5 * cc[k]


@njit(**_opts)
def sturm_newton(d, e2, xs, counts, steps):
    """Sturm counts as in :func:`sturm_counts` plus the Newton step p_n(x) / p_n'(x)."""
    n = d.shape[0]
    st = np.empty((6, _W))
    for b in range(0, xs.shape[0], _W):
        x = st[5]
        p0 = st[0]
        p1 = st[1]
        q0 = st[2]
        q1 = st[3]
        cc = st[4]
        for k in range(_W):
            x[k] = xs[b + k]
            p0[k] = 0.0
            p1[k] = 1.0
            q0[k] = 0.0
            q1[k] = 0.0
            cc[k] = 0.0
        i = 0
        while i < n:
            stop = min(n, i + _R)
            j = i
            while j + 1 < stop:
                dj = d[j]
                ej = e2[j]
                dk = d[j + 1]
                ek = e2[j + 1]
                for k in range(_W):
                    a = p1[k]
                    da = q1[k]
                    xk = x[k]
                    t = dj - xk
                    pn = t * a - ej * p0[k]
                    qn = t * da - a - ej * q0[k]
                    s = dk - xk
                    pm = s * pn - ek * a
                    qm = s * qn - pn - ek * da
                    u1 = pn * a
                    u2 = pm * pn
                    cc[k] += ((1.0 if u1 < 0.0 else 0.0) + (1.0 if u1 <= 0.0 else 0.0)
                              + (1.0 if u2 < 0.0 else 0.0) + (1.0 if u2 <= 0.0 else 0.0))
                    p0[k] = pn
                    p1[k] = pm
                    q0[k] = qn
                    q1[k] = qm
                j += 2
            if j < stop:
                dj = d[j]
                ej = e2[j]
                for k in range(_W):
                    a = p1[k]
                    da = q1[k]
                    t = dj - x[k]
                    pn = t * a - ej * p0[k]
                    qn = t * da - a - ej * q0[k]
                    u1 = pn * a
                    cc[k] += (1.0 if u1 < 0.0 else 0.0) + (1.0 if u1 <= 0.0 else 0.0)
                    p0[k] = a
                    p1[k] = pn
                    q0[k] = da
                    q1[k] = qn
            for k in range(_W):
                s = 1.0 / (abs(p1[k]) + abs(p0[k]) + abs(q1[k]) + abs(q0[k]))
                p0[k] *= s
                p1[k] *= s
                q0[k] *= s
                q1[k] *= s
            i = stop
        for k in range(_W):
            counts[b + k] = 0.5 * cc[k]
            steps[b + k] = p1[k] / q1[k] if q1[k] != 0.0 else 0.0


@njit(nogil=True, cache=True)
def twisted_root_weights(d, e, lams, root, weights):
    """Squared ``root`` component of the unit eigenvector for each shift in ``lams``.

    Twisted factorisation of T - lam (one step of inverse iteration started
    from the best coordinate vector): forward pivots D+, backward pivots D-,
    twist index r minimising |gamma_r|, then the eigenvector is propagated
    outwards from z_r = 1. Requires all couplings nonzero.
    """
    n = d.shape[0]
    dp = np.empty(n)
    dm = np.empty(n)
    z = np.empty(n)
    piv = 1e-290
    for m in range(lams.shape[0]):
        lam = lams[m]
        dp[0] = d[0] - lam
        if dp[0] == 0.0:
            dp[0] = -piv
        for i in range(1, n):
            dp[i] = d[i] - lam - e[i - 1] * e[i - 1] / dp[i - 1]
            if dp[i] == 0.0:
                dp[i] = -piv
        dm[n - 1] = d[n - 1] - lam
        if dm[n - 1] == 0.0:
            dm[n - 1] = -piv
        for i in range(n - 2, -1, -1):
            dm[i] = d[i] - lam - e[i] * e[i] / dm[i + 1]
            if dm[i] == 0.0:
                dm[i] = -piv
        r = 0
        best = np.inf
        for k in range(n):
            g = d[k] - lam
            if k > 0:
                g -= e[k - 1] * e[k - 1] / dp[k - 1]
            if k < n - 1:
                g -= e[k] * e[k] / dm[k + 1]
            if abs(g) < best:
                best = abs(g)
                r = k
        z[r] = 1.0
        for i in range(r - 1, -1, -1):
            z[i] = -(e[i] / dp[i]) * z[i + 1]
        for i in range(r + 1, n):
            z[i] = -(e[i - 1] / dm[i]) * z[i - 1]
        nrm = 0.0
        for i in range(n):
            nrm += z[i] * z[i]
        weights[m] = z[root] * z[root] / nrm
