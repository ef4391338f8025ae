"""Recursive integrals X^(n), X~^(n) and the systems phi_k, psi_k.

The families are stored divided by ``n!`` (``X^(n)/n!`` and so on).  The
factorials overflow double precision beyond order 170 while the scaled
quantities stay representable, and the series in the spectral parameter
only ever need the scaled values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import factorial

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ConvergenceError, InputError, SingularSolutionError
from .grid import GridFn, cumulative_values, derivative, vanishes

SINGULAR_THRESHOLD = 1e-12


@dataclass(frozen=True, eq=False)
class FormalPowerFamily:
    """Recursive integrals built from a non-vanishing solution ``f`` with ``f(x0) = 1``.

    ``Xs[n]`` holds ``X^(n)/n!`` and ``Xts[n]`` holds ``X~^(n)/n!`` as rows of a
    ``(N + 1, M + 1)`` array.  ``lambda0`` is the point around which the
    spectral parameter is expanded (see :func:`spps.solutions.shift_center`).
    """

    f: GridFn
    df: GridFn
    i0: int
    N: int
    Xs: np.ndarray = field(repr=False)
    Xts: np.ndarray = field(repr=False)
    lambda0: complex = 0j

    @property
    def x0(self) -> float:
        return float(self.f.x[self.i0])

    @property
    def h(self) -> complex:
        return complex(self.df.values[self.i0])

    @cached_property
    def phis(self) -> np.ndarray:
        """``phi_k / k!`` as rows."""
        odd = np.arange(self.N + 1) % 2 == 1
        return self.f.values * np.where(odd[:, None], self.Xs, self.Xts)

    @cached_property
    def psis(self) -> np.ndarray:
        """``psi_k / k!`` as rows."""
        odd = np.arange(self.N + 1) % 2 == 1
        return np.where(odd[:, None], self.Xts, self.Xs) / self.f.values

    def _unscaled(self, rows, n):
        if not 0 <= n <= self.N:
            raise InputError(f"order {n} outside 0..{self.N}")
        return self.f.with_values(rows[n] * float(factorial(n)))

    def X(self, n: int) -> GridFn:
        return self._unscaled(self.Xs, n)

    def Xt(self, n: int) -> GridFn:
        return self._unscaled(self.Xts, n)

    def phi(self, k: int) -> GridFn:
        return self._unscaled(self.phis, k)

    def psi(self, k: int) -> GridFn:
        return self._unscaled(self.psis, k)


def _check_nonvanishing(values):
    if vanishes(values, SINGULAR_THRESHOLD):
        raise SingularSolutionError("particular solution vanishes on the grid")


def build_powers(f: GridFn, i0: int, N: int, df: GridFn | None = None) -> FormalPowerFamily:
    """Recursive integrals anchored at node ``i0`` up to order ``N``.

    ``f`` is normalised so that ``f(x0) = 1``.  Its derivative ``df`` is only
    used by the derivative series; when omitted it is taken from the spline
    through ``f``.
    """
    if N < 0:
        raise InputError(f"order N must be non-negative, got {N}")
    if not 0 <= i0 <= f.M:
        raise InputError(f"anchor index {i0} outside 0..{f.M}")
    _check_nonvanishing(f.values)
    if df is None:
        df = derivative(f)
    elif not df.same_grid(f):
        raise InputError("f and its derivative must share a grid")
    scale = f.values[i0]
    f = f.with_values(f.values / scale)
    df = df.with_values(df.values / scale)

    x = f.x
    f2 = f.values**2
    Xs = np.empty((N + 1, f.M + 1), dtype=complex)
    Xts = np.empty_like(Xs)
    Xs[0] = 1.0
    Xts[0] = 1.0
    for n in range(1, N + 1):
        # X^(n) carries weight (f^2)^((-1)^n); X~^(n) the reciprocal one
        if n % 2:
            Xs[n] = cumulative_values(x, Xs[n - 1] / f2, i0)
            Xts[n] = cumulative_values(x, Xts[n - 1] * f2, i0)
        else:
            Xs[n] = cumulative_values(x, Xs[n - 1] * f2, i0)
            Xts[n] = cumulative_values(x, Xts[n - 1] / f2, i0)
    Xs.setflags(write=False)
    Xts.setflags(write=False)
    return FormalPowerFamily(f=f, df=df, i0=i0, N=N, Xs=Xs, Xts=Xts)


def _picard(x, q, i0, v0, dv0, tol, max_iter):
    """Solve ``v'' = q v`` with data ``v0, dv0`` at node ``i0`` (rows are solutions)."""
    base = v0[:, None] + dv0[:, None] * (x - x[i0])
    v = base.astype(complex)
    for it in range(1, max_iter + 1):
        inner = cumulative_values(x, q * v, i0)
        new = base + cumulative_values(x, inner, i0)
        change = np.max(np.abs(new - v))
        v = new
        if change <= tol * max(1.0, np.max(np.abs(v))):
            dv = dv0[:, None] + cumulative_values(x, q * v, i0)
            return v, dv, it
    raise ConvergenceError(
        f"Picard iteration did not converge in {max_iter} sweeps (last change {change:.3e})",
        partial=v,
        iterations=max_iter,
    )


def solve_homogeneous(q: GridFn, i0: int, tol: float = 1e-14, max_iter: int = 200):
    """The two solutions of ``v'' = q v`` with unit Cauchy data at ``x_i0``.

    Returns ``(v1, dv1, v2, dv2)`` where ``v1(x0) = 1, v1'(x0) = 0`` and
    ``v2(x0) = 0, v2'(x0) = 1``.  Derivatives come from the Volterra form
    ``v' = v'(x0) + int q v`` rather than from differencing.
    """
    v, dv, _ = _picard(q.x, q.values, i0, np.array([1.0, 0.0]), np.array([0.0, 1.0]), tol, max_iter)
    return tuple(q.with_values(r) for r in (v[0], dv[0], v[1], dv[1]))


def build_nonvanishing_solution(q: GridFn, i0: int, tol: float = 1e-14, max_iter: int = 200,
                                return_derivative: bool = False):
    """``f = v1 + i v2`` for ``f'' = q f``, normalised to ``f(x0) = 1``.

    For real ``q`` the zeros of ``v1`` and ``v2`` interlace, so ``f`` has no
    zeros.  For complex ``q`` that argument fails and the result is only
    checked at the nodes.
    """
    v1, dv1, v2, dv2 = solve_homogeneous(q, i0, tol, max_iter)
    f = v1 + 1j * v2
    _check_nonvanishing(f.values)
    if return_derivative:
        return f, dv1 + 1j * dv2
    return f


def balanced_weight(v1: GridFn, v2: GridFn) -> float:
    """Weight ``c`` minimising the largest phase step of ``f = v1 + i c v2`` between nodes.

    Where the phase of ``f`` turns fast ``1/f^2`` is badly resolved by the
    grid, so the smallest worst step gives the most accurate recursive
    integrals.
    """
    a, b = v1.values, v2.values

    def worst(t):
        f = a + 1j * np.exp(t) * b
        return np.max(np.abs(np.angle(f[1:] / f[:-1])))

    ts = np.linspace(-25.0, 25.0, 201)
    j = int(np.argmin([worst(t) for t in ts]))
    lo, hi = ts[max(j - 1, 0)], ts[min(j + 1, ts.size - 1)]
    res = minimize_scalar(worst, bounds=(lo, hi), method="bounded", options={"xatol": 1e-6})
    return float(np.exp(res.x))


def particular_solution(q: GridFn, i0: int, tol: float = 1e-14, max_iter: int = 200,
                        min_ratio: float = 1e-2):
    """A non-vanishing solution of ``f'' = q f`` and its derivative.

    Prefers the solution with ``f(x0) = 1, f'(x0) = 0`` when it keeps well
    away from zero (``min|f| >= min_ratio * max|f|``); a real ``f`` keeps the
    recursive integrals real for real problems.  Otherwise returns
    ``v1 + i c v2`` with ``c`` from :func:`balanced_weight`.
    """
    v1, dv1, v2, dv2 = solve_homogeneous(q, i0, tol, max_iter)
    mag = np.abs(v1.values)
    if np.min(mag) >= min_ratio * np.max(mag):
        return v1, dv1
    c = balanced_weight(v1, v2)
    f = v1 + 1j * c * v2
    _check_nonvanishing(f.values)
    return f, dv1 + 1j * c * dv2


def family_for_potential(q: GridFn, i0: int, N: int, lambda0: complex = 0.0) -> FormalPowerFamily:
    """Family for ``u'' - q u = lambda u`` expanded around ``lambda0``."""
    shifted = q + lambda0 if lambda0 else q
    f, df = particular_solution(shifted, i0)
    fam = build_powers(f, i0, N, df=df)
    if lambda0:
        fam = _with_center(fam, lambda0)
    return fam


def _with_center(fam: FormalPowerFamily, lambda0: complex) -> FormalPowerFamily:
    return FormalPowerFamily(f=fam.f, df=fam.df, i0=fam.i0, N=fam.N, Xs=fam.Xs, Xts=fam.Xts,
                             lambda0=complex(lambda0))
