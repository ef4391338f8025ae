"""Solutions of ``u'' - q u = lambda u`` as power series in the spectral parameter."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .grid import GridFn
from .powers import FormalPowerFamily, _with_center, build_nonvanishing_solution, build_powers

TAIL_RTOL = 1e-6


@dataclass(frozen=True)
class SppsEval:
    """``u1, u2`` and their derivatives at one value of the spectral parameter.

    ``u1(x0) = f(x0)``, ``u1'(x0) = f'(x0)``, ``u2(x0) = 0``, ``u2'(x0) = 1/f(x0)``.
    """

    lam: complex
    u1: GridFn
    u2: GridFn
    du1: GridFn
    du2: GridFn
    N_used: int
    tail: float
    truncation_warning: bool

    def wronskian(self) -> GridFn:
        return self.u1 * self.du2 - self.du1 * self.u2


def series_terms(fam: FormalPowerFamily, n_terms: int | None = None):
    """Per-power coefficient rows of ``u1, u2, u1', u2'``.

    Row ``k`` multiplies ``(lambda - lambda0)^k``.  Every row is a full grid
    function, so endpoint data is just a column of the result.
    """
    kmax = fam.N // 2 if n_terms is None else n_terms - 1
    if 2 * kmax + 1 > fam.N + 1 or kmax < 0:
        raise InputError(f"family of order {fam.N} cannot supply {kmax + 1} terms")
    logd = fam.df.values / fam.f.values
    phis, psis = fam.phis, fam.psis
    k = np.arange(kmax + 1)
    even = phis[2 * k]
    n_odd = min(kmax, (fam.N - 1) // 2)
    odd = np.zeros_like(even)
    odd[: n_odd + 1] = phis[2 * k[: n_odd + 1] + 1]
    d_even = logd * even
    d_even[0] = fam.df.values
    d_even[1:] += psis[2 * k[1:] - 1]
    d_odd = logd * odd
    d_odd[: n_odd + 1] += psis[2 * k[: n_odd + 1]]
    return even, odd, d_even, d_odd


def eval_solution(fam: FormalPowerFamily, lam: complex, n_terms: int | None = None) -> SppsEval:
    """Sum the truncated series for ``u1, u2, u1', u2'`` at ``lam``.

    The expansion variable is ``lam - fam.lambda0``.  Sums run in ascending
    powers.  ``tail`` is the sup over nodes of the last retained term; the
    warning flag is raised when it exceeds ``1e-6`` of ``sup |u|``.
    """
    if fam.N < 2:
        raise InputError("eval_solution needs a family of order N >= 2")
    nu = complex(lam) - fam.lambda0
    even, odd, d_even, d_odd = series_terms(fam, n_terms)
    powers = nu ** np.arange(even.shape[0])
    sums = [np.zeros(fam.f.M + 1, dtype=complex) for _ in range(4)]
    for kk, p in enumerate(powers):
        for s, rows in zip(sums, (even, odd, d_even, d_odd)):
            s += p * rows[kk]
    last = powers[-1]
    tail = float(max(np.max(np.abs(last * even[-1])), np.max(np.abs(last * odd[-1]))))
    scale = max(np.max(np.abs(sums[0])), np.max(np.abs(sums[1])))
    u1, u2, du1, du2 = (fam.f.with_values(s) for s in sums)
    return SppsEval(
        lam=complex(lam), u1=u1, u2=u2, du1=du1, du2=du2,
        N_used=min(fam.N, 2 * even.shape[0] - 1), tail=tail,
        truncation_warning=tail > TAIL_RTOL * scale,
    )


def shift_center(fam: FormalPowerFamily, q: GridFn, lambda0: complex) -> FormalPowerFamily:
    """Rebuild the family around ``lambda0``.

    A non-vanishing solution ``f0`` of ``u'' - (q + lambda0) u = 0`` is built
    and the recursive integrals recomputed from it, so that series in
    ``lambda - lambda0`` represent the solutions of the original equation.
    """
    if not q.same_grid(fam.f):
        raise InputError("potential and family live on different grids")
    f0, df0 = build_nonvanishing_solution(q + lambda0, fam.i0, return_derivative=True)
    return _with_center(build_powers(f0, fam.i0, fam.N, df=df0), lambda0)
