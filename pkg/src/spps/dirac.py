"""One-dimensional Dirac system with a Lorentz scalar potential.

The system is ``Psi1' + eta Psi1 = E Psi2`` and ``-Psi2' + eta Psi2 = E Psi1``
with ``eta = m + S``.  Taking ``f = exp(-int_0^x eta)`` the general solution
is a pair of power series in ``E`` built from the systems ``phi_k, psi_k``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .grid import GridFn, cumulative_values, derivative
from .powers import build_powers


@dataclass(frozen=True)
class DiracSpec:
    m: float
    S: GridFn
    E: complex
    C1: complex = 1.0
    C2: complex = 0.0

    def __post_init__(self):
        if not self.m > 0:
            raise InputError(f"mass must be positive, got {self.m}")
        if not self.S.a <= 0.0 <= self.S.b:
            raise InputError("the grid must contain x = 0")


@dataclass(frozen=True)
class DiracSolution:
    Psi1: GridFn
    Psi2: GridFn
    tail: float


def dirac_solve(spec: DiracSpec, N: int = 60) -> DiracSolution:
    """``Psi1, Psi2`` with ``Psi1(0) = C1`` and ``Psi2(0) = C2``."""
    if N < 1:
        raise InputError("need N >= 1")
    S = spec.S
    i0 = S.node_index(0.0)
    eta = S.values + spec.m
    f = S.with_values(np.exp(-cumulative_values(S.x, eta, i0)))
    fam = build_powers(f, i0, N, df=f * S.with_values(-eta))
    E = complex(spec.E)
    k = np.arange(N + 1)
    # (-1)^floor(k/2) E^k: even k -> (-1)^(k/2) E^k, odd k -> (-1)^((k-1)/2) E^k
    w = (-1.0) ** (k // 2) * E**k
    even, odd = k % 2 == 0, k % 2 == 1
    phis, psis = fam.phis, fam.psis
    C1, C2 = complex(spec.C1), complex(spec.C2)
    psi1 = C1 * (w[even] @ phis[even]) + C2 * (w[odd] @ phis[odd])
    psi2 = C2 * (w[even] @ psis[even]) - C1 * (w[odd] @ psis[odd])
    tail = float(max(np.max(np.abs(w[-1] * phis[-1])), np.max(np.abs(w[-1] * psis[-1]))))
    return DiracSolution(S.with_values(psi1), S.with_values(psi2), tail)


def dirac_residuals(spec: DiracSpec, sol: DiracSolution):
    """Sup norms of ``Psi1' + eta Psi1 - E Psi2`` and ``-Psi2' + eta Psi2 - E Psi1``."""
    eta = spec.S.values + spec.m
    d1 = derivative(sol.Psi1).values
    d2 = derivative(sol.Psi2).values
    r1 = d1 + eta * sol.Psi1.values - spec.E * sol.Psi2.values
    r2 = -d2 + eta * sol.Psi2.values - spec.E * sol.Psi1.values
    return float(np.max(np.abs(r1))), float(np.max(np.abs(r2)))
