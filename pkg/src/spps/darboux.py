"""Darboux transformation of potentials and transmutation kernels."""

from __future__ import annotations

import numpy as np

from .errors import DomainError, InputError, SingularSolutionError
from .grid import GridFn, cumulative_values, derivative, interpolate, vanishes
from .transmutation import Kernel2D, reparametrize_h

SINGULAR_THRESHOLD = 1e-12
#: points per finite-difference stencil for d/dt of a kernel (fourth order)
STENCIL_WIDTH = 5


def _check_nonvanishing(f: GridFn):
    if vanishes(f.values, SINGULAR_THRESHOLD):
        raise SingularSolutionError("f vanishes on the grid")


def darboux_potential(f: GridFn, q1: GridFn):
    """``q2 = 2 (f'/f)^2 - q1`` and ``1/f``, a solution of ``u'' = q2 u``."""
    if not f.same_grid(q1):
        raise InputError("f and q1 must share a grid")
    _check_nonvanishing(f)
    logd = derivative(f).values / f.values
    return q1.with_values(2 * logd**2 - q1.values), 1 / f


def darboux_kernel(K1: Kernel2D, f: GridFn) -> Kernel2D:
    """Kernel with tag ``-h`` for the Darboux-transformed potential.

    ``K2(x, t) = -(int_{-t}^{x} d_t K1(s, t) f(s) ds + (h/2) f(-t)) / f(x)``.
    ``f`` must satisfy ``f(0) = 1`` and ``f'(0) = h``; it is resampled onto
    the kernel nodes.  ``d_t K1`` uses fourth-order differences.
    """
    if K1.half:
        raise DomainError("the Darboux kernel needs K1 on the full square")
    if f.a > -K1.a + 1e-12 or f.b < K1.a - 1e-12:
        raise DomainError(f"f on [{f.a}, {f.b}] does not cover [-{K1.a}, {K1.a}]")
    x = K1.axis
    fx = interpolate(f, x)
    if vanishes(fx, SINGULAR_THRESHOLD):
        raise SingularSolutionError("f vanishes on the kernel grid")
    c = K1.center
    if abs(fx[c] - 1) > 1e-10:
        raise InputError("f must be normalised to f(0) = 1")
    h = K1.h
    dK = _diff_columns(K1.values, K1.spacing)
    C = cumulative_values(x, dK * fx[:, None], c, axis=0)
    rev = np.arange(K1.nodes)[::-1]
    # int_{-t_j}^{x_i} = C[i, j] - C[index of -t_j, j]
    integral = C - C[rev, np.arange(K1.nodes)][None, :]
    K2 = -(integral + 0.5 * h * fx[rev][None, :]) / fx[:, None]
    return Kernel2D(K1.a, K2, -h)


def _stencil_weights(offsets):
    """First-derivative weights (unit spacing) exact for polynomials of degree < len(offsets)."""
    offsets = np.asarray(offsets, dtype=float)
    V = np.vander(offsets, increasing=True).T
    rhs = np.zeros(offsets.size)
    rhs[1] = 1.0
    return np.linalg.solve(V, rhs)


def _diff_columns(A, d, width: int = STENCIL_WIDTH):
    """Derivative along axis 1 by ``width``-point stencils: centred inside, shifted windows at the edges."""
    n = A.shape[1]
    if n < width:
        return np.gradient(A, d, axis=1, edge_order=2)
    half = width // 2
    out = np.empty_like(A)
    w = _stencil_weights(np.arange(-half, half + 1))
    out[:, half:n - half] = sum(w[k] * A[:, k:n - width + 1 + k] for k in range(width))
    for j in list(range(half)) + list(range(n - half, n)):
        start = min(max(j - half, 0), n - width)
        w = _stencil_weights(np.arange(start, start + width) - j)
        out[:, j] = A[:, start:start + width] @ w
    return out / d


def darboux_chain(n_max: int, a: float = 0.5, nodes: int = 201) -> list[Kernel2D]:
    """Kernels ``K_n(x, t; -n)`` for ``q_n = n(n+1)/(x+1)^2``, ``n = 0..n_max``.

    Starts from ``K_0 = 0`` and repeats: retag ``K_n`` to ``h = n + 1`` and
    Darboux-transform with ``f_n = (x + 1)^(n + 1)``.

    Every step differentiates the previous kernel in ``t``, so errors grow
    quickly with ``n``: at 201 nodes about 1e-8 up to ``n = 3`` and 1e-6,
    1e-3 for ``n = 4, 5``.  Refining the grid does not cure this.
    """
    if n_max < 0:
        raise InputError("n_max must be non-negative")
    if not 0 < a < 1:
        raise InputError("need 0 < a < 1 to stay clear of the pole at x = -1")
    K = Kernel2D(a, np.zeros((nodes, nodes)), 0.0)
    chain = [K]
    x = K.axis
    for n in range(n_max):
        f = GridFn(-a, a, (x + 1.0) ** (n + 1))
        K = darboux_kernel(reparametrize_h(K, n + 1), f)
        chain.append(K)
    return chain


def chain_potential(n: int, a: float, M: int) -> GridFn:
    return GridFn.from_function(lambda x: n * (n + 1) / (x + 1.0) ** 2, -a, a, M)


def generalized_derivatives(g: GridFn, f: GridFn, n: int) -> list[GridFn]:
    """``gamma_0 = g`` and ``gamma_k = (f^2)^((-1)^(k-1)) gamma_{k-1}'``.

    Each step differentiates a quintic spline so that the end-node errors of
    one step are not blown up by the next.
    """
    if n < 0:
        raise InputError("n must be non-negative")
    if not g.same_grid(f):
        raise InputError("g and f must share a grid")
    _check_nonvanishing(f)
    f2 = f.values**2
    out = [g]
    for k in range(1, n + 1):
        d = derivative(out[-1], degree=5).values
        out.append(g.with_values(d * f2 if k % 2 else d / f2))
    return out
