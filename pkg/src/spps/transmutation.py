"""Transmutation kernels ``K(x, t; h)`` and the Volterra operators they define.

A kernel lives on the square ``[-a, a]^2`` sampled at ``n`` (odd) equispaced
nodes per axis, rows indexed by ``x`` and columns by ``t``.  The operator is
``T u(x) = u(x) + int_{-x}^{x} K(x, t) u(t) dt``.  Half kernels (cosine and
sine kernels) live on ``[0, a]^2`` and act by ``int_0^x``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError, InputError
from .grid import GridFn, check_bessel_range, cumulative_values, interpolate, j0_of_sqrt, j1_ratio


@dataclass(frozen=True, eq=False)
class Kernel2D:
    """Samples ``values[i, j] = K(x_i, t_j)`` with a parameter tag ``h``."""

    a: float
    values: np.ndarray
    h: complex = 0j
    half: bool = False

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise InputError("kernel samples must form a square array")
        if not self.half and v.shape[0] % 2 == 0:
            raise InputError("a full kernel needs an odd node count so that 0 is a node")
        if v.shape[0] < 3:
            raise InputError("kernel needs at least 3 nodes per axis")
        if not np.all(np.isfinite(v)):
            raise InputError("kernel samples must be finite")
        if not self.a > 0:
            raise InputError("kernel half-width must be positive")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "h", complex(self.h))

    @property
    def nodes(self) -> int:
        return self.values.shape[0]

    @property
    def axis(self) -> np.ndarray:
        lo = 0.0 if self.half else -self.a
        return np.linspace(lo, self.a, self.nodes)

    @property
    def spacing(self) -> float:
        return (self.a if self.half else 2 * self.a) / (self.nodes - 1)

    @property
    def center(self) -> int:
        return 0 if self.half else self.nodes // 2

    def with_values(self, values, h=None) -> "Kernel2D":
        return Kernel2D(self.a, values, self.h if h is None else h, self.half)

    def grid_fn(self, values) -> GridFn:
        """A function on the kernel's axis."""
        lo = 0.0 if self.half else -self.a
        return GridFn(lo, self.a, values)

    def diagonal(self) -> np.ndarray:
        return np.diagonal(self.values).copy()

    def antidiagonal(self) -> np.ndarray:
        """``K(x_i, -x_i)``."""
        if self.half:
            raise DomainError("half kernels have no antidiagonal")
        return self.values[::-1, :].diagonal()[::-1].copy()


def _axis(a, nodes):
    if nodes < 3 or nodes % 2 == 0:
        raise InputError(f"node count must be odd and >= 3, got {nodes}")
    return np.linspace(-a, a, nodes)


def kernel_constant_q(c: complex, h: complex, a: float, nodes: int) -> Kernel2D:
    """Kernel for ``d^2/dx^2 + c`` (potential ``q = -c``) retagged to ``h``.

    At ``h = 0`` it is ``-sqrt(w) J1(sqrt(w)) / (2 (x - t))`` with
    ``w = c (x^2 - t^2)``, evaluated as ``-c (x + t) / 4 * j1_ratio(w)`` so the
    line ``t = x`` needs no special handling.
    """
    x = _axis(a, nodes)
    X, T = np.meshgrid(x, x, indexing="ij")
    w = complex(c) * (X**2 - T**2)
    check_bessel_range(w)
    K = Kernel2D(a, -complex(c) * (X + T) / 4.0 * j1_ratio(w), 0.0)
    return reparametrize_h(K, h) if h != 0 else K


def _segment_weights(g, delta):
    """Per-segment integrals along the last axis of rows of a triangular array.

    Row ``P`` is valid on ``0..L`` with ``L = n - 1 - P``.  Segments use
    fourth-order four-point rules whose stencils stay inside the row, a
    quadratic rule for rows of three points and the trapezoid for two.
    """
    n = g.shape[-1]
    pad = np.zeros(g.shape[:-1] + (n + 4,), dtype=g.dtype)
    pad[..., 2:n + 2] = g

    def f(s):
        # f(s)[..., k] is the sample at k + s
        return pad[..., 2 + s:2 + s + n - 1]

    inner = (-f(-1) + 13 * f(0) + 13 * f(1) - f(2)) / 24
    start = (9 * f(0) + 19 * f(1) - 5 * f(2) + f(3)) / 24
    end = (f(-2) - 5 * f(-1) + 19 * f(0) + 9 * f(1)) / 24
    quad0 = (5 * f(0) + 8 * f(1) - f(2)) / 12
    quad1 = (-f(-1) + 8 * f(0) + 5 * f(1)) / 12
    trap = (f(0) + f(1)) / 2

    L = (n - 1 - np.arange(n))[:, None]
    k = np.arange(n - 1)[None, :]
    seg = np.where(k == 0, start, np.where(k == L - 1, end, inner))
    seg = np.where(L == 2, np.where(k == 0, quad0, quad1), seg)
    seg = np.where(L == 1, trap, seg)
    seg = np.where(k < L, seg, 0)
    return delta * seg


def _triangle_cumulative(g, delta):
    """Cumulative integral from 0 along the last axis, zero-filled outside the triangle."""
    seg = _segment_weights(g, delta)
    out = np.zeros_like(g)
    out[..., 1:] = np.cumsum(seg, axis=-1)
    return out


def _quadrant_double_integral(G, delta, n):
    """``I(P, R) = int_0^{P delta} int_0^{R delta} G`` on the triangle ``P + R <= n - 1``."""
    inner = _triangle_cumulative(G, delta)
    outer = _triangle_cumulative(inner.T, delta).T
    mask = np.add.outer(np.arange(n), np.arange(n)) <= n - 1
    return np.where(mask, outer, 0)


def _primitive_from_zero(q: GridFn, xs) -> np.ndarray:
    """``int_0^x q`` at ``xs`` from the spline primitive on the native grid of ``q``."""
    C = q.with_values(cumulative_values(q.x, q.values))
    return interpolate(C, xs) - interpolate(C, [0.0])[0]


def goursat_kernel(q: GridFn, h: complex, nodes: int, tol: float = 1e-12, max_iter: int = 200) -> Kernel2D:
    """Kernel for the potential ``q`` on ``[-a, a]`` by Picard iteration in characteristic variables.

    With ``u = (x + t)/2``, ``v = (x - t)/2`` and ``K(x, t) = H(u, v)`` the
    problem is ``H_uv = q(u + v) H`` with ``H(u, 0) = h/2 + (1/2) int_0^u q``
    and ``H(0, v) = h/2``.  ``H`` is found on the whole diamond
    ``|u| + |v| <= a`` so ``K`` fills the full square.
    """
    a = q.b
    if not np.isclose(q.a, -a):
        raise DomainError(f"potential must be given on a symmetric interval, got [{q.a}, {q.b}]")
    n = nodes
    _axis(a, n)
    m = 2 * n - 1
    delta = a / (n - 1)
    s = np.linspace(-a, a, m)
    qs = interpolate(q, s)
    idx = np.arange(m)
    Q = qs[np.clip(np.add.outer(idx, idx) - (n - 1), 0, m - 1)]
    half_int = 0.5 * _primitive_from_zero(q, s)
    H0 = np.broadcast_to((0.5 * complex(h) + half_int)[:, None], (m, m)).copy()

    quadrants = [(1, 1), (1, -1), (-1, 1), (-1, -1)]
    c = n - 1

    def view(A, su, sv):
        return A[c::su, c::sv]

    H = H0.copy()
    for it in range(1, max_iter + 1):
        new = H0.copy()
        for su, sv in quadrants:
            I = _quadrant_double_integral(view(Q * H, su, sv), delta, n)
            target = view(new, su, sv)
            # the axes are shared by two quadrants where the integral vanishes anyway
            target += su * sv * I
        change = np.max(np.abs(new - H))
        H = new
        if change <= tol:
            break
    else:
        raise ConvergenceError(f"Goursat iteration did not converge in {max_iter} sweeps", iterations=max_iter)
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    return Kernel2D(a, H[i + j, i - j + c], h)


def _odd_part_integral(K: Kernel2D):
    """``J[i, j] = int_{t_j}^{x_i} (K(x_i, s) - K(x_i, -s)) ds`` for a full kernel."""
    t = K.axis
    odd = K.values - K.values[:, ::-1]
    C = cumulative_values(t, odd, K.center, axis=1)
    return np.diagonal(C)[:, None] - C


def reparametrize_h(K: Kernel2D, h_new: complex) -> Kernel2D:
    """Kernel of the same potential with parameter ``h_new``."""
    if K.half:
        raise DomainError("reparametrization needs a full kernel")
    dh = (complex(h_new) - K.h) / 2
    if dh == 0:
        return K.with_values(K.values.copy(), h=h_new)
    return K.with_values(dh + K.values + dh * _odd_part_integral(K), h=h_new)


def cos_sin_kernels(K: Kernel2D, h_c: complex):
    """Cosine kernel ``Kc(x, t; h_c)`` and sine kernel ``Ks(x, t)`` on ``[0, a]^2`` from the ``h = 0`` kernel."""
    if K.half:
        raise DomainError("cos_sin_kernels needs a full kernel")
    c = K.center
    even = K.values + K.values[:, ::-1]
    odd = K.values - K.values[:, ::-1]
    J = _odd_part_integral(K)
    Kc = complex(h_c) + even + complex(h_c) * J
    Kc = Kernel2D(K.a, Kc[c:, c:], h_c, half=True)
    Ks = Kernel2D(K.a, odd[c:, c:], 0.0, half=True)
    return Kc, Ks


def apply_kernel(K: Kernel2D, u: GridFn, mode: str | None = None) -> GridFn:
    """``u(x) + int K(x, t) u(t) dt`` over ``[-x, x]`` (full) or ``[0, x]`` (half)."""
    mode = mode or ("half" if K.half else "full")
    if mode not in ("full", "half"):
        raise InputError(f"unknown mode {mode!r}")
    if (mode == "half") != K.half:
        raise DomainError(f"{mode} mode does not match a {'half' if K.half else 'full'} kernel")
    lo = 0.0 if K.half else -K.a
    if u.M != K.nodes - 1 or not (np.isclose(u.a, lo) and np.isclose(u.b, K.a)):
        raise DomainError(f"function on [{u.a}, {u.b}] with M={u.M} does not match the kernel grid "
                          f"[{lo}, {K.a}] with {K.nodes} nodes")
    t = K.axis
    C = cumulative_values(t, K.values * u.values[None, :], K.center, axis=1)
    idx = np.arange(K.nodes)
    if K.half:
        integral = C[idx, idx]
    else:
        integral = C[idx, idx] - C[idx, idx[::-1]]
    return u.with_values(u.values + integral)


def goursat_defects(K: Kernel2D, q: GridFn):
    """Largest violations of ``K(x, x) = h/2 + (1/2) int_0^x q`` and ``K(x, -x) = h/2``."""
    x = K.axis
    target = K.h / 2 + 0.5 * _primitive_from_zero(q, x)
    diag = np.max(np.abs(K.diagonal() - target))
    anti = np.max(np.abs(K.antidiagonal() - K.h / 2))
    return float(diag), float(anti)


def sine_kernel_constant_q(c: complex, a: float, nodes: int) -> np.ndarray:
    """``-t sqrt(w) J1(sqrt(w)) / (x^2 - t^2)`` on ``[0, a]^2`` with ``w = c (x^2 - t^2)``."""
    x = np.linspace(0.0, a, nodes)
    X, T = np.meshgrid(x, x, indexing="ij")
    w = complex(c) * (X**2 - T**2)
    check_bessel_range(w)
    return -T * complex(c) / 2 * j1_ratio(w)


def bessel_j0_sqrt(c: complex, x) -> np.ndarray:
    """``J0(x sqrt(c))``."""
    return j0_of_sqrt(complex(c) * np.asarray(x) ** 2)
