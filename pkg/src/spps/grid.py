"""Functions sampled on uniform grids, spline quadrature and Bessel series.

Every function in the package is a :class:`GridFn`: complex samples at the
``M + 1`` equispaced nodes of ``[a, b]``.  Integrals are taken from the
piecewise-cubic spline through the samples, which is exact for cubics and
fourth-order accurate for smooth data.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np
from scipy.interpolate import CubicSpline, make_interp_spline

from .errors import DomainError, InputError, OutOfRangeError

#: spline end condition used for quadrature and differentiation
SPLINE_BC = "not-a-knot"

BESSEL_MAX_ARG = 40.0


@dataclass(frozen=True, eq=False)
class GridFn:
    """Complex samples of a function at ``x_i = a + i (b - a) / M``, ``i = 0..M``."""

    a: float
    b: float
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=complex)
        if vals.ndim != 1:
            raise InputError("GridFn values must be one-dimensional")
        if vals.size < 3:
            raise InputError(f"need at least 3 nodes (M >= 2), got {vals.size}")
        if not self.b > self.a:
            raise InputError(f"empty interval [{self.a}, {self.b}]")
        if not np.all(np.isfinite(vals)):
            raise InputError("GridFn samples must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, func, a, b, M):
        x = np.linspace(a, b, M + 1)
        return cls(a, b, np.broadcast_to(np.asarray(func(x), dtype=complex), x.shape))

    @classmethod
    def constant(cls, c, a, b, M):
        return cls(a, b, np.full(M + 1, c, dtype=complex))

    @property
    def M(self) -> int:
        return self.values.size - 1

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.a, self.b, self.M + 1)

    @property
    def dx(self) -> float:
        return (self.b - self.a) / self.M

    def node_index(self, x0: float) -> int:
        """Index of the node nearest to ``x0``."""
        if not self.a - 1e-12 <= x0 <= self.b + 1e-12:
            raise DomainError(f"x0={x0} outside [{self.a}, {self.b}]")
        return int(round((x0 - self.a) / self.dx))

    def same_grid(self, other: "GridFn") -> bool:
        return (
            self.M == other.M
            and abs(self.a - other.a) <= 1e-12 * max(1.0, abs(self.a))
            and abs(self.b - other.b) <= 1e-12 * max(1.0, abs(self.b))
        )

    def with_values(self, values) -> "GridFn":
        return GridFn(self.a, self.b, values)

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def _operand(self, other):
        if isinstance(other, GridFn):
            if not self.same_grid(other):
                raise DomainError("GridFn operands are sampled on different grids")
            return other.values
        return other

    def __add__(self, other):
        return self.with_values(self.values + self._operand(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self.with_values(self.values - self._operand(other))

    def __rsub__(self, other):
        return self.with_values(self._operand(other) - self.values)

    def __mul__(self, other):
        return self.with_values(self.values * self._operand(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self.with_values(self.values / self._operand(other))

    def __rtruediv__(self, other):
        return self.with_values(self._operand(other) / self.values)

    def __neg__(self):
        return self.with_values(-self.values)

    def __repr__(self):
        return f"GridFn(a={self.a}, b={self.b}, M={self.M})"


def vanishes(values, threshold: float = 1e-12) -> bool:
    """True if samples come within ``threshold`` of zero, or a real sequence changes sign between nodes."""
    v = np.asarray(values)
    if np.min(np.abs(v)) < threshold:
        return True
    if np.all(np.imag(v) == 0):
        re = np.real(v)
        return bool(np.any(re[:-1] * re[1:] < 0))
    return False


def _spline_segments(x, y, axis=-1):
    """Exact integrals of the interpolating spline over each grid cell."""
    spline = CubicSpline(x, y, bc_type=SPLINE_BC, axis=axis)
    c = spline.c  # shape (4, M, ...) with the cell axis first after the degree
    h = np.diff(x).reshape((-1,) + (1,) * (c.ndim - 2))
    seg = ((c[0] * h / 4 + c[1] / 3) * h + c[2] / 2) * h * h + c[3] * h
    return np.moveaxis(seg, 0, axis)


def cumulative_values(x, y, i0=0, axis=-1):
    """Array version of :func:`cumulative_integral`.

    ``y`` may carry extra axes; integration runs along ``axis`` and the
    result vanishes exactly at index ``i0`` of that axis.
    """
    y = np.asarray(y)
    seg = _spline_segments(x, y, axis=axis)
    seg = np.moveaxis(seg, axis, -1)
    out = np.zeros(seg.shape[:-1] + (seg.shape[-1] + 1,), dtype=np.result_type(seg, float))
    np.cumsum(seg, axis=-1, out=out[..., 1:])
    out -= out[..., i0 : i0 + 1]
    return np.moveaxis(out, -1, axis)


def cumulative_integral(g: GridFn, i0: int = 0) -> GridFn:
    """Primitive ``G(x_i) = int_{x_i0}^{x_i} g(s) ds`` from the spline through ``g``."""
    if not 0 <= i0 <= g.M:
        raise InputError(f"anchor index {i0} outside 0..{g.M}")
    return g.with_values(cumulative_values(g.x, g.values, i0))


def second_difference(g: GridFn) -> GridFn:
    """Second derivative by central differences, second-order one-sided at the ends."""
    if g.M < 4:
        raise InputError("second_difference needs M >= 4")
    v = g.values
    d2 = np.empty_like(v)
    d2[1:-1] = v[:-2] - 2 * v[1:-1] + v[2:]
    d2[0] = 2 * v[0] - 5 * v[1] + 4 * v[2] - v[3]
    d2[-1] = 2 * v[-1] - 5 * v[-2] + 4 * v[-3] - v[-4]
    return g.with_values(d2 / g.dx**2)


def derivative(g: GridFn, order: int = 1, degree: int = 3) -> GridFn:
    """Derivative of the interpolating spline, sampled at the nodes.

    ``degree = 5`` uses a quintic spline, whose node derivatives are accurate
    enough to be differentiated again.
    """
    if degree == 3:
        spline = CubicSpline(g.x, g.values, bc_type=SPLINE_BC)
    elif degree == 5:
        if g.M < 5:
            raise InputError("a quintic spline needs M >= 5")
        spline = make_interp_spline(g.x, g.values, k=5)
    else:
        raise InputError(f"spline degree must be 3 or 5, got {degree}")
    return g.with_values(spline(g.x, order))


def interpolate(g: GridFn, xs) -> np.ndarray:
    """Evaluate the interpolating spline of ``g`` at arbitrary points of ``[a, b]``."""
    xs = np.asarray(xs, dtype=float)
    tol = 1e-9 * (g.b - g.a)
    if xs.size and (xs.min() < g.a - tol or xs.max() > g.b + tol):
        raise DomainError("interpolation points outside the grid interval")
    return CubicSpline(g.x, g.values, bc_type=SPLINE_BC)(xs)


def resample(g: GridFn, a: float, b: float, M: int) -> GridFn:
    if g.M == M and abs(g.a - a) < 1e-12 and abs(g.b - b) < 1e-12:
        return g
    return GridFn(a, b, interpolate(g, np.linspace(a, b, M + 1)))


# -- Bessel functions -------------------------------------------------------

_BESSEL_ORDERS = {"J0": (0, -1), "J1": (1, -1), "I0": (0, 1), "I1": (1, 1)}


def _ascending_series(w, nu, sign, rtol=1e-18, max_terms=400):
    """sum_k (sign w / 4)^k / (k! (k + nu)!) for arrays ``w``.

    With ``w = z^2`` this is ``(z/2)^{-nu} J_nu(z)`` (sign -1) or the
    modified counterpart (sign +1); it is entire in ``w``.
    """
    w = np.asarray(w, dtype=complex)
    r = sign * w / 4
    term = np.full(w.shape, 1.0 / factorial(nu), dtype=complex)
    total = term.copy()
    for k in range(1, max_terms):
        term = term * r / (k * (k + nu))
        total = total + term
        if np.all(np.abs(term) <= rtol * np.abs(total)):
            break
    return total


def bessel_eval(kind: str, z):
    """``J0``, ``J1``, ``I0`` or ``I1`` at complex ``z`` (scalar or array), ``|z| <= 40``."""
    try:
        nu, sign = _BESSEL_ORDERS[kind]
    except KeyError:
        raise InputError(f"unknown Bessel kind {kind!r}") from None
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) > BESSEL_MAX_ARG):
        raise OutOfRangeError(f"|z| exceeds the series validity range {BESSEL_MAX_ARG}")
    val = _ascending_series(z * z, nu, sign)
    if nu:
        val = val * (z / 2)
    return val.item() if val.ndim == 0 else val


def j0_of_sqrt(w):
    """``J0(sqrt(w))``; entire in ``w``, so no branch choice is needed."""
    return _ascending_series(w, 0, -1)


def j1_ratio(w):
    """``2 J1(sqrt(w)) / sqrt(w)``; entire in ``w`` and equal to 1 at ``w = 0``."""
    return _ascending_series(w, 1, -1)


def check_bessel_range(w):
    if np.any(np.abs(np.asarray(w)) > BESSEL_MAX_ARG**2):
        raise OutOfRangeError(f"Bessel argument exceeds {BESSEL_MAX_ARG}")
