"""Characteristic functions of boundary problems, their roots, and quantum wells.

Two sign conventions for the spectral parameter are supported.  In the
``"spps"`` convention the equation is ``u'' - q u = lambda u``, which is the
form the series are built for.  In the ``"schrodinger"`` convention it is
``-u'' + q u = lambda u``; internally the series variable is then ``-lambda``.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import Polynomial
from scipy.optimize import brentq

from .errors import ConvergenceError, InputError, TruncationWarning
from .expr import parse_potential_expr
from .grid import GridFn, cumulative_values
from .powers import FormalPowerFamily, build_powers, family_for_potential, particular_solution
from .roots import Disk, Interval, aberth, horner, polish, sort_roots
from .solutions import series_terms, shift_center

CONVENTIONS = {"spps": 1, "schrodinger": -1}
TRUST_RTOL = 1e-8


def sample_potential(q, a: float, b: float, M: int) -> GridFn:
    """Turn an expression string, callable, constant or GridFn into samples on ``[a, b]``."""
    if isinstance(q, GridFn):
        if (q.a, q.b, q.M) != (float(a), float(b), M):
            raise InputError(f"potential grid [{q.a}, {q.b}] M={q.M} does not match [{a}, {b}] M={M}")
        return q
    if isinstance(q, str):
        q = parse_potential_expr(q)
    if callable(q):
        return GridFn.from_function(q, a, b, M)
    return GridFn.constant(complex(q), a, b, M)


@dataclass(frozen=True)
class SLProblemSpec:
    """``u(a) cos(alpha) + u'(a) sin(alpha) = 0`` and
    ``beta1 u(b) - beta2 u'(b) = phi(lambda) (beta1p u(b) - beta2p u'(b))``.

    ``phi_poly`` lists the coefficients of ``phi`` in ascending powers.
    """

    a: float
    b: float
    q: object = 0.0
    alpha: complex = 0.0
    beta1: complex = 1.0
    beta2: complex = 0.0
    beta1p: complex = 0.0
    beta2p: complex = 0.0
    phi_poly: tuple = ()
    x0: float | None = None
    N: int = 100
    M: int = 3000
    convention: str = "spps"
    lambda0: complex = 0.0

    def __post_init__(self):
        if not self.b > self.a:
            raise InputError(f"need b > a, got [{self.a}, {self.b}]")
        if self.convention not in CONVENTIONS:
            raise InputError(f"convention must be one of {sorted(CONVENTIONS)}")
        if self.N < 1 or self.M < 4:
            raise InputError("need N >= 1 and M >= 4")
        phi = tuple(complex(c) for c in self.phi_poly)
        object.__setattr__(self, "phi_poly", phi)
        if self.beta1 == 0 and self.beta2 == 0 and not any(phi):
            raise InputError("right boundary condition is empty")
        if self.x0 is not None and not self.a <= self.x0 <= self.b:
            raise InputError(f"x0 = {self.x0} outside [{self.a}, {self.b}]")

    @property
    def sign(self) -> int:
        return CONVENTIONS[self.convention]

    def potential(self) -> GridFn:
        return sample_potential(self.q, self.a, self.b, self.M)


@dataclass(frozen=True)
class CharPolynomial:
    """``Phi(lambda) = sum_k coeffs[k] (lambda - center)^k``."""

    coeffs: np.ndarray = field(repr=False)
    center: complex = 0j
    trust_radius: float = np.inf

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim != 1 or c.size == 0 or not np.all(np.isfinite(c)):
            raise InputError("characteristic coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, lam):
        return horner(self.coeffs, np.asarray(lam, dtype=complex) - self.center)


def trust_radius(coeffs, rtol: float = TRUST_RTOL) -> float:
    """Radius where the last term is ``rtol`` times the largest term.

    Beyond it the dropped tail of the series is no longer negligible.
    """
    c = np.abs(np.asarray(coeffs))
    D = c.size - 1
    if D == 0 or c[-1] == 0:
        return np.inf
    nz = c > 0
    k = np.arange(D + 1)[nz]
    logc = np.log(c[nz])
    target = np.log(rtol)

    def log_ratio(logr):
        # nondecreasing in logr because the last power is the largest
        terms = logc + k * logr
        return terms[-1] - terms.max()

    lo, hi = -700.0, 700.0
    if log_ratio(hi) < target:
        return np.inf
    if log_ratio(lo) >= target:
        return 0.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if log_ratio(mid) < target:
            lo = mid
        else:
            hi = mid
    return float(np.exp(lo))


def stability_radius(coeffs, coarse) -> float:
    """Radius inside which every root of ``coeffs`` is reproduced by the shorter truncation ``coarse``.

    A root counts as reproduced when the closest root of ``coarse`` lies
    nearer to it than half the distance to its own nearest neighbour, so the
    two truncations pair their roots unambiguously.  Spurious roots created by
    the truncation move by far more than that.
    """
    try:
        fine = np.array([polish(coeffs, z) for z in aberth(coeffs)])
        rough = aberth(coarse)
    except ConvergenceError:
        return np.inf
    if fine.size < 2:
        return np.inf
    if rough.size == 0:
        return float(np.min(np.abs(fine)))
    gaps = np.abs(fine[:, None] - fine[None, :])
    np.fill_diagonal(gaps, np.inf)
    moved = np.min(np.abs(fine[:, None] - rough[None, :]), axis=1)
    unstable = moved > 0.5 * np.min(gaps, axis=1)
    if not unstable.any():
        return np.inf
    dist = np.abs(fine)
    edge = np.min(dist[unstable])
    inside = dist[dist < edge]
    # halfway between the last reproduced root and the first spurious one
    return float(0.5 * (edge + inside.max())) if inside.size else 0.5 * float(edge)


def _series_variable_factor(sign: int, n: int) -> np.ndarray:
    return sign ** np.arange(n)


def _truncate(c, n):
    out = np.zeros(n, dtype=complex)
    m = min(n, len(c))
    out[:m] = c[:m]
    return out


def char_polynomial(spec: SLProblemSpec, fam: FormalPowerFamily, degree: int | None = None) -> CharPolynomial:
    """Coefficients of the characteristic function in powers of ``lambda - lambda0``.

    ``degree`` is the number of spectral powers kept in the solution series
    (default ``(N - 1) // 2``, the largest one every term exists for).  The
    eigen-candidate is ``u = A u1 + B u2`` with
    ``A = -(u2(a) cos(alpha) + u2'(a) sin(alpha))`` and
    ``B = u1(a) cos(alpha) + u1'(a) sin(alpha)``, which satisfies the left
    condition identically.  For ``x0 = a`` and ``alpha = 0`` this is ``u = u2``.

    The trust radius is the smaller of the tail estimate of ``u(b)`` and the
    :func:`stability_radius` against a truncation about 10% shorter.
    """
    if degree is None:
        degree = (fam.N - 1) // 2
    if degree < 0:
        raise InputError("family too short for a characteristic polynomial")
    coeffs, ub = _char_coefficients(spec, fam, degree + 1)
    radius = trust_radius(ub) if degree > 0 else np.inf
    if degree >= 4 and np.any(coeffs[1:]):
        coarse, _ = _char_coefficients(spec, fam, degree + 1 - max(2, degree // 10))
        radius = min(radius, stability_radius(coeffs, coarse))
    return CharPolynomial(coeffs, center=spec.sign * fam.lambda0, trust_radius=radius)


def _char_coefficients(spec: SLProblemSpec, fam: FormalPowerFamily, n: int):
    """Coefficients of ``Phi`` and of ``u(b)`` from the first ``n`` spectral powers."""
    sign = spec.sign
    lambda0 = sign * fam.lambda0
    even, odd, d_even, d_odd = series_terms(fam, n)
    flip = _series_variable_factor(sign, n)
    left, right = 0, fam.f.M
    u1a, u2a, du1a, du2a = (rows[:, left] * flip for rows in (even, odd, d_even, d_odd))
    u1b, u2b, du1b, du2b = (rows[:, right] * flip for rows in (even, odd, d_even, d_odd))

    ca, sa = np.cos(complex(spec.alpha)), np.sin(complex(spec.alpha))
    A = -(u2a * ca + du2a * sa)
    B = u1a * ca + du1a * sa
    ub = _truncate(np.convolve(A, u1b) + np.convolve(B, u2b), n)
    dub = _truncate(np.convolve(A, du1b) + np.convolve(B, du2b), n)

    phi = Polynomial(spec.phi_poly or (0.0,))
    phi_c = phi(Polynomial([lambda0, 1.0])).coef if lambda0 else phi.coef
    phi_c = np.asarray(phi_c, dtype=complex)
    phi1 = -complex(spec.beta1p) * phi_c
    phi1[0] += spec.beta1
    phi2 = -complex(spec.beta2p) * phi_c
    phi2[0] += spec.beta2
    coeffs = np.convolve(phi1, ub) - np.convolve(phi2, dub)
    nz = np.nonzero(coeffs)[0]
    coeffs = coeffs[: nz[-1] + 1] if nz.size else coeffs[:1]
    return coeffs, ub


def problem_family(spec: SLProblemSpec) -> FormalPowerFamily:
    """Family anchored at ``x0`` (default ``a``, snapped to a node) and centred at ``lambda0``."""
    q = spec.potential()
    i0 = 0 if spec.x0 is None else q.node_index(spec.x0)
    if spec.lambda0:
        base = family_for_potential(q, i0, spec.N)
        return shift_center(base, q, spec.sign * complex(spec.lambda0))
    return family_for_potential(q, i0, spec.N)


def find_roots(p: CharPolynomial, region: Disk | Interval | None = None, tol: float = 1e-15):
    """Roots of ``p`` inside ``region`` sorted by real then imaginary part.

    A :class:`TruncationWarning` is issued when the region reaches beyond the
    trust radius of the polynomial.
    """
    if region is None:
        region = Disk(p.center, p.trust_radius if np.isfinite(p.trust_radius) else np.inf)
    reach = region.radius + abs(region.center - p.center) if isinstance(region, Disk) else max(
        abs(region.lo - p.center), abs(region.hi - p.center))
    if reach > p.trust_radius:
        warnings.warn(f"search region reaches {reach:.4g} beyond trust radius {p.trust_radius:.4g}",
                      TruncationWarning, stacklevel=2)
    if p.degree == 0:
        return []
    nus = aberth(p.coeffs, tol=tol)
    roots = [complex(polish(p.coeffs, nu)) + p.center for nu in nus]
    return sort_roots([z for z in roots if region.contains(z)])


def solve_sl(spec: SLProblemSpec, region: Disk | Interval | None = None):
    """Eigenvalues of a boundary problem; returns ``(roots, polynomial)``."""
    poly = char_polynomial(spec, problem_family(spec))
    return find_roots(poly, region), poly


@dataclass(frozen=True)
class WellSpec:
    """``-u'' + Q u = lambda u`` with ``Q = alpha1`` left of ``[0, width]``, ``alpha2`` right of it."""

    alpha1: float
    alpha2: float
    width: float
    q: object
    N: int = 180
    M: int = 3000
    scan: int = 2000

    def __post_init__(self):
        if not self.width > 0:
            raise InputError("well width must be positive")
        if self.N < 2 or self.M < 4 or self.scan < 2:
            raise InputError("need N >= 2, M >= 4 and scan >= 2")

    def potential(self) -> GridFn:
        return sample_potential(self.q, 0.0, self.width, self.M)


class WellProblem:
    """SPPS data for a well, reusable across many spectral values."""

    def __init__(self, spec: WellSpec):
        self.spec = spec
        self.q = spec.potential()
        self.real = bool(np.all(self.q.values.imag == 0))
        f, df = particular_solution(self.q, 0)
        self.fam = build_powers(f, 0, spec.N, df=df)
        n = spec.N // 2
        even, odd, d_even, d_odd = series_terms(self.fam, n)
        self._rows = (even, odd, d_even, d_odd)
        self._end = tuple(r[:, -1] for r in self._rows)
        self._pow = np.arange(n)

    def _coefficients(self, lam):
        lam = complex(lam)
        k1 = np.sqrt(complex(self.spec.alpha1) - lam)
        return k1, np.sqrt(complex(self.spec.alpha2) - lam), 1.0, k1 - self.fam.h

    def char(self, lam) -> complex:
        """``u'(width) + kappa2 u(width)`` for ``u(0) = 1, u'(0) = kappa1``."""
        k1, k2, c1, c2 = self._coefficients(lam)
        p = (-complex(lam)) ** self._pow
        u1, u2, du1, du2 = (r @ p for r in self._end)
        return (c1 * du1 + c2 * du2) + k2 * (c1 * u1 + c2 * u2)

    def eigenfunction(self, lam):
        """``(u, u')`` on ``[0, width]`` with ``u(0) = 1, u'(0) = kappa1``."""
        _, _, c1, c2 = self._coefficients(lam)
        p = (-complex(lam)) ** self._pow
        u1, u2, du1, du2 = (p @ r for r in self._rows)
        u, du = c1 * u1 + c2 * u2, c1 * du1 + c2 * du2
        if self.real:
            # the exact solution is real; the imaginary part is pure error
            u, du = u.real, du.real
        return self.q.with_values(u), self.q.with_values(du)

    def search_interval(self, eps: float = 1e-9):
        lo = float(np.min(self.q.values.real)) + eps
        hi = min(self.spec.alpha1, self.spec.alpha2) - eps
        return lo, hi

    def eigenvalues(self, xtol: float = 1e-14):
        lo, hi = self.search_interval()
        if not lo < hi:
            return []
        grid = np.linspace(lo, hi, self.spec.scan)

        def real_char(lam):
            return self.char(lam).real

        vals = np.array([real_char(l) for l in grid])
        roots = []
        for i in range(grid.size - 1):
            if vals[i] == 0.0:
                roots.append(float(grid[i]))
            elif vals[i] * vals[i + 1] < 0:
                roots.append(brentq(real_char, grid[i], grid[i + 1], xtol=xtol, rtol=4 * np.finfo(float).eps))
        if vals[-1] == 0.0:
            roots.append(float(grid[-1]))
        return sorted(roots)


def solve_well(spec: WellSpec) -> list[float]:
    """Bound states below ``min(alpha1, alpha2)`` in ascending order."""
    return WellProblem(spec).eigenvalues()


def well_residuals(problem: WellProblem, lam: float):
    """Relative defects of an eigenfunction: ``(ode, left, right)``.

    ``ode`` is the defect of the integrated equation
    ``u(x) - u(0) - u'(0) x - int_0^x int_0^s (q - lam) u``; the two others are
    the matching conditions ``u'(0) = kappa1 u(0)`` and ``u'(w) = -kappa2 u(w)``.
    All are scaled by ``max(1, sup|u|)``.
    """
    u, du = problem.eigenfunction(lam)
    k1 = np.sqrt(problem.spec.alpha1 - lam + 0j)
    k2 = np.sqrt(problem.spec.alpha2 - lam + 0j)
    scale = max(1.0, u.sup())
    x = u.x
    inner = cumulative_values(x, ((problem.q - lam) * u).values)
    res = u.values - u.values[0] - du.values[0] * x - cumulative_values(x, inner)
    ode = np.max(np.abs(res)) / scale
    left = abs(du.values[0] - k1 * u.values[0]) / scale
    right = abs(du.values[-1] + k2 * u.values[-1]) / scale
    return ode, left, right


def sech2_well(upsilon: float, half_width: float = 7.0, N: int = 180, M: int = 3000) -> WellSpec:
    """``Q = -upsilon sech^2 x`` cut to ``[-half_width, half_width]`` and shifted to ``[0, 2 half_width]``."""
    a = float(half_width)
    return WellSpec(0.0, 0.0, 2 * a, lambda x: -upsilon / np.cosh(x - a) ** 2, N=N, M=M)


def magnitude_map(source: CharPolynomial | Callable, rect: Sequence[float], nx: int, ny: int,
                  threads: int = 1):
    """``|Phi|`` on an ``ny x nx`` grid over ``rect = (re_min, re_max, im_min, im_max)``.

    Rows run over the imaginary axis.  Returns ``(re_axis, im_axis, values)``.
    Threading splits rows and does not change any value.
    """
    if nx < 2 or ny < 2:
        raise InputError("magnitude map needs nx, ny >= 2")
    re_min, re_max, im_min, im_max = map(float, rect)
    if not (re_max > re_min and im_max > im_min):
        raise InputError("empty map rectangle")
    re = np.linspace(re_min, re_max, nx)
    im = np.linspace(im_min, im_max, ny)
    lam = re[None, :] + 1j * im[:, None]
    fn = source if isinstance(source, CharPolynomial) else np.vectorize(source, otypes=[complex])

    def rows(chunk):
        return np.abs(fn(lam[chunk]))

    chunks = [slice(i, i + 1) for i in range(ny)] if threads > 1 else [slice(0, ny)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(rows, chunks))
    else:
        parts = [rows(c) for c in chunks]
    return re, im, np.vstack(parts)
