"""Polynomial roots by Aberth-Ehrlich iteration with a Newton-polygon start."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, InputError

MAX_SWEEPS = 500
# a root counts as converged once |p| is this many rounding units of the bound
NOISE = 4.0


@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float

    def contains(self, z) -> bool:
        return abs(z - self.center) <= self.radius


@dataclass(frozen=True)
class Interval:
    """Real segment; roots with imaginary part below ``imag_tol * max(1, |z|)`` count as real."""

    lo: float
    hi: float
    imag_tol: float = 1e-6

    def contains(self, z) -> bool:
        return self.lo <= z.real <= self.hi and abs(z.imag) <= self.imag_tol * max(1.0, abs(z))


def horner(coeffs, z):
    """``sum_k coeffs[k] z^k`` for scalar or array ``z``; highest power first."""
    coeffs = np.asarray(coeffs)
    z = np.asarray(z, dtype=complex)
    acc = np.zeros_like(z) + coeffs[-1]
    for c in coeffs[-2::-1]:
        acc = acc * z + c
    return acc


def _horner_with_derivative(coeffs, z):
    p = coeffs[-1] + 0j
    dp = 0j
    for c in coeffs[-2::-1]:
        dp = dp * z + p
        p = p * z + c
    return p, dp


def newton_ratio(coeffs, z):
    """``p(z) / p'(z)``, evaluated on the reversed polynomial when ``|z| > 1``."""
    return _newton_step(coeffs, np.abs(coeffs), z)[0]


def _newton_step(coeffs, abs_coeffs, z):
    """``(p/p', at_noise_level)``; the flag is set when ``|p(z)|`` is within rounding of zero."""
    n = len(coeffs) - 1
    if abs(z) <= 1:
        p, dp = _horner_with_derivative(coeffs, z)
        bound = _horner_with_derivative(abs_coeffs, abs(z))[0].real
        ratio = p / dp if dp != 0 else complex(np.inf)
    else:
        y = 1 / z
        p, dr = _horner_with_derivative(coeffs[::-1], y)
        bound = _horner_with_derivative(abs_coeffs[::-1], abs(y))[0].real
        den = n * p - y * dr
        ratio = z * p / den if den != 0 else complex(np.inf)
    return ratio, abs(p) <= NOISE * n * np.finfo(float).eps * bound


def initial_guesses(coeffs):
    """Points on circles whose radii come from the upper convex hull of ``log|a_k|``."""
    n = len(coeffs) - 1
    with np.errstate(divide="ignore"):
        logs = np.log(np.abs(coeffs))
    hull = [0]
    for k in range(1, n + 1):
        if not np.isfinite(logs[k]):
            continue
        while len(hull) >= 2:
            i, j = hull[-2], hull[-1]
            # drop j if it lies on or below the segment i -> k
            if (logs[j] - logs[i]) * (k - i) <= (logs[k] - logs[i]) * (j - i):
                hull.pop()
            else:
                break
        hull.append(k)
    guesses = []
    sigma = 0.7
    for i, j in zip(hull[:-1], hull[1:]):
        m = j - i
        r = np.exp((logs[i] - logs[j]) / m)
        angles = 2 * np.pi * np.arange(m) / m + 2 * np.pi * i / n + sigma
        guesses.extend(r * np.exp(1j * angles))
    return np.array(guesses, dtype=complex)


def aberth(coeffs, tol=1e-15, max_sweeps=MAX_SWEEPS):
    """All roots of ``sum coeffs[k] z^k`` by simultaneous Aberth-Ehrlich iteration.

    Raises :class:`ConvergenceError` after ``max_sweeps`` sweeps; its
    ``partial`` attribute lists the roots that had converged.
    """
    coeffs = np.array(coeffs, dtype=complex)
    if coeffs.ndim != 1 or not np.all(np.isfinite(coeffs)):
        raise InputError("coefficients must be a finite 1-D sequence")
    nz = np.nonzero(coeffs)[0]
    if nz.size == 0:
        raise InputError("the zero polynomial has no isolated roots")
    coeffs = coeffs[: nz[-1] + 1]
    zeros_at_origin = int(nz[0])
    coeffs = coeffs[zeros_at_origin:]
    n = len(coeffs) - 1
    if n == 0:
        return np.zeros(zeros_at_origin, dtype=complex)

    z = initial_guesses(coeffs)
    abs_coeffs = np.abs(coeffs)
    done = np.zeros(n, dtype=bool)
    for _ in range(max_sweeps):
        for i in range(n):
            if done[i]:
                continue
            ratio, noise = _newton_step(coeffs, abs_coeffs, z[i])
            diff = z[i] - np.delete(z, i)
            s = np.sum(1.0 / diff)
            step = ratio / (1 - ratio * s)
            if not np.isfinite(step):
                step = ratio if np.isfinite(ratio) else 0j
            z[i] -= step
            if noise or abs(step) <= tol * max(abs(z[i]), 1e-300):
                done[i] = True
        if done.all():
            break
    else:
        raise ConvergenceError(
            f"Aberth iteration: {int((~done).sum())} of {n} roots unconverged after {max_sweeps} sweeps",
            partial=np.concatenate([np.zeros(zeros_at_origin, dtype=complex), z[done]]),
            iterations=max_sweeps,
        )
    return np.concatenate([np.zeros(zeros_at_origin, dtype=complex), z])


def polish(coeffs, z, steps=8):
    """A few Newton steps on the polynomial itself."""
    coeffs = np.asarray(coeffs, dtype=complex)
    for _ in range(steps):
        ratio = newton_ratio(coeffs, z)
        if not np.isfinite(ratio):
            break
        z = z - ratio
        if abs(ratio) <= 1e-16 * max(1.0, abs(z)):
            break
    return z


def sort_roots(roots):
    return sorted(roots, key=lambda z: (round(z.real, 12), round(z.imag, 12)))
