"""Acceptance criteria, each run at its stated tolerance with one pass/fail line."""

import time
import warnings

import numpy as np
from scipy.special import j0

from conftest import example_spec
from spps.cli import run_command
from spps.darboux import darboux_kernel
from spps.dirac import DiracSpec, dirac_residuals, dirac_solve
from spps.grid import GridFn, derivative, second_difference
from spps.powers import build_powers, family_for_potential
from spps.roots import Disk
from spps.solutions import eval_solution
from spps.spectral import WellProblem, char_polynomial, find_roots, problem_family, sech2_well, solve_sl
from spps.transmutation import (
    Kernel2D, apply_kernel, cos_sin_kernels, goursat_defects, goursat_kernel, kernel_constant_q, reparametrize_h,
)

A, NODES = 0.5, 201


def _near(roots, target):
    roots = np.asarray(roots)
    return roots[np.argmin(np.abs(roots - target))]


def _mesh(a=A, nodes=NODES):
    x = np.linspace(-a, a, nodes)
    return np.meshgrid(x, x, indexing="ij")


def _rational_q(M=2000):
    return GridFn.from_function(lambda x: 2 / (x + 1) ** 2, -A, A, M)


def _rational_f(h, x):
    """f'' = 2 f/(x+1)^2 with f(0) = 1, f'(0) = h."""
    return (1 + h) / 3 * (x + 1) ** 2 + (2 - h) / 3 / (x + 1)


def _on_axis(K, func):
    return K.grid_fn(func(K.axis))


def _sup(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def test_criterion_1_eigenparameter_problem(acceptance):
    t0 = time.perf_counter()
    spec = example_spec(N=100, M=3000)
    poly = char_polynomial(spec, problem_family(spec))
    roots = find_roots(poly)
    elapsed = time.perf_counter() - t0
    errs = {
        "l1": (abs(_near(roots, 1) - 1), 1e-10),
        "l2": (abs(_near(roots, 4) - 4), 1e-9),
        "l5": (abs(_near(roots, 25) - 25), 1e-6),
        "l10": (abs(_near(roots, 100) - 100), 0.05),
        "+i": (abs(_near(roots, 1j) - 1j), 1e-8),
        "-i": (abs(_near(roots, -1j) + 1j), 1e-8),
    }
    ok = all(e <= tol for e, tol in errs.values()) and elapsed <= 30
    detail = ", ".join(f"|{k} err|={e:.1e}<={tol:g}" for k, (e, tol) in errs.items())
    assert acceptance("criterion 1 eigenparameter problem eigenvalues", ok, f"{detail}; {elapsed:.2f} s<=30 s")


def test_criterion_2_sech2_levels(acceptance):
    t0 = time.perf_counter()
    lams = WellProblem(sech2_well(12.0, half_width=7.0, N=180)).eigenvalues()
    elapsed = time.perf_counter() - t0
    errs = np.abs(np.array(lams) - [-9, -4, -1]) if len(lams) == 3 else np.array([np.inf])
    ok = len(lams) == 3 and np.all(errs <= 1e-3) and elapsed <= 60
    detail = f"lambda={[round(v, 9) for v in lams]}, max err {errs.max():.1e}<=1e-3; {elapsed:.2f} s<=60 s"
    assert acceptance("criterion 2 sech^2 well eigenvalues", ok, detail)


def test_criterion_3_rational_kernels(acceptance):
    t0 = time.perf_counter()
    X, T = _mesh()
    K = goursat_kernel(_rational_q(), -1.0, NODES)
    e_goursat = _sup(K.values, (T - 1) / (2 * (X + 1)))
    analytic = Kernel2D(A, (T - 1) / (2 * (X + 1)), -1.0)
    e_reparam = _sup(reparametrize_h(analytic, 0.0).values, (2 * X + 2 * T + X**2 - T**2) / (4 * (X + 1)))
    K1 = Kernel2D(A, (3 * X**2 + 6 * X + 4 - 3 * T**2 + 2 * T) / (4 * (X + 1)), 2.0)
    K2 = darboux_kernel(K1, K1.grid_fn((K1.axis + 1) ** 2))
    exact2 = ((3 * T - 1) * (X + 1) ** 2 - 3 * (T - 1) ** 2 * (T + 1)) / (4 * (X + 1) ** 2)
    e_darboux = _sup(K2.values, exact2)
    elapsed = time.perf_counter() - t0
    ok = e_goursat <= 1e-6 and e_reparam <= 1e-8 and e_darboux <= 1e-5 and K2.h == -2 and elapsed <= 20
    detail = (f"goursat {e_goursat:.1e}<=1e-6, reparametrize {e_reparam:.1e}<=1e-8, "
              f"darboux {e_darboux:.1e}<=1e-5; {elapsed:.2f} s<=20 s")
    assert acceptance("criterion 3 rational kernel identities", ok, detail)


def test_criterion_4_sine_kernel_bessel(acceptance):
    K = kernel_constant_q(1.0, 0.0, 2.0, 2001)
    _, Ks = cos_sin_kernels(K, 0.0)
    out = apply_kernel(Ks, Ks.grid_fn(np.ones(Ks.nodes)))
    err = _sup(out.values, j0(Ks.axis))
    assert acceptance("criterion 4 T_s[1] = J0(x)", err <= 1e-6, f"sup err on [0, 2] {err:.1e}<=1e-6")


def test_criterion_5_power_mapping(acceptance):
    worst = {}
    # q = 2/(x+1)^2: Goursat kernel at h = -1, retagged to other h
    base = goursat_kernel(_rational_q(), -1.0, NODES)
    for h in (-1.0, 0.0, 2.0):
        K = reparametrize_h(base, h)
        fam = build_powers(K.grid_fn(_rational_f(h, K.axis)), K.center, 8)
        worst[f"rational h={h:g}"] = max(
            _sup(apply_kernel(K, _on_axis(K, lambda x: x**k)).values, fam.phi(k).values) for k in range(9))
    for h in (-0.8, 0.0, 1.3):
        K = kernel_constant_q(0.0, h, A, NODES)
        fam = build_powers(K.grid_fn(1 + h * K.axis), K.center, 8)
        worst[f"zero h={h:g}"] = max(
            _sup(apply_kernel(K, _on_axis(K, lambda x: x**k)).values, fam.phi(k).values) for k in range(9))
    # the h = 0 operator with f'(0) = h: odd k map to phi_k, even k pick up -(h/(k+1)) phi_{k+1}
    K0 = reparametrize_h(base, 0.0)
    for h in (-1.0, 2.0):
        fam = build_powers(K0.grid_fn(_rational_f(h, K0.axis)), K0.center, 9)
        errs = []
        for k in range(9):
            expected = fam.phi(k).values
            if k % 2 == 0:
                expected = expected - h / (k + 1) * fam.phi(k + 1).values
            errs.append(_sup(apply_kernel(K0, _on_axis(K0, lambda x: x**k)).values, expected))
        worst[f"T at h=0, f'(0)={h:g}"] = max(errs)
    ok = all(e <= 1e-6 for e in worst.values())
    detail = ", ".join(f"{k}: {e:.1e}" for k, e in worst.items()) + " (each <=1e-6, k<=8)"
    assert acceptance("criterion 5 power mapping", ok, detail)


def test_criterion_6_structural_invariants(acceptance):
    t0 = time.perf_counter()
    checks = {}
    q, fam = _rational_q(), family_for_potential(_rational_q(), 1000, 60)
    checks["wronskian"] = (max(_sup(eval_solution(fam, lam).wronskian().values, 1) for lam in (-3.0, 2.5, 4j)), 1e-8)

    qc = GridFn.constant(1.0, -1, 1, 4000)
    fc = build_powers(GridFn.from_function(np.cosh, -1, 1, 4000), 2000, 10,
                      df=GridFn.from_function(np.sinh, -1, 1, 4000))
    checks["L-basis"] = (max(
        float(np.max(np.abs((second_difference(fc.phi(k)) - qc * fc.phi(k) - fc.phi(k - 2) * (k * (k - 1)))
                            .values[1:-1]))) for k in range(2, 9)), 1e-4)

    K = goursat_kernel(q, 0.7, NODES, tol=1e-12)
    checks["goursat diagonal"] = (max(goursat_defects(K, q)), 1e-12)

    x = K.axis
    errs = []
    for u, d2u in ((lambda s: s**3 - s, lambda s: 6 * s), (lambda s: np.cos(2 * s), lambda s: -4 * np.cos(2 * s))):
        Tu = apply_kernel(K, _on_axis(K, u))
        lhs = -second_difference(Tu).values + 2 / (x + 1) ** 2 * Tu.values
        rhs = apply_kernel(K, _on_axis(K, lambda s: -d2u(s))).values
        errs.append(float(np.max(np.abs(lhs - rhs)[2:-2])))
    checks["AT=TB"] = (max(errs), 1e-3)

    X, T = _mesh()
    K1 = Kernel2D(A, np.full((NODES, NODES), 0.5), 1.0)
    K2 = Kernel2D(A, (T - 1) / (2 * (X + 1)), -1.0)
    fx = x + 1
    errs = []
    for u, du in ((np.cos, lambda s: -np.sin(s)), (lambda s: s**3 + 1, lambda s: 3 * s**2)):
        T1u, T2u = apply_kernel(K1, _on_axis(K1, u)), apply_kernel(K2, _on_axis(K2, u))
        T1du, T2du = apply_kernel(K1, _on_axis(K1, du)).values, apply_kernel(K2, _on_axis(K2, du)).values
        errs.append(_sup(derivative(T2u * fx).values, fx * T1du))
        errs.append(_sup(derivative(T1u / fx).values, T2du / fx))
    checks["commutation"] = (max(errs), 1e-3)

    spec0 = DiracSpec(1.0, GridFn.constant(0.0, -1, 1, 2000), 2.0)
    checks["dirac S=0"] = (max(dirac_residuals(spec0, dirac_solve(spec0, 60))), 1e-6)
    spec1 = DiracSpec(1.0, GridFn.from_function(lambda s: 0.3 * np.sin(s), -1, 1, 2000), 1.5)
    checks["dirac smooth S"] = (max(dirac_residuals(spec1, dirac_solve(spec1, 60))), 1e-4)

    elapsed = time.perf_counter() - t0
    ok = all(v <= tol for v, tol in checks.values())
    detail = ", ".join(f"{k} {v:.1e}<={tol:g}" for k, (v, tol) in checks.items()) + f"; {elapsed:.2f} s"
    assert acceptance("criterion 6 structural invariants", ok, detail)


def test_criterion_7_stability_in_N(acceptance):
    lams = []
    for N in (60, 80, 100, 120):
        roots, _ = solve_sl(example_spec(N=N), Disk(0, 10))
        lams.append([_near(roots, 1), _near(roots, 4)])
    spread = float(np.max(np.abs(np.array(lams) - lams[0])))
    assert acceptance("criterion 7 stability in N", spread < 1e-8,
                      f"max change of lambda1, lambda2 over N in 60..120: {spread:.1e}<1e-8")


def test_char_map_minima(acceptance, tmp_path):
    from pathlib import Path

    cfg = Path(__file__).resolve().parent.parent / "configs" / "eigenparam_map.cfg"
    out = tmp_path / "map.csv"
    code = run_command(["char-map", str(cfg), "--out", str(out)])
    lines = out.read_text().splitlines()
    re_axis = np.array([float(v) for v in lines[0].split(",")[1:]])
    rows = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    im_axis, vals = rows[:, 0], rows[:, 1:]
    dre, dim = re_axis[1] - re_axis[0], im_axis[1] - im_axis[0]
    smallest = np.argsort(vals, axis=None)[:5]
    points = [(re_axis[j], im_axis[i]) for i, j in zip(*np.unravel_index(smallest, vals.shape))]
    targets = [(1, 0), (4, 0), (9, 0), (0, 1), (0, -1)]

    def within_cell(p, t):
        return abs(p[0] - t[0]) <= dre * (1 + 1e-9) and abs(p[1] - t[1]) <= dim * (1 + 1e-9)

    matched = all(any(within_cell(p, t) for p in points) for t in targets)
    ok = code == 0 and matched
    shown = ", ".join(f"({p[0]:.1f},{p[1]:.1f})" for p in points)
    assert acceptance("characteristic magnitude map", ok, f"five smallest |Phi| at {shown}; targets 1, 4, 9, +-i")
