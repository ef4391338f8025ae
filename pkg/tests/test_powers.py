import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from spps.errors import ConvergenceError, InputError, SingularSolutionError
from spps.grid import GridFn, derivative, second_difference
from spps.powers import (build_nonvanishing_solution, build_powers, particular_solution, solve_homogeneous)


def rational_q(M=2000):
    return GridFn.from_function(lambda x: 2 / (x + 1) ** 2, -0.5, 0.5, M)


def test_unit_f_gives_monomials():
    f = GridFn.constant(1.0, 0, 1, 400)
    fam = build_powers(f, 0, 8)
    x = f.x
    for n in range(9):
        # exact up to n = 4, where the integrands are still cubic
        tol = 1e-14 if n <= 4 else 1e-9
        assert np.max(np.abs(fam.X(n).values - x**n)) < tol
        assert np.max(np.abs(fam.phi(n).values - x**n)) < tol
        assert np.max(np.abs(fam.psi(n).values - x**n)) < tol


def test_reciprocal_linear_f():
    f = GridFn.from_function(lambda x: 1 / (x + 1), -0.5, 0.5, 2000)
    i0 = f.node_index(0.0)
    fam = build_powers(f, i0, 4)
    x = f.x
    phi1 = (x**3 + 3 * x**2 + 3 * x) / (3 * (x + 1))
    phi2 = (2 * x**3 + 3 * x**2) / (3 * (x + 1))
    assert np.max(np.abs(fam.phi(1).values - phi1)) < 1e-10
    assert np.max(np.abs(fam.phi(2).values - phi2)) < 1e-10


def test_linear_f_against_symbolic_integral():
    s, X = sp.symbols("s X")
    exact = sp.lambdify(X, sp.simplify(sp.integrate((s + 1) ** -2, (s, 0, X))))
    f = GridFn.from_function(lambda x: x + 1, 0, 0.5, 2000)
    fam = build_powers(f, 0, 3)
    assert np.max(np.abs(fam.X(1).values - exact(f.x))) < 1e-10
    assert np.max(np.abs(fam.phi(1).values - f.x)) < 1e-10


def test_family_invariants():
    f = GridFn.from_function(lambda x: np.cosh(x) + 0.3j * np.sinh(x), -1, 1, 500)
    fam = build_powers(f, 250, 12)
    assert np.all(fam.X(0).values == 1) and np.all(fam.Xt(0).values == 1)
    assert np.allclose(fam.phi(0).values, fam.f.values, rtol=0, atol=0)
    assert np.allclose(fam.psi(0).values, 1 / fam.f.values, rtol=0, atol=0)
    for k in range(1, 13):
        assert fam.phi(k).values[250] == 0 and fam.psi(k).values[250] == 0


def test_normalisation_and_h():
    f = GridFn.from_function(lambda x: 3 * np.exp(x), 0, 1, 200)
    fam = build_powers(f, 0, 2)
    assert fam.f.values[0] == 1
    assert abs(fam.h - 1) < 1e-6


@settings(max_examples=20, deadline=None)
@given(st.complex_numbers(min_magnitude=0.1, max_magnitude=10, allow_nan=False, allow_infinity=False))
def test_family_ignores_constant_factor(c):
    f = GridFn.from_function(lambda x: 1 + x + 0.5j * x**2, 0, 1, 100)
    a = build_powers(f, 0, 6)
    b = build_powers(f * c, 0, 6)
    assert np.allclose(a.phis, b.phis, rtol=1e-12, atol=1e-14)


def test_vanishing_f_rejected():
    f = GridFn.from_function(lambda x: x - 0.5, 0, 1, 100)
    with pytest.raises(SingularSolutionError):
        build_powers(f, 0, 3)


def test_negative_order_rejected():
    with pytest.raises(InputError):
        build_powers(GridFn.constant(1.0, 0, 1, 10), 0, -1)


def test_nonvanishing_solution_free():
    q = GridFn.constant(0.0, 0, 2, 100)
    f = build_nonvanishing_solution(q, 0)
    assert np.max(np.abs(f.values - (1 + 1j * f.x))) < 1e-14


def test_nonvanishing_solution_constant_potential():
    c = 2.3
    q = GridFn.constant(c, -1, 1, 2000)
    v1, dv1, v2, dv2 = solve_homogeneous(q, 1000)
    x = q.x
    assert np.max(np.abs(v1.values - np.cosh(np.sqrt(c) * x))) <= 1e-10
    assert np.max(np.abs(v2.values - np.sinh(np.sqrt(c) * x) / np.sqrt(c))) <= 1e-10
    assert np.max(np.abs(dv1.values - np.sqrt(c) * np.sinh(np.sqrt(c) * x))) <= 1e-10
    f = build_nonvanishing_solution(q, 1000)
    assert np.max(np.abs(f.values - (v1.values + 1j * v2.values))) < 1e-15


def test_nonvanishing_solution_rational_potential():
    q = rational_q()
    v1, _, v2, _ = solve_homogeneous(q, 1000)
    x = q.x
    assert np.max(np.abs(v1.values - ((x + 1) ** 3 + 2) / (3 * (x + 1)))) <= 1e-8
    assert np.max(np.abs(v2.values - ((x + 1) ** 3 - 1) / (3 * (x + 1)))) <= 1e-8


def test_picard_cap():
    q = GridFn.constant(50.0, 0, 3, 300)
    with pytest.raises(ConvergenceError) as info:
        build_nonvanishing_solution(q, 0, max_iter=3)
    assert info.value.iterations == 3


def test_particular_solution_prefers_real():
    f, df = particular_solution(rational_q(), 1000)
    assert np.all(f.values.imag == 0)
    # an oscillating potential forces the complex combination
    q = GridFn.constant(-25.0, 0, 3, 600)
    f, df = particular_solution(q, 0)
    assert np.min(np.abs(f.values)) > 0.1 and np.any(f.values.imag != 0)
    assert np.max(np.abs(second_difference(f).values - q.values * f.values)) < 1e-3 * np.max(np.abs(f.values)) * 25


def _l_residual(phi, q, rhs):
    return np.max(np.abs((second_difference(phi) - q * phi - rhs).values[1:-1]))


def test_l_basis_identity():
    q = GridFn.constant(1.0, -1, 1, 4000)
    f = GridFn.from_function(np.cosh, -1, 1, 4000)
    fam = build_powers(f, 2000, 10, df=GridFn.from_function(np.sinh, -1, 1, 4000))
    for k in range(2, 9):
        assert _l_residual(fam.phi(k), q, fam.phi(k - 2) * (k * (k - 1))) <= 1e-4


def test_l_basis_identity_for_psi():
    q = GridFn.constant(1.0, -1, 1, 4000)
    f = GridFn.from_function(np.cosh, -1, 1, 4000)
    fam = build_powers(f, 2000, 10)
    q2 = (derivative(f) / f) * (derivative(f) / f) * 2.0 - q
    for k in range(2, 9):
        assert _l_residual(fam.psi(k), q2, fam.psi(k - 2) * (k * (k - 1))) <= 1e-4


@settings(max_examples=8, deadline=None)
@given(st.floats(min_value=-0.9, max_value=0.9))
def test_change_of_particular_solution(hg):
    q = rational_q()
    v1, dv1, v2, dv2 = solve_homogeneous(q, 1000)
    f = build_powers(v1, 1000, 9, df=dv1)
    g = build_powers(v1 + v2 * hg, 1000, 9, df=dv1 + dv2 * hg)
    for k in range(0, 8):
        if k % 2:
            expected = g.phi(k).values
        else:
            expected = g.phi(k).values + (f.h - g.h) / (k + 1) * g.phi(k + 1).values
        assert np.max(np.abs(f.phi(k).values - expected)) <= 1e-8
