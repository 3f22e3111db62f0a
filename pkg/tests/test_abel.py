import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torsion3 import abel
from torsion3 import quadfield as qf
from torsion3.abel import PowerLaw, StepData


def unit_steps(N):
    return StepData(np.arange(1, N + 1, dtype=float), np.ones(N))


def test_identity_triangular_sum():
    N = 1000
    phi = PowerLaw(1.0, 1.0)
    r = abel.abel_identity(unit_steps(N), phi, phi.derivative(), 0.5, N + 0.5)
    assert r.lhs == N * (N + 1) / 2
    assert r.relative < 1e-9


def test_identity_harmonic_tail():
    N = 5000
    phi = PowerLaw(1.0, -1.0)
    r = abel.abel_identity(unit_steps(N), phi, phi.derivative(), 10.0, float(N))
    direct = math.fsum(1 / n for n in range(11, N + 1))
    assert r.lhs == pytest.approx(direct, rel=1e-15)
    assert r.rhs == pytest.approx(direct, rel=1e-9)


def test_identity_empty_range():
    r = abel.abel_identity(unit_steps(10), np.sin, np.cos, 3.2, 3.9)
    assert r.lhs == 0
    assert abs(r.rhs) < 1e-12


def test_identity_general_phi_uses_quadrature():
    data = StepData(np.array([1.5, 2.0, 3.7, 9.0]), np.array([2.0, -1.0, 0.5, 3.0]))
    r = abel.abel_identity(data, np.log, lambda t: 1 / t, 1.0, 10.0)
    assert r.relative < 1e-9


@settings(max_examples=1000, deadline=None)
@given(
    st.lists(st.floats(0.01, 10.0), min_size=1, max_size=40),
    st.lists(st.floats(-5.0, 5.0), min_size=40, max_size=40),
    st.floats(-2.5, 2.5),
    st.floats(0.1, 100.0),
    st.floats(0.0, 1.0),
    st.floats(0.01, 1.5),
)
def test_identity_randomized(gaps, weights, k, coef, y_frac, overshoot):
    t = 1.0 + np.cumsum(gaps)
    data = StepData(t, np.array(weights[: len(t)]))
    Y = 1.0 + y_frac * (t[-1] - 1.0)
    X = t[-1] + overshoot
    phi = PowerLaw(coef, k)
    r = abel.abel_identity(data, phi, phi.derivative(), Y, X)
    assert r.relative < 1e-9


def test_identity_errors():
    phi = PowerLaw(1.0, 1.0)
    with pytest.raises(ValueError):
        abel.abel_identity(unit_steps(5), phi, phi.derivative(), 3.0, 3.0)
    inv = PowerLaw(1.0, -1.0)
    with pytest.raises(ValueError):
        abel.abel_identity(unit_steps(5), inv, inv.derivative(), 0.0, 4.0)


def test_step_data_validation():
    with pytest.raises(ValueError):
        StepData(np.array([1.0, 1.0]), np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        StepData(np.array([1.0, 2.0]), np.array([1.0]))


def test_extremal_data_shape():
    d = abel.extremal_step_data(1000, 0.2)
    for n in (1, 10, 999, 1000):
        assert d.A(n) == pytest.approx(n**0.8, rel=1e-12)
    assert d.A(0.5) == 0


def test_default_grid():
    g = abel.default_grid()
    Xs = sorted({X for X, _ in g})
    assert Xs[0] == pytest.approx(1e4) and Xs[-1] == pytest.approx(1e8) and len(Xs) == 9
    assert all(10 <= Y < math.sqrt(X) for X, Y in g)


def test_tail_experiment_reports_finite_constant():
    rep = abel.tail_bound_experiment(0.2, 0.1)
    assert math.isfinite(rep.C) and rep.C > 0
    assert all(r.S <= rep.C * r.bound * (1 + 1e-12) for r in rep.rows)
    assert rep.max_residual < 1e-9


def test_tail_experiment_stable_under_refinement():
    c1, c2, rel = abel.stability(0.2, 0.1)
    assert rel <= 0.01


def test_final_shape():
    rep = abel.final_shape_check(0.2)
    assert rep["passed"]


@pytest.mark.parametrize("delta", [0.02, 0.05, 0.1])
def test_small_delta_monotone_in_Y(delta):
    rep = abel.tail_bound_experiment(delta, delta / 2)
    by_X = {}
    for r in rep.rows:
        by_X.setdefault(r.X, []).append((r.Y, r.S, r.bound))
    for rows in by_X.values():
        rows.sort()
        assert all(b[1] <= a[1] and b[2] <= a[2] for a, b in zip(rows, rows[1:]))
    assert math.isfinite(rep.C)


@pytest.mark.parametrize("delta,eps", [(0.2, 0.2), (0.2, 0.0), (1.0, 0.5), (0.2, -0.1)])
def test_parameter_errors(delta, eps):
    with pytest.raises(ValueError):
        abel.tail_bound_experiment(delta, eps)


def test_real_data_reports_hypothesis_failure():
    rep = abel.real_data_experiment(qf.torsion_table(10**4))
    assert not rep["hypothesis_holds"]
    assert rep["slope"] >= 0.95
    assert rep["ratio_increasing"]
