import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from damped_rotor.dynamics import (
    BodyParams,
    ParameterError,
    State,
    balances,
    energy_time_derivative_check,
    is_equilibrium,
    rhs,
)
from damped_rotor.spectral import Equilibrium

from conftest import SPIN3, Z1


@pytest.mark.parametrize(
    "omega, omega1, expected",
    [
        ([0, 0, 1], [0, 0, 1], [0, 0, 0, 0, 0, 0]),
        ([1, 0, 0], [0, 0, 0], [-1 / 3, 0, 0, 1, 0, 0]),
        ([0, 1, 1], [0, 0, 0], [-4 / 3, -1 / 3, -1 / 7, 0, 1, 1]),
    ],
)
def test_rhs_hand_values(p337, omega, omega1, expected):
    np.testing.assert_allclose(rhs(p337, State(omega, omega1)), expected, rtol=0, atol=1e-15)


def test_rhs_matches_symbolic_evaluation():
    a1, a2, a3, I, k = sp.symbols("a1 a2 a3 I k", positive=True)
    w = sp.Matrix(sp.symbols("p q r"))
    w1 = sp.Matrix(sp.symbols("p1 q1 r1"))
    J = sp.diag(a1, a2, a3)
    dw = J.inv() * (k * (w1 - w) - w.cross(J * w))
    dw1 = -(k / I) * (w1 - w) - w.cross(w1)
    f = sp.lambdify((a1, a2, a3, I, k, *w, *w1), list(dw) + list(dw1))

    rng = np.random.default_rng(3)
    for _ in range(20):
        A = np.sort(rng.uniform(0.5, 5.0, 3))
        I_, k_ = rng.uniform(0.2, 3.0, 2)
        y = rng.uniform(-2, 2, 6)
        params = BodyParams(*A, I_, k_)
        got = rhs(params, State.from_vector(y))
        want = np.array(f(*A, I_, k_, *y), dtype=float)
        np.testing.assert_allclose(got, want, rtol=1e-13, atol=1e-13)


def test_balances_examples(p337):
    b0 = balances(p337, State([0, 0, 0], [0, 0, 0]))
    assert (b0.V, b0.Ksq, b0.dissipation_rate) == (0.0, 0.0, 0.0)
    b = balances(p337, SPIN3)
    assert b.V == 4.0 and b.Ksq == 64.0 and b.dissipation_rate == 0.0
    bz = balances(p337, Z1)
    np.testing.assert_array_equal(bz.M_total, [3.5, 7.0, 0.0])
    assert bz.Ksq == 61.25


def test_balance_residuals_on_equilibrium_and_z1(p337):
    assert energy_time_derivative_check(p337, SPIN3) == (0.0, 0.0)
    bound = 1e-12 * (1 + np.linalg.norm(Z1.vector) ** 3)
    e, m = energy_time_derivative_check(p337, Z1)
    assert e <= bound and m <= bound


def test_energy_rate_against_finite_difference(p337):
    # centred difference of V along the exact flow direction
    f = rhs(p337, Z1)
    h = 1e-6
    vp = balances(p337, State.from_vector(Z1.vector + h * f)).V
    vm = balances(p337, State.from_vector(Z1.vector - h * f)).V
    assert abs((vp - vm) / (2 * h) - balances(p337, Z1).dissipation_rate) < 1e-6


def test_balance_residuals_random_states(p337):
    rng = np.random.Generator(np.random.Philox(11))
    worst = 0.0
    for y in rng.uniform(-5, 5, size=(100, 6)):
        e, m = energy_time_derivative_check(p337, State.from_vector(y))
        worst = max(worst, max(e, m) / (1 + np.linalg.norm(y) ** 3))
    assert worst <= 1e-12


@settings(max_examples=200, deadline=None)
@given(
    st.lists(st.floats(0.1, 10.0), min_size=3, max_size=3),
    st.floats(0.1, 10.0),
    st.floats(0.1, 10.0),
    st.lists(st.floats(-5.0, 5.0), min_size=6, max_size=6),
)
def test_balance_residuals_property(A, I, k, y):
    params = BodyParams(*sorted(A), I, k)
    e, m = energy_time_derivative_check(params, State.from_vector(y))
    bound = 1e-12 * (1 + np.linalg.norm(y) ** 3) * max(1.0, k, k / I) * max(sorted(A)[2], I)
    assert e <= bound and m <= bound


def test_zeros_of_rhs_are_exactly_the_equilibria(p237, p337):
    rng = np.random.Generator(np.random.Philox(5))
    for params in (p237, p337):
        for y in rng.uniform(-3, 3, size=(100_000 // 2, 6)):
            assert not np.all(rhs(params, State.from_vector(y)) == 0.0)
        for w in ([0, 0, 2.5], [0.3, -1.2, 0], [0, 0, 0]):
            s = State(w, w)
            if is_equilibrium(params, s):
                assert np.all(rhs(params, s) == 0.0)
                if np.any(w):
                    Equilibrium.at(params, w)


def test_dissipation_zero_iff_equal_velocities(p237):
    w = np.array([0.4, -1.1, 2.0])
    assert balances(p237, State(w, w)).dissipation_rate == 0.0
    for eps in (1e-7, 1e-3, 1.0):
        d = balances(p237, State(w, w + [0, eps, 0])).dissipation_rate
        assert d < 0.0
        assert d == pytest.approx(-p237.k * eps**2, rel=1e-6)


@pytest.mark.parametrize(
    "args",
    [(2, 1, 3, 1, 1), (0, 1, 2, 1, 1), (1, 2, 3, 0, 1), (1, 2, 3, 1, -1), (1, 2, float("nan"), 1, 1)],
)
def test_params_rejected(args):
    with pytest.raises(ParameterError):
        BodyParams(*args)


def test_state_validation_and_immutability():
    with pytest.raises(ParameterError):
        State([0, 0, np.inf], [0, 0, 0])
    with pytest.raises(ParameterError):
        State([0, 0], [0, 0, 0])
    s = State([1, 2, 3], [4, 5, 6])
    with pytest.raises(ValueError):
        s.omega[0] = 9.0
    assert State.from_vector(s.vector) == s


def test_params_roundtrip():
    p = BodyParams.from_moments([2, 3, 7], 0.5, 2.0)
    assert p.to_dict() == {"A": [2.0, 3.0, 7.0], "I": 0.5, "k": 2.0}
    np.testing.assert_array_equal(p.J, np.diag([2.0, 3.0, 7.0]))
