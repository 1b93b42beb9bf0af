"""Benchmark problems: initial consistency, drift values, and independent
cross-checks of every closed-form expectation against the moment ODEs."""

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from srkbench.sde import (AdditiveNoiseSde, ReferenceProblem, custom_sde, ex1,
                          ex2, ex3, get_problem)


@pytest.mark.parametrize("prob", [ex1(), ex2(), ex3()], ids=lambda p: p.label)
def test_exact_matches_functional_at_t0(prob):
    f0 = prob.functional(prob.sde.x0[None, :])[0]
    assert abs(prob.exact(prob.sde.t0) - f0) <= 1e-12


def test_problem_frames():
    for prob in (ex1(), ex2(), ex3()):
        assert prob.T == 2.0
        assert prob.sde.t0 == 0.0


def test_ex1_fields():
    p = ex1()
    assert p.sde.d == 1 and p.sde.m == 1
    np.testing.assert_allclose(p.sde.drift(0.0, np.array([1.0])), [2.5])
    np.testing.assert_allclose(p.sde.drift(0.0, np.array([0.1])), [1.15])
    assert np.array_equal(p.sde.noise, [[0.1]])
    assert np.array_equal(p.sde.x0, [0.1])
    assert p.functional(np.array([[3.0]]))[0] == 9.0


def test_ex2_fields():
    p = ex2()
    np.testing.assert_allclose(p.sde.drift(0.0, np.array([0.0])), [2.5])
    np.testing.assert_allclose(p.functional(np.array([[0.1]])), [np.exp(0.2)])
    assert abs(p.exact(0.0) - np.exp(0.2)) < 1e-14


def test_ex3_fields():
    p = ex3()
    assert p.sde.d == 2 and p.sde.m == 2
    np.testing.assert_allclose(p.sde.drift(0.0, np.array([1.0, 1.0])),
                               [-0.5, -0.76])
    assert np.array_equal(p.sde.noise, np.array([[-0.1, 0.05], [0.0, 1 / 30]]))
    assert p.functional(np.array([[5.0, 3.0]]))[0] == 9.0
    assert p.exact(0.0) == pytest.approx(1.0, abs=1e-12)


def test_exact_endpoint_values():
    # frozen from the ODE integrations below
    assert ex1().exact(2.0) == pytest.approx(218.380471298669, rel=1e-12)
    assert ex2().exact(2.0) == pytest.approx(152.318261945887, rel=1e-12)
    assert ex3().exact(2.0) == pytest.approx(0.0479277611035, rel=1e-9)


def test_ex1_exact_solves_moment_odes():
    # m' = 3/2 m + 1, u' = 3 u + 2 m + 1/100 with m(0) = u(0) = 1/10, 1/100
    def rhs(t, y):
        m, u = y
        return [1.5 * m + 1.0, 3.0 * u + 2.0 * m + 0.01]

    sol = solve_ivp(rhs, (0.0, 2.0), [0.1, 0.01], rtol=1e-12, atol=1e-14,
                    dense_output=True)
    p = ex1()
    for t in np.linspace(0.0, 2.0, 9):
        assert p.exact(t) == pytest.approx(sol.sol(t)[1], rel=1e-9, abs=1e-9)


def test_ex1_closed_form_derivative_identity():
    # finite-difference check of u' = 3u + 2m + 1/100 with the closed-form m
    p = ex1()
    for t in np.linspace(0.1, 1.9, 7):
        eps = 1e-6
        du = (p.exact(t + eps) - p.exact(t - eps)) / (2 * eps)
        m = (0.1 + 2 / 3) * np.exp(1.5 * t) - 2 / 3
        assert du == pytest.approx(3 * p.exact(t) + 2 * m + 0.01, rel=1e-6)


def test_ex2_exact_solves_moment_ode():
    # y = E exp(2X) satisfies y' = 101/50 y + 3
    def rhs(t, y):
        return [2.02 * y[0] + 3.0]

    sol = solve_ivp(rhs, (0.0, 2.0), [np.exp(0.2)], rtol=1e-12, atol=1e-14,
                    dense_output=True)
    p = ex2()
    for t in np.linspace(0.0, 2.0, 9):
        assert p.exact(t) == pytest.approx(sol.sol(t)[0], rel=1e-9)


def test_ex3_exact_solves_covariance_odes():
    # mean m' = L m; second moments P' = L P + P L' + G G'
    p = ex3()
    L = np.array([[-0.5, 0.0], [-0.01, -0.75]])
    G = np.asarray(p.sde.noise)

    def rhs(t, y):
        m = y[:2]
        P = y[2:].reshape(2, 2)
        dP = L @ P + P @ L.T + G @ G.T
        return np.concatenate([L @ m, dP.ravel()])

    y0 = np.concatenate([p.sde.x0, np.outer(p.sde.x0, p.sde.x0).ravel()])
    sol = solve_ivp(rhs, (0.0, 2.0), y0, rtol=1e-12, atol=1e-14,
                    dense_output=True)
    for t in np.linspace(0.0, 2.0, 9):
        assert p.exact(t) == pytest.approx(sol.sol(t)[5], abs=1e-8)


def test_custom_sde_pure_wiener():
    model = custom_sde(1, 1, lambda t, x: 0.0 * x, 1.0, 0.0, [0.0])
    assert model.noise.shape == (1, 1)
    assert model.noise[0, 0] == 1.0


def test_custom_sde_shape_mismatch():
    with pytest.raises(ValueError, match="noise"):
        custom_sde(2, 1, lambda t, x: x, np.zeros((2, 2)), 0.0, [0.0, 0.0])
    with pytest.raises(ValueError, match="x0"):
        custom_sde(2, 2, lambda t, x: x, np.zeros((2, 2)), 0.0, [0.0])
    with pytest.raises(ValueError, match="x0"):
        custom_sde(1, 1, lambda t, x: x, 1.0)


def test_custom_sde_matches_ex1_components():
    ref = ex1().sde
    model = custom_sde(ref.d, ref.m, ref.drift, ref.noise, ref.t0, ref.x0)
    assert model.d == ref.d and model.m == ref.m
    assert model.drift is ref.drift
    assert np.array_equal(model.noise, ref.noise)
    assert np.array_equal(model.x0, ref.x0)
    assert model.t0 == ref.t0


def test_reference_problem_rejects_inconsistent_exact():
    model = custom_sde(1, 1, lambda t, x: 0.0 * x, 1.0, 0.0, [2.0])
    with pytest.raises(ValueError, match="exact"):
        ReferenceProblem(label="bad", sde=model,
                         functional=lambda x: x[..., 0],
                         exact=lambda t: 0.0, T=1.0)


def test_get_problem():
    assert get_problem("ex2").label == "ex2"
    with pytest.raises(ValueError):
        get_problem("ex9")


def test_drift_is_vectorized_over_batches():
    for prob in (ex1(), ex2(), ex3()):
        d = prob.sde.d
        batch = np.tile(prob.sde.x0, (8, 1))
        out = prob.sde.drift(0.0, batch)
        assert out.shape == (8, d)
        single = prob.sde.drift(0.0, prob.sde.x0[None, :])
        assert np.array_equal(out[3], single[0])


def test_noise_and_x0_read_only():
    model = ex3().sde
    with pytest.raises(ValueError):
        model.noise[0, 0] = 5.0
    with pytest.raises(ValueError):
        model.x0[0] = 5.0
