import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loewner_c2d.exceptions import IrregularPencilError, PoleHitError
from loewner_c2d.models import (ContinuousStateSpace, DescriptorModel, DiscreteStateSpace,
                                TimeDelayModel, discrete_lsim, dump_model, eval_continuous,
                                eval_discrete, impulse_response_continuous,
                                impulse_response_discrete, is_stable, load_model,
                                model_from_dict, model_to_dict, poles,
                                sample_and_hold_output, step_response_continuous,
                                step_response_tds)
from loewner_c2d.plants import fourth_order_numden, fourth_order_plant, network_tds
from randmodels import random_stable_continuous, random_stable_discrete

SCALAR = ContinuousStateSpace([[-1.0]], [[1.0]], [[1.0]], [[0.0]])


def leverrier_tf(A, B, C, D):
    """Transfer function via the Faddeev-LeVerrier recursion (independent oracle)."""
    n = A.shape[0]
    c = np.zeros(n + 1)
    c[0] = 1.0
    M = [np.eye(n)]
    for k in range(1, n + 1):
        AM = A @ M[-1]
        c[k] = -np.trace(AM) / k
        if k < n:
            M.append(AM + c[k] * np.eye(n))
    num_terms = [(C @ Mk @ B).item() for Mk in M]   # coefficient of z^(n-1-k)

    def tf(z):
        z = np.asarray(z, dtype=complex)
        den = np.polyval(c, z)
        num = np.polyval(num_terms, z)
        return num / den + D.item()

    return tf


# --- construction ---------------------------------------------------------------

def test_models_are_immutable():
    G = fourth_order_plant()
    with pytest.raises(ValueError):
        G.A[0, 0] = 3.0
    with pytest.raises(AttributeError):
        G.A = np.eye(4)


def test_dimension_checks():
    with pytest.raises(ValueError):
        ContinuousStateSpace(np.eye(2), np.ones((3, 1)), np.ones((1, 2)))
    with pytest.raises(ValueError):
        DiscreteStateSpace(np.eye(2), np.ones((2, 1)), np.ones((1, 2)), h=0.0)
    with pytest.raises(ValueError):
        TimeDelayModel(np.eye(2), np.eye(3), np.eye(2), np.ones((2, 1)), np.ones((1, 2)), 1, 1)


# --- evaluation -------------------------------------------------------------------

def test_eval_continuous_examples():
    assert eval_continuous(SCALAR, 0) == pytest.approx(1.0)
    assert eval_continuous(fourth_order_plant(), 0) == pytest.approx(1.0, rel=1e-14)


def test_eval_continuous_matches_polynomials():
    num, den = fourth_order_numden()
    s = 1j * np.linspace(0.01, 7, 50)
    np.testing.assert_allclose(eval_continuous(fourth_order_plant(), s),
                               np.polyval(num, s) / np.polyval(den, s), rtol=1e-10)


def test_eval_tds_two_paths():
    G = network_tds()
    s = np.array([1e-3j, 0.5j, 2.0 + 1j, 3.7j])
    direct = 1.0 / (s ** 2 + 2.0 * np.exp(-1.2 * s) - 1.75 * np.exp(-1.5 * s))
    np.testing.assert_allclose(eval_continuous(G, s), direct, rtol=1e-12)
    assert eval_continuous(G, 0) == pytest.approx(4.0)


def test_eval_callable_and_mimo():
    assert eval_continuous(lambda s: 2 * s, 1j) == pytest.approx(2j)
    G = ContinuousStateSpace(-np.eye(2), np.eye(2), np.eye(2), np.zeros((2, 2)))
    vals = eval_continuous(G, [0, 1j])
    assert vals.shape == (2, 2, 2)
    np.testing.assert_allclose(vals[0], np.eye(2))


def test_eval_pole_hit():
    with pytest.raises(PoleHitError) as info:
        eval_continuous(SCALAR, [0.0, -1.0])
    assert info.value.point == -1.0
    Gd = DiscreteStateSpace([[0.5]], [[1.0]], [[1.0]], [[0.0]], h=1.0)
    with pytest.raises(PoleHitError):
        eval_discrete(Gd, 0.5)


def test_eval_discrete_examples():
    Gd = DiscreteStateSpace([[0.5]], [[1.0]], [[1.0]], [[0.0]], h=1.0)
    assert eval_discrete(Gd, 1.0) == pytest.approx(2.0)
    rng = np.random.default_rng(2)
    A, B, C = rng.standard_normal((3, 3)), rng.standard_normal((3, 1)), rng.standard_normal((1, 3))
    desc = DescriptorModel(np.eye(3), A, B, C)
    dss = DiscreteStateSpace(A, B, C, np.zeros((1, 1)))
    z = np.exp(1j * rng.uniform(0, np.pi, 10))
    np.testing.assert_allclose(eval_discrete(desc, z), eval_discrete(dss, z), rtol=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_eval_discrete_matches_leverrier(seed):
    rng = np.random.default_rng(seed)
    G = random_stable_discrete(rng, 3, feedthrough=True)
    z = np.exp(1j * rng.uniform(-np.pi, np.pi, 10))
    oracle = leverrier_tf(G.A, G.B, G.C, G.D)
    np.testing.assert_allclose(eval_discrete(G, z), oracle(z), rtol=1e-9)


@pytest.mark.parametrize("seed", range(5))
def test_realisation_invariance(seed):
    rng = np.random.default_rng(seed)
    G = random_stable_continuous(rng, 5, feedthrough=True)
    T = rng.standard_normal((5, 5)) + 2 * np.eye(5)
    Ti = np.linalg.inv(T)
    G2 = ContinuousStateSpace(T @ G.A @ Ti, T @ G.B, G.C @ Ti, G.D)
    s = rng.standard_normal(20) + 1j * rng.standard_normal(20)
    np.testing.assert_allclose(eval_continuous(G2, s), eval_continuous(G, s), rtol=1e-9)


# --- poles / stability ---------------------------------------------------------------

def test_poles_examples():
    G = ContinuousStateSpace(np.diag([-1.0, -2.0]), np.ones((2, 1)), np.ones((1, 2)))
    np.testing.assert_allclose(np.sort(poles(G).real), [-2, -1])
    desc = DescriptorModel(2 * np.eye(1), np.eye(1), [[1.0]], [[1.0]])
    np.testing.assert_allclose(poles(desc), [0.5])


def test_poles_fourth_order_plant():
    p = np.sort_complex(poles(fourth_order_plant()))
    oracle = np.sort_complex(np.concatenate([np.roots([1.0, 0.1, 1.0]),
                                             np.roots([0.2, 0.05 / np.sqrt(5), 1.0])]))
    np.testing.assert_allclose(p, oracle, rtol=1e-12)
    np.testing.assert_allclose(np.sort(np.abs(p)), [1, 1, np.sqrt(5), np.sqrt(5)], rtol=1e-12)
    assert is_stable(fourth_order_plant())


def test_descriptor_infinite_and_irregular():
    desc = DescriptorModel(np.diag([1.0, 0.0]), np.diag([0.5, 1.0]), np.ones((2, 1)),
                           np.ones((1, 2)))
    p, n_inf = poles(desc, return_infinite=True)
    np.testing.assert_allclose(p, [0.5])
    assert n_inf == 1
    irregular = DescriptorModel(np.diag([1.0, 0.0]), np.diag([0.5, 0.0]), np.ones((2, 1)),
                                np.ones((1, 2)))
    with pytest.raises(IrregularPencilError):
        poles(irregular)


def test_is_stable_boundary():
    def dss(p):
        return DiscreteStateSpace([[p]], [[1.0]], [[1.0]], [[0.0]])

    assert is_stable(dss(0.999))
    assert not is_stable(dss(1.0))
    assert not is_stable(dss(0.999), margin=0.01)
    assert not is_stable(ContinuousStateSpace([[0.0]], [[1.0]], [[1.0]]))


# --- time responses --------------------------------------------------------------------

def test_impulse_response_continuous_examples():
    y = impulse_response_continuous(SCALAR, [0.0, np.log(2), 2 * np.log(2)])
    np.testing.assert_allclose(y, [1.0, 0.5, 0.25], rtol=1e-14)


def test_impulse_response_fourth_order_decays():
    t = np.arange(0, 200, 0.05)
    y = impulse_response_continuous(fourth_order_plant(), t)
    peak = np.max(np.abs(y))
    # slowest pole has decay rate 0.05; envelope exp(-0.05 t) < 1e-4 beyond t = 185
    assert np.max(np.abs(y[t > 185])) < 1e-3 * peak


def test_impulse_response_discrete_examples():
    Gd = DiscreteStateSpace([[0.5]], [[1.0]], [[1.0]], [[0.0]])
    np.testing.assert_allclose(impulse_response_discrete(Gd, 4), [0, 1, 0.5, 0.25])
    Gd = DiscreteStateSpace([[0.5]], [[0.0]], [[1.0]], [[3.0]])
    np.testing.assert_allclose(impulse_response_discrete(Gd, 3), [3, 0, 0])
    with pytest.raises(ValueError):
        impulse_response_discrete(Gd, 0)


@pytest.mark.parametrize("seed", range(5))
def test_impulse_response_discrete_fft_oracle(seed):
    rng = np.random.default_rng(seed)
    G = random_stable_discrete(rng, int(rng.integers(2, 7)), feedthrough=True)
    N = 1024
    y = impulse_response_discrete(G, N)
    z = np.exp(2j * np.pi * np.arange(N) / N)
    np.testing.assert_allclose(np.fft.fft(y), eval_discrete(G, z), atol=1e-8)


def test_step_response_continuous_first_order():
    t = np.linspace(0, 5, 51)
    np.testing.assert_allclose(step_response_continuous(SCALAR, t), 1 - np.exp(-t),
                               atol=1e-14)


def test_step_response_tds_double_integrator():
    A0 = np.array([[0.0, 0.0], [1.0, 0.0]])
    G = TimeDelayModel(A0, np.zeros((2, 2)), np.zeros((2, 2)), [[1.0], [0.0]], [[0.0, 1.0]],
                       1.2, 0.3)
    t, y = step_response_tds(G, 5.0, 0.01)
    np.testing.assert_allclose(y, t ** 2 / 2, atol=1e-12)


def test_step_response_tds_long_delays_inactive():
    G = network_tds(tau=50.0, gamma=10.0)
    t, y = step_response_tds(G, 10.0, 0.01)
    np.testing.assert_allclose(y, t ** 2 / 2, atol=1e-12)


def test_step_response_tds_final_value():
    G = network_tds()
    t, y = step_response_tds(G, 300.0, 0.02)
    final = -(G.C @ np.linalg.solve(G.A0 + G.A1 + G.A2, G.B)).item()
    assert final == pytest.approx(4.0)
    assert y[-1] == pytest.approx(final, abs=1e-3)


def test_step_response_tds_dt_halving():
    G = network_tds()
    _, y1 = step_response_tds(G, 30.0, 0.004)
    _, y2 = step_response_tds(G, 30.0, 0.002)
    assert np.max(np.abs(y1 - y2[::2])) < 1e-5


def test_step_response_tds_grid_checks():
    G = network_tds()
    with pytest.raises(ValueError):
        step_response_tds(G, 10.0, 0.07)     # 1.2 / 0.07 not an integer
    with pytest.raises(ValueError):
        step_response_tds(G, 10.0, 0.1)      # gamma = 0.3 < 10 dt
    with pytest.raises(ValueError):
        step_response_tds(G, -1.0, 0.01)
    with pytest.raises(ValueError):
        step_response_tds(G, 1.0, 0.0)


def test_sample_and_hold_staircase():
    Gd = DiscreteStateSpace(np.zeros((0, 0)), np.zeros((0, 1)), np.zeros((1, 0)), [[1.0]], 0.5)
    t = np.arange(0, 2.0001, 0.1)
    u = np.sin(t)
    y = sample_and_hold_output(Gd, t, u)
    np.testing.assert_allclose(y, np.sin(np.floor(t / 0.5 + 1e-9) * 0.5))


def test_sample_and_hold_dc_and_zero():
    Gd = DiscreteStateSpace([[0.5]], [[1.0]], [[1.0]], [[0.2]], 0.1)
    t = np.arange(0, 20.001, 0.01)
    y = sample_and_hold_output(Gd, t, 3.0 * np.ones_like(t))
    assert y[-1] == pytest.approx(3.0 * eval_discrete(Gd, 1.0).real)
    assert np.all(sample_and_hold_output(Gd, t, np.zeros_like(t)) == 0)


def test_sample_and_hold_misaligned_grid():
    Gd = DiscreteStateSpace([[0.5]], [[1.0]], [[1.0]], [[0.0]], 0.1)
    with pytest.raises(ValueError):
        sample_and_hold_output(Gd, np.arange(0, 1, 0.03), np.ones(34))


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=1, max_size=30))
def test_discrete_lsim_is_convolution(u):
    Gd = DiscreteStateSpace([[0.5, 0.1], [0.0, -0.3]], [[1.0], [1.0]], [[1.0, 2.0]], [[0.4]])
    g = impulse_response_discrete(Gd, len(u))
    np.testing.assert_allclose(discrete_lsim(Gd, u), np.convolve(u, g)[:len(u)], atol=1e-9)


# --- JSON ---------------------------------------------------------------------------------

@pytest.mark.parametrize("model", [fourth_order_plant(), network_tds(),
                                   DiscreteStateSpace([[0.5]], [[1.0]], [[2.0]], [[0.1]], 0.3)])
def test_json_round_trip(tmp_path, model):
    path = tmp_path / "m.json"
    dump_model(model, path, note="x")
    back = load_model(path)
    assert type(back) is type(model)
    for key, val in model_to_dict(model).items():
        if key != "type":
            np.testing.assert_array_equal(np.asarray(model_to_dict(back)[key]), np.asarray(val))
    assert json.loads(path.read_text())["note"] == "x"


def test_json_bad_type():
    with pytest.raises(ValueError):
        model_from_dict({"type": "foo"})
