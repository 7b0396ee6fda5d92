import numpy as np
import pytest

from loewner_c2d.exceptions import NonSplittableError, NumericFailure
from loewner_c2d.models import DiscreteStateSpace, eval_discrete, is_stable, poles
from loewner_c2d.stabilize import (continuous_to_discrete, discrete_to_continuous,
                                   hankel_spectrum_antistable, l2_truncate, linf_distance,
                                   nehari_project, split_stable_antistable)
from randmodels import (random_antistable_discrete, random_mixed_discrete,
                        random_stable_discrete)

Z20 = np.exp(1j * np.random.default_rng(123).uniform(-np.pi, np.pi, 20))


def first_order(a, b=1.0, c=1.0, d=0.0):
    return DiscreteStateSpace([[a]], [[b]], [[c]], [[d]], 1.0)


def diag_example():
    return DiscreteStateSpace(np.diag([0.5, 2.0]), [[1.0], [1.0]], [[1.0, 1.0]], [[0.0]], 1.0)


# --- split ---------------------------------------------------------------------------

def test_split_stable_input():
    G = random_stable_discrete(np.random.default_rng(0), 4)
    sp = split_stable_antistable(G)
    assert sp.antistable.order == 0
    assert np.all(eval_discrete(sp.antistable, Z20) == 0)
    assert sp.stable is G


def test_split_diag_partial_fractions():
    sp = split_stable_antistable(diag_example())
    # 1/(z - 0.5) + 1/(z - 2)
    np.testing.assert_allclose(eval_discrete(sp.stable, Z20), 1 / (Z20 - 0.5), rtol=1e-12)
    np.testing.assert_allclose(eval_discrete(sp.antistable, Z20), 1 / (Z20 - 2), rtol=1e-12)


@pytest.mark.parametrize("seed", range(100))
def test_split_additivity(seed):
    rng = np.random.default_rng(seed)
    nu = int(rng.integers(1, 4))
    G = random_mixed_discrete(rng, int(rng.integers(nu, 9)), nu)
    sp = split_stable_antistable(G)
    whole = eval_discrete(G, Z20)
    parts = eval_discrete(sp.stable, Z20) + eval_discrete(sp.antistable, Z20)
    np.testing.assert_allclose(parts, whole, rtol=1e-8, atol=1e-10 * np.abs(whole).max())
    assert np.all(np.abs(poles(sp.stable)) < 1)
    assert np.all(np.abs(poles(sp.antistable)) > 1)
    assert sp.antistable.order == nu
    assert np.all(sp.antistable.D == 0)


def test_split_boundary_pole():
    with pytest.raises(NonSplittableError) as info:
        split_stable_antistable(first_order(1.0 + 1e-10))
    assert info.value.pole == pytest.approx(1.0)


# --- L2 truncation -------------------------------------------------------------------

def test_l2_truncate_cases():
    G = random_stable_discrete(np.random.default_rng(1), 3)
    assert l2_truncate(G) is G
    T = l2_truncate(diag_example())
    assert T.order == 1
    np.testing.assert_allclose(eval_discrete(T, Z20), 1 / (Z20 - 0.5), rtol=1e-12)
    T = l2_truncate(first_order(3.0, d=0.7))
    assert T.order == 0
    np.testing.assert_allclose(eval_discrete(T, Z20), 0.7)


# --- Hankel spectrum -------------------------------------------------------------------

def test_hankel_first_order_closed_form():
    a, b, c = 2.5, 0.7, -1.3
    hs = hankel_spectrum_antistable(first_order(a, b, c))
    np.testing.assert_allclose(hs.values, [abs(b * c) / (a ** 2 - 1)], rtol=1e-12)
    assert hs.q == 1


def test_hankel_empty_and_not_antistable():
    sp = split_stable_antistable(random_stable_discrete(np.random.default_rng(2), 2))
    hs = hankel_spectrum_antistable(sp.antistable)
    assert hs.values.size == 0 and hs.q == 0 and hs.sigma_max == 0.0
    with pytest.raises(ValueError):
        hankel_spectrum_antistable(first_order(0.5))


@pytest.mark.parametrize("seed", range(5))
def test_hankel_matrix_oracle(seed):
    rng = np.random.default_rng(seed)
    anti = random_antistable_discrete(rng, 3)
    hs = hankel_spectrum_antistable(anti)
    # Markov parameters of anti(1/z): z^-k coefficient is -C A^-(k+1) B, k >= 1
    Ai = np.linalg.inv(anti.A)
    g = [(-anti.C @ np.linalg.matrix_power(Ai, k + 2) @ anti.B).item() for k in range(200)]
    H = np.array([[g[i + j] for j in range(100)] for i in range(100)])
    s = np.linalg.svd(H, compute_uv=False)[:3]
    np.testing.assert_allclose(hs.values, s, rtol=1e-6)
    assert np.all(np.diff(hs.values) <= 0)


# --- Moebius map -----------------------------------------------------------------------

@pytest.mark.parametrize("alpha", [0.25, 1.0, 4.0])
def test_moebius_round_trip(alpha):
    rng = np.random.default_rng(3)
    G = random_mixed_discrete(rng, 5, 2)
    Ac, Bc, Cc, Dc = discrete_to_continuous(G.A, G.B, G.C, G.D, alpha)
    s = 1j * rng.uniform(0.1, 10, 20)
    z = (alpha + s) / (alpha - s)
    gc = (Cc @ np.linalg.solve(s[:, None, None] * np.eye(5) - Ac, Bc))[:, 0, 0] + Dc.item()
    np.testing.assert_allclose(gc, eval_discrete(G, z), rtol=1e-10)
    back = DiscreteStateSpace(*continuous_to_discrete(Ac, Bc, Cc, Dc, alpha), G.h)
    np.testing.assert_allclose(eval_discrete(back, Z20), eval_discrete(G, Z20), rtol=1e-10)


# --- Nehari ----------------------------------------------------------------------------

def test_nehari_stable_input_unchanged():
    G = random_stable_discrete(np.random.default_rng(4), 4)
    assert nehari_project(G) is G


def test_nehari_first_order_antistable():
    G = first_order(2.0)
    P = nehari_project(G)
    assert P.order == 0
    sigma = 1.0 / (2.0 ** 2 - 1)
    assert linf_distance(G, P) == pytest.approx(sigma, rel=1e-6)


@pytest.mark.parametrize("seed", range(20))
def test_nehari_certificate_and_order(seed):
    rng = np.random.default_rng(1000 + seed)
    nu = int(rng.integers(1, 4))
    G = random_mixed_discrete(rng, int(rng.integers(nu, 9)), nu)
    sp = split_stable_antistable(G)
    hs = hankel_spectrum_antistable(sp.antistable)
    P = nehari_project(G)
    assert is_stable(P)
    assert linf_distance(G, P) == pytest.approx(hs.sigma_max, rel=1e-5)
    assert P.order == sp.stable.order + sp.antistable.order - hs.q
    # truncating the antistable part is never better in L-infinity
    assert linf_distance(G, l2_truncate(G)) >= linf_distance(G, P) - 1e-9


def test_nehari_rejects_mimo_and_reports_failure():
    G = DiscreteStateSpace([[2.0]], [[1.0, 1.0]], [[1.0]], [[0.0, 0.0]], 1.0)
    with pytest.raises(ValueError, match="SISO"):
        nehari_project(G)
    with pytest.raises(NumericFailure) as info:
        nehari_project(first_order(2.0), rtol=-1.0)
    assert len(info.value.diagnostics) == 5
