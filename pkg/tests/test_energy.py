import dataclasses
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bubblekit.ansatz import BubbleConfig
from bubblekit.config import ConfigError, PotentialSpec, SystemConfig
from bubblekit.energy import (
    angular_moment,
    ansatz_energy,
    ball_rule,
    bubble_fields,
    chord_sum,
    energy_functional,
    expansion_constants,
    interaction_sum,
    lambda_star,
    locate_critical_point,
    pair_integral,
    reduced_energy,
    ring_constant,
)
from bubblekit.quadrature import radial_integral

N = 5


def talenti(r):
    return (1 + np.asarray(r) ** 2 / 15) ** -1.5


@pytest.fixture(scope="module")
def A_closed():
    return 0.4 * radial_integral(lambda r: talenti(r) ** (10 / 3), N, 1e6)


@pytest.fixture(scope="module")
def consts(gs_sym, well5):
    return expansion_constants(gs_sym, well5)


def test_A_matches_closed_form(consts, A_closed):
    assert consts.A == pytest.approx(A_closed, rel=1e-7)
    assert consts.A == pytest.approx(337.744, rel=1e-5)


def test_constants_positive(consts):
    for name in ("A", "Bbar1", "Bbar2", "Btil1", "Btil2", "B1", "B2", "B3"):
        assert getattr(consts, name) > 0, name
    assert consts.B4 == pytest.approx(consts.B2 * consts.B3)
    assert consts.lambda0 > 0


def test_Btil_for_m2(gs_sym, consts):
    # m = 2: the quadratic coefficient is c * int U^(q+1) / (q+1)
    assert consts.Btil2 == pytest.approx(consts.diagnostics["int_U_q1"] / (gs_sym.q + 1), rel=1e-10)


@pytest.mark.parametrize("m", [0.0, 1.0, 2.0, 2.5])
def test_angular_moment_against_direct_sum(m):
    rng = np.random.default_rng(1)
    x = rng.normal(size=(400000, N))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    assert angular_moment(N, m) == pytest.approx(np.mean(np.abs(x[:, 0]) ** m), rel=1e-2)
    if m == 2.0:
        assert angular_moment(N, m) == pytest.approx(1 / N, rel=1e-14)


def test_energy_functional_zero(flat5):
    zero = lambda y: (np.zeros(len(y)), np.zeros(len(y)), np.zeros(y.shape), np.zeros(y.shape))
    val = energy_functional(zero, flat5, 1.0, lambda lev: ball_rule(N, np.zeros(N), 100.0, *lev))
    assert val.value == 0.0


@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
def test_energy_functional_single_bubble(gs_sym, flat5, A_closed, lam):
    f = bubble_fields(gs_sym, np.zeros(N), lam)
    rule = lambda lev: ball_rule(N, np.zeros(N), 1e4 / lam, *lev, r_core=1 / lam)
    val = energy_functional(f, flat5, 1.0, rule, levels=((30, 4), (40, 4)))
    assert val.value == pytest.approx(A_closed, rel=1e-4)


def test_energy_functional_needs_gradients(gs_sym, flat5):
    f = lambda y: (np.ones(len(y)), np.ones(len(y)), None, None)
    with pytest.raises(ValueError):
        energy_functional(f, flat5, 1.0, lambda lev: ball_rule(N, np.zeros(N), 10.0, *lev))


def test_pair_integral_halving_law(gs_sym):
    ratio = pair_integral(gs_sym, 80.0) / pair_integral(gs_sym, 160.0)
    assert ratio == pytest.approx(2**3, rel=0.05)


def test_chord_sums():
    assert chord_sum(2, 3.0, N) == pytest.approx(6.0**-3)
    assert chord_sum(4, 1.0, N) == pytest.approx(2 * 2**-1.5 + 2**-3)
    assert chord_sum(4, 1.0, N) == pytest.approx(0.8321, abs=1e-4)


def test_ring_constant_fit():
    rs = interaction_sum(256, 7.0, N, fit_ks=(64, 128, 256, 512, 1024))
    assert abs(rs.slope - 3) <= 0.02
    assert rs.B3 == pytest.approx(ring_constant(N), rel=1e-2)


def test_lambda_star_examples(consts):
    unit = dataclasses.replace(consts, Bbar1=0.0, Bbar2=1.0, m1=float("nan"), m2=2.0, B2=1.0, B3=1.0, r0=1.0)
    assert lambda_star(unit) == pytest.approx(1.5)
    assert lambda_star(dataclasses.replace(unit, B2=2 / 3)) == pytest.approx(1.0)
    assert lambda_star(dataclasses.replace(unit, B2=2.0)) == pytest.approx(3.0)  # 2^(1/(N-2-m)) = 2


@given(st.floats(0.1, 10.0))
def test_lambda_star_homogeneous(consts, c):
    scaled = dataclasses.replace(consts, Bbar1=c * consts.Bbar1, Bbar2=c * consts.Bbar2, B2=c * consts.B2)
    assert lambda_star(scaled) == pytest.approx(lambda_star(consts), rel=1e-12)


def test_lambda_star_rejects_large_m(consts):
    with pytest.raises(ConfigError):
        lambda_star(dataclasses.replace(consts, m1=3.0, m2=3.0))


def cfg(config, k, lam, dr=0.0):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        mu = config.mu(k)
        return BubbleConfig(k, mu * config.r0 - dr, lam, mu, config.r0)


def test_reduced_energy_large_lambda(consts, well5):
    assert reduced_energy(consts, cfg(well5, 4, 1e6)) == pytest.approx(4 * consts.A, rel=1e-12)


def test_reduced_energy_quadratic_in_r(consts, well5):
    k, lam, dr = 4, 1.3, 0.02
    c0, c1 = cfg(well5, k, lam), cfg(well5, k, lam, dr)
    diff = reduced_energy(consts, c1, "asymptotic") - reduced_energy(consts, c0, "asymptotic")
    expected = k * (consts.Btil1 + consts.Btil2) / (lam**0 * c0.mu**2) * dr**2
    assert diff == pytest.approx(expected, rel=1e-9)


def test_reduced_energy_stationary_at_lambda0(consts, well5):
    lam0, h = consts.lambda0, 1e-5
    F = lambda lam: reduced_energy(consts, cfg(well5, 8, lam), "asymptotic")
    assert abs(F(lam0 + h) - F(lam0 - h)) / (2 * h) <= 1e-8 * abs(F(lam0))
    lams = np.linspace(0.3, 4.5, 200)
    dF = np.gradient([F(x) for x in lams], lams)
    assert np.count_nonzero(np.diff(np.sign(dF))) == 1


def test_critical_point(consts, well5):
    k = 8
    cp = locate_critical_point(consts, k, well5.mu(k))
    assert cp.r == pytest.approx(well5.mu(k) * well5.r0, abs=1e-10)
    assert cp.lam == pytest.approx(consts.lambda0, abs=1e-10)


def test_critical_point_sensitivity(consts, well5):
    k = 8
    base = locate_critical_point(consts, k, well5.mu(k)).lam
    eps = 1e-3
    bumped = dataclasses.replace(consts, Bbar1=consts.Bbar1 * (1 + eps), Bbar2=consts.Bbar2 * (1 + eps))
    moved = locate_critical_point(bumped, k, well5.mu(k)).lam
    assert (moved - base) / base / eps == pytest.approx(-1 / (N - 2 - 2), rel=1e-2)


def test_ansatz_energy_single_bubble(gs_sym, flat5, A_closed):
    e = ansatz_energy(gs_sym, BubbleConfig(1, 5.0, 1.0, 1.0), flat5)
    assert e.value == pytest.approx(A_closed, abs=max(10 * e.error, 1e-6 * A_closed))


def test_ansatz_energy_pair_interaction(gs_sym, flat5, consts):
    r = 30.0
    e = ansatz_energy(gs_sym, BubbleConfig(2, r, 1.0, r), flat5, A=consts.A)
    predicted = -2 * consts.B1 * (2 * r) ** -3
    assert e.delta < 0
    assert e.delta == pytest.approx(predicted, rel=0.1)


def test_ansatz_energy_well_terms(gs_sym, well5, consts):
    # one bubble at the bottom of the well: I - A ~ Bbar1/mu^m1 + Bbar2/mu^m2
    mu = 20.0
    e = ansatz_energy(gs_sym, BubbleConfig(1, mu, 1.0, mu), well5, A=consts.A)
    assert e.delta == pytest.approx((consts.Bbar1 + consts.Bbar2) / mu**2, rel=0.15)


def test_potential_condition_predicate():
    from bubblekit.config import potential_condition

    assert potential_condition(PotentialSpec(1.0, 1.0, 2.0), N) != 0
    assert np.isfinite(potential_condition(PotentialSpec(1.0, 1.0, 2.5, delta=0.4), N))


def test_flat_constants_without_potentials(gs_sym):
    c = expansion_constants(gs_sym, SystemConfig.symmetric(5))
    assert c.Bbar1 == 0 and c.Bbar2 == 0
