import json

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from bubblekit.config import (
    ConfigError,
    PotentialSpec,
    SystemConfig,
    check_assumption_P,
    eval_potential,
    load_config,
    partner_exponent,
    save_config,
    scaling_parameter,
    validate_hyperbola,
)


@pytest.mark.parametrize(
    "N,p,q,valid",
    [
        (5, 7 / 3, 7 / 3, True),
        (5, 2.25, 1 / (3 / 5 - 1 / 3.25) - 1, True),
        (5, 2.25, 2.25, False),
        (6, 2.0, 2.0, True),
        (5, 2.5, 1 / (3 / 5 - 1 / 3.5) - 1, False),  # on the curve but p above the symmetric point
    ],
)
def test_hyperbola_table(N, p, q, valid):
    rep = validate_hyperbola(N, p, q)
    assert rep.valid is valid
    if not valid:
        assert rep.errors


def test_hyperbola_signed_defect():
    rep = validate_hyperbola(5, 2.25, 2.25)
    assert rep.defect == pytest.approx(2 / 3.25 - 3 / 5, abs=1e-15)
    with pytest.raises(ConfigError):
        rep.raise_if_invalid()


def test_dimension_too_small():
    assert any("dimension" in e for e in validate_hyperbola(2, 3.0, 3.0).errors)
    with pytest.raises(ConfigError, match="dimension"):
        SystemConfig(4, 3.0, 3.0)


@pytest.mark.parametrize("N,p,q", [(5, 7 / 3, 7 / 3), (6, 2.0, 2.0), (5, 2.25, 2.4210526315789473)])
def test_partner_exponent(N, p, q):
    assert partner_exponent(N, p) == pytest.approx(q, rel=1e-12)


def test_partner_exponent_rejects_large_p():
    with pytest.raises(ConfigError):
        partner_exponent(5, 2.5)


@given(st.integers(5, 9), st.floats(0.0, 1.0))
def test_partner_lies_on_hyperbola(N, t):
    crit = (N + 2) / (N - 2)
    p = N / (N - 2) * 0.8 + t * (crit - N / (N - 2) * 0.8)
    assume(p > 1.0)
    q = partner_exponent(N, p)
    assert q >= crit - 1e-12
    assert validate_hyperbola(N, p, q).valid


@given(st.floats(2.2, 7 / 3))
def test_partner_is_involution_at_crit(p):
    # the map is symmetric: swapping roles returns p whenever the partner is admissible
    q = partner_exponent(5, p)
    assert abs(1 / (p + 1) + 1 / (q + 1) - 3 / 5) <= 1e-12
    if q <= 7 / 3 + 1e-12:
        assert partner_exponent(5, q) == pytest.approx(p, abs=1e-12)


@pytest.mark.parametrize(
    "N,p,m,passed",
    [
        (5, 2.25, 2, True),
        (5, 2.0, 2, False),
        (5, 13 / 6, 2, False),
        (5, 7 / 3, 2, True),
        (6, 1.9, 2, True),
        (6, 1.7, 2, False),
    ],
)
def test_assumption_P_table(N, p, m, passed):
    assert check_assumption_P(N, p, m).passed is passed


def test_assumption_P_bounds_N6():
    rep = check_assumption_P(6, 1.9, 2)
    # max{(N+1)/(N-2), N(N-2)/((N-2)^2-(N-2-m))} = max{7/4, 24/14}
    assert rep.lower_bound == pytest.approx(7 / 4)


@pytest.mark.parametrize("r,expected", [(1.0, 1.0), (1.1, 0.99), (0.7, 0.91)])
def test_potential_inside_window(r, expected):
    spec = PotentialSpec(r0=1.0, c=1.0, m=2.0, delta=0.5)
    assert eval_potential(spec, r) == pytest.approx(expected, abs=1e-14)


def test_potential_nonpositive_clamp_rejected():
    with pytest.raises(ConfigError):
        PotentialSpec(r0=1.0, c=4.0, m=2.0, delta=0.5)


def test_potential_negative_radius():
    with pytest.raises(ConfigError):
        eval_potential(PotentialSpec(1.0, 1.0, 2.0), -0.1)


def test_flat_potential_is_one():
    assert np.all(eval_potential(None, np.linspace(0, 5, 7)) == 1.0)


@given(
    st.floats(0.5, 3.0),
    st.floats(0.1, 2.0),
    st.floats(2.0, 2.9),
    st.floats(0.05, 0.6),
    st.sampled_from(["clamp", "smooth_decay"]),
    st.lists(st.floats(0.0, 10.0), min_size=1, max_size=20),
)
def test_potential_range(r0, c, m, delta, outside, rs):
    assume(1 - c * delta**m * (1 + m) > 0.01)
    spec = PotentialSpec(r0=r0, c=c, m=m, delta=delta, outside=outside)
    vals = eval_potential(spec, np.array(rs))
    assert np.all(vals > 0) and np.all(vals <= 1.0)
    assert eval_potential(spec, r0) == 1.0


@pytest.mark.parametrize("outside", ["clamp", "smooth_decay"])
def test_potential_derivative_matches_difference(outside):
    spec = PotentialSpec(r0=1.0, c=1.0, m=2.5, delta=0.5, outside=outside)
    r = np.array([0.6, 0.9, 1.2, 1.45, 1.7, 2.5])
    h = 1e-6
    fd = (eval_potential(spec, r + h) - eval_potential(spec, r - h)) / (2 * h)
    assert np.allclose(spec.derivative(r), fd, atol=1e-6)


@pytest.mark.parametrize("k,N,m,mu", [(10, 5, 2, 1000.0), (1, 5, 2, 1.0), (1, 7, 3.5, 1.0), (16, 6, 2, 256.0)])
def test_scaling_parameter(k, N, m, mu):
    assert scaling_parameter(k, N, m) == pytest.approx(mu, rel=1e-14)


def test_scaling_parameter_rejects_large_m():
    with pytest.raises(ConfigError):
        scaling_parameter(4, 5, 3.0)


@given(st.integers(1, 200), st.floats(2.0, 2.9))
def test_scaling_parameter_monotone(k, m):
    assert scaling_parameter(k + 1, 5, m) > scaling_parameter(k, 5, m)
    if k > 1:
        assert scaling_parameter(k, 5, m + 0.05) > scaling_parameter(k, 5, m)


def test_config_roundtrip(tmp_path):
    spec = PotentialSpec(r0=1.5, c=0.5, m=2.5, delta=0.4, outside="smooth_decay")
    cfg = SystemConfig.from_p(5, 2.25, potential1=spec, potential2=spec)
    path = tmp_path / "c.json"
    save_config(cfg, path)
    assert json.loads(path.read_text())["format_version"] == 1
    back = load_config(path)
    assert back == cfg and back.digest() == cfg.digest()


def test_config_requires_shared_r0():
    with pytest.raises(ConfigError):
        SystemConfig.symmetric(5, potential1=PotentialSpec(1.0, 1.0, 2.0), potential2=PotentialSpec(2.0, 1.0, 2.0))


def test_config_partner_from_missing_q():
    cfg = SystemConfig.from_dict({"N": 5, "p": 2.25})
    assert cfg.q == pytest.approx(2.4210526315789473)
    assert cfg.decay_case == "super"
