import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bubblekit.ansatz import BubbleConfig, polygon_points
from bubblekit.pohozaev import (
    FieldPair,
    PohozaevDomain,
    PotentialField,
    ReducedSolution,
    boundary_quadrature,
    bubble_pair,
    dilation_defect,
    dilation_kernel_pair,
    pohozaev_dilation,
    pohozaev_translation,
    refinement_study,
    translation_defect,
    translation_kernel_pair,
)
from bubblekit.reduction import solve_nonlinear_contraction

N = 5
FLAT = PotentialField()
SPHERE4 = 8 * np.pi**2 / 3  # |S^4|


def summed(pairs):
    def value(y):
        vals = [f.value(y) for f in pairs]
        return sum(v[0] for v in vals), sum(v[1] for v in vals)

    def gradient(y):
        vals = [f.gradient(y) for f in pairs]
        return sum(v[0] for v in vals), sum(v[1] for v in vals)

    return FieldPair(value, gradient)


# quadrature -----------------------------------------------------------------


@pytest.mark.parametrize("R", [0.5, 1.0, 3.0])
def test_sphere_area(R):
    dom = PohozaevDomain("ball", (0.3, 0, 0, -1, 0), (R,))
    q = boundary_quadrature(dom, lambda y, nu: np.ones(len(y)), N)
    assert q.value == pytest.approx(SPHERE4 * R**4, rel=1e-10)


def test_annulus_area():
    dom = PohozaevDomain("annulus", (0.0,) * N, (1.0, 2.0))
    # the inner sphere contributes with its own area, the sign lives in the normal
    q = boundary_quadrature(dom, lambda y, nu: np.sum(nu * y, axis=1), N)
    assert q.value == pytest.approx(SPHERE4 * (2.0**5 - 1.0), rel=1e-10)


def test_odd_integrand_vanishes():
    c = np.array([1.0, -2.0, 0.5, 0, 0])
    dom = PohozaevDomain("ball", tuple(c), (2.0,))
    q = boundary_quadrature(dom, lambda y, nu: (y[:, 2] - c[2]) ** 3, N)
    assert abs(q.value) <= 1e-12


@pytest.mark.parametrize("k", [2, 3, 8])
def test_sector_cell_measures(k):
    R = 1.7
    dom = PohozaevDomain("sector_cell", (0.0,) * N, (R,), k=k)
    faces = dom.faces(N, 8)
    half_ball4 = 0.5 * np.pi**2 / 2 * R**4
    assert np.sum(faces["wedge+"][2]) == pytest.approx(half_ball4, rel=1e-10)
    assert np.sum(faces["wedge-"][2]) == pytest.approx(half_ball4, rel=1e-10)
    assert np.sum(faces["cap"][2]) == pytest.approx(SPHERE4 * R**4 / k, rel=1e-10)
    _, w = dom.volume(N, 8)
    assert np.sum(w) == pytest.approx(SPHERE4 / 5 * R**5 / k, rel=1e-10)
    for name in ("wedge+", "wedge-"):
        y, nu, _ = faces[name]
        assert np.max(np.abs(np.sum(nu * y, axis=1))) <= 1e-12


def test_boundary_rejects_nonfinite():
    dom = PohozaevDomain("ball", (0.0,) * N, (1.0,))
    with pytest.raises(ValueError):
        boundary_quadrature(dom, lambda y, nu: np.full(len(y), np.nan), N)


@pytest.mark.parametrize(
    "text,kind",
    [("ball:0:5", "ball"), ("ball:1,2:1.5", "ball"), ("annulus:0:1:2", "annulus"), ("sector:4:3", "sector_cell")],
)
def test_domain_parse(text, kind):
    dom = PohozaevDomain.parse(text, N)
    assert dom.kind == kind and len(dom.center) == N


@pytest.mark.parametrize(
    "args",
    [("disc", (), (1.0,)), ("ball", (), (-1.0,)), ("annulus", (), (2.0, 1.0))],
)
def test_domain_rejects(args):
    with pytest.raises(ValueError):
        PohozaevDomain(*args)
    with pytest.raises(ValueError):
        PohozaevDomain("sector_cell", (), (1.0,), k=1)


# exact pairs ----------------------------------------------------------------

CENTER = np.array([0.7, 0.4, 0, 0, 0])
BALL = PohozaevDomain("ball", (0.0,) * N, (5.0,))


def kernels(gs, c):
    return {"dilation": dilation_kernel_pair(gs, c), "translation": translation_kernel_pair(gs, c, 0)}


@pytest.mark.parametrize("which", ["gs_sym", "gs_asym"])
@pytest.mark.parametrize("kernel", ["dilation", "translation"])
def test_exact_pair_translation_identity(which, kernel, request):
    gs = request.getfixturevalue(which)
    v, xi = bubble_pair(gs, CENTER), kernels(gs, CENTER)[kernel]
    st_ = refinement_study(lambda n: pohozaev_translation(v, xi, FLAT, FLAT, BALL, 0, gs.p, gs.q, N, n))
    assert st_.finest <= 1e-4
    assert st_.order >= 2


@pytest.mark.parametrize("which", ["gs_sym", "gs_asym"])
@pytest.mark.parametrize("kernel", ["dilation", "translation"])
def test_exact_pair_dilation_identity(which, kernel, request):
    gs = request.getfixturevalue(which)
    v, xi = bubble_pair(gs, CENTER), kernels(gs, CENTER)[kernel]
    st_ = refinement_study(lambda n: pohozaev_dilation(v, xi, FLAT, FLAT, BALL, np.zeros(N), gs.p, gs.q, N, n))
    assert st_.finest <= 1e-4 * max(1.0, st_.scale / 100)
    assert st_.order >= 2


def test_identity_detects_wrong_pair(gs_sym):
    # a kernel pair centred away from the solution is not a linearization at it
    v, xi = bubble_pair(gs_sym, CENTER), dilation_kernel_pair(gs_sym, CENTER + 1.0)
    rep = pohozaev_dilation(v, xi, FLAT, FLAT, BALL, np.zeros(N), gs_sym.p, gs_sym.q, N, 16)
    assert rep.residual > 1e3 * rep.error


def test_swapped_pairing_equivalent_when_symmetric(gs_sym):
    v, xi = bubble_pair(gs_sym, CENTER), dilation_kernel_pair(gs_sym, CENTER)
    a = pohozaev_dilation(v, xi, FLAT, FLAT, BALL, np.zeros(N), gs_sym.p, gs_sym.q, N, 8)
    b = pohozaev_dilation(v, xi, FLAT, FLAT, BALL, np.zeros(N), gs_sym.p, gs_sym.q, N, 8, pairing="swapped")
    assert a.residual == pytest.approx(b.residual, abs=1e-12)


def test_swapped_pairing_breaks_for_unequal_exponents(gs_asym):
    v, xi = bubble_pair(gs_asym, CENTER), dilation_kernel_pair(gs_asym, CENTER)
    derived = pohozaev_dilation(v, xi, FLAT, FLAT, BALL, np.zeros(N), gs_asym.p, gs_asym.q, N, 16)
    swapped = pohozaev_dilation(v, xi, FLAT, FLAT, BALL, np.zeros(N), gs_asym.p, gs_asym.q, N, 16, pairing="swapped")
    assert derived.residual <= 1e-6
    assert swapped.residual > 1e-2


def test_dilation_rejects_off_hyperbola(gs_sym):
    v, xi = bubble_pair(gs_sym, CENTER), dilation_kernel_pair(gs_sym, CENTER)
    with pytest.raises(ValueError, match="hyperbola"):
        pohozaev_dilation(v, xi, FLAT, FLAT, BALL, np.zeros(N), 2.25, 2.25, N)
    with pytest.raises(ValueError, match="pairing"):
        pohozaev_dilation(v, xi, FLAT, FLAT, BALL, np.zeros(N), gs_sym.p, gs_sym.q, N, pairing="other")


@settings(max_examples=8)
@given(st.lists(st.floats(-3, 3), min_size=N, max_size=N))
def test_dilation_translation_covariant(gs_asym, shift):
    s = np.array(shift)
    base = pohozaev_dilation(
        bubble_pair(gs_asym, CENTER), dilation_kernel_pair(gs_asym, CENTER), FLAT, FLAT,
        PohozaevDomain("ball", tuple(CENTER + 0.5), (2.0,)), CENTER + 0.2, gs_asym.p, gs_asym.q, N, 6,
    )
    moved = pohozaev_dilation(
        bubble_pair(gs_asym, CENTER + s), dilation_kernel_pair(gs_asym, CENTER + s), FLAT, FLAT,
        PohozaevDomain("ball", tuple(CENTER + 0.5 + s), (2.0,)), CENTER + 0.2 + s, gs_asym.p, gs_asym.q, N, 6,
    )
    assert moved.lhs == pytest.approx(base.lhs, rel=1e-9, abs=1e-9)
    assert moved.rhs == pytest.approx(base.rhs, rel=1e-9, abs=1e-9)


def test_annulus_additivity(gs_asym):
    v, xi = bubble_pair(gs_asym, CENTER), translation_kernel_pair(gs_asym, CENTER, 1)
    c = (0.0,) * N
    rep = lambda dom: pohozaev_translation(v, xi, FLAT, FLAT, dom, 1, gs_asym.p, gs_asym.q, N, 8)
    outer, inner = rep(PohozaevDomain("ball", c, (4.0,))), rep(PohozaevDomain("ball", c, (2.0,)))
    ann = rep(PohozaevDomain("annulus", c, (2.0, 4.0)))
    assert ann.lhs == pytest.approx(outer.lhs - inner.lhs, abs=1e-12 * max(1.0, abs(outer.lhs)))


def test_sector_cell_identity(gs_sym):
    k = 2
    centers = polygon_points(k, 6.0, N)
    v = summed([bubble_pair(gs_sym, x) for x in centers])
    xi = summed([dilation_kernel_pair(gs_sym, x) for x in centers])
    dom = PohozaevDomain("sector_cell", (0.0,) * N, (12.0,), k=k)
    rep = pohozaev_translation(v, xi, FLAT, FLAT, dom, 0, gs_sym.p, gs_sym.q, N, 8)
    # reflection symmetry across each wedge face kills every normal derivative there
    for face in ("wedge+", "wedge-"):
        assert abs(rep.breakdown[f"normal_derivative@{face}"]) <= 1e-10
    assert np.isfinite(rep.residual)


def test_potential_field_gradient(well5):
    K = PotentialField(well5.potential1, mu=3.0)
    rng = np.random.default_rng(4)
    y = rng.normal(scale=2, size=(20, N)) + [3, 0, 0, 0, 0]
    h = 1e-6
    fd = np.stack([(K.value(y + h * e) - K.value(y - h * e)) / (2 * h) for e in np.eye(N)], axis=1)
    assert np.allclose(K.gradient(y), fd, atol=1e-6)


def test_potential_field_flat():
    assert np.all(FLAT.value(np.ones((3, N))) == 1) and np.all(FLAT.gradient(np.ones((3, N))) == 0)


# reduced solutions ------------------------------------------------------------


@pytest.fixture(scope="module")
def reduced_k2(gs_sym, well5):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        cfg = BubbleConfig.at_well(well5, 2)
    res = solve_nonlinear_contraction(gs_sym, cfg, well5)
    return ReducedSolution(gs_sym, cfg, well5, res)


def test_reduced_solution_imbalance_matches_defect(reduced_k2):
    sol = reduced_k2
    c = sol.centers[0] + np.array([0.3, 0.5, 0.2, 0, 0])
    dom = PohozaevDomain("ball", tuple(c), (1.5,))
    p, q = sol.gs.p, sol.gs.q
    tr = pohozaev_translation(sol.v, sol.xi, sol.K1, sol.K2, dom, 0, p, q, N, 8)
    dt = translation_defect(sol, dom, 0, 8)
    assert abs((tr.lhs - tr.rhs) - dt.defect) <= 0.01 * dt.bound
    dl = pohozaev_dilation(sol.v, sol.xi, sol.K1, sol.K2, dom, c, p, q, N, 8)
    dd = dilation_defect(sol, dom, c, 8)
    assert abs((dl.lhs - dl.rhs) - dd.defect) <= 0.01 * dd.bound


def test_reduced_solution_xi_is_rotation_derivative(reduced_k2):
    sol = reduced_k2
    rng = np.random.default_rng(2)
    y = sol.centers[0] + rng.normal(scale=1.0, size=(10, N))
    h = 1e-5

    def rot(a):
        out = y.copy()
        out[:, 0] = np.cos(a) * y[:, 0] - np.sin(a) * y[:, 1]
        out[:, 1] = np.sin(a) * y[:, 0] + np.cos(a) * y[:, 1]
        return out

    fd = [(a - b) / (2 * h) for a, b in zip(sol.v.value(rot(h)), sol.v.value(rot(-h)))]
    xi = sol.xi.value(y)
    for i in range(2):
        assert np.allclose(xi[i], fd[i], atol=1e-6 * np.max(np.abs(sol.v.value(y)[i])))
