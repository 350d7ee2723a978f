"""Radial ground state of the limit system -Delta U = V^p, -Delta V = U^q.

The profile is found by shooting from the origin with U(0) = 1 and
bisecting on V(0): too large a V(0) drives U through zero first, too
small a V(0) does the same to V. Beyond ``r_match`` the tabulated
profile is replaced by the fitted far-field expansion.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import BPoly

from bubblekit.config import SystemConfig
from bubblekit.quadrature import gauss_panels, sphere_area

TABLE_FORMAT_VERSION = 1
_R_START = 1e-4


class SolverError(RuntimeError):
    """Shooting or extrapolation failed."""


@dataclass(frozen=True)
class TailModel:
    """f(r) = sum_i coef[i] * r^(-powers[i]) * log(r)^logs[i]."""

    coef: tuple[float, ...]
    powers: tuple[float, ...]
    logs: tuple[float, ...]

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        for c, s, j in zip(self.coef, self.powers, self.logs):
            out = out + c * r ** (-s) * np.log(r) ** j
        return out

    def deriv(self, r, order: int = 1):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        lr = np.log(r)
        for c, s, j in zip(self.coef, self.powers, self.logs):
            if order == 1:
                term = -s * lr**j
                if j:
                    term = term + j * lr ** (j - 1)
                out = out + c * r ** (-s - 1) * term
            elif order == 2:
                term = s * (s + 1) * lr**j
                if j:
                    term = term - (2 * s + 1) * j * lr ** (j - 1)
                if j not in (0, 1):
                    term = term + j * (j - 1) * lr ** (j - 2)
                out = out + c * r ** (-s - 2) * term
            else:
                raise ValueError("order must be 1 or 2")
        return out

    def to_dict(self) -> dict:
        return {"coef": list(self.coef), "powers": list(self.powers), "logs": list(self.logs)}

    @classmethod
    def from_dict(cls, d: dict) -> TailModel:
        return cls(tuple(d["coef"]), tuple(d["powers"]), tuple(float(x) for x in d["logs"]))


@dataclass(frozen=True)
class DecayConstants:
    a: float
    b: float
    decay_case: str
    a_err: float
    b_err: float
    tail_U: TailModel
    tail_V: TailModel
    # both sides of b^p = a((N-2)p-2)(N-(N-2)p); reported, never asserted
    relation_lhs: float = float("nan")
    relation_rhs: float = float("nan")


@dataclass(frozen=True, eq=False)
class GroundState:
    config: SystemConfig
    r: np.ndarray
    U: np.ndarray
    V: np.ndarray
    dU: np.ndarray
    dV: np.ndarray
    a: float
    b: float
    decay_case: str
    r_match: float
    tol: float = 1e-8
    a_err: float = 0.0
    b_err: float = 0.0
    tail_U: TailModel | None = None
    tail_V: TailModel | None = None
    residual: float = 0.0
    meta: dict = field(default_factory=dict)

    @property
    def N(self) -> int:
        return self.config.N

    @property
    def p(self) -> float:
        return self.config.p

    @property
    def q(self) -> float:
        return self.config.q

    @property
    def v0(self) -> float:
        return float(self.V[0])

    @property
    def expU(self) -> float:
        """Scaling exponent N/(q+1) of the U-bubble."""
        return self.N / (self.q + 1)

    @property
    def expV(self) -> float:
        return self.N / (self.p + 1)

    @cached_property
    def _second(self):
        N, p, q = self.N, self.p, self.q
        r = self.r
        with np.errstate(divide="ignore", invalid="ignore"):
            d2U = -np.abs(self.V) ** p - (N - 1) * self.dU / r
            d2V = -np.abs(self.U) ** q - (N - 1) * self.dV / r
        d2U[0] = -abs(self.V[0]) ** p / N
        d2V[0] = -abs(self.U[0]) ** q / N
        return d2U, d2V

    @cached_property
    def _interp(self):
        d2U, d2V = self._second
        iu = BPoly.from_derivatives(self.r, np.stack([self.U, self.dU, d2U], axis=1))
        iv = BPoly.from_derivatives(self.r, np.stack([self.V, self.dV, d2V], axis=1))
        return iu, iv

    def profile(self, r, order: int = 0):
        """(U, V) or their r-derivatives of the given order (0, 1, 2) at radii r."""
        r = np.asarray(r, dtype=float)
        iu, iv = self._interp
        inside = r <= self.r_match
        ri = np.where(inside, r, self.r_match)
        ro = np.where(inside, self.r_match, r)
        if order == 0:
            ui, vi = iu(ri), iv(ri)
        else:
            ui, vi = iu(ri, nu=order), iv(ri, nu=order)
        if self.tail_U is None:
            return ui, vi
        if order == 0:
            uo, vo = self.tail_U(ro), self.tail_V(ro)
        else:
            uo, vo = self.tail_U.deriv(ro, order), self.tail_V.deriv(ro, order)
        return np.where(inside, ui, uo), np.where(inside, vi, vo)

    def ode_residual(self) -> float:
        """Max |U'' + (N-1)U'/r + V^p| (and the V-counterpart) at grid midpoints."""
        rm = 0.5 * (self.r[1:] + self.r[:-1])
        rm = rm[rm < self.r_match]
        U, V = self.profile(rm)
        dU, dV = self.profile(rm, 1)
        d2U, d2V = self.profile(rm, 2)
        N = self.N
        r1 = d2U + (N - 1) * dU / rm + np.abs(V) ** self.p
        r2 = d2V + (N - 1) * dV / rm + np.abs(U) ** self.q
        return float(max(np.max(np.abs(r1)), np.max(np.abs(r2))))


def _rhs(N, p, q):
    def f(r, y):
        U, dU, V, dV = y
        return [
            dU,
            -np.sign(V) * abs(V) ** p - (N - 1) * dU / r,
            dV,
            -np.sign(U) * abs(U) ** q - (N - 1) * dV / r,
        ]

    return f


def _initial(N, p, q, beta, r0=_R_START):
    return [
        1.0 - beta**p * r0**2 / (2 * N),
        -(beta**p) * r0 / N,
        beta - r0**2 / (2 * N),
        -r0 / N,
    ]


def _shoot(cfg: SystemConfig, beta: float, r_max: float, rtol: float = 1e-13, dense: bool = False):
    N, p, q = cfg.N, cfg.p, cfg.q

    def hitU(r, y):
        return y[0]

    def hitV(r, y):
        return y[2]

    hitU.terminal = hitV.terminal = True
    return solve_ivp(
        _rhs(N, p, q),
        (_R_START, r_max),
        _initial(N, p, q, beta),
        method="DOP853",
        rtol=rtol,
        atol=1e-300,
        events=[hitU, hitV],
        dense_output=dense,
    )


def _shoot_fine(cfg: SystemConfig, beta: float, r_end: float, r_split: float = 1.0):
    """Dense solution with small steps near the origin, where the
    (N-1)U'/r term amplifies interpolation error."""
    N, p, q = cfg.N, cfg.p, cfg.q
    kw = dict(method="DOP853", rtol=1e-13, atol=1e-300, dense_output=True)
    s1 = solve_ivp(_rhs(N, p, q), (_R_START, r_split), _initial(N, p, q, beta), max_step=1e-3, **kw)
    s2 = solve_ivp(_rhs(N, p, q), (r_split, r_end), s1.y[:, -1], **kw)

    def sol(r):
        r = np.asarray(r, dtype=float)
        return np.where(r <= r_split, s1.sol(np.minimum(r, r_split)), s2.sol(np.maximum(r, r_split)))

    return sol


def _classify(sol) -> str:
    tU = sol.t_events[0][0] if len(sol.t_events[0]) else np.inf
    tV = sol.t_events[1][0] if len(sol.t_events[1]) else np.inf
    if np.isinf(tU) and np.isinf(tV):
        return "none"
    return "U" if tU < tV else "V"


def _kind(cfg: SystemConfig, beta: float, r_max: float) -> str:
    # no crossing yet: push further out before declaring a tie
    R = r_max
    while True:
        kind = _classify(_shoot(cfg, beta, R))
        if kind != "none" or R >= 1e8:
            return kind
        R *= 10


def _bracket(cfg: SystemConfig, r_max: float, max_iter: int):
    beta = 1.0
    kind = _kind(cfg, beta, r_max)
    if kind == "none":
        return beta, beta
    lo = hi = beta
    for _ in range(60):
        if kind == "U":
            hi, lo = lo, lo / 2
            kind = _kind(cfg, lo, r_max)
            if kind != "U":
                break
        else:
            lo, hi = hi, hi * 2
            kind = _kind(cfg, hi, r_max)
            if kind != "V":
                break
    else:
        raise SolverError("no sign-change bracket found for V(0); check the exponents")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            return lo, hi
        kind = _kind(cfg, mid, r_max)
        if kind == "U":
            hi = mid
        elif kind == "V":
            lo = mid
        else:
            return mid, mid
    if hi - lo > 1e-12 * hi:
        raise SolverError("bisection on V(0) did not converge within the iteration budget")
    return lo, hi


def _tail_basis(cfg: SystemConfig, case: str, n_corr: int = 4):
    """Basis (power, log power) pairs for the far fields of U and V.

    The first pair is the leading term. Relative corrections come from
    two generators g1 (U-side) and g2 (V-side): U carries i*g1 + j*g2
    with i >= 1 and V the same with j >= 1.
    """
    N, p, q = cfg.N, cfg.p, cfg.q
    if case == "log":
        eV = q * (N - 2) - N
        U = [(N - 2.0, 1.0), (N - 2.0, 0.0), (N - 2 + eV, q), (N - 2 + eV, q - 1)]
        V = [(N - 2.0, 0.0), (N - 2 + eV, q), (N - 2 + eV, q - 1), (N - 2 + eV, q - 2)]
        return U, V
    if case == "super":
        gU = N - 2.0
        g1 = p * (N - 2) - N
    else:
        gU = (N - 2) * p - 2.0
        g1 = N - 2 - gU
    g2 = q * gU - N

    def exps(first_u: bool):
        vals = {
            round(i * g1 + j * g2, 12)
            for i in range(5)
            for j in range(5)
            if (i >= 1 if first_u else j >= 1)
        }
        return sorted(vals)[:n_corr]

    U = [(gU, 0.0)] + [(gU + e, 0.0) for e in exps(True)]
    V = [(N - 2.0, 0.0)] + [(N - 2.0 + e, 0.0) for e in exps(False)]
    return U, V


def _fit_tail(r, f, basis, n_terms):
    basis = basis[: n_terms + 1]
    A = np.stack([r ** (-s) * np.log(r) ** j for s, j in basis], axis=1)
    A = A / f[:, None]
    coef, *_ = np.linalg.lstsq(A, np.ones_like(f), rcond=None)
    return TailModel(tuple(float(c) for c in coef), tuple(s for s, _ in basis), tuple(j for _, j in basis))


def extract_decay_constants(gs: GroundState, window: float = 4.0) -> DecayConstants:
    """Fit the far-field expansions on [r_match/window, r_match].

    The leading coefficients give a and b; the error estimate is the
    change under a shorter window with one correction term fewer.
    """
    cfg, case = gs.config, gs.config.decay_case
    lo = gs.r_match / window
    sel = (gs.r >= lo) & (gs.r <= gs.r_match)
    if sel.sum() < 20 or gs.r_match < 10.0:
        raise SolverError(f"tail too short for stable extrapolation (r_match={gs.r_match:.3g})")
    r, U, V = gs.r[sel], gs.U[sel], gs.V[sel]
    bU, bV = _tail_basis(cfg, case)
    tU = _fit_tail(r, U, bU, 4)
    tV = _fit_tail(r, V, bV, 4)
    sel2 = r >= gs.r_match / (window / 2)
    tU2 = _fit_tail(r[sel2], U[sel2], bU, 3)
    tV2 = _fit_tail(r[sel2], V[sel2], bV, 3)
    a, b = tU.coef[0], tV.coef[0]
    N, p = cfg.N, cfg.p
    return DecayConstants(
        a=a,
        b=b,
        decay_case=case,
        a_err=abs(a - tU2.coef[0]),
        b_err=abs(b - tV2.coef[0]),
        tail_U=tU,
        tail_V=tV,
        relation_lhs=b**p,
        relation_rhs=a * ((N - 2) * p - 2) * (N - (N - 2) * p),
    )


def solve_ground_state(
    config: SystemConfig,
    tol: float = 1e-8,
    r_max: float = 2000.0,
    n_grid: int = 2400,
    rel_err_target: float = 1e-8,
    max_iter: int = 200,
) -> GroundState:
    """Shoot for the ground state and tabulate it on a log-spaced grid.

    ``r_match`` is the largest radius at which the estimated relative
    error of the shot profile stays below ``rel_err_target`` (and V has
    not fallen below 1e-8 V(0)). The error estimate combines the spread
    of the two final bisection brackets with the change under a looser
    integration tolerance.
    """
    if not 1e-12 < tol < 1e-3:
        raise ValueError(f"tol must lie in (1e-12, 1e-3), got {tol}")
    lo, hi = _bracket(config, r_max, max_iter)
    beta = 0.5 * (lo + hi)
    main = _shoot(config, beta, r_max, dense=True)
    r_end = main.t[-1]
    probes = [_shoot(config, x, r_max, dense=True) for x in (lo, hi)]
    loose = _shoot(config, beta, r_max, rtol=1e-11, dense=True)
    r_end = min([r_end] + [s.t[-1] for s in probes] + [loose.t[-1]])
    rr = np.geomspace(1.0, r_end * 0.999, 4000)
    y = main.sol(rr)
    err = np.zeros_like(rr)
    for s in probes:
        err = np.maximum(err, np.abs(s.sol(rr)[[0, 2]] - y[[0, 2]]).max(axis=0))
    err = err + np.abs(loose.sol(rr)[[0, 2]] - y[[0, 2]]).max(axis=0)
    rel = err / np.minimum(np.abs(y[0]), np.abs(y[2]))
    bad = (rel > rel_err_target) | (y[2] < 1e-8 * beta) | (y[0] <= 0) | (y[2] <= 0)
    idx = np.argmax(bad) if bad.any() else len(rr) - 1
    r_match = float(rr[max(idx - 1, 0)])
    # uniform near the origin: Hermite second derivatives lose ~eps/h^2
    n_core = n_grid // 8
    r_grid = np.concatenate([np.linspace(0.0, 1.0, n_core + 1), np.geomspace(1.0, r_match, n_grid - n_core)[1:]])
    ys = _shoot_fine(config, beta, r_match * 1.001)(np.maximum(r_grid, _R_START))
    N, p, q = config.N, config.p, config.q
    # origin and the series region from the Taylor start
    small = r_grid < _R_START
    ys[:, small] = np.array(_initial(N, p, q, beta, r_grid[small] + 0.0))[:, :]
    ys[0, 0], ys[1, 0], ys[2, 0], ys[3, 0] = 1.0, 0.0, beta, 0.0
    pre = GroundState(
        config=config,
        r=r_grid,
        U=ys[0].copy(),
        V=ys[2].copy(),
        dU=ys[1].copy(),
        dV=ys[3].copy(),
        a=np.nan,
        b=np.nan,
        decay_case=config.decay_case,
        r_match=r_match,
        tol=tol,
    )
    dc = extract_decay_constants(pre)
    gs = GroundState(
        config=config,
        r=pre.r,
        U=pre.U,
        V=pre.V,
        dU=pre.dU,
        dV=pre.dV,
        a=dc.a,
        b=dc.b,
        decay_case=dc.decay_case,
        r_match=r_match,
        tol=tol,
        a_err=dc.a_err,
        b_err=dc.b_err,
        tail_U=dc.tail_U,
        tail_V=dc.tail_V,
        meta={"v0_bracket": [lo, hi], "r_shoot_end": float(r_end)},
    )
    res = gs.ode_residual()
    if not res < tol:
        raise SolverError(f"ODE residual {res:.3e} did not reach tol={tol:.1e}")
    object.__setattr__(gs, "residual", res)
    return gs


def _radial_moment(gs: GroundState, f: Callable, r_far_factor: float = 1e6, lead_power=None):
    """int_0^inf f(r) r^(N-1) dr over tabulated + tail profile.

    ``lead_power`` is the algebraic decay of f(r) r^(N-1); the remainder
    beyond the last panel is added analytically.
    """
    N = gs.N
    rm = gs.r_match
    edges = np.concatenate(
        [np.linspace(0, 1, 9), np.geomspace(1, rm, 60)[1:], np.geomspace(rm, rm * r_far_factor, 60)[1:]]
    )
    r, w = gauss_panels(edges, 10)
    val = np.sum(w * f(r) * r ** (N - 1))
    R = edges[-1]
    if lead_power is not None and lead_power > 1:
        val += f(np.array([R]))[0] * R ** (N - 1) * R / (lead_power - 1)
    return float(val)


@dataclass(frozen=True)
class GreenConsistency:
    residual_a: float
    residual_b: float
    flux_a: float
    mass_Vp: float
    flux_b: float
    mass_Uq: float


def green_consistency(gs: GroundState) -> GreenConsistency:
    """Compare a(N-2)|S^{N-1}| with int V^p and b(N-2)|S^{N-1}| with int U^q.

    Both integrals are radial quadratures of the tabulated profile; the
    identities follow from the Green representation of the limit system.
    """
    if gs.decay_case != "super":
        raise ValueError(f"green_consistency needs the super decay case, got {gs.decay_case}")
    N, p, q = gs.N, gs.p, gs.q
    omega = sphere_area(N)
    fa = gs.a * (N - 2) * omega
    fb = gs.b * (N - 2) * omega
    mVp = omega * _radial_moment(gs, lambda r: np.abs(gs.profile(r)[1]) ** p, lead_power=p * (N - 2) - N + 1)
    mUq = omega * _radial_moment(gs, lambda r: np.abs(gs.profile(r)[0]) ** q, lead_power=q * (N - 2) - N + 1)
    ra = abs(fa - mVp) / abs(fa) if fa != 0 else 1.0
    rb = abs(fb - mUq) / abs(fb) if fb != 0 else 1.0
    return GreenConsistency(ra, rb, fa, mVp, fb, mUq)


def profile_integral(
    gs: GroundState, f: Callable[[np.ndarray, np.ndarray], np.ndarray], lead_power=None, radial_power: float = 0.0
):
    """int_{R^N} f(U(|y|), V(|y|)) |y|^radial_power dy.

    ``lead_power``: decay exponent of the radial integrand
    f r^(radial_power + N - 1), used for the analytic remainder.
    """
    omega = sphere_area(gs.N)

    def g(r):
        U, V = gs.profile(r)
        return f(U, V) * r**radial_power

    return omega * _radial_moment(gs, g, lead_power=lead_power)


def _radius(y, xi):
    y = np.asarray(y, dtype=float)
    d = y - np.asarray(xi, dtype=float)
    return d, np.sqrt(np.sum(d * d, axis=-1))


def eval_bubble(gs: GroundState, xi, lam: float, y):
    """(U_{xi,lam}(y), V_{xi,lam}(y)) for points y of shape (..., N)."""
    _, t = _radius(y, xi)
    U, V = gs.profile(lam * t)
    return lam**gs.expU * U, lam**gs.expV * V


@dataclass(frozen=True)
class BubbleDerivatives:
    Y1: np.ndarray  # dU/dr (r = |xi|, centre moving radially)
    Y2: np.ndarray  # dU/dlam
    Z1: np.ndarray  # dV/dr
    Z2: np.ndarray  # dV/dlam


def bubble_derivatives(gs: GroundState, xi, lam: float, y) -> BubbleDerivatives:
    """Derivatives of the bubble pair w.r.t. the ring radius |xi| and lam."""
    xi = np.asarray(xi, dtype=float)
    d, t = _radius(y, xi)
    nxi = np.linalg.norm(xi)
    e = xi / nxi if nxi > 0 else np.eye(len(xi))[0]
    U, V = gs.profile(lam * t)
    dU, dV = gs.profile(lam * t, 1)
    with np.errstate(invalid="ignore", divide="ignore"):
        cosang = np.where(t > 0, (d @ e) / np.where(t > 0, t, 1.0), 0.0)
    aU, aV = gs.expU, gs.expV
    Y1 = -(lam ** (aU + 1)) * dU * cosang
    Z1 = -(lam ** (aV + 1)) * dV * cosang
    Y2 = aU * lam ** (aU - 1) * U + lam**aU * dU * t
    Z2 = aV * lam ** (aV - 1) * V + lam**aV * dV * t
    return BubbleDerivatives(Y1, Y2, Z1, Z2)


def bubble_gradient(gs: GroundState, xi, lam: float, y):
    """Gradients of U_{xi,lam} and V_{xi,lam}, shape (..., N) each."""
    d, t = _radius(y, xi)
    dU, dV = gs.profile(lam * t, 1)
    with np.errstate(invalid="ignore", divide="ignore"):
        unit = np.where(t[..., None] > 0, d / np.where(t > 0, t, 1.0)[..., None], 0.0)
    gU = (lam ** (gs.expU + 1) * dU)[..., None] * unit
    gV = (lam ** (gs.expV + 1) * dV)[..., None] * unit
    return gU, gV


def bubble_hessian(gs: GroundState, xi, lam: float, y):
    """Hessians of U_{xi,lam}, V_{xi,lam}, shape (..., N, N) each."""
    d, t = _radius(y, xi)
    N = gs.N
    s = lam * t
    dU, dV = gs.profile(s, 1)
    d2U, d2V = gs.profile(s, 2)
    tt = np.where(t > 0, t, 1.0)
    unit = d / tt[..., None]
    P = unit[..., :, None] * unit[..., None, :]
    I = np.eye(N)
    out = []
    for a, f1, f2 in ((gs.expU, dU, d2U), (gs.expV, dV, d2V)):
        # f(lam t): Hess = lam^2 f'' P + lam f'/t (I - P); at t = 0 it is lam^2 f''(0) I
        with np.errstate(invalid="ignore", divide="ignore"):
            ratio = np.where(t > 0, lam * f1 / tt, lam**2 * f2)
        H = (lam**2 * f2)[..., None, None] * P + ratio[..., None, None] * (I - P)
        H = np.where((t > 0)[..., None, None], H, (lam**2 * f2)[..., None, None] * I)
        out.append(lam**a * H)
    return out[0], out[1]


@dataclass(frozen=True)
class KernelBasis:
    """Radial profiles of the dilation pair and of the translation pair.

    The translation fields are d_l U = psi1(|y|) y_l/|y| (same for V with
    phi1).
    """

    psi0: Callable
    phi0: Callable
    psi1: Callable
    phi1: Callable

    def dilation(self, y):
        t = np.linalg.norm(np.asarray(y, float), axis=-1)
        return self.psi0(t), self.phi0(t)

    def translation(self, y, l: int = 0):
        y = np.asarray(y, float)
        t = np.linalg.norm(y, axis=-1)
        c = np.where(t > 0, y[..., l] / np.where(t > 0, t, 1.0), 0.0)
        return self.psi1(t) * c, self.phi1(t) * c


def kernel_basis(gs: GroundState) -> KernelBasis:
    N, p, q = gs.N, gs.p, gs.q

    def psi0(r):
        return r * gs.profile(r, 1)[0] + N * gs.profile(r)[0] / (q + 1)

    def phi0(r):
        return r * gs.profile(r, 1)[1] + N * gs.profile(r)[1] / (p + 1)

    return KernelBasis(psi0, phi0, lambda r: gs.profile(r, 1)[0], lambda r: gs.profile(r, 1)[1])


@dataclass(frozen=True)
class KernelResidual:
    dilation: float
    translation: float
    h: float
    trivial: bool

    @property
    def max(self) -> float:
        return max(self.dilation, self.translation)


def kernel_residual(
    gs: GroundState, basis: KernelBasis, h: float = 0.1, r_min: float = 0.5, r_max: float = 20.0
) -> KernelResidual:
    """Max-norm residual of -Delta Psi - p V^(p-1) Phi, -Delta Phi - q U^(q-1) Psi.

    Fourth-order central differences on the nodes r_min, r_min + h, ...,
    r_max; the translation pair uses the l = 1 radial Laplacian
    f'' + (N-1)f'/r - (N-1)f/r^2. The node set starts away from the
    origin, where the 1/r terms spoil the stencil order.
    """
    N, p, q = gs.N, gs.p, gs.q
    r = r_min + np.arange(int(round((r_max - r_min) / h)) + 1) * h
    U, V = gs.profile(r)
    Vp1 = np.abs(V) ** (p - 1)
    Uq1 = np.abs(U) ** (q - 1)

    def lap(f, ell):
        f2m, fm, f0, fp, f2p = (f(r + j * h) for j in (-2, -1, 0, 1, 2))
        d2 = (-f2p + 16 * fp - 30 * f0 + 16 * fm - f2m) / (12 * h**2)
        d1 = (-f2p + 8 * fp - 8 * fm + f2m) / (12 * h)
        return d2 + (N - 1) * d1 / r - ell * (ell + N - 2) * f0 / r**2

    def pair(fpsi, fphi, ell):
        r1 = -lap(fpsi, ell) - p * Vp1 * fphi(r)
        r2 = -lap(fphi, ell) - q * Uq1 * fpsi(r)
        return float(max(np.max(np.abs(r1)), np.max(np.abs(r2))))

    dil = pair(basis.psi0, basis.phi0, 0)
    tra = pair(basis.psi1, basis.phi1, 1)
    scale = max(np.max(np.abs(basis.psi0(r))), np.max(np.abs(basis.psi1(r))))
    return KernelResidual(dil, tra, h, trivial=bool(scale == 0))


def tail_slope(gs: GroundState, window: float = 4.0) -> tuple[float, float]:
    """Least-squares slopes of log U and log V against log r on the
    tabulated tail [r_match/window, r_match]."""
    sel = (gs.r >= gs.r_match / window) & (gs.r <= gs.r_match)
    lr = np.log(gs.r[sel])
    sU = np.polyfit(lr, np.log(np.abs(gs.U[sel])), 1)[0]
    sV = np.polyfit(lr, np.log(np.abs(gs.V[sel])), 1)[0]
    return float(sU), float(sV)


def save_table(gs: GroundState, path: str | Path) -> None:
    header = {
        "format_version": TABLE_FORMAT_VERSION,
        "N": gs.N,
        "p": gs.p,
        "q": gs.q,
        "tol": gs.tol,
        "a": gs.a,
        "b": gs.b,
        "a_err": gs.a_err,
        "b_err": gs.b_err,
        "decay_case": gs.decay_case,
        "r_match": gs.r_match,
        "residual": gs.residual,
        "tail_U": gs.tail_U.to_dict() if gs.tail_U else None,
        "tail_V": gs.tail_V.to_dict() if gs.tail_V else None,
        "config": gs.config.to_dict(),
    }
    data = np.stack([gs.r, gs.U, gs.V, gs.dU, gs.dV], axis=1)
    with open(path, "w") as fh:
        fh.write("# " + json.dumps(header, sort_keys=True) + "\n")
        fh.write("r,U,V,dU,dV\n")
        np.savetxt(fh, data, delimiter=",", fmt="%.17g")


def load_table(path: str | Path) -> GroundState:
    with open(path) as fh:
        first = fh.readline()
        if not first.startswith("# "):
            raise ValueError(f"{path}: missing ground-state header")
        header = json.loads(first[2:])
        if header.get("format_version") != TABLE_FORMAT_VERSION:
            raise ValueError(f"{path}: unsupported format_version {header.get('format_version')}")
        cols = fh.readline().strip().split(",")
        if cols != ["r", "U", "V", "dU", "dV"]:
            raise ValueError(f"{path}: unexpected columns {cols}")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    cfg = SystemConfig.from_dict(header["config"])
    tu = TailModel.from_dict(header["tail_U"]) if header.get("tail_U") else None
    tv = TailModel.from_dict(header["tail_V"]) if header.get("tail_V") else None
    return GroundState(
        config=cfg,
        r=data[:, 0],
        U=data[:, 1],
        V=data[:, 2],
        dU=data[:, 3],
        dV=data[:, 4],
        a=header["a"],
        b=header["b"],
        decay_case=header["decay_case"],
        r_match=header["r_match"],
        tol=header["tol"],
        a_err=header.get("a_err", 0.0),
        b_err=header.get("b_err", 0.0),
        tail_U=tu,
        tail_V=tv,
        residual=header.get("residual", 0.0),
    )
