"""Local Pohozaev identities for solution pairs and linearized pairs.

For (v1, v2) solving -Delta v1 = K1 v2^p, -Delta v2 = K2 v1^q and
(xi1, xi2) solving the linearization -Delta xi1 = p K1 v2^(p-1) xi2,
-Delta xi2 = q K2 v1^(q-1) xi1 on a domain, two families of boundary
identities hold: one for each coordinate direction (translation) and one
for each centre x0 (dilation). The functions below evaluate every
boundary and volume term by quadrature and report the imbalance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import roots_legendre

from bubblekit.ansatz import BubbleConfig, polygon_points
from bubblekit.config import PotentialSpec, SystemConfig
from bubblekit.ground_state import GroundState, bubble_gradient, bubble_hessian, eval_bubble
from bubblekit.quadrature import gauss_panels, sphere_rule

# ---------------------------------------------------------------------------
# Fields


@dataclass(frozen=True)
class FieldPair:
    """A pair of scalar fields with Cartesian gradients; both callables map
    points (M, N) to a pair of arrays ((M,), (M,)) resp. ((M, N), (M, N))."""

    value: Callable
    gradient: Callable


@dataclass(frozen=True)
class PotentialField:
    """K(y) and its gradient; ``None`` spec means K = 1."""

    spec: PotentialSpec | None = None
    mu: float = 1.0

    def value(self, y):
        y = np.asarray(y, float)
        if self.spec is None:
            return np.ones(y.shape[:-1])
        return self.spec(np.linalg.norm(y, axis=-1) / self.mu)

    def gradient(self, y):
        y = np.asarray(y, float)
        if self.spec is None:
            return np.zeros(y.shape)
        r = np.linalg.norm(y, axis=-1)
        dK = self.spec.derivative(r / self.mu) / self.mu
        with np.errstate(invalid="ignore", divide="ignore"):
            unit = np.where(r[:, None] > 0, y / np.where(r > 0, r, 1)[:, None], 0.0)
        return dK[:, None] * unit


def bubble_pair(gs: GroundState, center, lam: float = 1.0) -> FieldPair:
    c = np.asarray(center, float)
    return FieldPair(lambda y: eval_bubble(gs, c, lam, y), lambda y: bubble_gradient(gs, c, lam, y))


def dilation_kernel_pair(gs: GroundState, center) -> FieldPair:
    """(t U'(t) + N U/(q+1), t V'(t) + N V/(p+1)) with t = |y - center|."""
    c = np.asarray(center, float)
    aU, aV = gs.expU, gs.expV

    def value(y):
        t = np.linalg.norm(np.asarray(y, float) - c, axis=-1)
        U, V = gs.profile(t)
        dU, dV = gs.profile(t, 1)
        return t * dU + aU * U, t * dV + aV * V

    def gradient(y):
        d = np.asarray(y, float) - c
        t = np.linalg.norm(d, axis=-1)
        dU, dV = gs.profile(t, 1)
        d2U, d2V = gs.profile(t, 2)
        # d/dt (t f' + a f) = (1 + a) f' + t f''; times the unit vector d/t
        return ((1 + aU) * dU / np.maximum(t, 1e-300) + d2U)[:, None] * d, ((1 + aV) * dV / np.maximum(t, 1e-300) + d2V)[:, None] * d

    return FieldPair(value, gradient)


def translation_kernel_pair(gs: GroundState, center, axis: int = 0) -> FieldPair:
    """(d_axis U, d_axis V) of the unit bubble at ``center``."""
    c = np.asarray(center, float)

    def value(y):
        gU, gV = bubble_gradient(gs, c, 1.0, y)
        return gU[:, axis], gV[:, axis]

    def gradient(y):
        HU, HV = bubble_hessian(gs, c, 1.0, y)
        return HU[:, :, axis], HV[:, :, axis]

    return FieldPair(value, gradient)


# ---------------------------------------------------------------------------
# Domains and quadrature


DOMAIN_KINDS = ("ball", "annulus", "sector_cell")


@dataclass(frozen=True)
class PohozaevDomain:
    """A ball or annulus around ``center``, or the sector cell
    {|y| < R, |arg(y1 + i y2)| <= pi/k} around the direction of x_1."""

    kind: str
    center: tuple = ()
    radii: tuple = (1.0,)
    k: int = 1
    ring_radius: float | None = None

    def __post_init__(self):
        if self.kind not in DOMAIN_KINDS:
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if not all(r > 0 for r in self.radii):
            raise ValueError("radii must be positive")
        if self.kind == "annulus" and not (len(self.radii) == 2 and self.radii[0] < self.radii[1]):
            raise ValueError("annulus needs radii (R1, R2) with R1 < R2")
        if self.kind == "sector_cell" and self.k < 2:
            raise ValueError("sector cell needs k >= 2")

    @classmethod
    def parse(cls, text: str, N: int) -> PohozaevDomain:
        """'ball:c:R', 'annulus:c:R1:R2' or 'sector:k:R'; c is a comma list or 0."""
        parts = text.split(":")
        kind = parts[0]

        def center(s):
            vals = [float(x) for x in s.split(",")]
            return tuple(vals + [0.0] * (N - len(vals)))

        if kind == "ball":
            return cls("ball", center(parts[1]), (float(parts[2]),))
        if kind == "annulus":
            return cls("annulus", center(parts[1]), (float(parts[2]), float(parts[3])))
        if kind in ("sector", "sector_cell"):
            return cls("sector_cell", (0.0,) * N, (float(parts[2]),), k=int(parts[1]))
        raise ValueError(f"cannot parse domain {text!r}")

    @property
    def wedge(self) -> float:
        """Sector opening angle 2 pi/k."""
        return 2 * np.pi / self.k

    def faces(self, N: int, n: int) -> dict[str, tuple[np.ndarray, np.ndarray, np.ndarray]]:
        """Per face: points (M, N), outward normals (M, N), weights (M,)."""
        c = np.asarray(self.center if self.center else (0.0,) * N, float)
        if self.kind in ("ball", "annulus"):
            dirs, w = sphere_rule(N, n)
            out = {}
            R2 = self.radii[-1]
            out["outer"] = (c + R2 * dirs, dirs, w * R2 ** (N - 1))
            if self.kind == "annulus":
                R1 = self.radii[0]
                out["inner"] = (c + R1 * dirs, -dirs, w * R1 ** (N - 1))
            return out
        return _sector_faces(N, n, self.radii[0], np.pi / self.k)

    def volume(self, N: int, n: int) -> tuple[np.ndarray, np.ndarray]:
        c = np.asarray(self.center if self.center else (0.0,) * N, float)
        if self.kind in ("ball", "annulus"):
            R1 = self.radii[0] if self.kind == "annulus" else 0.0
            R2 = self.radii[-1]
            t, wt = gauss_panels(np.linspace(R1, R2, max(2, n // 4) + 1), 8)
            dirs, w = sphere_rule(N, max(2, n // 2))
            pts = c + t[:, None, None] * dirs[None]
            wts = (wt * t ** (N - 1))[:, None] * w[None]
            return pts.reshape(-1, N), wts.ravel()
        return _sector_volume(N, n, self.radii[0], np.pi / self.k)


def _legendre(a, b, n):
    x, w = roots_legendre(n)
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w


def _embed(N, cos_part, sin_part, alpha, omega):
    """cos_part (cos alpha, sin alpha) + sin_part * omega, omega in the last N-2 coords."""
    y = np.zeros(cos_part.shape + (N,))
    y[..., 0] = cos_part * np.cos(alpha)
    y[..., 1] = cos_part * np.sin(alpha)
    y[..., 2:] = sin_part[..., None] * omega
    return y


def _sector_faces(N, n, R, half):
    om, wom = sphere_rule(N - 2, max(2, n // 2))
    t, wt = gauss_panels(np.linspace(0, R, max(2, n // 2) + 1), 8)
    beta, wb = _legendre(0.0, np.pi / 2, 2 * n)
    out = {}
    for name, a, sgn in (("wedge+", half, 1.0), ("wedge-", -half, -1.0)):
        T, B, O = np.meshgrid(t, beta, np.arange(len(om)), indexing="ij")
        pts = _embed(N, T * np.cos(B), T * np.sin(B), a, om[O])
        nrm = np.zeros(pts.shape)
        nrm[..., 0] = -np.sin(a) * sgn
        nrm[..., 1] = np.cos(a) * sgn
        w = (wt[:, None, None] * t[:, None, None] ** (N - 2)) * (wb * np.sin(beta) ** (N - 3))[None, :, None] * wom[None, None, :]
        out[name] = (pts.reshape(-1, N), nrm.reshape(-1, N), w.ravel())
    g, wg = _legendre(0.0, np.pi / 2, 2 * n)
    al, wa = _legendre(-half, half, 2 * n)
    G, A, O = np.meshgrid(g, al, np.arange(len(om)), indexing="ij")
    pts = _embed(N, R * np.cos(G), R * np.sin(G), A, om[O])
    w = (wg * np.cos(g) * np.sin(g) ** (N - 3))[:, None, None] * wa[None, :, None] * wom[None, None, :] * R ** (N - 1)
    out["cap"] = (pts.reshape(-1, N), pts.reshape(-1, N) / R, w.ravel())
    return out


def _sector_volume(N, n, R, half):
    om, wom = sphere_rule(N - 2, max(2, n // 2))
    t, wt = gauss_panels(np.linspace(0, R, max(2, n // 2) + 1), 8)
    g, wg = _legendre(0.0, np.pi / 2, n)
    al, wa = _legendre(-half, half, n)
    T, G, A, O = np.meshgrid(t, g, al, np.arange(len(om)), indexing="ij")
    pts = _embed(N, T * np.cos(G), T * np.sin(G), A, om[O])
    w = (
        (wt * t ** (N - 1))[:, None, None, None]
        * (wg * np.cos(g) * np.sin(g) ** (N - 3))[None, :, None, None]
        * wa[None, None, :, None]
        * wom[None, None, None, :]
    )
    return pts.reshape(-1, pts.shape[-1]), w.ravel()


@dataclass(frozen=True)
class QuadValue:
    value: float
    error: float


def boundary_quadrature(domain: PohozaevDomain, integrand: Callable, N: int, n: int = 8) -> QuadValue:
    """Sum over faces of int integrand(points, normals) dS; the error is the
    change against the rule with n/2."""

    def total(m):
        s = 0.0
        for pts, nrm, w in domain.faces(N, m).values():
            vals = integrand(pts, nrm)
            if not np.all(np.isfinite(vals)):
                raise ValueError("non-finite integrand sample on the boundary")
            s += float(np.dot(w, vals))
        return s

    fine = total(n)
    coarse = total(max(2, n // 2))
    return QuadValue(fine, abs(fine - coarse))


# ---------------------------------------------------------------------------
# Identities


@dataclass(frozen=True)
class PohozaevReport:
    lhs: float
    rhs: float
    residual: float
    error: float
    breakdown: dict = field(default_factory=dict)
    lhs_terms: tuple = ()
    rhs_terms: tuple = ()

    def to_dict(self) -> dict:
        return {
            "format_version": 1,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "residual": self.residual,
            "error": self.error,
            "breakdown": {k: float(v) for k, v in self.breakdown.items()},
        }


def _pos_pow(v, e):
    return np.maximum(v, 0.0) ** e


def _translation_terms(v: FieldPair, xi: FieldPair, K1, K2, p, q, domain, N, n, i):
    terms = {}
    for face, (pts, nrm, w) in domain.faces(N, n).items():
        v1, v2 = v.value(pts)
        g1, g2 = v.gradient(pts)
        x1, x2 = xi.value(pts)
        h1, h2 = xi.gradient(pts)
        dn = lambda g: np.sum(g * nrm, axis=-1)
        nd = dn(g1) * h2[:, i] + g1[:, i] * dn(h2) + dn(g2) * h1[:, i] + g2[:, i] * dn(h1)
        gp = (np.sum(g1 * h2, -1) + np.sum(g2 * h1, -1)) * nrm[:, i]
        kf = (K1.value(pts) * _pos_pow(v2, p) * x2 + K2.value(pts) * _pos_pow(v1, q) * x1) * nrm[:, i]
        terms[f"normal_derivative@{face}"] = -float(np.dot(w, nd))
        terms[f"gradient_product@{face}"] = float(np.dot(w, gp))
        terms[f"potential_flux@{face}"] = -float(np.dot(w, kf))
    if K1.spec is None and K2.spec is None:
        return terms, {"potential_volume": 0.0}
    pts, w = domain.volume(N, n)
    v1, v2 = v.value(pts)
    x1, x2 = xi.value(pts)
    vol = K1.gradient(pts)[:, i] * _pos_pow(v2, p) * x2 + K2.gradient(pts)[:, i] * _pos_pow(v1, q) * x1
    rhs = {"potential_volume": -float(np.dot(w, vol))}
    return terms, rhs


def _report(fine, coarse):
    lt, rt = fine
    lhs = sum(lt.values())
    rhs = sum(rt.values())
    lc = sum(coarse[0].values())
    rc = sum(coarse[1].values())
    err = abs(lhs - lc) + abs(rhs - rc)
    bd = {**lt, **rt}
    return PohozaevReport(lhs, rhs, abs(lhs - rhs), err, bd, tuple(lt), tuple(rt))


def pohozaev_translation(
    v: FieldPair,
    xi: FieldPair,
    K1: PotentialField,
    K2: PotentialField,
    domain: PohozaevDomain,
    i: int,
    p: float,
    q: float,
    N: int,
    n: int = 8,
) -> PohozaevReport:
    """Translation identity in direction e_i (0-based axis index)."""
    fine = _translation_terms(v, xi, K1, K2, p, q, domain, N, n, i)
    coarse = _translation_terms(v, xi, K1, K2, p, q, domain, N, max(2, n // 2), i)
    return _report(fine, coarse)


def _dilation_terms(v, xi, K1, K2, p, q, domain, N, n, x0, pairing):
    a, b = N / (p + 1), N / (q + 1)
    terms = {}
    for face, (pts, nrm, w) in domain.faces(N, n).items():
        z = pts - x0
        v1, v2 = v.value(pts)
        g1, g2 = v.gradient(pts)
        x1, x2 = xi.value(pts)
        h1, h2 = xi.gradient(pts)
        dn = lambda g: np.sum(g * nrm, axis=-1)
        dz = lambda g: np.sum(g * z, axis=-1)
        nz = np.sum(nrm * z, axis=-1)
        nd = dn(g1) * dz(h2) + dn(h1) * dz(g2) + dn(g2) * dz(h1) + dn(h2) * dz(g1)
        gp = (np.sum(g1 * h2, -1) + np.sum(g2 * h1, -1)) * nz
        kf = (K1.value(pts) * _pos_pow(v2, p) * x2 + K2.value(pts) * _pos_pow(v1, q) * x1) * nz
        if pairing == "derived":
            wt = a * (x2 * dn(g1) + v2 * dn(h1)) + b * (x1 * dn(g2) + v1 * dn(h2))
        else:
            wt = a * (x2 * dn(g1) + v1 * dn(h2)) + b * (x1 * dn(g2) + v2 * dn(h1))
        terms[f"normal_derivative@{face}"] = float(np.dot(w, nd))
        terms[f"gradient_product@{face}"] = -float(np.dot(w, gp))
        terms[f"potential_flux@{face}"] = float(np.dot(w, kf))
        terms[f"weighted@{face}"] = float(np.dot(w, wt))
    if K1.spec is None and K2.spec is None:
        return terms, {"potential_volume": 0.0}
    pts, w = domain.volume(N, n)
    z = pts - x0
    v1, v2 = v.value(pts)
    x1, x2 = xi.value(pts)
    vol = np.sum(K1.gradient(pts) * z, -1) * _pos_pow(v2, p) * x2 + np.sum(K2.gradient(pts) * z, -1) * _pos_pow(v1, q) * x1
    return terms, {"potential_volume": float(np.dot(w, vol))}


def pohozaev_dilation(
    v: FieldPair,
    xi: FieldPair,
    K1: PotentialField,
    K2: PotentialField,
    domain: PohozaevDomain,
    x0,
    p: float,
    q: float,
    N: int,
    n: int = 8,
    pairing: str = "derived",
) -> PohozaevReport:
    """Dilation identity about x0.

    ``pairing='derived'`` weights (xi2 dv1/dnu + v2 dxi1/dnu) by N/(p+1)
    and (xi1 dv2/dnu + v1 dxi2/dnu) by N/(q+1), which is what integration
    by parts gives; ``'swapped'`` swaps v1 and v2 in the second
    products. The two agree when p = q.
    """
    if abs(N / (p + 1) + N / (q + 1) - (N - 2)) > 1e-10:
        raise ValueError("exponents are not on the critical hyperbola: N/(p+1) + N/(q+1) != N-2")
    if pairing not in ("derived", "swapped"):
        raise ValueError("pairing must be 'derived' or 'swapped'")
    x0 = np.asarray(x0, float)
    fine = _dilation_terms(v, xi, K1, K2, p, q, domain, N, n, x0, pairing)
    coarse = _dilation_terms(v, xi, K1, K2, p, q, domain, N, max(2, n // 2), x0, pairing)
    return _report(fine, coarse)


@dataclass(frozen=True)
class RefinementStudy:
    levels: tuple
    residuals: tuple
    order: float
    scale: float  # largest |term| at the finest level

    @property
    def finest(self) -> float:
        return self.residuals[-1]


def refinement_study(fn: Callable[[int], PohozaevReport], levels=(4, 8, 16)) -> RefinementStudy:
    """Residuals over quadrature levels.

    The observed order is taken between the two coarsest levels, where
    the quadrature error dominates; at fine levels the residual settles
    on the floor set by the accuracy of the fields themselves.
    """
    reps = [fn(n) for n in levels]
    res = [r.residual for r in reps]
    scale = max(abs(x) for x in reps[-1].breakdown.values())
    floor = 1e-15 * max(scale, 1e-300)
    ratio = levels[1] / levels[0]
    order = float(np.log(max(res[0], floor) / max(res[1], floor)) / np.log(ratio))
    return RefinementStudy(tuple(levels), tuple(res), order, scale)


# ---------------------------------------------------------------------------
# Reduced solutions


class ReducedSolution:
    """v = W + phi for a reduction result and the rotational pair xi = d_theta v.

    ``residuals`` returns rho = -Delta v - K v^p (per component) and
    sigma = d_theta rho, the amounts by which the discrete pair fails
    the equations the identities rest on.
    """

    def __init__(self, gs: GroundState, cfg: BubbleConfig, config: SystemConfig, result):
        from bubblekit.reduction import GridField

        self.gs, self.cfg, self.config = gs, cfg, config
        self.N = gs.N
        self.centers = polygon_points(cfg.k, cfg.r, gs.N)
        self.f1 = GridField(result.grid, result.phi1.values)
        self.f2 = GridField(result.grid, result.phi2.values)
        self.K1 = PotentialField(config.potential1, cfg.mu)
        self.K2 = PotentialField(config.potential2, cfg.mu)

    @staticmethod
    def _J(g):
        """Rotation generator applied to a vector field: (-g2, g1, 0, ...)."""
        out = np.zeros_like(g)
        out[..., 0] = -g[..., 1]
        out[..., 1] = g[..., 0]
        return out

    def _W(self, y):
        gs, lam = self.gs, self.cfg.lam
        out = {"U": 0, "V": 0, "gU": 0, "gV": 0, "HU": 0, "HV": 0, "Uq": 0, "Vp": 0, "dUq": 0, "dVp": 0}
        Jy = self._J(y)
        for x in self.centers:
            u, v = eval_bubble(gs, x, lam, y)
            gu, gv = bubble_gradient(gs, x, lam, y)
            hu, hv = bubble_hessian(gs, x, lam, y)
            out["U"] = out["U"] + u
            out["V"] = out["V"] + v
            out["gU"] = out["gU"] + gu
            out["gV"] = out["gV"] + gv
            out["HU"] = out["HU"] + hu
            out["HV"] = out["HV"] + hv
            out["Uq"] = out["Uq"] + _pos_pow(u, gs.q)
            out["Vp"] = out["Vp"] + _pos_pow(v, gs.p)
            out["dUq"] = out["dUq"] + gs.q * _pos_pow(u, gs.q - 1) * np.sum(gu * Jy, -1)
            out["dVp"] = out["dVp"] + gs.p * _pos_pow(v, gs.p - 1) * np.sum(gv * Jy, -1)
        return out

    @property
    def v(self) -> FieldPair:
        def value(y):
            W = self._W(y)
            return W["U"] + self.f1.value(y), W["V"] + self.f2.value(y)

        def gradient(y):
            W = self._W(y)
            return W["gU"] + self.f1.gradient(y), W["gV"] + self.f2.gradient(y)

        return FieldPair(value, gradient)

    @property
    def xi(self) -> FieldPair:
        J = self._J

        def value(y):
            W = self._W(y)
            Jy = J(y)
            return (
                np.sum(W["gU"] * Jy, -1) + self.f1.theta_derivative(y),
                np.sum(W["gV"] * Jy, -1) + self.f2.theta_derivative(y),
            )

        def gradient(y):
            W = self._W(y)
            Jy = J(y)
            # grad(<grad W, J y>) = H J y + J^T grad W, and J^T g = -J g
            gU = np.einsum("...ij,...j->...i", W["HU"], Jy) - J(W["gU"])
            gV = np.einsum("...ij,...j->...i", W["HV"], Jy) - J(W["gV"])
            return gU + self.f1.theta_gradient(y), gV + self.f2.theta_gradient(y)

        return FieldPair(value, gradient)

    def residuals(self, y):
        """(rho1, rho2, sigma1, sigma2) at points y."""
        gs = self.gs
        p, q = gs.p, gs.q
        W = self._W(y)
        Jy = self._J(y)
        v1 = W["U"] + self.f1.value(y)
        v2 = W["V"] + self.f2.value(y)
        t1 = np.sum(W["gU"] * Jy, -1) + self.f1.theta_derivative(y)
        t2 = np.sum(W["gV"] * Jy, -1) + self.f2.theta_derivative(y)
        K1, K2 = self.K1.value(y), self.K2.value(y)
        rho1 = W["Vp"] - self.f1.laplacian(y) - K1 * _pos_pow(v2, p)
        rho2 = W["Uq"] - self.f2.laplacian(y) - K2 * _pos_pow(v1, q)
        sig1 = W["dVp"] - self.f1.theta_laplacian(y) - K1 * p * _pos_pow(v2, p - 1) * t2
        sig2 = W["dUq"] - self.f2.theta_laplacian(y) - K2 * q * _pos_pow(v1, q - 1) * t1
        return rho1, rho2, sig1, sig2


@dataclass(frozen=True)
class DefectEstimate:
    defect: float  # value of the volume integral the identity's imbalance should equal
    bound: float  # same integral with absolute values


def translation_defect(sol: ReducedSolution, domain: PohozaevDomain, i: int, n: int = 8) -> DefectEstimate:
    """int (rho1 d_i xi2 + sigma2 d_i v1 + rho2 d_i xi1 + sigma1 d_i v2)."""
    pts, w = domain.volume(sol.N, n)
    r1, r2, s1, s2 = sol.residuals(pts)
    g1, g2 = sol.v.gradient(pts)
    h1, h2 = sol.xi.gradient(pts)
    parts = [r1 * h2[:, i], s2 * g1[:, i], r2 * h1[:, i], s1 * g2[:, i]]
    return DefectEstimate(float(np.dot(w, sum(parts))), float(np.dot(w, sum(np.abs(x) for x in parts))))


def dilation_defect(sol: ReducedSolution, domain: PohozaevDomain, x0, n: int = 8) -> DefectEstimate:
    """Minus the volume integral of the residual terms paired with <grad, y - x0>
    and with the N/(p+1), N/(q+1) weights."""
    N, p, q = sol.N, sol.gs.p, sol.gs.q
    pts, w = domain.volume(N, n)
    z = pts - np.asarray(x0, float)
    r1, r2, s1, s2 = sol.residuals(pts)
    v1, v2 = sol.v.value(pts)
    g1, g2 = sol.v.gradient(pts)
    x1, x2 = sol.xi.value(pts)
    h1, h2 = sol.xi.gradient(pts)
    dz = lambda g: np.sum(g * z, -1)
    a, b = N / (p + 1), N / (q + 1)
    parts = [
        r1 * dz(h2), s2 * dz(g1), r2 * dz(h1), s1 * dz(g2),
        a * r1 * x2, a * s1 * v2, b * s2 * v1, b * r2 * x1,
    ]
    return DefectEstimate(-float(np.dot(w, sum(parts))), float(np.dot(w, sum(np.abs(x) for x in parts))))
