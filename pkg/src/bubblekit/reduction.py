"""Error term, nonlinearity, linearized operator and the reduction solve.

Fields are discretized on the symmetry cell of the polygon configuration
in cylindrical coordinates

    s = |(y1, y2)|,  theta = arg(y1 + i y2) in [0, pi/k],  rho = |(y3, ..., yN)|,

which is exact for data invariant under the rotation by 2 pi/k, the
reflection y2 -> -y2 and rotations of the last N-2 coordinates.  The
reflections through the sector walls become zero-flux conditions and the
outer faces carry the Robin condition (d_n + (N-2) <n, y>/|y|^2) phi = 0.
The Laplacian is a cell-centred finite-volume operator, second order on
smoothly graded faces.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np
import scipy.sparse as sp
from scipy.interpolate import NdBSpline, make_interp_spline
from scipy.sparse.linalg import splu

from bubblekit.ansatz import (
    BubbleConfig,
    NormParams,
    SampledField,
    eval_ansatz,
    polygon_points,
    structured_samples,
    weight,
    weighted_norm_dstar,
)
from bubblekit.config import SystemConfig
from bubblekit.ground_state import GroundState, bubble_derivatives, eval_bubble
from bubblekit.quadrature import radial_rule, sphere_area, sphere_rule


class ReductionError(RuntimeError):
    """Singular augmented system, divergent or non-contracting iteration."""


def _potentials(config: SystemConfig, cfg: BubbleConfig, y):
    r = np.linalg.norm(np.asarray(y, float), axis=-1) / cfg.mu
    return config.K1(r), config.K2(r)


def _bubble_sums(gs: GroundState, cfg: BubbleConfig, y):
    """W1, W2 and sum_j U_j^q, sum_j V_j^p."""
    y = np.asarray(y, float)
    W1 = np.zeros(y.shape[:-1])
    W2 = np.zeros(y.shape[:-1])
    Uq = np.zeros(y.shape[:-1])
    Vp = np.zeros(y.shape[:-1])
    for x in polygon_points(cfg.k, cfg.r, gs.N):
        u, v = eval_bubble(gs, x, cfg.lam, y)
        W1 += u
        W2 += v
        Uq += np.abs(u) ** gs.q
        Vp += np.abs(v) ** gs.p
    return W1, W2, Uq, Vp


def residual_Rk(gs: GroundState, cfg: BubbleConfig, config: SystemConfig, y):
    """(K1(y/mu) W2^p - sum V_j^p, K2(y/mu) W1^q - sum U_j^q)."""
    W1, W2, Uq, Vp = _bubble_sums(gs, cfg, y)
    K1, K2 = _potentials(config, cfg, y)
    return K1 * W2**gs.p - Vp, K2 * W1**gs.q - Uq


def residual_samples(cfg: BubbleConfig, N: int) -> np.ndarray:
    """Sample set for ||R_k||_**: the structured set plus a fine layer
    around the first core, where the weighted residual peaks."""
    pts = [structured_samples(cfg, N)]
    x1 = polygon_points(cfg.k, cfg.r, N)[0]
    dirs, _ = sphere_rule(N, 3)
    radii = np.linspace(0.1, 4.0, 16) / cfg.lam
    pts.append((x1 + radii[:, None, None] * dirs[None]).reshape(-1, N))
    return np.concatenate(pts)


def dstar_norm_Rk(gs: GroundState, cfg: BubbleConfig, config: SystemConfig, params: NormParams | None = None, points=None) -> float:
    """Sampled ||R_k||_** (sum of the two component norms)."""
    params = NormParams(gs.N) if params is None else params
    pts = residual_samples(cfg, gs.N) if points is None else np.asarray(points, float)
    R1, R2 = residual_Rk(gs, cfg, config, pts)
    return weighted_norm_dstar(SampledField(pts, np.stack([R1, R2], 1)), cfg, params)


@dataclass(frozen=True)
class Nonlinearity:
    N1: np.ndarray
    N2: np.ndarray
    clamped: int  # samples where W + phi < 0 was clamped to 0

    def __iter__(self):
        return iter((self.N1, self.N2))


def _taylor_remainder(base, phi, e):
    tot = base + phi
    neg = tot < 0
    tot = np.where(neg, 0.0, tot)
    b = np.maximum(base, 0.0)
    return tot**e - b**e - e * b ** (e - 1) * phi, int(np.count_nonzero(neg))


def nonlinearity_Nk(gs: GroundState, cfg: BubbleConfig, config: SystemConfig, phi, y, W=None) -> Nonlinearity:
    """N_1 = K1 ((W2+phi2)^p - W2^p - p W2^(p-1) phi2), N_2 likewise with q.

    ``phi`` is a pair of arrays sampled at ``y``; ``W`` optionally passes
    precomputed (W1, W2).
    """
    phi1, phi2 = (np.asarray(c, float) for c in phi)
    W1, W2 = eval_ansatz(gs, cfg, y) if W is None else W
    K1, K2 = _potentials(config, cfg, y)
    n1, c1 = _taylor_remainder(W2, phi2, config.p)
    n2, c2 = _taylor_remainder(W1, phi1, config.q)
    return Nonlinearity(K1 * n1, K2 * n2, c1 + c2)


# ---------------------------------------------------------------------------
# Newtonian potential


def green_radial(f: Callable, N: int, r, r_max: float = 1e4, n_panels: int = 80):
    """G[f](r) = (r^(2-N) int_0^r f s^(N-1) ds + int_r^inf f s ds)/(N-2) for radial f."""
    r = np.atleast_1d(np.asarray(r, float))
    out = np.empty_like(r)
    for i, ri in enumerate(r):
        s2, w2 = radial_rule(r_max - ri, n_panels, 8, r_core=1.0)
        s2 = s2 + ri
        inner = 0.0
        if ri > 0:
            s1, w1 = radial_rule(ri, n_panels // 2, 8, r_core=min(1.0, ri))
            inner = np.sum(w1 * f(s1) * s1 ** (N - 1)) * ri ** (2 - N)
        outer = np.sum(w2 * f(s2) * s2)
        out[i] = (inner + outer) / (N - 2)
    return out


def green_convolve(
    f: Callable,
    y,
    N: int,
    t_max: float = 1e3,
    n_panels: int = 48,
    n_gauss: int = 8,
    n_ang: int = 8,
    decay_check: bool = True,
) -> np.ndarray:
    """Newtonian potential G[f](y) = int f(z) |y-z|^(2-N) dz / ((N-2) |S^(N-1)|).

    Polar coordinates centred at y cancel the kernel singularity:
    G[f](y) = int_0^t_max t dt int_{S^(N-1)} f(y + t w) dw / ((N-2)|S^(N-1)|).
    ``f`` maps points (..., N) to values. A tail decaying no faster than
    |z|^(-2) (the kernel times t^(N-1) not integrable) raises ValueError.
    """
    y = np.atleast_2d(np.asarray(y, float))
    dirs, wdir = sphere_rule(N, n_ang)
    t, wt = radial_rule(t_max, n_panels, n_gauss, r_core=1.0)
    norm = (N - 2) * sphere_area(N)
    out = np.empty(len(y))
    for i, yi in enumerate(y):
        vals = f(yi[None, None, :] + t[:, None, None] * dirs[None, :, :])
        means = vals @ wdir
        if not np.all(np.isfinite(means)):
            raise ValueError("non-finite integrand in green_convolve")
        out[i] = np.sum(wt * t * means) / norm
    if decay_check:
        far = np.array([t_max / 4, t_max / 2, t_max])
        m = np.abs(np.array([f(far[j] * dirs) @ wdir for j in range(3)]))
        if np.all(m > 0):
            rate = -np.polyfit(np.log(far), np.log(m), 1)[0]
            if rate <= 2.0:
                raise ValueError(f"insufficient decay of f: spherical means decay like t^-{rate:.3g}")
    return out


# ---------------------------------------------------------------------------
# Sector grid and finite-volume Laplacian


def _one_sided(L: float, h: float, core: float, growth: float) -> np.ndarray:
    """Face distances 0 = d_0 < ... = L: step h up to ``core``, then geometric."""
    d = [0.0]
    step = h
    while d[-1] < L - 1e-12:
        if d[-1] >= core:
            step *= growth
        d.append(d[-1] + step)
    d[-1] = L
    if len(d) > 2 and d[-1] - d[-2] < 0.5 * (d[-2] - d[-3]):
        del d[-2]
    return np.array(d)


@dataclass(frozen=True, eq=False)
class SectorGrid:
    """Cell-centred grid on {0 <= theta <= pi/k} x [0, S] x [0, P]."""

    N: int
    k: int
    s_faces: np.ndarray
    th_faces: np.ndarray
    rho_faces: np.ndarray

    @property
    def shape(self) -> tuple[int, int, int]:
        return (len(self.s_faces) - 1, len(self.th_faces) - 1, len(self.rho_faces) - 1)

    @property
    def size(self) -> int:
        a, b, c = self.shape
        return a * b * c

    @staticmethod
    def _mid(f):
        return 0.5 * (f[1:] + f[:-1])

    @cached_property
    def centers(self):
        return self._mid(self.s_faces), self._mid(self.th_faces), self._mid(self.rho_faces)

    @cached_property
    def points(self) -> np.ndarray:
        s, th, rho = np.meshgrid(*self.centers, indexing="ij")
        y = np.zeros(s.shape + (self.N,))
        y[..., 0] = s * np.cos(th)
        y[..., 1] = s * np.sin(th)
        y[..., 2] = rho
        return y.reshape(-1, self.N)

    @cached_property
    def _measures(self):
        N = self.N
        sf, tf, rf = self.s_faces, self.th_faces, self.rho_faces
        Ms = 0.5 * (sf[1:] ** 2 - sf[:-1] ** 2)
        dth = np.diff(tf)
        Mr = sphere_area(N - 2) * (rf[1:] ** (N - 2) - rf[:-1] ** (N - 2)) / (N - 2)
        return Ms, dth, Mr

    @cached_property
    def volume(self) -> np.ndarray:
        """R^N measure of each cell."""
        Ms, dth, Mr = self._measures
        return (Ms[:, None, None] * dth[None, :, None] * Mr[None, None, :]).ravel()

    def integrate(self, f) -> float:
        """int over R^N of a symmetric field sampled at the cell centres."""
        return float(2 * self.k * np.sum(self.volume * f))

    @cached_property
    def stiffness(self) -> sp.csr_matrix:
        """Symmetric matrix A with (A phi)_c ~ vol_c (-Delta phi)(y_c)."""
        N = self.N
        ns, nt, nr = self.shape
        sf, tf, rf = self.s_faces, self.th_faces, self.rho_faces
        sc, tc, rc = self.centers
        Ms, dth, Mr = self._measures
        omega = sphere_area(N - 2)
        idx = np.arange(self.size).reshape(ns, nt, nr)
        rows, cols, vals = [], [], []
        diag = np.zeros(self.size)

        def couple(a, b, T):
            a, b, T = a.ravel(), b.ravel(), T.ravel()
            rows.extend([a, b])
            cols.extend([b, a])
            vals.extend([-T, -T])
            np.add.at(diag, a, T)
            np.add.at(diag, b, T)

        Ts = sf[1:-1, None, None] * dth[None, :, None] * Mr[None, None, :] / np.diff(sc)[:, None, None]
        couple(idx[:-1], idx[1:], Ts)
        ds = np.diff(sf)
        Tt = (ds / sc)[:, None, None] * Mr[None, None, :] / np.diff(tc)[None, :, None]
        couple(idx[:, :-1], idx[:, 1:], Tt)
        Tr = omega * rf[1:-1][None, None, :] ** (N - 3) * Ms[:, None, None] * dth[None, :, None] / np.diff(rc)[None, None, :]
        couple(idx[:, :, :-1], idx[:, :, 1:], Tr)
        # Robin outer faces
        S, P = sf[-1], rf[-1]
        kap = (N - 2) * S / (S**2 + rc**2)
        half = S - sc[-1]
        area = S * dth[:, None] * Mr[None, :]
        np.add.at(diag, idx[-1].ravel(), (area * kap[None, :] / (1 + 0.5 * half * kap[None, :])).ravel())
        kap = (N - 2) * P / (sc**2 + P**2)
        half = P - rc[-1]
        area = omega * P ** (N - 3) * Ms[:, None] * dth[None, :]
        np.add.at(diag, idx[:, :, -1].ravel(), (area * (kap / (1 + 0.5 * half * kap))[:, None]).ravel())
        rows.append(np.arange(self.size))
        cols.append(np.arange(self.size))
        vals.append(diag)
        A = sp.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(self.size, self.size))
        return A.tocsr()

    def laplacian(self, phi) -> np.ndarray:
        """Discrete Delta phi at the cell centres."""
        return -(self.stiffness @ np.asarray(phi, float)) / self.volume


def _faces(cfg: BubbleConfig, h: float, core: float, growth: float, R_out: float):
    lam, r, k = cfg.lam, cfg.r, cfg.k
    hh, cc = h / lam, core / lam
    left = _one_sided(r, hh, cc, growth)
    right = _one_sided(R_out - r, hh, cc, growth)
    s_faces = np.concatenate([r - left[::-1], r + right[1:]])
    s_faces[0] = 0.0
    th_faces = _one_sided(r * np.pi / k, hh, cc, growth) / r
    th_faces[-1] = np.pi / k
    return s_faces, th_faces, _one_sided(R_out, hh, cc, growth)


def build_grid(
    cfg: BubbleConfig,
    N: int,
    h: float = 0.4,
    core: float = 3.0,
    growth: float = 1.25,
    R_out: float | None = None,
    max_cells: int | None = 36000,
) -> SectorGrid:
    """Faces graded around the first bubble: spacing h/lam within core/lam
    of the centre in each of s, arc length r theta and rho, geometric
    growth beyond. The box extends to R_out = max(10 mu, r + 20/lam).

    With ``max_cells`` set, the growth factor is raised in steps of 0.05
    until the grid fits (the core spacing is kept).
    """
    R_out = max(10 * cfg.mu, cfg.r + 20 / cfg.lam) if R_out is None else R_out
    while True:
        faces = _faces(cfg, h, core, growth, R_out)
        size = np.prod([len(f) - 1 for f in faces])
        if max_cells is None or size <= max_cells or growth > 2.0:
            return SectorGrid(N, cfg.k, *faces)
        growth += 0.05


def apply_Lk(gs: GroundState, cfg: BubbleConfig, config: SystemConfig, phi, grid: SectorGrid):
    """(-Delta phi1 - p K1 W2^(p-1) phi2, -Delta phi2 - q K2 W1^(q-1) phi1) on the grid."""
    phi1, phi2 = (np.asarray(c, float) for c in phi)
    W1, W2 = eval_ansatz(gs, cfg, grid.points)
    K1, K2 = _potentials(config, cfg, grid.points)
    return (
        -grid.laplacian(phi1) - gs.p * K1 * W2 ** (gs.p - 1) * phi2,
        -grid.laplacian(phi2) - gs.q * K2 * W1 ** (gs.q - 1) * phi1,
    )


def projection_directions(gs: GroundState, cfg: BubbleConfig, y):
    """e_i = sum_j (p V_j^(p-1) Z_{j,i}, q U_j^(q-1) Y_{j,i}), i = 1 (ring radius), 2 (lam)."""
    y = np.asarray(y, float)
    e = np.zeros((2, 2) + y.shape[:-1])
    for x in polygon_points(cfg.k, cfg.r, gs.N):
        u, v = eval_bubble(gs, x, cfg.lam, y)
        d = bubble_derivatives(gs, x, cfg.lam, y)
        Vp1 = gs.p * np.abs(v) ** (gs.p - 1)
        Uq1 = gs.q * np.abs(u) ** (gs.q - 1)
        e[0, 0] += Vp1 * d.Z1
        e[0, 1] += Uq1 * d.Y1
        e[1, 0] += Vp1 * d.Z2
        e[1, 1] += Uq1 * d.Y2
    return e  # e[i, component]


# ---------------------------------------------------------------------------
# Projected linear solve and the contraction


class ProjectedOperator:
    """Solver for the bordered system

        L_k phi - sum_i l_i e_i = h,   <e_i, phi> = 0,  i = 1, 2,

    on a sector grid. The unbordered operator is factorized once (sparse
    LU); the two multipliers are eliminated through the 2x2 projected
    block. ``solve`` returns (phi1, phi2, (l1, l2)).
    """

    def __init__(self, gs: GroundState, cfg: BubbleConfig, config: SystemConfig, grid: SectorGrid):
        self.gs, self.cfg, self.config, self.grid = gs, cfg, config, grid
        y = grid.points
        n = grid.size
        self.n = n
        self.W1, self.W2 = eval_ansatz(gs, cfg, y)
        self.K1, self.K2 = _potentials(config, cfg, y)
        self.e = projection_directions(gs, cfg, y)
        vol = grid.volume
        A = grid.stiffness
        P = sp.diags(vol * gs.p * self.K1 * self.W2 ** (gs.p - 1))
        Q = sp.diags(vol * gs.q * self.K2 * self.W1 ** (gs.q - 1))
        M = sp.bmat([[A, -P], [-Q, A]], format="csc")
        try:
            self.lu = splu(M, permc_spec="MMD_AT_PLUS_A")
        except RuntimeError as exc:  # exactly singular factor
            raise ReductionError(f"augmented system singular: {exc}") from exc
        # x = M^-1 (b + E l) with C x = 0, E_i = vol e_i, C_i = vol e_i
        E = np.stack([np.concatenate([vol * self.e[i, 0], vol * self.e[i, 1]]) for i in range(2)], 1)
        self.ME = self.lu.solve(E)
        self.C = E.T
        S = self.C @ self.ME
        sv = np.linalg.svd(S, compute_uv=False)
        self.smallest_singular_value = float(sv[-1] / sv[0])
        if not sv[-1] > 1e-13 * sv[0]:
            raise ReductionError(f"augmented system singular: relative smallest singular value {sv[-1] / sv[0]:.3g} of the projected block")
        self.S = S

    def solve(self, h1, h2):
        vol = self.grid.volume
        x0 = self.lu.solve(np.concatenate([vol * h1, vol * h2]))
        ell = -np.linalg.solve(self.S, self.C @ x0)
        x = x0 + self.ME @ ell
        if not np.all(np.isfinite(x)):
            raise ReductionError("augmented system singular (non-finite solution)")
        n = self.n
        return x[:n], x[n:], ell

    def orthogonality(self, phi1, phi2) -> np.ndarray:
        """<(pV_j^(p-1) Z_{j,i}, q U_j^(q-1) Y_{j,i}), phi> over R^N (same for every j)."""
        g = self.grid
        return np.array([g.integrate(self.e[i, 0] * phi1 + self.e[i, 1] * phi2) / g.k for i in range(2)])


@dataclass(frozen=True, eq=False)
class ReductionResult:
    phi1: SampledField
    phi2: SampledField
    multipliers: tuple[float, float]
    star_norm: float
    iterations: int
    contraction_history: list[float]
    grid: SectorGrid | None = None
    orthogonality: tuple[float, float] = (0.0, 0.0)
    rhs_dstar: float = 0.0
    clamped: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def contraction_factor(self) -> float:
        """Largest ratio of successive differences (nan with fewer than 3 iterates)."""
        h = np.asarray(self.contraction_history)
        if len(h) < 3:
            return float("nan")
        h = h[1:]
        ok = h[:-1] > 0
        if not np.any(ok):
            return 0.0
        return float(np.max(h[1:][ok] / h[:-1][ok]))

    @property
    def in_E(self) -> bool:
        mu, m = self.meta.get("mu"), self.meta.get("m")
        return bool(self.star_norm <= mu ** (-m / 2)) if mu else True

    def to_dict(self) -> dict:
        return {
            "format_version": 1,
            "multipliers": list(map(float, self.multipliers)),
            "star_norm": self.star_norm,
            "iterations": self.iterations,
            "contraction_history": list(map(float, self.contraction_history)),
            "contraction_factor": self.contraction_factor,
            "orthogonality": list(map(float, self.orthogonality)),
            "rhs_dstar": self.rhs_dstar,
            "clamped": self.clamped,
            "in_E": self.in_E,
            "grid_shape": list(self.grid.shape) if self.grid is not None else None,
            **{k: v for k, v in self.meta.items() if isinstance(v, (int, float, str, bool))},
        }


def _star(grid_pts, cfg, params, *comps) -> float:
    w = weight(cfg, grid_pts, params.sigma)
    return float(sum(np.max(np.abs(c) / w) for c in comps))


def _dstar(grid_pts, cfg, params, *comps) -> float:
    w = weight(cfg, grid_pts, params.sigma + 2)
    return float(sum(np.max(np.abs(c) / w) for c in comps))


def _as_pair(h, points):
    if callable(h):
        return tuple(np.asarray(c, float) for c in h(points))
    return tuple(np.asarray(c, float) for c in h)


def solve_projected_linear(
    gs: GroundState,
    cfg: BubbleConfig,
    config: SystemConfig,
    h,
    grid: SectorGrid | None = None,
    params: NormParams | None = None,
    operator: ProjectedOperator | None = None,
) -> ReductionResult:
    """phi = LL_k(h): L_k phi = h + sum_i l_i e_i with phi orthogonal to e_1, e_2.

    ``h`` is a pair of arrays at the grid points or a callable returning it.
    """
    params = NormParams(gs.N) if params is None else params
    op = ProjectedOperator(gs, cfg, config, grid or build_grid(cfg, gs.N)) if operator is None else operator
    g = op.grid
    h1, h2 = _as_pair(h, g.points)
    phi1, phi2, ell = op.solve(h1, h2)
    meta = {"k": cfg.k, "mu": cfg.mu, "lam": cfg.lam, "r": cfg.r, "m": config.m}
    return ReductionResult(
        SampledField(g.points, phi1),
        SampledField(g.points, phi2),
        (float(ell[0]), float(ell[1])),
        _star(g.points, cfg, params, phi1, phi2),
        1,
        [],
        g,
        tuple(op.orthogonality(phi1, phi2)),
        _dstar(g.points, cfg, params, h1, h2),
        0,
        meta,
    )


def solve_nonlinear_contraction(
    gs: GroundState,
    cfg: BubbleConfig,
    config: SystemConfig,
    tol: float = 1e-10,
    max_iter: int = 60,
    grid: SectorGrid | None = None,
    params: NormParams | None = None,
    start=None,
    operator: ProjectedOperator | None = None,
) -> ReductionResult:
    """Fixed point of phi -> LL_k(R_k + N_k(phi)), iterated from ``start`` (default 0).

    Stops when the *-norm of successive differences drops below
    tol * max(1, ||phi||_*). Raises ReductionError when the differences
    stop decreasing (measured factor >= 1) or max_iter is reached.
    """
    params = NormParams(gs.N) if params is None else params
    op = ProjectedOperator(gs, cfg, config, grid or build_grid(cfg, gs.N)) if operator is None else operator
    g = op.grid
    y = g.points
    R1, R2 = residual_Rk(gs, cfg, config, y)
    W = (op.W1, op.W2)
    if start is None:
        phi1 = np.zeros(g.size)
        phi2 = np.zeros(g.size)
    else:
        phi1, phi2 = _as_pair(start, y)
    history: list[float] = []
    ell = np.zeros(2)
    clamped = 0
    it = 0
    while True:
        it += 1
        nl = nonlinearity_Nk(gs, cfg, config, (phi1, phi2), y, W=W)
        clamped = nl.clamped
        new1, new2, ell = op.solve(R1 + nl.N1, R2 + nl.N2)
        diff = _star(y, cfg, params, new1 - phi1, new2 - phi2)
        history.append(diff)
        phi1, phi2 = new1, new2
        size = _star(y, cfg, params, phi1, phi2)
        if diff <= tol * max(1.0, size) or diff == 0.0:
            break
        if len(history) >= 4 and history[-1] >= history[-2] >= history[-3]:
            ratio = history[-1] / history[-2]
            raise ReductionError(f"iteration not contracting: measured factor {ratio:.3g} >= 1")
        if it >= max_iter:
            raise ReductionError(f"no convergence in {max_iter} iterations (last difference {diff:.3g})")
    meta = {"k": cfg.k, "mu": cfg.mu, "lam": cfg.lam, "r": cfg.r, "m": config.m, "Rk_dstar_grid": _dstar(y, cfg, params, R1, R2)}
    return ReductionResult(
        SampledField(y, phi1),
        SampledField(y, phi2),
        (float(ell[0]), float(ell[1])),
        _star(y, cfg, params, phi1, phi2),
        it,
        history,
        g,
        tuple(op.orthogonality(phi1, phi2)),
        _dstar(y, cfg, params, R1, R2),
        clamped,
        meta,
    )


@dataclass(frozen=True)
class DecayReport:
    passed: bool
    margin: float  # min over samples of 1/2 - |phi_i| / W_i
    witness: np.ndarray | None  # first sample violating the bound
    exponents: tuple[float, float]  # fitted decay of |phi_i| against sum_j (1+|y-x_j|)^-(N-2)


def verify_decay_bound(result: ReductionResult, gs: GroundState, cfg: BubbleConfig) -> DecayReport:
    """Check |phi_i| <= W_i / 2 at every sample and fit the far-field decay."""
    pts = result.phi1.points
    W1, W2 = eval_ansatz(gs, cfg, pts)
    phis = (result.phi1.values, result.phi2.values)
    ratios = [np.abs(f) / np.maximum(W, 1e-300) for f, W in zip(phis, (W1, W2))]
    worst = np.maximum(ratios[0], ratios[1])
    margin = float(0.5 - np.max(worst))
    witness = None if margin >= 0 else pts[int(np.argmax(worst))]
    # exponent of |phi| ~ w^a with w = sum_j (1+|y-x_j|)^-(N-2), over the far field
    w = weight(cfg, pts, gs.N - 2)
    dist = np.min(np.linalg.norm(pts[:, None, :] - polygon_points(cfg.k, cfg.r, gs.N)[None], axis=-1), axis=1)
    far = dist > 4.0 / cfg.lam
    exps = []
    for f in phis:
        sel = far & (np.abs(f) > 0)
        if np.count_nonzero(sel) < 4:
            exps.append(float("nan"))
            continue
        # upper envelope: largest |phi| per weight bin
        lw, lf = np.log(w[sel]), np.log(np.abs(f[sel]))
        bins = np.linspace(lw.min(), lw.max(), 12)
        which = np.digitize(lw, bins)
        xs, ys = [], []
        for b in np.unique(which):
            m = which == b
            j = np.argmax(lf[m])
            xs.append(lw[m][j])
            ys.append(lf[m][j])
        exps.append(float(np.polyfit(xs, ys, 1)[0]) if len(xs) > 1 else float("nan"))
    return DecayReport(margin >= 0, margin, witness, (exps[0], exps[1]))


# ---------------------------------------------------------------------------
# Smooth interpolation of grid fields


class GridField:
    """Tensor quintic spline of a symmetric grid field in (s, theta, rho).

    The data are extended evenly across theta = 0, theta = pi/k and
    rho = 0 before fitting, so the interpolant inherits the symmetry.
    Derivatives are returned in Cartesian coordinates.
    """

    def __init__(self, grid: SectorGrid, values, degree: int = 5):
        sc, tc, rc = grid.centers
        ns, nt, nr = grid.shape
        v = np.asarray(values, float).reshape(ns, nt, nr)
        wedge = np.pi / grid.k
        # mirror twice in theta, once in rho
        th = np.concatenate([-tc[::-1], tc, 2 * wedge - tc[::-1]])
        v = np.concatenate([v[:, ::-1], v, v[:, ::-1]], axis=1)
        rho = np.concatenate([-rc[::-1], rc])
        v = np.concatenate([v[:, :, ::-1], v], axis=2)
        c = v
        knots = []
        for axis, x in enumerate((sc, th, rho)):
            spl = make_interp_spline(x, np.moveaxis(c, axis, 0), k=degree)
            knots.append(spl.t)
            c = np.moveaxis(spl.c, 0, axis)
        self.spline = NdBSpline(tuple(knots), c, degree)
        self.grid = grid
        self.N = grid.N
        self.wedge = wedge

    def _coords(self, y):
        y = np.asarray(y, float)
        s = np.hypot(y[..., 0], y[..., 1])
        th = np.arctan2(y[..., 1], y[..., 0])
        # fold into [0, pi/k]
        th = np.mod(th, 2 * self.wedge)
        th = np.where(th > self.wedge, 2 * self.wedge - th, th)
        rho = np.linalg.norm(y[..., 2:], axis=-1)
        return s, th, rho

    def cyl(self, y, nu=(0, 0, 0)):
        """Derivative d^a_s d^b_theta d^c_rho at the folded coordinates of y."""
        s, th, rho = self._coords(y)
        x = np.stack([s, th, rho], axis=-1)
        return self.spline(x.reshape(-1, 3), nu=nu).reshape(s.shape)

    def _frame(self, y):
        y = np.asarray(y, float)
        s = np.hypot(y[..., 0], y[..., 1])
        th_raw = np.arctan2(y[..., 1], y[..., 0])
        rho = np.linalg.norm(y[..., 2:], axis=-1)
        # the folding is a reflection; orientation of theta flips on odd images
        t = np.mod(th_raw, 2 * self.wedge)
        flip = np.where(t > self.wedge, -1.0, 1.0)
        es = np.zeros(y.shape)
        et = np.zeros(y.shape)
        es[..., 0], es[..., 1] = np.cos(th_raw), np.sin(th_raw)
        et[..., 0], et[..., 1] = -np.sin(th_raw), np.cos(th_raw)
        er = np.zeros(y.shape)
        with np.errstate(invalid="ignore", divide="ignore"):
            er[..., 2:] = np.where(rho[..., None] > 0, y[..., 2:] / np.where(rho > 0, rho, 1)[..., None], 0.0)
        return s, rho, flip, es, et, er

    def value(self, y):
        return self.cyl(y)

    def gradient(self, y):
        s, rho, flip, es, et, er = self._frame(y)
        fs = self.cyl(y, (1, 0, 0))
        ft = self.cyl(y, (0, 1, 0)) * flip
        fr = self.cyl(y, (0, 0, 1))
        with np.errstate(invalid="ignore", divide="ignore"):
            ts = np.where(s > 0, ft / np.where(s > 0, s, 1), 0.0)
        return fs[..., None] * es + ts[..., None] * et + fr[..., None] * er

    def laplacian(self, y):
        s, rho, *_ = self._frame(y)
        f_s = self.cyl(y, (1, 0, 0))
        f_ss = self.cyl(y, (2, 0, 0))
        f_tt = self.cyl(y, (0, 2, 0))
        f_r = self.cyl(y, (0, 0, 1))
        f_rr = self.cyl(y, (0, 0, 2))
        with np.errstate(invalid="ignore", divide="ignore"):
            ratio_r = np.where(rho > 1e-12, f_r / np.where(rho > 1e-12, rho, 1), f_rr)
        return f_ss + f_s / s + f_tt / s**2 + f_rr + (self.N - 3) * ratio_r

    def theta_derivative(self, y):
        """Rotation generator d_theta = y1 d_2 - y2 d_1 applied to the field."""
        _, _, flip, *_ = self._frame(y)
        return self.cyl(y, (0, 1, 0)) * flip

    def theta_gradient(self, y):
        """Cartesian gradient of d_theta f."""
        s, rho, flip, es, et, er = self._frame(y)
        gs_ = self.cyl(y, (1, 1, 0)) * flip
        gt = self.cyl(y, (0, 2, 0))
        gr = self.cyl(y, (0, 1, 1)) * flip
        return gs_[..., None] * es + (gt / s)[..., None] * et + gr[..., None] * er

    def theta_laplacian(self, y):
        s, rho, flip, *_ = self._frame(y)
        f_s = self.cyl(y, (1, 1, 0))
        f_ss = self.cyl(y, (2, 1, 0))
        f_tt = self.cyl(y, (0, 3, 0))
        f_r = self.cyl(y, (0, 1, 1))
        f_rr = self.cyl(y, (0, 1, 2))
        with np.errstate(invalid="ignore", divide="ignore"):
            ratio_r = np.where(rho > 1e-12, f_r / np.where(rho > 1e-12, rho, 1), f_rr)
        return flip * (f_ss + f_s / s + f_tt / s**2 + f_rr + (self.N - 3) * ratio_r)
