"""Polygonal bubble configurations, the ansatz pair and weighted sup-norms."""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

from bubblekit.config import ConfigError, SystemConfig
from bubblekit.ground_state import GroundState, eval_bubble


@dataclass(frozen=True)
class BubbleConfig:
    """Reduced coordinates: k bubbles on a ring of radius r, common height lam.

    Leaving the window |r - mu r0| <= mu^(-theta_bar) or [L0, L1] only
    warns; the formulas still evaluate.
    """

    k: int
    r: float
    lam: float
    mu: float
    r0: float = 1.0
    theta_bar: float = 0.1
    L0: float = 0.2
    L1: float = 5.0

    def __post_init__(self):
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        if not (self.r > 0 and self.lam > 0 and self.mu > 0):
            raise ConfigError("r, lam and mu must be positive")
        if abs(self.r - self.mu * self.r0) > self.mu ** (-self.theta_bar) * (1 + 1e-12):
            warnings.warn(
                f"ring radius r={self.r:.6g} outside the window around mu*r0={self.mu * self.r0:.6g}",
                stacklevel=2,
            )
        if not self.L0 <= self.lam <= self.L1:
            warnings.warn(f"lam={self.lam} outside [{self.L0}, {self.L1}]", stacklevel=2)

    @classmethod
    def at_well(cls, config: SystemConfig, k: int, lam: float = 1.0, r: float | None = None, **kw):
        mu = config.mu(k)
        return cls(k=k, r=mu * config.r0 if r is None else r, lam=lam, mu=mu, r0=config.r0, **kw)

    @property
    def min_separation(self) -> float:
        return 2 * self.r * np.sin(np.pi / self.k) if self.k > 1 else np.inf


@dataclass(frozen=True)
class NormParams:
    """Weight exponents: sigma = (N-2)/2 + tau for the *-norm, sigma + 2 for **."""

    N: int
    eta: float = 0.05

    def __post_init__(self):
        if not self.eta > 0:
            raise ConfigError("eta must be positive")

    @property
    def tau(self) -> float:
        return 1.0 + self.eta

    @property
    def sigma(self) -> float:
        return (self.N - 2) / 2 + self.tau


def polygon_points(k: int, r: float, N: int) -> np.ndarray:
    """Centres x_j = r(cos(2(j-1)pi/k), sin(2(j-1)pi/k), 0, ..., 0)."""
    ang = 2 * np.pi * np.arange(k) / k
    x = np.zeros((k, N))
    x[:, 0] = r * np.cos(ang)
    x[:, 1] = r * np.sin(ang)
    return x


def eval_ansatz(gs: GroundState, cfg: BubbleConfig, y):
    """(W1, W2) = sums of the U- and V-bubbles over the polygon centres."""
    y = np.asarray(y, dtype=float)
    W1 = np.zeros(y.shape[:-1])
    W2 = np.zeros(y.shape[:-1])
    for x in polygon_points(cfg.k, cfg.r, gs.N):
        u, v = eval_bubble(gs, x, cfg.lam, y)
        W1 = W1 + u
        W2 = W2 + v
    return W1, W2


def weight(cfg: BubbleConfig, y, sigma: float, N: int | None = None) -> np.ndarray:
    """sum_j (1 + |y - x_j|)^(-sigma)."""
    y = np.asarray(y, dtype=float)
    N = y.shape[-1] if N is None else N
    out = np.zeros(y.shape[:-1])
    for x in polygon_points(cfg.k, cfg.r, N):
        out = out + (1 + np.linalg.norm(y - x, axis=-1)) ** (-sigma)
    return out


@dataclass(frozen=True, eq=False)
class SampledField:
    """Values (M,) or (M, 2) at points (M, N)."""

    points: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if pts.ndim != 2:
            raise ValueError("points must have shape (M, N)")
        if vals.shape[0] != pts.shape[0]:
            raise ValueError("one value (or pair) per sample point")
        if not np.all(np.isfinite(vals)):
            raise ValueError("non-finite field values")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)

    @property
    def N(self) -> int:
        return self.points.shape[1]

    @property
    def pair(self) -> bool:
        return self.values.ndim == 2

    def components(self) -> list[np.ndarray]:
        return [self.values[:, i] for i in range(self.values.shape[1])] if self.pair else [self.values]

    def with_values(self, values) -> SampledField:
        return SampledField(self.points, values, dict(self.meta))

    def to_csv(self, path: str | Path) -> None:
        N = self.N
        ncomp = self.values.shape[1] if self.pair else 1
        head = [f"y{i + 1}" for i in range(N)] + [f"value{i + 1}" for i in range(ncomp)]
        vals = self.values.reshape(len(self.points), -1)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(head)
            for pt, v in zip(self.points, vals):
                w.writerow([repr(float(x)) for x in pt] + [repr(float(x)) for x in v])

    @classmethod
    def from_csv(cls, path: str | Path) -> SampledField:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        head = rows[0]
        N = sum(h.startswith("y") for h in head)
        data = np.array(rows[1:], dtype=float).reshape(-1, len(head))
        vals = data[:, N:]
        return cls(data[:, :N], vals[:, 0] if vals.shape[1] == 1 else vals)


def _norm(field: SampledField, cfg: BubbleConfig, sigma: float) -> float:
    if len(field.points) == 0:
        raise ValueError("empty sample set")
    w = weight(cfg, field.points, sigma)
    return float(sum(np.max(np.abs(c) / w) for c in field.components()))


def weighted_norm_star(field: SampledField, cfg: BubbleConfig, params: NormParams) -> float:
    """Sampled ||u||_*; for pair fields the sum of the component norms."""
    return _norm(field, cfg, params.sigma)


def weighted_norm_dstar(field: SampledField, cfg: BubbleConfig, params: NormParams) -> float:
    """Sampled ||f||_** (weight exponent sigma + 2)."""
    return _norm(field, cfg, params.sigma + 2)


def norm_argmax(field: SampledField, cfg: BubbleConfig, sigma: float) -> np.ndarray:
    w = weight(cfg, field.points, sigma)
    ratio = sum(np.abs(c) / w for c in field.components())
    return field.points[int(np.argmax(ratio))]


def group_generators(k: int, N: int) -> list[np.ndarray]:
    """Rotation by 2 pi/k in the (y1, y2) plane and the reflections y_h -> -y_h, h >= 2."""
    gens = []
    c, s = np.cos(2 * np.pi / k), np.sin(2 * np.pi / k)
    R = np.eye(N)
    R[:2, :2] = [[c, -s], [s, c]]
    gens.append(R)
    for h in range(1, N):
        F = np.eye(N)
        F[h, h] = -1.0
        gens.append(F)
    return gens


def group_elements(k: int, N: int) -> list[np.ndarray]:
    """All k * 2^(N-1) elements R^j D (D diagonal sign flips of y2..yN)."""
    R = group_generators(k, N)[0]
    out = []
    for j in range(k):
        Rj = np.linalg.matrix_power(R, j)
        for mask in range(2 ** (N - 1)):
            D = np.ones(N)
            for h in range(1, N):
                if mask >> (h - 1) & 1:
                    D[h] = -1.0
            out.append(Rj * D[None, :])
    return out


def group_closure(points, k: int) -> np.ndarray:
    """Orbit of ``points`` under the symmetry group, duplicates removed."""
    pts = np.asarray(points, dtype=float)
    imgs = np.concatenate([pts @ g.T for g in group_elements(k, pts.shape[1])])
    scale = max(1.0, float(np.max(np.abs(imgs))))
    _, idx = np.unique(np.round(imgs / scale, 10), axis=0, return_index=True)
    return imgs[np.sort(idx)]


def check_symmetry(field: SampledField, k: int, rtol: float = 1e-9) -> float:
    """Max over generators g and samples y of |u(g y) - u(y)|."""
    tree = cKDTree(field.points)
    scale = max(1.0, float(np.max(np.abs(field.points))))
    vals = field.values.reshape(len(field.points), -1)
    defect = 0.0
    for g in group_generators(k, field.N):
        dist, j = tree.query(field.points @ g.T)
        if np.any(dist > rtol * scale):
            i = int(np.argmax(dist))
            raise ValueError(f"sample set not closed under the symmetry group (missing image of point {i})")
        defect = max(defect, float(np.max(np.abs(vals[j] - vals))))
    return defect


def structured_samples(cfg: BubbleConfig, N: int, n_shell: int = 24, far: bool = True) -> np.ndarray:
    """Sample set in the sector cell of the first bubble.

    Log-radial shells around x_1 along 2N coordinate and N(N-1) diagonal
    directions, the midpoint to the neighbouring bubble, points along the
    ring, and a coarse far-field set on rays through the origin.
    """
    x1 = polygon_points(cfg.k, cfg.r, N)[0]
    dirs = [np.eye(N)[i] * s for i in range(N) for s in (1, -1)]
    for i in range(min(N, 3)):
        for j in range(i + 1, min(N, 3)):
            for si in (1, -1):
                for sj in (1, -1):
                    d = np.zeros(N)
                    d[i], d[j] = si, sj
                    dirs.append(d / np.sqrt(2))
    dirs = np.array(dirs)
    reach = cfg.min_separation / 2 if cfg.k > 1 else 10 * cfg.mu
    reach = min(reach, 10 * cfg.mu)
    radii = np.geomspace(0.05 / cfg.lam, max(reach, 0.1), n_shell)
    pts = [x1[None, :]]
    pts.append((x1[None, None, :] + radii[:, None, None] * dirs[None, :, :]).reshape(-1, N))
    if cfg.k > 1:
        ang = np.linspace(0, np.pi / cfg.k, 12)
        ring = np.zeros((len(ang), N))
        ring[:, 0] = cfg.r * np.cos(ang)
        ring[:, 1] = cfg.r * np.sin(ang)
        pts.append(ring)
    if far:
        rays = np.zeros((6, N))
        a = np.linspace(0, np.pi / max(cfg.k, 1), 3)
        rays[:3, 0], rays[:3, 1] = np.cos(a), np.sin(a)
        rays[3:, 0], rays[3:, 2] = np.cos(a), np.sin(a)
        R = np.geomspace(1.5 * cfg.r, 10 * max(cfg.mu, cfg.r), 8)
        pts.append((R[:, None, None] * rays[None, :, :]).reshape(-1, N))
        pts.append(np.zeros((1, N)))
    return np.concatenate(pts)


def sample_ansatz(gs: GroundState, cfg: BubbleConfig, points=None, symmetric: bool = False) -> SampledField:
    """Ansatz pair on a sample set (structured by default)."""
    pts = structured_samples(cfg, gs.N) if points is None else np.asarray(points, float)
    if symmetric:
        pts = group_closure(pts, cfg.k)
    W1, W2 = eval_ansatz(gs, cfg, pts)
    return SampledField(pts, np.stack([W1, W2], axis=1), {"k": cfg.k, "r": cfg.r, "lam": cfg.lam, "mu": cfg.mu})
