"""Quadrature rules shared by the energy, Green and Pohozaev computations."""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import gamma, roots_gegenbauer, roots_legendre


def sphere_area(n: int) -> float:
    """Surface area of the unit sphere S^{n-1} in R^n."""
    return float(2 * np.pi ** (n / 2) / gamma(n / 2))


def ball_volume(n: int) -> float:
    return sphere_area(n) / n


@lru_cache(maxsize=64)
def _polar_rule(power: int, n: int):
    """Nodes/weights for int_0^pi g(theta) sin^power(theta) dtheta, exact for
    polynomials in (cos, sin) after the substitution x = cos(theta)."""
    if power == 0:
        x, w = roots_legendre(n)
        theta = 0.5 * np.pi * (x + 1)
        return theta, 0.5 * np.pi * w
    # sin^power dtheta = (1-x^2)^((power-1)/2) dx -> Gegenbauer alpha = power/2
    alpha = power / 2
    if power == 1:
        x, w = roots_legendre(n)
    else:
        x, w = roots_gegenbauer(n, alpha)
    return np.arccos(x), w


@lru_cache(maxsize=64)
def sphere_rule(dim: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Product rule on S^{dim-1}: unit vectors (M, dim) and weights summing to
    the sphere area.

    Hyperspherical angles theta_1..theta_{dim-2} use Gauss-Gegenbauer
    nodes for the weights sin^{dim-1-i}; the last angle uses the
    trapezoid rule with 2n points.
    """
    if dim == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    nphi = 2 * n
    phi = 2 * np.pi * (np.arange(nphi) + 0.5) / nphi
    pts = np.stack([np.cos(phi), np.sin(phi)], axis=1)
    wts = np.full(nphi, 2 * np.pi / nphi)
    # build up from S^1 by adding one polar angle at a time
    for d in range(3, dim + 1):
        theta, wt = _polar_rule(d - 2, n)
        ct, st = np.cos(theta), np.sin(theta)
        new_pts = np.concatenate(
            [ct[:, None, None] * np.ones((1, len(pts), 1)), st[:, None, None] * pts[None, :, :]],
            axis=2,
        ).reshape(-1, d)
        wts = (wt[:, None] * wts[None, :]).ravel()
        pts = new_pts
    return pts, wts


def gauss_panels(edges, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule with n nodes on each panel [edges[i], edges[i+1]]."""
    edges = np.asarray(edges, dtype=float)
    x, w = roots_legendre(n)
    a, b = edges[:-1, None], edges[1:, None]
    nodes = 0.5 * (b - a) * x[None, :] + 0.5 * (b + a)
    weights = 0.5 * (b - a) * w[None, :]
    return nodes.ravel(), weights.ravel()


def radial_rule(r_max: float, n_panels: int = 40, n: int = 8, r_core: float = 1.0):
    """Gauss panels on [0, r_max]: uniform on [0, r_core], geometric beyond."""
    if r_max <= r_core:
        return gauss_panels(np.linspace(0.0, r_max, n_panels + 1), n)
    n_core = max(2, n_panels // 5)
    inner = np.linspace(0.0, r_core, n_core + 1)
    outer = np.geomspace(r_core, r_max, n_panels - n_core + 1)
    return gauss_panels(np.concatenate([inner, outer[1:]]), n)


def radial_integral(f, N: int, r_max: float, n_panels: int = 60, n: int = 8, r_core: float = 1.0):
    """int_{|y|<r_max} f(|y|) dy for a radial integrand f(r)."""
    r, w = radial_rule(r_max, n_panels, n, r_core)
    return sphere_area(N) * np.sum(w * r ** (N - 1) * f(r))


def richardson_order(e_coarse: float, e_fine: float, ratio: float = 2.0) -> float:
    """Observed convergence order from two error levels."""
    if e_fine <= 0 or e_coarse <= 0:
        return np.inf
    return float(np.log(e_coarse / e_fine) / np.log(ratio))
