"""Problem instances: exponents on the critical hyperbola and radial potentials."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

HYPERBOLA_TOL = 1e-12


class ConfigError(ValueError):
    """Raised for invalid problem instances."""


@dataclass(frozen=True)
class HyperbolaReport:
    valid: bool
    defect: float
    errors: tuple[str, ...] = ()

    def raise_if_invalid(self) -> None:
        if not self.valid:
            raise ConfigError("; ".join(self.errors))


def validate_hyperbola(N: int, p: float, q: float) -> HyperbolaReport:
    """Check 1/(p+1) + 1/(q+1) = (N-2)/N and p <= (N+2)/(N-2) <= q.

    The returned ``defect`` is the signed value of
    ``1/(p+1) + 1/(q+1) - (N-2)/N``.
    """
    errors = []
    defect = 1.0 / (p + 1) + 1.0 / (q + 1) - (N - 2) / N
    if N < 3:
        errors.append(f"dimension-too-small: N={N} < 3")
    if abs(defect) > HYPERBOLA_TOL:
        errors.append(f"off-hyperbola: defect={defect:+.3e}")
    crit = (N + 2) / (N - 2) if N > 2 else np.inf
    if not (p <= crit + HYPERBOLA_TOL and q >= crit - HYPERBOLA_TOL):
        errors.append(f"ordering-violated: need p <= {crit:.6g} <= q (p={p}, q={q})")
    return HyperbolaReport(not errors, defect, tuple(errors))


def partner_exponent(N: int, p: float) -> float:
    """Return the q with (p, q) on the critical hyperbola."""
    crit = (N + 2) / (N - 2)
    if not (1.0 < p <= crit + HYPERBOLA_TOL):
        raise ConfigError(f"p={p} outside the admissible interval (1, {crit:.6g}]")
    if abs(p - crit) <= HYPERBOLA_TOL:
        return crit
    inv = (N - 2) / N - 1.0 / (p + 1)
    return 1.0 / inv - 1.0


@dataclass(frozen=True)
class AssumptionPReport:
    passed: bool
    lower_bound: float
    upper_bound: float
    m_bound: float
    reasons: tuple[str, ...] = ()


def check_assumption_P(N: int, p: float, m: float) -> AssumptionPReport:
    """Exponent range needed for the construction, together with the
    restriction ``m < (2p-1)(N-2) - 8`` on the potential exponent."""
    upper = (N + 2) / (N - 2)
    if N == 5:
        lower = 13 / 6
    else:
        lower = max((N + 1) / (N - 2), N * (N - 2) / ((N - 2) ** 2 - (N - 2 - m)))
    m_bound = (2 * p - 1) * (N - 2) - 8
    reasons = []
    if not p > lower:
        reasons.append(f"p={p} <= lower bound {lower:.6g}")
    if not p <= upper:
        reasons.append(f"p={p} > upper bound {upper:.6g}")
    if not m < m_bound:
        reasons.append(f"m={m} >= (2p-1)(N-2)-8 = {m_bound:.6g}")
    if N < 5:
        reasons.append(f"N={N} < 5")
    return AssumptionPReport(not reasons, lower, upper, m_bound, tuple(reasons))


OUTSIDE_MODELS = ("clamp", "smooth_decay")


@dataclass(frozen=True)
class PotentialSpec:
    """K(r) = 1 - c|r - r0|^m on |r - r0| < delta, continued outside.

    ``clamp`` freezes K at its window-edge value; ``smooth_decay``
    continues with matching slope and relaxes exponentially (length
    ``delta``) to a constant.
    """

    r0: float
    c: float
    m: float
    theta: float = 1.0
    delta: float = 0.5
    outside: str = "clamp"

    def __post_init__(self):
        if not self.r0 > 0:
            raise ConfigError(f"r0 must be positive, got {self.r0}")
        if not self.c > 0:
            raise ConfigError(f"c must be positive, got {self.c}")
        if not self.m >= 2:
            raise ConfigError(f"m must be >= 2, got {self.m}")
        if not self.theta > 0:
            raise ConfigError(f"theta must be positive, got {self.theta}")
        if not self.delta > 0:
            raise ConfigError(f"delta must be positive, got {self.delta}")
        if self.outside not in OUTSIDE_MODELS:
            raise ConfigError(f"outside must be one of {OUTSIDE_MODELS}")
        if not self.far_value > 0:
            raise ConfigError(
                f"potential is not positive outside the window (far value {self.far_value:.3g})"
            )

    @property
    def edge_value(self) -> float:
        return 1.0 - self.c * self.delta**self.m

    @property
    def far_value(self) -> float:
        if self.outside == "clamp":
            return self.edge_value
        return self.edge_value - self.c * self.m * self.delta**self.m

    def __call__(self, r):
        return eval_potential(self, r)

    def derivative(self, r):
        """dK/dr."""
        r = np.asarray(r, dtype=float)
        s = np.abs(r - self.r0)
        sgn = np.sign(r - self.r0)
        inside = -self.c * self.m * s ** (self.m - 1) * sgn
        if self.outside == "clamp":
            outside = np.zeros_like(s)
        else:
            out = s - self.delta
            outside = -self.c * self.m * self.delta ** (self.m - 1) * np.exp(-out / self.delta) * sgn
        return np.where(s < self.delta, inside, outside)

    def to_dict(self) -> dict:
        return {
            "r0": self.r0,
            "c": self.c,
            "m": self.m,
            "theta": self.theta,
            "delta": self.delta,
            "outside": self.outside,
        }


def eval_potential(spec: PotentialSpec | None, r):
    """Evaluate the radial potential; ``None`` stands for K = 1."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ConfigError("potential evaluated at negative radius")
    if spec is None:
        return np.ones_like(r)
    s = np.abs(r - spec.r0)
    inside = 1.0 - spec.c * s**spec.m
    if spec.outside == "clamp":
        outside = np.full_like(s, spec.edge_value)
    else:
        out = np.maximum(s - spec.delta, 0.0)
        drop = spec.c * spec.m * spec.delta**spec.m * (1.0 - np.exp(-out / spec.delta))
        outside = spec.edge_value - drop
    val = np.where(s < spec.delta, inside, outside)
    return val if val.ndim else float(val)


def potential_condition(spec: PotentialSpec, N: int, h: float = 1e-3) -> float:
    """Value of Delta K - r (Delta K + (Delta K)'/2) at r = r0 (radial Laplacian
    in R^N, derivatives by central differences)."""

    def lap(r):
        k = lambda x: eval_potential(spec, x)
        d2 = (k(r + h) - 2 * k(r) + k(r - h)) / h**2
        d1 = (k(r + h) - k(r - h)) / (2 * h)
        return d2 + (N - 1) * d1 / r

    r0 = spec.r0
    lap0 = lap(r0)
    dlap = (lap(r0 + h) - lap(r0 - h)) / (2 * h)
    return lap0 - r0 * (lap0 + 0.5 * dlap)


def scaling_parameter(k: int, N: int, m: float) -> float:
    """mu = k^((N-2)/(N-2-m))."""
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    if not m < N - 2:
        raise ConfigError(f"m={m} must be < N-2={N - 2}")
    return float(k) ** ((N - 2) / (N - 2 - m))


@dataclass(frozen=True)
class SystemConfig:
    """Dimension, exponent pair and the two potentials.

    ``potential1`` multiplies V^p (first equation), ``potential2``
    multiplies U^q. ``None`` means K = 1.
    """

    N: int
    p: float
    q: float
    potential1: PotentialSpec | None = None
    potential2: PotentialSpec | None = None
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if self.N < 5:
            raise ConfigError(f"dimension-too-small: N={self.N} < 5")
        validate_hyperbola(self.N, self.p, self.q).raise_if_invalid()
        pots = [pt for pt in (self.potential1, self.potential2) if pt is not None]
        for pt in pots:
            if not pt.m < self.N - 2:
                raise ConfigError(f"potential exponent m={pt.m} must be < N-2")
        if len(pots) == 2 and abs(pots[0].r0 - pots[1].r0) > 1e-14:
            raise ConfigError("both potentials must share the concentration radius r0")

    @classmethod
    def symmetric(cls, N: int, **kw) -> SystemConfig:
        crit = (N + 2) / (N - 2)
        return cls(N, crit, crit, **kw)

    @classmethod
    def from_p(cls, N: int, p: float, **kw) -> SystemConfig:
        return cls(N, p, partner_exponent(N, p), **kw)

    def K1(self, r):
        return eval_potential(self.potential1, r)

    def K2(self, r):
        return eval_potential(self.potential2, r)

    @property
    def r0(self) -> float:
        for pt in (self.potential1, self.potential2):
            if pt is not None:
                return pt.r0
        return 1.0

    @property
    def m(self) -> float:
        """min(m1, m2) over the non-trivial potentials."""
        ms = [pt.m for pt in (self.potential1, self.potential2) if pt is not None]
        return min(ms) if ms else 2.0

    @property
    def flat(self) -> bool:
        return self.potential1 is None and self.potential2 is None

    @property
    def decay_case(self) -> str:
        thresh = self.N / (self.N - 2)
        if abs(self.p - thresh) <= 1e-12:
            return "log"
        return "sub" if self.p < thresh else "super"

    def mu(self, k: int) -> float:
        return scaling_parameter(k, self.N, self.m)

    def with_potentials(self, potential1=None, potential2=None) -> SystemConfig:
        return SystemConfig(self.N, self.p, self.q, potential1, potential2)

    def to_dict(self) -> dict:
        return {
            "format_version": 1,
            "N": self.N,
            "p": self.p,
            "q": self.q,
            "potential1": None if self.potential1 is None else self.potential1.to_dict(),
            "potential2": None if self.potential2 is None else self.potential2.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> SystemConfig:
        def pot(x):
            if x is None:
                return None
            return PotentialSpec(
                r0=float(x["r0"]),
                c=float(x["c"]),
                m=float(x["m"]),
                theta=float(x.get("theta", 1.0)),
                delta=float(x.get("delta", 0.5)),
                outside=x.get("outside", "clamp"),
            )

        try:
            N = int(d["N"])
            p = float(d["p"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed config: {exc}") from exc
        q = float(d["q"]) if d.get("q") is not None else partner_exponent(N, p)
        return cls(N, p, q, pot(d.get("potential1")), pot(d.get("potential2")))

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def load_config(path: str | Path) -> SystemConfig:
    with open(path) as fh:
        return SystemConfig.from_dict(json.load(fh))


def save_config(cfg: SystemConfig, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(cfg.to_dict(), fh, indent=2, sort_keys=True)
