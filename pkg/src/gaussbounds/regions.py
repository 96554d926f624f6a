"""
Rate regions built from output-entropy bounds of the quantum-limited attenuator.

Two scenarios are covered, both for transmissivity 1/2 <= eta <= 1 and mean
input energy E per mode:

* the degraded broadcast channel, where the sender reaches receiver A' through
  the attenuator and receiver B' through the complementary output;
* the triple trade-off of the attenuator, either classical / quantum /
  entanglement generation (CQG) or public / private / key generation (CPK).

Each region comes in four flavours (:class:`CurveKind`): time sharing,
the achievable region of the optimal Gaussian code, and outer bounds obtained
from the entropy power inequality and from the sharper bound ``f_lambda``.
Rates are in nats per channel use.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np
from scipy.optimize import brentq

from .bounds import epi_f_lambda, epi_f_lambda_inverse, f_lambda, f_lambda_inverse
from .fock import g, g_inverse

__all__ = [
    "CurveKind",
    "RegionParameterError",
    "RatePair",
    "RateTriple",
    "RegionCurve",
    "TradeoffBounds",
    "broadcast_achievable",
    "broadcast_outer",
    "broadcast_time_sharing",
    "broadcast_boundary",
    "tradeoff_achievable_cqg",
    "tradeoff_achievable_cpk",
    "tradeoff_outer_cqg",
    "tradeoff_outer_cpk",
    "tradeoff_bounds",
    "project_cq_plane",
    "projected_rate",
    "tradeoff_time_sharing",
    "boundary_value",
    "containment_gap",
    "in_broadcast_region",
    "in_tradeoff_region",
    "BETA_GRID",
]

BETA_GRID = 101


class CurveKind(str, enum.Enum):
    ACHIEVABLE = "Achievable"
    TIME_SHARING = "TimeSharing"
    OUTER_EPI = "OuterEPI"
    OUTER_NEW = "OuterNew"


class RegionParameterError(ValueError):
    """eta outside [1/2, 1], non-positive energy or beta outside [0, 1]."""


@dataclass(frozen=True)
class RatePair:
    r_a: float
    r_b: float

    def __post_init__(self):
        if self.r_a < 0 or self.r_b < 0:
            raise ValueError(f"rates must be nonnegative, got ({self.r_a}, {self.r_b})")


@dataclass(frozen=True)
class RateTriple:
    """(C, Q, G) or (C, P, K). The last rate is negative when the resource is consumed."""

    c: float
    q_or_p: float
    g_or_k: float

    def __post_init__(self):
        if self.c < 0 or self.q_or_p < 0:
            raise ValueError(f"c and q_or_p must be nonnegative, got ({self.c}, {self.q_or_p})")


class TradeoffBounds(NamedTuple):
    """Right-hand sides of the three trade-off inequalities.

    For CQG they bound C + 2Q, Q + G and C + Q + G; for CPK they bound
    C + P, P + K and C + P + K.
    """

    first: float
    second: float
    third: float


@dataclass(frozen=True, eq=False)
class RegionCurve:
    """Upper boundary of a 2-D rate region, sampled at increasing x.

    ``params`` always holds ``region`` ("broadcast", "cqg" or "cpk"), ``eta``
    and ``E``. ``betas`` is the code parameter attaining each point, or None
    where no such parameter exists.
    """

    points: np.ndarray
    kind: CurveKind
    params: dict
    formula_id: str
    betas: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError("points must have shape (k, 2)")
        if np.any(np.diff(pts[:, 0]) <= 0):
            raise ValueError("x coordinates must be strictly increasing")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @property
    def x(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.points[:, 1]

    def is_monotone(self, tol: float = 1e-12) -> bool:
        return bool(np.all(np.diff(self.y) <= tol))


def _check_eta_energy(eta: float, E: float) -> None:
    if not 0.5 <= eta <= 1.0:
        raise RegionParameterError(f"eta must lie in [1/2, 1], got {eta}")
    if not E > 0:
        raise RegionParameterError(f"energy must be positive, got {E}")


def _check_beta(beta: float) -> None:
    if not 0.0 <= beta <= 1.0:
        raise RegionParameterError(f"beta must lie in [0, 1], got {beta}")


def _check_tag(f: CurveKind | str) -> CurveKind:
    kind = CurveKind(f)
    if kind not in (CurveKind.OUTER_EPI, CurveKind.OUTER_NEW):
        raise ValueError(f"outer bounds need OuterEPI or OuterNew, got {kind.value}")
    return kind


# -- attenuator entropy maps -------------------------------------------------
#
# Each map sends the input entropy per mode of the attenuator with
# transmissivity lam to a lower bound on its output entropy per mode. The
# endpoints lam = 0 (output is vacuum) and lam = 1 (identity) are handled here
# since the closed forms divide by 1 - lam.


def _entropy_map(kind: CurveKind, lam: float) -> Callable[[float], float]:
    if lam <= 0.0:
        return lambda x: 0.0
    if lam >= 1.0:
        return lambda x: x
    if kind is CurveKind.ACHIEVABLE:
        return lambda x: g(lam * g_inverse(x))
    if kind is CurveKind.OUTER_EPI:
        return lambda x: epi_f_lambda(x, lam)
    return lambda x: f_lambda(x, lam)


def _entropy_map_inverse(kind: CurveKind, lam: float) -> Callable[[float], float]:
    if lam <= 0.0:
        raise RegionParameterError("the zero-transmissivity map is not invertible")
    if lam >= 1.0:
        return lambda y: y
    if kind is CurveKind.ACHIEVABLE:
        return lambda y: g(g_inverse(y) / lam)
    if kind is CurveKind.OUTER_EPI:
        return lambda y: epi_f_lambda_inverse(y, lam)
    return lambda y: f_lambda_inverse(y, lam)


# -- broadcast channel ---------------------------------------------------------


def _broadcast_parts(kind: CurveKind, eta: float, E: float):
    lam = (1 - eta) / eta
    top = g((1 - eta) * E)
    fmap = _entropy_map(kind, lam)
    if kind is CurveKind.ACHIEVABLE or lam <= 0.0:
        x_max = g(eta * E)
    else:
        x_max = _entropy_map_inverse(kind, lam)(top)
    return lam, top, fmap, x_max


def broadcast_boundary(kind: CurveKind | str, eta: float, E: float, x):
    """Largest R_B' allowed at R_A' = x by the given region (0 beyond its extent)."""
    kind = CurveKind(kind)
    _check_eta_energy(eta, E)
    if kind is CurveKind.TIME_SHARING:
        xa, yb = g(eta * E), g((1 - eta) * E)
        fn = lambda v: max(0.0, yb * (1.0 - v / xa))  # noqa: E731
    else:
        _, top, fmap, x_max = _broadcast_parts(kind, eta, E)
        fn = lambda v: max(0.0, top - fmap(min(v, x_max)))  # noqa: E731
    if np.ndim(x) == 0:
        return fn(float(x))
    return np.array([fn(float(v)) for v in np.ravel(x)]).reshape(np.shape(x))


def _broadcast_curve(kind: CurveKind, eta: float, E: float, samples: int, formula_id: str) -> RegionCurve:
    if samples < 2:
        raise ValueError("need at least 2 samples")
    _, top, fmap, x_max = _broadcast_parts(kind, eta, E)
    xs = np.linspace(0.0, x_max, samples)
    raw = np.array([top - fmap(x) for x in xs])
    # endpoints are known exactly
    raw[0] = top
    raw[-1] = 0.0 if top > 0 else raw[-1]
    ys = np.maximum(raw, 0.0)
    betas = None
    if kind is CurveKind.ACHIEVABLE:
        betas = np.array([min(1.0, g_inverse(x) / (eta * E)) for x in xs])
    meta = {"min_formal_value": float(raw.min())}
    return RegionCurve(
        np.column_stack([xs, ys]),
        kind,
        {"region": "broadcast", "eta": eta, "E": E},
        formula_id,
        betas,
        meta,
    )


def broadcast_achievable(eta: float, E: float, samples: int = 512) -> RegionCurve:
    """Superposition-coding boundary R_B' = g((1-eta)E) - g((1-eta)/eta g^{-1}(R_A')).

    R_A' is sampled uniformly on [0, g(eta E)].
    """
    _check_eta_energy(eta, E)
    return _broadcast_curve(CurveKind.ACHIEVABLE, eta, E, samples, "broadcast:superposition")


def broadcast_outer(eta: float, E: float, f: CurveKind | str = CurveKind.OUTER_NEW, samples: int = 512) -> RegionCurve:
    """Outer boundary R_B' = g((1-eta)E) - f_lam(R_A') with lam = (1-eta)/eta.

    ``f`` selects the entropy power bound (OuterEPI) or the sharper bound
    (OuterNew). The curve runs until R_B' reaches zero.
    """
    _check_eta_energy(eta, E)
    kind = _check_tag(f)
    tag = "broadcast:outer-epi" if kind is CurveKind.OUTER_EPI else "broadcast:outer-new"
    return _broadcast_curve(kind, eta, E, samples, tag)


def broadcast_time_sharing(eta: float, E: float, samples: int = 512) -> RegionCurve:
    """Segment between the single-receiver corners (0, g((1-eta)E)) and (g(eta E), 0)."""
    _check_eta_energy(eta, E)
    if samples < 2:
        raise ValueError("need at least 2 samples")
    xa, yb = g(eta * E), g((1 - eta) * E)
    t = np.linspace(0.0, 1.0, samples)
    pts = np.column_stack([t * xa, (1.0 - t) * yb])
    return RegionCurve(pts, CurveKind.TIME_SHARING, {"region": "broadcast", "eta": eta, "E": E}, "broadcast:time-sharing")


# -- triple trade-off ----------------------------------------------------------


def tradeoff_achievable_cqg(eta: float, E: float, beta: float) -> TradeoffBounds:
    _check_eta_energy(eta, E)
    _check_beta(beta)
    leak = g((1 - eta) * beta * E)
    return TradeoffBounds(
        g(beta * E) + g(eta * E) - leak,
        g(eta * beta * E) - leak,
        g(eta * E) - leak,
    )


def tradeoff_achievable_cpk(eta: float, E: float, beta: float) -> TradeoffBounds:
    _check_eta_energy(eta, E)
    _check_beta(beta)
    leak = g((1 - eta) * beta * E)
    return TradeoffBounds(g(eta * E), g(eta * beta * E) - leak, g(eta * E) - leak)


def tradeoff_outer_cqg(eta: float, E: float, beta: float, f: CurveKind | str = CurveKind.OUTER_NEW) -> TradeoffBounds:
    """Outer bounds on C + 2Q, Q + G and C + Q + G from the entropy map ``f``."""
    _check_eta_energy(eta, E)
    _check_beta(beta)
    kind = _check_tag(f)
    y = g(beta * eta * E)
    lost = _entropy_map(kind, (1 - eta) / eta)(y)
    back = _entropy_map_inverse(kind, eta)(y)
    return TradeoffBounds(g(eta * E) + back - lost, y - lost, g(eta * E) - lost)


def tradeoff_outer_cpk(eta: float, E: float, beta: float, f: CurveKind | str = CurveKind.OUTER_NEW) -> TradeoffBounds:
    _check_eta_energy(eta, E)
    _check_beta(beta)
    kind = _check_tag(f)
    y = g(beta * eta * E)
    lost = _entropy_map(kind, (1 - eta) / eta)(y)
    return TradeoffBounds(g(eta * E), y - lost, g(eta * E) - lost)


def tradeoff_bounds(family: str, kind: CurveKind | str, eta: float, E: float, beta: float) -> TradeoffBounds:
    """Dispatch on ``family`` ("cqg" or "cpk") and ``kind`` (Achievable, OuterEPI, OuterNew)."""
    kind = CurveKind(kind)
    family = family.lower()
    if family not in ("cqg", "cpk"):
        raise ValueError(f"unknown trade-off family {family!r}")
    if kind is CurveKind.ACHIEVABLE:
        fn = tradeoff_achievable_cqg if family == "cqg" else tradeoff_achievable_cpk
        return fn(eta, E, beta)
    fn = tradeoff_outer_cqg if family == "cqg" else tradeoff_outer_cpk
    return fn(eta, E, beta, kind)


def _split(family: str, b: TradeoffBounds, C: float) -> tuple[float, float]:
    """Bounds on the second rate at G = 0 (K = 0), split by how they move with beta.

    Returns (rising, falling): ``rising`` collects the bounds that grow with
    beta, ``falling`` those that do not. For CQG the C + 2Q bound grows with
    beta, for CPK the C + P bound is constant.
    """
    if family == "cqg":
        return min(b.second, 0.5 * (b.first - C)), b.third - C
    return b.second, min(b.first, b.third) - C


class _Sweep:
    """Tabulated bounds over a uniform beta grid, with on-demand evaluation off the grid."""

    def __init__(self, family: str, kind: CurveKind, eta: float, E: float, grid: int = BETA_GRID):
        self.family, self.kind, self.eta, self.E = family, kind, eta, E
        self.betas = np.linspace(0.0, 1.0, grid)
        self.table = [self.bounds(b) for b in self.betas]

    def bounds(self, beta: float) -> TradeoffBounds:
        return tradeoff_bounds(self.family, self.kind, self.eta, self.E, float(beta))

    def rate(self, C: float) -> tuple[float, float]:
        """Largest second rate at first rate C, and the beta attaining it."""
        split = [_split(self.family, b, C) for b in self.table]
        gap = np.array([r - f for r, f in split])
        above = np.nonzero(gap >= 0)[0]
        if above.size == 0:
            # rising bounds stay below the falling ones: best at beta = 1
            return min(split[-1]), 1.0
        j = int(above[0])
        if j == 0:
            return min(split[0]), 0.0
        # the optimum sits where the rising and falling bounds cross
        def diff(beta):
            r, f = _split(self.family, self.bounds(beta), C)
            return r - f

        lo, hi = self.betas[j - 1], self.betas[j]
        beta = brentq(diff, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
        return min(_split(self.family, self.bounds(beta), C)), float(beta)


def projected_rate(family: str, kind: CurveKind | str, eta: float, E: float, C) -> float | np.ndarray:
    """Largest Q (or P) at classical rate C on the G = 0 (K = 0) slice, maximized over beta."""
    kind = CurveKind(kind)
    _check_eta_energy(eta, E)
    sweep = _Sweep(family.lower(), kind, eta, E)
    if np.ndim(C) == 0:
        return max(0.0, sweep.rate(float(C))[0])
    return np.array([max(0.0, sweep.rate(float(c))[0]) for c in np.ravel(C)]).reshape(np.shape(C))


def project_cq_plane(
    family: str,
    kind: CurveKind | str,
    eta: float,
    E: float,
    samples: int = 256,
) -> RegionCurve:
    """Upper envelope of the (C, Q) or (C, P) region on the slice G = 0 (K = 0).

    For each C on a uniform grid over [0, g(eta E)] the second rate is
    maximized over beta: a 101-point grid locates the crossing of the binding
    constraints, which is then refined by root finding. Negative formal values
    are clipped to zero and reported in ``metadata``.
    """
    kind = CurveKind(kind)
    family = family.lower()
    _check_eta_energy(eta, E)
    if samples < 2:
        raise ValueError("need at least 2 samples")
    if kind is CurveKind.TIME_SHARING:
        return tradeoff_time_sharing(family, eta, E, samples)
    sweep = _Sweep(family, kind, eta, E)
    c_max = g(eta * E)
    cs = np.linspace(0.0, c_max, samples)
    rows = [sweep.rate(c) for c in cs]
    raw = np.array([r[0] for r in rows])
    betas = np.array([r[1] for r in rows])
    # every region reaches (g(eta E), 0) at beta = 0
    raw[-1], betas[-1] = 0.0, 0.0
    tag = {"Achievable": "achievable", "OuterEPI": "outer-epi", "OuterNew": "outer-new"}[kind.value]
    return RegionCurve(
        np.column_stack([cs, np.maximum(raw, 0.0)]),
        kind,
        {"region": family, "eta": eta, "E": E},
        f"tradeoff-{family}:{tag}",
        betas,
        {"min_formal_value": float(raw.min())},
    )


def tradeoff_time_sharing(family: str, eta: float, E: float, samples: int = 256) -> RegionCurve:
    """Segment between the pure classical corner (g(eta E), 0) and the pure quantum (private) corner."""
    family = family.lower()
    _check_eta_energy(eta, E)
    b = tradeoff_bounds(family, CurveKind.ACHIEVABLE, eta, E, 1.0)
    q_max = min(_split(family, b, 0.0))
    c_max = g(eta * E)
    t = np.linspace(0.0, 1.0, samples)
    pts = np.column_stack([t * c_max, (1.0 - t) * q_max])
    return RegionCurve(pts, CurveKind.TIME_SHARING, {"region": family, "eta": eta, "E": E}, f"tradeoff-{family}:time-sharing")


# -- containment -----------------------------------------------------------------


def boundary_value(curve: RegionCurve, x):
    """Exact boundary of the region ``curve`` samples, evaluated at ``x``.

    Uses the closed form (or the beta maximization) rather than interpolating
    the stored points, so containment checks are not limited by sampling.
    """
    region, eta, E = curve.params["region"], curve.params["eta"], curve.params["E"]
    if region == "broadcast":
        return broadcast_boundary(curve.kind, eta, E, x)
    if curve.kind is CurveKind.TIME_SHARING:
        c_max = g(eta * E)
        q_max = curve.points[0, 1]
        return np.maximum(0.0, q_max * (1.0 - np.asarray(x, dtype=float) / c_max))
    return projected_rate(region, curve.kind, eta, E, x)


def containment_gap(inner: RegionCurve, outer: RegionCurve) -> float:
    """min over the inner curve's samples of (outer boundary - inner boundary).

    Nonnegative (up to rounding) when the inner region lies inside the outer one.
    """
    if inner.params["region"] != outer.params["region"] and {inner.params["region"], outer.params["region"]} != {"cqg", "cpk"}:
        raise ValueError("curves belong to different scenarios")
    return float(np.min(boundary_value(outer, inner.x) - inner.y))


def in_broadcast_region(rates: RatePair, kind: CurveKind | str, eta: float, E: float, tol: float = 0.0) -> bool:
    kind = CurveKind(kind)
    if kind in (CurveKind.OUTER_EPI, CurveKind.OUTER_NEW):
        x_max = _broadcast_parts(kind, eta, E)[3]
    else:
        x_max = g(eta * E)
    if rates.r_a > x_max + tol:
        return False
    return rates.r_b <= broadcast_boundary(kind, eta, E, rates.r_a) + tol


def in_tradeoff_region(rates: RateTriple, family: str, kind: CurveKind | str, eta: float, E: float, tol: float = 1e-12) -> bool:
    """True if some beta on a fine grid satisfies all three inequalities."""
    c, q, r = rates.c, rates.q_or_p, rates.g_or_k
    family = family.lower()
    for beta in np.linspace(0.0, 1.0, 1001):
        b = tradeoff_bounds(family, kind, eta, E, float(beta))
        first = c + 2 * q if family == "cqg" else c + q
        if first <= b.first + tol and q + r <= b.second + tol and c + q + r <= b.third + tol:
            return True
    return False
