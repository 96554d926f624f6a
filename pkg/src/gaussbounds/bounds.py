"""
Closed-form lower bounds on the output entropy of Gaussian channels.

All functions work per mode and in nats: ``S`` is the input entropy divided
by the number of modes, and the returned value bounds the output entropy
divided by the number of modes.

Three families are provided:

* ``epi_bound``: the entropy-power-inequality bounds, valid for every channel
  and every input;
* ``new_bound``: the sharper bounds for attenuators, amplifiers and additive
  noise channels, valid on a restricted range of the environment parameter;
* ``gaussian_conjecture_value``: the output entropy of thermal inputs with the
  same entropy. For entanglement-breaking channels this value is itself a
  lower bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .channels import ChannelKind, ChannelSpec, is_entanglement_breaking
from .fock import g, g_inverse

__all__ = [
    "BoundKind",
    "BoundValue",
    "DegenerateParameterError",
    "epi_bound",
    "new_bound",
    "new_bound_domain",
    "gaussian_conjecture_value",
    "thermal_output_entropy",
    "f_lambda",
    "f_lambda_inverse",
    "epi_f_lambda",
    "epi_f_lambda_inverse",
    "best_known_bound",
    "bound_set",
]


class DegenerateParameterError(ValueError):
    """eta in {0, 1} or kappa = 1, where the sharper bound's shift is undefined."""


class BoundKind:
    EPI = "EPI"
    NEW = "NewBound"
    GAUSSIAN = "GaussianConjecture"


@dataclass(frozen=True)
class BoundValue:
    kind: str
    channel: ChannelSpec
    input_entropy_per_mode: float
    n: int
    value_per_mode: float | None
    in_domain: bool = True

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "channel": self.channel.as_dict(),
            "input_entropy_per_mode": self.input_entropy_per_mode,
            "n": self.n,
            "value_per_mode": self.value_per_mode,
            "in_domain": self.in_domain,
            "units": "nats",
        }


def _check_entropy(S: float) -> float:
    S = float(S)
    if not S >= 0:
        raise ValueError(f"input entropy must be >= 0, got {S}")
    return S


def _epi_value(spec: ChannelSpec, S: float) -> float:
    E = spec.env
    if spec.kind is ChannelKind.ATTENUATOR:
        eta = spec.eta
        return math.log(eta * math.exp(S) + (1 - eta) * math.exp(g(E)))
    if spec.kind is ChannelKind.AMPLIFIER:
        k = spec.kappa
        return math.log(k * math.exp(S) + (k - 1) * math.exp(g(E)))
    if spec.kind is ChannelKind.CONTRAVARIANT:
        k = spec.kappa
        return math.log((k - 1) * math.exp(S) + k * math.exp(g(E)))
    return math.log(math.exp(S) + math.e * E)


def epi_bound(spec: ChannelSpec, S: float, n: int = 1) -> BoundValue:
    S = _check_entropy(S)
    return BoundValue(BoundKind.EPI, spec, S, n, _epi_value(spec, S))


def new_bound_domain(spec: ChannelSpec) -> bool:
    """True when the environment parameter lies where the sharper bound holds.

    Raises DegenerateParameterError for the identity-like parameter values.
    """
    E = spec.env
    if spec.kind is ChannelKind.ATTENUATOR:
        if spec.eta in (0.0, 1.0):
            raise DegenerateParameterError(f"eta = {spec.eta} has no sharper bound")
        return 0.0 <= E <= spec.eta / (1 - spec.eta)
    if spec.kind is ChannelKind.AMPLIFIER:
        if spec.kappa == 1.0:
            raise DegenerateParameterError("kappa = 1 has no sharper bound")
        return 0.0 <= E <= 1 / (spec.kappa - 1)
    if spec.kind is ChannelKind.ADDITIVE_NOISE:
        return 0.0 < E <= 1.0
    return False


def _new_value(spec: ChannelSpec, S: float) -> float:
    E = spec.env
    if spec.kind is ChannelKind.ATTENUATOR:
        eta = spec.eta
        shift = g(eta / (1 - eta)) - g(E)
        return g(eta * g_inverse(S + shift) + eta) - shift
    if spec.kind is ChannelKind.AMPLIFIER:
        k = spec.kappa
        shift = g(1 / (k - 1)) - g(E)
        return g(k * g_inverse(S + shift) + k) - shift
    lnE = math.log(E)
    return g(g_inverse(S - lnE) + 1) + lnE


def new_bound(spec: ChannelSpec, S: float, n: int = 1) -> BoundValue:
    """Sharper lower bound; ``in_domain`` is False (and no value) outside its range.

    Phase-contravariant channels have no such bound: they are always
    entanglement breaking and :func:`gaussian_conjecture_value` covers them.
    """
    S = _check_entropy(S)
    if not new_bound_domain(spec):
        return BoundValue(BoundKind.NEW, spec, S, n, None, in_domain=False)
    return BoundValue(BoundKind.NEW, spec, S, n, _new_value(spec, S))


def thermal_output_entropy(spec: ChannelSpec, N: float) -> float:
    """Entropy of the output of the thermal input with N photons."""
    E = spec.env
    if spec.kind is ChannelKind.ATTENUATOR:
        return g(spec.eta * N + (1 - spec.eta) * E)
    if spec.kind is ChannelKind.AMPLIFIER:
        return g(spec.kappa * N + (spec.kappa - 1) * (E + 1))
    if spec.kind is ChannelKind.CONTRAVARIANT:
        return g((spec.kappa - 1) * (N + 1) + spec.kappa * E)
    return g(N + E)


def gaussian_conjecture_value(spec: ChannelSpec, S: float, n: int = 1) -> BoundValue:
    S = _check_entropy(S)
    return BoundValue(BoundKind.GAUSSIAN, spec, S, n, thermal_output_entropy(spec, g_inverse(S)))


def _check_lambda(lam: float) -> None:
    if not 0.0 < lam < 1.0:
        raise DegenerateParameterError(f"lambda must lie strictly between 0 and 1, got {lam}")


def _f_lambda_scalar(x: float, lam: float) -> float:
    if x == 0:
        return 0.0
    shift = g(lam / (1 - lam))
    return g(lam * g_inverse(x + shift) + lam) - shift


def f_lambda(x, lam: float):
    """Output-entropy lower bound of the quantum-limited attenuator with transmissivity ``lam``.

    Increasing and convex in ``x``; ``f_lambda(0) == 0``.
    """
    _check_lambda(lam)
    if np.ndim(x) == 0:
        return _f_lambda_scalar(_check_entropy(x), lam)
    x = np.asarray(x, dtype=float)
    return np.array([_f_lambda_scalar(_check_entropy(v), lam) for v in x.ravel()]).reshape(x.shape)


def _f_lambda_inverse_scalar(y: float, lam: float) -> float:
    if y == 0:
        return 0.0
    # f(x) <= x puts the root above y; f(x) >= x + ln(lam) puts it below y - ln(lam)
    lo, hi = y, y - math.log(lam)
    if _f_lambda_scalar(lo, lam) >= y:
        return lo  # rounding near the origin
    return brentq(lambda x: _f_lambda_scalar(x, lam) - y, lo, hi, xtol=1e-300, rtol=1e-14, maxiter=500)


def f_lambda_inverse(y, lam: float):
    _check_lambda(lam)
    if np.ndim(y) == 0:
        return _f_lambda_inverse_scalar(_check_entropy(y), lam)
    y = np.asarray(y, dtype=float)
    return np.array([_f_lambda_inverse_scalar(_check_entropy(v), lam) for v in y.ravel()]).reshape(y.shape)


def epi_f_lambda(x, lam: float):
    """ln(lam e^x + 1 - lam): the entropy power bound for the quantum-limited attenuator."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")
    x = np.asarray(x, dtype=float)
    out = np.log(lam * np.exp(x) + 1 - lam)
    return float(out) if out.ndim == 0 else out


def epi_f_lambda_inverse(y, lam: float):
    if not 0.0 < lam <= 1.0:
        raise ValueError(f"lambda must lie in (0, 1], got {lam}")
    y = np.asarray(y, dtype=float)
    out = np.log((np.exp(y) - 1 + lam) / lam)
    return float(out) if out.ndim == 0 else out


def best_known_bound(spec: ChannelSpec, S: float, n: int = 1) -> BoundValue:
    """Largest applicable lower bound, tagged with the family that produced it."""
    candidates = [epi_bound(spec, S, n)]
    try:
        nb = new_bound(spec, S, n)
        if nb.in_domain:
            candidates.append(nb)
    except DegenerateParameterError:
        pass
    if is_entanglement_breaking(spec):
        candidates.append(gaussian_conjecture_value(spec, S, n))
    return max(candidates, key=lambda b: b.value_per_mode)


def bound_set(spec: ChannelSpec, S: float, n: int = 1) -> list[BoundValue]:
    """EPI, sharper and thermal-output values for one (channel, entropy) pair.

    Identity channels (eta = 1, kappa = 1, E = 0 noise) get S for every entry.
    """
    S = _check_entropy(S)
    if spec.is_identity:
        return [BoundValue(kind, spec, S, n, S) for kind in (BoundKind.EPI, BoundKind.NEW, BoundKind.GAUSSIAN)]
    try:
        nb = new_bound(spec, S, n)
    except DegenerateParameterError:
        nb = BoundValue(BoundKind.NEW, spec, S, n, None, in_domain=False)
    return [epi_bound(spec, S, n), nb, gaussian_conjecture_value(spec, S, n)]
