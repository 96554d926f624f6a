"""
Monte Carlo checks that simulated channel outputs respect the entropy bounds.

Trials are independent: trial ``i`` of an ensemble draws from its own RNG
stream ``SeedSequence(seed, spawn_key=(i,))``, so reports do not depend on
scheduling. Setting ``GAUSSBOUNDS_THREADS`` to an integer > 1 runs trials on a
thread pool; records are always merged in trial order.

A trial *fails* only when its margin (output entropy minus bound, per mode)
drops below ``-allowance``. The truncation slack
``max(1e-4, 10 * deficit * ln(dim))`` estimates how much entropy the Fock
cutoff may have hidden; trials whose slack exceeds the allowance are marked
inconclusive instead of failed.
"""

from __future__ import annotations

import enum
import hashlib
import json
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .bounds import (
    BoundKind,
    epi_bound,
    gaussian_conjecture_value,
    new_bound,
    new_bound_domain,
    thermal_output_entropy,
)
from .channels import (
    ChannelKind,
    ChannelSpec,
    DilationPlan,
    TruncationError,
    apply_channel,
    apply_tensor_power,
    default_plan,
    displacement_operator,
    is_entanglement_breaking,
    output_photons,
)
from .fock import (
    FockState,
    mean_photons,
    number_operator,
    thermal_state,
    thermal_tail_cutoff,
    thermal_weights,
    von_neumann_entropy,
)

__all__ = [
    "EnsembleKind",
    "EnsembleSpec",
    "TrialRecord",
    "VerificationReport",
    "BoundViolation",
    "energy_cap",
    "sample_state",
    "harness_plan",
    "truncation_slack",
    "truncation_diagnostics",
    "verify_moe_entanglement_breaking",
    "verify_new_bound",
    "verify_thermal_formulas",
    "thermal_grid",
    "merge_reports",
    "TAIL_MASS",
]

log = logging.getLogger(__name__)

TAIL_MASS = 1e-8
DEFAULT_ALLOWANCE = 1e-3
MAX_RESAMPLES = 20


class EnsembleKind(str, enum.Enum):
    GINIBRE_MIXED = "GinibreMixed"
    RANDOM_DIAGONAL = "RandomDiagonal"
    DISPLACED_THERMAL = "DisplacedThermal"
    RANDOM_PURE = "RandomPure"
    PRODUCT_OF_ONE_MODE = "ProductOfOneMode"
    ENTANGLED_BIPARTITE = "EntangledBipartite"


@dataclass(frozen=True)
class EnsembleSpec:
    """A reproducible family of random input states.

    ``rank`` applies to GinibreMixed (None draws a rank per trial).
    ``photons`` and ``displacement`` fix the DisplacedThermal parameters; left
    as None they are drawn per trial under the energy cap.
    """

    kind: EnsembleKind
    modes: int = 1
    cutoff: int = 12
    trials: int = 100
    seed: int = 0
    rank: int | None = None
    photons: float | None = None
    displacement: complex | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", EnsembleKind(self.kind))
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.modes < 1 or self.cutoff < 2:
            raise ValueError("need modes >= 1 and cutoff >= 2")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.rank is not None and not 1 <= self.rank <= self.cutoff**self.modes:
            raise ValueError(f"rank must lie in [1, {self.cutoff**self.modes}]")
        if self.kind is EnsembleKind.ENTANGLED_BIPARTITE and self.modes != 2:
            raise ValueError("EntangledBipartite needs modes = 2")
        if self.photons is not None and not 0 <= self.photons <= energy_cap(self.cutoff):
            raise ValueError(f"photons must lie in [0, {energy_cap(self.cutoff):.4g}] at cutoff {self.cutoff}")

    def as_dict(self) -> dict:
        d = asdict(self)
        d["kind"] = self.kind.value
        z = self.displacement
        d["displacement"] = None if z is None else [complex(z).real, complex(z).imag]
        return d


def energy_cap(cutoff: int, tail: float = TAIL_MASS) -> float:
    """Mean photons per mode of the thermal state whose mass above ``cutoff`` equals ``tail``."""
    q = tail ** (1.0 / cutoff)
    return q / (1.0 - q)


def _rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial,)))


def _envelope(cutoff: int, modes: int, photons: float) -> np.ndarray:
    """Thermal-shaped amplitude profile q^(n/2) over the joint number basis."""
    q = photons / (photons + 1.0)
    return np.sqrt(q ** number_operator(cutoff, modes))


def _complex_normal(rng, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2)


def _ginibre(rng, cutoff: int, modes: int, rank: int, photons: float) -> np.ndarray:
    G = _complex_normal(rng, (cutoff**modes, rank)) * _envelope(cutoff, modes, photons)[:, None]
    rho = G @ G.conj().T
    return rho / np.trace(rho).real


def _pure(rng, cutoff: int, modes: int, photons: float) -> np.ndarray:
    return _ginibre(rng, cutoff, modes, 1, photons)


def _diagonal(rng, cutoff: int, modes: int, photons: float) -> np.ndarray:
    p = rng.dirichlet(np.ones(cutoff**modes)) * _envelope(cutoff, modes, photons) ** 2
    return np.diag(p / p.sum()).astype(complex)


def _displaced_thermal(cutoff: int, N: float, z: complex, pad: int = 40) -> np.ndarray:
    big = cutoff + pad
    w = thermal_weights(N, big)
    Dz = displacement_operator(z, big, pad)
    rho = (Dz * w[None, :]) @ Dz.conj().T
    rho = rho[:cutoff, :cutoff]
    return rho / np.trace(rho).real


def _draw(spec: EnsembleSpec, rng, cap: float, shrink: float) -> np.ndarray:
    D, n = spec.cutoff, spec.modes
    # per-trial energy scale spreads the input entropies over the allowed range
    photons = cap * rng.uniform(0.05, 1.0) * shrink
    kind = spec.kind
    if kind is EnsembleKind.GINIBRE_MIXED:
        rank = spec.rank or int(rng.integers(1, D**n + 1))
        return _ginibre(rng, D, n, rank, photons)
    if kind is EnsembleKind.RANDOM_DIAGONAL:
        return _diagonal(rng, D, n, photons)
    if kind is EnsembleKind.RANDOM_PURE:
        return _pure(rng, D, n, photons)
    if kind is EnsembleKind.ENTANGLED_BIPARTITE:
        # reduced state of a random pure state on the two modes plus a small ancilla
        return _ginibre(rng, D, n, int(rng.integers(1, 5)), photons)
    if kind is EnsembleKind.PRODUCT_OF_ONE_MODE:
        rho = np.ones((1, 1), dtype=complex)
        for _ in range(n):
            rho = np.kron(rho, _ginibre(rng, D, 1, int(rng.integers(1, D + 1)), photons))
        return rho
    rho = np.ones((1, 1), dtype=complex)
    for _ in range(n):
        N = spec.photons if spec.photons is not None else rng.uniform(0.0, 0.5) * cap
        if spec.displacement is not None:
            z = complex(spec.displacement) * shrink
        else:
            r = math.sqrt(max(cap - N, 0.0) * rng.uniform(0.0, 1.0)) * shrink
            z = r * np.exp(2j * np.pi * rng.uniform())
        rho = np.kron(rho, _displaced_thermal(D, N, z))
    return rho


def sample_state(spec: EnsembleSpec, trial_index: int) -> FockState:
    """Trial ``trial_index`` of the ensemble, deterministic in (seed, trial_index).

    States are normalized on the truncated space and have at most
    :func:`energy_cap` photons per mode; draws above the cap are redrawn at
    lower energy.
    """
    rng = _rng(spec.seed, trial_index)
    cap = energy_cap(spec.cutoff)
    shrink = 1.0
    for attempt in range(MAX_RESAMPLES):
        rho = _draw(spec, rng, cap, shrink)
        state = FockState.from_matrix(rho, spec.modes, trace_deficit=0.0)
        if mean_photons(state, per_mode=True) <= cap:
            return state
        log.info("trial %d: %.3f photons/mode over cap %.3f, redrawing", trial_index, mean_photons(state, True), cap)
        shrink *= 0.5
    raise RuntimeError(f"trial {trial_index}: could not draw a state under the energy cap")


# -- truncation bookkeeping ----------------------------------------------------


def truncation_slack(deficit: float, cutoff: int, modes: int) -> float:
    """Entropy allowance for ``deficit`` of mass missing from a ``cutoff**modes`` space."""
    return max(1e-4, 10.0 * deficit * modes * math.log(cutoff))


def harness_plan(spec: ChannelSpec, cutoff: int, tail_tol: float = 1e-5) -> DilationPlan:
    """Output cutoff sized for inputs at the energy cap; leakage is tolerated and measured."""
    return default_plan(spec, cutoff, input_photons=energy_cap(cutoff), tail_tol=tail_tol, max_leakage=1.0)


def truncation_diagnostics(state: FockState, channel: ChannelSpec, plan: DilationPlan | None = None) -> dict:
    """Deficits, tail occupation and recommended cutoffs for one channel application."""
    plan = plan or default_plan(channel, state.cutoff)
    plan = replace(plan, max_leakage=1.0)
    out = apply_tensor_power(channel, state, state.modes, plan)
    D_o, n = out.cutoff, out.modes
    levels = np.arange(D_o)
    # marginal photon distribution of the first mode
    diag = np.diagonal(out.matrix).real.reshape((D_o,) * n)
    p = diag.sum(axis=tuple(range(1, n))) if n > 1 else diag
    tail = float(np.sum(levels[D_o // 2 :] * p[D_o // 2 :]))
    n_in = mean_photons(state, per_mode=True)
    rec_in = thermal_tail_cutoff(n_in, TAIL_MASS)
    rec_out = thermal_tail_cutoff(output_photons(channel, n_in), TAIL_MASS)
    slack = truncation_slack(out.trace_deficit, D_o, n)
    return {
        "input_deficit": state.trace_deficit,
        "trace_deficit": out.trace_deficit,
        "leakage": out.trace_deficit - state.trace_deficit,
        "tail_photons": tail,
        "input_cutoff": state.cutoff,
        "output_cutoff": D_o,
        "recommended_cutoff": rec_in,
        "recommended_output_cutoff": rec_out,
        "slack": slack,
        "cutoff_too_small": bool(state.trace_deficit > TAIL_MASS or state.cutoff < rec_in or D_o < rec_out),
    }


# -- reports -----------------------------------------------------------------------


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    ensemble: str
    input_entropy: float
    output_entropy: float
    bounds: dict
    margins: dict
    margin: float
    trace_deficit: float
    slack: float
    status: str
    dump: str | None = None


@dataclass
class VerificationReport:
    suite: str
    config: dict
    records: list = field(default_factory=list)
    allowance: float = DEFAULT_ALLOWANCE
    elapsed: float = 0.0

    @property
    def failures(self) -> list:
        return [r for r in self.records if r.status == "fail"]

    @property
    def inconclusive(self) -> list:
        return [r for r in self.records if r.status == "inconclusive"]

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def min_margin(self) -> float:
        conclusive = [r.margin for r in self.records if r.status != "inconclusive"]
        return float(min(conclusive)) if conclusive else float("nan")

    def summary(self) -> dict:
        return {
            "trials": len(self.records),
            "passed": sum(r.status == "pass" for r in self.records),
            "failures": len(self.failures),
            "inconclusive": len(self.inconclusive),
            "min_margin": self.min_margin,
            "max_slack": max((r.slack for r in self.records), default=0.0),
            "max_trace_deficit": max((r.trace_deficit for r in self.records), default=0.0),
            "allowance": self.allowance,
            "entropy_buckets": _buckets(self.records),
        }

    def to_dict(self, timing: bool = False) -> dict:
        d = {
            "suite": self.suite,
            "config": self.config,
            "summary": self.summary(),
            "records": [asdict(r) for r in self.records],
        }
        if timing:
            d["elapsed_seconds"] = self.elapsed
        return d

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(_jsonable(self.to_dict(timing)), sort_keys=True, indent=1, ensure_ascii=False)

    def digest(self) -> str:
        """sha256 of the canonical JSON (timing excluded)."""
        canon = json.dumps(_jsonable(self.to_dict()), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()

    def write(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json(timing=True) + "\n", encoding="utf-8")
        return path


class BoundViolation(AssertionError):
    """A trial broke a proven bound by more than the allowance."""

    def __init__(self, report: VerificationReport):
        self.report = report
        dumps = [r.dump for r in report.failures if r.dump]
        super().__init__(
            f"{len(report.failures)} trial(s) of {report.suite} violate a bound; "
            f"min margin {report.min_margin:.3e}; dumps: {dumps}"
        )


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if isinstance(x, enum.Enum):
        return x.value
    return x


def _buckets(records, width: float = 0.25) -> list:
    """Smallest observed gap to the thermal-input value, per input-entropy bucket."""
    out: dict[int, float] = {}
    for r in records:
        gap = r.margins.get(BoundKind.GAUSSIAN)
        if gap is None or r.status == "inconclusive":
            continue
        b = int(r.input_entropy // width)
        out[b] = min(out.get(b, math.inf), gap)
    return [{"entropy_from": k * width, "entropy_to": (k + 1) * width, "min_gap_to_thermal": v} for k, v in sorted(out.items())]


def merge_reports(suite: str, reports: Sequence[VerificationReport]) -> VerificationReport:
    merged = VerificationReport(suite, {"parts": [r.config for r in reports]}, allowance=max(r.allowance for r in reports))
    merged.records = [replace(rec, ensemble=f"{rep.suite}/{rec.ensemble}") for rep in reports for rec in rep.records]
    merged.elapsed = sum(r.elapsed for r in reports)
    return merged


# -- runners -------------------------------------------------------------------------


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("GAUSSBOUNDS_THREADS", "1")))
    except ValueError:
        return 1


def _run_trials(fn: Callable[[int], TrialRecord], count: int) -> list:
    workers = _threads()
    if workers == 1:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(count)))


def _dump(dump_dir, suite: str, trial: int, state: FockState, out: FockState | None, sidecar: dict) -> str:
    base = Path(dump_dir) / f"{suite}-trial{trial:05d}"
    base.parent.mkdir(parents=True, exist_ok=True)
    np.save(f"{base}-input.npy", np.asarray(state.matrix))
    if out is not None:
        np.save(f"{base}-output.npy", np.asarray(out.matrix))
    Path(f"{base}.json").write_text(json.dumps(_jsonable(sidecar), sort_keys=True, indent=1) + "\n", encoding="utf-8")
    return str(base)


def _bound_trials(
    suite: str,
    channel: ChannelSpec,
    n: int,
    ensemble: EnsembleSpec,
    asserted: Sequence[str],
    allowance: float,
    plan: DilationPlan | None,
    dump_dir,
) -> VerificationReport:
    if ensemble.modes != n:
        raise ValueError(f"ensemble has {ensemble.modes} modes, channel is applied to {n}")
    plan = plan or harness_plan(channel, ensemble.cutoff)
    started = time.perf_counter()

    def one(i: int) -> TrialRecord:
        state = sample_state(ensemble, i)
        S = von_neumann_entropy(state) / n
        out = None
        try:
            out = apply_tensor_power(channel, state, n, plan)
            S_out = von_neumann_entropy(out) / n
            deficit = out.trace_deficit
        except TruncationError as exc:  # only with a caller-supplied leakage cap
            S_out, deficit = float("nan"), exc.deficit
        bounds = {
            BoundKind.EPI: epi_bound(channel, S, n).value_per_mode,
            BoundKind.GAUSSIAN: gaussian_conjecture_value(channel, S, n).value_per_mode,
        }
        nb = new_bound(channel, S, n) if _has_new_bound(channel) else None
        if nb is not None and nb.in_domain:
            bounds[BoundKind.NEW] = nb.value_per_mode
        margins = {k: S_out - v for k, v in bounds.items()}
        margin = min(margins[k] for k in asserted)
        slack = truncation_slack(deficit, plan.output_cutoff, n)
        if not math.isfinite(S_out) or slack > allowance:
            status = "inconclusive"
        elif margin < -allowance:
            status = "fail"
        else:
            status = "pass"
        rec = TrialRecord(i, ensemble.kind.value, S, S_out, bounds, margins, margin, deficit, slack, status)
        if status == "fail" and dump_dir is not None:
            sidecar = {"suite": suite, "channel": channel.as_dict(), "ensemble": ensemble.as_dict(), "plan": asdict(plan), "record": asdict(rec)}
            rec = replace(rec, dump=_dump(dump_dir, suite, i, state, out, sidecar))
        return rec

    report = VerificationReport(
        suite,
        {"channel": channel.as_dict(), "modes": n, "ensemble": ensemble.as_dict(), "plan": asdict(plan), "asserted": list(asserted)},
        allowance=allowance,
    )
    report.records = _run_trials(one, ensemble.trials)
    report.elapsed = time.perf_counter() - started
    return report


def _has_new_bound(channel: ChannelSpec) -> bool:
    if channel.kind is ChannelKind.ATTENUATOR and channel.eta in (0.0, 1.0):
        return False
    if channel.kind in (ChannelKind.AMPLIFIER, ChannelKind.CONTRAVARIANT) and channel.kappa == 1.0:
        return False
    return channel.kind is not ChannelKind.CONTRAVARIANT


def verify_moe_entanglement_breaking(
    channel: ChannelSpec,
    n: int,
    ensemble: EnsembleSpec,
    allowance: float = DEFAULT_ALLOWANCE,
    plan: DilationPlan | None = None,
    dump_dir=None,
) -> VerificationReport:
    """Check S(out)/n >= thermal-input value at the same entropy per mode, trial by trial.

    The thermal-input value is a proven lower bound for entanglement-breaking
    channels at any n, and for every channel at n = 1.
    """
    if n > 1 and not is_entanglement_breaking(channel):
        raise ValueError(f"{channel.kind.value} with these parameters is not entanglement breaking; only n = 1 is covered")
    return _bound_trials("eb-moe", channel, n, ensemble, [BoundKind.GAUSSIAN], allowance, plan, dump_dir)


def verify_new_bound(
    channel: ChannelSpec,
    n: int,
    ensemble: EnsembleSpec,
    allowance: float = DEFAULT_ALLOWANCE,
    plan: DilationPlan | None = None,
    dump_dir=None,
) -> VerificationReport:
    """Check the sharper bound (and the entropy power bound) on every trial."""
    if not _has_new_bound(channel) or not new_bound_domain(channel):
        raise ValueError("channel parameters lie outside the sharper bound's domain")
    return _bound_trials("new-bound", channel, n, ensemble, [BoundKind.NEW, BoundKind.EPI], allowance, plan, dump_dir)


def thermal_grid(points: int | None = None) -> list[tuple[ChannelSpec, float]]:
    """(channel, N) pairs covering all four channel families, interleaved by family.

    Each family has three parameter sets and four input photon numbers, so
    the full grid has 48 points; ``points`` takes a prefix.
    """
    families = [
        [ChannelSpec.attenuator(0.3, 1.0), ChannelSpec.attenuator(0.7, 0.5), ChannelSpec.attenuator(0.5, 0.0)],
        [ChannelSpec.amplifier(1.5, 0.3), ChannelSpec.amplifier(2.0, 0.0), ChannelSpec.amplifier(1.25, 1.0)],
        [ChannelSpec.contravariant(1.5, 0.2), ChannelSpec.contravariant(2.0, 0.5), ChannelSpec.contravariant(1.25, 1.0)],
        [ChannelSpec.additive_noise(0.25), ChannelSpec.additive_noise(0.5), ChannelSpec.additive_noise(1.0)],
    ]
    photons = (0.0, 0.5, 1.0, 1.5)
    per_family = [[(spec, N) for spec in fam for N in photons] for fam in families]
    grid = [per_family[f][i] for i in range(len(per_family[0])) for f in range(len(families))]
    return grid if points is None else grid[:points]


def verify_thermal_formulas(
    grid: Sequence[tuple[ChannelSpec, float]] | None = None,
    cutoff: int = 40,
    tol: float = 1e-4,
    tail_tol: float = 1e-10,
) -> VerificationReport:
    """Compare simulated output entropies of thermal inputs with the closed forms (one mode)."""
    grid = thermal_grid() if grid is None else list(grid)
    started = time.perf_counter()

    def one(i: int) -> TrialRecord:
        spec, N = grid[i]
        state = thermal_state(N, cutoff)
        plan = default_plan(spec, cutoff, input_photons=N, tail_tol=tail_tol)
        out = apply_channel(spec, state, plan)
        simulated = von_neumann_entropy(out)
        exact = thermal_output_entropy(spec, N)
        err = simulated - exact
        slack = truncation_slack(out.trace_deficit, plan.output_cutoff, 1)
        status = "pass" if abs(err) <= tol else "fail"
        return TrialRecord(
            i,
            f"{spec.kind.value}:N={N:g}",
            von_neumann_entropy(state),
            simulated,
            {"closed_form": exact},
            {"closed_form": err},
            -abs(err),
            out.trace_deficit,
            slack,
            status,
        )

    report = VerificationReport(
        "thermal",
        {"grid": [{"channel": s.as_dict(), "N": N} for s, N in grid], "cutoff": cutoff, "tol": tol},
        allowance=tol,
    )
    report.records = _run_trials(one, len(grid))
    report.elapsed = time.perf_counter() - started
    return report
