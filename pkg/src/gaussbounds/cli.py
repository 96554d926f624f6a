"""
Command-line front end.

    gaussbounds bound --attenuator 0.5 --env 0 --entropy 1.3863
    gaussbounds figure broadcast --format csv --output broadcast.csv --plot broadcast.png
    gaussbounds verify all --seed 42 --output report.json

Every run echoes its resolved configuration as one line of canonical JSON on
stderr; feeding that line back through ``--config`` reproduces the run.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .bounds import bound_set
from .channels import ChannelKind, ChannelSpec, is_entanglement_breaking
from .figures import FIGURES, figure_series, gnuplot_script, to_csv, to_json
from .harness import (
    BoundViolation,
    EnsembleKind,
    EnsembleSpec,
    merge_reports,
    thermal_grid,
    verify_moe_entanglement_breaking,
    verify_new_bound,
    verify_thermal_formulas,
)

__all__ = ["RunConfig", "build_parser", "main", "EXIT_VIOLATION"]

EXIT_VIOLATION = 2
SUITES = ("eb-moe", "new-bound", "thermal", "all")

SUITE_DEFAULTS = {
    "eb-moe": {"channel": "contravariant", "kappa": 1.5, "eta": None, "env": 0.0, "modes": 2, "cutoff": 10, "ensemble": "EntangledBipartite"},
    "new-bound": {"channel": "attenuator", "kappa": None, "eta": 0.5, "env": 0.0, "modes": 1, "cutoff": 40, "ensemble": "GinibreMixed"},
    "thermal": {"cutoff": 40},
}


@dataclass
class RunConfig:
    """Resolved settings of one invocation; the canonical JSON is the reproducibility record."""

    subcommand: str
    params: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps({"subcommand": self.subcommand, "params": self.params}, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        d = json.loads(text)
        return cls(d["subcommand"], d["params"])


def _channel_from_flags(kind: str, eta, kappa, env) -> ChannelSpec:
    env = 0.0 if env is None else env
    if kind == "attenuator":
        return ChannelSpec.attenuator(eta, env)
    if kind == "amplifier":
        return ChannelSpec.amplifier(kappa, env)
    if kind == "contravariant":
        return ChannelSpec.contravariant(kappa, env)
    return ChannelSpec.additive_noise(env)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gaussbounds", description="Entropy bounds for one-mode Gaussian channels.")
    p.add_argument("--config", help="replay a configuration echoed by an earlier run")
    sub = p.add_subparsers(dest="command")

    b = sub.add_parser("bound", help="evaluate the lower bounds for one channel and input entropy")
    ch = b.add_mutually_exclusive_group()
    ch.add_argument("--attenuator", type=float, metavar="ETA")
    ch.add_argument("--amplifier", type=float, metavar="KAPPA")
    ch.add_argument("--contravariant", type=float, metavar="KAPPA")
    ch.add_argument("--additive-noise", action="store_true", help="noise variance taken from --env")
    b.add_argument("--env", type=float, default=0.0, help="environment photons (noise variance for additive noise)")
    b.add_argument("--entropy", type=float, help="input entropy per mode, nats")
    b.add_argument("--modes", type=int, default=1)
    b.add_argument("--format", choices=("text", "json"), default="text")

    f = sub.add_parser("figure", help="emit the curves of a standard figure")
    f.add_argument("name", choices=FIGURES)
    f.add_argument("--eta", type=float)
    f.add_argument("--energy", type=float)
    f.add_argument("--samples", type=int)
    f.add_argument("--family", choices=("cqg", "cpk"), default="cqg", help="trade-off family (tradeoff only)")
    f.add_argument("--format", choices=("csv", "json"), default="csv")
    f.add_argument("--output", default="-", help="data file, '-' for stdout")
    f.add_argument("--gnuplot", metavar="PATH", help="also write a gnuplot script reading the CSV output")
    f.add_argument("--plot", metavar="PATH", help="also render the figure with matplotlib (PNG, PDF, SVG)")

    v = sub.add_parser("verify", help="run Monte Carlo verification suites")
    v.add_argument("suite", choices=SUITES)
    v.add_argument("--trials", type=int, default=20)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--channel", choices=[k.value for k in ChannelKind])
    v.add_argument("--eta", type=float)
    v.add_argument("--kappa", type=float)
    v.add_argument("--env", type=float)
    v.add_argument("--modes", type=int)
    v.add_argument("--cutoff", type=int)
    v.add_argument("--ensemble", choices=[k.value for k in EnsembleKind])
    v.add_argument("--allowance", type=float, default=1e-3, help="largest tolerated negative margin")
    v.add_argument("--output", help="write the JSON report here")
    v.add_argument("--dump-dir", default="failure-dumps", help="where failing trials are saved")
    return p


# -- config resolution -------------------------------------------------------------


def _resolve_bound(a, p) -> dict:
    if a.entropy is None:
        p.error("bound needs --entropy")
    if a.entropy < 0:
        p.error("--entropy must be >= 0")
    if a.modes < 1:
        p.error("--modes must be >= 1")
    if a.attenuator is not None:
        kind, eta, kappa = "attenuator", a.attenuator, None
    elif a.amplifier is not None:
        kind, eta, kappa = "amplifier", None, a.amplifier
    elif a.contravariant is not None:
        kind, eta, kappa = "contravariant", None, a.contravariant
    elif a.additive_noise:
        kind, eta, kappa = "additive-noise", None, None
    else:
        p.error("choose a channel: --attenuator, --amplifier, --contravariant or --additive-noise")
    params = {"channel": kind, "eta": eta, "kappa": kappa, "env": a.env, "entropy": a.entropy, "modes": a.modes, "format": a.format}
    _spec_or_error(params, p)
    return params


def _spec_or_error(params: dict, p) -> ChannelSpec:
    try:
        return _channel_from_flags(params["channel"], params["eta"], params["kappa"], params["env"])
    except (TypeError, ValueError) as exc:
        p.error(f"invalid channel parameters: {exc}")


def _resolve_figure(a, p) -> dict:
    if a.eta is not None and not 0 <= a.eta <= 1:
        p.error("--eta must lie in [0, 1]")
    if a.name in ("broadcast", "tradeoff"):
        if a.eta is not None and a.eta < 0.5:
            p.error(f"{a.name} needs 1/2 <= eta <= 1")
        if a.energy is not None and a.energy <= 0:
            p.error("--energy must be positive")
    if a.name == "epni" and a.eta is not None and a.eta in (0.0, 1.0):
        p.error("epni needs 0 < eta < 1")
    if a.energy is not None and a.energy < 0:
        p.error("--energy must be >= 0")
    if a.samples is not None and a.samples < 2:
        p.error("--samples must be >= 2")
    return {
        "name": a.name,
        "eta": a.eta,
        "energy": a.energy,
        "samples": a.samples,
        "family": a.family,
        "format": a.format,
        "output": a.output,
        "gnuplot": a.gnuplot,
        "plot": a.plot,
    }


def _suite_params(suite: str, a) -> dict:
    d = dict(SUITE_DEFAULTS[suite])
    if suite == "thermal":
        if a.cutoff is not None:
            d["cutoff"] = a.cutoff
        d["points"] = min(a.trials, len(thermal_grid()))
        return d
    overrides = {"channel": a.channel, "eta": a.eta, "kappa": a.kappa, "env": a.env, "modes": a.modes, "cutoff": a.cutoff, "ensemble": a.ensemble}
    if a.channel is not None and a.channel != d["channel"]:
        d.update(eta=None, kappa=None)
    d.update({k: v for k, v in overrides.items() if v is not None})
    if suite == "new-bound" and a.modes is not None and a.modes > 1 and a.cutoff is None:
        d["cutoff"] = 12
    d["trials"] = a.trials
    return d


def _check_suite(suite: str, d: dict, p) -> None:
    if d["trials"] < 1:
        p.error("--trials must be >= 1")
    if d["cutoff"] < 2:
        p.error("--cutoff must be >= 2")
    if d["modes"] not in (1, 2):
        p.error("--modes must be 1 or 2")
    if d["ensemble"] == "EntangledBipartite" and d["modes"] != 2:
        p.error("EntangledBipartite needs --modes 2")
    if d["channel"] == "attenuator" and d["eta"] is None:
        p.error("attenuator needs --eta")
    if d["channel"] in ("amplifier", "contravariant") and d["kappa"] is None:
        p.error(f"{d['channel']} needs --kappa")
    spec = _spec_or_error(d, p)
    if suite == "new-bound":
        from .bounds import DegenerateParameterError, new_bound_domain

        try:
            ok = spec.kind is not ChannelKind.CONTRAVARIANT and new_bound_domain(spec)
        except DegenerateParameterError as exc:
            p.error(str(exc))
        if not ok:
            p.error("channel parameters lie outside the sharper bound's domain")
    if suite == "eb-moe" and d["modes"] > 1 and not is_entanglement_breaking(spec):
        p.error("multi-mode eb-moe checks need an entanglement-breaking channel")


def _resolve_verify(a, p) -> dict:
    if a.trials < 1:
        p.error("--trials must be >= 1")
    if not 0 <= a.seed < 2**64:
        p.error("--seed must be a 64-bit unsigned integer")
    if a.allowance <= 0:
        p.error("--allowance must be positive")
    suites = ["thermal", "new-bound", "eb-moe"] if a.suite == "all" else [a.suite]
    parts = {}
    for s in suites:
        d = _suite_params(s, a)
        if s != "thermal":
            _check_suite(s, d, p)
        elif d["cutoff"] < 2:
            p.error("--cutoff must be >= 2")
        parts[s] = d
    return {"suite": a.suite, "seed": a.seed, "allowance": a.allowance, "output": a.output, "dump_dir": a.dump_dir, "suites": parts}


def resolve(argv=None) -> RunConfig:
    p = build_parser()
    a = p.parse_args(argv)
    if a.config:
        try:
            return RunConfig.from_json(a.config)
        except (ValueError, KeyError) as exc:
            p.error(f"unreadable --config: {exc}")
    if a.command is None:
        p.error("choose a subcommand: bound, figure or verify")
    if a.command == "bound":
        return RunConfig("bound", _resolve_bound(a, p))
    if a.command == "figure":
        return RunConfig("figure", _resolve_figure(a, p))
    return RunConfig("verify", _resolve_verify(a, p))


# -- commands ------------------------------------------------------------------------


def cmd_bound(params: dict, out=None) -> int:
    out = out or sys.stdout
    spec = _channel_from_flags(params["channel"], params["eta"], params["kappa"], params["env"])
    values = bound_set(spec, params["entropy"], params["modes"])
    if params["format"] == "json":
        out.write(json.dumps([v.as_dict() for v in values], sort_keys=True, indent=1) + "\n")
        return 0
    for v in values:
        shown = "out-of-domain" if v.value_per_mode is None else f"{v.value_per_mode:.10f}"
        out.write(f"{v.kind:<20} {shown:>16} nats/mode  in_domain={str(v.in_domain).lower()}\n")
    return 0


def cmd_figure(params: dict, config: RunConfig, out=None) -> int:
    out = out or sys.stdout
    name = params["name"]
    series = figure_series(name, params["eta"], params["energy"], params["samples"], params["family"])
    text = to_csv(series) if params["format"] == "csv" else to_json(name, series, json.loads(config.to_json()))
    target = params["output"]
    if target in (None, "-"):
        out.write(text)
    else:
        Path(target).parent.mkdir(parents=True, exist_ok=True)
        with open(target, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    if params["gnuplot"]:
        data = target if target not in (None, "-") and params["format"] == "csv" else str(Path(params["gnuplot"]).with_suffix(".csv"))
        if data != target:
            with open(data, "w", encoding="utf-8", newline="") as fh:
                fh.write(to_csv(series))
        Path(params["gnuplot"]).write_text(gnuplot_script(name, series, data), encoding="utf-8")
    if params["plot"]:
        from .plotting import render

        render(name, series, params["plot"])
    return 0


def _run_suite(name: str, d: dict, seed: int, allowance: float, dump_dir):
    if name == "thermal":
        return verify_thermal_formulas(thermal_grid(d["points"]), cutoff=d["cutoff"])
    spec = _channel_from_flags(d["channel"], d["eta"], d["kappa"], d["env"])
    ens = EnsembleSpec(d["ensemble"], d["modes"], d["cutoff"], d["trials"], seed)
    fn = verify_new_bound if name == "new-bound" else verify_moe_entanglement_breaking
    return fn(spec, d["modes"], ens, allowance=allowance, dump_dir=dump_dir)


def cmd_verify(params: dict, out=None) -> int:
    out = out or sys.stdout
    reports = []
    for name, d in params["suites"].items():
        r = _run_suite(name, d, params["seed"], params["allowance"], params["dump_dir"])
        s = r.summary()
        out.write(
            f"{name:<10} {s['passed']}/{s['trials']} within tolerance, failures={s['failures']}, "
            f"inconclusive={s['inconclusive']}, min_margin={s['min_margin']:.3e}\n"
        )
        reports.append(r)
    report = reports[0] if len(reports) == 1 else merge_reports(params["suite"], reports)
    # the output path does not change results, so it stays out of the hashed config
    run = {k: v for k, v in params.items() if k != "output"}
    report.config = {"run": run, "parts": [r.config for r in reports]}
    out.write(f"report sha256 {report.digest()}\n")
    if params["output"]:
        out.write(f"report written to {report.write(params['output'])}\n")
    if not report.ok:
        err = BoundViolation(report)
        out.write(f"BOUND VIOLATION: {err}\n")
        return EXIT_VIOLATION
    return 0


def main(argv=None) -> int:
    config = resolve(argv)
    print(f"# config {config.to_json()}", file=sys.stderr)
    if config.params.get("seed") is not None:
        print(f"# seed {config.params['seed']}", file=sys.stderr)
    if config.subcommand == "bound":
        return cmd_bound(config.params)
    if config.subcommand == "figure":
        return cmd_figure(config.params, config)
    return cmd_verify(config.params)


if __name__ == "__main__":
    sys.exit(main())
