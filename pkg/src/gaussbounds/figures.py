"""
Curve data behind the three standard plots, with CSV / JSON / gnuplot emitters.

* ``epni``: output-entropy lower bounds of the quantum-limited attenuator
  versus input entropy per mode;
* ``broadcast``: rate regions of the degraded broadcast channel;
* ``tradeoff``: (C, Q) trade-off regions of the quantum-limited attenuator.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .bounds import epi_bound, gaussian_conjecture_value, new_bound
from .channels import ChannelSpec
from .regions import (
    CurveKind,
    broadcast_achievable,
    broadcast_outer,
    broadcast_time_sharing,
    project_cq_plane,
    tradeoff_time_sharing,
)

__all__ = ["Series", "FIGURES", "DEFAULTS", "figure_series", "to_csv", "to_json", "gnuplot_script", "CSV_HEADER"]

FIGURES = ("epni", "broadcast", "tradeoff")
CSV_HEADER = ("x", "y", "curve", "eta", "E", "beta", "units")

DEFAULTS = {
    "epni": {"eta": (0.1, 0.2), "energy": 0.0, "samples": 601, "x_max": 6.0},
    "broadcast": {"eta": (0.9,), "energy": 4.0, "samples": 512},
    "tradeoff": {"eta": (0.9,), "energy": 4.0, "samples": 256},
}

AXES = {
    "epni": ("input entropy per mode (nats)", "output entropy per mode (nats)"),
    "broadcast": ("R_A' (nats/use)", "R_B' (nats/use)"),
    "tradeoff": ("C (nats/use)", "Q (nats/use)"),
}


@dataclass(frozen=True)
class Series:
    curve: str
    eta: float
    E: float
    x: np.ndarray
    y: np.ndarray
    beta: np.ndarray | None = None


def _epni(etas, energy: float, samples: int, x_max: float) -> list[Series]:
    S = np.linspace(0.0, x_max, samples)
    out = []
    for eta in etas:
        spec = ChannelSpec.attenuator(eta, energy)
        gauss = np.array([gaussian_conjecture_value(spec, s).value_per_mode for s in S])
        nb = [new_bound(spec, s) for s in S]
        epi = np.array([epi_bound(spec, s).value_per_mode for s in S])
        out.append(Series("Gaussian", eta, energy, S, gauss))
        if nb[0].in_domain:
            out.append(Series("NewBound", eta, energy, S, np.array([b.value_per_mode for b in nb])))
        out.append(Series("EPI", eta, energy, S, epi))
    return out


def _from_region(curve) -> Series:
    return Series(curve.kind.value, curve.params["eta"], curve.params["E"], curve.x.copy(), curve.y.copy(), curve.betas)


def _broadcast(etas, energy: float, samples: int) -> list[Series]:
    out = []
    for eta in etas:
        curves = [
            broadcast_time_sharing(eta, energy, samples),
            broadcast_achievable(eta, energy, samples),
            broadcast_outer(eta, energy, CurveKind.OUTER_EPI, samples),
            broadcast_outer(eta, energy, CurveKind.OUTER_NEW, samples),
        ]
        out.extend(_from_region(c) for c in curves)
    return out


def _tradeoff(etas, energy: float, samples: int, family: str) -> list[Series]:
    out = []
    for eta in etas:
        curves = [tradeoff_time_sharing(family, eta, energy, samples)]
        curves += [project_cq_plane(family, k, eta, energy, samples) for k in (CurveKind.ACHIEVABLE, CurveKind.OUTER_EPI, CurveKind.OUTER_NEW)]
        out.extend(_from_region(c) for c in curves)
    return out


def figure_series(
    name: str,
    eta: float | None = None,
    energy: float | None = None,
    samples: int | None = None,
    family: str = "cqg",
) -> list[Series]:
    """All curves of figure ``name``; omitted parameters take the standard values."""
    if name not in FIGURES:
        raise ValueError(f"unknown figure {name!r}; choose from {', '.join(FIGURES)}")
    d = DEFAULTS[name]
    etas = d["eta"] if eta is None else (eta,)
    energy = d["energy"] if energy is None else energy
    samples = d["samples"] if samples is None else samples
    if name == "epni":
        return _epni(etas, energy, samples, d["x_max"])
    if name == "broadcast":
        return _broadcast(etas, energy, samples)
    return _tradeoff(etas, energy, samples, family)


def _rows(series: list[Series]):
    for s in series:
        for i in range(len(s.x)):
            beta = "" if s.beta is None else repr(float(s.beta[i]))
            yield (repr(float(s.x[i])), repr(float(s.y[i])), s.curve, repr(float(s.eta)), repr(float(s.E)), beta, "nats")


def to_csv(series: list[Series]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    w.writerows(_rows(series))
    return buf.getvalue()


def to_json(name: str, series: list[Series], config: dict | None = None) -> str:
    doc = {
        "figure": name,
        "config": config or {},
        "units": "nats",
        "curves": [
            {
                "curve": s.curve,
                "eta": s.eta,
                "E": s.E,
                "x": [float(v) for v in s.x],
                "y": [float(v) for v in s.y],
                "beta": None if s.beta is None else [float(v) for v in s.beta],
            }
            for s in series
        ],
    }
    return json.dumps(doc, sort_keys=True, indent=1, ensure_ascii=False) + "\n"


def gnuplot_script(name: str, series: list[Series], data_path: str) -> str:
    """gnuplot commands plotting each curve of a CSV written by :func:`to_csv`."""
    xl, yl = AXES[name]
    lines = [
        "set datafile separator ','",
        f"set xlabel \"{xl}\"",
        f"set ylabel \"{yl}\"",
        "set key outside right",
        "set grid",
    ]
    plots = []
    for s in series:
        label = f"{s.curve} eta={s.eta:g}"
        cond = f'(strcol(3) eq "{s.curve}" && abs($4 - {s.eta!r}) < 1e-12 ? $2 : 1/0)'
        plots.append(f"'{data_path}' every ::1 using 1:{cond} with lines title \"{label}\"")
    lines.append("plot " + ", \\\n     ".join(plots))
    return "\n".join(lines) + "\n"
