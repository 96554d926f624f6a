"""Render figure series to image files with matplotlib's non-interactive backend."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .figures import AXES, Series  # noqa: E402

STYLE = {
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.labelsize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "figure.dpi": 120,
}

LINESTYLES = {
    "Gaussian": "-",
    "NewBound": "--",
    "EPI": ":",
    "TimeSharing": ":",
    "Achievable": "-",
    "OuterNew": "--",
    "OuterEPI": "-.",
}


def figure_size(scale: float = 1.0, ratio: float = 0.62) -> tuple[float, float]:
    width = 6.4 * scale
    return width, width * ratio


def render(name: str, series: list[Series], path, title: str | None = None) -> Path:
    """Write one PNG (or any format matplotlib infers from the suffix) for a figure."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=figure_size())
        etas = sorted({s.eta for s in series})
        colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
        for s in series:
            label = s.curve if len(etas) == 1 else f"{s.curve}, eta={s.eta:g}"
            ax.plot(s.x, s.y, LINESTYLES.get(s.curve, "-"), color=colors[etas.index(s.eta) % len(colors)] if len(etas) > 1 else None, label=label, lw=1.2)
        xl, yl = AXES[name]
        ax.set_xlabel(xl)
        ax.set_ylabel(yl)
        ax.set_xlim(left=0)
        ax.set_ylim(bottom=0)
        if title:
            ax.set_title(title, fontsize=10)
        ax.legend(frameon=False)
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
    return path
