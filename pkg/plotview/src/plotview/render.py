"""CSV loading and figure rendering."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .spec import FigureSpec


class MissingChannel(Exception):
    """A series references a channel the CSV does not provide."""


def load_trace(path: Path) -> dict[str, list[float]]:
    """Read a trace CSV into named float columns ('t' plus channels)."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MissingChannel(f"{path}: empty trace file") from None
        cols: dict[str, list[float]] = {name: [] for name in header}
        for row in reader:
            for name, cell in zip(header, row):
                cols[name].append(float(cell))
    return cols


def render(spec: FigureSpec, outdir: Path) -> Path:
    """Render one figure; returns the written image path.

    Raises :class:`MissingChannel` (naming file and channel) before any
    drawing happens if a series cannot be satisfied.
    """
    traces: dict[str, dict[str, list[float]]] = {}
    for s in spec.series:
        if s.file not in traces:
            traces[s.file] = load_trace(Path(s.file))
        if s.channel not in traces[s.file]:
            raise MissingChannel(f"{s.file}: no channel {s.channel!r}")

    npanels = len(spec.panels)
    fig, axes = plt.subplots(npanels, 1, figsize=(7.0, 2.4 * npanels),
                             sharex=True, squeeze=False)
    panel_axis = {p: axes[i][0] for i, p in enumerate(spec.panels)}
    for s in spec.series:
        ax = panel_axis[s.panel]
        cols = traces[s.file]
        if spec.logy:
            ax.semilogy(cols["t"], [abs(v) for v in cols[s.channel]], label=s.label)
        else:
            ax.plot(cols["t"], cols[s.channel], label=s.label)
    for p, ax in panel_axis.items():
        ax.grid(True, alpha=0.3)
        ax.legend(loc="upper right", fontsize=8)
        if spec.ylabel:
            ax.set_ylabel(spec.ylabel)
    axes[-1][0].set_xlabel(spec.xlabel)
    if spec.title:
        fig.suptitle(spec.title)
    fig.tight_layout()

    outdir.mkdir(parents=True, exist_ok=True)
    target = outdir / spec.out
    # pin the metadata so identical inputs give identical bytes
    fig.savefig(target, dpi=110, metadata={"Software": "plotview"})
    plt.close(fig)
    return target
