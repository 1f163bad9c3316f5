"""Render benchmark CSV files into NMSE comparison figures.

Input is the fixed benchmark schema
``sweep,method,nmse_db,bound_db,trials,ms,seed,digest``: one curve per
method, the estimator bound as a dashed line, optional vertical markers
at field-boundary distances.  Rendering is deterministic (fixed SVG
hash salt, no embedded date), so re-rendering the same spec yields an
identical file.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

EXPECTED_COLUMNS = ["sweep", "method", "nmse_db", "bound_db", "trials", "ms", "seed", "digest"]

X_LABELS = {
    "distance": "transmitter-receiver distance (m)",
    "pilot": "pilot length M",
    "snr": "SNR (dB)",
}

METHOD_LABELS = {
    "two_stage": "two-stage (LoS fit + polar OMP)",
    "omp_near": "near-field codebook OMP",
    "omp_far": "far-field codebook OMP",
    "ls_oracle": "least-squares oracle",
}


class RenderError(Exception):
    """Bad plot specification or malformed input CSV."""


@dataclass
class PlotSpec:
    """Everything needed to turn one benchmark CSV into one figure."""

    csv_path: str | Path
    x_axis: str = "distance"
    out_path: str | Path = "figure.svg"
    methods: list[str] = field(default_factory=list)  # empty: all methods in the file
    rd_marker: float | None = None
    ard_marker: float | None = None
    log_x: bool = False
    title: str | None = None

    def __post_init__(self) -> None:
        if self.x_axis not in X_LABELS:
            raise RenderError(f"unknown x axis {self.x_axis!r} (expected one of {sorted(X_LABELS)})")
        suffix = Path(self.out_path).suffix.lower()
        if suffix not in (".svg", ".png"):
            raise RenderError(f"unsupported output format {suffix!r} (use .svg or .png)")


@dataclass
class Series:
    method: str
    x: list[float]
    y: list[float]


def load_rows(csv_path: str | Path) -> list[dict]:
    path = Path(csv_path)
    if not path.exists():
        raise RenderError(f"input CSV not found: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise RenderError(f"empty CSV: {path}")
        unknown = [c for c in reader.fieldnames if c not in EXPECTED_COLUMNS]
        if unknown:
            raise RenderError(f"unknown column {unknown[0]!r} in {path}")
        missing = [c for c in ("sweep", "method", "nmse_db", "bound_db") if c not in reader.fieldnames]
        if missing:
            raise RenderError(f"missing column {missing[0]!r} in {path}")
        rows = list(reader)
    if not rows:
        raise RenderError(f"CSV has a header but no data rows: {path}")
    return rows


def collect_series(rows: list[dict], methods: list[str]) -> tuple[list[Series], Series | None]:
    """Per-method curves plus the bound line, sorted by sweep value."""
    available = sorted({r["method"] for r in rows})
    chosen = methods or available
    for m in chosen:
        if m not in available:
            raise RenderError(f"method {m!r} not present in the CSV (has {available})")
    series = []
    for m in chosen:
        pts = sorted(
            (float(r["sweep"]), float(r["nmse_db"])) for r in rows if r["method"] == m
        )
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        series.append(Series(method=m, x=xs, y=ys))
    bound_pts = sorted({(float(r["sweep"]), float(r["bound_db"])) for r in rows})
    bound_xs = [p[0] for p in bound_pts]
    bound_ys = [p[1] for p in bound_pts]
    bound = None
    if bound_ys and all(math.isfinite(v) for v in bound_ys):
        bound = Series(method="bound", x=bound_xs, y=bound_ys)
    return series, bound


def render(spec: PlotSpec) -> Path:
    """Draw the figure described by `spec`; returns the output path."""
    rows = load_rows(spec.csv_path)
    series, bound = collect_series(rows, spec.methods)

    plt.rcParams["svg.hashsalt"] = "nfplot"
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    markers = ["o", "s", "^", "v", "D", "p"]
    for i, s in enumerate(series):
        label = METHOD_LABELS.get(s.method, s.method)
        line, = ax.plot(s.x, s.y, marker=markers[i % len(markers)], label=label)
        line.set_gid(f"curve-{s.method}")
    if bound is not None:
        line, = ax.plot(bound.x, bound.y, linestyle="--", color="black", label="estimator bound")
        line.set_gid("bound-line")
    if spec.rd_marker is not None:
        ax.axvline(spec.rd_marker, color="gray", linestyle=":", linewidth=1.2).set_gid("marker-mimo-rd")
    if spec.ard_marker is not None:
        ax.axvline(spec.ard_marker, color="gray", linestyle="-.", linewidth=1.2).set_gid("marker-mimo-ard")
    if spec.log_x:
        ax.set_xscale("log")
    ax.set_xlabel(X_LABELS[spec.x_axis])
    ax.set_ylabel("NMSE (dB)")
    if spec.title:
        ax.set_title(spec.title)
    ax.grid(True, alpha=0.4)
    ax.legend(fontsize=8)
    fig.tight_layout()

    out = Path(spec.out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    # a fixed hash salt plus no Date metadata makes the output reproducible
    fig.savefig(out, metadata={"Date": None} if out.suffix.lower() == ".svg" else None)
    plt.close(fig)
    return out
