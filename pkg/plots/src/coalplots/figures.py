"""Figure rendering.

Two figure kinds are supported.  ``fig1`` is a pair of scatter panels
showing the external branch length against the total branch length and
against the merger-count power, one point per replicate.  ``fig2`` is a
single panel overlaying one trajectory's lineage counts with the
power-law reference curve, drawn dashed.

Output is vector by default: when the requested output path has no
suffix, ``.pdf`` is appended.  Rendering is deterministic, so the same
input produces byte-identical vector output (PDF creation timestamps are
suppressed).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .reader import FIG1_COLUMNS, FIG2_COLUMNS, SchemaError, load_columns

_KINDS = ("fig1", "fig2")


@dataclass(frozen=True)
class FigureRequest:
    """One rendering job: which CSV, which figure kind, where to write.

    panel_labels, when given, become panel titles in order (fig1 has two
    panels, fig2 one); surplus labels are rejected.  dpi only affects
    raster formats.
    """

    input_csv: Union[str, Path]
    kind: str
    output_path: Union[str, Path]
    panel_labels: Optional[Sequence[str]] = None
    dpi: int = 150

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(
                f"unknown figure kind {self.kind!r}, expected one of {_KINDS}")
        if self.dpi < 10:
            raise ValueError("dpi must be at least 10")


def _resolve_output(path):
    path = Path(path)
    if not path.suffix:
        path = path.with_suffix(".pdf")
    return path


def _apply_labels(axes, labels, panel_count):
    if labels is None:
        return
    if len(labels) > panel_count:
        raise ValueError(
            f"got {len(labels)} panel labels for {panel_count} panel(s)")
    for ax, label in zip(axes, labels):
        ax.set_title(label)


def _save(fig, path, dpi):
    metadata = None
    if path.suffix == ".pdf":
        metadata = {"CreationDate": None}
    elif path.suffix == ".svg":
        metadata = {"Date": None}
    fig.savefig(path, dpi=dpi, metadata=metadata)
    plt.close(fig)


def render_fig1(request: FigureRequest) -> Path:
    """Render the two scatter panels; returns the written path."""
    if request.kind != "fig1":
        raise ValueError(f"render_fig1 got a {request.kind!r} request")
    data = load_columns(request.input_csv, FIG1_COLUMNS)
    out = _resolve_output(request.output_path)
    fig, axes = plt.subplots(1, 2, figsize=(9.0, 4.2), sharey=True)
    axes[0].scatter(data["L"], data["ell"], s=9, alpha=0.55,
                    color="tab:blue", linewidths=0)
    axes[0].set_xlabel(r"$L_n$")
    axes[0].set_ylabel(r"$\ell_n$")
    axes[1].scatter(data["tau_pow"], data["ell"], s=9, alpha=0.55,
                    color="tab:red", linewidths=0)
    axes[1].set_xlabel(r"$\tau_n^{\,2-\alpha}$")
    _apply_labels(axes, request.panel_labels, 2)
    fig.tight_layout()
    _save(fig, out, request.dpi)
    return out


def render_fig2(request: FigureRequest) -> Path:
    """Render the trajectory overlay panel; returns the written path."""
    if request.kind != "fig2":
        raise ValueError(f"render_fig2 got a {request.kind!r} request")
    data = load_columns(request.input_csv, FIG2_COLUMNS)
    out = _resolve_output(request.output_path)
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    ax.plot(data["j"], data["x"], color="tab:blue", linewidth=1.2,
            label=r"$X_{\tau-j}$ (active lineages)")
    ax.plot(data["j"], data["y"], color="tab:green", linewidth=1.2,
            label=r"$Y_{\tau-j}$ (external lineages)")
    ax.plot(data["j"], data["ref_curve"], color="black", linewidth=1.0,
            linestyle="--", label=r"$n\,(j/\tau)^{\alpha}$")
    ax.set_xlabel(r"$j$ (mergers remaining)")
    ax.set_ylabel("lineage count")
    ax.legend(frameon=False)
    _apply_labels([ax], request.panel_labels, 1)
    fig.tight_layout()
    _save(fig, out, request.dpi)
    return out


def render(request: FigureRequest) -> Path:
    """Dispatch on the request's figure kind."""
    if request.kind == "fig1":
        return render_fig1(request)
    return render_fig2(request)
