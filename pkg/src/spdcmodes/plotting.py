"""Grayscale matrix and mask images rendered with matplotlib's Agg backend."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import numpy as np  # noqa: E402
from matplotlib.figure import Figure  # noqa: E402

RC = {
    "font.size": 9,
    "axes.titlesize": 9,
    "axes.labelsize": 9,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "image.cmap": "gray",
}

# PNG metadata would otherwise carry the matplotlib version string only; drop it
# so byte identity does not depend on the plotting library build
_META = {"Software": None}


def _figure(width=3.2, height=2.8):
    with matplotlib.rc_context(RC):
        fig = Figure(figsize=(width, height), dpi=100)
    return fig


def render_matrix(values, path, row_labels=None, col_labels=None, title="", xlabel="idler", ylabel="signal",
                  vmin=0.0, vmax=None):
    values = np.asarray(values, dtype=float)
    with matplotlib.rc_context(RC):
        fig = _figure()
        ax = fig.add_subplot(111)
        im = ax.imshow(values, cmap="gray", origin="lower", vmin=vmin,
                       vmax=values.max() if vmax is None else vmax, interpolation="nearest")
        if row_labels is not None:
            ax.set_yticks(range(len(row_labels)), [str(v) for v in row_labels])
        if col_labels is not None:
            ax.set_xticks(range(len(col_labels)), [str(v) for v in col_labels])
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        fig.colorbar(im, ax=ax, fraction=0.046, pad=0.04)
        fig.tight_layout()
        fig.savefig(Path(path), format="png", metadata=_META)
    return Path(path)


def render_correlation(matrix, path, title=""):
    label = "l" if matrix.kind.startswith("oam") else "p"
    return render_matrix(matrix.values, path, matrix.axis_s, matrix.axis_i, title=title,
                         xlabel=f"{label}_i", ylabel=f"{label}_s")


def render_density(rho, stem, labels=None):
    """Real and imaginary parts as two grayscale images ``<stem>_real.png``/``<stem>_imag.png``."""
    m = rho.matrix if hasattr(rho, "matrix") else np.asarray(rho)
    lim = float(np.abs(m).max()) or 1.0
    stem = Path(stem)
    out = []
    for part, arr in (("real", m.real), ("imag", m.imag)):
        p = stem.with_name(f"{stem.name}_{part}.png")
        out.append(render_matrix(arr, p, labels, labels, title=f"Re rho" if part == "real" else "Im rho",
                                 xlabel="|p_i p_s>", ylabel="|p_i p_s>", vmin=-lim, vmax=lim))
    return out


def render_mask(gray, path):
    """Write an 8-bit phase mask as a PNG at one pixel per SLM pixel."""
    from matplotlib import image

    image.imsave(Path(path), np.asarray(gray, dtype=np.uint8), cmap="gray", vmin=0, vmax=255,
                 format="png", metadata=_META)
    return Path(path)
