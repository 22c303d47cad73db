"""Radial-index and OAM correlation matrices of the downconverted pair.

Matrices are indexed ``[signal, idler]`` and, unless asked otherwise,
normalized to their maximum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .modes import ModeSpec, hygg_fourier, lg_radial
from .overlap import DEFAULT_WAIST_RATIO, PumpSpec, overlap_closed_form, overlap_quadrature, paired_modes
from .quadrature import gauss_kronrod

DEFAULT_HYGG_WAIST_RATIO = 0.1


@dataclass
class CorrelationMatrix:
    axis_s: list
    axis_i: list
    values: np.ndarray
    normalization: str = "max"
    kind: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (len(self.axis_s), len(self.axis_i)):
            raise ValueError("values shape does not match the axes")
        if np.any(self.values < 0):
            raise ValueError("correlation values must be non-negative")
        if self.normalization not in ("max", "raw"):
            raise ValueError(f"unknown normalization {self.normalization!r}")

    def normalized(self) -> "CorrelationMatrix":
        peak = self.values.max()
        vals = self.values / peak if peak > 0 else self.values.copy()
        return CorrelationMatrix(list(self.axis_s), list(self.axis_i), vals, "max", self.kind, dict(self.meta))

    def off_diagonal_mass(self) -> float:
        """Share of the total weight lying off the main diagonal."""
        total = self.values.sum()
        return float((total - np.trace(self.values)) / total) if total > 0 else 0.0

    def is_diagonal_dominant(self) -> bool:
        """True when every row peaks on the diagonal."""
        return all(int(np.argmax(row)) == k for k, row in enumerate(self.values))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "normalization": self.normalization,
            "axis_s": list(self.axis_s),
            "axis_i": list(self.axis_i),
            "values": self.values.tolist(),
            "meta": self.meta,
        }


def _finish(axis_s, axis_i, vals, normalize, kind, meta):
    m = CorrelationMatrix(list(axis_s), list(axis_i), vals, "raw", kind, meta)
    return m.normalized() if normalize else m


def p_correlation_matrix(pump: PumpSpec, ell_s: int, p_range=range(4), waist_ratio: float = DEFAULT_WAIST_RATIO,
                         normalize: bool = True, method: str = "closed") -> CorrelationMatrix:
    """``|c|^2`` over ``(p_s, p_i)`` with ``l_i = l_p - l_s``."""
    ps = list(p_range)
    if not ps:
        raise ValueError("p_range must not be empty")
    ell_i = pump.ell - ell_s
    evaluate = overlap_closed_form if method == "closed" else overlap_quadrature
    vals = np.zeros((len(ps), len(ps)))
    for a, p_s in enumerate(ps):
        for b, p_i in enumerate(ps):
            sig, idl = paired_modes(pump, p_s, ell_s, p_i, ell_i, waist_ratio)
            vals[a, b] = abs(evaluate(pump, sig, idl)) ** 2
    meta = {"pump": [pump.p, pump.ell, pump.waist], "ell_s": ell_s, "ell_i": ell_i, "waist_ratio": waist_ratio}
    return _finish(ps, ps, vals, normalize, "p", meta)


def oam_correlation_matrix_lg(pump: PumpSpec, ell_range, p_s: int = 0, p_i: int = 0,
                              waist_ratio: float = DEFAULT_WAIST_RATIO, normalize: bool = True) -> CorrelationMatrix:
    """``|c|^2`` over ``(l_s, l_i)`` for fixed radial indices, LG projections."""
    ells = list(ell_range)
    vals = np.zeros((len(ells), len(ells)))
    for a, ls in enumerate(ells):
        for b, li in enumerate(ells):
            sig, idl = paired_modes(pump, p_s, ls, p_i, li, waist_ratio)
            vals[a, b] = abs(overlap_closed_form(pump, sig, idl)) ** 2
    meta = {"pump": [pump.p, pump.ell, pump.waist], "p_s": p_s, "p_i": p_i, "waist_ratio": waist_ratio}
    return _finish(ells, ells, vals, normalize, "oam-lg", meta)


def hygg_amplitude(pump: PumpSpec, ell_s: int, ell_i: int, hygg_waist: float,
                   tol: float = 1e-14, rtol: float = 1e-10) -> float:
    """Overlap of the pump with two HyGG projection modes (zero off the conservation line)."""
    if ell_s + ell_i != pump.ell:
        return 0.0
    pm: ModeSpec = pump.mode
    # the HyGG profiles fall off only as a power law; the pump envelope sets the cutoff
    r_max = pm.waist * math.sqrt(60.0 + 4.0 * pm.p + abs(pm.ell))

    def integrand(r):
        rho = 2.0 * r / hygg_waist
        return lg_radial(pm, r) * hygg_fourier(ell_i, rho).real * hygg_fourier(ell_s, rho).real * r

    breaks = [hygg_waist * 2.0**k for k in range(6) if hygg_waist * 2.0**k < r_max]
    val, _ = gauss_kronrod(integrand, 0.0, r_max, epsabs=tol, epsrel=rtol, breakpoints=breaks)
    return 2.0 * math.pi * val


def oam_correlation_matrix_hygg(pump: PumpSpec, ell_range, hygg_waist: float | None = None,
                                normalize: bool = True) -> CorrelationMatrix:
    """``|c|^2`` over ``(l_s, l_i)`` with unmasked (HyGG) projections.

    ``hygg_waist`` defaults to ``0.1 * w_pump``.
    """
    if hygg_waist is None:
        hygg_waist = DEFAULT_HYGG_WAIST_RATIO * pump.waist
    if not hygg_waist > 0:
        raise ValueError("hygg_waist must be positive")
    ells = list(ell_range)
    vals = np.zeros((len(ells), len(ells)))
    for a, ls in enumerate(ells):
        for b, li in enumerate(ells):
            vals[a, b] = hygg_amplitude(pump, ls, li, hygg_waist) ** 2
    meta = {"pump": [pump.p, pump.ell, pump.waist], "hygg_waist": hygg_waist}
    return _finish(ells, ells, vals, normalize, "oam-hygg", meta)


def conservation_profile(matrix: CorrelationMatrix, ell_p: int):
    """Cells on the line ``l_s + l_i = l_p`` as ``[(l_s, value), ...]`` ordered by ``l_s``."""
    col = {li: b for b, li in enumerate(matrix.axis_i)}
    out = []
    for a, ls in enumerate(matrix.axis_s):
        b = col.get(ell_p - ls)
        if b is not None:
            out.append((ls, float(matrix.values[a, b])))
    return out


def has_lowest_order_dip(matrix: CorrelationMatrix, ell_p: int) -> bool:
    """Whether the lowest-order cells of the conservation line sit below their outer neighbours.

    Lowest order means smallest ``|l_s| + |l_i|``; for ``l_p = 1`` these are
    the two cells ``(0, 1)`` and ``(1, 0)``.
    """
    prof = conservation_profile(matrix, ell_p)
    orders = [abs(ls) + abs(ell_p - ls) for ls, _ in prof]
    lowest = min(orders)
    idx = [k for k, o in enumerate(orders) if o == lowest]
    lo, hi = min(idx), max(idx)
    if lo == 0 or hi == len(prof) - 1:
        return False
    inner = max(prof[k][1] for k in idx)
    return inner < prof[lo - 1][1] and inner < prof[hi + 1][1]
