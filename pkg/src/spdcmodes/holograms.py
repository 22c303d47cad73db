"""Intensity-masked blazed-grating holograms for phase-only modulators.

A target field ``A exp(i Psi)`` (``0 <= A <= 1``) is written as

    g(x, y) = M * mod(2 pi x / Lambda + F, 2 pi),
    M = 1 - sinc^{-1}(A) / pi,    F = Psi - pi M,

and appears, up to a global phase, in the first diffraction order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ResolutionError
from .modes import ModeSpec, lg_field_xy

TWO_PI = 2.0 * np.pi


@dataclass
class PhaseMask:
    grid: np.ndarray
    grating_period: float
    pixel_pitch: float = 8e-6
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.grating_period < 2:
            raise ResolutionError(f"grating period must be at least 2 pixels, got {self.grating_period}")
        g = np.asarray(self.grid, dtype=float)
        if g.ndim != 2:
            raise DomainError("phase mask grid must be two-dimensional")
        if np.any(g < 0) or np.any(g >= TWO_PI):
            raise DomainError("phase values must lie in [0, 2 pi)")
        self.grid = g

    @property
    def shape(self):
        return self.grid.shape

    def to_gray(self) -> np.ndarray:
        """8-bit levels with ``[0, 2 pi)`` mapped linearly onto ``[0, 255]``."""
        return np.clip(np.floor(self.grid / TWO_PI * 256.0), 0, 255).astype(np.uint8)


@dataclass
class TargetField:
    amplitude: np.ndarray
    phase: np.ndarray

    def __post_init__(self):
        self.amplitude = np.asarray(self.amplitude, dtype=float)
        self.phase = np.broadcast_to(np.asarray(self.phase, dtype=float), self.amplitude.shape)

    @classmethod
    def from_complex(cls, u) -> "TargetField":
        u = np.asarray(u, dtype=complex)
        amp = np.abs(u)
        peak = amp.max()
        if peak > 0:
            amp = amp / peak
        return cls(amp, np.angle(u))

    @property
    def complex(self) -> np.ndarray:
        return self.amplitude * np.exp(1j * self.phase)


def sinc(x):
    """Unnormalized ``sin(x) / x``."""
    return np.sinc(np.asarray(x, dtype=float) / np.pi)


def sinc_inverse(a, tol: float = 1e-12):
    """Inverse of ``sinc`` on ``[0, pi]``, where it falls monotonically from 1 to 0.

    Vectorized bisection to an absolute tolerance ``tol`` on the argument.
    """
    a = np.asarray(a, dtype=float)
    if np.any(a < 0) or np.any(a > 1):
        raise DomainError("sinc inverse is defined here for values in [0, 1]")
    lo = np.zeros_like(a)
    hi = np.full_like(a, np.pi)
    n_iter = int(np.ceil(np.log2(np.pi / tol))) + 1
    for _ in range(n_iter):
        mid = 0.5 * (lo + hi)
        above = sinc(mid) > a
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    out = 0.5 * (lo + hi)
    out = np.where(a == 1.0, 0.0, np.where(a == 0.0, np.pi, out))
    return out if out.ndim else float(out)


def modulation_depth(a):
    """``M = 1 - sinc^{-1}(A) / pi``: 0 where ``A = 0``, 1 where ``A = 1``."""
    return 1.0 - sinc_inverse(a) / np.pi


def pixel_coords(shape):
    """Integer pixel indices ``(x, y)`` with ``x`` running along the last axis."""
    ny, nx = shape
    return np.meshgrid(np.arange(nx, dtype=float), np.arange(ny, dtype=float))


def synthesize_mask(target: TargetField, grating_period: float, pixel_pitch: float = 8e-6) -> PhaseMask:
    amp = target.amplitude
    if np.any(amp < 0) or np.any(amp > 1):
        raise DomainError("target amplitude must be normalized to [0, 1]")
    if grating_period < 2:
        raise ResolutionError(f"grating period must be at least 2 pixels, got {grating_period}")
    m = modulation_depth(amp)
    f = target.phase - np.pi * m
    x, _ = pixel_coords(amp.shape)
    g = m * np.mod(TWO_PI * x / grating_period + f, TWO_PI)
    # M * mod(.) can round up to 2 pi only through the float product
    g = np.where(g >= TWO_PI, 0.0, g)
    return PhaseMask(g, float(grating_period), pixel_pitch)


def simulate_first_order(mask: PhaseMask, input_field=None) -> np.ndarray:
    """Recover the complex field carried by the first diffraction order.

    The modulated field ``exp(i g)`` (times ``input_field``, a plane wave by
    default) is Fourier transformed, a rectangular window of half-width
    ``1/(2 Lambda)`` around spatial frequency ``(1/Lambda, 0)`` is kept,
    recentered and transformed back.
    """
    period = mask.grating_period
    if period < 2:
        raise ResolutionError(f"grating period must be at least 2 pixels, got {period}")
    u = np.exp(1j * mask.grid)
    if input_field is not None:
        u = u * (input_field.complex if isinstance(input_field, TargetField) else np.asarray(input_field))
    ny, nx = mask.shape
    spec = np.fft.fft2(u)
    fx = np.fft.fftfreq(nx)[None, :]
    fy = np.fft.fftfreq(ny)[:, None]
    half = 0.5 / period
    window = (np.abs(fx - 1.0 / period) < half) & (np.abs(fy) < half)
    out = np.fft.ifft2(spec * window)
    x, _ = pixel_coords(mask.shape)
    return out * np.exp(-1j * TWO_PI * x / period)


def field_overlap(a, b) -> float:
    """Squared normalized overlap ``|<a|b>|^2 / (<a|a><b|b>)``, insensitive to global phase."""
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    num = abs(np.vdot(a, b)) ** 2
    den = np.vdot(a, a).real * np.vdot(b, b).real
    return float(num / den) if den > 0 else 0.0


def mode_on_pixels(mode: ModeSpec, shape, waist_px: float | None = None) -> np.ndarray:
    """LG field sampled on a pixel grid centred on the array, waist in pixels.

    ``waist_px`` defaults to a tenth of the smaller grid dimension.
    """
    ny, nx = shape
    if waist_px is None:
        waist_px = min(nx, ny) / 10.0
    x, y = pixel_coords(shape)
    m = ModeSpec(mode.index, float(waist_px))
    return lg_field_xy(m, x - nx / 2.0, y - ny / 2.0)


def projection_mask(mode: ModeSpec, grating_period: float, shape=(512, 512),
                    waist_px: float | None = None, pixel_pitch: float = 8e-6) -> PhaseMask:
    """Mask displaying the conjugate of ``mode``, as used to project onto it."""
    target = TargetField.from_complex(np.conj(mode_on_pixels(mode, shape, waist_px)))
    mask = synthesize_mask(target, grating_period, pixel_pitch)
    mask.meta = {"p": mode.p, "ell": mode.ell, "waist_px": waist_px or min(shape) / 10.0, "conjugate": True}
    return mask


def generation_mask(mode: ModeSpec, grating_period: float, shape=(512, 512),
                    waist_px: float | None = None, pixel_pitch: float = 8e-6) -> PhaseMask:
    target = TargetField.from_complex(mode_on_pixels(mode, shape, waist_px))
    mask = synthesize_mask(target, grating_period, pixel_pitch)
    mask.meta = {"p": mode.p, "ell": mode.ell, "waist_px": waist_px or min(shape) / 10.0, "conjugate": False}
    return mask


def round_trip_fidelity(mode: ModeSpec, grating_period: float = 8, shape=(512, 512),
                        waist_px: float | None = None, conjugate: bool = False) -> float:
    """Overlap between a mode and the first order of its synthesized mask."""
    make = projection_mask if conjugate else generation_mask
    mask = make(mode, grating_period, shape, waist_px)
    target = mode_on_pixels(mode, shape, waist_px)
    if conjugate:
        target = np.conj(target)
    return field_overlap(target, simulate_first_order(mask))
