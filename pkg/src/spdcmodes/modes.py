"""Laguerre-Gauss and Hypergeometric-Gauss mode profiles at the waist plane.

Modes follow the convention

    LG_{l,p}(r, phi) = C * (r/w)^|l| * L_p^|l|(2 r^2 / w^2) * exp(-(r/w)^2 - i l phi)

with ``C`` fixed by unit L2 norm over the transverse plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError

__all__ = [
    "ModeIndex",
    "ModeSpec",
    "PolarPoint",
    "laguerre",
    "lg_norm_constant",
    "lg_radial",
    "lg_field",
    "lg_field_xy",
    "lg_amplitude",
    "pochhammer",
    "bessel_i_scaled",
    "hygg_fourier",
    "hygg_field",
]


@dataclass(frozen=True, order=True)
class ModeIndex:
    """Radial index ``p`` and OAM index ``ell`` of one mode."""

    p: int
    ell: int

    def __post_init__(self):
        if int(self.p) != self.p or self.p < 0:
            raise DomainError(f"radial index must be a non-negative integer, got {self.p!r}")
        if int(self.ell) != self.ell:
            raise DomainError(f"OAM index must be an integer, got {self.ell!r}")
        object.__setattr__(self, "p", int(self.p))
        object.__setattr__(self, "ell", int(self.ell))

    def __str__(self):
        return f"(p={self.p}, l={self.ell:+d})"


@dataclass(frozen=True)
class ModeSpec:
    index: ModeIndex
    waist: float = 1.0

    def __post_init__(self):
        if not (self.waist > 0 and math.isfinite(self.waist)):
            raise DomainError(f"waist must be positive and finite, got {self.waist!r}")

    @classmethod
    def of(cls, p: int, ell: int, waist: float = 1.0) -> "ModeSpec":
        return cls(ModeIndex(p, ell), float(waist))

    @property
    def p(self) -> int:
        return self.index.p

    @property
    def ell(self) -> int:
        return self.index.ell

    def scaled(self, factor: float) -> "ModeSpec":
        return ModeSpec(self.index, self.waist * factor)


@dataclass(frozen=True)
class PolarPoint:
    r: float
    phi: float = 0.0

    def __post_init__(self):
        if self.r < 0:
            raise DomainError(f"radius must be non-negative, got {self.r!r}")


def laguerre(p: int, alpha: float, x):
    """Generalized Laguerre polynomial ``L_p^alpha(x)`` by upward recurrence.

    Accepts scalar or array ``x``; returns the same shape.
    """
    if int(p) != p or p < 0:
        raise DomainError(f"degree must be a non-negative integer, got {p!r}")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if p == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 + alpha - x
    for n in range(1, int(p)):
        prev, cur = cur, ((2 * n + 1 + alpha - x) * cur - (n + alpha) * prev) / (n + 1)
    return cur if cur.ndim else float(cur)


def lg_norm_constant(p: int, ell: int, waist: float) -> float:
    """``C_|l|^(p)`` giving unit L2 norm for the convention in the module docstring."""
    a = abs(ell)
    log_c = 0.5 * (math.log(2.0 / math.pi) + math.lgamma(p + 1) - math.lgamma(p + a + 1))
    log_c += 0.5 * a * math.log(2.0) - math.log(waist)
    return math.exp(log_c)


def lg_radial(mode: ModeSpec, r):
    """Real radial factor of the LG mode (everything but ``exp(-i l phi)``)."""
    r = np.asarray(r, dtype=float)
    a = abs(mode.ell)
    u = r / mode.waist
    out = lg_norm_constant(mode.p, mode.ell, mode.waist) * u**a * laguerre(mode.p, a, 2.0 * u * u) * np.exp(-u * u)
    return out if np.ndim(out) else float(out)


def lg_field(mode: ModeSpec, r, phi):
    """Complex LG field on polar samples ``(r, phi)`` (broadcast together)."""
    return lg_radial(mode, r) * np.exp(-1j * mode.ell * np.asarray(phi, dtype=float))


def lg_field_xy(mode: ModeSpec, x, y):
    """Complex LG field on Cartesian samples."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return lg_field(mode, np.hypot(x, y), np.arctan2(y, x))


def lg_amplitude(mode: ModeSpec, pt: PolarPoint) -> complex:
    return complex(lg_field(mode, pt.r, pt.phi))


def pochhammer(a: float, k: int) -> float:
    """Rising factorial ``(a)_k = a (a+1) ... (a+k-1)``."""
    if int(k) != k or k < 0:
        raise DomainError(f"k must be a non-negative integer, got {k!r}")
    out = 1.0
    for j in range(int(k)):
        out *= a + j
        if out == 0.0:
            break
    return out


def bessel_i_scaled(nu: float, z):
    """Exponentially scaled modified Bessel function ``exp(-z) I_nu(z)`` for ``z >= 0``.

    The scaled form lets callers combine ``I_nu`` with a decaying Gaussian
    without overflowing for large arguments.
    """
    return special.ive(nu, z)


def hygg_fourier(ell: int, rho):
    """Radial profile of the far field of ``exp(-r^2) exp(i l theta)``.

    Evaluates ``int_0^inf exp(-r^2) r J_|l|(rho r) dr`` through the closed form

        sqrt(pi) (rho/8) exp(-rho^2/8) [I_{(|l|-1)/2}(rho^2/8) - I_{(|l|+1)/2}(rho^2/8)]

    The ``(-1)^l exp(i l phi)`` factor is left to the caller; for negative
    ``ell`` the sign of ``J_{-l} = (-1)^l J_l`` is absorbed there too, so the
    profile depends on ``|ell|`` only.
    """
    a = abs(int(ell))
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0):
        raise DomainError("rho must be non-negative")
    z = rho * rho / 8.0
    # exp(-z) I_nu(z) absorbs the exp(-rho^2/8) prefactor exactly
    diff = bessel_i_scaled((a - 1) / 2.0, z) - bessel_i_scaled((a + 1) / 2.0, z)
    with np.errstate(invalid="ignore"):
        out = (math.sqrt(math.pi) / 8.0) * rho * diff
    # rho * I_{-1/2} is finite at the origin: the integral is 1/2 for l = 0
    out = np.where(rho == 0, 0.5 if a == 0 else 0.0, out).astype(complex)
    return out if out.ndim else complex(out)


def hygg_field(ell: int, waist: float, r, phi):
    """HyGG projection mode on the crystal plane with OAM ``ell``.

    The far-field coordinate is ``rho = 2 r / waist`` so that the ``ell = 0``
    member is a Gaussian ``exp(-(r/waist)^2)`` (up to a constant). The
    azimuthal factor uses the same ``exp(-i l phi)`` convention as the LG
    modes, so all projection modes share one OAM sign convention.
    """
    rho = 2.0 * np.asarray(r, dtype=float) / waist
    return hygg_fourier(ell, rho) * np.exp(-1j * ell * np.asarray(phi, dtype=float))
