"""Biphoton correlation amplitudes for a thin collinear type-I crystal.

The amplitude of the pair ``|p_s, l_s> |p_i, l_i>`` is the triple overlap

    c = int d^2x  LG_pump(x) LG_idler(x)^* LG_signal(x)^*

which vanishes unless ``l_s + l_i = l_p``. Two independent evaluations are
provided: adaptive radial quadrature and the terminating Lauricella series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


from .hypergeom import appell_f2, lauricella_fa3
from .modes import ModeSpec, lg_radial
from .quadrature import gauss_kronrod

__all__ = [
    "PumpSpec",
    "BiphotonAmplitude",
    "conserves_oam",
    "overlap_quadrature",
    "overlap_closed_form",
    "overlap_appell",
    "amplitude",
    "paired_modes",
    "DEFAULT_WAIST_RATIO",
]

DEFAULT_WAIST_RATIO = 0.2


@dataclass(frozen=True)
class PumpSpec:
    mode: ModeSpec

    @classmethod
    def of(cls, p: int, ell: int, waist: float = 1.0) -> "PumpSpec":
        return cls(ModeSpec.of(p, ell, waist))

    @property
    def p(self) -> int:
        return self.mode.p

    @property
    def ell(self) -> int:
        return self.mode.ell

    @property
    def waist(self) -> float:
        return self.mode.waist


@dataclass(frozen=True)
class BiphotonAmplitude:
    pump: PumpSpec
    signal: ModeSpec
    idler: ModeSpec
    value: complex

    @property
    def probability(self) -> float:
        return abs(self.value) ** 2


def _as_mode(pump) -> ModeSpec:
    return pump.mode if isinstance(pump, PumpSpec) else pump


def conserves_oam(pump, signal: ModeSpec, idler: ModeSpec) -> bool:
    return signal.ell + idler.ell == _as_mode(pump).ell


def _sigma(pm: ModeSpec, signal: ModeSpec, idler: ModeSpec) -> float:
    return 1.0 / pm.waist**2 + 1.0 / idler.waist**2 + 1.0 / signal.waist**2


def overlap_quadrature(pump, signal: ModeSpec, idler: ModeSpec, tol: float = 1e-10,
                       rtol: float = 1e-12, max_intervals: int = 2000) -> complex:
    """Amplitude by adaptive quadrature of the radial overlap integral.

    The azimuthal integral is applied analytically (``2 pi`` or exactly zero).
    The radial integrand decays as ``exp(-sigma r^2)``; it is truncated where
    ``sigma r^2`` has passed the polynomial factor's peak by a wide margin
    (never below 40).
    """
    pm = _as_mode(pump)
    if not conserves_oam(pm, signal, idler):
        return 0j
    sigma = _sigma(pm, signal, idler)
    half_l = 0.5 * (abs(pm.ell) + abs(signal.ell) + abs(idler.ell))
    degree = half_l + pm.p + signal.p + idler.p
    r_max = math.sqrt(max(40.0, 60.0 + 4.0 * degree) / sigma)

    def integrand(r):
        return lg_radial(pm, r) * lg_radial(idler, r) * lg_radial(signal, r) * r

    val, _ = gauss_kronrod(integrand, 0.0, r_max, epsabs=tol / (2 * math.pi), epsrel=rtol,
                           max_intervals=max_intervals)
    return complex(2.0 * math.pi * val)


def _log_prefactor(pm: ModeSpec, signal: ModeSpec, idler: ModeSpec):
    """Log of ``N * prod binom * Gamma(l_T+1) / sigma^(l_T+1)``, plus ``l_T`` and ``sigma``."""
    modes = (pm, idler, signal)
    half_l = 0.5 * sum(abs(m.ell) for m in modes)
    sigma = _sigma(pm, signal, idler)
    log_n = math.log(2.0 * math.pi) + 0.5 * (math.log(2.0) - 3.0 * math.log(math.pi))
    log_n += half_l * math.log(2.0)
    log_binom = 0.0
    for m in modes:
        a = abs(m.ell)
        log_n += 0.5 * (math.lgamma(m.p + 1) - math.lgamma(m.p + a + 1))
        log_n -= (a + 1) * math.log(m.waist)
        log_binom += math.lgamma(m.p + a + 1) - math.lgamma(m.p + 1) - math.lgamma(a + 1)
    log_gamma = math.lgamma(half_l + 1) - (half_l + 1) * math.log(sigma)
    return log_n + log_binom + log_gamma, half_l, sigma


def overlap_closed_form(pump, signal: ModeSpec, idler: ModeSpec) -> complex:
    """Amplitude from the terminating Lauricella ``F_A^(3)`` series.

    Prefactors are combined in log space before exponentiating since the
    binomials and ``Gamma(l_T+1)`` can leave double range while ``c`` stays O(1).
    """
    pm = _as_mode(pump)
    if not conserves_oam(pm, signal, idler):
        return 0j
    log_pref, half_l, sigma = _log_prefactor(pm, signal, idler)
    lam = [2.0 / m.waist**2 / sigma for m in (pm, idler, signal)]
    series = lauricella_fa3(
        half_l + 1, -pm.p, -idler.p, -signal.p,
        abs(pm.ell) + 1, abs(idler.ell) + 1, abs(signal.ell) + 1,
        *lam,
    )
    return complex(math.exp(log_pref) * series)


def overlap_appell(pump, signal: ModeSpec, idler: ModeSpec) -> complex:
    """Amplitude for a pump with zero radial index, via the Appell ``F2`` series."""
    pm = _as_mode(pump)
    if pm.p != 0:
        raise ValueError("the Appell F2 form applies only to pumps with p = 0")
    if not conserves_oam(pm, signal, idler):
        return 0j
    log_pref, half_l, sigma = _log_prefactor(pm, signal, idler)
    series = appell_f2(
        half_l + 1, -idler.p, -signal.p, abs(idler.ell) + 1, abs(signal.ell) + 1,
        2.0 / idler.waist**2 / sigma, 2.0 / signal.waist**2 / sigma,
    )
    return complex(math.exp(log_pref) * series)


def amplitude(pump, signal: ModeSpec, idler: ModeSpec, method: str = "closed", **kwargs) -> BiphotonAmplitude:
    """Bundle an amplitude with its mode labels; ``method`` is ``closed`` or ``quadrature``."""
    if method == "closed":
        value = overlap_closed_form(pump, signal, idler)
    elif method == "quadrature":
        value = overlap_quadrature(pump, signal, idler, **kwargs)
    else:
        raise ValueError(f"unknown method {method!r}")
    pm = pump if isinstance(pump, PumpSpec) else PumpSpec(pump)
    return BiphotonAmplitude(pm, signal, idler, value)


def paired_modes(pump, p_s: int, ell_s: int, p_i: int, ell_i: int,
                 waist_ratio: float = DEFAULT_WAIST_RATIO):
    """Signal and idler :class:`ModeSpec` with waists ``waist_ratio * w_pump``."""
    w = _as_mode(pump).waist * waist_ratio
    return ModeSpec.of(p_s, ell_s, w), ModeSpec.of(p_i, ell_i, w)

