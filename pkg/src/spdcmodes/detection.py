"""Measurement-chain model: fiber-coupled projections, coincidences, crosstalk, efficiencies.

Lengths on the sampling grid are in units of the mode waist; the fiber-mode
width ``sigma`` lives in the conjugate (far-field) plane and is therefore an
inverse length. ``sigma -> 0`` is the ideal projective limit.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, GridMismatchError
from .modes import ModeIndex, ModeSpec, lg_field_xy
from .overlap import BiphotonAmplitude


@dataclass(frozen=True)
class FiberSpec:
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError(f"fiber sigma must be positive, got {self.sigma!r}")


@dataclass(frozen=True)
class Grid:
    """Square Cartesian sampling grid of ``n x n`` points spanning ``extent``."""

    n: int = 256
    extent: float = 8.0

    @classmethod
    def for_waist(cls, waist: float, n: int = 256, factor: float = 8.0) -> "Grid":
        return cls(n, factor * waist)

    @property
    def dx(self) -> float:
        return self.extent / self.n

    def coords(self):
        x = (np.arange(self.n) - self.n / 2) * self.dx
        return np.meshgrid(x, x)

    def sample(self, mode: ModeSpec) -> "SampledField":
        x, y = self.coords()
        return SampledField(lg_field_xy(mode, x, y), self)


@dataclass
class SampledField:
    values: np.ndarray
    grid: Grid

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.grid.n, self.grid.n):
            raise GridMismatchError("field samples do not match the grid shape")


def _check_same_grid(a: SampledField, b: SampledField):
    if a.grid != b.grid or a.values.shape != b.values.shape:
        raise GridMismatchError(f"fields sampled on different grids: {a.grid} vs {b.grid}")


def hermitian_product(proj: SampledField, x: SampledField) -> complex:
    """``<Pi|X>`` by grid quadrature."""
    _check_same_grid(proj, x)
    return complex(np.vdot(proj.values, x.values) * proj.grid.dx**2)


def single_rate(input_field: SampledField, projector: SampledField, fiber: FiberSpec,
                method: str = "direct", pad: int = 8) -> float:
    """Normalized count rate of ``input_field`` projected on ``projector`` through a fiber.

    The rate is ``|int F(X Pi^*)(k) exp(-k^2/sigma^2) d^2k|^2 / (pi sigma^2)^2``,
    normalized so that it tends to ``|<Pi|X>|^2`` as ``sigma -> 0``.

    ``method="direct"`` evaluates the fiber overlap in the mask plane, where the
    Gaussian becomes ``exp(-sigma^2 r^2 / 4)``; ``method="fourier"`` transforms
    the product field with ``pad``-fold zero padding and integrates against the
    fiber mode in the far field. The Fourier route needs ``sigma`` well above
    the far-field sample spacing ``2 pi / (pad * extent)``.
    """
    _check_same_grid(input_field, projector)
    grid = input_field.grid
    prod = input_field.values * np.conj(projector.values)
    s = fiber.sigma
    if method == "direct":
        x, y = grid.coords()
        weight = np.exp(-(s * s) * (x * x + y * y) / 4.0)
        amp = np.sum(prod * weight) * grid.dx**2
    elif method == "fourier":
        n = grid.n * pad
        spec = np.fft.fft2(prod, s=(n, n)) * grid.dx**2
        k = 2.0 * np.pi * np.fft.fftfreq(n, d=grid.dx)
        kx, ky = np.meshgrid(k, k)
        dk = k[1] - k[0]
        if s < 3.0 * dk:
            raise DomainError(f"fiber sigma {s:.3g} unresolved by far-field spacing {dk:.3g}; use method='direct'")
        # grid origin sits at index n/2, not 0: undo the implied linear phase
        x0 = -grid.n / 2 * grid.dx
        spec = spec * np.exp(-1j * (kx + ky) * x0)
        amp = np.sum(spec * np.exp(-(kx * kx + ky * ky) / (s * s))) * dk**2 / (math.pi * s * s)
    else:
        raise ValueError(f"unknown method {method!r}")
    return float(abs(amp) ** 2)


class Projector(Mapping):
    """A detection mode written in the LG basis: ``{ModeIndex: coefficient}``.

    Coefficients are normalized on construction.
    """

    def __init__(self, coefficients):
        items = {(k if isinstance(k, ModeIndex) else ModeIndex(*k)): complex(v) for k, v in dict(coefficients).items()}
        norm = math.sqrt(sum(abs(v) ** 2 for v in items.values()))
        if norm == 0:
            raise DomainError("projector has no weight")
        self._c = {k: v / norm for k, v in items.items()}

    @classmethod
    def basis(cls, p: int, ell: int) -> "Projector":
        return cls({ModeIndex(p, ell): 1.0})

    def __getitem__(self, key):
        return self._c[key]

    def __iter__(self):
        return iter(self._c)

    def __len__(self):
        return len(self._c)

    def bra(self, index: ModeIndex) -> complex:
        """``<Pi|index>``."""
        return self._c.get(index, 0j).conjugate()


def _as_projector(pr) -> Projector:
    if isinstance(pr, Projector):
        return pr
    if isinstance(pr, ModeSpec):
        return Projector.basis(pr.p, pr.ell)
    if isinstance(pr, ModeIndex):
        return Projector.basis(pr.p, pr.ell)
    return Projector(pr)


def coincidence_rate(coeffs, proj1, proj2) -> float:
    """``|sum c <Pi_1|l_i,p_i> <Pi_2|l_s,p_s>|^2`` over the supplied amplitudes.

    ``proj1`` acts on the idler and ``proj2`` on the signal.
    """
    p1 = _as_projector(proj1)
    p2 = _as_projector(proj2)
    total = 0j
    for amp in coeffs:
        a: BiphotonAmplitude = amp
        w = p1.bra(a.idler.index) * p2.bra(a.signal.index)
        if w:
            total += a.value * w
    return float(abs(total) ** 2)


@dataclass
class CrosstalkMatrix:
    values: np.ndarray
    modes: list = field(default_factory=list)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2 or self.values.shape[0] != self.values.shape[1]:
            raise DomainError("crosstalk matrix must be square")
        if np.any(self.values < 0):
            raise DomainError("crosstalk matrix entries must be non-negative")

    def efficiencies(self) -> np.ndarray:
        """Diagonal normalized to its maximum."""
        d = np.diag(self.values).copy()
        return d / d.max()


def build_crosstalk_matrix(mode_list, fiber: FiberSpec, grid: Grid | None = None,
                           method: str = "direct") -> CrosstalkMatrix:
    """Rates for generating mode ``i`` (row) and projecting on mode ``j`` (column)."""
    modes = list(mode_list)
    if grid is None:
        grid = Grid.for_waist(max(m.waist for m in modes))
    fields = [grid.sample(m) for m in modes]
    n = len(modes)
    out = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            out[i, j] = single_rate(fields[i], fields[j], fiber, method=method)
    return CrosstalkMatrix(out, modes)


def _check_eff(eta, name):
    eta = np.asarray(eta, dtype=float)
    if np.any(~(eta > 0)):
        raise DomainError(f"{name} efficiencies must be positive")
    return eta


def efficiency_correct(raw_counts, efficiencies_s, efficiencies_i, renormalize: bool = False) -> np.ndarray:
    """``raw[i, j] / (eta_s[i] * eta_i[j])``; rows index signal modes, columns idler modes."""
    eta_s = _check_eff(efficiencies_s, "signal")
    eta_i = _check_eff(efficiencies_i, "idler")
    out = np.asarray(raw_counts, dtype=float) / np.outer(eta_s, eta_i)
    if renormalize:
        out = out / out.max()
    return out


def apply_efficiencies(true_rates, efficiencies_s, efficiencies_i) -> np.ndarray:
    """Forward model of :func:`efficiency_correct`."""
    eta_s = _check_eff(efficiencies_s, "signal")
    eta_i = _check_eff(efficiencies_i, "idler")
    return np.asarray(true_rates, dtype=float) * np.outer(eta_s, eta_i)


@dataclass(frozen=True)
class NoiseModel:
    """Poisson counting noise with an integration scale and a dark-count floor."""

    seed: int = 0
    scale: float = 1e4
    dark: float = 0.0

    def sample(self, expected) -> np.ndarray:
        """Integer counts for ``scale * expected + dark``.

        Each cell draws from its own stream keyed by ``(seed, *index)`` so the
        result is independent of evaluation order.
        """
        mean = self.scale * np.asarray(expected, dtype=float) + self.dark
        if np.any(mean < 0):
            raise DomainError("expected rates must be non-negative")
        out = np.empty(mean.shape, dtype=np.int64)
        for idx in np.ndindex(mean.shape):
            rng = np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=tuple(int(i) for i in idx)))
            out[idx] = rng.poisson(mean[idx])
        return out
