"""Two-photon radial-mode tomography in the 16-dimensional subspace ``p_i, p_s in {0..3}``.

Basis ordering is idler-major: index ``4 * p_i + p_s``. Density matrices are
parametrized by 256 real coefficients ``S`` over four-fold tensor products of
Pauli matrices, ``rho = sum S_ijkl s_i (x) s_j (x) s_k (x) s_l``.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import optimize

from .detection import NoiseModel
from .errors import ConvergenceFailure, DomainError, IncompleteData
from .overlap import DEFAULT_WAIST_RATIO, PumpSpec, overlap_closed_form, paired_modes

log = logging.getLogger(__name__)

DIM_PHOTON = 4
DIM = DIM_PHOTON * DIM_PHOTON

PAULI = np.array([
    [[1, 0], [0, 1]],
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)


@dataclass(frozen=True)
class PhotonState:
    """One single-photon measurement state, e.g. ``"2"``, ``"0+3"`` or ``"1+i2"``."""

    label: str
    vector: np.ndarray

    @classmethod
    def parse(cls, label: str) -> "PhotonState":
        return _photon_states_by_label()[label.strip()]


@dataclass(frozen=True)
class ProjectorPair:
    psi: PhotonState   # idler
    zeta: PhotonState  # signal

    @property
    def vector(self) -> np.ndarray:
        return np.kron(self.psi.vector, self.zeta.vector)

    @property
    def key(self):
        return self.psi.label, self.zeta.label

    @property
    def is_basis(self) -> bool:
        return "+" not in self.psi.label and "+" not in self.zeta.label


@dataclass(frozen=True)
class MeasurementRecord:
    projector: ProjectorPair
    count: float

    def __post_init__(self):
        if not self.count >= 0:
            raise DomainError(f"counts must be non-negative, got {self.count!r}")


class DensityMatrix:
    """A 16 x 16 Hermitian, unit-trace, positive semidefinite operator."""

    def __init__(self, matrix, validate: bool = True):
        m = np.array(matrix, dtype=complex)
        if m.shape != (DIM, DIM):
            raise DomainError(f"density matrix must be {DIM}x{DIM}, got {m.shape}")
        self.matrix = m
        if validate:
            self.validate()

    def validate(self, tol_herm=1e-12, tol_trace=1e-10, tol_psd=1e-8):
        m = self.matrix
        if np.max(np.abs(m - m.conj().T)) > tol_herm:
            raise DomainError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > tol_trace:
            raise DomainError(f"density matrix trace {np.trace(m).real:.12g} != 1")
        if np.linalg.eigvalsh(m).min() < -tol_psd:
            raise DomainError("density matrix is not positive semidefinite")
        return self

    @classmethod
    def pure(cls, state) -> "DensityMatrix":
        v = np.asarray(state, dtype=complex)
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()))

    @classmethod
    def maximally_mixed(cls) -> "DensityMatrix":
        return cls(np.eye(DIM) / DIM)

    @classmethod
    def from_pauli(cls, coeffs, validate: bool = True) -> "DensityMatrix":
        return cls(np.tensordot(np.ravel(coeffs), pauli_products(), axes=1), validate=validate)

    def pauli_coefficients(self) -> np.ndarray:
        return pauli_coefficients(self.matrix)

    @property
    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


def _as_matrix(rho) -> np.ndarray:
    return rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)


@lru_cache(maxsize=None)
def pauli_products() -> np.ndarray:
    """The 256 operators ``s_i (x) s_j (x) s_k (x) s_l``, indexed ``64 i + 16 j + 4 k + l``."""
    ops = []
    for idx in itertools.product(range(4), repeat=4):
        op = np.ones((1, 1), dtype=complex)
        for i in idx:
            op = np.kron(op, PAULI[i])
        ops.append(op)
    out = np.array(ops)
    out.setflags(write=False)
    return out


def pauli_coefficients(rho) -> np.ndarray:
    """``S_a = Tr(rho P_a) / 16``, shape ``(4, 4, 4, 4)``."""
    m = _as_matrix(rho)
    s = np.einsum("aij,ji->a", pauli_products(), m).real / DIM
    return s.reshape(4, 4, 4, 4)


def single_photon_states():
    """The 16 single-photon states: 4 basis states and 12 two-term superpositions."""
    return list(_photon_states_by_label().values())


@lru_cache(maxsize=None)
def _photon_states_by_label():
    out = {}
    eye = np.eye(DIM_PHOTON, dtype=complex)
    for p in range(DIM_PHOTON):
        out[str(p)] = PhotonState(str(p), eye[p])
    for p1, p2 in itertools.combinations(range(DIM_PHOTON), 2):
        for tag, phase in (("", 1.0), ("i", 1j)):
            label = f"{p1}+{tag}{p2}"
            out[label] = PhotonState(label, (eye[p1] + phase * eye[p2]) / np.sqrt(2.0))
    return out


def build_measurement_set():
    """All 256 idler/signal products of the single-photon states."""
    states = single_photon_states()
    return [ProjectorPair(a, b) for a in states for b in states]


def completeness_rank(states=None) -> int:
    """Rank of the Gram matrix of vectorized single-photon projectors (16 when complete)."""
    states = single_photon_states() if states is None else states
    vecs = np.array([np.outer(s.vector, s.vector.conj()).ravel() for s in states])
    gram = vecs.conj() @ vecs.T
    return int(np.linalg.matrix_rank(gram, tol=1e-10))


def predict_probabilities(rho, projectors) -> np.ndarray:
    m = _as_matrix(rho)
    vs = np.array([pr.vector for pr in projectors])
    pr = np.einsum("ki,ij,kj->k", vs.conj(), m, vs).real
    # rounding can leave tiny negatives where the true probability is zero
    pr[(pr < 0) & (pr > -1e-14)] = 0.0
    return pr


def design_matrix(projectors) -> np.ndarray:
    """``A[k, a] = <v_k| P_a |v_k>`` so that probabilities are ``A @ S``."""
    vs = np.array([pr.vector for pr in projectors])
    return np.einsum("ki,aij,kj->ka", vs.conj(), pauli_products(), vs).real


def normalize_counts(records):
    """Scale counts so the 16 basis-product projectors sum to one."""
    base = sum(r.count for r in records if r.projector.is_basis)
    if base <= 0:
        raise IncompleteData("basis-product projectors carry no counts")
    return [MeasurementRecord(r.projector, r.count / base) for r in records]


def _ordered(records):
    expected = build_measurement_set()
    by_key = {}
    for r in records:
        by_key[r.projector.key] = r
    missing = [pr.key for pr in expected if pr.key not in by_key]
    if missing:
        raise IncompleteData(f"{len(missing)} of {len(expected)} projector records missing, e.g. {missing[0]}")
    ordered = [by_key[pr.key] for pr in expected]
    return [r.projector for r in ordered], np.array([r.count for r in ordered], dtype=float)


def psd_repair(matrix) -> np.ndarray:
    """Clip negative eigenvalues at zero and renormalize the trace."""
    m = _as_matrix(matrix)
    m = 0.5 * (m + m.conj().T)
    w, v = np.linalg.eigh(m)
    w = np.clip(w, 0.0, None)
    if w.sum() <= 0:
        raise ConvergenceFailure("reconstruction has no positive spectral weight")
    w = w / w.sum()
    out = (v * w) @ v.conj().T
    return 0.5 * (out + out.conj().T)


@dataclass
class Reconstruction:
    rho: DensityMatrix
    coefficients: np.ndarray
    residual: float
    mu: float | None


def reconstruct(records, purity_constrained: bool = True, mu_values=(10.0, 100.0, 1000.0),
                return_details: bool = False):
    """Least-squares density-matrix estimate from 256 normalized count rates.

    The loss ``sum (n_k - Pr_k(S))^2`` is linear least squares in the 255 free
    Pauli coefficients (trace fixes ``S_0000 = 1/16``) and is solved directly.
    With ``purity_constrained`` the penalty ``mu (Tr rho^2 - 1)^2`` is added and
    the quartic problem is minimized by BFGS from the linear solution for each
    ``mu``; the largest ``mu`` whose data residual stays within 10x of the
    smallest-``mu`` residual is kept. The estimate is finally projected onto the
    positive semidefinite cone.

    Raw counts are accepted; they are first scaled so the 16 basis-product
    records sum to one.
    """
    projectors, n = _ordered(normalize_counts(records))
    a = design_matrix(projectors)
    a0, af = a[:, 0], a[:, 1:]
    s0 = 1.0 / DIM
    rhs = n - a0 * s0
    s_lin, *_ = np.linalg.lstsq(af, rhs, rcond=None)

    def data_residual(sf):
        r = af @ sf - rhs
        return float(r @ r)

    chosen_mu = None
    s_best = s_lin
    if purity_constrained:
        runs = []
        for mu in sorted(mu_values):
            def fun(sf, mu=mu):
                r = af @ sf - rhs
                pur = DIM * (s0 * s0 + sf @ sf) - 1.0
                val = r @ r + mu * pur * pur
                grad = 2.0 * af.T @ r + 4.0 * mu * pur * DIM * sf
                return val, grad

            res = optimize.minimize(fun, s_lin, jac=True, method="BFGS", options={"gtol": 1e-10, "maxiter": 5000})
            # status 2 is BFGS losing precision on a flat optimum, not a stall
            ok = bool(res.success) or res.status == 2
            runs.append((mu, res.x, data_residual(res.x), ok))
            log.debug("mu=%g residual=%.3e success=%s", mu, runs[-1][2], ok)
        good = [run for run in runs if run[3] and np.isfinite(run[2])]
        if not good:
            raise ConvergenceFailure("purity-constrained fit did not converge for any penalty weight")
        floor = good[0][2]
        stable = [run for run in good if run[2] <= 10.0 * floor + 1e-12]
        chosen_mu, s_best, _, _ = stable[-1]

    coeffs = np.concatenate([[s0], s_best])
    raw = np.tensordot(coeffs, pauli_products(), axes=1)
    rho = DensityMatrix(psd_repair(raw))
    if not return_details:
        return rho
    pr = predict_probabilities(rho, projectors)
    return Reconstruction(rho, coeffs.reshape(4, 4, 4, 4), float(np.sum((n - pr) ** 2)), chosen_mu)


def residual(rho, records) -> float:
    projectors, n = _ordered(normalize_counts(records))
    return float(np.sum((n - predict_probabilities(rho, projectors)) ** 2))


def _sqrt_psd(m, tol=1e-8):
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    if w.min() < -tol:
        raise DomainError("fidelity needs positive semidefinite inputs")
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def fidelity(a, b) -> float:
    """Uhlmann fidelity ``(Tr sqrt(sqrt(a) b sqrt(a)))^2``."""
    ma, mb = _as_matrix(a), _as_matrix(b)
    sa = _sqrt_psd(ma)
    _sqrt_psd(mb)  # domain check only
    inner = sa @ mb @ sa
    w = np.linalg.eigvalsh(0.5 * (inner + inner.conj().T))
    f = float(np.sum(np.sqrt(np.clip(w, 0.0, None))) ** 2)
    return min(max(f, 0.0), 1.0)


def theory_amplitudes(pump: PumpSpec, ell_i: int, p_range=range(4), waist_ratio: float = DEFAULT_WAIST_RATIO):
    """Unnormalized state vector ``c(p_s, p_i)`` in idler-major order."""
    ell_s = pump.ell - ell_i
    ps = list(p_range)
    vec = np.zeros(len(ps) ** 2, dtype=complex)
    for a, p_i in enumerate(ps):
        for b, p_s in enumerate(ps):
            sig, idl = paired_modes(pump, p_s, ell_s, p_i, ell_i, waist_ratio)
            vec[a * len(ps) + b] = overlap_closed_form(pump, sig, idl)
    return vec


def theory_state(pump: PumpSpec, ell_i: int, p_range=range(4), waist_ratio: float = DEFAULT_WAIST_RATIO) -> DensityMatrix:
    """Projector onto the renormalized SPDC state truncated to the radial subspace."""
    if len(list(p_range)) != DIM_PHOTON:
        raise DomainError(f"tomography subspace needs {DIM_PHOTON} radial indices")
    return DensityMatrix.pure(theory_amplitudes(pump, ell_i, p_range, waist_ratio))


def simulate_records(rho, mean_counts: float | None = None, dark: float = 0.0, seed: int = 0,
                     normalize: bool = True):
    """Measurement records for ``rho``: exact probabilities, or Poisson counts.

    With ``mean_counts`` set, expected counts are scaled so their average over
    the 256 projectors equals ``mean_counts`` (the 16 single-photon projectors
    sum to ``4 I``, hence probabilities average to 1/16).
    """
    projectors = build_measurement_set()
    pr = predict_probabilities(rho, projectors)
    if mean_counts is None:
        counts = pr
    else:
        counts = NoiseModel(seed=seed, scale=DIM * mean_counts, dark=dark).sample(pr).astype(float)
    records = [MeasurementRecord(p, float(c)) for p, c in zip(projectors, counts)]
    return normalize_counts(records) if normalize else records


def random_pure_state(rng, dim: int = DIM) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)
