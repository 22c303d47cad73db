import numpy as np
import pytest
from hypothesis import given, strategies as st

from spdcmodes.errors import DomainError, IncompleteData
from spdcmodes.overlap import PumpSpec
from spdcmodes.tomography import (
    DIM,
    DensityMatrix,
    MeasurementRecord,
    PhotonState,
    ProjectorPair,
    build_measurement_set,
    completeness_rank,
    design_matrix,
    fidelity,
    normalize_counts,
    pauli_coefficients,
    pauli_products,
    predict_probabilities,
    psd_repair,
    random_pure_state,
    reconstruct,
    residual,
    simulate_records,
    single_photon_states,
    theory_state,
)

seeds = st.integers(0, 2**32 - 1)


def test_pauli_products_orthogonal():
    p = pauli_products()
    assert p.shape == (256, DIM, DIM)
    gram = np.einsum("aij,bji->ab", p, p)
    assert np.allclose(gram, DIM * np.eye(256))


@given(seeds)
def test_pauli_expansion_round_trip(seed):
    rng = np.random.default_rng(seed)
    rho = DensityMatrix.pure(random_pure_state(rng))
    s = pauli_coefficients(rho)
    assert s.shape == (4, 4, 4, 4) and s[0, 0, 0, 0] == pytest.approx(1 / DIM)
    assert np.allclose(DensityMatrix.from_pauli(s).matrix, rho.matrix, atol=1e-13)


def test_measurement_set_and_rank():
    states = single_photon_states()
    assert len(states) == 16
    assert completeness_rank() == 16
    assert completeness_rank(states[:4]) == 4
    assert len(build_measurement_set()) == 256
    assert np.linalg.matrix_rank(design_matrix(build_measurement_set())) == 256


def test_label_parsing():
    s = PhotonState.parse("0+i3")
    v = np.zeros(4, complex)
    v[0], v[3] = 1, 1j
    assert np.allclose(s.vector, v / np.sqrt(2))
    with pytest.raises(KeyError):
        PhotonState.parse("0-1")


def test_maximally_mixed_probabilities():
    pr = predict_probabilities(DensityMatrix.maximally_mixed(), build_measurement_set())
    assert np.allclose(pr, 1 / 16)


def test_density_validation():
    with pytest.raises(DomainError):
        DensityMatrix(np.diag([1.0] + [0.0] * 15) * 2)
    with pytest.raises(DomainError):
        DensityMatrix(np.diag([1.5, -0.5] + [0.0] * 14))
    m = np.zeros((16, 16))
    m[0, 1] = 1
    with pytest.raises(DomainError):
        DensityMatrix(m + np.eye(16) / 16)


@given(seeds)
def test_noiseless_pure_reconstruction(seed):
    rho = DensityMatrix.pure(random_pure_state(np.random.default_rng(seed)))
    rec = reconstruct(simulate_records(rho))
    assert fidelity(rec, rho) > 0.999


def test_maximally_mixed_unconstrained():
    mixed = DensityMatrix.maximally_mixed()
    rec = reconstruct(simulate_records(mixed), purity_constrained=False)
    assert fidelity(rec, mixed) > 0.999
    assert np.allclose(rec.matrix, np.eye(16) / 16, atol=1e-12)


def test_raw_counts_are_normalized_internally():
    rho = theory_state(PumpSpec.of(0, 0), 1)
    raw = simulate_records(rho, mean_counts=1e4, seed=3, normalize=False)
    a = reconstruct(raw, return_details=True)
    b = reconstruct(normalize_counts(raw), return_details=True)
    assert np.allclose(a.rho.matrix, b.rho.matrix)
    assert a.residual == pytest.approx(residual(a.rho, raw))
    assert a.mu == 1000


def test_missing_records():
    recs = simulate_records(DensityMatrix.maximally_mixed())
    with pytest.raises(IncompleteData):
        reconstruct(recs[:-1])
    with pytest.raises(ValueError):
        MeasurementRecord(recs[0].projector, -1.0)


def test_psd_repair():
    m = np.diag([0.7, 0.5, -0.2] + [0.0] * 13).astype(complex)
    out = psd_repair(m)
    w = np.linalg.eigvalsh(out)
    assert w.min() >= -1e-15 and np.trace(out).real == pytest.approx(1.0)


@given(seeds, seeds)
def test_fidelity_properties(s1, s2):
    u = random_pure_state(np.random.default_rng(s1))
    v = random_pure_state(np.random.default_rng(s2))
    a, b = DensityMatrix.pure(u), DensityMatrix.pure(v)
    assert fidelity(a, a) == pytest.approx(1.0, abs=1e-7)
    f = fidelity(a, b)
    assert 0 <= f <= 1
    assert f == pytest.approx(fidelity(b, a), abs=1e-7)
    # for pure states the fidelity is the squared overlap
    assert f == pytest.approx(abs(np.vdot(u, v)) ** 2, abs=1e-7)


def test_fidelity_rejects_non_psd():
    with pytest.raises(DomainError):
        fidelity(np.diag([1.5, -0.5] + [0.0] * 14), np.eye(16) / 16)


def test_theory_state_structure():
    rho = theory_state(PumpSpec.of(0, 0), 1)
    assert rho.purity == pytest.approx(1.0)
    diag = np.diag(rho.matrix).real.reshape(4, 4)
    # Gaussian pump: weight concentrated on p_i = p_s
    assert np.trace(diag) > 0.95
    with pytest.raises(DomainError):
        theory_state(PumpSpec.of(0, 0), 1, p_range=range(3))


def test_noisy_records_reproducible():
    rho = theory_state(PumpSpec.of(0, 0), 1)
    a = simulate_records(rho, mean_counts=100, seed=5, normalize=False)
    b = simulate_records(rho, mean_counts=100, seed=5, normalize=False)
    assert [r.count for r in a] == [r.count for r in b]
    assert all(float(r.count).is_integer() for r in a)
    pair = ProjectorPair(PhotonState.parse("0"), PhotonState.parse("0"))
    assert pair.is_basis and pair.vector.shape == (16,)
