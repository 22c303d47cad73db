import numpy as np
import pytest

from spdcmodes.correlations import (
    CorrelationMatrix,
    conservation_profile,
    has_lowest_order_dip,
    hygg_amplitude,
    oam_correlation_matrix_hygg,
    oam_correlation_matrix_lg,
    p_correlation_matrix,
)
from spdcmodes.overlap import PumpSpec


def test_p_matrix_normalized_and_indexed():
    m = p_correlation_matrix(PumpSpec.of(0, 0), 0)
    assert m.values.shape == (4, 4)
    assert m.values.max() == pytest.approx(1.0)
    assert m.axis_s == [0, 1, 2, 3]
    raw = p_correlation_matrix(PumpSpec.of(0, 0), 0, normalize=False)
    assert np.allclose(raw.normalized().values, m.values)
    assert raw.normalization == "raw"


def test_closed_and_quadrature_matrices_agree():
    pump = PumpSpec.of(2, 1)
    a = p_correlation_matrix(pump, 2, normalize=False)
    b = p_correlation_matrix(pump, 2, normalize=False, method="quadrature")
    assert np.allclose(a.values, b.values, rtol=1e-8, atol=0)


def test_off_diagonal_weight_grows_with_pump_order():
    mass = [p_correlation_matrix(PumpSpec.of(pp, 0), 0).off_diagonal_mass() for pp in range(4)]
    assert all(b > a for a, b in zip(mass, mass[1:]))
    assert p_correlation_matrix(PumpSpec.of(0, 0), 0).is_diagonal_dominant()
    assert p_correlation_matrix(PumpSpec.of(1, 0), 0).is_diagonal_dominant()


def test_unequal_oam_split_is_asymmetric():
    m = p_correlation_matrix(PumpSpec.of(1, 1), 2)
    assert np.abs(m.values - m.values.T).max() > 0.1


def test_lg_oam_matrix_supported_on_conservation_line():
    ells = list(range(-3, 4))
    m = oam_correlation_matrix_lg(PumpSpec.of(0, 1), ells)
    for a, ls in enumerate(ells):
        for b, li in enumerate(ells):
            if ls + li != 1:
                assert m.values[a, b] == 0


def test_hygg_dip_for_unit_pump_oam():
    m = oam_correlation_matrix_hygg(PumpSpec.of(0, 1), range(-4, 6))
    assert has_lowest_order_dip(m, 1)
    prof = dict(conservation_profile(m, 1))
    assert prof[0] == pytest.approx(prof[1])
    assert prof[0] < prof[2] < prof[3]


def test_hygg_gaussian_pump_peaks_at_zero():
    m = oam_correlation_matrix_hygg(PumpSpec.of(0, 0), range(-3, 4))
    prof = conservation_profile(m, 0)
    assert max(prof, key=lambda t: t[1])[0] == 0
    assert not has_lowest_order_dip(m, 0)


def test_hygg_amplitude_zero_off_line():
    assert hygg_amplitude(PumpSpec.of(0, 1), 1, 1, 0.1) == 0.0


def test_matrix_validation():
    with pytest.raises(ValueError):
        CorrelationMatrix([0, 1], [0], np.zeros((2, 2)))
    with pytest.raises(ValueError):
        CorrelationMatrix([0], [0], [[-1.0]])
    with pytest.raises(ValueError):
        p_correlation_matrix(PumpSpec.of(0, 0), 0, p_range=[])
    d = CorrelationMatrix([0], [0], [[2.0]], "raw", "p").to_dict()
    assert d["values"] == [[2.0]] and d["kind"] == "p"
