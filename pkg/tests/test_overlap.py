import math

import pytest
from hypothesis import given, strategies as st

from spdcmodes.modes import ModeSpec
from spdcmodes.overlap import (
    PumpSpec,
    amplitude,
    conserves_oam,
    overlap_appell,
    overlap_closed_form,
    overlap_quadrature,
    paired_modes,
)

# reference values from 40-digit mpmath quadrature of the radial integral,
# waist ratio 0.2, pump waist 1
ORACLE = [
    ((1, 1, 0, 0, 2, 1), 0.00042200838380687138934),
    ((0, 0, 0, 0, 0, 0), 0.78223976549300525086),
    ((2, 0, 1, -1, 1, 1), 0.52432414718139747355),
    ((3, 2, 2, 4, 0, -2), 0.0020354464229242472594),
    ((0, 1, 3, -2, 1, 3), -0.014334583150813525669),
]


def _modes(p_p, ell_p, p_s, ell_s, p_i, ell_i, ratio=0.2):
    pump = PumpSpec.of(p_p, ell_p)
    return (pump, *paired_modes(pump, p_s, ell_s, p_i, ell_i, ratio))


@pytest.mark.parametrize("idx,ref", ORACLE)
@pytest.mark.parametrize("fn", [overlap_closed_form, overlap_quadrature])
def test_against_high_precision_reference(idx, ref, fn):
    val = fn(*_modes(*idx))
    assert val.imag == 0
    assert val.real == pytest.approx(ref, rel=1e-9)


def test_lowest_order_analytic():
    # three Gaussians: 2 pi N_p N_s N_i / (2 sigma)
    w = 0.2
    sigma = 1 + 2 / w**2
    n = math.sqrt(2 / math.pi)
    expected = 2 * math.pi * n**3 / (w * w) / (2 * sigma)
    assert overlap_closed_form(*_modes(0, 0, 0, 0, 0, 0)).real == pytest.approx(expected, rel=1e-14)


radial = st.integers(0, 3)
oam = st.integers(-4, 4)


@given(radial, st.integers(0, 2), radial, oam, radial, st.floats(0.05, 2.0))
def test_closed_form_matches_quadrature(p_p, ell_p, p_s, ell_s, p_i, ratio):
    ell_i = ell_p - ell_s
    pump, s, i = _modes(p_p, ell_p, p_s, ell_s, p_i, ell_i, ratio)
    a, b = overlap_closed_form(pump, s, i), overlap_quadrature(pump, s, i)
    assert abs(a - b) <= 1e-8 * max(abs(a), 1e-6)


@given(radial, st.integers(-2, 2), radial, oam, radial, oam)
def test_selection_rule_is_exact_zero(p_p, ell_p, p_s, ell_s, p_i, ell_i):
    pump, s, i = _modes(p_p, ell_p, p_s, ell_s, p_i, ell_i)
    if ell_s + ell_i == ell_p:
        assert conserves_oam(pump, s, i)
    else:
        assert not conserves_oam(pump, s, i)
        assert overlap_closed_form(pump, s, i) == 0
        assert overlap_quadrature(pump, s, i) == 0


@given(radial, st.integers(0, 2), radial, oam, radial)
def test_mirror_and_exchange_symmetry(p_p, ell_p, p_s, ell_s, p_i):
    ell_i = ell_p - ell_s
    pump, s, i = _modes(p_p, ell_p, p_s, ell_s, p_i, ell_i)
    c = overlap_closed_form(pump, s, i)
    mirrored = _modes(p_p, -ell_p, p_s, -ell_s, p_i, -ell_i)
    assert overlap_closed_form(*mirrored) == pytest.approx(c, rel=1e-12, abs=1e-300)
    assert overlap_closed_form(pump, i, s) == pytest.approx(c, rel=1e-12, abs=1e-300)


@given(st.integers(0, 2), radial, oam, radial, st.floats(0.1, 1.5))
def test_appell_route_for_gaussian_radial_pump(ell_p, p_s, ell_s, p_i, ratio):
    pump, s, i = _modes(0, ell_p, p_s, ell_s, p_i, ell_p - ell_s, ratio)
    assert overlap_appell(pump, s, i) == pytest.approx(overlap_closed_form(pump, s, i), rel=1e-11, abs=1e-300)


def test_appell_rejects_radial_pump():
    with pytest.raises(ValueError):
        overlap_appell(*_modes(1, 0, 0, 0, 0, 0))


def test_unequal_waists():
    pump = PumpSpec.of(1, 1, 1.3)
    s, i = ModeSpec.of(1, 2, 0.3), ModeSpec.of(2, -1, 0.5)
    assert overlap_closed_form(pump, s, i) == pytest.approx(overlap_quadrature(pump, s, i), rel=1e-9)


def test_amplitude_record():
    pump, s, i = _modes(0, 1, 0, 1, 0, 0)
    a = amplitude(pump, s, i)
    b = amplitude(pump, s, i, method="quadrature")
    assert a.probability == pytest.approx(abs(a.value) ** 2)
    assert a.value == pytest.approx(b.value, rel=1e-9)
    with pytest.raises(ValueError):
        amplitude(pump, s, i, method="nope")
