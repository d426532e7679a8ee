"""Tests for the scattering probabilities."""

import math

import pytest

from hybridlink.errors import DomainError, ResonanceInfeasibleError
from hybridlink.models.schemas import DephasingModel, HybridParams, QubitState
from hybridlink.nonhermitian import element_products_closed, inverse_elements
from hybridlink.params import working_point
from hybridlink.rates import (
    dephasing_anchor,
    dephasing_probability,
    general_rates,
    inverse_raman,
    light_amplitudes,
    photon_budget,
    raman_outside,
    raman_probability,
    raman_probability_normalized,
    raman_waveguide_share,
    readout_contrast,
    single_molecule_zeta,
)


class TestClosedForms:
    def test_light_amplitudes(self, wp, dressed):
        a2, b2 = light_amplitudes(wp, dressed)
        assert a2 == pytest.approx(0.14)
        assert b2 == pytest.approx(0.06)

    def test_raman(self, wp):
        assert raman_probability(wp) == pytest.approx(0.0076963, rel=1e-4)

    def test_normalized_matches_raman(self, wp):
        normalized = raman_probability_normalized(0.2, 4.0, 0.45)
        assert normalized == pytest.approx(0.76963, rel=1e-4)
        assert raman_probability(wp) / wp.gamma_1d**2 == pytest.approx(normalized, rel=1e-10)

    def test_normalized_edges(self):
        assert raman_probability_normalized(0.0, 4.0, 0.45) == 0.0
        assert raman_probability_normalized(0.2, 0.0, 0.45) == 0.0
        with pytest.raises(DomainError):
            raman_probability_normalized(0.5, 4.0, 0.45)
        with pytest.raises(DomainError):
            raman_probability_normalized(-0.1, 4.0, 0.45)

    def test_normalized_grows_with_coupling(self):
        values = [raman_probability_normalized(0.2, y, 0.45) for y in (0.5, 1.0, 2.0, 4.0, 8.0)]
        assert values == sorted(values)
        assert values[-1] < 1 - 4 * 0.2**2

    def test_raman_outside(self, wp):
        assert raman_outside(wp) == pytest.approx(0.046178, rel=1e-4)

    def test_inverse_raman(self, wp):
        assert inverse_raman(wp) == pytest.approx(9.44e-7, rel=1e-2)

    def test_inverse_raman_falls_with_splitting(self):
        low = inverse_raman(working_point(omega_q=50.0, x=0.2))
        high = inverse_raman(working_point(omega_q=200.0, x=0.2))
        assert high < low

    def test_not_resonant(self):
        p = HybridParams(v_dd=10.0, delta_0=0.0, resonance=False)
        with pytest.raises(ResonanceInfeasibleError):
            raman_probability(p)


class TestDephasing:
    def test_printed(self, wp):
        assert dephasing_probability(wp, DephasingModel.PRINTED) == pytest.approx(0.05696, rel=1e-2)

    def test_effective(self, wp):
        assert dephasing_probability(wp, DephasingModel.EFFECTIVE) == pytest.approx(
            0.31784, rel=1e-3
        )

    def test_anchor_inconsistent(self, wp):
        anchor = dephasing_anchor(wp)
        assert anchor.relative_gap == pytest.approx(0.82, abs=0.01)
        assert not anchor.consistent

    def test_rate_sets(self, rates, effective_rates):
        assert rates.p_d == pytest.approx(0.05696, rel=1e-2)
        assert effective_rates.p_d == pytest.approx(0.31784, rel=1e-3)
        assert rates.p_r == effective_rates.p_r
        assert rates.p_a == pytest.approx(0.053874, rel=1e-4)

    def test_default_model_from_settings(self, wp, monkeypatch):
        from hybridlink.config import settings

        monkeypatch.setattr(settings, "dephasing_model", "effective")
        assert dephasing_probability(wp) == pytest.approx(0.31784, rel=1e-3)


class TestRateSet:
    def test_total_raman(self, rates):
        assert rates.p_rs == pytest.approx(0.10005, rel=1e-3)

    def test_coherence_decay(self, rates):
        assert rates.p_c == pytest.approx(rates.p_rs + rates.p_ir + rates.p_d)

    def test_frequency_shift(self, rates, wp):
        assert rates.omega_14 == pytest.approx(wp.omega_q + rates.light_shift)
        assert math.isfinite(rates.light_shift)

    def test_general_matches_closed(self, wp, dressed, rates):
        general = general_rates(wp, dressed, inverse_elements(wp, dressed))
        assert general.p_r == pytest.approx(rates.p_r, rel=0.03)
        assert general.p_rs == pytest.approx(rates.p_rs, rel=0.03)
        assert general.p_ro == pytest.approx(general.p_rs - general.p_r)
        assert general.p_ir < 1e-4

    def test_general_off_resonant_probe(self, wp, dressed):
        on = general_rates(wp, dressed, inverse_elements(wp, dressed))
        off = general_rates(wp, dressed, inverse_elements(wp, dressed, eps1=20.0))
        assert off.p_r < on.p_r

    def test_waveguide_share_from_closed_products(self, wp, dressed):
        share = raman_waveguide_share(wp, dressed, element_products_closed(wp, dressed))
        assert share == pytest.approx(raman_probability(wp), abs=1e-9)


class TestReadout:
    def test_resonant_reflection(self):
        p = working_point(g_c1=100.0)
        zeta = single_molecule_zeta(p, QubitState.DOWN)
        assert zeta.reflection(QubitState.DOWN) == pytest.approx(0.01)
        assert zeta.reflection(QubitState.UP) < 1e-6

    def test_contrast(self):
        p = working_point(g_c1=100.0)
        p_up, p_down = readout_contrast(p, 100, QubitState.DOWN)
        assert p_down == pytest.approx(1 - 0.99**100, rel=1e-6)
        assert p_up < 1e-3

    def test_lossless_molecule(self):
        p = working_point(gamma_1d=1.0, gamma_c=0.0, gamma_i=0.0)
        zeta = single_molecule_zeta(p, QubitState.DOWN)
        assert zeta.reflection(QubitState.DOWN) == pytest.approx(1.0)
        for n in (1, 5, 100):
            p_up, p_down = readout_contrast(p, n, QubitState.DOWN)
            assert p_down == pytest.approx(1.0, abs=1e-12)
            assert 0.0 < p_up < 1.0
        assert photon_budget(p) == pytest.approx(1.0)

    def test_zero_photons(self, wp):
        assert readout_contrast(wp, 0) == (0.0, 0.0)

    def test_negative_photons(self, wp):
        with pytest.raises(DomainError):
            readout_contrast(wp, -1)

    def test_photon_budget(self, wp):
        assert photon_budget(wp) == pytest.approx(100.0)
