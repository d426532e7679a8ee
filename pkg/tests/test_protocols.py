"""Tests for the Bell and CHSH closed forms."""

import logging
import math

import numpy as np
import pytest

from hybridlink.errors import DomainError
from hybridlink.evolution import evolve_closed
from hybridlink.models.schemas import GroundState
from hybridlink.params import flux_for_n_bar
from hybridlink.protocols import (
    CHSH_SETTINGS,
    BellProtocol,
    ChshProtocol,
    bell_coherent,
    bell_single_photon,
    chsh_combination,
    chsh_single_photon,
    decay_integral,
    joint_probabilities,
    make_protocol,
)
from hybridlink.protocols.chsh import TSIRELSON, _note_correlator_normalization, correlator


class TestDecayIntegral:
    def test_zero_rate(self):
        assert decay_integral(0.0, 2.5) == 2.5

    def test_continuity(self):
        assert decay_integral(1e-12, 2.0) == pytest.approx(decay_integral(1e-6, 2.0), rel=1e-5)

    def test_value(self):
        assert decay_integral(0.5, 2.0) == pytest.approx(2 * (1 - math.exp(-1.0)))

    def test_negative_rate(self):
        assert decay_integral(-0.5, 2.0) == pytest.approx(2 * (math.exp(1.0) - 1))


class TestBell:
    def test_single_photon(self, wp, rates):
        result = bell_single_photon(wp, rates)
        assert result.success_prob == pytest.approx(0.00384815, rel=1e-4)
        assert result.fidelity == 1.0

    def test_success_probability(self, wp, rates):
        assert BellProtocol(wp, rates).success_probability(1.5) == pytest.approx(0.005657, rel=1e-3)

    def test_fidelity_printed(self, wp, rates):
        result = bell_coherent(wp, 1.5, rates=rates)
        assert result.fidelity == pytest.approx(0.950, abs=2e-3)
        assert result.t2_penalty is None

    def test_fidelity_effective(self, wp, effective_rates):
        protocol = BellProtocol(wp, effective_rates)
        assert protocol.fidelity(1.5) == pytest.approx(0.90711, rel=1e-3)
        assert protocol.fidelity_first_order(1.5) == pytest.approx(0.9, abs=1e-12)

    def test_first_order_small_n_bar(self, wp, rates):
        protocol = BellProtocol(wp, rates)
        assert abs(protocol.fidelity(0.01) - protocol.fidelity_first_order(0.01)) < 1e-5

    def test_zero_photons(self, wp, rates):
        result = bell_coherent(wp, 0.0, with_t2=True, rates=rates)
        assert result.fidelity == 1.0
        assert result.success_prob == 0.0

    def test_fidelity_decreases(self, wp, rates):
        protocol = BellProtocol(wp, rates)
        values = [protocol.fidelity(n) for n in (0.1, 0.5, 1.0, 2.0, 4.0)]
        assert values == sorted(values, reverse=True)

    def test_t2_penalty(self, wp, rates):
        # T = 2 pi, T2 = 20 pi, so (T/T2)^2 = 0.01
        assert (wp.pulse_duration / wp.t2) ** 2 == pytest.approx(0.01)
        result = bell_coherent(wp, 1.5, with_t2=True, rates=rates)
        assert 0.01 / 3 <= result.t2_penalty_first_order <= 0.01
        assert result.t2_penalty_first_order == pytest.approx(0.003367, rel=0.02)
        assert 0.85 * result.t2_penalty_first_order < result.t2_penalty
        assert result.t2_penalty < result.t2_penalty_first_order
        plain = bell_coherent(wp, 1.5, rates=rates)
        assert result.fidelity == pytest.approx(plain.fidelity - result.t2_penalty)

    def test_t2_missing(self, wp, rates):
        p = wp.model_copy(update={"t2": None})
        with pytest.raises(DomainError):
            bell_coherent(p, 1.5, with_t2=True, rates=rates)

    def test_negative_n_bar(self, wp, rates):
        with pytest.raises(DomainError):
            BellProtocol(wp, rates).fidelity(-1.0)


class TestChsh:
    def test_joint_probabilities(self):
        probs = joint_probabilities(math.pi / 2, 0.0)
        assert sum(probs.values()) == pytest.approx(1.0)
        assert probs[(1, 1)] == pytest.approx(0.5)
        assert probs[(1, -1)] == pytest.approx(0.0)

    def test_combination(self):
        correlators = [correlator(joint_probabilities(psi, phi)) for psi, phi, _ in CHSH_SETTINGS]
        assert chsh_combination(correlators) == pytest.approx(TSIRELSON)

    def test_single_photon(self, wp, rates):
        result = chsh_single_photon(wp, rates)
        assert result.s_parameter == pytest.approx(2 * math.sqrt(2))
        assert result.success_prob == pytest.approx(2 * 0.5 * rates.p_r / (1 + rates.p_r))

    def test_coherent(self, wp, rates):
        protocol = ChshProtocol(wp, rates)
        assert protocol.s_value(2.0) == pytest.approx(2.605, abs=2e-3)
        assert protocol.success_probability(2.0) == pytest.approx(0.01488, rel=1e-3)

    def test_zero_photons(self, wp, rates):
        result = ChshProtocol(wp, rates).coherent(0.0)
        assert result.s_parameter == pytest.approx(TSIRELSON)
        assert result.success_prob == 0.0

    def test_violation_fades(self, wp, rates):
        protocol = ChshProtocol(wp, rates)
        values = [protocol.s_value(n) for n in (0.5, 1.0, 2.0, 4.0, 8.0)]
        assert values == sorted(values, reverse=True)
        assert values[2] > 2.0

    def test_make_protocol(self, wp, rates):
        assert isinstance(make_protocol("chsh", wp, rates), ChshProtocol)
        assert isinstance(make_protocol("bell", wp, rates), BellProtocol)
        with pytest.raises(ValueError):
            make_protocol("ghz", wp, rates)


class TestConditionalValues:
    CLICKS = np.array([0.0, 0.3, 0.9, 1.4, 1.5])

    def test_bell_follows_evolution(self, wp, rates):
        protocol = BellProtocol(wp, rates)
        values = protocol.conditional_values(self.CLICKS, 1.5, with_t2=True)
        alpha2 = flux_for_n_bar(1.5, wp.pulse_duration)
        prefactor = 0.5 * math.exp(-0.75 * rates.p_a)
        for s, fidelity in zip(self.CLICKS, values["fidelity"], strict=True):
            state = evolve_closed(
                GroundState.superposition(),
                protocol.post_click_rates(),
                0.5 * alpha2,
                (1.5 - s) / alpha2,
                wp.t2,
            )
            assert fidelity == pytest.approx(prefactor * (1 + 4 * abs(state.rho14) ** 2))

    def test_bell_dephasing_only(self, wp, rates):
        values = BellProtocol(wp, rates).conditional_values(self.CLICKS, 1.5, with_t2=True)
        prefactor = 0.5 * math.exp(-0.75 * rates.p_a)
        without_t2 = prefactor * (1 + np.exp(-0.5 * rates.p_d * (1.5 - self.CLICKS)))
        np.testing.assert_allclose(values["fidelity"] + values["t2_penalty"], without_t2)
        assert values["t2_penalty"][-1] == pytest.approx(0.0, abs=1e-15)

    def test_chsh_follows_evolution(self, wp, rates):
        protocol = ChshProtocol(wp, rates)
        chi2 = protocol.chi2
        q = 1 - chi2
        a, p_r = rates.p_a, rates.p_r
        alpha2 = flux_for_n_bar(1.5, wp.pulse_duration)
        tau = (1.5 - self.CLICKS) / alpha2
        raman = np.exp(-a * q * self.CLICKS)
        envelope = (
            2
            * math.sqrt(chi2 * q * p_r)
            * raman
            * np.exp(-0.5 * (a + rates.p_d) * q * (1.5 - self.CLICKS) - (tau / wp.t2) ** 2)
            / (chi2 + p_r * q * raman)
        )
        values = protocol.conditional_values(self.CLICKS, 1.5, with_t2=True)
        np.testing.assert_allclose(values["s_parameter"], TSIRELSON * envelope)

    def test_chsh_ignores_inverse_raman(self, wp, rates):
        shifted = rates.model_copy(update={"p_ir": 0.05})
        a = ChshProtocol(wp, rates).conditional_values(self.CLICKS, 1.0)
        b = ChshProtocol(wp, shifted).conditional_values(self.CLICKS, 1.0)
        np.testing.assert_allclose(a["s_parameter"], b["s_parameter"])

    def test_click_at_pulse_end(self, wp, rates):
        # float round-off can place a sampled click just past n_bar
        late = np.array([2.0 * (1 + 1e-15)])
        s = ChshProtocol(wp, rates).conditional_values(late, 2.0)["s_parameter"]
        f = BellProtocol(wp, rates).conditional_values(late, 2.0)["fidelity"]
        assert np.all(np.isfinite(s))
        assert f[0] == pytest.approx(math.exp(-rates.p_a))

    def test_normalization_note_is_a_warning(self, wp, rates, caplog):
        _note_correlator_normalization.cache_clear()
        with caplog.at_level(logging.WARNING, logger="hybridlink.protocols.chsh"):
            ChshProtocol(wp, rates).conditional_values(self.CLICKS, 1.0)
            ChshProtocol(wp, rates).conditional_values(self.CLICKS, 2.0)
        records = [r for r in caplog.records if r.name == "hybridlink.protocols.chsh"]
        assert [r.levelno for r in records] == [logging.WARNING]
        assert "sqrt(P_R)" in records[0].getMessage()
