"""Tests for the JSON presets."""

import pytest

from hybridlink.presets import (
    clear_cache,
    get_available_presets,
    load_preset,
    scenario_defaults,
)
from hybridlink.scenarios.runner import SCENARIOS


class TestPresets:
    def test_available(self):
        names = get_available_presets()
        assert "working_point" in names
        assert "scenarios" in names

    def test_working_point_content(self):
        preset = load_preset("working_point")
        params = preset["params"]
        assert params["gamma_1d"] + params["gamma_c"] + params["gamma_i"] == pytest.approx(1.0)
        assert params["x"] == 0.2
        assert preset["geometry"]["distance"] == 125.0

    def test_name_normalization(self):
        assert load_preset("Working-Point.json") == load_preset("working_point")

    def test_missing_preset(self):
        with pytest.raises(FileNotFoundError):
            load_preset("no_such_preset")

    def test_every_scenario_has_defaults(self):
        presets = load_preset("scenarios")
        for name in SCENARIOS:
            assert name in presets
            assert presets[name]["description"]

    def test_scenario_defaults_strip_description(self):
        defaults = scenario_defaults("fig2b")
        assert "description" not in defaults
        assert defaults["x_values"] == [0.05, 0.1, 0.2, 0.3, 0.4]
        assert scenario_defaults("unknown") == {}

    def test_defaults_are_copies(self):
        scenario_defaults("fig3b")["nbar_max"] = 99.0
        assert scenario_defaults("fig3b")["nbar_max"] == 4.0

    def test_clear_cache(self):
        load_preset("scenarios")
        clear_cache()
        assert load_preset.cache_info().currsize == 0
