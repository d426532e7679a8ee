"""Tests for scenario files, CSV artifacts and the scenario runner."""

import math
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

import hybridlink.scenarios.runner as runner_module
from hybridlink.config import settings
from hybridlink.errors import (
    ConfigError,
    ConfigParseError,
    DomainError,
    NonFiniteOutputError,
    RateSumMismatchError,
    ScenarioUnknownError,
)
from hybridlink.models.schemas import DephasingModel, ProtocolKind
from hybridlink.scenarios import (
    SCENARIOS,
    ScenarioConfig,
    apply_assignments,
    artifact_metadata,
    build_context,
    default_output_path,
    describe_scenarios,
    load_config,
    parse_config_text,
    parse_value,
    read_artifact,
    render_artifact,
    resolve_scenario,
    run_scenario,
    with_scenario_options,
    write_artifact,
)

SCENARIO_TOML = """
[params]
x = 0.2
gamma_1d = 0.1
t2_ns = 500.0

[geometry]
distance = 200.0
molecule_position = "center"

[scenario]
name = "fig3b"
seed = 11

[scenario.sweep]
variable = "n_bar"
start = 0.0
stop = 2.0
points = 5
"""


def _run(name, **options):
    config = with_scenario_options(ScenarioConfig(), **options)
    ctx = build_context(name, config)
    return ctx, run_scenario(ctx)


class TestConfigFile:
    def test_parse(self):
        config = parse_config_text(SCENARIO_TOML)
        assert config.params["x"] == 0.2
        assert config.geometry["molecule_position"] == "center"
        assert config.scenario.name == "fig3b"
        assert config.scenario.seed == 11
        np.testing.assert_allclose(config.scenario.sweep.values(), [0.0, 0.5, 1.0, 1.5, 2.0])

    def test_load(self, tmp_path):
        path = tmp_path / "scenario.toml"
        path.write_text(SCENARIO_TOML, encoding="utf-8")
        assert load_config(path).scenario.name == "fig3b"

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigParseError):
            load_config(tmp_path / "missing.toml")

    @pytest.mark.parametrize(
        "text",
        [
            "[params\nx = 0.2",
            "[plots]\nx = 1",
            "[scenario]\ncolour = 'red'",
            "[scenario.sweep]\nvariable = 'y'\nstart = 0\nstop = 1\npoints = 1",
            "[scenario]\nseed = -1",
        ],
    )
    def test_invalid(self, text):
        with pytest.raises(ConfigParseError):
            parse_config_text(text)

    def test_parse_value(self):
        assert parse_value("0.2") == 0.2
        assert parse_value("3") == 3
        assert parse_value("true") is True
        assert parse_value("[1.0, 2.0]") == [1.0, 2.0]
        assert parse_value("center") == "center"

    def test_assignments(self):
        config = apply_assignments(
            ScenarioConfig(),
            ["gamma_1d=0.2", "params.gamma_c=0.4", "geometry.distance=300", "scenario.seed=5"],
        )
        assert config.params == {"gamma_1d": 0.2, "gamma_c": 0.4}
        assert config.geometry == {"distance": 300}
        assert config.scenario.seed == 5

    @pytest.mark.parametrize("item", ["gamma_1d", "=0.2", "scenario.colour=red"])
    def test_bad_assignment(self, item):
        with pytest.raises(ConfigParseError):
            apply_assignments(ScenarioConfig(), [item])

    def test_scenario_options(self):
        config = with_scenario_options(ScenarioConfig(), seed=4, tol=None)
        assert config.scenario.seed == 4
        assert config.scenario.tol is None
        with pytest.raises(ConfigParseError):
            with_scenario_options(config, points=1)


class TestArtifact:
    def test_render(self):
        frame = pd.DataFrame({"a": [0.1, 1 / 3], "b": [1, 2]})
        text = render_artifact(frame, {"scenario": "demo", "seed": 3, "tol": 1e-9}, timestamp=False)
        assert text == (
            "# artifact_version = 1\n"
            "# scenario = demo\n"
            "# seed = 3\n"
            "# tol = 1e-09\n"
            "a,b\n"
            "0.1,1\n"
            "0.333333333333,2\n"
        )

    def test_timestamp(self):
        text = render_artifact(pd.DataFrame({"a": [1.0]}), {}, timestamp=True)
        assert "# created_at = " in text

    def test_enum_metadata(self):
        text = render_artifact(pd.DataFrame({"a": [1.0]}), {"model": DephasingModel.EFFECTIVE}, False)
        assert "# model = effective\n" in text

    def test_non_finite(self):
        frame = pd.DataFrame({"a": [1.0, math.nan], "b": [1.0, 2.0], "label": ["x", "y"]})
        with pytest.raises(NonFiniteOutputError, match="a"):
            render_artifact(frame, {})

    def test_write_and_read(self, tmp_path):
        frame = pd.DataFrame({"n_bar": [0.0, 1.5], "fidelity": [1.0, 0.95]})
        path = tmp_path / "nested" / "out.csv"
        text = write_artifact(frame, path, {"scenario": "fig3b", "seed": 7}, timestamp=False)
        assert path.read_text(encoding="utf-8") == text
        metadata, table = read_artifact(path)
        assert metadata == {"artifact_version": "1", "scenario": "fig3b", "seed": "7"}
        pd.testing.assert_frame_equal(table, frame)


class TestRunner:
    def test_resolve(self):
        assert resolve_scenario("FIG2B") == "fig2b"
        assert resolve_scenario("figs1b") == "figS1b"
        with pytest.raises(ScenarioUnknownError):
            resolve_scenario("fig9")
        with pytest.raises(ScenarioUnknownError):
            resolve_scenario(None)

    def test_describe(self):
        descriptions = describe_scenarios()
        assert set(descriptions) == set(SCENARIOS)
        assert all(descriptions.values())

    def test_context_defaults(self):
        ctx = build_context("fig3b")
        assert ctx.option("nbar_max") == 4.0
        assert ctx.seed == settings.default_seed
        assert ctx.tol == settings.integrator_tol
        assert ctx.model is DephasingModel.PRINTED
        assert ctx.params.x == pytest.approx(0.2)
        assert default_output_path(ctx) == Path("fig3b.csv")

    def test_context_from_file(self):
        config = parse_config_text(SCENARIO_TOML)
        ctx = build_context(None, config)
        assert ctx.name == "fig3b"
        assert ctx.seed == 11
        assert ctx.geometry.distance == 200.0
        assert ctx.params.t2 == pytest.approx(500.0 * 2 * math.pi * 0.02)

    def test_single_n_bar(self):
        config = with_scenario_options(ScenarioConfig(), n_bar=1.5, dephasing_model="effective")
        ctx = build_context("bell", config)
        assert ctx.option("n_bar_values") == [1.5]
        assert ctx.model is DephasingModel.EFFECTIVE

    def test_invalid_params(self):
        with pytest.raises(RateSumMismatchError):
            build_context("rates", apply_assignments(ScenarioConfig(), ["gamma_1d=0.2"]))

    def test_metadata(self):
        ctx = build_context("fig2b")
        meta = artifact_metadata(ctx)
        assert meta["scenario"] == "fig2b"
        assert meta["params.gamma_1d"] == 0.1
        assert meta["geometry.distance"] == 125.0
        assert meta["scenario.points"] == 101
        assert "scenario.description" not in meta

    def test_fig2b(self):
        _, output = _run("fig2b")
        frame = output.frame
        assert list(frame.columns) == ["y", "x=0.05", "x=0.1", "x=0.2", "x=0.3", "x=0.4"]
        row = frame.iloc[(frame["y"] - 4.0).abs().idxmin()]
        assert row["x=0.2"] == pytest.approx(0.76963, rel=1e-4)

    def test_fig3b_sweep(self):
        config = parse_config_text(SCENARIO_TOML)
        output = run_scenario(build_context(None, config))
        assert len(output.frame) == 5
        assert output.frame["fidelity"].iloc[0] == 1.0
        assert (output.frame["fidelity"].diff().dropna() < 0).all()

    def test_sweep_mismatch(self):
        config = apply_assignments(
            ScenarioConfig(),
            ["scenario.sweep={variable='y', start=0.0, stop=1.0, points=3}"],
        )
        with pytest.raises(ConfigError):
            run_scenario(build_context("fig3b", config))

    def test_fig3c(self):
        _, output = _run("fig3c")
        assert output.summary["S(n_bar=2)"] == pytest.approx(2.605, abs=2e-3)
        assert output.frame["s_parameter"].iloc[0] == pytest.approx(2 * math.sqrt(2))

    def test_figs4(self):
        _, output = _run("figS4", points=3)
        assert list(output.frame.columns) == [
            "x",
            "p_suc_nbar=0.5",
            "p_suc_nbar=1",
            "p_suc_nbar=1.5",
            "p_suc_nbar=2",
        ]
        assert len(output.frame) == 3

    def test_figs1b(self, monkeypatch):
        calls = []

        def fake_profile(g, spacing, use_cache=True):
            calls.append((g.waveguide_height, g.distance, spacing))
            return {"near-edge": 3.0, "center": 2.0, "far-edge": 1.0}

        monkeypatch.setattr(runner_module, "field_profile", fake_profile)
        _, output = _run("figS1b", distances=[125.0, 200.0])
        assert output.frame.shape == (2, 7)
        assert "E_kV_m_H400_center" in output.frame.columns
        assert len(calls) == 4
        assert all(spacing == 15.0 for _, _, spacing in calls)

    def test_rates(self):
        _, output = _run("rates")
        values = dict(zip(output.frame["quantity"], output.frame["value"], strict=True))
        assert values["p_r"] == pytest.approx(0.0076963, rel=1e-4)
        assert values["p_d_effective"] == pytest.approx(0.31784, rel=1e-3)
        assert values["photon_budget"] == pytest.approx(100.0)
        assert values["p23_1_deviation"] < settings.oracle_tolerance

    def test_evolve(self):
        _, output = _run("evolve", time=10.0, points=5)
        frame = output.frame
        assert len(frame) == 5
        np.testing.assert_allclose(frame["rho44_numeric"], frame["rho44_closed"], atol=1e-6)
        np.testing.assert_allclose(frame["abs_rho14_numeric"], frame["abs_rho14_closed"], atol=1e-6)
        assert (frame["min_eigenvalue_numeric"] > -1e-8).all()

    def test_montecarlo(self):
        ctx, output = _run("montecarlo", n_trials=50_000, n_bar=1.5, seed=3)
        row = output.frame.iloc[0]
        assert row["n_trials"] == 50_000
        assert row["n_clicks"] > 0
        assert abs(row["fidelity_mc"] - row["fidelity_closed"]) < 5 * row["fidelity_mc_stderr"]
        assert output.summary["protocol"] == ProtocolKind.BELL.value

    def test_montecarlo_no_clicks(self):
        with pytest.raises(DomainError):
            _run("montecarlo", n_trials=0)

    def test_estark(self):
        _, output = _run("estark", distances=[300.0, 500.0])
        np.testing.assert_allclose(output.frame["field_kv_m"], [19.39, 6.98], rtol=2e-3)
        assert output.frame["g_c_mhz"].iloc[0] == pytest.approx(5.0 * 19.39, rel=2e-3)

    def test_chsh(self):
        _, output = _run("chsh")
        frame = output.frame
        assert frame["input"].iloc[0] == "single-photon"
        assert frame["s_parameter"].iloc[0] == pytest.approx(2 * math.sqrt(2))
        assert len(frame) == 5

    def test_bell(self):
        _, output = _run("bell")
        coherent = output.frame[output.frame["input"] == "coherent"]
        assert len(coherent) == 4
        assert (coherent["t2_penalty"] > 0).all()
        assert output.frame["success_prob"].iloc[0] == pytest.approx(0.00384815, rel=1e-4)
