"""Tests for the command-line interface."""

import pytest
from typer.testing import CliRunner

import hybridlink.cli as cli
from hybridlink import __version__
from hybridlink.cli import app
from hybridlink.errors import SingularMatrixError
from hybridlink.scenarios import read_artifact

runner = CliRunner()


@pytest.fixture
def out_path(tmp_path):
    return tmp_path / "result.csv"


class TestRunCommand:
    def test_fig2b(self, out_path):
        result = runner.invoke(app, ["run", "fig2b", "--out", str(out_path)])
        assert result.exit_code == 0, result.output
        assert "Scenario: fig2b" in result.output
        metadata, frame = read_artifact(out_path)
        assert metadata["scenario"] == "fig2b"
        assert "created_at" in metadata
        row = frame.iloc[(frame["y"] - 4.0).abs().idxmin()]
        assert row["x=0.2"] == pytest.approx(0.76963, rel=1e-4)

    def test_reproducible(self, tmp_path):
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        for path in (first, second):
            result = runner.invoke(
                app, ["run", "fig3c", "--no-timestamp", "--seed", "7", "--out", str(path)]
            )
            assert result.exit_code == 0, result.output
        assert first.read_bytes() == second.read_bytes()

    def test_fig3c_violation(self, out_path):
        result = runner.invoke(app, ["run", "fig3c", "--nbar-max", "2", "--out", str(out_path)])
        assert result.exit_code == 0, result.output
        _, frame = read_artifact(out_path)
        assert frame["n_bar"].iloc[-1] == pytest.approx(2.0)
        assert frame["s_parameter"].iloc[-1] >= 2.3

    def test_config_file(self, tmp_path, out_path):
        config = tmp_path / "scenario.toml"
        config.write_text(
            '[scenario]\nname = "estark"\ndistances = [300.0]\n', encoding="utf-8"
        )
        result = runner.invoke(
            app, ["run", "--config", str(config), "--dipole", "2", "--out", str(out_path)]
        )
        assert result.exit_code == 0, result.output
        metadata, frame = read_artifact(out_path)
        assert metadata["scenario.dipole"] == "2"
        assert frame["g_c_mhz"].iloc[0] == pytest.approx(5.0 * 2.0 * 19.39, rel=2e-3)

    def test_set_overrides(self, out_path):
        result = runner.invoke(
            app,
            [
                "run",
                "rates",
                "--set",
                "x=0.3",
                "--set",
                "scenario.dephasing_model=effective",
                "--out",
                str(out_path),
            ],
        )
        assert result.exit_code == 0, result.output
        metadata, _ = read_artifact(out_path)
        assert float(metadata["params.v_dd"]) == pytest.approx(15.0)
        assert metadata["dephasing_model"] == "effective"

    @pytest.mark.parametrize(
        "args",
        [
            ["run", "fig9"],
            ["run"],
            ["run", "fig2b", "--set", "foo=1"],
            ["run", "fig2b", "--set", "gamma_1d=0.2"],
            ["run", "fig2b", "--set", "noequals"],
        ],
    )
    def test_configuration_errors(self, args, out_path):
        result = runner.invoke(app, args + ["--out", str(out_path)])
        assert result.exit_code == 2
        assert "Error" in result.output
        assert not out_path.exists()

    def test_bad_toml(self, tmp_path):
        config = tmp_path / "broken.toml"
        config.write_text("[scenario\nname = 'fig2b'", encoding="utf-8")
        result = runner.invoke(app, ["run", "--config", str(config)])
        assert result.exit_code == 2

    def test_numerical_failure(self, monkeypatch, out_path):
        def fail(ctx):
            raise SingularMatrixError("matrix is singular")

        monkeypatch.setattr(cli, "run_scenario", fail)
        result = runner.invoke(app, ["run", "rates", "--out", str(out_path)])
        assert result.exit_code == 3
        assert "singular" in result.output


class TestOtherCommands:
    def test_scenarios(self):
        result = runner.invoke(app, ["scenarios"])
        assert result.exit_code == 0
        assert "fig2b" in result.output
        assert "montecarlo" in result.output

    def test_config(self):
        result = runner.invoke(app, ["config"])
        assert result.exit_code == 0
        assert "Dephasing model" in result.output

    def test_version(self):
        result = runner.invoke(app, ["version"])
        assert result.exit_code == 0
        assert __version__ in result.output

    def test_clear_cache(self, monkeypatch):
        class FakeCache:
            def clear(self):
                return 2

        monkeypatch.setattr(cli, "CacheManager", FakeCache)
        result = runner.invoke(app, ["clear-cache"])
        assert result.exit_code == 0
        assert "2 file(s) removed" in result.output
