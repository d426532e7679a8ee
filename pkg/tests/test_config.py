"""Tests for settings loading and validation."""

from pathlib import Path

import pytest
from pydantic import ValidationError

from hybridlink.config import Settings


class TestSettings:
    def test_defaults(self, monkeypatch):
        monkeypatch.delenv("DEPHASING_MODEL", raising=False)
        s = Settings(_env_file=None)
        assert s.omega_q_default == 50.0
        assert s.linewidth_mhz == 20.0
        assert s.integrator_tol == 1e-9
        assert s.dephasing_model == "printed"
        assert s.fd_method == "cg"
        assert s.anchor_fidelity == 0.9
        assert s.anchor_n_bar == 1.5

    def test_environment_override(self, monkeypatch):
        monkeypatch.setenv("DEPHASING_MODEL", "Effective")
        monkeypatch.setenv("FD_METHOD", " SOR ")
        monkeypatch.setenv("LOG_LEVEL", "debug")
        s = Settings(_env_file=None)
        assert s.dephasing_model == "effective"
        assert s.fd_method == "sor"
        assert s.log_level == "DEBUG"

    def test_cache_dir_expands_home(self):
        s = Settings(_env_file=None, cache_dir="~/hl-cache")
        assert s.cache_dir == Path.home() / "hl-cache"

    def test_env_file(self, tmp_path):
        env = tmp_path / ".env"
        env.write_text("ORACLE_TOLERANCE=0.25\nDEFAULT_SEED=7\n", encoding="utf-8")
        s = Settings(_env_file=env)
        assert s.oracle_tolerance == 0.25
        assert s.default_seed == 7

    @pytest.mark.parametrize(
        "field, value",
        [
            ("fd_method", "multigrid"),
            ("dephasing_model", "fitted"),
            ("linewidth_mhz", -1.0),
            ("anchor_fidelity", 1.5),
        ],
    )
    def test_rejects_invalid_values(self, field, value):
        with pytest.raises(ValidationError):
            Settings(_env_file=None, **{field: value})

    def test_ensure_cache_dir(self, tmp_path):
        target = tmp_path / "nested" / "cache"
        s = Settings(_env_file=None, cache_dir=target)
        assert s.ensure_cache_dir() == target
        assert target.is_dir()
