"""Shared fixtures: the reference working point and an isolated solve cache."""

import numpy as np
import pytest

import hybridlink.cache.manager as cache_manager
from hybridlink.cache.manager import CacheManager
from hybridlink.dressed import build_dressed
from hybridlink.models.schemas import DephasingModel, DressedBasis, HybridParams, RateSet
from hybridlink.params import working_point
from hybridlink.rates import compute_rates


@pytest.fixture(autouse=True)
def isolated_cache(tmp_path, monkeypatch):
    """Keep field solves out of the user's cache directory."""
    manager = CacheManager(cache_dir=tmp_path / "cache", enabled=True)
    monkeypatch.setattr(cache_manager, "_cache_manager", manager)
    return manager


@pytest.fixture
def wp() -> HybridParams:
    """gamma_1D = 0.1, gamma_c = gamma_i = 0.45, g_c = +-2, x = 0.2, omega_q = 50."""
    return working_point()


@pytest.fixture
def dressed(wp) -> DressedBasis:
    return build_dressed(wp)


@pytest.fixture
def rates(wp) -> RateSet:
    return compute_rates(wp, DephasingModel.PRINTED)


@pytest.fixture
def effective_rates(wp) -> RateSet:
    return compute_rates(wp, DephasingModel.EFFECTIVE)


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator for the randomized property checks."""
    return np.random.default_rng(20240611)
