"""Presets module for working points and scenario defaults."""

from hybridlink.presets.loader import (
    clear_cache,
    get_available_presets,
    load_preset,
    scenario_defaults,
)

__all__ = ["clear_cache", "get_available_presets", "load_preset", "scenario_defaults"]
