"""
Preset loader for working points and scenario defaults.

Loads the JSON preset files shipped next to this module.
"""

import json
from functools import lru_cache
from pathlib import Path
from typing import Any

# Base directory for preset files
PRESETS_DIR = Path(__file__).parent


@lru_cache(maxsize=10)
def load_preset(name: str) -> dict[str, Any]:
    """
    Load a preset by name.

    Args:
        name: Preset name (e.g., "working_point", "scenarios"), with or
            without the .json extension.

    Returns:
        Dictionary with the preset content.

    Raises:
        FileNotFoundError: If the preset file does not exist.
        ValueError: If the preset file is invalid JSON.
    """
    stem = name.lower().removesuffix(".json").replace("-", "_")
    preset_path = PRESETS_DIR / f"{stem}.json"
    if not preset_path.exists():
        raise FileNotFoundError(f"Preset not found: {name} (searched in {PRESETS_DIR})")

    try:
        return json.loads(preset_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ValueError(f"Invalid JSON in preset file {preset_path}: {e}") from e


def scenario_defaults(scenario: str) -> dict[str, Any]:
    """
    Get the default settings of one scenario.

    Args:
        scenario: Scenario name as registered in scenarios.json.

    Returns:
        Copy of the scenario defaults without the description entry.
    """
    entry = load_preset("scenarios").get(scenario)
    if entry is None:
        return {}
    return {k: v for k, v in entry.items() if k != "description"}


def get_available_presets() -> list[str]:
    """
    Get list of available presets.

    Returns:
        Sorted list of preset names.
    """
    return sorted(p.stem for p in PRESETS_DIR.glob("*.json"))


def clear_cache() -> None:
    """Clear cached presets."""
    load_preset.cache_clear()
