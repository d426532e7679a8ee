"""Scenarios module: configuration files, runners and CSV artifacts."""

from hybridlink.scenarios.configfile import (
    ScenarioConfig,
    ScenarioSection,
    SweepSpec,
    apply_assignments,
    load_config,
    parse_config_text,
    parse_value,
    with_scenario_options,
)
from hybridlink.scenarios.csvout import read_artifact, render_artifact, write_artifact
from hybridlink.scenarios.runner import (
    SCENARIOS,
    ScenarioContext,
    ScenarioOutput,
    artifact_metadata,
    build_context,
    default_output_path,
    describe_scenarios,
    resolve_scenario,
    run_scenario,
)

__all__ = [
    "SCENARIOS",
    "ScenarioConfig",
    "ScenarioContext",
    "ScenarioOutput",
    "ScenarioSection",
    "SweepSpec",
    "apply_assignments",
    "artifact_metadata",
    "build_context",
    "default_output_path",
    "describe_scenarios",
    "load_config",
    "parse_config_text",
    "parse_value",
    "read_artifact",
    "render_artifact",
    "resolve_scenario",
    "run_scenario",
    "with_scenario_options",
    "write_artifact",
]
