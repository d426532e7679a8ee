"""
Command-line interface for hybridlink.

Runs the named scenarios and writes their results as CSV artifacts.
"""

import logging
from pathlib import Path
from typing import Any, Optional

import typer
from pydantic import ValidationError
from rich.console import Console
from rich.markup import escape
from rich.panel import Panel
from rich.table import Table

from hybridlink import __version__
from hybridlink.cache.manager import CacheManager
from hybridlink.config import settings
from hybridlink.errors import HybridLinkError
from hybridlink.scenarios.configfile import (
    ScenarioConfig,
    apply_assignments,
    load_config,
    with_scenario_options,
)
from hybridlink.scenarios.csvout import write_artifact
from hybridlink.scenarios.runner import (
    ScenarioOutput,
    artifact_metadata,
    build_context,
    default_output_path,
    describe_scenarios,
    run_scenario,
)

# Initialize CLI app
app = typer.Typer(
    name="hybridlink",
    help="Molecule / superconducting-qubit hybrid simulator",
    add_completion=False,
)

console = Console()

# Configure logging
logging.basicConfig(
    level=getattr(logging, settings.log_level, logging.INFO),
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
)
logger = logging.getLogger(__name__)


def _format(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _print_summary(name: str, path: Path, output: ScenarioOutput) -> None:
    """Print the output path and headline numbers of a run."""
    lines = [
        f"[bold]Output:[/bold] {escape(str(path))}",
        f"[bold]Rows:[/bold] {len(output.frame)}",
    ]
    for key, value in output.summary.items():
        lines.append(f"[bold]{escape(key)}:[/bold] {escape(_format(value))}")
    console.print()
    console.print(Panel("\n".join(lines), title=f"Scenario: {name}", border_style="green"))


@app.command()
def run(
    scenario: Optional[str] = typer.Argument(
        None,
        help="Scenario to run (see 'hybridlink scenarios'); may come from the config file",
    ),
    config_file: Optional[Path] = typer.Option(
        None,
        "--config",
        "-c",
        help="TOML scenario file with [params], [geometry] and [scenario] sections",
    ),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="CSV output path"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Random seed"),
    tol: Optional[float] = typer.Option(None, "--tol", help="Integrator tolerance"),
    no_timestamp: bool = typer.Option(
        False,
        "--no-timestamp",
        help="Leave the created_at line out of the preamble",
    ),
    no_cache: bool = typer.Option(False, "--no-cache", help="Ignore cached field solves"),
    nbar_max: Optional[float] = typer.Option(
        None, "--nbar-max", help="Largest mean photon number of a sweep"
    ),
    n_bar: Optional[float] = typer.Option(None, "--n-bar", help="Single mean photon number"),
    n_trials: Optional[int] = typer.Option(None, "--n-trials", help="Monte Carlo trials"),
    heights: Optional[list[float]] = typer.Option(
        None, "--H", help="Waveguide height in nm (repeatable)"
    ),
    distances: Optional[list[float]] = typer.Option(
        None, "--distance", help="Island to waveguide distance in nm (repeatable)"
    ),
    spacing: Optional[float] = typer.Option(None, "--spacing", help="Grid spacing in nm"),
    dipole: Optional[float] = typer.Option(
        None, "--dipole", help="Differential dipole moment in Debye"
    ),
    assignments: Optional[list[str]] = typer.Option(
        None,
        "--set",
        help="Override KEY=VALUE; KEY is a parameter or geometry.<key> / scenario.<key>",
    ),
) -> None:
    """
    Run a scenario and write its CSV artifact.

    Example:
        hybridlink run fig2b --out fig2b.csv
        hybridlink run fig3c --nbar-max 4 --no-timestamp
        hybridlink run figS1b --H 200 --H 400 --set geometry.molecule_position=center
    """
    try:
        config = load_config(config_file) if config_file is not None else ScenarioConfig()
        config = apply_assignments(config, assignments or [])
        config = with_scenario_options(
            config,
            out=out,
            seed=seed,
            tol=tol,
            nbar_max=nbar_max,
            n_bar=n_bar,
            n_trials=n_trials,
            heights=heights or None,
            distances=distances or None,
            spacing=spacing,
            dipole=dipole,
        )
        ctx = build_context(scenario, config, use_cache=not no_cache)
        output = run_scenario(ctx)
        path = default_output_path(ctx)
        write_artifact(output.frame, path, artifact_metadata(ctx), timestamp=not no_timestamp)
    except HybridLinkError as e:
        console.print(f"[red]Error: {escape(str(e))}[/red]")
        logger.debug("Scenario failed", exc_info=True)
        raise typer.Exit(e.exit_code)
    except ValidationError as e:
        console.print(f"[red]Error: invalid input\n{escape(str(e))}[/red]")
        raise typer.Exit(2)

    _print_summary(ctx.name, path, output)


@app.command()
def scenarios() -> None:
    """List the available scenarios."""
    table = Table(title="hybridlink scenarios")
    table.add_column("Scenario", style="cyan")
    table.add_column("Description", style="green")
    for name, description in describe_scenarios().items():
        table.add_row(name, description)
    console.print(table)


@app.command()
def clear_cache() -> None:
    """Remove cached field solves."""
    cache = CacheManager()
    count = cache.clear()
    console.print(f"[green]Cache cleared. {count} file(s) removed.[/green]")


@app.command()
def config() -> None:
    """Show the current configuration."""
    table = Table(title="hybridlink configuration")
    table.add_column("Setting", style="cyan")
    table.add_column("Value", style="green")

    table.add_row("Qubit splitting (gamma)", _format(settings.omega_q_default))
    table.add_row("Linewidth (MHz)", _format(settings.linewidth_mhz))
    table.add_row("Integrator tolerance", _format(settings.integrator_tol))
    table.add_row("Singular threshold", _format(settings.singular_threshold))
    table.add_row("Oracle tolerance", _format(settings.oracle_tolerance))
    table.add_row("Dephasing model", settings.dephasing_model)
    table.add_row(
        "Fidelity anchor",
        f"F={settings.anchor_fidelity:g} at n_bar={settings.anchor_n_bar:g}",
    )
    table.add_row("Monte Carlo block size", str(settings.mc_block_size))
    table.add_row("Default seed", str(settings.default_seed))
    table.add_row("Stark coefficient (MHz per kV/m)", _format(settings.stark_mhz_per_kv_m))
    table.add_row("Grid spacing (nm)", _format(settings.fd_spacing_nm))
    table.add_row("Laplace solver", settings.fd_method)
    table.add_row("Cache Enabled", str(settings.cache_enabled))
    table.add_row("Cache Dir", str(settings.cache_dir))
    table.add_row("Log Level", settings.log_level)

    console.print(table)


@app.command()
def version() -> None:
    """Show the hybridlink version."""
    console.print(f"hybridlink v{__version__}")


@app.callback()
def main() -> None:
    """
    hybridlink - closed forms and numerical oracles for molecule-qubit hybrids.
    """
    pass


if __name__ == "__main__":
    app()
