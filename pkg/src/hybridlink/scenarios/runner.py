"""
Scenario runner.

Each scenario turns a resolved context (parameters, geometry, options) into a
result table plus a few headline numbers. Scenarios register themselves by name
in SCENARIOS.
"""

import logging
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np
import numpy.typing as npt
import pandas as pd

from hybridlink.config import settings
from hybridlink.dressed import build_dressed
from hybridlink.electrostatics.field import coupling_from_field, field_point_charge, field_profile
from hybridlink.errors import ConfigError, DomainError, ScenarioUnknownError
from hybridlink.evolution import evolve_closed, min_eigenvalue, numeric_trajectory
from hybridlink.models.schemas import (
    DephasingModel,
    Geometry,
    GroundState,
    HybridParams,
    MoleculePosition,
    ProtocolKind,
)
from hybridlink.nonhermitian import (
    compare_products,
    element_products_closed,
    inverse_elements,
)
from hybridlink.params import (
    default_geometry,
    gamma_to_ns,
    mhz_to_gamma,
    validate,
    working_point,
)
from hybridlink.presets.loader import load_preset, scenario_defaults
from hybridlink.protocols.bell import BellProtocol
from hybridlink.protocols.chsh import ChshProtocol
from hybridlink.protocols.montecarlo import make_protocol, monte_carlo_protocol
from hybridlink.rates import (
    compute_rates,
    dephasing_anchor,
    general_rates,
    light_amplitudes,
    photon_budget,
    raman_probability_normalized,
)
from hybridlink.scenarios.configfile import ScenarioConfig

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]

# Options that are recorded separately in the artifact preamble
CONTEXT_KEYS = ("name", "out", "seed", "tol", "dephasing_model")


@dataclass
class ScenarioContext:
    """Everything a scenario needs, resolved from presets, file and flags."""

    name: str
    params: HybridParams
    geometry: Geometry
    options: dict[str, Any]
    seed: int
    tol: float
    model: DephasingModel
    use_cache: bool = True

    def option(self, key: str, default: Any = None) -> Any:
        return self.options.get(key, default)


@dataclass
class ScenarioOutput:
    """Result table and headline numbers of one run."""

    frame: pd.DataFrame
    summary: dict[str, Any] = field(default_factory=dict)


ScenarioFn = Callable[[ScenarioContext], ScenarioOutput]
SCENARIOS: dict[str, ScenarioFn] = {}


def register(name: str) -> Callable[[ScenarioFn], ScenarioFn]:
    def decorator(fn: ScenarioFn) -> ScenarioFn:
        SCENARIOS[name] = fn
        return fn

    return decorator


def resolve_scenario(name: Optional[str]) -> str:
    """
    Canonical scenario name.

    Raises:
        ScenarioUnknownError: If no scenario is registered under the name
            (compared case-insensitively).
    """
    if not name:
        raise ScenarioUnknownError("no scenario given on the command line or in [scenario].name")
    for known in SCENARIOS:
        if known.lower() == name.lower():
            return known
    raise ScenarioUnknownError(
        f"unknown scenario '{name}'; available: {', '.join(sorted(SCENARIOS))}"
    )


def describe_scenarios() -> dict[str, str]:
    """Scenario names with their one-line descriptions."""
    presets = load_preset("scenarios")
    return {name: presets.get(name, {}).get("description", "") for name in SCENARIOS}


def build_context(
    name: Optional[str],
    config: Optional[ScenarioConfig] = None,
    use_cache: bool = True,
) -> ScenarioContext:
    """
    Resolve a scenario run from presets and a parsed configuration.

    Scenario defaults come from the presets and are overridden by the explicit
    [scenario] options. Parameters and geometry start from the working point.

    Raises:
        ScenarioUnknownError: If the scenario does not exist.
        ParameterError: If the resulting parameters are invalid.
    """
    config = config or ScenarioConfig()
    scenario = resolve_scenario(name or config.scenario.name)

    options = scenario_defaults(scenario)
    options.update(config.scenario.explicit())
    if "n_bar" in options:
        options["n_bar_values"] = [options["n_bar"]]

    model = options.get("dephasing_model") or settings.dephasing_model
    return ScenarioContext(
        name=scenario,
        params=working_point(**config.params),
        geometry=default_geometry(**config.geometry),
        options=options,
        seed=int(options.get("seed", settings.default_seed)),
        tol=float(options.get("tol", settings.integrator_tol)),
        model=DephasingModel(model),
        use_cache=use_cache,
    )


def run_scenario(ctx: ScenarioContext) -> ScenarioOutput:
    """Run the scenario named in the context."""
    logger.info(f"Running scenario '{ctx.name}' (seed={ctx.seed}, model={ctx.model.value})")
    return SCENARIOS[resolve_scenario(ctx.name)](ctx)


def artifact_metadata(ctx: ScenarioContext) -> dict[str, Any]:
    """Preamble entries: scenario, seed, resolved parameters, geometry and options."""
    meta: dict[str, Any] = {
        "scenario": ctx.name,
        "seed": ctx.seed,
        "tol": ctx.tol,
        "dephasing_model": ctx.model.value,
        "linewidth_mhz": settings.linewidth_mhz,
    }
    for key, value in ctx.params.model_dump(mode="json").items():
        meta[f"params.{key}"] = value
    for key, value in ctx.geometry.model_dump(mode="json").items():
        meta[f"geometry.{key}"] = value
    for key in sorted(ctx.options):
        if key not in CONTEXT_KEYS and key != "description":
            value = ctx.options[key]
            meta[f"scenario.{key}"] = getattr(value, "value", value)
    return meta


def default_output_path(ctx: ScenarioContext) -> Path:
    out = ctx.option("out")
    return Path(out) if out is not None else Path(f"{ctx.name}.csv")


# --- helpers -----------------------------------------------------------------


def _axis(ctx: ScenarioContext, variable: str, start: float, stop: float, points: int) -> FloatArray:
    """Sweep values of the scenario's swept variable, honouring [scenario.sweep]."""
    sweep = ctx.option("sweep")
    if sweep is None:
        return np.linspace(start, stop, int(points))
    if sweep["variable"] != variable:
        raise ConfigError(
            f"scenario '{ctx.name}' sweeps '{variable}', not '{sweep['variable']}'"
        )
    return np.linspace(sweep["start"], sweep["stop"], int(sweep["points"]))


def _with_t2(ctx: ScenarioContext) -> bool:
    return bool(ctx.option("with_t2", False)) and ctx.params.t2 is not None


def _log_anchor(p: HybridParams) -> None:
    anchor = dephasing_anchor(p)
    if not anchor.consistent:
        logger.warning(
            f"Printed dephasing probability {anchor.printed:.4g} disagrees with the "
            f"fidelity anchor ({anchor.effective:.4g}, gap {anchor.relative_gap:.0%}); "
            f"select dephasing_model='effective' to use the anchored value"
        )


def _parallel(fn: Callable[[Any], Any], items: list[Any], workers: int) -> list[Any]:
    if workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


# --- scenarios ---------------------------------------------------------------


@register("fig2b")
def run_fig2b(ctx: ScenarioContext) -> ScenarioOutput:
    """Normalized Raman probability P_R / gamma_1D^2 versus y for several x."""
    ys = _axis(ctx, "y", ctx.option("y_start"), ctx.option("y_stop"), ctx.option("points"))
    gamma_c = ctx.params.gamma_c
    columns: dict[str, Any] = {"y": ys}
    for x in ctx.option("x_values"):
        columns[f"x={x:g}"] = [raman_probability_normalized(x, y, gamma_c) for y in ys]

    p = ctx.params
    return ScenarioOutput(
        pd.DataFrame(columns),
        {"P_R/gamma_1D^2 at working point": raman_probability_normalized(p.x, p.y, gamma_c)},
    )


@register("fig3b")
def run_fig3b(ctx: ScenarioContext) -> ScenarioOutput:
    """Bell fidelity and success probability versus mean photon number."""
    p = ctx.params
    _log_anchor(p)
    n_bars = _axis(ctx, "n_bar", 0.0, ctx.option("nbar_max"), ctx.option("points"))
    protocol = BellProtocol(p, compute_rates(p, ctx.model))
    with_t2 = _with_t2(ctx)

    rows = []
    for n_bar in n_bars:
        result = protocol.coherent(float(n_bar), with_t2)
        rows.append(
            {
                "n_bar": n_bar,
                "fidelity": result.fidelity,
                "fidelity_first_order": result.fidelity_first_order,
                "success_prob": result.success_prob,
                "t2_penalty": result.t2_penalty or 0.0,
            }
        )

    anchor = settings.anchor_n_bar
    return ScenarioOutput(
        pd.DataFrame(rows),
        {
            f"F(n_bar={anchor:g})": protocol.fidelity(anchor),
            f"P_suc(n_bar={anchor:g})": protocol.success_probability(anchor),
        },
    )


@register("fig3c")
def run_fig3c(ctx: ScenarioContext) -> ScenarioOutput:
    """CHSH S value and success probability versus mean photon number."""
    p = ctx.params
    n_bars = _axis(ctx, "n_bar", 0.0, ctx.option("nbar_max"), ctx.option("points"))
    protocol = ChshProtocol(p, compute_rates(p, ctx.model))
    frame = pd.DataFrame(
        {
            "n_bar": n_bars,
            "s_parameter": [protocol.s_value(float(n)) for n in n_bars],
            "success_prob": [protocol.success_probability(float(n)) for n in n_bars],
        }
    )
    return ScenarioOutput(frame, {"S(n_bar=2)": protocol.s_value(2.0)})


@register("figS1b")
def run_figs1b(ctx: ScenarioContext) -> ScenarioOutput:
    """Island field at the three molecule positions versus distance, per waveguide height."""
    heights = [float(h) for h in ctx.option("heights")]
    distances = [float(d) for d in ctx.option("distances")]
    if ctx.option("sweep") is not None:
        distances = [float(d) for d in _axis(ctx, "distance", 0, 0, 2)]
    spacing = float(ctx.option("spacing", settings.fd_spacing_nm))

    jobs = [(h, d) for h in heights for d in distances]

    def solve(job: tuple[float, float]) -> dict[str, float]:
        h, d = job
        g = ctx.geometry.model_copy(update={"waveguide_height": h, "distance": d})
        return field_profile(g, spacing, use_cache=ctx.use_cache)

    profiles = dict(zip(jobs, _parallel(solve, jobs, int(ctx.option("workers", 1))), strict=True))

    columns: dict[str, Any] = {"distance_nm": distances}
    for h in heights:
        for position in MoleculePosition:
            columns[f"E_kV_m_H{h:g}_{position.value}"] = [
                profiles[(h, d)][position.value] for d in distances
            ]
    frame = pd.DataFrame(columns)

    first = profiles[jobs[0]][MoleculePosition.NEAR_EDGE.value]
    return ScenarioOutput(
        frame,
        {f"E near edge (H={heights[0]:g}, d={distances[0]:g}) [kV/m]": first},
    )


@register("figS4")
def run_figs4(ctx: ScenarioContext) -> ScenarioOutput:
    """Bell success probability versus x = V/omega_q for several mean photon numbers."""
    base = ctx.params
    xs = _axis(ctx, "x", ctx.option("x_start"), ctx.option("x_stop"), ctx.option("points"))
    n_bars = [float(n) for n in ctx.option("n_bar_values")]

    columns: dict[str, Any] = {"x": xs}
    curves: dict[float, list[float]] = {n: [] for n in n_bars}
    for x in xs:
        p = validate(base.model_copy(update={"v_dd": float(x) * base.omega_q}))
        protocol = BellProtocol(p, compute_rates(p, ctx.model))
        for n in n_bars:
            curves[n].append(protocol.success_probability(n))
    for n in n_bars:
        columns[f"p_suc_nbar={n:g}"] = curves[n]

    frame = pd.DataFrame(columns)
    best = frame.iloc[:, 1:].max().max()
    return ScenarioOutput(frame, {"max P_suc": float(best)})


@register("rates")
def run_rates(ctx: ScenarioContext) -> ScenarioOutput:
    """Scattering probabilities, element products and their closed-form deviations."""
    p = ctx.params
    d = build_dressed(p)
    eps1, eps2 = ctx.option("eps1"), ctx.option("eps2")
    _log_anchor(p)

    rates = compute_rates(p, ctx.model)
    inv = inverse_elements(p, d, eps1, eps2)
    general = general_rates(p, d, inv)
    numeric = inv.products()
    closed = element_products_closed(p, d, eps1, eps2)
    deviations = compare_products(numeric, closed)
    anchor = dephasing_anchor(p)
    a2, b2 = light_amplitudes(p, d)

    values: dict[str, float] = {
        "x": p.x,
        "y": p.y,
        "delta_0": p.delta_0,
        "splitting": d.splitting,
        "g_eff": d.g_eff,
        "g1_eff": d.g1_eff,
        "g2_eff": d.g2_eff,
        "gamma_s": d.gamma_s,
        "gamma_a": d.gamma_a,
        "gamma_as": d.gamma_as,
        "a2": a2,
        "b2": b2,
    }
    values.update(rates.model_dump())
    values["p_a"] = rates.p_a
    values["p_d_printed"] = anchor.printed
    values["p_d_effective"] = anchor.effective
    values["p_d_anchor_gap"] = anchor.relative_gap
    for key in ("p_r", "p_ro", "p_ir", "p_d", "p_rs", "light_shift"):
        values[f"{key}_general"] = getattr(general, key)
    numeric_values = numeric.model_dump()
    closed_values = closed.model_dump()
    for key in numeric_values:
        values[f"{key}_numeric"] = numeric_values[key]
        values[f"{key}_closed"] = closed_values[key]
        values[f"{key}_deviation"] = deviations[key]
    values["photon_budget"] = photon_budget(p)

    frame = pd.DataFrame({"quantity": list(values), "value": list(values.values())})
    return ScenarioOutput(
        frame,
        {"P_R": rates.p_r, "P_RO": rates.p_ro, "P_D": rates.p_d, "P_IR": rates.p_ir},
    )


@register("evolve")
def run_evolve(ctx: ScenarioContext) -> ScenarioOutput:
    """Closed-form against integrated evolution of an equal superposition."""
    p = ctx.params
    d = build_dressed(p)
    eps1, eps2 = ctx.option("eps1"), ctx.option("eps2")
    alpha2 = float(ctx.option("alpha2"))
    times = _axis(ctx, "time", 0.0, ctx.option("time"), ctx.option("points"))
    t2 = p.t2 if _with_t2(ctx) else None

    rates = general_rates(p, d, inverse_elements(p, d, eps1, eps2))
    rho0 = GroundState.superposition()
    closed = [evolve_closed(rho0, rates, alpha2, float(t), t2) for t in times]
    numeric = numeric_trajectory(rho0, p, d, alpha2, times, ctx.tol, t2, eps1, eps2)

    frame = pd.DataFrame(
        {
            "t": times,
            "t_ns": [gamma_to_ns(float(t)) for t in times],
            "rho11_closed": [s.rho11 for s in closed],
            "rho44_closed": [s.rho44 for s in closed],
            "abs_rho14_closed": [abs(s.rho14) for s in closed],
            "rho11_numeric": [s.rho11 for s in numeric],
            "rho44_numeric": [s.rho44 for s in numeric],
            "abs_rho14_numeric": [abs(s.rho14) for s in numeric],
            "min_eigenvalue_numeric": [min_eigenvalue(s) for s in numeric],
        }
    )
    gap = np.abs(frame["abs_rho14_closed"] - frame["abs_rho14_numeric"]).max()
    gap_pop = np.abs(frame["rho11_closed"] - frame["rho11_numeric"]).max()
    return ScenarioOutput(
        frame,
        {"max |rho11| gap": float(gap_pop), "max ||rho14|| gap": float(gap)},
    )


@register("montecarlo")
def run_montecarlo(ctx: ScenarioContext) -> ScenarioOutput:
    """Monte Carlo estimates against the closed forms, with standard errors."""
    p = ctx.params
    kind = ProtocolKind(ctx.option("protocol", ProtocolKind.BELL))
    n_trials = int(ctx.option("n_trials"))
    workers = int(ctx.option("workers", 1))
    with_t2 = _with_t2(ctx)
    rates = compute_rates(p, ctx.model)
    protocol = make_protocol(kind, p, rates)
    merit, merit_se = (
        ("fidelity", "fidelity_stderr") if kind is ProtocolKind.BELL else ("s_parameter", "s_stderr")
    )

    rows = []
    worst = 0.0
    for i, n_bar in enumerate(float(n) for n in ctx.option("n_bar_values")):
        sampled = monte_carlo_protocol(
            kind, p, n_bar, n_trials, ctx.seed + i, with_t2, rates, workers=workers
        )
        if isinstance(protocol, BellProtocol):
            closed = protocol.coherent(n_bar, with_t2)
        else:
            closed = protocol.coherent(n_bar)
        value, value_se = getattr(sampled, merit), getattr(sampled, merit_se)
        if value is None or value_se is None or sampled.success_stderr is None:
            raise DomainError(
                f"too few heralded clicks at n_bar={n_bar:g} ({sampled.n_clicks}); "
                "increase n_trials"
            )
        rows.append(
            {
                "n_bar": n_bar,
                "n_trials": n_trials,
                "n_clicks": sampled.n_clicks,
                "success_mc": sampled.success_prob,
                "success_mc_stderr": sampled.success_stderr,
                "success_closed": closed.success_prob,
                f"{merit}_mc": value,
                f"{merit}_mc_stderr": value_se,
                f"{merit}_closed": getattr(closed, merit),
            }
        )
        if value_se > 0:
            worst = max(worst, abs(value - getattr(closed, merit)) / value_se)

    return ScenarioOutput(
        pd.DataFrame(rows),
        {"protocol": kind.value, f"max |{merit} z-score|": worst},
    )


@register("estark")
def run_estark(ctx: ScenarioContext) -> ScenarioOutput:
    """Point-charge field and Stark coupling versus distance."""
    distances = [float(d) for d in ctx.option("distances")]
    if ctx.option("sweep") is not None:
        distances = [float(d) for d in _axis(ctx, "distance", 0, 0, 2)]
    eps_r = float(ctx.option("eps_r", ctx.geometry.eps_waveguide))
    dipole = float(ctx.option("dipole", 1.0))

    rows = []
    for r in distances:
        coupling = coupling_from_field(field_point_charge(r, eps_r), dipole)
        rows.append(
            {
                "distance_nm": r,
                "field_kv_m": coupling.field_kv_m,
                "g_c_mhz": coupling.g_c_mhz,
                "g_c_gamma": mhz_to_gamma(coupling.g_c_mhz),
                "first_principles_mhz": coupling.first_principles_mhz,
            }
        )
    frame = pd.DataFrame(rows)
    return ScenarioOutput(
        frame,
        {f"g_c at {distances[0]:g} nm [MHz]": float(frame["g_c_mhz"].iloc[0])},
    )


@register("chsh")
def run_chsh(ctx: ScenarioContext) -> ScenarioOutput:
    """CHSH S and success probability, single-photon and coherent inputs."""
    protocol = ChshProtocol(ctx.params, compute_rates(ctx.params, ctx.model))
    single = protocol.single_photon()
    rows = [
        {
            "input": "single-photon",
            "n_bar": 0.0,
            "s_parameter": single.s_parameter,
            "success_prob": single.success_prob,
        }
    ]
    for n_bar in ctx.option("n_bar_values"):
        result = protocol.coherent(float(n_bar))
        rows.append(
            {
                "input": "coherent",
                "n_bar": result.n_bar,
                "s_parameter": result.s_parameter,
                "success_prob": result.success_prob,
            }
        )
    return ScenarioOutput(
        pd.DataFrame(rows),
        {"S single photon": single.s_parameter, "S(n_bar=2)": protocol.s_value(2.0)},
    )


@register("bell")
def run_bell(ctx: ScenarioContext) -> ScenarioOutput:
    """Bell fidelity and success probability, including the qubit T2 penalty."""
    p = ctx.params
    _log_anchor(p)
    protocol = BellProtocol(p, compute_rates(p, ctx.model))
    with_t2 = _with_t2(ctx)
    single = protocol.single_photon()

    rows = [
        {
            "input": "single-photon",
            "n_bar": 0.0,
            "fidelity": single.fidelity,
            "fidelity_first_order": 1.0,
            "success_prob": single.success_prob,
            "t2_penalty": 0.0,
            "t2_penalty_first_order": 0.0,
        }
    ]
    for n_bar in ctx.option("n_bar_values"):
        result = protocol.coherent(float(n_bar), with_t2)
        rows.append(
            {
                "input": "coherent",
                "n_bar": result.n_bar,
                "fidelity": result.fidelity,
                "fidelity_first_order": result.fidelity_first_order,
                "success_prob": result.success_prob,
                "t2_penalty": result.t2_penalty or 0.0,
                "t2_penalty_first_order": result.t2_penalty_first_order or 0.0,
            }
        )
    frame = pd.DataFrame(rows)
    summary: dict[str, Any] = {"P_suc single photon": single.success_prob}
    coherent = frame[frame["input"] == "coherent"]
    if not coherent.empty:
        last = coherent.iloc[-1]
        summary[f"F(n_bar={last['n_bar']:g})"] = float(last["fidelity"])
    return ScenarioOutput(frame, summary)
