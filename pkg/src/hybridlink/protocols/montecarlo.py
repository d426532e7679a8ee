"""
Monte Carlo estimation of the heralded protocols.

Trials are split into fixed-size blocks, each driven by its own counter-based
Philox stream derived from the seed and the block index. Block results are
combined with exactly rounded sums, so a given seed reproduces the same numbers
whatever the number of worker threads.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import NamedTuple, Optional

import numpy as np

from hybridlink.config import settings
from hybridlink.errors import DomainError
from hybridlink.models.schemas import (
    DephasingModel,
    HybridParams,
    ProtocolKind,
    ProtocolResult,
    RateSet,
)
from hybridlink.protocols.base import BaseProtocol
from hybridlink.protocols.bell import BellProtocol
from hybridlink.protocols.chsh import ChshProtocol

logger = logging.getLogger(__name__)

PROTOCOLS: dict[ProtocolKind, type[BaseProtocol]] = {
    ProtocolKind.CHSH: ChshProtocol,
    ProtocolKind.BELL: BellProtocol,
}


class BlockTally(NamedTuple):
    """Partial sums of one block of trials."""

    clicks: int
    sums: dict[str, float]
    squares: dict[str, float]


class Estimate(NamedTuple):
    mean: Optional[float]
    stderr: Optional[float]


def make_protocol(
    which: ProtocolKind | str,
    p: HybridParams,
    rates: Optional[RateSet] = None,
    model: Optional[DephasingModel] = None,
) -> BaseProtocol:
    """Instantiate the protocol registered under ``which``."""
    return PROTOCOLS[ProtocolKind(which)](p, rates, model)


def block_generator(seed: int, block: int) -> np.random.Generator:
    """Independent random stream of one block."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


def _run_block(
    protocol: BaseProtocol,
    seed: int,
    block: int,
    size: int,
    p_suc: float,
    n_bar: float,
    with_t2: bool,
) -> BlockTally:
    rng = block_generator(seed, block)
    clicks = int(np.count_nonzero(rng.random(size) < p_suc))
    if clicks == 0:
        return BlockTally(0, {}, {})
    s = protocol.sample_clicks(rng, clicks, n_bar)
    values = protocol.conditional_values(s, n_bar, with_t2)
    return BlockTally(
        clicks,
        {name: math.fsum(v) for name, v in values.items()},
        {name: math.fsum(v * v) for name, v in values.items()},
    )


def _estimate(total: float, squares: float, count: int) -> Estimate:
    if count == 0:
        return Estimate(None, None)
    mean = total / count
    if count == 1:
        return Estimate(mean, None)
    variance = max(squares - count * mean * mean, 0.0) / (count - 1)
    return Estimate(mean, math.sqrt(variance / count))


def monte_carlo_protocol(
    which: ProtocolKind | str,
    p: HybridParams,
    n_bar: float,
    n_trials: int,
    seed: Optional[int] = None,
    with_t2: bool = False,
    rates: Optional[RateSet] = None,
    model: Optional[DephasingModel] = None,
    block_size: Optional[int] = None,
    workers: int = 1,
) -> ProtocolResult:
    """
    Estimate a protocol's success probability and figure of merit by sampling.

    Args:
        which: Protocol to simulate.
        p: Hybrid parameters.
        n_bar: Mean photon number of the probe.
        n_trials: Number of heralding attempts.
        seed: Root seed, defaults to settings.default_seed.
        with_t2: Include the qubit Gaussian decoherence.
        rates: Precomputed rate set.
        model: Dephasing model used when rates are computed here.
        block_size: Trials per random stream, defaults to settings.mc_block_size.
        workers: Number of threads processing blocks.

    Returns:
        ProtocolResult with estimates and standard errors. The conditional
        figure of merit is None when no trial clicked.

    Raises:
        DomainError: If n_trials is negative or the heralding probability exceeds 1.
    """
    if n_trials < 0:
        raise DomainError(f"n_trials must be non-negative, got {n_trials}")
    protocol = make_protocol(which, p, rates, model)
    seed = settings.default_seed if seed is None else seed
    block_size = settings.mc_block_size if block_size is None else block_size

    p_suc = protocol.success_probability(n_bar)
    if p_suc > 1:
        raise DomainError(
            f"heralding probability {p_suc:.3g} exceeds 1; reduce n_bar (single-click regime)"
        )

    n_blocks = math.ceil(n_trials / block_size) if n_trials else 0
    sizes = [min(block_size, n_trials - b * block_size) for b in range(n_blocks)]
    logger.info(
        f"Monte Carlo {protocol.kind.value}: n_bar={n_bar:g}, {n_trials} trials "
        f"in {n_blocks} blocks, seed={seed}"
    )

    def run(block: int) -> BlockTally:
        return _run_block(protocol, seed, block, sizes[block], p_suc, n_bar, with_t2)

    if workers > 1 and n_blocks > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            tallies = list(pool.map(run, range(n_blocks)))
    else:
        tallies = [run(b) for b in range(n_blocks)]

    clicks = sum(t.clicks for t in tallies)
    names = sorted({name for t in tallies for name in t.sums})
    estimates = {
        name: _estimate(
            math.fsum(t.sums.get(name, 0.0) for t in tallies),
            math.fsum(t.squares.get(name, 0.0) for t in tallies),
            clicks,
        )
        for name in names
    }

    success = clicks / n_trials if n_trials else 0.0
    success_se = math.sqrt(success * (1 - success) / n_trials) if n_trials else None

    fields: dict[str, object] = {
        "protocol": protocol.kind,
        "n_bar": n_bar,
        "success_prob": success,
        "success_stderr": success_se,
        "n_trials": n_trials,
        "n_clicks": clicks,
    }
    for name, estimate in estimates.items():
        stderr_key = {
            "s_parameter": "s_stderr",
            "fidelity": "fidelity_stderr",
            "t2_penalty_first_order": "t2_penalty_stderr",
        }.get(name)
        fields[name] = estimate.mean
        if stderr_key is not None:
            fields[stderr_key] = estimate.stderr
    return ProtocolResult(**fields)  # type: ignore[arg-type]
