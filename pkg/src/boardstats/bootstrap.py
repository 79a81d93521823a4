"""Deterministic bootstrap resampling engine.

Generates resample index vectors with replacement, evaluates score statistics
over them, and summarizes the resulting sampling distributions with means and
percentile confidence intervals.

Two contracts matter everywhere downstream:

* Determinism: the indices of replicate r depend only on (seed, r), never on
  evaluation order or worker count, so identical plans produce bit-identical
  sampling distributions at any parallelism degree.
* Index sharing: every system is evaluated on the same index vector for a
  given replicate.  Per-replicate score differences between systems are only
  meaningful because of this pairing.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from . import rng
from .metrics import ResampleScorer
from .table import BootstrapPlan, PerformanceSummary, PredictionTable, ScoreSpec

QUANTILE_RULE = "linear"

_BLOCK = 512  # replicates evaluated per batch; fixed so results never depend on workers


@dataclass(frozen=True)
class ResamplePlan:
    """Size, replicate count and seed of one resampling run."""

    n: int
    replicates: int
    seed: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")


@dataclass(frozen=True)
class SamplingDistribution:
    """Bootstrap values of one statistic plus its value on the original data."""

    values: np.ndarray
    observed: float

    def __post_init__(self):
        self.values.flags.writeable = False


class CI(NamedTuple):
    lci: float
    mean: float
    uci: float


def resample_indices(plan: ResamplePlan, replicate_id: int) -> np.ndarray:
    """The n resample indices of one replicate.

    Fully determined by (seed, replicate_id); n independent uniform draws
    from [0, n).
    """
    if not 0 <= replicate_id < plan.replicates:
        raise ValueError(
            f"replicate_id {replicate_id} outside [0, {plan.replicates})"
        )
    return rng.index_block(plan.seed, plan.n, replicate_id, replicate_id + 1)[0]


def _evaluate(
    scorers: dict[str, ResampleScorer],
    n: int,
    plan: BootstrapPlan,
) -> dict[str, np.ndarray]:
    """Evaluate all scorers over every replicate, sharing index vectors."""
    B = plan.replicates
    out = {name: np.empty(B) for name in scorers}

    def run_block(start: int) -> None:
        stop = min(start + _BLOCK, B)
        idx = rng.index_block(plan.seed, n, start, stop)
        for name, scorer in scorers.items():
            out[name][start:stop] = scorer.scores(idx)

    starts = range(0, B, _BLOCK)
    if plan.workers > 1:
        with ThreadPoolExecutor(max_workers=plan.workers) as pool:
            list(pool.map(run_block, starts))
    else:
        for start in starts:
            run_block(start)
    return out


def distributions(
    table: PredictionTable,
    spec: ScoreSpec,
    plan: BootstrapPlan,
    systems: Optional[Sequence[str]] = None,
) -> dict[str, SamplingDistribution]:
    """Sampling distribution of the score of each system.

    value[r] of every system is computed on the same resample indices, which
    is what makes paired differences between systems valid.
    """
    names = list(table.names if systems is None else systems)
    for name in names:
        if name not in table.systems:
            raise KeyError(f"unknown system {name!r}")
    scorers = {
        name: ResampleScorer(table.gold, table.systems[name], spec) for name in names
    }
    values = _evaluate(scorers, table.n, plan)
    return {
        name: SamplingDistribution(values=values[name], observed=scorers[name].observed())
        for name in names
    }


def distribution(
    table: PredictionTable,
    system: str,
    spec: ScoreSpec,
    plan: BootstrapPlan,
) -> SamplingDistribution:
    """Sampling distribution of one system's score under the plan."""
    return distributions(table, spec, plan, systems=[system])[system]


def percentile_ci(dist: SamplingDistribution, confidence: float) -> CI:
    """Percentile confidence interval and mean of a sampling distribution.

    The bounds are the (1 - confidence)/2 and 1 - (1 - confidence)/2
    empirical quantiles, taken with linear interpolation between order
    statistics (numpy's default rule); the midpoint is the arithmetic mean.
    """
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must lie strictly between 0 and 1")
    values = np.asarray(dist.values, dtype=float)
    if values.size < 2:
        raise ValueError("need at least 2 bootstrap values for quantiles")
    tail = (1.0 - confidence) / 2.0
    lci, uci = np.quantile(values, [tail, 1.0 - tail], method=QUANTILE_RULE)
    return CI(float(lci), float(values.mean()), float(uci))


def summarize(
    table: PredictionTable,
    spec: ScoreSpec,
    plan: BootstrapPlan,
    systems: Optional[Sequence[str]] = None,
    keep_samples: bool = False,
) -> dict[str, PerformanceSummary]:
    """Observed score, bootstrap mean and CI for each system."""
    dists = distributions(table, spec, plan, systems=systems)
    out = {}
    for name, dist in dists.items():
        ci = percentile_ci(dist, plan.confidence)
        out[name] = PerformanceSummary(
            system=name,
            observed=dist.observed,
            boot_mean=ci.mean,
            lci=ci.lci,
            uci=ci.uci,
            boot_samples=dist.values if keep_samples else None,
        )
    return out
