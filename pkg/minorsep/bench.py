"""
Timing harness for the balanced separator.

Every size is run ``trials`` times with consecutive seeds; the reported record holds
the median of each measurement. The summary gives the ratio of consecutive medians,
which for a near-linear algorithm stays close to the size ratio.
"""

import logging
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Any, Sequence

from minorsep.config import ConstantsProfile, resolve_profile
from minorsep.generators import as_family, family_for_size
from minorsep.helpers import GraphFamily, ParameterError
from minorsep.models import BenchRecord
from minorsep.separator import DEFAULT_ALPHA, find_balanced_separator

logger = logging.getLogger(__name__)


def run_trial(
    family: str, n: int, h: int, profile: ConstantsProfile, seed: int, alpha: Fraction
) -> BenchRecord:
    graph = family_for_size(family, n, seed)
    start = time.perf_counter()
    result = find_balanced_separator(graph, h, alpha, profile, seed, record_trees=False)
    wall_ms = (time.perf_counter() - start) * 1000.0
    separator = len(result.separator) if result.separator is not None else 0
    record = BenchRecord(
        family=GraphFamily(family).value,
        n=graph.n,
        m=graph.m,
        h=h,
        profile=profile.name,
        seed=seed,
        separator_size=separator,
        max_component_fraction=result.max_component / graph.n if graph.n else 0.0,
        wall_ms=wall_ms,
        peak_weight=max((t.peak_weight for t in result.traces), default=0),
        kind=result.kind.value,
    )
    logger.debug("Trial %s", record)
    return record


def _median_record(trials: list[BenchRecord]) -> BenchRecord:
    first = trials[0]
    return BenchRecord(
        family=first.family,
        n=first.n,
        m=first.m,
        h=first.h,
        profile=first.profile,
        seed=first.seed,
        separator_size=int(statistics.median_low(t.separator_size for t in trials)),
        max_component_fraction=statistics.median(t.max_component_fraction for t in trials),
        wall_ms=statistics.median(t.wall_ms for t in trials),
        peak_weight=int(statistics.median_low(t.peak_weight for t in trials)),
        kind=first.kind,
    )


def _ratios(values: list[float]) -> list[float | None]:
    return [b / a if a else None for a, b in zip(values, values[1:])]


def bench(
    family: GraphFamily | str,
    sizes: Sequence[int],
    h: int,
    profile: ConstantsProfile | str | None = None,
    seed: int = 0,
    trials: int = 3,
    *,
    alpha: Fraction = DEFAULT_ALPHA,
    workers: int = 1,
) -> tuple[list[BenchRecord], dict[str, Any]]:
    """
    Median-of-trials records per size plus a scaling summary with
    ``time_ratios`` and ``separator_ratios`` between consecutive sizes.
    """
    if not sizes:
        raise ParameterError("bench needs at least one size")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ParameterError(f"sizes must be increasing, got {list(sizes)}")
    if trials < 1:
        raise ParameterError(f"trials must be positive, got {trials}")
    profile = resolve_profile(profile)
    family = as_family(family).value
    jobs = [(family, n, h, profile, seed + i, alpha) for n in sizes for i in range(trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            raw = list(pool.map(run_trial, *zip(*jobs)))
    else:
        raw = [run_trial(*job) for job in jobs]
    records = [_median_record(raw[i : i + trials]) for i in range(0, len(raw), trials)]
    summary = {
        "family": family,
        "h": h,
        "profile": profile.name,
        "sizes": [r.n for r in records],
        "time_ratios": _ratios([r.wall_ms for r in records]),
        "separator_ratios": _ratios([float(r.separator_size) for r in records]),
    }
    for record in records:
        logger.info(
            "n=%d |S|=%d time=%.1fms max component %.3f",
            record.n,
            record.separator_size,
            record.wall_ms,
            record.max_component_fraction,
        )
    return records, summary
