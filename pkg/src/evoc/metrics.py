"""Per-iteration measurements and cross-replicate aggregation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

from .model import Chain
from .params import SimParams

N_BINS = 10
IMITATOR_MAX = 0.1
CREATOR_MIN = 0.9

# scalar IterationRecord fields that get aggregated
SCALAR_FIELDS = ("mean_fitness", "diversity", "mean_p_create", "frac_imitators", "frac_creators")


class BatchError(ValueError):
    """Replicates that cannot be aggregated together."""


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    mean_fitness: float
    diversity: int
    mean_p_create: float
    frac_imitators: float
    frac_creators: float
    p_create_histogram: tuple[int, ...]


@dataclass
class TimeSeries:
    params: SimParams
    records: list[IterationRecord] = field(default_factory=list)
    final_p_create: list[float] = field(default_factory=list)

    @property
    def params_digest(self) -> str:
        return self.params.digest()

    def column(self, name: str) -> list:
        return [getattr(r, name) for r in self.records]


@dataclass
class AggregateSeries:
    params: SimParams
    replicates: int
    iterations: list[int]
    mean: dict[str, list[float]]
    std: dict[str, list[float]]
    histogram_mean: list[list[float]]


def diversity(chains: Sequence[Chain]) -> int:
    if not chains:
        raise ValueError("diversity of an empty population is undefined")
    return len(set(chains))


def mean_fitness(fitnesses: Sequence[float]) -> float:
    if not fitnesses:
        raise ValueError("mean fitness of an empty population is undefined")
    return math.fsum(fitnesses) / len(fitnesses)


def histogram_bin(p: float) -> int:
    """Bins are [0, .1), [.1, .2), ..., [.9, 1.0]; p == 1.0 lands in the last."""
    return min(int(p * N_BINS), N_BINS - 1)


def p_create_histogram(values: Sequence[float]) -> tuple[int, ...]:
    counts = [0] * N_BINS
    for p in values:
        counts[histogram_bin(p)] += 1
    return tuple(counts)


def make_record(iteration: int, chains: Sequence[Chain], fitnesses: Sequence[float], p_values: Sequence[float]) -> IterationRecord:
    n = len(p_values)
    return IterationRecord(
        iteration=iteration,
        mean_fitness=mean_fitness(fitnesses),
        diversity=diversity(chains),
        mean_p_create=math.fsum(p_values) / n,
        frac_imitators=sum(1 for p in p_values if p <= IMITATOR_MAX) / n,
        frac_creators=sum(1 for p in p_values if p >= CREATOR_MIN) / n,
        p_create_histogram=p_create_histogram(p_values),
    )


def _mean_std(values: Sequence[float]) -> tuple[float, float]:
    # fsum makes the result independent of replicate order
    n = len(values)
    mu = math.fsum(values) / n
    if n < 2:
        return mu, 0.0
    var = math.fsum((v - mu) ** 2 for v in values) / (n - 1)
    return mu, math.sqrt(var)


def aggregate(series_list: Sequence[TimeSeries]) -> AggregateSeries:
    """Per-iteration mean and sample standard deviation over replicates."""
    if not series_list:
        raise BatchError("need at least one replicate")
    first = series_list[0]
    base = first.params.replace(seed=0)
    length = len(first.records)
    for s in series_list[1:]:
        if len(s.records) != length:
            raise BatchError(f"replicate lengths differ: {length} vs {len(s.records)}")
        if s.params.replace(seed=0) != base:
            raise BatchError("replicates differ in parameters other than the seed")

    mean: dict[str, list[float]] = {f: [] for f in SCALAR_FIELDS}
    std: dict[str, list[float]] = {f: [] for f in SCALAR_FIELDS}
    hist: list[list[float]] = []
    for t in range(length):
        rows = [s.records[t] for s in series_list]
        for name in SCALAR_FIELDS:
            mu, sd = _mean_std([float(getattr(r, name)) for r in rows])
            mean[name].append(mu)
            std[name].append(sd)
        hist.append([math.fsum(r.p_create_histogram[b] for r in rows) / len(rows) for b in range(N_BINS)])

    return AggregateSeries(
        params=base,
        replicates=len(series_list),
        iterations=[r.iteration for r in first.records],
        mean=mean,
        std=std,
        histogram_mean=hist,
    )


def diversity_peak(series: Union[AggregateSeries, Sequence[float]]) -> tuple[int, float]:
    """Iteration of maximal mean diversity; the earliest one wins ties."""
    values = series.mean["diversity"] if isinstance(series, AggregateSeries) else list(series)
    if not values:
        raise ValueError("empty series")
    best = 0
    for i, v in enumerate(values):
        if v > values[best]:
            best = i
    return best, values[best]
