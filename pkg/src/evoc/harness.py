"""Batch experiments: config loading, replicate execution, SR comparison,
CSV/JSON output, SVG charts and the fitness-oracle check.

Config files are JSON::

    {
      "base": {"iterations": 100, "seed": 0, ...},   # any SimParams field
      "replicates": 250,
      "variants": {"sr_on": {"sr_enabled": true}, "sr_off": {"sr_enabled": false}},
      "output_dir": "results",
      "jobs": 4
    }

Every key is optional. Replicate ``k`` of every variant runs with seed
``base.seed + k``, so variants are paired replicate by replicate.
"""

from __future__ import annotations

import csv
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .fitness import HEAD_RULES, oracle_max_and_argmax
from .metrics import AggregateSeries, TimeSeries, aggregate, diversity_peak
from .model import BodyPart, encode_action
from .params import ConfigError, SimParams
from .world import run

log = logging.getLogger(__name__)

DEFAULT_REPLICATES = 250
DEFAULT_VARIANTS = {"sr_on": {"sr_enabled": True}, "sr_off": {"sr_enabled": False}}
CSV_HEADER = (
    "iteration",
    "mean_fitness_mean",
    "mean_fitness_std",
    "diversity_mean",
    "diversity_std",
    "mean_pc_mean",
    "frac_imitators_mean",
    "frac_creators_mean",
)
BOOTSTRAP_RESAMPLES = 10_000


class ExperimentIOError(OSError):
    pass


@dataclass
class ExperimentConfig:
    base: SimParams = field(default_factory=SimParams)
    replicates: int = DEFAULT_REPLICATES
    variants: dict[str, dict] = field(default_factory=lambda: dict(DEFAULT_VARIANTS))
    output_dir: Path = Path("results")
    jobs: Optional[int] = None

    def __post_init__(self):
        if isinstance(self.replicates, bool) or not isinstance(self.replicates, int) or self.replicates < 1:
            raise ConfigError("replicates must be a positive integer")
        if not self.variants:
            raise ConfigError("at least one variant is required")
        if self.jobs is not None and (not isinstance(self.jobs, int) or self.jobs < 1):
            raise ConfigError("jobs must be a positive integer")
        for name in self.variants:
            if not name or any(ch in name for ch in '/\\:*?"<>|'):
                raise ConfigError(f"variant name {name!r} is not usable as a file name")
        # resolve eagerly so bad overrides fail before any run starts
        for name in self.variants:
            self.variant_params(name)

    def variant_params(self, name: str) -> SimParams:
        overrides = self.variants[name]
        if not isinstance(overrides, dict):
            raise ConfigError(f"variant {name!r} must map parameter names to values")
        if "seed" in overrides:
            raise ConfigError(f"variant {name!r} may not override the seed")
        merged = {**self.base.to_dict(), **overrides}
        return SimParams.from_dict(merged)

    def with_overrides(self, **changes) -> "ExperimentConfig":
        """Apply command-line overrides; SimParams fields apply to every variant."""
        base_changes = {k: v for k, v in changes.items() if k in SimParams.__dataclass_fields__ and v is not None}
        variants = {
            name: {k: v for k, v in ov.items() if k not in base_changes}
            for name, ov in self.variants.items()
        }
        return ExperimentConfig(
            base=self.base.replace(**base_changes),
            replicates=changes.get("replicates") or self.replicates,
            variants=variants,
            output_dir=Path(changes["output_dir"]) if changes.get("output_dir") else self.output_dir,
            jobs=changes.get("jobs") or self.jobs,
        )


def _no_duplicate_keys(pairs):
    out = {}
    for key, value in pairs:
        if key in out:
            raise ConfigError(f"duplicate key {key!r} in config")
        out[key] = value
    return out


def config_from_dict(data: dict) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    allowed = {"base", "replicates", "variants", "output_dir", "jobs"}
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")
    base = data.get("base", {})
    if not isinstance(base, dict):
        raise ConfigError("'base' must be an object")
    variants = data.get("variants", DEFAULT_VARIANTS)
    if not isinstance(variants, dict):
        raise ConfigError("'variants' must be an object mapping names to overrides")
    return ExperimentConfig(
        base=SimParams.from_dict(base),
        replicates=data.get("replicates", DEFAULT_REPLICATES),
        variants=dict(variants),
        output_dir=Path(data.get("output_dir", "results")),
        jobs=data.get("jobs"),
    )


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ExperimentIOError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    try:
        data = json.loads(text, object_pairs_hook=_no_duplicate_keys) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return config_from_dict(data)


def run_replicates(params: SimParams, replicates: int, jobs: Optional[int] = None) -> list[TimeSeries]:
    """Runs with seeds ``params.seed + k``; results are ordered by ``k``."""
    seeds = [params.seed + k for k in range(replicates)]
    if seeds[-1] >= 2**64:
        raise ConfigError("seed + replicates overflows 64 bits")
    tasks = [params.replace(seed=s) for s in seeds]
    workers = min(jobs or os.cpu_count() or 1, replicates)
    if workers <= 1:
        return [run(p) for p in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, tasks))


@dataclass
class VariantResult:
    name: str
    params: SimParams
    series: list[TimeSeries]
    aggregate: AggregateSeries


def format_csv_rows(agg: AggregateSeries) -> list[list[str]]:
    rows = []
    for t, it in enumerate(agg.iterations):
        values = (
            agg.mean["mean_fitness"][t],
            agg.std["mean_fitness"][t],
            agg.mean["diversity"][t],
            agg.std["diversity"][t],
            agg.mean["mean_p_create"][t],
            agg.mean["frac_imitators"][t],
            agg.mean["frac_creators"][t],
        )
        rows.append([str(it)] + [f"{v:.6f}" for v in values])
    return rows


def write_aggregate_csv(path: Path, agg: AggregateSeries) -> None:
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            writer.writerows(format_csv_rows(agg))
    except OSError as exc:
        raise ExperimentIOError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _write_json(path: Path, payload) -> None:
    try:
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as exc:
        raise ExperimentIOError(f"cannot write {path}: {exc.strerror or exc}") from exc


def variant_meta(result: VariantResult) -> dict:
    # no wall-clock fields: outputs must be byte-identical across reruns
    return {
        "variant": result.name,
        "params": result.params.to_dict(),
        "replicates": result.aggregate.replicates,
        "seeds": [result.params.seed, result.params.seed + result.aggregate.replicates - 1],
        "version": __version__,
    }


def _prepare_output_dir(out: Path) -> None:
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ExperimentIOError(f"cannot create output directory {out}: {exc.strerror or exc}") from exc


def run_experiment(cfg: ExperimentConfig, write: bool = True, charts: bool = False) -> dict[str, VariantResult]:
    if write:
        _prepare_output_dir(cfg.output_dir)
    results = {}
    for name in cfg.variants:
        params = cfg.variant_params(name)
        started = time.perf_counter()
        series = run_replicates(params, cfg.replicates, cfg.jobs)
        result = VariantResult(name, params, series, aggregate(series))
        log.info("variant %s: %d replicates in %.1fs", name, cfg.replicates, time.perf_counter() - started)
        if write:
            write_aggregate_csv(cfg.output_dir / f"{name}_aggregate.csv", result.aggregate)
            _write_json(cfg.output_dir / f"{name}_meta.json", variant_meta(result))
        results[name] = result
    if write and charts:
        write_charts(cfg.output_dir, {n: r.aggregate for n, r in results.items()})
    return results


def bootstrap_mean_ci(
    values: Sequence[float],
    resamples: int = BOOTSTRAP_RESAMPLES,
    seed: int = 0,
    level: float = 0.95,
) -> tuple[float, float]:
    """Percentile bootstrap interval for the mean of ``values``."""
    data = np.asarray(values, dtype=float)
    if data.size == 0:
        raise ValueError("cannot bootstrap an empty sample")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, data.size, size=(resamples, data.size))
    means = data[idx].mean(axis=1)
    alpha = (1.0 - level) / 2.0
    lo, hi = np.quantile(means, [alpha, 1.0 - alpha])
    return float(lo), float(hi)


@dataclass
class ComparisonReport:
    iterations: list[int]
    fitness_difference: list[float]
    final_difference: float
    final_difference_ci: tuple[float, float]
    bootstrap_resamples: int
    bootstrap_seed: int
    diversity_peak_sr_on: tuple[int, float]
    diversity_peak_sr_off: tuple[int, float]
    final_frac_imitators_sr_on: float
    final_frac_creators_sr_on: float
    replicates: int

    @property
    def final_segregation_sr_on(self) -> float:
        return self.final_frac_imitators_sr_on + self.final_frac_creators_sr_on

    def to_dict(self) -> dict:
        out = asdict(self)
        out["final_segregation_sr_on"] = self.final_segregation_sr_on
        return out


def comparison_from_results(results: dict[str, VariantResult], bootstrap_seed: int = 0) -> ComparisonReport:
    missing = {"sr_on", "sr_off"} - set(results)
    if missing:
        raise ConfigError(f"comparison needs variants sr_on and sr_off; missing {', '.join(sorted(missing))}")
    on, off = results["sr_on"], results["sr_off"]
    if len(on.series) != len(off.series) or on.aggregate.iterations != off.aggregate.iterations:
        raise ConfigError("sr_on and sr_off must have the same replicates and iterations")
    paired = [a.records[-1].mean_fitness - b.records[-1].mean_fitness for a, b in zip(on.series, off.series)]
    diff = [a - b for a, b in zip(on.aggregate.mean["mean_fitness"], off.aggregate.mean["mean_fitness"])]
    return ComparisonReport(
        iterations=list(on.aggregate.iterations),
        fitness_difference=diff,
        final_difference=float(np.mean(paired)),
        final_difference_ci=bootstrap_mean_ci(paired, seed=bootstrap_seed),
        bootstrap_resamples=BOOTSTRAP_RESAMPLES,
        bootstrap_seed=bootstrap_seed,
        diversity_peak_sr_on=diversity_peak(on.aggregate),
        diversity_peak_sr_off=diversity_peak(off.aggregate),
        final_frac_imitators_sr_on=on.aggregate.mean["frac_imitators"][-1],
        final_frac_creators_sr_on=on.aggregate.mean["frac_creators"][-1],
        replicates=len(on.series),
    )


def compare_sr(cfg: ExperimentConfig, write: bool = True, charts: bool = False) -> ComparisonReport:
    missing = {"sr_on", "sr_off"} - set(cfg.variants)
    if missing:
        raise ConfigError(f"comparison needs variants sr_on and sr_off; missing {', '.join(sorted(missing))}")
    sub = ExperimentConfig(
        base=cfg.base,
        replicates=cfg.replicates,
        variants={k: cfg.variants[k] for k in ("sr_on", "sr_off")},
        output_dir=cfg.output_dir,
        jobs=cfg.jobs,
    )
    results = run_experiment(sub, write=write, charts=charts)
    report = comparison_from_results(results, bootstrap_seed=cfg.base.seed)
    if write:
        _write_json(cfg.output_dir / "comparison.json", report.to_dict())
    return report


@dataclass
class OracleReport:
    rules: dict[str, dict]
    ok: bool


def verify_oracle() -> OracleReport:
    rules = {}
    argmaxes = {}
    for rule in HEAD_RULES:
        best, argmax = oracle_max_and_argmax(rule, fresh=True)
        argmaxes[rule] = argmax
        rules[rule] = {
            "max_fitness": best,
            "optima": len(argmax),
            "encodings": sorted(encode_action(a) for a in argmax),
        }
    prose = argmaxes["prose"]
    ok = (
        rules["prose"]["max_fitness"] == 10.0
        and len(prose) == 8
        and all(a[BodyPart.HEAD] == 0 for a in prose)
    )
    return OracleReport(rules, ok)


def write_charts(out_dir: Path, aggregates: dict[str, AggregateSeries]) -> list[Path]:
    """Mean fitness and diversity against iteration, one line per variant."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    written = []
    with matplotlib.rc_context({"svg.hashsalt": "evoc", "svg.fonttype": "none"}):
        for metric, label in (("mean_fitness", "mean fitness"), ("diversity", "distinct actions")):
            fig, ax = plt.subplots(figsize=(6, 4))
            for name, agg in aggregates.items():
                ax.plot(agg.iterations, agg.mean[metric], label=name)
            ax.set_xlabel("iteration")
            ax.set_ylabel(label)
            ax.legend()
            fig.tight_layout()
            path = out_dir / f"{metric}.svg"
            try:
                fig.savefig(path, format="svg", metadata={"Date": None})
            except OSError as exc:
                raise ExperimentIOError(f"cannot write {path}: {exc.strerror or exc}") from exc
            finally:
                plt.close(fig)
            written.append(path)
    return written
