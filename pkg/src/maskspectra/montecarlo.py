"""Monte Carlo validation of the bounds: streaming trial statistics,
reference-table and figure-curve generation.

Determinism contract: a run is a pure function of (seed, trials,
thresholds). Trials are processed in fixed-size chunks and chunk results
are merged in chunk order, so any worker count produces bit-identical
results; per-trial RNG streams are keyed by trial index.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import bounds
from .masks import MaskConfig, generate_mask
from .spectrum import max_nonzero_bin, spectrum_of_mask

__all__ = [
    "RunningStats",
    "ExperimentSpec",
    "TrialStats",
    "run_experiment",
    "exceedance_rate",
    "table1_report",
    "figure_curves",
    "noise_ratio_curve",
    "records_to_csv",
    "records_to_json",
    "TABLE1_ROWS",
    "TABLE1_COLUMNS",
    "FIGURE_COLUMNS",
]

_CHUNK_TRIALS = 512

# Reference grid: (N, p) pairs of the comparison table. The mask length of
# the middle three rows is 1543 throughout (their printed support sizes
# 772/1235/155 only make sense for that length).
TABLE1_ROWS: tuple[tuple[int, float], ...] = (
    (127, 0.5),
    (127, 0.8),
    (127, 0.1),
    (1543, 0.5),
    (1543, 0.8),
    (1543, 0.1),
    (131071, 0.5),
    (131071, 0.8),
    (131071, 0.1),
)

TABLE1_COLUMNS = ("N", "p", "n_p", "sim_max_mean", "sim_global_max", "sim_ratio", "bound_worst", "bound_ratio")
FIGURE_COLUMNS = ("N", "sim_max_mean", "sim_global_max", "mean_abs", "gaussian_T", "sigma3", "sigma4", "worst_case")


class RunningStats:
    """Mergeable streaming aggregate: count, mean, variance, min, max."""

    __slots__ = ("count", "mean", "_m2", "min", "max")

    def __init__(self) -> None:
        self.count = 0
        self.mean = 0.0
        self._m2 = 0.0
        self.min = math.inf
        self.max = -math.inf

    def push(self, x: float) -> None:
        self.count += 1
        delta = x - self.mean
        self.mean += delta / self.count
        self._m2 += delta * (x - self.mean)
        if x < self.min:
            self.min = x
        if x > self.max:
            self.max = x

    def merge(self, other: "RunningStats") -> None:
        """Combine with another aggregate (Chan et al. update)."""
        if other.count == 0:
            return
        if self.count == 0:
            self.count, self.mean, self._m2 = other.count, other.mean, other._m2
            self.min, self.max = other.min, other.max
            return
        total = self.count + other.count
        delta = other.mean - self.mean
        self._m2 += other._m2 + delta * delta * self.count * other.count / total
        self.mean += delta * other.count / total
        self.count = total
        self.min = min(self.min, other.min)
        self.max = max(self.max, other.max)

    @property
    def variance(self) -> float:
        """Sample variance (ddof=1); 0 for fewer than two samples."""
        return self._m2 / (self.count - 1) if self.count > 1 else 0.0

    def __eq__(self, other) -> bool:
        if not isinstance(other, RunningStats):
            return NotImplemented
        return (self.count, self.mean, self._m2, self.min, self.max) == (
            other.count,
            other.mean,
            other._m2,
            other.min,
            other.max,
        )

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "mean": self.mean,
            "variance": self.variance,
            "min": self.min if self.count else None,
            "max": self.max if self.count else None,
        }


@dataclass(frozen=True)
class ExperimentSpec:
    """One simulation campaign: mask parameters, trial count, thresholds."""

    config: MaskConfig
    trials: int
    thresholds: tuple[tuple[str, float], ...] = ()
    workers: int = 1

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials!r}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers!r}")
        labels = [label for label, _ in self.thresholds]
        if len(set(labels)) != len(labels):
            raise ValueError("threshold labels must be unique")


@dataclass
class TrialStats:
    """Streaming aggregates over trials of per-trial spectral maxima."""

    trials: int = 0
    per_trial_max: RunningStats = field(default_factory=RunningStats)
    mean_abs: RunningStats = field(default_factory=RunningStats)
    n_p_stats: RunningStats = field(default_factory=RunningStats)
    exceedance_counts: dict[str, int] = field(default_factory=dict)

    @property
    def global_max(self) -> float:
        return self.per_trial_max.max if self.trials else 0.0

    @property
    def mean_abs_coeff(self) -> float:
        """Mean of |A_k| over all k != 0 and all trials.

        Every trial contributes the same number of bins, so this equals the
        mean over trials of the per-trial bin means.
        """
        return self.mean_abs.mean

    def merge(self, other: "TrialStats") -> None:
        self.trials += other.trials
        self.per_trial_max.merge(other.per_trial_max)
        self.mean_abs.merge(other.mean_abs)
        self.n_p_stats.merge(other.n_p_stats)
        for label, count in other.exceedance_counts.items():
            self.exceedance_counts[label] = self.exceedance_counts.get(label, 0) + count

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "per_trial_max": self.per_trial_max.to_dict(),
            "global_max": self.global_max,
            "mean_abs_coeff": self.mean_abs_coeff,
            "exceedance_counts": dict(self.exceedance_counts),
            "n_p_stats": self.n_p_stats.to_dict(),
        }


def _run_chunk(args: tuple) -> TrialStats:
    config, start, stop, thresholds = args
    stats = TrialStats(exceedance_counts={label: 0 for label, _ in thresholds})
    for t in range(start, stop):
        mask = generate_mask(config, t)
        s = spectrum_of_mask(mask)
        _, peak = max_nonzero_bin(s)
        stats.trials += 1
        stats.per_trial_max.push(peak)
        stats.mean_abs.push(float(np.abs(s.coeffs[1:]).mean()))
        stats.n_p_stats.push(float(mask.n_p))
        for label, value in thresholds:
            if peak > value:  # strict exceedance
                stats.exceedance_counts[label] += 1
    return stats


def _chunk_args(config: MaskConfig, trials: int, thresholds) -> list[tuple]:
    return [
        (config, start, min(start + _CHUNK_TRIALS, trials), tuple(thresholds))
        for start in range(0, trials, _CHUNK_TRIALS)
    ]


def run_experiment(spec: ExperimentSpec) -> TrialStats:
    """Run all trials and reduce their statistics deterministically.

    Any worker failure propagates and the whole result is discarded;
    there are no partial results.
    """
    tasks = _chunk_args(spec.config, spec.trials, spec.thresholds)
    total = TrialStats(exceedance_counts={label: 0 for label, _ in spec.thresholds})
    if spec.workers == 1 or len(tasks) == 1:
        for task in tasks:
            total.merge(_run_chunk(task))
        return total
    with ProcessPoolExecutor(max_workers=spec.workers) as pool:
        for chunk_stats in pool.map(_run_chunk, tasks):
            total.merge(chunk_stats)
    return total


def exceedance_rate(stats: TrialStats, label: str) -> float:
    """Fraction of trials whose spectral max strictly exceeded the threshold."""
    if label not in stats.exceedance_counts:
        raise KeyError(f"unknown threshold label {label!r}")
    return stats.exceedance_counts[label] / stats.trials


def table1_report(
    rows,
    trials: int,
    seed: int,
    large_n_trials: int = 1000,
    large_n_threshold: int = 65536,
    workers: int = 1,
) -> list[dict]:
    """Reference-table rows: simulated maxima next to the worst-case bound.

    sim_max_mean is the mean over trials of the per-trial max; sim_ratio
    divides it by n_p = ceil(N*p). bound_ratio is bound/(N*p), the
    normalization the reference table prints. Rows with N >= large_n_threshold
    run large_n_trials trials (pass large_n_trials=trials to force the full
    count; at N=131071 that is a long run).
    """
    if not rows:
        raise ValueError("rows must be non-empty")
    out = []
    for n, p in rows:
        row_trials = large_n_trials if n >= large_n_threshold else trials
        stats = run_experiment(ExperimentSpec(MaskConfig(n, p, seed), row_trials, workers=workers))
        n_p = math.ceil(n * p)
        bound = bounds.worst_case_bound(n, n_p)
        out.append(
            {
                "N": n,
                "p": p,
                "n_p": n_p,
                "sim_max_mean": stats.per_trial_max.mean,
                "sim_global_max": stats.global_max,
                "sim_ratio": stats.per_trial_max.mean / n_p,
                "bound_worst": bound,
                "bound_ratio": bound / (n * p),
            }
        )
    return out


def figure_curves(
    p: float,
    n_values,
    trials: int,
    seed: int,
    eps: float = 1e-4,
    workers: int = 1,
) -> list[dict]:
    """Per-N bound and simulation curves at a fixed sampling rate."""
    if not n_values:
        raise ValueError("n_values must be non-empty")
    out = []
    for n in n_values:
        spec = bounds.BoundSpec(n, p, epsilon=eps)
        stats = run_experiment(ExperimentSpec(MaskConfig(n, p, seed), trials, workers=workers))
        sigma3 = bounds.sigma_bound(n, p, 3)
        out.append(
            {
                "N": n,
                "sim_max_mean": stats.per_trial_max.mean,
                "sim_global_max": stats.global_max,
                "mean_abs": stats.mean_abs_coeff,
                "gaussian_T": bounds.gaussian_bound(spec),
                "sigma3": sigma3,
                "sigma4": (4.0 / 3.0) * sigma3,
                "worst_case": bounds.worst_case_bound(n, math.ceil(n * p)),
            }
        )
    return out


def _noise_ratio_chunk(args: tuple) -> np.ndarray:
    config, start, stop = args
    peak = np.zeros(config.n - 1)
    for t in range(start, stop):
        s = spectrum_of_mask(generate_mask(config, t))
        np.maximum(peak, np.abs(s.coeffs[1:]), out=peak)
    return peak


def noise_ratio_curve(config: MaskConfig, trials: int, workers: int = 1) -> np.ndarray:
    """Per-bin max over trials of |A_k|/(N*p) for k = 1..N-1.

    The aliasing-noise level of the sampled spectrum relative to the
    signal line; elementwise max merges are exact, so the reduction is
    order-insensitive.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials!r}")
    tasks = [
        (config, start, min(start + _CHUNK_TRIALS, trials))
        for start in range(0, trials, _CHUNK_TRIALS)
    ]
    peak = np.zeros(config.n - 1)
    if workers == 1 or len(tasks) == 1:
        for task in tasks:
            np.maximum(peak, _noise_ratio_chunk(task), out=peak)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_noise_ratio_chunk, tasks):
                np.maximum(peak, part, out=peak)
    return peak / (config.n * config.p)


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


def records_to_csv(records: list[dict], columns=None) -> str:
    """CSV with a header row; floats at 9 significant digits, LF endings."""
    if not records:
        raise ValueError("records must be non-empty")
    cols = list(columns) if columns is not None else list(records[0].keys())
    lines = [",".join(cols)]
    for rec in records:
        lines.append(",".join(_format_cell(rec[c]) for c in cols))
    return "\n".join(lines) + "\n"


def records_to_json(payload) -> str:
    """JSON mirror of the CSV/report payloads."""
    return json.dumps(payload, indent=2) + "\n"
