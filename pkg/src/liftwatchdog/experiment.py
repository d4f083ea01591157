"""Seeded Monte Carlo comparison of greedy subset merging against complete merging."""

from __future__ import annotations

import csv
import io
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .distribution import SAMPLER_DESCRIPTION, sample_random_joint, trial_seed
from .errors import IoFailure
from .lift import compute_lift_profile, risk_split
from .mechanism import build_channel, complete_merging, nmil, output_omegas
from .partition import greedy_refine

logger = logging.getLogger(__name__)

METHODS = ("greedy", "complete")
PAPER_EPSILONS = tuple(0.25 * k for k in range(1, 11))
THREADS_ENV = "LIFT_WATCHDOG_THREADS"

CSV_COLUMNS = (
    "epsilon",
    "method",
    "mean_hr_leakage",
    "std_hr_leakage",
    "mean_overall_leakage",
    "std_overall_leakage",
    "mean_nmil",
    "std_nmil",
    "infeasible_count",
    "excluded_trials",
)


@dataclass(frozen=True)
class SweepConfig:
    num_trials: int = 1000
    num_secrets: int = 13
    num_symbols: int = 20
    epsilons: tuple[float, ...] = PAPER_EPSILONS
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "epsilons", tuple(float(e) for e in self.epsilons))
        if min(self.num_trials, self.num_secrets, self.num_symbols) < 1:
            raise ValueError("num_trials, num_secrets and num_symbols must all be >= 1")
        if not self.epsilons:
            raise ValueError("epsilons must not be empty")
        if not all(e > 0 for e in self.epsilons):
            raise ValueError("epsilons must be positive")
        if any(b <= a for a, b in zip(self.epsilons, self.epsilons[1:])):
            raise ValueError("epsilons must be strictly increasing")


@dataclass(frozen=True)
class MethodStats:
    epsilon: float
    method: str
    mean_hr_leakage: float
    std_hr_leakage: float
    mean_overall_leakage: float
    std_overall_leakage: float
    mean_nmil: float
    std_nmil: float
    infeasible_count: int
    excluded_trials: int


@dataclass(frozen=True, eq=False)
class TrialData:
    """Raw per-trial metrics, arrays shaped (trials, epsilons, methods).

    ``hr_leakage`` is NaN for trials with no high-risk symbol.
    """

    hr_leakage: np.ndarray
    overall_leakage: np.ndarray
    nmil: np.ndarray
    feasible: np.ndarray


@dataclass(frozen=True, eq=False)
class SweepResult:
    config: SweepConfig
    per_epsilon: tuple[MethodStats, ...]
    trials: TrialData = field(repr=False)

    def stats(self, epsilon: float, method: str) -> MethodStats:
        for rec in self.per_epsilon:
            if rec.method == method and rec.epsilon == epsilon:
                return rec
        raise KeyError((epsilon, method))


def run_trial(cfg: SweepConfig, trial: int):
    """Metrics of one sampled joint at every epsilon, for both methods."""
    joint = sample_random_joint(cfg.num_secrets, cfg.num_symbols, trial_seed(cfg.seed, trial))
    profile = compute_lift_profile(joint)
    shape = (len(cfg.epsilons), len(METHODS))
    hr = np.full(shape, np.nan)
    overall = np.empty(shape)
    loss = np.zeros(shape)
    feasible = np.ones(shape, dtype=bool)
    for e, eps in enumerate(cfg.epsilons):
        split = risk_split(profile, eps)
        parts = (greedy_refine(joint, split).partition, complete_merging(split))
        for m, part in enumerate(parts):
            omegas = output_omegas(build_channel(joint, part))
            overall[e, m] = omegas.max()
            if split.high_risk:
                merged = omegas[len(split.low_risk):]
                hr[e, m] = merged.max()
                feasible[e, m] = bool(np.all(merged <= eps))
                loss[e, m] = nmil(joint, part)
    return hr, overall, loss, feasible


def _run_chunk(args):
    cfg, trials = args
    return [run_trial(cfg, t) for t in trials]


def resolve_workers(workers: int | None = None) -> int:
    if workers is None:
        raw = os.environ.get(THREADS_ENV, "1").strip() or "1"
        try:
            workers = int(raw)
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if workers < 0:
        raise ValueError("worker count must be >= 0")
    return workers or (os.cpu_count() or 1)


def _aggregate(cfg: SweepConfig, data: TrialData) -> tuple[MethodStats, ...]:
    records = []
    for e, eps in enumerate(cfg.epsilons):
        for m, method in enumerate(METHODS):
            hr = data.hr_leakage[:, e, m]
            kept = hr[~np.isnan(hr)]
            overall = data.overall_leakage[:, e, m]
            loss = data.nmil[:, e, m]
            records.append(
                MethodStats(
                    epsilon=eps,
                    method=method,
                    mean_hr_leakage=float(kept.mean()) if kept.size else float("nan"),
                    std_hr_leakage=float(kept.std()) if kept.size else float("nan"),
                    mean_overall_leakage=float(overall.mean()),
                    std_overall_leakage=float(overall.std()),
                    mean_nmil=float(loss.mean()),
                    std_nmil=float(loss.std()),
                    infeasible_count=int((~data.feasible[:, e, m]).sum()),
                    excluded_trials=int(hr.size - kept.size),
                )
            )
    return tuple(records)


def run_sweep(cfg: SweepConfig, workers: int | None = None) -> SweepResult:
    """Run every trial and aggregate mean / population std per (epsilon, method).

    ``workers`` defaults to ``$LIFT_WATCHDOG_THREADS`` (0 means all cores).
    Results are reduced in trial order, so they do not depend on scheduling.
    """
    workers = min(resolve_workers(workers), cfg.num_trials)
    if workers <= 1:
        rows = [run_trial(cfg, t) for t in range(cfg.num_trials)]
    else:
        chunks = [(cfg, list(range(w, cfg.num_trials, workers))) for w in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            done = list(pool.map(_run_chunk, chunks))
        rows = [None] * cfg.num_trials
        for (_, trials), out in zip(chunks, done):
            for t, row in zip(trials, out):
                rows[t] = row
    logger.info("sweep finished: %d trials x %d epsilons", cfg.num_trials, len(cfg.epsilons))
    data = TrialData(*(np.stack([r[i] for r in rows]) for i in range(4)))
    return SweepResult(config=cfg, per_epsilon=_aggregate(cfg, data), trials=data)


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    if isinstance(v, str):
        return v
    return f"{float(v):.12g}"


def provenance(cfg: SweepConfig) -> dict:
    return {
        "num_trials": cfg.num_trials,
        "num_secrets": cfg.num_secrets,
        "num_symbols": cfg.num_symbols,
        "epsilons": list(cfg.epsilons),
        "seed": cfg.seed,
        "generator": SAMPLER_DESCRIPTION,
        "trial_seeding": "SeedSequence([seed, trial])",
        "std": "population (ddof=0)",
        "log_base": "e",
    }


def csv_text(result: SweepResult) -> str:
    buf = io.StringIO()
    cfg = result.config
    buf.write(
        f"# trials={cfg.num_trials} secrets={cfg.num_secrets} symbols={cfg.num_symbols} "
        f"seed={cfg.seed} generator={SAMPLER_DESCRIPTION}; "
        "std=population (ddof=0); leakage in nats\n"
    )
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in result.per_epsilon:
        writer.writerow([_fmt(getattr(rec, col)) for col in CSV_COLUMNS])
    return buf.getvalue()


def emit_csv(result: SweepResult, path) -> None:
    try:
        Path(path).write_text(csv_text(result))
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def result_to_dict(result: SweepResult) -> dict:
    def clean(v):
        if isinstance(v, float) and not np.isfinite(v):
            return None
        return v

    return {
        "config": provenance(result.config),
        "per_epsilon": [
            {col: clean(getattr(rec, col)) for col in CSV_COLUMNS} for rec in result.per_epsilon
        ],
    }


def emit_json(result: SweepResult, path) -> None:
    try:
        Path(path).write_text(json.dumps(result_to_dict(result), indent=2) + "\n")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
