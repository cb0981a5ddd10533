"""Synthetic families, seeded trials, and persisted experiment reports.

A trial draws samples from a known distribution, runs the learner and both
baselines, and scores everything with exact metrics against the truth.
Experiments fan trials out over a process pool and persist one JSON report
per trial plus a CSV of per-configuration means.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from .baselines import good_turing
from .core import (
    Config,
    Fingerprint,
    GeneralizedHistogram,
    HistolearnError,
    LabeledDistribution,
    SampleSet,
    UniformEntries,
    build_fingerprint,
    draw_samples,
    empirical_distribution,
    histogram_of,
)
from .label import LearnResult, learn_details
from .metrics import expected_distinct, l1_distance, opt_estimate, truncated_relative_emd

ESTIMATORS = ("learn", "empirical", "good_turing")

#: above this support size the uniform family uses the lazy representation
_UNIFORM_LAZY_THRESHOLD = 200_000


@dataclass(frozen=True)
class DistributionSpec:
    """A named synthetic family with its parameters."""

    family: str  # uniform | zipf | two_level | geometric | dirac
    params: Mapping[str, float] = field(default_factory=dict)

    def canonical(self) -> dict:
        return {"family": self.family, "params": {k: self.params[k] for k in sorted(self.params)}}


def _synthetic_labels(m: int) -> list[str]:
    width = len(str(m))
    return [f"e{i:0{width}d}" for i in range(1, m + 1)]


def make_distribution(spec: DistributionSpec) -> LabeledDistribution:
    """Deterministic labeled truth for a family; the largest atom absorbs
    float rounding so the total is 1 to within 1e-12."""
    family = spec.family
    p = dict(spec.params)
    if family == "uniform":
        m = int(p.get("m", 0))
        if m < 1:
            raise HistolearnError("uniform family needs m >= 1")
        if m > _UNIFORM_LAZY_THRESHOLD:
            return LabeledDistribution(UniformEntries(m), 0.0)
        labels = _synthetic_labels(m)
        prob = 1.0 / m
        entries = {label: prob for label in labels}
        entries[labels[0]] = 1.0 - prob * (m - 1)
        return LabeledDistribution(entries, 0.0)
    if family == "zipf":
        m = int(p.get("m", 0))
        s = float(p.get("s", 1.0))
        if m < 1 or s < 0:
            raise HistolearnError("zipf family needs m >= 1 and s >= 0")
        weights = np.arange(1, m + 1, dtype=float) ** (-s)
        probs = weights / weights.sum()
        labels = _synthetic_labels(m)
        entries = {label: float(prob) for label, prob in zip(labels, probs)}
        entries[labels[0]] += 1.0 - sum(entries.values())
        return LabeledDistribution(entries, 0.0)
    if family == "two_level":
        n_ref = int(p.get("n_ref", 0))
        if n_ref < 102:
            raise HistolearnError("two_level family needs n_ref >= 102")
        total = round(n_ref / 10.1)
        low_count = round(0.9 * total)
        labels = _synthetic_labels(total)
        entries = {label: 10.0 / n_ref for label in labels[:low_count]}
        entries.update({label: 11.0 / n_ref for label in labels[low_count:]})
        entries[labels[-1]] += 1.0 - sum(entries.values())
        return LabeledDistribution(entries, 0.0)
    if family == "geometric":
        m = int(p.get("m", 0))
        rho = float(p.get("rho", 0.5))
        if m < 1 or not 0.0 < rho < 1.0:
            raise HistolearnError("geometric family needs m >= 1 and rho in (0, 1)")
        weights = rho ** np.arange(m, dtype=float)
        probs = weights / weights.sum()
        labels = _synthetic_labels(m)
        entries = {label: float(prob) for label, prob in zip(labels, probs)}
        entries[labels[0]] += 1.0 - sum(entries.values())
        return LabeledDistribution(entries, 0.0)
    if family == "dirac":
        return LabeledDistribution({"e1": 1.0}, 0.0)
    raise HistolearnError(f"unknown family {spec.family!r}")


@dataclass(frozen=True)
class TrialReport:
    spec: DistributionSpec
    n: int
    seed: int
    estimators: dict
    recovery: dict
    opt_estimate_truth: float
    distinct_extrapolation: dict
    error: str | None = None

    def to_json_dict(self) -> dict:
        return {
            "spec": self.spec.canonical(),
            "n": self.n,
            "seed": self.seed,
            "estimators": self.estimators,
            "recovery": self.recovery,
            "opt_estimate_truth": self.opt_estimate_truth,
            "distinct_extrapolation": self.distinct_extrapolation,
            "error": self.error,
        }


@dataclass(frozen=True)
class TrialDetails:
    """run_trial output plus in-memory intermediates (never serialized)."""

    report: TrialReport
    truth_histogram: GeneralizedHistogram | None = None
    fingerprint: Fingerprint | None = None
    learned: LearnResult | None = None
    samples: SampleSet | None = None


def _failed_report(spec: DistributionSpec, n: int, seed: int, message: str) -> TrialReport:
    return TrialReport(
        spec=spec,
        n=n,
        seed=seed,
        estimators={},
        recovery={},
        opt_estimate_truth=float("nan"),
        distinct_extrapolation={},
        error=message,
    )


def run_trial_details(
    spec: DistributionSpec, n: int, seed: int, config: Config
) -> TrialDetails:
    """One seeded trial; component failures become a failed-trial record."""
    try:
        truth = make_distribution(spec)
        h_truth = histogram_of(truth)
        samples = draw_samples(truth, n, seed)
        fingerprint = build_fingerprint(samples)

        estimators: dict[str, dict] = {}
        t0 = time.perf_counter()
        learned = learn_details(samples, config)
        learn_ms = (time.perf_counter() - t0) * 1e3
        estimators["learn"] = {
            "l1": l1_distance(truth, learned.distribution),
            "assigned_mass": learned.distribution.total_assigned(),
            "runtime_ms": learn_ms,
        }
        for name, fn in (("empirical", empirical_distribution), ("good_turing", good_turing)):
            t0 = time.perf_counter()
            dist = fn(samples)
            ms = (time.perf_counter() - t0) * 1e3
            estimators[name] = {
                "l1": l1_distance(truth, dist),
                "assigned_mass": dist.total_assigned(),
                "runtime_ms": ms,
            }

        tau = config.tau_for(n)
        recovery = {
            "lp_objective": learned.recovery.lp_objective,
            "R_tau_to_truth": truncated_relative_emd(
                learned.recovery.histogram, h_truth, tau
            ),
            "tau": tau,
        }
        k = 5 * n
        extrapolation = {
            "k": k,
            "predicted": expected_distinct(learned.recovery.histogram, k),
            "analytic_truth": expected_distinct(h_truth, k),
        }
        report = TrialReport(
            spec=spec,
            n=n,
            seed=seed,
            estimators=estimators,
            recovery=recovery,
            opt_estimate_truth=opt_estimate(h_truth, n),
            distinct_extrapolation=extrapolation,
        )
        return TrialDetails(
            report=report,
            truth_histogram=h_truth,
            fingerprint=fingerprint,
            learned=learned,
            samples=samples,
        )
    except HistolearnError as exc:
        return TrialDetails(report=_failed_report(spec, n, seed, str(exc)))


def run_trial(spec: DistributionSpec, n: int, seed: int, config: Config) -> TrialReport:
    return run_trial_details(spec, n, seed, config).report


def _trial_filename(spec: DistributionSpec, n: int, seed: int, config: Config) -> str:
    descriptor = {
        "spec": spec.canonical(),
        "n": n,
        "seed": seed,
        "mode": config.mode,
        "grid": config.grid,
        "grid_ratio": config.grid_ratio,
        "kappa_override": config.kappa_override,
        "tau": config.tau,
    }
    digest = hashlib.sha256(
        json.dumps(descriptor, sort_keys=True).encode()
    ).hexdigest()[:12]
    return f"trial_{digest}.json"


def _run_trial_task(args) -> TrialReport:
    spec, n, seed, config = args
    return run_trial(spec, n, seed, config)


def _params_string(spec: DistributionSpec) -> str:
    return ";".join(f"{k}={spec.params[k]:g}" for k in sorted(spec.params))


SUMMARY_COLUMNS = [
    "family",
    "params",
    "n",
    "estimator",
    "mean_l1",
    "se_l1",
    "mean_runtime_ms",
    "trials",
]


def run_experiment(
    sweep,
    config: Config,
    output_dir,
    workers: int | None = None,
) -> list[dict]:
    """Run (spec, n, replicates) triples; persist per-trial JSON and a
    summary CSV.  Trial seeds are config.rng_seed + trial index, so reruns
    of the same sweep land on the same files with the same content
    (runtime_ms fields aside, which follow the wall clock)."""
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    if workers is None:
        workers = int(os.environ.get("HISTOLEARN_WORKERS", "1"))

    tasks = [
        (spec, n, config.rng_seed + t, config)
        for spec, n, replicates in sweep
        for t in range(replicates)
    ]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_run_trial_task, tasks))
    else:
        reports = [_run_trial_task(t) for t in tasks]

    for report in reports:
        name = _trial_filename(report.spec, report.n, report.seed, config)
        path = out / name
        path.write_text(
            json.dumps(report.to_json_dict(), sort_keys=True, indent=2) + "\n",
            encoding="utf-8",
        )

    rows: list[dict] = []
    groups: dict[tuple, list[TrialReport]] = {}
    for report in reports:
        key = (report.spec.family, _params_string(report.spec), report.n)
        groups.setdefault(key, []).append(report)
    for (family, params, n), group in sorted(groups.items()):
        ok = [r for r in group if r.error is None]
        for estimator in ESTIMATORS:
            l1s = np.array([r.estimators[estimator]["l1"] for r in ok])
            times = np.array([r.estimators[estimator]["runtime_ms"] for r in ok])
            rows.append(
                {
                    "family": family,
                    "params": params,
                    "n": n,
                    "estimator": estimator,
                    "mean_l1": float(l1s.mean()) if len(ok) else float("nan"),
                    "se_l1": float(l1s.std(ddof=1) / math.sqrt(len(ok)))
                    if len(ok) > 1
                    else 0.0,
                    "mean_runtime_ms": float(times.mean()) if len(ok) else float("nan"),
                    "trials": len(ok),
                }
            )

    with open(out / "summary.csv", "w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=SUMMARY_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    return rows
