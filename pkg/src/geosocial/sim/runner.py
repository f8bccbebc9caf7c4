"""Drive the estimator over a scenario and report accuracy.

Each trial synthesizes measurements for every (reference point, metric)
pair with additive Gaussian noise, fuses them into a position estimate,
and records the planar error. Per-trial RNG streams derive from
(scenario seed, trial index), so reports are byte-stable across runs
and independent of trial execution order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from ..errors import DomainError
from ..geoloc import (
    Measurement,
    MeasurementKind,
    distance_to_rss,
    fuse_estimate,
)
from ..geoloc.convert import SPEED_OF_LIGHT_M_S, TWO_PI
from .scenario import Scenario

#: Floor applied before RSS synthesis; the log-distance model diverges at d=0.
MIN_SYNTH_DISTANCE_M = 1e-9

RSS_LN10_OVER_10 = math.log(10.0) / 10.0


@dataclass
class TrialResult:
    index: int
    true_xy: tuple[float, float]
    estimate_xy: Optional[tuple[float, float]]
    error_m: Optional[float]
    rms_residual_m: Optional[float]
    iterations: int
    converged: bool
    used_measurements: int
    poa_dropped: bool
    failure: Optional[str]


@dataclass
class AccuracyReport:
    trials: list[TrialResult]
    summary: dict


def synthesize_measurements(scenario: Scenario, trial_index: int) -> list[Measurement]:
    """Fabricate one trial's measurements, deterministic in (seed, index)."""
    rng = np.random.default_rng([scenario.seed, trial_index])
    mt = np.asarray(scenario.true_positions[trial_index])
    noise = scenario.noise
    measurements: list[Measurement] = []
    for rp in scenario.rps:
        d = float(np.hypot(mt[0] - rp.x, mt[1] - rp.y))
        bearing = float(np.arctan2(mt[1] - rp.y, mt[0] - rp.x))
        for metric in scenario.metric_mix:
            if metric == "TOA":
                t = d / SPEED_OF_LIGHT_M_S
                if noise.toa_sigma_s > 0:
                    t += float(rng.normal(0.0, noise.toa_sigma_s))
                sigma = SPEED_OF_LIGHT_M_S * noise.toa_sigma_s or None
                measurements.append(
                    Measurement(rp.rp_id, MeasurementKind.TOA, t, noise_sigma=sigma)
                )
            elif metric == "RSS":
                rss = distance_to_rss(max(d, MIN_SYNTH_DISTANCE_M), scenario.path_loss)
                if noise.rss_sigma_db > 0:
                    rss += float(rng.normal(0.0, noise.rss_sigma_db))
                sigma = None
                if noise.rss_sigma_db > 0:
                    # First-order distance uncertainty of the inverted model.
                    sigma = (
                        d
                        * RSS_LN10_OVER_10
                        / scenario.path_loss.exponent_n
                        * noise.rss_sigma_db
                    ) or None
                measurements.append(
                    Measurement(rp.rp_id, MeasurementKind.RSS, rss, noise_sigma=sigma)
                )
            elif metric == "AOA":
                theta = bearing
                if noise.aoa_sigma_rad > 0:
                    theta += float(rng.normal(0.0, noise.aoa_sigma_rad))
                sigma = noise.aoa_sigma_rad or None
                measurements.append(
                    Measurement(rp.rp_id, MeasurementKind.AOA, theta, noise_sigma=sigma)
                )
            elif metric == "POA":
                phase = TWO_PI * ((d / scenario.wavelength_m) % 1.0)
                if phase >= TWO_PI:  # guard the half-open interval against rounding
                    phase = 0.0
                measurements.append(Measurement(rp.rp_id, MeasurementKind.POA, phase))
    return measurements


def _poa_k_max(scenario: Scenario) -> int:
    return int(math.ceil(scenario.area_m * math.sqrt(2.0) / scenario.wavelength_m))


def run_trial(scenario: Scenario, index: int) -> TrialResult:
    true_xy = scenario.true_positions[index]
    measurements = synthesize_measurements(scenario, index)
    try:
        estimate = fuse_estimate(
            scenario.rps,
            measurements,
            scenario.path_loss,
            scenario.wavelength_m,
            poa_k_max=_poa_k_max(scenario),
        )
    except DomainError as exc:
        return TrialResult(
            index=index,
            true_xy=true_xy,
            estimate_xy=None,
            error_m=None,
            rms_residual_m=None,
            iterations=0,
            converged=False,
            used_measurements=0,
            poa_dropped=False,
            failure=exc.code,
        )
    error = math.hypot(estimate.x - true_xy[0], estimate.y - true_xy[1])
    return TrialResult(
        index=index,
        true_xy=true_xy,
        estimate_xy=(estimate.x, estimate.y),
        error_m=error,
        rms_residual_m=estimate.rms_residual_m,
        iterations=estimate.iterations,
        converged=estimate.converged,
        used_measurements=estimate.used_measurements,
        poa_dropped=estimate.poa_dropped,
        failure=None,
    )


def summarize(trials: list[TrialResult]) -> dict:
    """Summary statistics, recomputable from the per-trial rows."""
    errors = [t.error_m for t in trials if t.error_m is not None]
    converged = sum(1 for t in trials if t.converged)
    n = len(trials)
    if errors:
        arr = np.asarray(errors)
        summary = {
            "median_m": float(np.median(arr)),
            "p95_m": float(np.percentile(arr, 95)),
            "rmse_m": float(np.sqrt(np.mean(arr**2))),
        }
    else:
        summary = {"median_m": None, "p95_m": None, "rmse_m": None}
    summary["convergence_rate"] = converged / n if n else 0.0
    summary["trials"] = n
    summary["failed_trials"] = sum(1 for t in trials if t.failure is not None)
    return summary


def run(scenario: Scenario) -> AccuracyReport:
    """Estimate every trial; engine failures mark the trial, not the run."""
    trials = [run_trial(scenario, i) for i in range(scenario.trials)]
    trials.sort(key=lambda t: t.index)
    return AccuracyReport(trials=trials, summary=summarize(trials))


def report_lines(report: AccuracyReport) -> Iterable[str]:
    for t in report.trials:
        yield json.dumps(
            {
                "kind": "trial",
                "index": t.index,
                "true": list(t.true_xy),
                "estimate": list(t.estimate_xy) if t.estimate_xy else None,
                "error_m": t.error_m,
                "rms_residual_m": t.rms_residual_m,
                "iterations": t.iterations,
                "converged": t.converged,
                "used_measurements": t.used_measurements,
                "poa_dropped": t.poa_dropped,
                "failure": t.failure,
            },
            sort_keys=True,
        )
    yield json.dumps({"kind": "summary", **report.summary}, sort_keys=True)


def save_report(report: AccuracyReport, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for line in report_lines(report):
            fh.write(line + "\n")
