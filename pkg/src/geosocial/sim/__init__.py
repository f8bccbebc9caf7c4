"""Scenario fabrication, estimator driving, and accuracy reporting."""

from .runner import AccuracyReport, TrialResult, run, save_report, summarize
from .scenario import NoiseSpec, Scenario, ScenarioSpec, generate, load_scenario, save_scenario

__all__ = [
    "AccuracyReport",
    "NoiseSpec",
    "Scenario",
    "ScenarioSpec",
    "TrialResult",
    "generate",
    "load_scenario",
    "run",
    "save_report",
    "save_scenario",
    "summarize",
]
