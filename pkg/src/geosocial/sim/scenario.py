"""Scenario fabrication: reference points, true positions, noise spec.

Scenarios are fully determined by their seed; the same spec produces
byte-identical scenario files on every run. Files are line-delimited
JSON so goldens diff cleanly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from ..errors import ValidationError
from ..geoloc import PathLossModel, ReferencePoint

METRICS = ("TOA", "RSS", "AOA", "POA")

#: Fraction of the square kept as a margin when placing true positions.
INTERIOR_MARGIN = 0.05


@dataclass
class NoiseSpec:
    toa_sigma_s: float = 0.0
    rss_sigma_db: float = 0.0
    aoa_sigma_rad: float = 0.0


@dataclass
class ScenarioSpec:
    seed: int
    area_m: float
    n_rps: int
    trials: int
    metric_mix: tuple[str, ...] = ("TOA",)
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    wavelength_m: float = 100.0
    path_loss: PathLossModel = field(default_factory=lambda: PathLossModel(p0_dbm=-40.0))

    def validate(self) -> "ScenarioSpec":
        if self.area_m <= 0:
            raise ValidationError("bad_spec", "area_m must be positive")
        if self.trials < 1:
            raise ValidationError("bad_spec", "trials must be at least 1")
        mix = tuple(self.metric_mix)
        if not mix or any(m not in METRICS for m in mix):
            raise ValidationError("bad_spec", f"metric_mix must be a non-empty subset of {METRICS}")
        min_rps = 2 if "AOA" in mix else 3
        if self.n_rps < min_rps:
            raise ValidationError(
                "bad_spec",
                f"{'AOA mixes need' if min_rps == 2 else 'distance-only mixes need'} at least {min_rps} reference points",
            )
        for name, sigma in (
            ("toa_sigma_s", self.noise.toa_sigma_s),
            ("rss_sigma_db", self.noise.rss_sigma_db),
            ("aoa_sigma_rad", self.noise.aoa_sigma_rad),
        ):
            if sigma < 0:
                raise ValidationError("bad_spec", f"{name} must be non-negative")
        if self.wavelength_m <= 0:
            raise ValidationError("bad_spec", "wavelength_m must be positive")
        return self


@dataclass
class Scenario:
    seed: int
    area_m: float
    rps: list[ReferencePoint]
    trials: int
    true_positions: list[tuple[float, float]]
    noise: NoiseSpec
    metric_mix: tuple[str, ...]
    wavelength_m: float
    path_loss: PathLossModel


def generate(spec: ScenarioSpec) -> Scenario:
    """Deterministically fabricate a scenario from its spec."""
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    rp_xy = rng.uniform(0.0, spec.area_m, size=(spec.n_rps, 2))
    margin = INTERIOR_MARGIN * spec.area_m
    true_xy = rng.uniform(margin, spec.area_m - margin, size=(spec.trials, 2))
    return Scenario(
        seed=spec.seed,
        area_m=spec.area_m,
        rps=[ReferencePoint(f"rp{i}", float(x), float(y)) for i, (x, y) in enumerate(rp_xy)],
        trials=spec.trials,
        true_positions=[(float(x), float(y)) for x, y in true_xy],
        noise=spec.noise,
        metric_mix=tuple(spec.metric_mix),
        wavelength_m=spec.wavelength_m,
        path_loss=spec.path_loss,
    )


# -- spec/scenario (de)serialization -------------------------------------------


def spec_from_dict(data: dict) -> ScenarioSpec:
    try:
        noise = data.get("noise", {})
        loss = data.get("path_loss", {})
        return ScenarioSpec(
            seed=int(data["seed"]),
            area_m=float(data["area_m"]),
            n_rps=int(data["n_rps"]),
            trials=int(data["trials"]),
            metric_mix=tuple(data.get("metric_mix", ["TOA"])),
            noise=NoiseSpec(
                toa_sigma_s=float(noise.get("toa_sigma_s", 0.0)),
                rss_sigma_db=float(noise.get("rss_sigma_db", 0.0)),
                aoa_sigma_rad=float(noise.get("aoa_sigma_rad", 0.0)),
            ),
            wavelength_m=float(data.get("wavelength_m", 100.0)),
            path_loss=PathLossModel(
                p0_dbm=float(loss.get("p0_dbm", -40.0)),
                d0_m=float(loss.get("d0_m", 1.0)),
                exponent_n=float(loss.get("exponent_n", 2.0)),
            ),
        ).validate()
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError("bad_spec", f"invalid scenario spec: {exc}")


def load_spec(path) -> ScenarioSpec:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError("bad_spec", f"spec is not valid JSON: {exc}")
    return spec_from_dict(data)


def _meta_line(scenario: Scenario) -> dict:
    return {
        "kind": "meta",
        "seed": scenario.seed,
        "area_m": scenario.area_m,
        "trials": scenario.trials,
        "metric_mix": list(scenario.metric_mix),
        "noise": {
            "toa_sigma_s": scenario.noise.toa_sigma_s,
            "rss_sigma_db": scenario.noise.rss_sigma_db,
            "aoa_sigma_rad": scenario.noise.aoa_sigma_rad,
        },
        "wavelength_m": scenario.wavelength_m,
        "path_loss": {
            "p0_dbm": scenario.path_loss.p0_dbm,
            "d0_m": scenario.path_loss.d0_m,
            "exponent_n": scenario.path_loss.exponent_n,
        },
    }


def scenario_lines(scenario: Scenario) -> Iterable[str]:
    yield json.dumps(_meta_line(scenario), sort_keys=True)
    for rp in scenario.rps:
        yield json.dumps({"kind": "rp", "rp_id": rp.rp_id, "x": rp.x, "y": rp.y}, sort_keys=True)
    for index, (x, y) in enumerate(scenario.true_positions):
        yield json.dumps({"kind": "trial", "index": index, "true": [x, y]}, sort_keys=True)


def save_scenario(scenario: Scenario, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for line in scenario_lines(scenario):
            fh.write(line + "\n")


def load_scenario(path) -> Scenario:
    meta: Optional[dict] = None
    rps: list[ReferencePoint] = []
    trials: list[tuple[int, tuple[float, float]]] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError("bad_scenario", f"line {line_no} is not JSON: {exc}")
            kind = record.get("kind")
            if kind == "meta":
                meta = record
            elif kind == "rp":
                rps.append(ReferencePoint(record["rp_id"], float(record["x"]), float(record["y"])))
            elif kind == "trial":
                trials.append((int(record["index"]), (float(record["true"][0]), float(record["true"][1]))))
            else:
                raise ValidationError("bad_scenario", f"line {line_no}: unknown kind {kind!r}")
    if meta is None:
        raise ValidationError("bad_scenario", "scenario file has no meta line")
    trials.sort(key=lambda t: t[0])
    noise = meta.get("noise", {})
    loss = meta.get("path_loss", {})
    return Scenario(
        seed=int(meta["seed"]),
        area_m=float(meta["area_m"]),
        rps=rps,
        trials=len(trials),
        true_positions=[xy for _, xy in trials],
        noise=NoiseSpec(
            toa_sigma_s=float(noise.get("toa_sigma_s", 0.0)),
            rss_sigma_db=float(noise.get("rss_sigma_db", 0.0)),
            aoa_sigma_rad=float(noise.get("aoa_sigma_rad", 0.0)),
        ),
        metric_mix=tuple(meta.get("metric_mix", ["TOA"])),
        wavelength_m=float(meta.get("wavelength_m", 100.0)),
        path_loss=PathLossModel(
            p0_dbm=float(loss.get("p0_dbm", -40.0)),
            d0_m=float(loss.get("d0_m", 1.0)),
            exponent_n=float(loss.get("exponent_n", 2.0)),
        ),
    )
