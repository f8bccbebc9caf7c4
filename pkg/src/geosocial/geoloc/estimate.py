"""Position estimators over distance and bearing observations.

All estimators share one weighted Gauss-Newton path so a pure-distance
fusion problem reduces bit-for-bit to plain multilateration. Weights are
1/sigma^2 with sigma defaulting to 1 (unweighted).
"""

from __future__ import annotations

import itertools
import math
from typing import Optional, Sequence

import numpy as np

from ..errors import EstimationError
from . import solver
from .convert import poa_to_distances, rss_to_distance, toa_to_distance
from .models import Measurement, MeasurementKind, PathLossModel, PositionEstimate, ReferencePoint

COLLINEARITY_TOL_M = 1e-9
PARALLEL_TOL = 1e-9
MAX_POA_COMBINATIONS = 32
DEFAULT_POA_K_MAX = 7


def wrap_angle(a):
    """Wrap an angle (or array) into [-pi, pi)."""
    return (a + np.pi) % (2.0 * np.pi) - np.pi


def _weights(sigmas: Optional[Sequence[Optional[float]]], n: int) -> np.ndarray:
    if sigmas is None:
        return np.ones(n)
    if len(sigmas) != n:
        raise EstimationError("length_mismatch", "sigmas length must match observations")
    w_sqrt = np.empty(n)
    for i, sigma in enumerate(sigmas):
        if sigma is None:
            w_sqrt[i] = 1.0
        elif sigma > 0:
            w_sqrt[i] = 1.0 / sigma
        else:
            raise EstimationError("bad_sigma", "noise sigma must be positive when given")
    return w_sqrt


def _collinear(points: np.ndarray) -> bool:
    """True when every point lies within COLLINEARITY_TOL_M of one line."""
    if len(points) < 3:
        return True
    centered = points - points.mean(axis=0)
    # Largest perpendicular distance from the principal axis.
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    if s[0] == 0.0:  # all points coincide
        return True
    perp = centered @ vt[1]
    return bool(np.max(np.abs(perp)) < COLLINEARITY_TOL_M)


def _linear_distance_seed(xy: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Closed-form seed from differenced squared ranges.

    Subtracting the first range equation from the others cancels the
    quadratic term, leaving a linear system whose least-squares solution
    equals the true position for exact data. Falls back to the centroid
    when the geometry leaves the system unusable.
    """
    a = 2.0 * (xy[1:] - xy[0])
    b = (xy[1:] ** 2).sum(axis=1) - (xy[0] ** 2).sum() - d[1:] ** 2 + d[0] ** 2
    seed, *_ = np.linalg.lstsq(a, b, rcond=None)
    if seed.shape != (2,) or not np.all(np.isfinite(seed)):
        return xy.mean(axis=0)
    return seed


def _joint_residual_jacobian(dist_xy, dist_d, dist_w, bear_xy, bear_theta, bear_w):
    """Residual/Jacobian closure over stacked distance + bearing rows."""
    n_d = len(dist_d)
    n_b = len(bear_theta)

    def fn(x):
        r = np.empty(n_d + n_b)
        jac = np.empty((n_d + n_b, 2))
        if n_d:
            diff = x[None, :] - dist_xy
            rng = np.hypot(diff[:, 0], diff[:, 1])
            r[:n_d] = dist_w * (rng - dist_d)
            safe = np.where(rng > 0, rng, 1.0)
            jac[:n_d] = (dist_w / safe)[:, None] * diff
            jac[:n_d][rng == 0] = 0.0
        if n_b:
            dx = x[0] - bear_xy[:, 0]
            dy = x[1] - bear_xy[:, 1]
            rho2 = dx * dx + dy * dy
            r[n_d:] = bear_w * wrap_angle(np.arctan2(dy, dx) - bear_theta)
            safe = np.where(rho2 > 0, rho2, 1.0)
            jac[n_d:, 0] = bear_w * (-dy / safe)
            jac[n_d:, 1] = bear_w * (dx / safe)
            jac[n_d:][rho2 == 0] = 0.0
        return r, jac

    return fn


def _run(dist_xy, dist_d, dist_w, bear_xy, bear_theta, bear_w, x0) -> PositionEstimate:
    fn = _joint_residual_jacobian(dist_xy, dist_d, dist_w, bear_xy, bear_theta, bear_w)
    x, iterations, converged = solver.solve(fn, x0)
    r, _ = fn(x)
    n = len(r)
    return PositionEstimate(
        x=float(x[0]),
        y=float(x[1]),
        rms_residual_m=float(np.sqrt((r @ r) / n)),
        iterations=iterations,
        converged=converged,
        used_measurements=n,
    )


def estimate_multilateration(
    rps: Sequence[ReferencePoint],
    distances: Sequence[float],
    sigmas: Optional[Sequence[Optional[float]]] = None,
    x0: Optional[tuple[float, float]] = None,
) -> PositionEstimate:
    """Solve min sum w_i * (||x - rp_i|| - d_i)^2 by damped Gauss-Newton.

    Needs at least three non-collinear reference points. The default
    seed is the differenced-squared-range linear solution, which keeps
    the iteration out of mirror-image local minima.
    """
    if len(rps) < 3:
        raise EstimationError("insufficient_rps", "multilateration needs at least 3 reference points")
    if len(distances) != len(rps):
        raise EstimationError("length_mismatch", "one distance per reference point required")
    xy = np.array([(rp.x, rp.y) for rp in rps], dtype=float)
    if _collinear(xy):
        raise EstimationError("collinear_rps", "reference points are collinear; position is ambiguous")
    w_sqrt = _weights(sigmas, len(rps))
    d = np.asarray(distances, dtype=float)
    seed = np.asarray(x0, dtype=float) if x0 is not None else _linear_distance_seed(xy, d)
    empty = np.empty((0,))
    return _run(xy, d, w_sqrt, np.empty((0, 2)), empty, empty, seed)


def _bearing_seed(xy: np.ndarray, theta: np.ndarray) -> np.ndarray:
    # Least-squares intersection of the bearing lines: each line through
    # p_i with direction (cos t, sin t) satisfies (-sin t, cos t) . x = b_i.
    normals = np.stack([-np.sin(theta), np.cos(theta)], axis=1)
    b = np.einsum("ij,ij->i", normals, xy)
    seed, *_ = np.linalg.lstsq(normals, b, rcond=None)
    if not np.all(np.isfinite(seed)):
        return xy.mean(axis=0)
    return seed


def estimate_aoa(
    rps: Sequence[ReferencePoint],
    bearings_rad: Sequence[float],
    sigmas: Optional[Sequence[Optional[float]]] = None,
) -> PositionEstimate:
    """Triangulate from bearings by weighted Gauss-Newton.

    The seed is the least-squares intersection of the bearing lines; at
    least one pair of bearings must be non-parallel.
    """
    if len(rps) < 2:
        raise EstimationError("insufficient_rps", "bearing triangulation needs at least 2 reference points")
    if len(bearings_rad) != len(rps):
        raise EstimationError("length_mismatch", "one bearing per reference point required")
    theta = np.asarray(bearings_rad, dtype=float)
    if all(
        abs(math.sin(theta[i] - theta[j])) < PARALLEL_TOL
        for i in range(len(theta))
        for j in range(i + 1, len(theta))
    ):
        raise EstimationError("parallel_bearings", "all bearings are parallel; no intersection")
    xy = np.array([(rp.x, rp.y) for rp in rps], dtype=float)
    w_sqrt = _weights(sigmas, len(rps))
    seed = _bearing_seed(xy, theta)
    empty = np.empty((0,))
    return _run(np.empty((0, 2)), empty, empty, xy, theta, w_sqrt, seed)


def fuse_estimate(
    rps: Sequence[ReferencePoint],
    measurements: Sequence[Measurement],
    model: Optional[PathLossModel] = None,
    wavelength_m: Optional[float] = None,
    *,
    poa_k_max: int = DEFAULT_POA_K_MAX,
) -> PositionEstimate:
    """Convert mixed measurements to observations and solve jointly.

    TOA and RSS become distances, AOA bearings. Each POA measurement
    contributes an integer-cycle ambiguity set; when the number of
    candidate combinations stays within MAX_POA_COMBINATIONS the solver
    runs once per combination and keeps the smallest final residual,
    otherwise POA is dropped and flagged on the returned estimate.
    """
    by_id = {rp.rp_id: rp for rp in rps}
    dist_rows: list[tuple[float, float, float, float]] = []  # x, y, d, w_sqrt
    bear_rows: list[tuple[float, float, float, float]] = []
    poa_rows: list[tuple[float, float, list[float], float]] = []

    for m in measurements:
        rp = by_id.get(m.rp_id)
        if rp is None:
            raise EstimationError("unknown_rp", f"measurement references unknown RP: {m.rp_id}")
        w = 1.0 / m.noise_sigma if m.noise_sigma else 1.0
        if m.kind == MeasurementKind.TOA:
            dist_rows.append((rp.x, rp.y, toa_to_distance(m.value), w))
        elif m.kind == MeasurementKind.RSS:
            if model is None:
                raise EstimationError("missing_path_loss_model", "RSS measurements need a path-loss model")
            dist_rows.append((rp.x, rp.y, rss_to_distance(m.value, model), w))
        elif m.kind == MeasurementKind.AOA:
            bear_rows.append((rp.x, rp.y, m.value, w))
        elif m.kind == MeasurementKind.POA:
            if wavelength_m is None:
                raise EstimationError("missing_wavelength", "POA measurements need a carrier wavelength")
            poa_rows.append((rp.x, rp.y, poa_to_distances(m.value, wavelength_m, poa_k_max), w))

    poa_dropped = False
    combos = 1
    for row in poa_rows:
        combos *= len(row[2])
    if poa_rows and combos > MAX_POA_COMBINATIONS:
        poa_rows = []
        poa_dropped = True

    n_obs = len(dist_rows) + len(bear_rows) + len(poa_rows)
    if n_obs < 3:
        raise EstimationError(
            "insufficient_observations",
            f"need at least 3 independent observations, have {n_obs}",
        )

    if not bear_rows and not poa_rows:
        # Pure-distance problem: apply the multilateration geometry checks.
        unique_positions = {(x, y) for x, y, _, _ in dist_rows}
        pts = np.array(sorted(unique_positions))
        if len(pts) < 3 or _collinear(pts):
            raise EstimationError(
                "collinear_rps", "distance-only observations from collinear reference points"
            )
    if bear_rows and not dist_rows and not poa_rows:
        thetas = [t for _, _, t, _ in bear_rows]
        if all(
            abs(math.sin(thetas[i] - thetas[j])) < PARALLEL_TOL
            for i in range(len(thetas))
            for j in range(i + 1, len(thetas))
        ):
            raise EstimationError("parallel_bearings", "all bearings are parallel; no intersection")

    all_xy = np.array([(rp.x, rp.y) for rp in rps], dtype=float)

    bear_xy = np.array([(x, y) for x, y, _, _ in bear_rows]).reshape(-1, 2)
    bear_theta = np.array([t for _, _, t, _ in bear_rows])
    bear_w = np.array([w for _, _, _, w in bear_rows])

    best: Optional[PositionEstimate] = None
    candidate_sets = (
        itertools.product(*[row[2] for row in poa_rows]) if poa_rows else [()]
    )
    for candidates in candidate_sets:
        rows = dist_rows + [
            (row[0], row[1], cand, row[3]) for row, cand in zip(poa_rows, candidates)
        ]
        dist_xy = np.array([(x, y) for x, y, _, _ in rows]).reshape(-1, 2)
        dist_d = np.array([d for _, _, d, _ in rows])
        dist_w = np.array([w for _, _, _, w in rows])
        if len(rows) >= 3:
            seed = _linear_distance_seed(dist_xy, dist_d)
        elif len(bear_rows) >= 2:
            seed = _bearing_seed(bear_xy, bear_theta)
        else:
            seed = all_xy.mean(axis=0)
        estimate = _run(dist_xy, dist_d, dist_w, bear_xy, bear_theta, bear_w, seed)
        if best is None or estimate.rms_residual_m < best.rms_residual_m:
            best = estimate

    assert best is not None
    best.poa_dropped = poa_dropped
    return best
