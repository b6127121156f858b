"""Pose error metrics and dataset-level score aggregation.

Per-sample errors follow the SPEED-style definitions: absolute and
normalized translation errors, quaternion angular error, and thresholded
("starred") variants that zero out errors below the label calibration
noise floor. Aggregates are plain arithmetic means plus lower medians.
All angles are radians internally; degrees appear only in formatted output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import Pose, quat_angular_error

# Calibration-noise floors below which an estimate counts as perfect.
ROTATION_THRESHOLD_RAD = 0.00295
TRANSLATION_THRESHOLD = 2.173e-3  # dimensionless (mm of error per m of range)


@dataclass(frozen=True)
class PoseErrors:
    """Per-sample errors: e_t (m), e_t_norm, e_q (rad) and starred variants."""

    e_t: float
    e_t_norm: float
    e_q: float
    e_q_star: float
    e_t_norm_star: float


@dataclass(frozen=True)
class ScoreReport:
    """Dataset-level aggregates over N samples."""

    E_T: float  # mean e_t, meters
    E_R: float  # mean e_q, radians
    S_P_star: float  # mean (e_t_norm_star + e_q_star)
    N: int
    median_e_t: float
    median_e_q: float

    @property
    def E_R_deg(self) -> float:
        return math.degrees(self.E_R)

    @property
    def median_e_q_deg(self) -> float:
        return math.degrees(self.median_e_q)

    def to_json_dict(self) -> dict:
        return {
            "E_T_m": self.E_T,
            "E_R_rad": self.E_R,
            "E_R_deg": self.E_R_deg,
            "S_P_star": self.S_P_star,
            "N": self.N,
            "median_e_t_m": self.median_e_t,
            "median_e_q_deg": self.median_e_q_deg,
        }


def apply_thresholds(e_q: float, e_t_norm: float) -> tuple[float, float]:
    """Zero out errors strictly below the calibration-noise thresholds."""
    if e_q < 0 or e_t_norm < 0:
        raise ValueError("errors must be non-negative")
    e_q_star = 0.0 if e_q < ROTATION_THRESHOLD_RAD else e_q
    e_t_norm_star = 0.0 if e_t_norm < TRANSLATION_THRESHOLD else e_t_norm
    return e_q_star, e_t_norm_star


def pose_errors(pred: Pose, gt: Pose) -> PoseErrors:
    """Compute the per-sample error set of a prediction against ground truth."""
    gt_norm = float(np.linalg.norm(gt.t))
    if gt_norm < 1e-12:
        raise ValueError("ground-truth position has zero norm")
    e_t = float(np.linalg.norm(pred.t - gt.t))
    e_t_norm = e_t / gt_norm
    e_q = quat_angular_error(pred.q, gt.q)
    e_q_star, e_t_norm_star = apply_thresholds(e_q, e_t_norm)
    return PoseErrors(e_t=e_t, e_t_norm=e_t_norm, e_q=e_q, e_q_star=e_q_star, e_t_norm_star=e_t_norm_star)


def _lower_median(values) -> float:
    """Exact lower median: element at index (n-1)//2 of the sorted values."""
    s = sorted(values)
    return float(s[(len(s) - 1) // 2])


def aggregate(errors) -> ScoreReport:
    """Aggregate per-sample errors into a ScoreReport.

    Means use exactly-rounded summation (math.fsum) so the result is
    independent of how a large list might be partitioned.
    """
    errors = list(errors)
    if not errors:
        raise ValueError("cannot aggregate an empty error list")
    n = len(errors)
    e_t = [e.e_t for e in errors]
    e_q = [e.e_q for e in errors]
    return ScoreReport(
        E_T=math.fsum(e_t) / n,
        E_R=math.fsum(e_q) / n,
        S_P_star=math.fsum(e.e_t_norm_star + e.e_q_star for e in errors) / n,
        N=n,
        median_e_t=_lower_median(e_t),
        median_e_q=_lower_median(e_q),
    )
