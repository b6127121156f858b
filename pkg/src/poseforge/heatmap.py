"""DSNT coordinate extraction and the keypoint-side training losses.

Heatmaps are numpy arrays of shape (H4, W4) = (H/4, W/4) for a crop of
resolution W x H, indexed [i, j] = [row, col]. Normalized coordinates use
the pixel-center convention over the downsampled lattice:

    x(i, j) = (j + 0.5) / W4,   y(i, j) = (i + 0.5) / H4

so both coordinates live in (0, 1) and map back to full-image pixels
through the crop bounding box as (x0 + x_N * w, y0 + y_N * h).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

BCE_EPS = 1e-7
DEGENERATE_SUM = 1e-12


@dataclass(frozen=True)
class BoundingBox:
    """Crop rectangle in full-image pixels: top-left corner plus size."""

    x0: float
    y0: float
    w: float
    h: float

    def __post_init__(self):
        if self.w <= 0 or self.h <= 0:
            raise ValueError(f"bounding box must have positive size, got w={self.w}, h={self.h}")


def coordinate_grid(h4: int, w4: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-cell normalized (x, y) coordinate arrays for an (h4, w4) map."""
    ys = (np.arange(h4, dtype=np.float64) + 0.5) / h4
    xs = (np.arange(w4, dtype=np.float64) + 0.5) / w4
    gy, gx = np.meshgrid(ys, xs, indexing="ij")
    return gx, gy


def normalize_heatmap(h) -> np.ndarray:
    """Rectify and normalize a raw map so it is a probability mass function.

    Negative values are clamped to zero before dividing by the sum. An
    (effectively) all-zero map falls back to the uniform distribution so
    downstream expectations stay defined.
    """
    h = np.asarray(h, dtype=np.float64)
    c = np.maximum(h, 0.0)
    s = c.sum()
    if s < DEGENERATE_SUM:
        return np.full(h.shape, 1.0 / h.size)
    return c / s


def dsnt(h_norm, grid=None) -> tuple[float, float]:
    """Expected normalized coordinates of a probability-mass heatmap."""
    h_norm = np.asarray(h_norm, dtype=np.float64)
    if grid is None:
        grid = coordinate_grid(*h_norm.shape)
    gx, gy = grid
    return float(np.sum(h_norm * gx)), float(np.sum(h_norm * gy))


def dsnt_gradient(h_raw, upstream, grid=None) -> np.ndarray:
    """Gradient of upstream . dsnt(normalize_heatmap(h_raw)) w.r.t. h_raw.

    upstream is (dL/dx_N, dL/dy_N). The derivative goes through both the
    expectation and the rectify-and-divide normalization; cells clamped
    at zero (h_raw <= 0) receive zero gradient, and the uniform-fallback
    branch is constant in h_raw so its gradient is identically zero.
    """
    h_raw = np.asarray(h_raw, dtype=np.float64)
    if grid is None:
        grid = coordinate_grid(*h_raw.shape)
    gx, gy = grid
    du, dv = upstream
    c = np.maximum(h_raw, 0.0)
    s = c.sum()
    if s < DEGENERATE_SUM:
        return np.zeros_like(h_raw)
    h_norm = c / s
    x_n = np.sum(h_norm * gx)
    y_n = np.sum(h_norm * gy)
    grad = (du * (gx - x_n) + dv * (gy - y_n)) / s
    grad[h_raw <= 0] = 0.0
    return grad


def to_full_resolution(keypoints_norm, box: BoundingBox) -> np.ndarray:
    """Map crop-normalized keypoints to full-image pixel coordinates."""
    k = np.asarray(keypoints_norm, dtype=np.float64).reshape(-1, 2)
    out = np.empty_like(k)
    out[:, 0] = box.x0 + k[:, 0] * box.w
    out[:, 1] = box.y0 + k[:, 1] * box.h
    return out


def keypoint_loss(pred, gt) -> float:
    """Mean Euclidean distance between matched normalized keypoints."""
    pred = np.asarray(pred, dtype=np.float64).reshape(-1, 2)
    gt = np.asarray(gt, dtype=np.float64).reshape(-1, 2)
    if pred.shape != gt.shape:
        raise ValueError(f"keypoint count mismatch: {pred.shape} vs {gt.shape}")
    return float(np.mean(np.linalg.norm(pred - gt, axis=1)))


def bce_loss(pred, gt) -> float:
    """Mean binary cross entropy between a probability map and a binary mask."""
    pred = np.asarray(pred, dtype=np.float64)
    gt = np.asarray(gt, dtype=np.float64)
    if pred.shape != gt.shape:
        raise ValueError(f"shape mismatch: {pred.shape} vs {gt.shape}")
    if pred.min() < 0.0 or pred.max() > 1.0:
        raise ValueError("predicted probabilities must lie in [0, 1]")
    p = np.clip(pred, BCE_EPS, 1.0 - BCE_EPS)
    return float(-np.mean(gt * np.log(p) + (1.0 - gt) * np.log(1.0 - p)))


def kpn_total_loss(l_kpts: float, l_ss: float, l_fs: float, beta_kpts: float = 1.0, beta_multi: float = 1.0) -> float:
    """Weighted keypoint + auxiliary-segmentation training loss."""
    return beta_kpts * l_kpts + beta_multi * (l_ss + l_fs)


def render_gaussian_heatmap(keypoints_norm, h4: int, w4: int, sigma: float = 1.5) -> np.ndarray:
    """Ground-truth heatmaps: one isotropic Gaussian per keypoint.

    Keypoints are normalized crop coordinates; sigma is in cell units.
    Returns an array of shape (K, h4, w4), each map normalized to sum 1.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    k = np.asarray(keypoints_norm, dtype=np.float64).reshape(-1, 2)
    # Cell-center lattice in cell units.
    ys = np.arange(h4, dtype=np.float64) + 0.5
    xs = np.arange(w4, dtype=np.float64) + 0.5
    gy, gx = np.meshgrid(ys, xs, indexing="ij")
    maps = np.empty((len(k), h4, w4))
    for idx, (x_n, y_n) in enumerate(k):
        cx = x_n * w4
        cy = y_n * h4
        g = np.exp(-((gx - cx) ** 2 + (gy - cy) ** 2) / (2.0 * sigma * sigma))
        maps[idx] = normalize_heatmap(g)
    return maps
