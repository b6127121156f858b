"""Rotation representations, conversions and pinhole projection.

Conventions used across the package:
    - Quaternions are scalar-first arrays [w, x, y, z] with the Hamilton
      product. q and -q denote the same rotation; every consumer is
      sign-agnostic.
    - Rotation matrices are 3x3, right-handed (det = +1), and map
      body-frame vectors into the camera frame.
    - The 6D rotation encoding is the first two columns of the rotation
      matrix, column-major: [a1x, a1y, a1z, a2x, a2y, a2z]. Decoding is
      Gram-Schmidt, so the raw six values are unconstrained.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

ORTHONORMALITY_TOL = 1e-6


class DegenerateRotationError(ValueError):
    """Raised when a 6D rotation encoding cannot be orthonormalized."""


class BehindCameraError(ValueError):
    """Raised when a point to project has non-positive camera-frame depth."""


@dataclass(frozen=True)
class CameraIntrinsics:
    """Pinhole camera: focal lengths and principal point in pixels."""

    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError(f"focal lengths must be positive, got fx={self.fx}, fy={self.fy}")
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"image size must be positive, got {self.width}x{self.height}")


@dataclass(frozen=True)
class Pose:
    """Target pose: position t (meters, camera frame) and orientation q (wxyz).

    q rotates body-frame vectors into the camera frame.
    """

    t: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=np.float64).reshape(3)
        q = normalize_quat(np.asarray(self.q, dtype=np.float64).reshape(4))
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "q", q)
        if t[2] <= 0:
            raise ValueError(f"target must be in front of the camera (t_z > 0), got t_z={t[2]}")


def normalize_quat(q) -> np.ndarray:
    """Return q scaled to unit norm. Raises on (near-)zero input."""
    q = np.asarray(q, dtype=np.float64).reshape(4)
    n = np.linalg.norm(q)
    if n < 1e-12:
        raise ValueError("zero-norm quaternion")
    return q / n


def quat_to_matrix(q) -> np.ndarray:
    """Convert a quaternion [w, x, y, z] to a 3x3 rotation matrix."""
    q = normalize_quat(q)
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def check_rotation_matrix(R, tol: float = ORTHONORMALITY_TOL) -> np.ndarray:
    """Validate that R is a proper rotation (orthonormal, det +1) within tol."""
    R = np.asarray(R, dtype=np.float64).reshape(3, 3)
    err = np.linalg.norm(R.T @ R - np.eye(3))
    if err > tol:
        raise ValueError(f"matrix is not orthonormal (||R'R - I|| = {err:.3e} > {tol})")
    det = np.linalg.det(R)
    if abs(det - 1.0) > tol:
        raise ValueError(f"matrix is not a proper rotation (det = {det:.6f})")
    return R


def matrix_to_quat(R) -> np.ndarray:
    """Convert a rotation matrix to a quaternion [w, x, y, z].

    Uses Shepperd-style branch selection on the largest of
    (trace, R00, R11, R22) so the division is always well conditioned,
    including near 180-degree rotations.
    """
    R = check_rotation_matrix(R)
    tr = R[0, 0] + R[1, 1] + R[2, 2]
    if tr > max(R[0, 0], R[1, 1], R[2, 2]):
        s = 2.0 * np.sqrt(1.0 + tr)
        q = np.array(
            [0.25 * s, (R[2, 1] - R[1, 2]) / s, (R[0, 2] - R[2, 0]) / s, (R[1, 0] - R[0, 1]) / s]
        )
    elif R[0, 0] >= R[1, 1] and R[0, 0] >= R[2, 2]:
        s = 2.0 * np.sqrt(1.0 + R[0, 0] - R[1, 1] - R[2, 2])
        q = np.array(
            [(R[2, 1] - R[1, 2]) / s, 0.25 * s, (R[0, 1] + R[1, 0]) / s, (R[0, 2] + R[2, 0]) / s]
        )
    elif R[1, 1] >= R[2, 2]:
        s = 2.0 * np.sqrt(1.0 + R[1, 1] - R[0, 0] - R[2, 2])
        q = np.array(
            [(R[0, 2] - R[2, 0]) / s, (R[0, 1] + R[1, 0]) / s, 0.25 * s, (R[1, 2] + R[2, 1]) / s]
        )
    else:
        s = 2.0 * np.sqrt(1.0 + R[2, 2] - R[0, 0] - R[1, 1])
        q = np.array(
            [(R[1, 0] - R[0, 1]) / s, (R[0, 2] + R[2, 0]) / s, (R[1, 2] + R[2, 1]) / s, 0.25 * s]
        )
    return normalize_quat(q)


def sixd_to_matrix(r6) -> np.ndarray:
    """Decode a 6D rotation encoding into a rotation matrix by Gram-Schmidt.

    b1 = a1/|a1|, b2 = normalize(a2 - (b1.a2) b1), b3 = b1 x b2.
    """
    r6 = np.asarray(r6, dtype=np.float64).reshape(6)
    a1, a2 = r6[:3], r6[3:]
    n1 = np.linalg.norm(a1)
    if n1 < 1e-12:
        raise DegenerateRotationError("first 6D column has (near-)zero norm")
    b1 = a1 / n1
    a2_perp = a2 - np.dot(b1, a2) * b1
    n2 = np.linalg.norm(a2_perp)
    if n2 < 1e-12:
        raise DegenerateRotationError("6D columns are (near-)parallel")
    b2 = a2_perp / n2
    b3 = np.cross(b1, b2)
    return np.stack([b1, b2, b3], axis=1)


def matrix_to_sixd(R) -> np.ndarray:
    """Encode a rotation matrix as its first two columns, column-major."""
    R = check_rotation_matrix(R)
    return np.concatenate([R[:, 0], R[:, 1]])


def quat_angular_error(q, q_hat) -> float:
    """Angular distance between two rotations given as unit quaternions.

    Returns 2*arccos(|<q, q_hat>|) in radians, in [0, pi]. The absolute
    value makes the result invariant to the quaternion double cover; the
    dot product is clamped to [-1, 1] to guard arccos against round-off.
    """
    q = normalize_quat(q)
    q_hat = normalize_quat(q_hat)
    d = min(1.0, max(-1.0, abs(float(np.dot(q, q_hat)))))
    return 2.0 * np.arccos(d)


def project_points(points, pose: Pose, cam: CameraIntrinsics) -> np.ndarray:
    """Project body-frame 3D points to pixel coordinates through a pinhole.

    p_cam = R(q) p_body + t, then u = fx px/pz + cx, v = fy py/pz + cy.
    Raises BehindCameraError if any transformed point has pz <= 0.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    R = quat_to_matrix(pose.q)
    p_cam = pts @ R.T + pose.t
    z = p_cam[:, 2]
    if np.any(z <= 0):
        raise BehindCameraError(f"{int(np.sum(z <= 0))} point(s) at non-positive depth")
    u = cam.fx * p_cam[:, 0] / z + cam.cx
    v = cam.fy * p_cam[:, 1] / z + cam.cy
    return np.stack([u, v], axis=1)


def sample_uniform_rotation(rng: np.random.Generator) -> np.ndarray:
    """Draw a quaternion uniformly on SO(3) (uniform on the 4-sphere)."""
    while True:
        v = rng.normal(size=4)
        n = np.linalg.norm(v)
        if n > 1e-12:
            return v / n
