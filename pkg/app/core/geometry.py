"""
Poses, pinhole cameras and the projections linking images, depth and the
world frame.

World frame: +x forward of the start pose, +y to the left, z up.
Camera body frame: +x along the optical axis, +y left, +z up. Pixel (u, v)
has u growing to the right and v growing downwards; the principal point is
(width / 2, height / 2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from core.exceptions import ContractViolation


def normalize_angle(angle):
    """Wrap an angle to (-pi, pi]."""
    wrapped = (angle + math.pi) % (2.0 * math.pi) - math.pi
    if wrapped <= -math.pi:
        wrapped += 2.0 * math.pi
    return wrapped


@dataclass(frozen=True)
class Pose:
    """Planar pose: position in meters, heading CCW from +x."""
    x: float = 0.0
    y: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        values = (self.x, self.y, self.theta)
        if not all(math.isfinite(v) for v in values):
            raise ContractViolation(f'non-finite pose {values}')
        object.__setattr__(self, 'x', float(self.x))
        object.__setattr__(self, 'y', float(self.y))
        object.__setattr__(self, 'theta', normalize_angle(float(self.theta)))

    @property
    def xy(self):
        return (self.x, self.y)

    def compose(self, other: Pose) -> Pose:
        """Return `other` (expressed in this pose's frame) in the outer frame."""
        c, s = math.cos(self.theta), math.sin(self.theta)
        return Pose(
            self.x + c * other.x - s * other.y,
            self.y + s * other.x + c * other.y,
            self.theta + other.theta,
        )

    def inverse(self) -> Pose:
        c, s = math.cos(self.theta), math.sin(self.theta)
        return Pose(
            -c * self.x - s * self.y,
            s * self.x - c * self.y,
            -self.theta,
        )

    def relative_to(self, origin: Pose) -> Pose:
        """Express this pose in the frame of `origin`."""
        return origin.inverse().compose(self)

    def advance(self, distance: float) -> Pose:
        return Pose(
            self.x + distance * math.cos(self.theta),
            self.y + distance * math.sin(self.theta),
            self.theta,
        )

    def rotate(self, angle: float) -> Pose:
        return Pose(self.x, self.y, self.theta + angle)


@dataclass(frozen=True)
class CameraModel:
    """Pinhole camera with square pixels mounted on the agent."""
    width: int
    height: int
    hfov: float
    mount_height: float = 1.31
    pitch: float = 0.0

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ContractViolation(
                f'camera size must be positive, got {self.width}x{self.height}'
            )
        if not 0.0 < self.hfov < math.pi:
            raise ContractViolation(f'hfov {self.hfov} outside (0, pi)')

    @property
    def focal(self):
        return (self.width / 2.0) / math.tan(self.hfov / 2.0)

    @property
    def cx(self):
        return self.width / 2.0

    @property
    def cy(self):
        return self.height / 2.0

    @property
    def vfov(self):
        return 2.0 * math.atan(self.cy / self.focal)

    def with_pitch(self, pitch: float) -> CameraModel:
        return CameraModel(
            self.width, self.height, self.hfov, self.mount_height, pitch
        )

    def resized(self, width: int, height: int) -> CameraModel:
        return CameraModel(
            width, height, self.hfov, self.mount_height, self.pitch
        )


@dataclass
class PointCloud:
    """World-frame points with the pixel each one came from."""
    points: np.ndarray = field(
        default_factory=lambda: np.zeros((0, 3))
    )
    source_pixel: np.ndarray = field(
        default_factory=lambda: np.zeros((0, 2), dtype=np.int64)
    )

    def __len__(self):
        return len(self.points)


def camera_origin(cam: CameraModel, pose: Pose) -> np.ndarray:
    return np.array([pose.x, pose.y, cam.mount_height])


def body_rays(cam: CameraModel, u, v):
    """Unnormalized body-frame rays through pixel coordinates (u, v)."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    x = np.full(np.broadcast(u, v).shape, cam.focal)
    y = -(u - cam.cx) * np.ones_like(x)
    z = -(v - cam.cy) * np.ones_like(x)
    cp, sp = math.cos(cam.pitch), math.sin(cam.pitch)
    return np.stack([x * cp - z * sp, y, x * sp + z * cp], axis=-1)


def _yaw(vectors, theta):
    c, s = math.cos(theta), math.sin(theta)
    out = np.empty_like(vectors)
    out[..., 0] = c * vectors[..., 0] - s * vectors[..., 1]
    out[..., 1] = s * vectors[..., 0] + c * vectors[..., 1]
    out[..., 2] = vectors[..., 2]
    return out


def pixel_rays(cam: CameraModel, pose: Pose, u, v) -> np.ndarray:
    """Unit world-frame directions through the given pixels."""
    rays = _yaw(body_rays(cam, u, v), pose.theta)
    return rays / np.linalg.norm(rays, axis=-1, keepdims=True)


def camera_rays(cam: CameraModel, pose: Pose) -> np.ndarray:
    """Unit world-frame direction of every pixel, shape (H, W, 3)."""
    v, u = np.mgrid[0:cam.height, 0:cam.width]
    return pixel_rays(cam, pose, u, v)


def unproject(depth: np.ndarray, cam: CameraModel,
              agent_pose: Pose) -> PointCloud:
    """Lift every valid depth pixel to a world-frame point.

    Depth is the Euclidean length along the pixel ray; 0 marks an invalid
    pixel and is skipped.
    """
    depth = np.asarray(depth, dtype=np.float64)
    if depth.shape != (cam.height, cam.width):
        raise ContractViolation(
            f'depth shape {depth.shape} does not match camera '
            f'{cam.height}x{cam.width}'
        )
    valid = np.isfinite(depth) & (depth > 0)
    v, u = np.nonzero(valid)
    if len(u) == 0:
        return PointCloud()
    rays = pixel_rays(cam, agent_pose, u, v)
    points = camera_origin(cam, agent_pose) + rays * depth[v, u][:, None]
    return PointCloud(points, np.stack([u, v], axis=1))


def project(points, cam: CameraModel, camera_pose: Pose):
    """Forward-project world points, returning (u, v, d) arrays.

    Points behind the camera come back with NaN pixel coordinates.
    """
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    rel = _yaw(points - camera_origin(cam, camera_pose), -camera_pose.theta)
    cp, sp = math.cos(cam.pitch), math.sin(cam.pitch)
    x = rel[:, 0] * cp + rel[:, 2] * sp
    y = rel[:, 1]
    z = -rel[:, 0] * sp + rel[:, 2] * cp
    with np.errstate(divide='ignore', invalid='ignore'):
        u = np.where(x > 0, cam.cx - cam.focal * y / x, np.nan)
        v = np.where(x > 0, cam.cy - cam.focal * z / x, np.nan)
    return u, v, np.linalg.norm(rel, axis=1)


def relative_goal(goal_xy, agent_pose: Pose):
    """Goal as body-frame polar coordinates (range, bearing)."""
    dx = float(goal_xy[0]) - agent_pose.x
    dy = float(goal_xy[1]) - agent_pose.y
    r = math.hypot(dx, dy)
    if r == 0.0:
        return 0.0, 0.0
    return r, normalize_angle(math.atan2(dy, dx) - agent_pose.theta)
