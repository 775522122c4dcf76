"""
Goal image sampling: a camera independent of the agent looking at one
instance.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from django.conf import settings

from core.exceptions import SamplingFailure
from core.geometry import CameraModel, Pose
from simworld.render import RenderOutput, RenderParams, render
from simworld.scene import Scene

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GoalImageParams:
    width: int = 512
    height: int = 512
    camera_height: tuple = (0.8, 1.5)
    distance: tuple = (1.0, 3.0)
    hfov: tuple = (math.radians(40.0), math.radians(70.0))
    min_coverage: float = 0.05
    max_attempts: int = 200

    @classmethod
    def from_settings(cls, **overrides):
        values = dict(settings.NAVIGATION['goal_image'])
        values.update(overrides)
        for key in ('camera_height', 'distance', 'hfov'):
            values[key] = tuple(values[key])
        return cls(**values)


@dataclass
class GoalView:
    """A goal image with the camera that took it."""
    render: RenderOutput
    camera: CameraModel
    pose: Pose

    @property
    def center_pixel(self):
        return (self.camera.height // 2, self.camera.width // 2)


def _exit_distance(obj, direction):
    """How far a ray from the centroid travels inside the footprint."""
    x0, y0, x1, y1 = obj.footprint
    half_w, half_d = (x1 - x0) / 2.0, (y1 - y0) / 2.0
    dx, dy = abs(direction[0]), abs(direction[1])
    limits = [half_w / dx if dx > 1e-12 else math.inf,
              half_d / dy if dy > 1e-12 else math.inf]
    return min(limits)


def sample_goal_image(scene: Scene, instance_id, seed,
                      params: GoalImageParams = None,
                      render_params: RenderParams = None) -> GoalView:
    """Rejection-sample a viewpoint until the instance fills the image center.

    Accepted views have the instance id at the center pixel and cover at
    least `min_coverage` of the image.
    """
    params = params or GoalImageParams.from_settings()
    render_params = render_params or RenderParams.from_settings()
    obj = scene.instance(instance_id)
    rng = np.random.default_rng(seed)
    cx, cy = obj.centroid
    cz = obj.height / 2.0
    for attempt in range(params.max_attempts):
        distance = rng.uniform(*params.distance)
        angle = rng.uniform(-math.pi, math.pi)
        height = rng.uniform(*params.camera_height)
        hfov = rng.uniform(*params.hfov)
        direction = (math.cos(angle), math.sin(angle))
        reach = _exit_distance(obj, direction) + distance
        x, y = cx + reach * direction[0], cy + reach * direction[1]
        if not scene.contains((x, y)):
            continue
        if not params.distance[0] <= obj.distance_to((x, y)) <= params.distance[1]:
            continue
        if scene.clearance[scene.world_to_cell((x, y))] < scene.resolution:
            continue
        pitch = math.atan2(cz - height, math.hypot(cx - x, cy - y))
        camera = CameraModel(params.width, params.height, hfov, height, pitch)
        pose = Pose(x, y, math.atan2(cy - y, cx - x))
        out = render(scene, pose, camera, render_params)
        view = GoalView(out, camera, pose)
        coverage = float(np.mean(out.instance_ids == obj.id))
        if out.instance_ids[view.center_pixel] == obj.id and coverage >= params.min_coverage:
            logger.debug(
                'goal view for %s/%d after %d attempts (coverage %.3f)',
                scene.scene_id, obj.id, attempt + 1, coverage,
            )
            return view
    raise SamplingFailure(
        f'{scene.scene_id}: no goal view of instance {instance_id} '
        f'in {params.max_attempts} attempts'
    )
