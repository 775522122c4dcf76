"""
Ground-truth queries: oracle visibility, geodesic distance and goal
viewpoints.
"""
from __future__ import annotations

import logging
import math

import numpy as np
from django.conf import settings

from core.exceptions import UnreachableSources
from core.geometry import CameraModel, Pose, normalize_angle
from planner.fmm import as_mask, solve_arrival
from simworld.render import RenderParams, render
from simworld.scene import Scene

logger = logging.getLogger(__name__)


def oracle_camera(render_params: RenderParams, camera: CameraModel = None):
    """Low-resolution copy of the ego camera used for visibility sweeps."""
    if camera is None:
        ego = settings.NAVIGATION['ego_camera']
        camera = CameraModel(
            render_params.oracle_width, render_params.oracle_height,
            ego['hfov'], ego['mount_height'], ego['pitch'],
        )
    return camera.resized(render_params.oracle_width, render_params.oracle_height)


def oracle_visible(scene: Scene, agent_pose: Pose, instance_id,
                   render_params: RenderParams = None,
                   camera: CameraModel = None, refine=False) -> bool:
    """Can the instance be seen from this position by turning and tilting?

    Sweeps the configured headings (evenly spaced from the agent heading)
    and pitches. Headings closest to the instance are rendered first and the
    sweep stops at the first render containing the instance.

    The sweep renders at the low oracle resolution. With `refine` and a
    `camera`, a miss is re-checked at the full camera resolution so objects
    too small for the coarse pass still count.
    """
    obj = scene.instance(instance_id)
    render_params = render_params or RenderParams.from_settings()
    if _sweep(scene, agent_pose, obj, oracle_camera(render_params, camera), render_params):
        return True
    if not refine or camera is None:
        return False
    logger.debug('instance %s missed at oracle resolution, re-checking at %dx%d',
                 instance_id, camera.width, camera.height)
    return _sweep(scene, agent_pose, obj, camera, render_params)


def _sweep(scene, agent_pose, obj, cam, render_params):
    cx, cy = obj.centroid
    bearing = math.atan2(cy - agent_pose.y, cx - agent_pose.x)
    count = render_params.oracle_headings
    headings = [agent_pose.theta + 2 * math.pi * k / count for k in range(count)]
    headings.sort(key=lambda h: abs(normalize_angle(h - bearing)))
    pitches = sorted(render_params.oracle_pitches, key=abs)
    for heading in headings:
        for pitch in pitches:
            out = render(
                scene, Pose(agent_pose.x, agent_pose.y, heading),
                cam.with_pitch(pitch), render_params, with_rgb=False,
            )
            if (out.instance_ids == obj.id).any():
                return True
    return False


def _cells(scene, points):
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    return [scene.world_to_cell(p) for p in points]


def geodesic_distance(scene: Scene, start, targets, agent_radius=None):
    """Shortest traversable path length from `start` to the nearest target.

    `targets` is one (x, y) point or a sequence of points. Returns inf when
    no target can be reached.
    """
    if agent_radius is None:
        agent_radius = settings.NAVIGATION['agent_radius']
    traversable = scene.traversable(agent_radius)
    sources = as_mask(_cells(scene, targets), scene.shape)
    row, col = scene.world_to_cell(start)
    if not (0 <= row < scene.shape[0] and 0 <= col < scene.shape[1]):
        return math.inf
    if sources[row, col]:
        return 0.0
    try:
        arrival = solve_arrival(traversable, sources, scene.resolution)
    except UnreachableSources:
        return math.inf
    return float(arrival[row, col])


def distance_to_instance(scene: Scene, xy, instance_id):
    return scene.instance(instance_id).distance_to(xy)


def goal_viewpoints(scene: Scene, instance_id, spacing=0.25,
                    success_radius=None, agent_radius=None,
                    render_params: RenderParams = None):
    """Traversable lattice points within the success radius that see the goal."""
    nav = settings.NAVIGATION
    success_radius = success_radius or nav['success_radius']
    agent_radius = agent_radius or nav['agent_radius']
    obj = scene.instance(instance_id)
    step = max(1, int(round(spacing / scene.resolution)))
    traversable = scene.traversable(agent_radius)
    rows, cols = np.nonzero(traversable)
    lattice = (rows % step == 0) & (cols % step == 0)
    viewpoints = []
    for row, col in zip(rows[lattice], cols[lattice]):
        xy = scene.cell_to_world((row, col))
        if obj.distance_to(xy) > success_radius:
            continue
        cx, cy = obj.centroid
        facing = Pose(xy[0], xy[1], math.atan2(cy - xy[1], cx - xy[0]))
        if oracle_visible(scene, facing, instance_id, render_params):
            viewpoints.append((round(xy[0], 6), round(xy[1], 6)))
    return viewpoints
