"""
Navigation episodes: a start pose in an unexplored scene and a goal image of
one object instance.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from django.conf import settings

from core.exceptions import SamplingFailure, UnreachableSources
from core.geometry import Pose
from planner.fmm import as_mask, solve_arrival
from simworld.goals import GoalImageParams, GoalView, sample_goal_image
from simworld.oracle import goal_viewpoints, oracle_visible
from simworld.render import RenderParams
from simworld.scene import Scene

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EpisodeParams:
    min_start_distance: float = 1.5
    viewpoint_spacing: float = 0.25
    max_draws: int = 200
    success_radius: float = 1.0
    agent_radius: float = 0.17

    @classmethod
    def from_settings(cls, **overrides):
        nav = settings.NAVIGATION
        values = dict(nav['episodes'])
        values.update(
            success_radius=nav['success_radius'],
            agent_radius=nav['agent_radius'],
        )
        values.update(overrides)
        return cls(**values)


@dataclass
class Episode:
    episode_id: str
    scene_id: str
    start_pose: Pose
    goal_instance_id: int
    goal_category: str
    goal: GoalView
    shortest_path_length: float
    viewpoints: list = field(default_factory=list)

    def __post_init__(self):
        if not self.shortest_path_length > 0:
            raise ValueError(
                f'{self.episode_id}: shortest path length must be positive'
            )


def viewpoint_arrival(scene: Scene, viewpoints, agent_radius):
    """Geodesic distance of every cell to the nearest viewpoint."""
    sources = as_mask([scene.world_to_cell(p) for p in viewpoints], scene.shape)
    return solve_arrival(scene.traversable(agent_radius), sources, scene.resolution)


def _draw_start(rng, scene, obj, arrival, traversable, params, render_params):
    rows, cols = np.nonzero(traversable)
    for _ in range(params.max_draws):
        k = int(rng.integers(len(rows)))
        x, y = scene.cell_to_world((rows[k], cols[k]))
        theta = float(rng.uniform(-math.pi, math.pi))
        start = Pose(x, y, theta)
        if obj.distance_to(start.xy) < params.min_start_distance:
            continue
        length = float(arrival[rows[k], cols[k]])
        if not math.isfinite(length):
            continue
        if oracle_visible(scene, start, obj.id, render_params):
            continue
        return start, length
    return None


def generate_episodes(scenes, count, seed, params: EpisodeParams = None,
                      goal_params: GoalImageParams = None,
                      render_params: RenderParams = None):
    """Draw `count` episodes round-robin over `scenes`, deterministic in seed.

    Infeasible draws (no viewpoints, no goal view, no valid start) are
    skipped, so fewer than `count` episodes may come back.
    """
    if not scenes:
        raise ValueError('generate_episodes needs at least one scene')
    params = params or EpisodeParams.from_settings()
    goal_params = goal_params or GoalImageParams.from_settings()
    render_params = render_params or RenderParams.from_settings()
    rng = np.random.default_rng(seed)
    scenes = sorted(scenes, key=lambda s: s.scene_id)
    cache = {}
    episodes = []
    for index in range(count):
        scene = scenes[index % len(scenes)]
        obj = scene.objects[int(rng.integers(len(scene.objects)))]
        goal_seed = int(rng.integers(2 ** 31))
        episode_id = f'{scene.scene_id}-ep{index:04d}'
        key = (scene.scene_id, obj.id)
        if key not in cache:
            viewpoints = goal_viewpoints(
                scene, obj.id, params.viewpoint_spacing,
                params.success_radius, params.agent_radius, render_params,
            )
            try:
                arrival = viewpoint_arrival(scene, viewpoints, params.agent_radius)
            except UnreachableSources:
                arrival = None
            cache[key] = (viewpoints, arrival)
        viewpoints, arrival = cache[key]
        if arrival is None:
            logger.warning('%s: instance %d has no goal viewpoints', episode_id, obj.id)
            continue
        try:
            goal = sample_goal_image(scene, obj.id, goal_seed, goal_params, render_params)
        except SamplingFailure as exc:
            logger.warning('%s: %s', episode_id, exc)
            continue
        drawn = _draw_start(
            rng, scene, obj, arrival, scene.traversable(params.agent_radius),
            params, render_params,
        )
        if drawn is None:
            logger.warning('%s: no valid start pose', episode_id)
            continue
        start, length = drawn
        episodes.append(Episode(
            episode_id=episode_id,
            scene_id=scene.scene_id,
            start_pose=start,
            goal_instance_id=obj.id,
            goal_category=obj.category,
            goal=goal,
            shortest_path_length=length,
            viewpoints=list(viewpoints),
        ))
        logger.info(
            '%s: goal %s/%d, path %.2f m', episode_id, obj.category, obj.id, length,
        )
    return episodes
