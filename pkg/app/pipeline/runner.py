"""
Episode loop: the agent against the simulator under a step budget.
"""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field

import numpy as np

from core.geometry import Pose
from core.imageio import write_ppm
from mapping.snapshot import write_snapshot
from pipeline.agent import Agent, GoalContext
from pipeline.config import AgentConfig
from planner.actions import Action
from simworld.episodes import Episode
from simworld.oracle import distance_to_instance, oracle_visible
from simworld.scene import Scene
from simworld.simulator import Simulator

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StepRecord:
    """One trajectory line; poses and centroids are in the scene frame.

    `goal_pixels` is the ground-truth count of goal pixels in view, kept for
    failure analysis only.
    """
    step: int
    pose: Pose
    action: str
    mode: str
    score: float
    positive: bool
    goal_pixels: int
    events: tuple = ()
    goal_centroid: tuple = None


@dataclass
class EpisodeOutcome:
    episode_id: str
    scene_id: str
    method: str
    success: bool
    stopped: bool
    steps_taken: int
    budget: int
    stop_pose: Pose
    path_length: float
    stop_distance: float
    trajectory: list = field(default_factory=list)
    goal_step: int = None
    goal_centroid: tuple = None
    collisions: int = 0
    failure_label: str = None

    @property
    def max_steps(self):
        return self.steps_taken >= self.budget

    @property
    def detections(self):
        return [r for r in self.trajectory if r.events]


def _to_scene(start: Pose, xy):
    if xy is None:
        return None
    point = start.compose(Pose(xy[0], xy[1], 0.0))
    return (point.x, point.y)


def _snapshot(directory, agent, obs, step, every):
    write_ppm(os.path.join(directory, 'frames', f'{step:04d}.ppm'), obs.rgb)
    if every and step % every == 0:
        write_snapshot(agent.state.map, directory, obs.pose, prefix=f'map_{step:04d}')


def run_episode(scene: Scene, episode: Episode, config: AgentConfig,
                budget=None, seed=0, snapshot_dir=None,
                snapshot_every=0) -> EpisodeOutcome:
    """Run one episode to STOP or budget exhaustion.

    Success needs a STOP within the success radius of the goal footprint
    from which the goal is oracle-visible. The loop draws no random numbers,
    so `seed` only tags the run. With `snapshot_dir` the ego frames and, every
    `snapshot_every` steps and at the end, the agent map are written there.
    """
    budget = config.budget if budget is None else budget
    sim = Simulator(
        scene, config.camera, config.agent_radius, config.forward_step,
        config.turn_angle, config.render,
    )
    obs = sim.reset(episode)
    agent = Agent(config, GoalContext(
        goal_rgb=episode.goal.render.rgb,
        goal_ids=episode.goal.render.instance_ids,
        goal_instance_id=episode.goal_instance_id,
        goal_category=episode.goal_category,
        categories=scene.categories,
    ))
    start = episode.start_pose
    trajectory = []
    stopped = False
    steps = 0
    while steps < budget:
        action, info = agent.step(obs)
        best = agent.state.best
        trajectory.append(StepRecord(
            step=steps,
            pose=sim.pose,
            action=action.value,
            mode=info.mode.value,
            score=float(info.score),
            positive=bool(info.positive),
            goal_pixels=int(np.count_nonzero(obs.instance_ids == episode.goal_instance_id)),
            events=tuple(info.events),
            goal_centroid=_to_scene(start, best.centroid if best else None),
        ))
        if snapshot_dir:
            _snapshot(snapshot_dir, agent, obs, steps, snapshot_every)
        steps += 1
        if action is Action.STOP:
            stopped = True
            break
        sim.act(action)
        obs = sim.observe()

    if snapshot_dir:
        write_snapshot(agent.state.map, snapshot_dir, obs.pose, prefix='map_final')
    stop_pose = sim.pose
    distance = distance_to_instance(scene, stop_pose.xy, episode.goal_instance_id)
    success = bool(
        stopped
        and distance <= config.success_radius
        and oracle_visible(scene, stop_pose, episode.goal_instance_id, config.render,
                           camera=config.camera, refine=True)
    )
    best = agent.state.best
    outcome = EpisodeOutcome(
        episode_id=episode.episode_id,
        scene_id=scene.scene_id,
        method=config.label,
        success=success,
        stopped=stopped,
        steps_taken=steps,
        budget=budget,
        stop_pose=stop_pose,
        path_length=sim.path_length,
        stop_distance=float(distance),
        trajectory=trajectory,
        goal_step=best.step if best else None,
        goal_centroid=_to_scene(start, best.centroid if best else None),
        collisions=sim.collisions,
    )
    logger.info(
        '%s [%s]: %s after %d steps, %.2f m from goal',
        episode.episode_id, config.label,
        'success' if success else 'failure', steps, distance,
    )
    return outcome
