"""
Episode session: applies discrete actions to the agent and renders its
observations.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from core.geometry import CameraModel, Pose
from planner.actions import Action
from simworld.episodes import Episode
from simworld.render import RenderParams, render
from simworld.scene import Scene

logger = logging.getLogger(__name__)


@dataclass
class Observation:
    """What the agent receives each step.

    `pose` is relative to the start pose. `instance_ids` is the ground-truth
    label render, available to oracle ablations and failure analysis.
    """
    goal_rgb: np.ndarray
    rgb: np.ndarray
    depth: np.ndarray
    pose: Pose
    instance_ids: np.ndarray


class Simulator:
    """Single-episode simulator session over an immutable scene."""

    def __init__(self, scene: Scene, camera: CameraModel, agent_radius=0.17,
                 forward_step=0.25, turn_angle=math.radians(30.0),
                 render_params: RenderParams = None):
        self.scene = scene
        self.camera = camera
        self.agent_radius = agent_radius
        self.forward_step = forward_step
        self.turn_angle = turn_angle
        self.render_params = render_params or RenderParams.from_settings()
        self._traversable = scene.traversable(agent_radius)
        self.episode = None
        self.pose = None
        self.path_length = 0.0
        self.collisions = 0

    def reset(self, episode: Episode) -> Observation:
        if episode.scene_id != self.scene.scene_id:
            raise ValueError(
                f'episode {episode.episode_id} belongs to {episode.scene_id}, '
                f'not {self.scene.scene_id}'
            )
        self.episode = episode
        self.pose = episode.start_pose
        self.path_length = 0.0
        self.collisions = 0
        return self.observe()

    def observe(self) -> Observation:
        out = render(self.scene, self.pose, self.camera, self.render_params)
        return Observation(
            goal_rgb=self.episode.goal.render.rgb,
            rgb=out.rgb,
            depth=out.depth,
            pose=self.pose.relative_to(self.episode.start_pose),
            instance_ids=out.instance_ids,
        )

    def _free(self, xy):
        row, col = self.scene.world_to_cell(xy)
        rows, cols = self.scene.shape
        return 0 <= row < rows and 0 <= col < cols and self._traversable[row, col]

    def move_blocked(self, pose: Pose, distance):
        """Does the agent disc collide anywhere along a straight move?"""
        steps = max(1, int(math.ceil(distance / self.scene.resolution)))
        for k in range(1, steps + 1):
            if not self._free(pose.advance(distance * k / steps).xy):
                return True
        return False

    def act(self, action: Action) -> bool:
        """Apply one action; returns False when a forward move collided."""
        if action is Action.MOVE_FORWARD:
            if self.move_blocked(self.pose, self.forward_step):
                self.collisions += 1
                logger.debug(
                    '%s: collision at (%.2f, %.2f)',
                    self.episode.episode_id, self.pose.x, self.pose.y,
                )
                return False
            self.pose = self.pose.advance(self.forward_step)
            self.path_length += self.forward_step
        elif action is Action.TURN_LEFT:
            self.pose = self.pose.rotate(self.turn_angle)
        elif action is Action.TURN_RIGHT:
            self.pose = self.pose.rotate(-self.turn_angle)
        return True
