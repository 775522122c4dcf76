"""
The modular agent: explore, re-identify the goal, localize it, navigate
there and stop.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from core.exceptions import (
    EmptyGoal,
    ExplorationExhausted,
    PlanningFailure,
    UnreachableSources,
)
from core.geometry import Pose, unproject
from localize.masks import CROP, ORACLE_MASK, make_goal_mask
from localize.projection import localize_class, localize_oracle, project_goal
from mapping.navmap import (
    NavMap,
    extract_frontiers,
    footprint_cells,
    mark_collision,
    select_exploration_target,
    update_map,
)
from pipeline.config import (
    CLASS_PROJECTED,
    CROP_PROJECTED,
    LOCALIZE_ORACLE,
    MASK_PROJECTED,
    AgentConfig,
)
from planner.actions import Action, plan_next_action
from planner.fmm import compute_distance_field, dilation_cells
from reid.classifiers import ReidClassifier
from simworld.render import RenderOutput

logger = logging.getLogger(__name__)


class Mode(enum.Enum):
    EXPLORE = 'explore'
    GOTO_GOAL = 'goto_goal'


@dataclass(frozen=True)
class Detection:
    step: int
    score: float
    centroid: tuple


@dataclass
class AgentState:
    mode: Mode
    map: NavMap
    target: tuple = None
    target_step: int = 0
    best: Detection = None
    step: int = 0
    last_pose: Pose = None
    last_action: Action = None


@dataclass
class StepInfo:
    """What happened inside one agent step, for the trajectory log."""
    action: Action
    mode: Mode
    score: float
    positive: bool
    events: list = field(default_factory=list)


@dataclass(frozen=True)
class GoalContext:
    """Episode facts the oracle ablations may read.

    `goal_ids` is the goal image's instance render, `categories` maps scene
    instance ids to category names.
    """
    goal_rgb: np.ndarray
    goal_ids: np.ndarray = None
    goal_instance_id: int = None
    goal_category: str = None
    categories: dict = None


def _goal_render(goal: GoalContext):
    height, width = goal.goal_rgb.shape[:2]
    ids = goal.goal_ids
    if ids is None:
        ids = np.zeros((height, width), dtype=np.int32)
    return RenderOutput(
        rgb=goal.goal_rgb, depth=np.zeros((height, width)), instance_ids=ids,
    )


def _ring(cells, shape, radius_cells):
    """Cells within `radius_cells` (Chebyshev) of any of `cells`."""
    mask = np.zeros(shape, dtype=bool)
    for row, col in cells:
        mask[max(row - radius_cells, 0):row + radius_cells + 1,
             max(col - radius_cells, 0):col + radius_cells + 1] = True
    return mask


class Agent:
    """One episode's agent. Call `step` once per observation."""

    def __init__(self, config: AgentConfig, goal: GoalContext):
        self.config = config
        self.goal = goal
        self.classifier = ReidClassifier(config.reid_method, config.tau, config.reid)
        self.classifier.set_goal(goal.goal_rgb)
        self.mask = None
        if config.localization_method == MASK_PROJECTED:
            self.mask = make_goal_mask(
                _goal_render(goal), ORACLE_MASK, goal.goal_instance_id,
                params=config.localize,
            )
        elif config.localization_method == CROP_PROJECTED:
            self.mask = make_goal_mask(_goal_render(goal), CROP, params=config.localize)
        size = config.mapping.initial_size
        self.state = AgentState(
            mode=Mode.EXPLORE,
            map=NavMap.centered(size, config.mapping.cell_size),
        )

    # perception

    def _perceive(self, obs):
        state = self.state
        if (state.last_action is Action.MOVE_FORWARD and state.last_pose is not None
                and math.hypot(obs.pose.x - state.last_pose.x,
                               obs.pose.y - state.last_pose.y) < 1e-6):
            mark_collision(
                state.map, obs.pose, self.config.forward_step, self.config.agent_radius,
            )
        cloud = unproject(obs.depth, self.config.camera, obs.pose)
        update_map(state.map, cloud, obs.pose, self.config.mapping)
        extract_frontiers(state.map, self.config.mapping.min_frontier_size)

    def _localize(self, obs, matches):
        method = self.config.localization_method
        cam, pose, nav_map = self.config.camera, obs.pose, self.state.map
        min_points = self.config.localize.min_points_per_cell
        if method == LOCALIZE_ORACLE:
            return localize_oracle(
                obs.instance_ids, obs.depth, self.goal.goal_instance_id,
                cam, pose, nav_map, min_points,
            )
        if method == CLASS_PROJECTED:
            return localize_class(
                obs.instance_ids, obs.depth, self.goal.goal_category,
                self.goal.categories, cam, pose, nav_map, min_points,
            )
        if matches is None:
            matches = self.classifier.matches_for(obs.rgb)
        return project_goal(matches, self.mask, obs.depth, cam, pose, nav_map, min_points)

    def _detect(self, obs, info):
        state = self.state
        decision, matches = self.classifier.decide(
            obs.rgb, obs.instance_ids, self.goal.goal_instance_id,
        )
        info.score, info.positive = decision.score, decision.positive
        if not decision.positive:
            return
        if state.best is not None and decision.score <= state.best.score:
            return
        try:
            channel = self._localize(obs, matches)
        except EmptyGoal as exc:
            info.events.append('false_positive')
            logger.debug('step %d: positive without goal points (%s)', state.step, exc)
            return
        info.events.append('localized' if state.best is None else 'relocalized')
        state.best = Detection(state.step, decision.score, channel.centroid)
        state.mode = Mode.GOTO_GOAL
        logger.debug(
            'step %d: goal channel of %d cells (score %.3f)',
            state.step, len(channel), decision.score,
        )

    # planning

    def _field(self, sources, pose, extra_passable=None):
        nav_map = self.state.map
        passable = np.zeros(nav_map.shape, dtype=bool)
        for cell in footprint_cells(nav_map, pose.xy, self.config.agent_radius):
            if nav_map.in_bounds(cell):
                passable[cell] = True
        if extra_passable is not None:
            passable |= extra_passable
        return compute_distance_field(
            nav_map, sources, self.config.agent_radius, passable,
        )

    def _goto_goal(self, pose):
        nav_map = self.state.map
        cells = nav_map.goal_cells()
        ring = _ring(
            cells, nav_map.shape,
            dilation_cells(self.config.agent_radius, nav_map.cell_size) + 1,
        )
        field_ = self._field(cells, pose, ring)
        return plan_next_action(
            field_, pose, self.config.planner.goal_stop_radius, self.config.planner,
        )

    def _select_target(self, pose, exclude):
        nav_map = self.state.map
        from_agent = self._field([nav_map.world_to_cell(pose.xy)], pose)
        cell = select_exploration_target(nav_map, from_agent, exclude)
        self.state.target = nav_map.cell_to_world(cell)
        self.state.target_step = self.state.step
        return cell

    def _target_cell(self, exclude):
        """Current target as a map cell, or None when it must be re-selected."""
        state = self.state
        if state.target is None:
            return None
        cell = state.map.world_to_cell(state.target)
        if not state.map.in_bounds(cell) or not state.map.frontier[cell] or exclude[cell]:
            return None
        if state.step - state.target_step >= self.config.replan_every:
            return None
        return cell

    def _explore(self, pose, info):
        """Head for the nearest frontier; frontiers at the agent are skipped."""
        state = self.state
        stop_radius = self.config.planner.explore_stop_radius
        reach = int(math.ceil(stop_radius / state.map.cell_size))
        exclude = _ring([state.map.world_to_cell(pose.xy)], state.map.shape, reach)
        cell = self._target_cell(exclude)
        for attempt in range(2):
            if attempt or cell is None:
                cell = self._select_target(pose, exclude)
            try:
                field_ = self._field([cell], pose)
                action = plan_next_action(field_, pose, stop_radius, self.config.planner)
            except (UnreachableSources, PlanningFailure):
                action = None
            if action is not None and action is not Action.STOP:
                return action
            exclude |= _ring([cell], state.map.shape, 1)
        info.events.append('planning_failure')
        return Action.TURN_LEFT

    def step(self, obs):
        """Consume one observation and return (action, StepInfo)."""
        state = self.state
        info = StepInfo(action=None, mode=state.mode, score=0.0, positive=False)
        self._perceive(obs)
        self._detect(obs, info)
        pose = obs.pose
        try:
            if state.mode is Mode.GOTO_GOAL:
                action = self._goto_goal(pose)
            else:
                action = self._explore(pose, info)
        except ExplorationExhausted:
            info.events.append('exhausted')
            logger.debug('step %d: no reachable frontier, stopping', state.step)
            action = Action.STOP
        except (PlanningFailure, UnreachableSources) as exc:
            info.events.append('planning_failure')
            logger.debug('step %d: %s, scanning in place', state.step, exc)
            action = Action.TURN_LEFT
        info.action, info.mode = action, state.mode
        state.last_pose, state.last_action = pose, action
        state.step += 1
        return action, info

