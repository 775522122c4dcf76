"""
Discrete action space and greedy descent of a distance field.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from django.conf import settings

from core.exceptions import PlanningFailure
from core.geometry import Pose, normalize_angle
from planner.fmm import DistanceField

NEIGHBOURS = [
    (-1, -1), (-1, 0), (-1, 1),
    (0, -1), (0, 1),
    (1, -1), (1, 0), (1, 1),
]


class Action(enum.Enum):
    MOVE_FORWARD = 'move_forward'
    TURN_LEFT = 'turn_left'
    TURN_RIGHT = 'turn_right'
    STOP = 'stop'


@dataclass(frozen=True)
class PlannerParams:
    agent_radius: float = 0.17
    lookahead: float = 0.5
    deadband: float = math.radians(15.0)
    explore_stop_radius: float = 0.25
    goal_stop_radius: float = 0.9
    forward_step: float = 0.25
    turn_angle: float = math.radians(30.0)

    @classmethod
    def from_settings(cls, **overrides):
        nav = settings.NAVIGATION
        values = dict(nav['planner'])
        values.update(
            agent_radius=nav['agent_radius'],
            forward_step=nav['forward_step'],
            turn_angle=nav['turn_angle'],
        )
        values.update(overrides)
        return cls(**values)


def descend(field: DistanceField, cell, lookahead):
    """Follow the steepest 8-neighbour descent for `lookahead` meters."""
    current = tuple(cell)
    travelled = 0.0
    while travelled < lookahead - 1e-9:
        best, best_value = None, field.at(current)
        for dr, dc in NEIGHBOURS:
            nxt = (current[0] + dr, current[1] + dc)
            value = field.at(nxt)
            if value < best_value:
                best, best_value = nxt, value
        if best is None:
            break
        diagonal = best[0] != current[0] and best[1] != current[1]
        travelled += field.cell_size * (math.sqrt(2.0) if diagonal else 1.0)
        current = best
        if field.sources[current]:
            break
    return current


def forward_blocked(field: DistanceField, pose: Pose, distance):
    """Would a straight move of `distance` sweep through dilated obstacles?

    An agent already inside the dilated band may only move if the step
    increases its clearance.
    """
    own = field.world_to_cell(pose.xy)
    samples = np.arange(field.cell_size / 2, distance + 1e-9, field.cell_size / 2)
    cells = []
    for s in samples:
        cell = field.world_to_cell(pose.advance(float(s)).xy)
        if cell != own and field.in_bounds(cell) and cell not in cells:
            cells.append(cell)
    if not cells:
        return False
    if field.in_bounds(own) and field.blocked[own]:
        end = cells[-1]
        if any(field.clearance[c] == 0 for c in cells):
            return True
        return not field.clearance[end] > field.clearance[own]
    return any(field.blocked[c] for c in cells)


def open_headings(field: DistanceField, agent_pose: Pose, here,
                  params: PlannerParams):
    """Turn counts k whose heading (k turns to the left) has a free forward
    step that lowers the arrival time. k runs over one full revolution."""
    half_turn = int(round(math.pi / params.turn_angle))
    step = params.forward_step
    offsets = []
    for k in range(1 - half_turn, half_turn + 1):
        facing = agent_pose.rotate(k * params.turn_angle)
        if forward_blocked(field, facing, step):
            continue
        if field.at(field.world_to_cell(facing.advance(step).xy)) < here:
            offsets.append(k)
    return offsets


def plan_next_action(field: DistanceField, agent_pose: Pose, stop_radius,
                     params: PlannerParams = None) -> Action:
    """Pick the next discrete action toward the field's sources.

    The agent heads for the open heading closest to the waypoint bearing:
    forward when that is the current heading, otherwise one turn toward it.
    With every heading blocked it turns toward the bearing.
    """
    params = params or PlannerParams.from_settings()
    cell = field.world_to_cell(agent_pose.xy)
    here = field.at(cell)
    if not math.isfinite(here):
        raise PlanningFailure(f'agent cell {cell} is unreachable')
    if here <= stop_radius:
        return Action.STOP
    waypoint = descend(field, cell, params.lookahead)
    if waypoint == cell:
        raise PlanningFailure(f'no descent direction from {cell}')
    wx, wy = field.cell_to_world(waypoint)
    error = normalize_angle(
        math.atan2(wy - agent_pose.y, wx - agent_pose.x) - agent_pose.theta
    )
    headings = open_headings(field, agent_pose, here, params)
    if not headings:
        return Action.TURN_LEFT if error >= 0 else Action.TURN_RIGHT

    def rank(k):
        miss = abs(normalize_angle(error - k * params.turn_angle))
        aligned = k == 0 and miss <= params.deadband
        # the absolute heading keeps its rank while the agent turns in place
        return (not aligned, round(miss, 9), abs(k), -k)

    best = min(headings, key=rank)
    if best == 0:
        return Action.MOVE_FORWARD
    return Action.TURN_LEFT if best > 0 else Action.TURN_RIGHT
