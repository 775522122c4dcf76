"""
Success rate, SPL, navigation error and Max-ST over a set of episodes.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from core.exceptions import ContractViolation, UnreachableSources
from simworld.episodes import viewpoint_arrival

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Metrics:
    sr: float
    spl: float
    ne: float
    max_st: float
    episodes: int

    def as_row(self):
        return [self.episodes, self.sr, self.spl, self.ne, self.max_st]


@dataclass(frozen=True)
class EpisodeMetrics:
    episode_id: str
    success: bool
    spl: float
    ne: float
    max_st: bool


def episode_spl(success, shortest_path, path_length):
    """S * l / max(p, l)."""
    if not success:
        return 0.0
    return shortest_path / max(path_length, shortest_path)


def navigation_error(scene, episode, stop_xy, agent_radius, arrival=None):
    """Geodesic distance from the stop position to the nearest goal viewpoint.

    Falls back to the straight-line distance when the stop cell has no
    traversable route to a viewpoint.
    """
    if not episode.viewpoints:
        return math.inf
    if arrival is None:
        try:
            arrival = viewpoint_arrival(scene, episode.viewpoints, agent_radius)
        except UnreachableSources:
            arrival = None
    value = math.inf
    if arrival is not None:
        row, col = scene.world_to_cell(stop_xy)
        if 0 <= row < arrival.shape[0] and 0 <= col < arrival.shape[1]:
            value = float(arrival[row, col])
    if not math.isfinite(value):
        points = np.asarray(episode.viewpoints, dtype=np.float64)
        value = float(np.min(np.hypot(points[:, 0] - stop_xy[0], points[:, 1] - stop_xy[1])))
        logger.debug('%s: stop cell off the traversable grid', episode.episode_id)
    return value


def _aligned(outcomes, episodes):
    by_id = {e.episode_id: e for e in episodes}
    if len(by_id) != len(episodes) or len(outcomes) != len(episodes):
        raise ContractViolation('outcomes and episodes do not align')
    pairs = []
    for outcome in sorted(outcomes, key=lambda o: o.episode_id):
        if outcome.episode_id not in by_id:
            raise ContractViolation(f'no episode {outcome.episode_id}')
        pairs.append((outcome, by_id[outcome.episode_id]))
    return pairs


def score_episodes(outcomes, episodes, scenes, agent_radius=0.17):
    """Per-episode metrics in episode-id order; `scenes` maps id to Scene."""
    rows = []
    for outcome, episode in _aligned(outcomes, episodes):
        scene = scenes[episode.scene_id]
        ne = navigation_error(scene, episode, outcome.stop_pose.xy, agent_radius)
        rows.append(EpisodeMetrics(
            episode_id=episode.episode_id,
            success=outcome.success,
            spl=episode_spl(outcome.success, episode.shortest_path_length, outcome.path_length),
            ne=ne,
            max_st=outcome.max_steps,
        ))
    return rows


def aggregate(rows) -> Metrics:
    if not rows:
        return Metrics(sr=0.0, spl=0.0, ne=0.0, max_st=0.0, episodes=0)
    rows = sorted(rows, key=lambda r: r.episode_id)
    count = len(rows)
    return Metrics(
        sr=math.fsum(float(r.success) for r in rows) / count,
        spl=math.fsum(r.spl for r in rows) / count,
        ne=math.fsum(r.ne for r in rows) / count,
        max_st=math.fsum(float(r.max_st) for r in rows) / count,
        episodes=count,
    )


def compute_metrics(outcomes, episodes, scenes, agent_radius=0.17) -> Metrics:
    """SR, SPL, NE and Max-ST of aligned outcome and episode lists."""
    return aggregate(score_episodes(outcomes, episodes, scenes, agent_radius))
