"""
Top-down agent memory: obstacle, explored, frontier and goal channels.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from django.conf import settings
from scipy import ndimage

from core.exceptions import ExplorationExhausted
from core.geometry import PointCloud, Pose

logger = logging.getLogger(__name__)

CHANNELS = ('obstacle', 'explored', 'frontier', 'goal')


@dataclass(frozen=True)
class MapParams:
    cell_size: float = 0.05
    initial_size: int = 240
    floor_height: float = 0.1
    agent_height: float = 1.41
    agent_radius: float = 0.17
    min_frontier_size: int = 4
    grow_margin: int = 40

    @classmethod
    def from_settings(cls, **overrides):
        nav = settings.NAVIGATION
        values = dict(nav['mapping'])
        values.update(
            agent_height=nav['agent_height'],
            agent_radius=nav['agent_radius'],
        )
        values.update(overrides)
        return cls(**values)


def _empty(shape):
    return np.zeros(shape, dtype=bool)


@dataclass
class NavMap:
    """Boolean channels over a grid whose cell (0, 0) starts at `origin`.

    Rows follow world y, columns follow world x.
    """
    cell_size: float = 0.05
    origin: tuple = (0.0, 0.0)
    obstacle: np.ndarray = field(default_factory=lambda: _empty((1, 1)))
    explored: np.ndarray = None
    frontier: np.ndarray = None
    goal: np.ndarray = None

    def __post_init__(self):
        for name in CHANNELS[1:]:
            if getattr(self, name) is None:
                setattr(self, name, _empty(self.obstacle.shape))
        if any(getattr(self, n).shape != self.obstacle.shape for n in CHANNELS):
            raise ValueError('map channels must share one shape')
        self.origin = (float(self.origin[0]), float(self.origin[1]))

    @classmethod
    def centered(cls, size=240, cell_size=0.05, center=(0.0, 0.0)):
        """An empty square map; `center` sits at the middle of cell (size // 2)."""
        offset = (size // 2 + 0.5) * cell_size
        return cls(
            cell_size=cell_size,
            origin=(center[0] - offset, center[1] - offset),
            obstacle=_empty((size, size)),
        )

    @property
    def shape(self):
        return self.obstacle.shape

    def world_to_cell(self, xy):
        return (
            int(math.floor((xy[1] - self.origin[1]) / self.cell_size)),
            int(math.floor((xy[0] - self.origin[0]) / self.cell_size)),
        )

    def world_to_cells(self, xy):
        """Vectorized world_to_cell over an (N, 2+) array; returns (rows, cols)."""
        xy = np.asarray(xy, dtype=np.float64)
        rows = np.floor((xy[:, 1] - self.origin[1]) / self.cell_size).astype(np.int64)
        cols = np.floor((xy[:, 0] - self.origin[0]) / self.cell_size).astype(np.int64)
        return rows, cols

    def cell_to_world(self, cell):
        return (
            self.origin[0] + (cell[1] + 0.5) * self.cell_size,
            self.origin[1] + (cell[0] + 0.5) * self.cell_size,
        )

    def in_bounds(self, cell):
        return 0 <= cell[0] < self.shape[0] and 0 <= cell[1] < self.shape[1]

    def grow_to(self, rows, cols, margin=40):
        """Pad the grid so every given cell fits; returns the (row, col) shift.

        Cells already set keep their world coordinates: the origin moves by
        the padding added before row/column 0.
        """
        rows = np.atleast_1d(rows)
        cols = np.atleast_1d(cols)
        if rows.size == 0:
            return 0, 0
        before_r = max(0, -int(rows.min()))
        before_c = max(0, -int(cols.min()))
        after_r = max(0, int(rows.max()) - self.shape[0] + 1)
        after_c = max(0, int(cols.max()) - self.shape[1] + 1)
        if not (before_r or before_c or after_r or after_c):
            return 0, 0
        pad = (
            (before_r + margin if before_r else 0, after_r + margin if after_r else 0),
            (before_c + margin if before_c else 0, after_c + margin if after_c else 0),
        )
        for name in CHANNELS:
            setattr(self, name, np.pad(getattr(self, name), pad, constant_values=False))
        self.origin = (
            self.origin[0] - pad[1][0] * self.cell_size,
            self.origin[1] - pad[0][0] * self.cell_size,
        )
        logger.debug('map grown to %dx%d', self.shape[1], self.shape[0])
        return pad[0][0], pad[1][0]

    def goal_cells(self):
        return list(zip(*np.nonzero(self.goal)))

    def goal_centroid(self):
        """World (x, y) of the goal channel's mean cell, or None when empty."""
        rows, cols = np.nonzero(self.goal)
        if rows.size == 0:
            return None
        return self.cell_to_world((rows.mean(), cols.mean()))

    def copy(self):
        return NavMap(
            cell_size=self.cell_size,
            origin=self.origin,
            **{name: getattr(self, name).copy() for name in CHANNELS},
        )


def footprint_cells(nav_map: NavMap, xy, radius):
    """Cells whose centers lie within `radius` of a world point."""
    reach = int(math.ceil(radius / nav_map.cell_size))
    row, col = nav_map.world_to_cell(xy)
    cells = []
    for dr in range(-reach, reach + 1):
        for dc in range(-reach, reach + 1):
            cx, cy = nav_map.cell_to_world((row + dr, col + dc))
            if math.hypot(cx - xy[0], cy - xy[1]) <= radius or (dr, dc) == (0, 0):
                cells.append((row + dr, col + dc))
    return cells


def _ray_cells(start, ends):
    """Every grid cell on the segments from `start` to each end cell."""
    ends = np.asarray(ends, dtype=np.int64).reshape(-1, 2)
    if len(ends) == 0:
        return np.zeros((0, 2), dtype=np.int64)
    delta = ends - np.asarray(start)
    length = int(np.abs(delta).max())
    samples = np.linspace(0.0, 1.0, 2 * length + 2)
    path = np.asarray(start)[None, None, :] + delta[:, None, :] * samples[None, :, None]
    cells = np.rint(path).astype(np.int64).reshape(-1, 2)
    return np.unique(np.concatenate([cells, ends]), axis=0)


def update_map(nav_map: NavMap, cloud: PointCloud, agent_pose: Pose,
               params: MapParams = None) -> NavMap:
    """Fold one projected depth frame into the map (in place, returned).

    Points inside the obstacle height band mark obstacles; every cell on the
    horizontal line from the agent to a point is marked explored. Obstacles
    are never cleared.
    """
    params = params or MapParams.from_settings()
    points = np.asarray(cloud.points, dtype=np.float64).reshape(-1, 3)
    footprint = footprint_cells(nav_map, agent_pose.xy, params.agent_radius)
    foot = np.asarray(footprint)
    rows, cols = nav_map.world_to_cells(points[:, :2]) if len(points) else (
        np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64))
    dr, dc = nav_map.grow_to(
        np.concatenate([rows, foot[:, 0]]),
        np.concatenate([cols, foot[:, 1]]),
        params.grow_margin,
    )
    rows, cols = rows + dr, cols + dc
    foot = foot + np.array([dr, dc])
    agent = nav_map.world_to_cell(agent_pose.xy)

    z = points[:, 2]
    band = (z >= params.floor_height) & (z <= params.agent_height)
    nav_map.obstacle[rows[band], cols[band]] = True

    ends = np.unique(np.stack([rows, cols], axis=1), axis=0) if len(rows) else []
    carved = _ray_cells(agent, ends)
    if len(carved):
        nav_map.explored[carved[:, 0], carved[:, 1]] = True
    nav_map.explored[foot[:, 0], foot[:, 1]] = True
    return nav_map


def frontier_mask(explored, obstacle):
    """Explored free cells with an unexplored 4-neighbour (outside counts)."""
    unknown = np.pad(~explored, 1, constant_values=True)
    adjacent = (
        unknown[:-2, 1:-1] | unknown[2:, 1:-1]
        | unknown[1:-1, :-2] | unknown[1:-1, 2:]
    )
    return explored & ~obstacle & adjacent


def extract_frontiers(nav_map: NavMap, min_size=4) -> NavMap:
    """Refresh the frontier channel, dropping components under `min_size`."""
    frontier = frontier_mask(nav_map.explored, nav_map.obstacle)
    labels, count = ndimage.label(frontier, structure=np.ones((3, 3)))
    if count:
        sizes = np.bincount(labels.ravel(), minlength=count + 1)
        small = sizes < min_size
        small[0] = False
        frontier[small[labels]] = False
    nav_map.frontier = frontier
    return nav_map


def select_exploration_target(nav_map: NavMap, field, exclude=None):
    """Frontier cell with the smallest arrival time (row-major tie-break)."""
    candidates = nav_map.frontier & np.isfinite(field.arrival)
    if exclude is not None:
        candidates &= ~exclude
    if not candidates.any():
        raise ExplorationExhausted('no reachable frontier')
    costs = np.where(candidates, field.arrival, np.inf)
    row, col = np.unravel_index(int(np.argmin(costs)), costs.shape)
    return int(row), int(col)


def mark_collision(nav_map: NavMap, pose: Pose, distance=0.25, radius=0.17):
    """Mark the strip one step ahead of a blocked agent as obstacle."""
    cells = []
    steps = int(math.ceil(radius / nav_map.cell_size))
    left = pose.rotate(math.pi / 2)
    ahead = pose.advance(distance)
    for k in range(-steps, steps + 1):
        offset = k * nav_map.cell_size
        xy = (ahead.x + offset * math.cos(left.theta), ahead.y + offset * math.sin(left.theta))
        cells.append(nav_map.world_to_cell(xy))
    own = nav_map.world_to_cell(pose.xy)
    cells = [c for c in cells if c != own]
    if not cells:
        return []
    array = np.asarray(cells)
    dr, dc = nav_map.grow_to(array[:, 0], array[:, 1])
    array = array + np.array([dr, dc])
    nav_map.obstacle[array[:, 0], array[:, 1]] = True
    return [tuple(c) for c in array]
