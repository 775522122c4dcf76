"""
Fast marching distance fields over occupancy grids.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import skfmm
from numpy import ma
from scipy import ndimage

from core.exceptions import UnreachableSources
from core.imageio import normalize_to_gray, write_pgm


@dataclass
class DistanceField:
    """Arrival times (meters at unit speed) from a set of source cells.

    `blocked` is the obstacle channel dilated by the agent radius;
    `clearance` is the distance (m) of every cell to the nearest obstacle.
    """
    arrival: np.ndarray
    sources: np.ndarray
    blocked: np.ndarray
    clearance: np.ndarray
    cell_size: float
    origin: tuple = (0.0, 0.0)

    @property
    def shape(self):
        return self.arrival.shape

    def world_to_cell(self, xy):
        return (
            int(math.floor((xy[1] - self.origin[1]) / self.cell_size)),
            int(math.floor((xy[0] - self.origin[0]) / self.cell_size)),
        )

    def cell_to_world(self, cell):
        return (
            self.origin[0] + (cell[1] + 0.5) * self.cell_size,
            self.origin[1] + (cell[0] + 0.5) * self.cell_size,
        )

    def in_bounds(self, cell):
        return 0 <= cell[0] < self.shape[0] and 0 <= cell[1] < self.shape[1]

    def at(self, cell):
        if not self.in_bounds(cell):
            return math.inf
        return float(self.arrival[cell])


def as_mask(cells, shape):
    """Accept a boolean grid or an iterable of (row, col) cells."""
    if isinstance(cells, np.ndarray) and cells.dtype == bool:
        if cells.shape != shape:
            raise ValueError(f'mask shape {cells.shape} != grid {shape}')
        return cells.copy()
    mask = np.zeros(shape, dtype=bool)
    for row, col in cells:
        if 0 <= row < shape[0] and 0 <= col < shape[1]:
            mask[row, col] = True
    return mask


def dilation_cells(agent_radius, cell_size):
    return int(math.ceil(agent_radius / cell_size - 1e-9))


def dilate(obstacle, agent_radius, cell_size):
    """Obstacle cells grown by the agent radius (disk, rounded up to cells).

    Returns (blocked, clearance in meters).
    """
    if not obstacle.any():
        clearance = np.full(obstacle.shape, np.inf)
        return np.zeros(obstacle.shape, dtype=bool), clearance
    cells = ndimage.distance_transform_edt(~obstacle)
    blocked = cells <= dilation_cells(agent_radius, cell_size)
    return blocked, cells * cell_size


def solve_arrival(traversable, sources, cell_size):
    """First-order fast marching solve of |grad T| = 1 from `sources`.

    Sources outside `traversable` are ignored; cells not connected to a
    source come back as inf.
    """
    sources = sources & traversable
    if not sources.any():
        raise UnreachableSources('no traversable source cell')
    phi = ma.MaskedArray(np.ones(traversable.shape), mask=~traversable)
    phi[sources] = 0.0
    arrival = ma.filled(skfmm.distance(phi, dx=cell_size, order=1), np.inf)
    arrival = np.asarray(arrival, dtype=np.float64)
    arrival[~np.isfinite(arrival) | (arrival > 1e30)] = np.inf
    labels, _ = ndimage.label(traversable)
    reached = np.unique(labels[sources])
    arrival[~np.isin(labels, reached[reached > 0])] = np.inf
    arrival[sources] = 0.0
    return arrival


def compute_distance_field(nav_map, sources, agent_radius=0.17,
                           passable=None) -> DistanceField:
    """Distance field over a NavMap.

    Traversable cells are everything outside the dilated obstacle channel,
    unexplored space included. `passable` cells are forced traversable.
    """
    shape = nav_map.obstacle.shape
    source_mask = as_mask(sources, shape)
    blocked, clearance = dilate(nav_map.obstacle, agent_radius, nav_map.cell_size)
    traversable = ~blocked
    if passable is not None:
        traversable |= as_mask(passable, shape)
    arrival = solve_arrival(traversable, source_mask, nav_map.cell_size)
    return DistanceField(
        arrival=arrival,
        sources=source_mask & traversable,
        blocked=blocked,
        clearance=clearance,
        cell_size=nav_map.cell_size,
        origin=tuple(nav_map.origin),
    )


def dump_field(field: DistanceField, path):
    """Write the arrival grid as a normalized PGM, row 0 at the bottom."""
    gray = normalize_to_gray(field.arrival, invalid=~np.isfinite(field.arrival))
    write_pgm(path, np.flipud(gray))
