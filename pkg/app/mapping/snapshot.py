"""
Map snapshot export: one PGM per channel plus a color composite.
"""
import os

import numpy as np

from core.imageio import write_pgm, write_ppm
from mapping.navmap import CHANNELS, NavMap, footprint_cells

UNEXPLORED = (255, 255, 255)
EXPLORED = (170, 170, 170)
OBSTACLE = (0, 0, 0)
FRONTIER = (0, 0, 255)
GOAL = (255, 0, 0)
AGENT = (0, 200, 0)


def composite(nav_map: NavMap, agent_pose=None, agent_radius=0.17):
    """RGB legend image, row 0 at the top (north up)."""
    image = np.empty(nav_map.shape + (3,), dtype=np.uint8)
    image[:] = UNEXPLORED
    image[nav_map.explored] = EXPLORED
    image[nav_map.obstacle] = OBSTACLE
    image[nav_map.frontier] = FRONTIER
    image[nav_map.goal] = GOAL
    if agent_pose is not None:
        for cell in footprint_cells(nav_map, agent_pose.xy, agent_radius):
            if nav_map.in_bounds(cell):
                image[cell] = AGENT
    return np.flipud(image)


def write_snapshot(nav_map: NavMap, directory, agent_pose=None, prefix='map'):
    """Write `<prefix>_<channel>.pgm` files and `<prefix>.ppm`; returns paths."""
    paths = []
    for name in CHANNELS:
        path = os.path.join(directory, f'{prefix}_{name}.pgm')
        write_pgm(path, np.flipud(getattr(nav_map, name)).astype(np.uint8) * 255)
        paths.append(path)
    path = os.path.join(directory, f'{prefix}.ppm')
    write_ppm(path, composite(nav_map, agent_pose))
    paths.append(path)
    return paths
