"""
Goal localization: lift goal pixels of the ego frame into the map's goal
channel.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from core.exceptions import EmptyGoal
from core.geometry import CameraModel, Pose, unproject
from localize.masks import CLASS, GoalMask
from mapping.navmap import NavMap


@dataclass(frozen=True)
class GoalChannel:
    cells: tuple
    centroid: tuple

    def __len__(self):
        return len(self.cells)


def _sparse_depth(depth, u, v):
    sparse = np.zeros_like(depth, dtype=np.float64)
    sparse[v, u] = depth[v, u]
    return sparse


def voxelize(points, nav_map: NavMap, min_points=1) -> GoalChannel:
    """Collapse points over height and replace the map's goal channel."""
    points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    if len(points) == 0:
        raise EmptyGoal('no goal points to project')
    rows, cols = nav_map.world_to_cells(points[:, :2])
    dr, dc = nav_map.grow_to(rows, cols)
    rows, cols = rows + dr, cols + dc
    counts = np.zeros(nav_map.shape, dtype=np.int64)
    np.add.at(counts, (rows, cols), 1)
    goal = counts >= max(1, int(min_points))
    if not goal.any():
        raise EmptyGoal(f'no cell collects {min_points} goal points')
    nav_map.goal = goal
    cells = tuple((int(r), int(c)) for r, c in zip(*np.nonzero(goal)))
    return GoalChannel(cells=cells, centroid=nav_map.goal_centroid())


def _lift(depth, u, v, cam, agent_pose):
    depth = np.asarray(depth, dtype=np.float64)
    if len(u) == 0:
        raise EmptyGoal('no goal pixels in view')
    cloud = unproject(_sparse_depth(depth, u, v), cam, agent_pose)
    if len(cloud) == 0:
        raise EmptyGoal('goal pixels carry no valid depth')
    return cloud.points


def project_goal(matches, mask: GoalMask, ego_depth, cam: CameraModel,
                 agent_pose: Pose, nav_map: NavMap, min_points=1) -> GoalChannel:
    """Project ego partners of in-mask goal keypoints into the goal channel."""
    if mask.method == CLASS:
        raise ValueError('class masks are localized with localize_class')
    if matches is None or len(matches) == 0:
        raise EmptyGoal('no matches')
    gx = np.rint(matches.goal_xy[:, 0]).astype(np.int64)
    gy = np.rint(matches.goal_xy[:, 1]).astype(np.int64)
    inside = mask.mask[gy, gx]
    if not inside.any():
        raise EmptyGoal('no match falls inside the goal mask')
    u = np.rint(matches.ego_xy[inside, 0]).astype(np.int64)
    v = np.rint(matches.ego_xy[inside, 1]).astype(np.int64)
    points = _lift(ego_depth, u, v, cam, agent_pose)
    return voxelize(points, nav_map, min_points)


def localize_class(ego_ids, ego_depth, category, categories, cam: CameraModel,
                   agent_pose: Pose, nav_map: NavMap, min_points=1) -> GoalChannel:
    """Every visible object of the goal category becomes a goal cell.

    `categories` maps instance ids to category names.
    """
    wanted = [i for i, c in categories.items() if c == category]
    v, u = np.nonzero(np.isin(ego_ids, wanted))
    points = _lift(ego_depth, u, v, cam, agent_pose)
    return voxelize(points, nav_map, min_points)


def localize_oracle(ego_ids, ego_depth, goal_instance_id, cam: CameraModel,
                    agent_pose: Pose, nav_map: NavMap, min_points=1) -> GoalChannel:
    """Every ego pixel of the goal instance becomes a goal point."""
    v, u = np.nonzero(np.asarray(ego_ids) == goal_instance_id)
    points = _lift(ego_depth, u, v, cam, agent_pose)
    return voxelize(points, nav_map, min_points)
