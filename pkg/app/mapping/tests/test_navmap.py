"""
Tests for map updates, frontiers and exploration targets.
"""
import math

import numpy as np
from django.test import SimpleTestCase

from core.exceptions import ExplorationExhausted
from core.geometry import PointCloud, Pose
from mapping.navmap import (
    MapParams,
    NavMap,
    extract_frontiers,
    frontier_mask,
    mark_collision,
    select_exploration_target,
    update_map,
)
from planner.fmm import compute_distance_field

PARAMS = MapParams(cell_size=0.05, initial_size=40, floor_height=0.1,
                   agent_height=1.41, agent_radius=0.17, min_frontier_size=1)


def create_cloud(points):
    points = np.asarray(points, dtype=np.float64)
    return PointCloud(points, np.zeros((len(points), 2), dtype=np.int64))


def brute_force_frontier(explored, obstacle):
    rows, cols = explored.shape
    out = np.zeros_like(explored)
    for r in range(rows):
        for c in range(cols):
            if not explored[r, c] or obstacle[r, c]:
                continue
            for dr, dc in ((-1, 0), (1, 0), (0, -1), (0, 1)):
                nr, nc = r + dr, c + dc
                if not (0 <= nr < rows and 0 <= nc < cols) or not explored[nr, nc]:
                    out[r, c] = True
    return out


class NavMapTests(SimpleTestCase):
    """Test map coordinates and growth."""

    def test_centered_origin(self):
        """Test the center lands in the middle of cell size // 2."""
        nav_map = NavMap.centered(40, 0.05)

        self.assertEqual(nav_map.world_to_cell((0.0, 0.0)), (20, 20))
        np.testing.assert_allclose(nav_map.cell_to_world((20, 20)), (0.0, 0.0), atol=1e-12)

    def test_grow_keeps_world_coordinates(self):
        """Test padding before row 0 shifts the origin, not the content."""
        nav_map = NavMap.centered(10, 0.1)
        nav_map.obstacle[5, 5] = True
        before = nav_map.cell_to_world((5, 5))

        shift = nav_map.grow_to(np.array([-3]), np.array([4]), margin=2)

        self.assertEqual(shift, (5, 0))
        self.assertEqual(nav_map.shape, (15, 10))
        self.assertTrue(nav_map.obstacle[10, 5])
        np.testing.assert_allclose(nav_map.cell_to_world((10, 5)), before)

    def test_goal_centroid(self):
        """Test the goal centroid is the mean goal cell."""
        nav_map = NavMap.centered(40, 0.05)
        self.assertIsNone(nav_map.goal_centroid())
        nav_map.goal[20, 20] = nav_map.goal[20, 22] = True

        np.testing.assert_allclose(nav_map.goal_centroid(), (0.05, 0.0), atol=1e-12)


class UpdateMapTests(SimpleTestCase):
    """Test folding depth frames into the map."""

    def test_obstacle_band(self):
        """Test only points inside the height band become obstacles."""
        nav_map = NavMap.centered(40, 0.05)
        cloud = create_cloud([[0.5, 0.0, 0.5], [0.0, 0.5, 0.05], [-0.5, 0.0, 2.0]])

        update_map(nav_map, cloud, Pose(), PARAMS)

        self.assertTrue(nav_map.obstacle[nav_map.world_to_cell((0.5, 0.0))])
        self.assertFalse(nav_map.obstacle[nav_map.world_to_cell((0.0, 0.5))])
        self.assertFalse(nav_map.obstacle[nav_map.world_to_cell((-0.5, 0.0))])
        self.assertEqual(int(nav_map.obstacle.sum()), 1)

    def test_rays_marked_explored(self):
        """Test cells between the agent and a point are explored."""
        nav_map = NavMap.centered(40, 0.05)

        update_map(nav_map, create_cloud([[0.6, 0.0, 0.0]]), Pose(), PARAMS)

        for x in np.arange(0.0, 0.6, 0.05):
            self.assertTrue(nav_map.explored[nav_map.world_to_cell((x, 0.0))])
        self.assertFalse(nav_map.explored[nav_map.world_to_cell((0.0, 0.6))])

    def test_footprint_explored(self):
        """Test the agent footprint is explored even without points."""
        nav_map = NavMap.centered(40, 0.05)

        update_map(nav_map, PointCloud(), Pose(), PARAMS)

        self.assertTrue(nav_map.explored[nav_map.world_to_cell((0.1, 0.1))])
        self.assertFalse(nav_map.explored[nav_map.world_to_cell((0.3, 0.0))])

    def test_grows_for_far_points(self):
        """Test points outside the grid extend it."""
        nav_map = NavMap.centered(40, 0.05)

        update_map(nav_map, create_cloud([[3.0, 0.0, 0.5]]), Pose(), PARAMS)

        cell = nav_map.world_to_cell((3.0, 0.0))
        self.assertTrue(nav_map.in_bounds(cell))
        self.assertTrue(nav_map.obstacle[cell])

    def test_obstacles_never_cleared(self):
        """Test a later ray through an obstacle keeps it."""
        nav_map = NavMap.centered(40, 0.05)
        update_map(nav_map, create_cloud([[0.5, 0.0, 0.5]]), Pose(), PARAMS)

        update_map(nav_map, create_cloud([[0.8, 0.0, 0.0]]), Pose(), PARAMS)

        self.assertTrue(nav_map.obstacle[nav_map.world_to_cell((0.5, 0.0))])


class FrontierTests(SimpleTestCase):
    """Test frontier extraction."""

    def test_matches_brute_force(self):
        """Test the vectorized frontier equals a direct neighbour scan."""
        rng = np.random.default_rng(0)
        explored = rng.random((25, 30)) < 0.6
        obstacle = rng.random((25, 30)) < 0.15

        np.testing.assert_array_equal(
            frontier_mask(explored, obstacle), brute_force_frontier(explored, obstacle),
        )

    def test_small_components_dropped(self):
        """Test frontier components under the minimum size are removed."""
        nav_map = NavMap.centered(20, 0.05)
        nav_map.explored[:, :] = True
        nav_map.explored[5, 5] = False
        nav_map.explored[12:, 12:] = False

        extract_frontiers(nav_map, min_size=5)

        self.assertFalse(nav_map.frontier[4, 5])
        self.assertTrue(nav_map.frontier[11, 15])
        self.assertTrue(nav_map.frontier[0, 0])


class ExplorationTargetTests(SimpleTestCase):
    """Test frontier target selection."""

    def test_nearest_reachable_frontier(self):
        """Test the frontier cell with the lowest arrival time wins."""
        nav_map = NavMap.centered(20, 0.05)
        nav_map.frontier[10, 15] = True
        nav_map.frontier[10, 3] = True
        field = compute_distance_field(nav_map, [(10, 12)], agent_radius=0.0)

        self.assertEqual(select_exploration_target(nav_map, field), (10, 15))

    def test_ties_break_row_major(self):
        """Test equal arrival times pick the first cell in row-major order."""
        nav_map = NavMap.centered(21, 0.05)
        nav_map.frontier[10, 13] = True
        nav_map.frontier[10, 7] = True
        field = compute_distance_field(nav_map, [(10, 10)], agent_radius=0.0)
        field.arrival[10, 13] = field.arrival[10, 7] = 0.15

        self.assertEqual(select_exploration_target(nav_map, field), (10, 7))

    def test_exhausted(self):
        """Test no frontier raises."""
        nav_map = NavMap.centered(20, 0.05)
        field = compute_distance_field(nav_map, [(10, 10)], agent_radius=0.0)

        with self.assertRaises(ExplorationExhausted):
            select_exploration_target(nav_map, field)

    def test_excluded_frontier(self):
        """Test excluded cells are skipped."""
        nav_map = NavMap.centered(20, 0.05)
        nav_map.frontier[10, 15] = True
        field = compute_distance_field(nav_map, [(10, 12)], agent_radius=0.0)

        with self.assertRaises(ExplorationExhausted):
            select_exploration_target(nav_map, field, exclude=nav_map.frontier.copy())


class CollisionTests(SimpleTestCase):
    """Test collision marking."""

    def test_strip_ahead_marked(self):
        """Test a blocked move marks cells ahead, not the agent cell."""
        nav_map = NavMap.centered(40, 0.05)

        cells = mark_collision(nav_map, Pose(0.0, 0.0, 0.0), distance=0.25, radius=0.1)

        self.assertTrue(cells)
        self.assertTrue(nav_map.obstacle[nav_map.world_to_cell((0.25, 0.0))])
        self.assertFalse(nav_map.obstacle[nav_map.world_to_cell((0.0, 0.0))])
        for row, col in cells:
            x, _ = nav_map.cell_to_world((row, col))
            self.assertTrue(math.isclose(x, 0.25, abs_tol=0.05))
