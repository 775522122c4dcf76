"""
Tests for goal masks and goal projection.
"""
import math

import numpy as np
from django.test import SimpleTestCase

from core.exceptions import EmptyGoal, MaskFailure
from core.geometry import CameraModel, Pose
from localize.masks import CLASS, CROP, ORACLE_MASK, crop_bounds, make_goal_mask
from localize.projection import localize_class, localize_oracle, project_goal
from mapping.navmap import NavMap
from reid.features import MatchSet
from simworld.render import RenderOutput

CAMERA = CameraModel(64, 48, math.radians(90.0), 1.0, 0.0)


def create_goal_render(center_id=4):
    ids = np.zeros((64, 64), dtype=np.int32)
    ids[20:44, 20:44] = center_id
    return RenderOutput(
        rgb=np.zeros((64, 64, 3), dtype=np.uint8),
        depth=np.ones((64, 64)),
        instance_ids=ids,
    )


def create_matches(goal_xy, ego_xy):
    goal_xy = np.asarray(goal_xy, dtype=np.float64)
    return MatchSet(
        pairs=np.stack([np.arange(len(goal_xy))] * 2, axis=1),
        goal_xy=goal_xy,
        ego_xy=np.asarray(ego_xy, dtype=np.float64),
        confidences=np.ones(len(goal_xy)),
    )


class MaskTests(SimpleTestCase):
    """Test goal-image masks."""

    def test_crop_rectangle(self):
        """Test the crop of a 512 x 512 goal image."""
        self.assertEqual(crop_bounds(512, 512), (170, 341, 170, 448))

    def test_crop_mask(self):
        """Test the crop mask covers exactly the rectangle."""
        render = RenderOutput(
            rgb=np.zeros((512, 512, 3), dtype=np.uint8),
            depth=np.zeros((512, 512)),
            instance_ids=np.zeros((512, 512), dtype=np.int32),
        )

        mask = make_goal_mask(render, CROP)

        self.assertEqual(int(mask.mask.sum()), (341 - 170) * (448 - 170))
        self.assertTrue(mask.mask[170, 170])
        self.assertFalse(mask.mask[448, 200])
        self.assertFalse(mask.mask[200, 341])

    def test_oracle_mask(self):
        """Test the oracle mask is the center instance."""
        render = create_goal_render()

        mask = make_goal_mask(render, ORACLE_MASK, goal_instance_id=4)

        np.testing.assert_array_equal(mask.mask, render.instance_ids == 4)

    def test_oracle_mask_needs_instance_at_center(self):
        """Test an empty or foreign center pixel raises."""
        with self.assertRaises(MaskFailure):
            make_goal_mask(create_goal_render(center_id=0), ORACLE_MASK)
        with self.assertRaises(MaskFailure):
            make_goal_mask(create_goal_render(center_id=5), ORACLE_MASK, goal_instance_id=4)

    def test_class_mask(self):
        """Test the class mask keeps the whole image and the category."""
        mask = make_goal_mask(create_goal_render(), CLASS, category='chair')

        self.assertEqual(mask.area_fraction, 1.0)
        self.assertEqual(mask.category, 'chair')


class ProjectGoalTests(SimpleTestCase):
    """Test projecting matched keypoints into the goal channel."""

    def setUp(self):
        self.nav_map = NavMap.centered(200, 0.05)
        self.depth = np.zeros((48, 64))
        self.depth[24, 32] = 2.0
        self.mask = make_goal_mask(create_goal_render(), CROP)

    def test_center_match_two_meters_ahead(self):
        """Test a match at the ego center lands 40 cells ahead."""
        matches = create_matches([[32, 32]], [[32, 24]])

        channel = project_goal(matches, self.mask, self.depth, CAMERA, Pose(), self.nav_map)

        agent = self.nav_map.world_to_cell((0.0, 0.0))
        self.assertEqual(channel.cells, ((agent[0], agent[1] + 40),))
        self.assertTrue(self.nav_map.goal[agent[0], agent[1] + 40])
        self.assertAlmostEqual(channel.centroid[0], 2.0, delta=0.05)

    def test_matches_outside_mask(self):
        """Test matches outside the mask give no goal."""
        matches = create_matches([[2, 2]], [[32, 24]])

        with self.assertRaises(EmptyGoal):
            project_goal(matches, self.mask, self.depth, CAMERA, Pose(), self.nav_map)

    def test_partner_without_depth(self):
        """Test ego partners with invalid depth give no goal."""
        matches = create_matches([[32, 32]], [[10, 10]])

        with self.assertRaises(EmptyGoal):
            project_goal(matches, self.mask, self.depth, CAMERA, Pose(), self.nav_map)

    def test_class_mask_rejected(self):
        """Test class masks go through localize_class instead."""
        class_mask = make_goal_mask(create_goal_render(), CLASS, category='chair')

        with self.assertRaises(ValueError):
            project_goal(create_matches([[32, 32]], [[32, 24]]), class_mask,
                         self.depth, CAMERA, Pose(), self.nav_map)

    def test_min_points_per_cell(self):
        """Test cells with too few points are dropped."""
        matches = create_matches([[32, 32]], [[32, 24]])

        with self.assertRaises(EmptyGoal):
            project_goal(matches, self.mask, self.depth, CAMERA, Pose(), self.nav_map,
                         min_points=2)


class LocalizeClassTests(SimpleTestCase):
    """Test category and oracle localization."""

    def setUp(self):
        self.nav_map = NavMap.centered(200, 0.05)
        self.ids = np.zeros((48, 64), dtype=np.int32)
        self.depth = np.zeros((48, 64))
        self.ids[24, 10] = 1
        self.ids[24, 50] = 3
        self.depth[24, 10] = 1.0
        self.depth[24, 50] = 3.0
        self.categories = {1: 'chair', 2: 'plant', 3: 'chair'}

    def test_both_chairs_marked(self):
        """Test every instance of the category becomes goal."""
        channel = localize_class(self.ids, self.depth, 'chair', self.categories,
                                 CAMERA, Pose(), self.nav_map)

        self.assertEqual(len(channel), 2)

    def test_no_category_in_view(self):
        """Test a missing category gives no goal."""
        with self.assertRaises(EmptyGoal):
            localize_class(self.ids, self.depth, 'plant', self.categories,
                           CAMERA, Pose(), self.nav_map)

    def test_oracle_instance_only(self):
        """Test the oracle keeps only the goal instance."""
        channel = localize_oracle(self.ids, self.depth, 3, CAMERA, Pose(), self.nav_map)

        self.assertEqual(len(channel), 1)
        x, y = channel.centroid
        self.assertGreater(x, 1.0)
        self.assertLess(y, 0.0)
