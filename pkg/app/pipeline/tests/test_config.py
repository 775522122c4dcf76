"""
Tests for agent configuration and run files.
"""
from django.test import SimpleTestCase
from rest_framework.exceptions import ValidationError

from core.serializers import load
from pipeline.config import CROP_PROJECTED, AgentConfig, preset_camera
from pipeline.serializers import AgentConfigSerializer


def load_run(**data):
    return load(AgentConfigSerializer, data)


class AgentConfigTests(SimpleTestCase):
    """Test settings-backed agent configurations."""

    def test_from_settings(self):
        """Test defaults come from the settings module."""
        config = AgentConfig.from_settings(reid_method='oracle')

        self.assertEqual(config.label, 'oracle+mask-projected')
        self.assertEqual(config.camera.width, 320)
        self.assertEqual(config.success_radius, 1.0)

    def test_knob_overrides(self):
        """Test knob groups accept partial overrides."""
        config = AgentConfig.from_settings(planner={'lookahead': 1.0}, budget=50)

        self.assertEqual(config.planner.lookahead, 1.0)
        self.assertEqual(config.budget, 50)

    def test_preset_camera(self):
        """Test resolution presets."""
        self.assertEqual(preset_camera('paper-res').width, 640)
        with self.assertRaises(ValueError):
            preset_camera('huge')

    def test_scored_method_needs_tau(self):
        """Test switching to a scored method without tau raises."""
        config = AgentConfig.from_settings(reid_method='oracle')

        with self.assertRaises(ValueError):
            config.with_methods('conf-sum', CROP_PROJECTED)
        switched = config.with_methods('conf-sum', CROP_PROJECTED, tau=2.0)
        self.assertEqual(switched.tau, 2.0)
        self.assertEqual(switched.label, 'conf-sum+crop-projected')


class RunFileTests(SimpleTestCase):
    """Test run file validation."""

    def test_tau_required(self):
        """Test a scored method without any threshold is rejected."""
        with self.assertRaises(ValidationError):
            load_run()

    def test_calibrated_threshold(self):
        """Test the calibrated threshold fills in a missing tau."""
        run = load_run(thresholds={'conf-sum': 2.5})

        self.assertEqual(run.agent.tau, 2.5)

    def test_explicit_tau_wins(self):
        """Test an explicit tau overrides the calibrated one."""
        run = load_run(tau=1.0, thresholds={'conf-sum': 2.5})

        self.assertEqual(run.agent.tau, 1.0)

    def test_grid_configs(self):
        """Test one configuration per ablation row in file order."""
        run = load_run(
            tau=0.5,
            thresholds={'global-embed': 0.9},
            ablation_grid=[
                ['conf-sum', 'crop-projected'],
                ['global-embed', 'mask-projected'],
                ['oracle', 'oracle'],
            ],
        )

        configs = run.grid_configs()
        self.assertEqual(
            [c.label for c in configs],
            ['conf-sum+crop-projected', 'global-embed+mask-projected', 'oracle+oracle'],
        )
        self.assertEqual([c.tau for c in configs], [0.5, 0.9, None])

    def test_grid_row_without_threshold(self):
        """Test a grid row with an uncalibrated method is rejected."""
        with self.assertRaises(ValidationError):
            load_run(reid_method='oracle', ablation_grid=[['match-count', 'oracle']])

    def test_unknown_methods(self):
        """Test unknown method names are rejected."""
        with self.assertRaises(ValidationError):
            load_run(reid_method='oracle', localization_method='guess')
        with self.assertRaises(ValidationError):
            load_run(reid_method='oracle', ablation_grid=[['oracle', 'guess']])

    def test_crop_range_increasing(self):
        """Test crop fractions must be increasing."""
        with self.assertRaises(ValidationError):
            load_run(reid_method='oracle', localize={'crop_x': [0.6, 0.3]})

    def test_knobs_reach_agent(self):
        """Test knob blocks land in the agent configuration."""
        run = load_run(reid_method='oracle', localize={'crop_x': [0.25, 0.75]},
                       mapping={'min_frontier_size': 8})

        self.assertEqual(run.agent.localize.crop_x, (0.25, 0.75))
        self.assertEqual(run.agent.mapping.min_frontier_size, 8)
