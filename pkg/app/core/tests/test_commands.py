"""
Test custom Django management commands.
"""
import dataclasses
import math
import os
import tempfile
from io import StringIO
from types import SimpleNamespace
from unittest.mock import patch

import numpy as np
from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from core.csvio import read_csv
from core.geometry import CameraModel
from core.jsonio import read_json, write_json
from evaluation.metrics import Metrics
from evaluation.reports import write_suite
from evaluation.suite import run_suite
from pipeline.config import LOCALIZE_ORACLE, AgentConfig
from reid.calibration import CalibrationDataset, PairRecord, SceneSplit
from reid.storage import load_dataset, load_report, load_split, save_dataset, save_split
from simworld.storage import load_episodes
from simworld.testing import create_episode, create_scene


def create_result(label='oracle+mask-projected'):
    return SimpleNamespace(label=label, metrics=Metrics(0.5, 0.25, 1.5, 0.0, 2))


class CommandTestCase(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.config = os.path.join(self.tmp.name, 'run.json')
        write_json(self.config, {'reid_method': 'oracle'})

    def call(self, name, *args, **options):
        out = StringIO()
        call_command(name, *args, stdout=out, **options)
        return out.getvalue()


@patch('core.management.commands.gen_scenes.save_scene')
@patch('core.management.commands.gen_scenes.generate_scene')
class GenerateScenesTests(CommandTestCase):
    """Test scene generation."""

    def test_seeds_and_ids(self, patched_generate, patched_save):
        """Test one scene per index with consecutive seeds."""
        output = self.call('gen_scenes', count=2, seed=5, out=self.tmp.name)

        self.assertEqual(
            [c.args + (c.kwargs['scene_id'],) for c in patched_generate.call_args_list],
            [(5, 'scene-000'), (6, 'scene-001')],
        )
        self.assertEqual(patched_save.call_count, 2)
        self.assertIn('Wrote 2 scenes', output)

    def test_parallelism_positive(self, patched_generate, patched_save):
        """Test --parallelism below 1 is rejected."""
        with self.assertRaises(CommandError):
            self.call('gen_scenes', count=1, parallelism=0)
        patched_generate.assert_not_called()


@patch('core.management.commands._common.load_episodes', return_value=[])
@patch('core.management.commands._common.load_scenes', return_value={})
class RunTests(CommandTestCase):
    """Test the run command."""

    @patch('core.management.commands.run.write_suite')
    @patch('core.management.commands.run.run_suite')
    def test_single_configuration(self, patched_run, patched_write, *_):
        """Test --budget reaches the agent configuration."""
        patched_run.return_value = create_result()

        output = self.call('run', scenes='s', episodes='e', config=self.config,
                           budget=5, parallelism=3, out=self.tmp.name)

        config = patched_run.call_args.args[2]
        self.assertEqual(config.budget, 5)
        self.assertEqual(config.label, 'oracle+mask-projected')
        self.assertEqual(patched_run.call_args.args[3], 3)
        patched_write.assert_called_once_with(patched_run.return_value, self.tmp.name)
        self.assertIn('SR=0.500', output)

    @patch('core.management.commands.run.write_grid')
    @patch('core.management.commands.run.run_grid')
    def test_ablation_grid(self, patched_grid, patched_write, *_):
        """Test a config with a grid runs every row."""
        write_json(self.config, {
            'reid_method': 'oracle',
            'ablation_grid': [['oracle', 'oracle'], ['oracle', 'crop-projected']],
        })
        patched_grid.return_value = [create_result('oracle+oracle'),
                                     create_result('oracle+crop-projected')]

        output = self.call('run', scenes='s', episodes='e', config=self.config,
                           out=self.tmp.name)

        run_config = patched_grid.call_args.args[2]
        self.assertEqual(len(run_config.grid_configs()), 2)
        patched_write.assert_called_once()
        self.assertIn('oracle+crop-projected', output)

    @patch('core.management.commands.run.write_grid')
    @patch('core.management.commands.run.run_grid', return_value=[])
    def test_method_grid_with_calibrated_thresholds(self, patched_grid, patched_write, *_):
        """Test the shipped method grid runs with a thresholds file from calibrate."""
        thresholds = os.path.join(self.tmp.name, 'thresholds.json')
        write_json(thresholds, {'conf-sum': 3.5, 'match-count': 6.5, 'global-embed': 0.8})

        self.call('run', scenes='s', episodes='e', thresholds=thresholds, out=self.tmp.name,
                  config=str(settings.BASE_DIR / 'configs' / 'reid_localization_grid.json'))

        configs = patched_grid.call_args.args[2].grid_configs()
        self.assertEqual(len(configs), 16)
        taus = {c.reid_method: c.tau for c in configs}
        self.assertEqual(taus, {'conf-sum': 3.5, 'match-count': 6.5,
                                'global-embed': 0.8, 'oracle': None})
        self.assertEqual({c.localization_method for c in configs},
                         {'mask-projected', 'crop-projected', 'class-projected', 'oracle'})

    def test_method_grid_without_thresholds(self, *_):
        """Test the method grid refuses to run uncalibrated."""
        with self.assertRaises(CommandError):
            self.call('run', scenes='s', episodes='e',
                      config=str(settings.BASE_DIR / 'configs' / 'reid_localization_grid.json'))

    def test_missing_threshold(self, *_):
        """Test a scored method without tau fails cleanly."""
        write_json(self.config, {'reid_method': 'conf-sum'})

        with self.assertRaises(CommandError):
            self.call('run', scenes='s', episodes='e', config=self.config)

    def test_missing_config_file(self, *_):
        """Test an unreadable config fails cleanly."""
        with self.assertRaises(CommandError):
            self.call('run', scenes='s', episodes='e',
                      config=os.path.join(self.tmp.name, 'absent.json'))


@patch('core.management.commands._common.load_episodes', return_value=[])
@patch('core.management.commands._common.load_scenes', return_value={})
class SweepTests(CommandTestCase):
    """Test the threshold sweep command."""

    def test_needs_thresholds(self, *_):
        """Test a sweep without taus or report is rejected."""
        with self.assertRaises(CommandError):
            self.call('sweep_tau', scenes='s', episodes='e', config=self.config)

    @patch('core.management.commands.sweep_tau.write_sweep')
    @patch('core.management.commands.sweep_tau.sweep_tau')
    def test_explicit_taus(self, patched_sweep, patched_write, *_):
        """Test --taus are passed through."""
        patched_sweep.return_value = []
        patched_write.return_value = {'best_tau': 1.0, 'best_sr': 0.5}

        self.call('sweep_tau', '--taus', '2.0', '1.0', scenes='s', episodes='e',
                  config=self.config, out=self.tmp.name)

        self.assertEqual(patched_sweep.call_args.args[3], [2.0, 1.0])


@patch('core.management.commands._common.load_episodes', return_value=[])
@patch('core.management.commands._common.load_scenes', return_value={})
class SnapshotTests(CommandTestCase):
    """Test the snapshot command."""

    def test_unknown_episode(self, *_):
        """Test a missing episode id is reported."""
        with self.assertRaises(CommandError):
            self.call('snapshot', scenes='s', episodes='e', config=self.config,
                      episode_id='nope')


def create_dataset():
    rng = np.random.default_rng(0)
    images = {ref: rng.integers(0, 256, (40, 40, 3), dtype=np.uint8) for ref in 'abcd'}
    pairs = [
        PairRecord(0, 'a', 'b', 's1:1', 's1:1'),
        PairRecord(1, 'c', 'd', 's1:2', 's1:2'),
        PairRecord(2, 'a', 'c', 's1:1', 's1:2'),
        PairRecord(3, 'b', 'd', 's1:1', 's1:2'),
    ]
    return CalibrationDataset(pairs=pairs, images=images)


class GenerateEpisodesTests(CommandTestCase):
    """Test episode generation."""

    def setUp(self):
        super().setUp()
        self.scene = create_scene()
        self.out = os.path.join(self.tmp.name, 'episodes.jsonl')

    @patch('core.management.commands.gen_episodes.generate_episodes')
    @patch('core.management.commands.gen_episodes.load_scenes')
    def test_writes_episode_file(self, patched_scenes, patched_generate):
        """Test sampled episodes land in a reloadable file."""
        patched_scenes.return_value = {'room': self.scene}
        patched_generate.return_value = [create_episode(self.scene)]

        output = self.call('gen_episodes', scenes='s', count=3, seed=4, out=self.out)

        self.assertEqual(patched_generate.call_args.args[1:], (3, 4))
        self.assertEqual([e.episode_id for e in load_episodes(self.out)], ['room-ep0000'])
        self.assertIn('2 draws were infeasible', output)
        self.assertIn('Wrote 1 episodes', output)

    @patch('core.management.commands.gen_episodes.generate_episodes', return_value=[])
    @patch('core.management.commands.gen_episodes.load_scenes')
    def test_split_keeps_evaluation_scenes(self, patched_scenes, patched_generate):
        """Test --split drops the calibration scenes."""
        patched_scenes.return_value = {'room': self.scene, 'other': create_scene('other')}
        split = save_split(SceneSplit(train=('other',), eval=('room',)),
                           os.path.join(self.tmp.name, 'split.json'))

        self.call('gen_episodes', scenes='s', count=0, split=split, out=self.out)

        scenes = patched_generate.call_args.args[0]
        self.assertEqual([scene.scene_id for scene in scenes], ['room'])

    @patch('core.management.commands.gen_episodes.load_scenes')
    def test_split_with_unknown_scene(self, patched_scenes):
        """Test a split naming absent scenes fails cleanly."""
        patched_scenes.return_value = {'room': self.scene}
        split = save_split(SceneSplit(train=('room',), eval=('gone',)),
                           os.path.join(self.tmp.name, 'split.json'))

        with self.assertRaises(CommandError):
            self.call('gen_episodes', scenes='s', split=split, out=self.out)

    def test_missing_scene_directory(self):
        """Test an absent scene directory fails cleanly."""
        with self.assertRaises(CommandError):
            self.call('gen_episodes', scenes=os.path.join(self.tmp.name, 'absent'))


@patch('core.management.commands.build_pairs.load_scenes',
       return_value={'s1': 'scene-1', 's2': 'scene-2', 's3': 'scene-3', 's4': 'scene-4'})
class BuildPairsTests(CommandTestCase):
    """Test building the calibration pairs."""

    def setUp(self):
        super().setUp()
        self.out = os.path.join(self.tmp.name, 'pairs', 'pairs.jsonl')

    @patch('core.management.commands.build_pairs.build_pair_dataset')
    def test_pairs_from_training_scenes(self, patched_build, _):
        """Test pairs come from the training side and the split is written."""
        patched_build.return_value = create_dataset()

        output = self.call('build_pairs', scenes='s', train_fraction=0.5, seed=2,
                           out=self.out)

        split = load_split(os.path.join(self.tmp.name, 'pairs', 'split.json'))
        self.assertEqual(len(split.train), 2)
        self.assertFalse(set(split.train) & set(split.eval))
        self.assertEqual(set(split.train) | set(split.eval), {'s1', 's2', 's3', 's4'})
        self.assertEqual(patched_build.call_args.args[0],
                         [f'scene-{s[1]}' for s in split.train])
        self.assertEqual(len(load_dataset(self.out).pairs), 4)
        self.assertIn('4 pairs (2 positive)', output)

    @patch('core.management.commands.build_pairs.build_pair_dataset')
    def test_explicit_training_scenes(self, patched_build, _):
        """Test --train-scenes fixes the calibration side."""
        patched_build.return_value = create_dataset()

        self.call('build_pairs', '--train-scenes', 's1', 's3', scenes='s', out=self.out)

        split = load_split(os.path.join(self.tmp.name, 'pairs', 'split.json'))
        self.assertEqual(split.train, ('s1', 's3'))
        self.assertEqual(split.eval, ('s2', 's4'))

    @patch('core.management.commands.build_pairs.build_pair_dataset')
    @patch('core.management.commands.build_pairs.load_episodes',
           return_value=[SimpleNamespace(scene_id='s1')])
    def test_refuses_evaluation_scenes(self, _episodes, patched_build, _scenes):
        """Test calibration scenes may not host evaluation episodes."""
        with self.assertRaises(CommandError):
            self.call('build_pairs', '--train-scenes', 's1', 's2', scenes='s',
                      episodes='episodes.jsonl', out=self.out)
        patched_build.assert_not_called()

    def test_unknown_training_scene(self, _):
        """Test a training scene outside the directory is rejected."""
        with self.assertRaises(CommandError):
            self.call('build_pairs', '--train-scenes', 's9', scenes='s', out=self.out)


class CalibrateTests(CommandTestCase):
    """Test threshold calibration on a stored pair dataset."""

    def setUp(self):
        super().setUp()
        self.pairs = save_dataset(create_dataset(), os.path.join(self.tmp.name, 'pairs.jsonl'))
        self.out = os.path.join(self.tmp.name, 'calibration')

    def test_writes_reports(self):
        """Test reports, curves, ranking and the thresholds file."""
        output = self.call('calibrate', '--methods', 'global-embed', pairs=self.pairs,
                           out=self.out)

        report = load_report(os.path.join(self.out, 'global-embed.json'))
        thresholds = read_json(os.path.join(self.out, 'thresholds.json'))
        self.assertEqual(thresholds, {'global-embed': report.tau_star})
        ranking = read_csv(os.path.join(self.out, 'ranking.csv'))
        self.assertEqual([row['method'] for row in ranking], ['global-embed'])
        for name in ('global-embed_curves.csv', 'global-embed_scores.csv', 'pr.svg'):
            self.assertTrue(os.path.exists(os.path.join(self.out, name)))
        self.assertIn('global-embed: tau*=', output)

    def test_unknown_method(self):
        """Test an unknown method is rejected."""
        with self.assertRaises(CommandError):
            self.call('calibrate', '--methods', 'pixel-diff', pairs=self.pairs)

    def test_missing_pairs(self):
        """Test an absent manifest fails cleanly."""
        with self.assertRaises(CommandError):
            self.call('calibrate', pairs=os.path.join(self.tmp.name, 'absent.jsonl'),
                      out=self.out)


class ReportTests(CommandTestCase):
    """Test recomputing a run directory's report."""

    def setUp(self):
        super().setUp()
        self.scene = create_scene()
        self.episode = create_episode(self.scene)
        self.run_dir = os.path.join(self.tmp.name, 'run')
        config = dataclasses.replace(
            AgentConfig.from_settings(reid_method='oracle',
                                      localization_method=LOCALIZE_ORACLE, budget=3),
            camera=CameraModel(32, 18, math.radians(42.0), 1.31, 0.0),
        )
        write_suite(run_suite({'room': self.scene}, [self.episode], config), self.run_dir)

    def test_report_file(self):
        """Test report.json matches the run's metrics."""
        with patch('core.management.commands._common.load_scenes',
                   return_value={'room': self.scene}), \
                patch('core.management.commands._common.load_episodes',
                      return_value=[self.episode]):
            output = self.call('report', self.run_dir, scenes='s', episodes='e')

        report = read_json(os.path.join(self.run_dir, 'report.json'))
        self.assertEqual(report['episodes'], 1)
        self.assertEqual(report['methods'], ['oracle+oracle'])
        self.assertEqual(sum(report['failures'].values()), 0 if report['sr'] else 1)
        self.assertIn('SR=', output)

    @patch('core.management.commands._common.load_episodes', return_value=[])
    @patch('core.management.commands._common.load_scenes', return_value={})
    def test_missing_run_directory(self, *_):
        """Test a directory without outcomes fails cleanly."""
        with self.assertRaises(CommandError):
            self.call('report', os.path.join(self.tmp.name, 'absent'),
                      scenes='s', episodes='e')
