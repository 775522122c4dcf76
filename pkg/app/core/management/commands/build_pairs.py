"""
Django command to build the labelled image-pair dataset for calibration.
"""
import os

from django.conf import settings

from reid.calibration import build_pair_dataset, check_disjoint, split_scenes
from reid.storage import save_dataset, save_split
from simworld.storage import load_episodes, load_scenes

from ._common import NavigationCommand


class Command(NavigationCommand):
    """Split the scenes, then sample goal views of the training side and pair them up."""
    help = 'Build same/different instance image pairs on training scenes.'
    default_out = os.path.join('pairs', 'pairs.jsonl')

    def add_command_arguments(self, parser):
        defaults = settings.NAVIGATION['pairs']
        parser.add_argument('--scenes', required=True, help='scene directory')
        parser.add_argument('--fraction', type=float, default=defaults['fraction'])
        parser.add_argument(
            '--images-per-instance', type=int, default=defaults['images_per_instance'],
        )
        parser.add_argument(
            '--train-fraction', type=float, default=defaults['train_fraction'],
            help='share of scenes drawn for calibration',
        )
        parser.add_argument(
            '--train-scenes', nargs='+', default=None,
            help='explicit calibration scene ids (overrides --train-fraction)',
        )
        parser.add_argument(
            '--episodes', default=None,
            help='evaluation episode file; its scenes may not be used for calibration',
        )

    def run(self, **options):
        scenes = load_scenes(options['scenes'])
        split = split_scenes(
            scenes, options['train_fraction'], options['seed'], options['train_scenes'],
        )
        if options['episodes']:
            check_disjoint(split.train, load_episodes(options['episodes']))
        dataset = build_pair_dataset(
            [scenes[scene_id] for scene_id in split.train], options['fraction'],
            options['images_per_instance'], options['seed'],
        )
        out = self.out_path(options)
        save_dataset(dataset, out)
        split_path = save_split(split, os.path.join(os.path.dirname(os.path.abspath(out)),
                                                    'split.json'))
        positives = int(dataset.labels.sum())
        self.stdout.write(self.style.SUCCESS(
            f'Wrote {len(dataset.pairs)} pairs ({positives} positive) from '
            f'{len(split.train)} training scenes to {out}; split in {split_path}'
        ))
