"""
Django command to sample instance-image-goal episodes.
"""
import os

from core.exceptions import ContractViolation
from reid.storage import load_split
from simworld.episodes import generate_episodes
from simworld.storage import load_scenes, save_episodes

from ._common import NavigationCommand


class Command(NavigationCommand):
    """Sample episodes over a scene directory."""
    help = 'Generate episodes with goal images.'
    default_out = os.path.join('episodes', 'episodes.jsonl')

    def add_command_arguments(self, parser):
        parser.add_argument('--scenes', required=True, help='scene directory')
        parser.add_argument('--count', type=int, default=100)
        parser.add_argument(
            '--split', default=None,
            help='split.json from build_pairs; episodes use its evaluation scenes only',
        )

    def run(self, **options):
        scenes = load_scenes(options['scenes'])
        if options['split']:
            split = load_split(options['split'])
            missing = sorted(set(split.eval) - set(scenes))
            if missing:
                raise ContractViolation(f'evaluation scenes not found: {", ".join(missing)}')
            scenes = {scene_id: scenes[scene_id] for scene_id in split.eval}
        episodes = generate_episodes(list(scenes.values()), options['count'], options['seed'])
        if len(episodes) < options['count']:
            self.stdout.write(self.style.WARNING(
                f"{options['count'] - len(episodes)} draws were infeasible and skipped"
            ))
        out = save_episodes(episodes, self.out_path(options))
        self.stdout.write(self.style.SUCCESS(f'Wrote {len(episodes)} episodes to {out}'))
