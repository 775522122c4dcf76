"""
Django command to replay one episode and dump frames and map snapshots.
"""
from django.core.management.base import CommandError

from pipeline.runner import run_episode

from ._common import NavigationCommand, add_input_arguments


class Command(NavigationCommand):
    """Write ego frames and agent maps of a single episode."""
    help = 'Replay an episode writing ego frames and map snapshots.'
    default_out = 'snapshots'

    def add_command_arguments(self, parser):
        add_input_arguments(parser)
        parser.add_argument('--episode-id', required=True)
        parser.add_argument('--every', type=int, default=10,
                            help='map snapshot interval in steps')

    def run(self, **options):
        run_config = self.run_config(options)
        scenes, episodes = self.load_inputs(options)
        episode = next((e for e in episodes if e.episode_id == options['episode_id']), None)
        if episode is None:
            raise CommandError(f"no episode {options['episode_id']}")
        if episode.scene_id not in scenes:
            raise CommandError(f'missing scene {episode.scene_id}')
        out = self.out_path(options)
        outcome = run_episode(
            scenes[episode.scene_id], episode, run_config.agent, seed=options['seed'],
            snapshot_dir=out, snapshot_every=options['every'],
        )
        self.stdout.write(self.style.SUCCESS(
            f"{'Success' if outcome.success else 'Failure'} after "
            f'{outcome.steps_taken} steps; snapshots in {out}'
        ))
