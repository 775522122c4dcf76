"""
Shared options and error handling of the navigation commands.
"""
import os

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError
from rest_framework.exceptions import ValidationError

from core.exceptions import NavigationError
from core.jsonio import read_json
from core.serializers import load
from pipeline.serializers import AgentConfigSerializer
from simworld.storage import load_episodes, load_scenes


class NavigationCommand(BaseCommand):
    """Base command with --seed, --config, --out, --parallelism and --preset."""
    default_out = ''

    def add_arguments(self, parser):
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--config', default=None, help='run configuration JSON')
        parser.add_argument('--out', default=None, help='output path')
        parser.add_argument('--parallelism', type=int, default=1)
        parser.add_argument(
            '--preset', default=None,
            choices=sorted(settings.NAVIGATION['presets']),
        )
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def handle(self, *args, **options):
        """Entrypoint for command."""
        if options['parallelism'] < 1:
            raise CommandError('--parallelism must be at least 1')
        try:
            self.run(**options)
        except ValidationError as exc:
            raise CommandError(f'invalid input: {exc.detail}') from exc
        except (NavigationError, OSError, ValueError) as exc:
            raise CommandError(str(exc)) from exc

    def run(self, **options):
        raise NotImplementedError

    def out_path(self, options):
        return options['out'] or os.path.join(settings.OUTPUT_DIR, self.default_out)

    def run_config(self, options, **overrides):
        """RunConfig from --config (or defaults) with --preset applied.

        A --thresholds file (as written by calibrate) fills the per-method
        thresholds; its values win over those in the config.
        """
        data = read_json(options['config']) if options['config'] else {}
        if options.get('thresholds'):
            data['thresholds'] = {
                **data.get('thresholds', {}), **read_json(options['thresholds']),
            }
        if options['preset']:
            data['preset'] = options['preset']
        data.update({k: v for k, v in overrides.items() if v is not None})
        return load(AgentConfigSerializer, data)

    def load_inputs(self, options):
        scenes = load_scenes(options['scenes'])
        episodes = load_episodes(options['episodes'])
        self.stdout.write(f'Loaded {len(scenes)} scenes and {len(episodes)} episodes')
        return scenes, episodes


def add_input_arguments(parser):
    parser.add_argument('--scenes', required=True, help='scene directory')
    parser.add_argument('--episodes', required=True, help='episode file')


def add_threshold_argument(parser):
    parser.add_argument(
        '--thresholds', default=None,
        help='thresholds.json from calibrate, merged into the config thresholds',
    )
