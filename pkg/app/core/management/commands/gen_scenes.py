"""
Django command to generate synthetic multi-room scenes.
"""
from simworld.scene import generate_scene
from simworld.storage import save_scene

from ._common import NavigationCommand


class Command(NavigationCommand):
    """Generate scenes and write one JSON file each."""
    help = 'Generate synthetic scenes.'
    default_out = 'scenes'

    def add_command_arguments(self, parser):
        parser.add_argument('--count', type=int, default=10)

    def run(self, **options):
        out = self.out_path(options)
        for index in range(options['count']):
            scene = generate_scene(options['seed'] + index, scene_id=f'scene-{index:03d}')
            save_scene(scene, out)
        self.stdout.write(self.style.SUCCESS(f"Wrote {options['count']} scenes to {out}"))
