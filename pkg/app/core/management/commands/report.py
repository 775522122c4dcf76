"""
Django command to recompute metrics and failure labels of a run.
"""
from django.conf import settings

from evaluation.reports import build_report

from ._common import NavigationCommand, add_input_arguments


class Command(NavigationCommand):
    """Summarize a finished run directory."""
    help = 'Recompute metrics and the failure breakdown of a run directory.'

    def add_command_arguments(self, parser):
        parser.add_argument('run_dir')
        add_input_arguments(parser)

    def run(self, **options):
        scenes, episodes = self.load_inputs(options)
        report = build_report(options['run_dir'], scenes, episodes,
                              settings.NAVIGATION['agent_radius'])
        self.stdout.write(
            f"SR={report['sr']:.3f} SPL={report['spl']:.3f} "
            f"NE={report['ne']:.2f} Max-ST={report['max_st']:.3f}"
        )
        for label, count in report['failures'].items():
            self.stdout.write(f'  {label}: {count}')
        self.stdout.write(self.style.SUCCESS(f"Wrote {options['run_dir']}/report.json"))
