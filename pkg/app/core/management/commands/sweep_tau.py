"""
Django command to sweep the re-identification threshold.
"""
from django.conf import settings
from django.core.management.base import CommandError

from evaluation.reports import write_sweep
from evaluation.suite import sweep_points, sweep_tau
from reid.storage import load_report

from ._common import NavigationCommand, add_input_arguments, add_threshold_argument


class Command(NavigationCommand):
    """Success rate against tau around the calibrated threshold."""
    help = 'Run the agent at several re-id thresholds.'
    default_out = 'sweep'

    def add_command_arguments(self, parser):
        add_input_arguments(parser)
        add_threshold_argument(parser)
        parser.add_argument('--report', default=None, help='threshold report JSON')
        parser.add_argument('--taus', nargs='+', type=float, default=None)
        parser.add_argument(
            '--points', type=int, default=settings.NAVIGATION['evaluation']['sweep_points'],
        )

    def run(self, **options):
        report = load_report(options['report']) if options['report'] else None
        overrides = {}
        if report is not None:
            overrides = {'reid_method': report.method, 'tau': report.tau_star}
        run_config = self.run_config(options, **overrides)
        taus = options['taus'] or list(run_config.taus)
        if not taus:
            if report is None:
                raise CommandError('give --taus, a taus list in --config, or --report')
            taus = sweep_points(report, options['points'])
        agent = run_config.agent
        scenes, episodes = self.load_inputs(options)
        sweep = sweep_tau(scenes, episodes, agent, taus,
                          options['parallelism'], options['seed'])
        summary = write_sweep(sweep, self.out_path(options), agent.tau)
        for point in sweep:
            self.stdout.write(f'tau={point.tau:.4f}: SR={point.result.metrics.sr:.3f}')
        self.stdout.write(self.style.SUCCESS(
            f"Best tau {summary['best_tau']:.4f} (SR {summary['best_sr']:.3f})"
        ))
