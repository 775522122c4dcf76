"""
Django command to run the navigation agent over an episode set.
"""
from evaluation.reports import write_grid, write_suite
from evaluation.suite import run_grid, run_suite

from ._common import NavigationCommand, add_input_arguments, add_threshold_argument


class Command(NavigationCommand):
    """Run one configuration, or every row of an ablation grid."""
    help = 'Run episodes and write metrics, outcomes and trajectories.'
    default_out = 'run'

    def add_command_arguments(self, parser):
        add_input_arguments(parser)
        add_threshold_argument(parser)
        parser.add_argument('--budget', type=int, default=None)

    def run(self, **options):
        run_config = self.run_config(options, budget=options['budget'])
        scenes, episodes = self.load_inputs(options)
        out = self.out_path(options)
        if run_config.ablation_grid:
            results = run_grid(scenes, episodes, run_config,
                               options['parallelism'], options['seed'])
            write_grid(results, out)
        else:
            results = [run_suite(scenes, episodes, run_config.agent,
                                 options['parallelism'], options['seed'])]
            write_suite(results[0], out)
        for result in results:
            m = result.metrics
            self.stdout.write(
                f'{result.label}: SR={m.sr:.3f} SPL={m.spl:.3f} '
                f'NE={m.ne:.2f} Max-ST={m.max_st:.3f}'
            )
        self.stdout.write(self.style.SUCCESS(f'Wrote results to {out}'))
