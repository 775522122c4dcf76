"""
Django command to calibrate re-identification thresholds.
"""
import os

from core.jsonio import write_json
from evaluation.plots import f_chart, pr_chart, write_svg
from reid.calibration import calibrate_threshold, compare_methods, image_features, score_pairs
from reid.classifiers import KEYPOINT_METHODS, SCORED_METHODS
from reid.features import FeatureParams
from reid.storage import load_dataset, save_report, write_curves, write_ranking, write_scores

from ._common import NavigationCommand


class Command(NavigationCommand):
    """Score the pair dataset with each method and pick tau by max F."""
    help = 'Calibrate re-id thresholds on an image-pair dataset.'
    default_out = 'calibration'

    def add_command_arguments(self, parser):
        parser.add_argument('--pairs', required=True, help='pair manifest')
        parser.add_argument(
            '--methods', nargs='+', choices=SCORED_METHODS, default=list(SCORED_METHODS),
        )

    def run(self, **options):
        out = self.out_path(options)
        dataset = load_dataset(options['pairs'])
        params = FeatureParams.from_settings()
        features = None
        if any(m in KEYPOINT_METHODS for m in options['methods']):
            features = image_features(dataset, params, options['parallelism'])
        reports = []
        for method in options['methods']:
            scores = score_pairs(dataset, method, params, features=features)
            report = calibrate_threshold(dataset.labels, scores, method)
            save_report(report, os.path.join(out, f'{method}.json'))
            write_curves(report, os.path.join(out, f'{method}_curves.csv'))
            write_scores(dataset, scores, os.path.join(out, f'{method}_scores.csv'))
            write_svg(os.path.join(out, f'{method}_f.svg'), f_chart(report))
            self.stdout.write(
                f'{method}: tau*={report.tau_star:.4f} F={report.max_f:.3f} '
                f'AP={report.pr_auc:.3f}'
            )
            reports.append(report)
        write_svg(os.path.join(out, 'pr.svg'), pr_chart(reports))
        write_ranking(compare_methods(reports), os.path.join(out, 'ranking.csv'))
        write_json(os.path.join(out, 'thresholds.json'),
                   {r.method: r.tau_star for r in reports})
        self.stdout.write(self.style.SUCCESS(f'Wrote calibration to {out}'))
