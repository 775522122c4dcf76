"""
Run directories: metric tables, outcome lines, trajectories and failure
breakdowns.
"""
import logging
import os

from core.csvio import write_csv
from core.jsonio import read_jsonl, write_json, write_jsonl
from core.serializers import load
from evaluation.failures import failure_distribution, label_failure
from evaluation.metrics import aggregate, score_episodes
from evaluation.plots import sweep_chart, write_svg
from evaluation.suite import best_sweep_point
from pipeline.serializers import EpisodeOutcomeSerializer, StepRecordSerializer

logger = logging.getLogger(__name__)

METRIC_HEADER = ['method', 'episodes', 'sr', 'spl', 'ne', 'max_st']


def _metric_row(label, metrics):
    return [label] + metrics.as_row()


def write_outcomes(outcomes, directory):
    """`outcomes.jsonl` plus `trajectories/<episode_id>.jsonl`."""
    path = os.path.join(directory, 'outcomes.jsonl')
    write_jsonl(path, [EpisodeOutcomeSerializer(o).data for o in outcomes])
    for outcome in outcomes:
        write_jsonl(
            os.path.join(directory, 'trajectories', f'{outcome.episode_id}.jsonl'),
            StepRecordSerializer(outcome.trajectory, many=True).data,
        )
    return path


def load_outcomes(directory, with_trajectories=True):
    outcomes = []
    for record in read_jsonl(os.path.join(directory, 'outcomes.jsonl')):
        if with_trajectories:
            path = os.path.join(directory, 'trajectories', f"{record['episode_id']}.jsonl")
            record = dict(record, trajectory=read_jsonl(path))
        outcomes.append(load(EpisodeOutcomeSerializer, record))
    return sorted(outcomes, key=lambda o: o.episode_id)


def write_suite(result, directory):
    """Everything one suite produced, under `directory`."""
    write_outcomes(result.outcomes, directory)
    write_csv(os.path.join(directory, 'metrics.csv'), METRIC_HEADER,
              [_metric_row(result.label, result.metrics)])
    labels = {o.episode_id: o.failure_label or '' for o in result.outcomes}
    write_csv(
        os.path.join(directory, 'episodes.csv'),
        ['episode_id', 'success', 'spl', 'ne', 'max_st', 'failure_label'],
        [(r.episode_id, int(r.success), r.spl, r.ne, int(r.max_st), labels[r.episode_id])
         for r in result.episode_metrics],
    )
    write_csv(os.path.join(directory, 'failures.csv'), ['label', 'count', 'fraction'],
              failure_distribution(result.outcomes))
    write_json(os.path.join(directory, 'run.json'), {
        'method': result.label,
        'reid_method': result.config.reid_method,
        'localization_method': result.config.localization_method,
        'tau': result.config.tau,
        'budget': result.config.budget,
        'preset': result.config.preset,
    })
    logger.info('wrote %s results to %s', result.label, directory)
    return directory


def grid_dir_name(config):
    return config.label.replace('+', '__')


def write_grid(results, directory):
    """One subdirectory per configuration plus a combined `grid.csv`."""
    for result in results:
        write_suite(result, os.path.join(directory, grid_dir_name(result.config)))
    return write_csv(os.path.join(directory, 'grid.csv'), METRIC_HEADER,
                     [_metric_row(r.label, r.metrics) for r in results])


def write_sweep(sweep, directory, calibrated_tau=None):
    """`sr_vs_tau.csv`, the matching SVG chart and a summary JSON."""
    rows = [
        (p.tau, p.result.metrics.sr, p.result.metrics.spl, p.result.metrics.ne)
        for p in sweep
    ]
    write_csv(os.path.join(directory, 'sr_vs_tau.csv'), ['tau', 'sr', 'spl', 'ne'], rows)
    write_svg(os.path.join(directory, 'sr_vs_tau.svg'), sweep_chart(sweep, calibrated_tau))
    best = best_sweep_point(sweep)
    summary = {'best_tau': best.tau, 'best_sr': best.result.metrics.sr,
               'calibrated_tau': calibrated_tau}
    if calibrated_tau is not None:
        closest = min(sweep, key=lambda p: abs(p.tau - calibrated_tau))
        summary['calibrated_sr'] = closest.result.metrics.sr
        summary['sr_gap'] = best.result.metrics.sr - closest.result.metrics.sr
    write_json(os.path.join(directory, 'sweep.json'), summary)
    return summary


def build_report(directory, scenes, episodes, agent_radius=0.17):
    """Recompute metrics and failure labels of a finished run directory.

    Writes `report.json` and returns its content.
    """
    outcomes = load_outcomes(directory)
    by_id = {e.episode_id: e for e in episodes}
    for outcome in outcomes:
        if not outcome.success:
            episode = by_id[outcome.episode_id]
            outcome.failure_label = label_failure(outcome, episode, scenes[episode.scene_id])
    metrics = aggregate(score_episodes(outcomes, episodes, scenes, agent_radius))
    methods = sorted({o.method for o in outcomes})
    report = {
        'methods': methods,
        'episodes': metrics.episodes,
        'sr': metrics.sr,
        'spl': metrics.spl,
        'ne': metrics.ne,
        'max_st': metrics.max_st,
        'failures': {label: count for label, count, _ in failure_distribution(outcomes)},
    }
    write_json(os.path.join(directory, 'report.json'), report)
    return report
