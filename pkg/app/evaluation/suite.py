"""
Evaluation suites: episode sets run across worker processes, ablation
grids and threshold sweeps.
"""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from core.exceptions import ContractViolation
from evaluation.failures import label_failure
from evaluation.metrics import Metrics, aggregate, score_episodes
from pipeline.config import AgentConfig, RunConfig
from pipeline.runner import run_episode

logger = logging.getLogger(__name__)


@dataclass
class SuiteResult:
    config: AgentConfig
    outcomes: list
    metrics: Metrics
    episode_metrics: list = field(default_factory=list)

    @property
    def label(self):
        return self.config.label


@dataclass(frozen=True)
class SweepPoint:
    tau: float
    result: SuiteResult


def _run_job(job):
    scene, episode, config, seed = job
    outcome = run_episode(scene, episode, config, seed=seed)
    if not outcome.success:
        outcome.failure_label = label_failure(outcome, episode, scene)
    return outcome


def _jobs(scenes, episodes, config, seed):
    jobs = []
    for episode in sorted(episodes, key=lambda e: e.episode_id):
        if episode.scene_id not in scenes:
            raise ContractViolation(
                f'{episode.episode_id} refers to missing scene {episode.scene_id}'
            )
        jobs.append((scenes[episode.scene_id], episode, config, seed))
    return jobs


def run_suite(scenes, episodes, config: AgentConfig, parallelism=1, seed=0) -> SuiteResult:
    """Run every episode with one configuration.

    Episodes run independently, so the outcome list (ordered by episode id)
    and the metrics do not depend on `parallelism`.
    """
    jobs = _jobs(scenes, episodes, config, seed)
    logger.info('running %d episodes with %s on %d workers',
                len(jobs), config.label, parallelism)
    if parallelism > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as executor:
            outcomes = list(executor.map(_run_job, jobs))
    else:
        outcomes = [_run_job(job) for job in jobs]
    rows = score_episodes(outcomes, episodes, scenes, config.agent_radius)
    metrics = aggregate(rows)
    logger.info('%s: SR %.3f SPL %.3f NE %.2f Max-ST %.3f',
                config.label, metrics.sr, metrics.spl, metrics.ne, metrics.max_st)
    return SuiteResult(config=config, outcomes=outcomes, metrics=metrics, episode_metrics=rows)


def run_grid(scenes, episodes, run_config: RunConfig, parallelism=1, seed=0):
    """One suite per ablation row, in file order."""
    return [
        run_suite(scenes, episodes, config, parallelism, seed)
        for config in run_config.grid_configs()
    ]


def sweep_points(report, count=7):
    """`count` candidate thresholds spread around the calibrated one."""
    thresholds = np.asarray(report.thresholds, dtype=np.float64)
    if count < 1:
        raise ValueError('need at least one sweep point')
    center = int(np.argmin(np.abs(thresholds - report.tau_star)))
    step = max(1, len(thresholds) // (2 * count))
    offsets = np.arange(count) - count // 2
    indices = np.clip(center + step * offsets, 0, len(thresholds) - 1)
    return [float(t) for t in thresholds[np.unique(indices)]]


def sweep_tau(scenes, episodes, config: AgentConfig, taus, parallelism=1, seed=0):
    """Suites for each threshold, in increasing threshold order."""
    if not taus:
        raise ValueError('no thresholds to sweep')
    return [
        SweepPoint(tau=float(tau), result=run_suite(
            scenes, episodes, config.with_tau(float(tau)), parallelism, seed,
        ))
        for tau in sorted(set(taus))
    ]


def best_sweep_point(sweep):
    """Highest success rate; ties go to the smallest threshold."""
    return max(sweep, key=lambda p: (p.result.metrics.sr, -p.tau))
