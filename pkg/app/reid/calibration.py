"""
Pair datasets of goal images and maximal F-measure threshold selection.
"""
from __future__ import annotations

import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from core.exceptions import (
    CalibrationError,
    ContractViolation,
    InsufficientInstances,
    SamplingFailure,
)
from reid.classifiers import GLOBAL_EMBED, KEYPOINT_METHODS, score_matches
from reid.features import (
    FeatureParams,
    cosine_similarity,
    detect_and_describe,
    embed,
    match_features,
)
from simworld.goals import GoalImageParams, sample_goal_image
from simworld.render import RenderParams

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PairRecord:
    pair_id: int
    image_a: str
    image_b: str
    instance_a: str
    instance_b: str

    @property
    def same_instance(self):
        return self.instance_a == self.instance_b


@dataclass
class CalibrationDataset:
    """Labelled image pairs plus the images they reference."""
    pairs: list = field(default_factory=list)
    images: dict = field(default_factory=dict)

    @property
    def labels(self):
        return np.array([p.same_instance for p in self.pairs], dtype=bool)


@dataclass
class ThresholdReport:
    method: str
    thresholds: np.ndarray
    precision: np.ndarray
    recall: np.ndarray
    f_measure: np.ndarray
    tau_star: float
    max_f: float
    pr_auc: float

    @property
    def pr_points(self):
        return list(zip(self.precision.tolist(), self.recall.tolist()))

    @property
    def f_curve(self):
        return list(zip(self.thresholds.tolist(), self.f_measure.tolist()))


def instance_key(scene_id, instance_id):
    return f'{scene_id}:{instance_id}'


@dataclass(frozen=True)
class SceneSplit:
    """Scenes that feed threshold calibration and scenes kept for evaluation."""
    train: tuple
    eval: tuple
    seed: int = 0


def split_scenes(scene_ids, train_fraction=0.5, seed=0, train=None) -> SceneSplit:
    """Seeded partition of scene ids; an explicit `train` list wins.

    Both sides keep at least one scene.
    """
    ids = sorted(set(scene_ids))
    if len(ids) < 2:
        raise ContractViolation(f'need at least 2 scenes to split, have {len(ids)}')
    if train is not None:
        unknown = sorted(set(train) - set(ids))
        if unknown:
            raise ContractViolation(f'unknown training scenes: {", ".join(unknown)}')
        chosen = set(train)
    else:
        if not 0.0 < train_fraction < 1.0:
            raise ContractViolation(f'train fraction {train_fraction} not in (0, 1)')
        count = min(len(ids) - 1, max(1, int(round(train_fraction * len(ids)))))
        rng = np.random.default_rng(seed)
        chosen = {ids[k] for k in rng.choice(len(ids), size=count, replace=False)}
    split = SceneSplit(
        train=tuple(s for s in ids if s in chosen),
        eval=tuple(s for s in ids if s not in chosen),
        seed=seed,
    )
    if not split.train or not split.eval:
        raise ContractViolation('a split needs training and evaluation scenes')
    return split


def check_disjoint(train_scene_ids, episodes):
    """Refuse calibration scenes that also host evaluation episodes."""
    overlap = sorted(set(train_scene_ids) & {e.scene_id for e in episodes})
    if overlap:
        raise ContractViolation(
            f'calibration scenes also host evaluation episodes: {", ".join(overlap)}'
        )


def build_pair_dataset(scenes, fraction=0.5, images_per_instance=4, seed=0,
                       goal_params: GoalImageParams = None,
                       render_params: RenderParams = None) -> CalibrationDataset:
    """Sample goal views of a fraction of the instances and pair them up.

    Every same-instance pair is a positive; negatives (different instances)
    are downsampled to the number of positives.
    """
    goal_params = goal_params or GoalImageParams.from_settings()
    rng = np.random.default_rng(seed)
    instances = sorted(
        (scene.scene_id, obj.id) for scene in scenes for obj in scene.objects
    )
    if len(instances) < 2:
        raise InsufficientInstances(f'need at least 2 instances, have {len(instances)}')
    by_id = {scene.scene_id: scene for scene in scenes}
    count = min(len(instances), max(2, int(round(fraction * len(instances)))))
    chosen = sorted(
        instances[k] for k in rng.choice(len(instances), size=count, replace=False)
    )
    images, views = {}, {}
    for scene_id, instance_id in chosen:
        key = instance_key(scene_id, instance_id)
        for k in range(images_per_instance):
            try:
                view = sample_goal_image(
                    by_id[scene_id], instance_id, int(rng.integers(2 ** 31)),
                    goal_params, render_params,
                )
            except SamplingFailure as exc:
                logger.warning('%s', exc)
                continue
            ref = f'{scene_id}-{instance_id}-{k}'
            images[ref] = view.render.rgb
            views.setdefault(key, []).append(ref)
    if len(views) < 2:
        raise InsufficientInstances('fewer than 2 instances have goal views')
    owner = {ref: key for key, refs in views.items() for ref in refs}
    refs = sorted(images)
    positives, negatives = [], []
    for a, b in itertools.combinations(refs, 2):
        (positives if owner[a] == owner[b] else negatives).append((a, b))
    if not positives:
        raise InsufficientInstances('no instance has two goal views')
    if len(negatives) > len(positives):
        keep = np.sort(rng.choice(len(negatives), size=len(positives), replace=False))
        negatives = [negatives[k] for k in keep]
    pairs = [
        PairRecord(pair_id, a, b, owner[a], owner[b])
        for pair_id, (a, b) in enumerate(sorted(positives + negatives))
    ]
    logger.info(
        'pair dataset: %d instances, %d images, %d positive / %d negative pairs',
        len(views), len(images), len(positives), len(negatives),
    )
    return CalibrationDataset(pairs=pairs, images=images)


def _describe(args):
    image, params = args
    return detect_and_describe(image, params)


def image_features(dataset: CalibrationDataset, params: FeatureParams, parallelism=1):
    """Keypoints for every image, keyed by reference."""
    refs = sorted(dataset.images)
    jobs = [(dataset.images[ref], params) for ref in refs]
    if parallelism > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as executor:
            results = list(executor.map(_describe, jobs))
    else:
        results = [_describe(job) for job in jobs]
    return dict(zip(refs, results))


def score_pairs(dataset: CalibrationDataset, method, params: FeatureParams = None,
                parallelism=1, features=None):
    """Score every pair in pair-id order."""
    params = params or FeatureParams.from_settings()
    pairs = sorted(dataset.pairs, key=lambda p: p.pair_id)
    if method == GLOBAL_EMBED:
        vectors = {ref: embed(img, params.embed_size) for ref, img in dataset.images.items()}
        return np.array([
            cosine_similarity(vectors[p.image_a], vectors[p.image_b]) for p in pairs
        ])
    if method not in KEYPOINT_METHODS:
        raise ValueError(f'cannot score pairs with {method!r}')
    features = features or image_features(dataset, params, parallelism)
    scores = []
    for pair in pairs:
        matches = match_features(
            features[pair.image_a], features[pair.image_b],
            params.ratio, params.descriptor_bits,
        )
        scores.append(score_matches(matches, method))
    return np.array(scores, dtype=np.float64)


def candidate_thresholds(scores):
    """Midpoints between distinct sorted scores, plus both extremes."""
    distinct = np.unique(np.asarray(scores, dtype=np.float64))
    midpoints = (distinct[:-1] + distinct[1:]) / 2.0
    return np.concatenate([[distinct[0]], midpoints, [distinct[-1] + 1.0]])


def precision_recall_f(labels, scores, tau):
    predicted = scores >= tau
    tp = int(np.count_nonzero(predicted & labels))
    fp = int(np.count_nonzero(predicted & ~labels))
    fn = int(np.count_nonzero(~predicted & labels))
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    # integer form: equal F values compare equal, so argmax keeps the smallest tau
    f = 2 * tp / (2 * tp + fp + fn) if tp else 0.0
    return precision, recall, f


def average_precision(precision, recall):
    """Sum of precision times recall gain, walking thresholds downwards.

    Inputs are ordered by ascending threshold.
    """
    precision = np.asarray(precision)[::-1]
    recall = np.asarray(recall)[::-1]
    steps = np.diff(np.concatenate([[0.0], recall]))
    return float(np.sum(steps * precision))


def calibrate_threshold(labels, scores, method='') -> ThresholdReport:
    """Threshold with the maximal F-measure; ties go to the smallest."""
    labels = np.asarray(labels, dtype=bool)
    scores = np.asarray(scores, dtype=np.float64)
    if labels.shape != scores.shape:
        raise ValueError('labels and scores differ in length')
    if labels.all() or not labels.any():
        raise CalibrationError('calibration needs positive and negative pairs')
    thresholds = candidate_thresholds(scores)
    curves = np.array([precision_recall_f(labels, scores, t) for t in thresholds])
    precision, recall, f_measure = curves[:, 0], curves[:, 1], curves[:, 2]
    best = int(np.argmax(f_measure))
    return ThresholdReport(
        method=method,
        thresholds=thresholds,
        precision=precision,
        recall=recall,
        f_measure=f_measure,
        tau_star=float(thresholds[best]),
        max_f=float(f_measure[best]),
        pr_auc=average_precision(precision, recall),
    )


def compare_methods(reports):
    """Rank rows (rank, method, max_f, tau_star, pr_auc) by maximal F."""
    ordered = sorted(reports, key=lambda r: (-r.max_f, r.method))
    return [
        (rank, r.method, r.max_f, r.tau_star, r.pr_auc)
        for rank, r in enumerate(ordered, start=1)
    ]
