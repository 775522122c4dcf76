"""
Binary goal re-identification: score a goal/ego image pair and threshold it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from reid.features import (
    FeatureParams,
    Keypoints,
    MatchSet,
    cosine_similarity,
    detect_and_describe,
    embed,
    match_features,
)

CONF_SUM = 'conf-sum'
MATCH_COUNT = 'match-count'
GLOBAL_EMBED = 'global-embed'
ORACLE = 'oracle'

SCORED_METHODS = (CONF_SUM, MATCH_COUNT, GLOBAL_EMBED)
METHODS = SCORED_METHODS + (ORACLE,)
KEYPOINT_METHODS = (CONF_SUM, MATCH_COUNT)


@dataclass(frozen=True)
class ReidDecision:
    positive: bool
    score: float
    method: str


def score_matches(matches: MatchSet, method):
    if method == CONF_SUM:
        return matches.confidence_sum
    if method == MATCH_COUNT:
        return float(len(matches))
    raise ValueError(f'{method!r} is not a keypoint method')


def reid_score(goal, ego, method, params: FeatureParams = None,
               goal_features: Keypoints = None):
    """Similarity of a goal and an ego image; returns (score, matches).

    Keypoint methods also return the MatchSet so localization can reuse it;
    global-embed returns None in its place.
    """
    params = params or FeatureParams.from_settings()
    if method == GLOBAL_EMBED:
        score = cosine_similarity(
            embed(goal, params.embed_size), embed(ego, params.embed_size)
        )
        return score, None
    if method not in KEYPOINT_METHODS:
        raise ValueError(f'unknown re-id method {method!r}')
    if goal_features is None:
        goal_features = detect_and_describe(goal, params)
    matches = match_features(
        goal_features, detect_and_describe(ego, params),
        params.ratio, params.descriptor_bits,
    )
    return score_matches(matches, method), matches


def reid_oracle(ego_instance_ids, goal_instance_id) -> ReidDecision:
    """Positive iff any ego pixel belongs to the goal instance."""
    count = int(np.count_nonzero(np.asarray(ego_instance_ids) == goal_instance_id))
    return ReidDecision(positive=count > 0, score=float(count), method=ORACLE)


class ReidClassifier:
    """Thresholded re-identification against one goal image.

    Goal-side keypoints are computed once and reused for every ego frame.
    """

    def __init__(self, method, tau=None, params: FeatureParams = None):
        if method not in METHODS:
            raise ValueError(f'unknown re-id method {method!r}')
        if method != ORACLE and tau is None:
            raise ValueError(f'{method} needs a threshold')
        self.method = method
        self.tau = tau
        self.params = params or FeatureParams.from_settings()
        self._goal = None
        self._goal_features = None
        self._goal_embedding = None

    def set_goal(self, goal_rgb):
        self._goal = goal_rgb
        self._goal_features = None
        self._goal_embedding = None
        if self.method in KEYPOINT_METHODS:
            self._goal_features = detect_and_describe(goal_rgb, self.params)
        elif self.method == GLOBAL_EMBED:
            self._goal_embedding = embed(goal_rgb, self.params.embed_size)

    def decide(self, ego_rgb, ego_instance_ids=None, goal_instance_id=None):
        """Returns (ReidDecision, MatchSet or None)."""
        if self.method == ORACLE:
            return reid_oracle(ego_instance_ids, goal_instance_id), None
        if self._goal is None:
            raise ValueError('set_goal() must be called before decide()')
        if self.method == GLOBAL_EMBED:
            score = cosine_similarity(
                self._goal_embedding, embed(ego_rgb, self.params.embed_size)
            )
            matches = None
        else:
            score, matches = reid_score(
                self._goal, ego_rgb, self.method, self.params, self._goal_features,
            )
        decision = ReidDecision(positive=score >= self.tau, score=score, method=self.method)
        return decision, matches

    def matches_for(self, ego_rgb) -> MatchSet:
        """Keypoint matches against the goal, whatever the scoring method."""
        if self._goal_features is None:
            self._goal_features = detect_and_describe(self._goal, self.params)
        return match_features(
            self._goal_features, detect_and_describe(ego_rgb, self.params),
            self.params.ratio, self.params.descriptor_bits,
        )
