"""
Failure attribution for unsuccessful episodes.
"""
from collections import Counter

from core.exceptions import ContractViolation

EXPLORATION_ERROR = 'exploration_error'
REID_FALSE_NEGATIVE = 'reid_false_negative'
REID_FALSE_POSITIVE = 'reid_false_positive'
LOCALIZATION_ERROR = 'localization_error'
LOCAL_NAV_ERROR = 'local_nav_error'

FAILURE_LABELS = (
    REID_FALSE_NEGATIVE,
    REID_FALSE_POSITIVE,
    EXPLORATION_ERROR,
    LOCALIZATION_ERROR,
    LOCAL_NAV_ERROR,
)


def label_failure(outcome, episode, scene, localization_tolerance=1.0):
    """First matching rule of a fixed decision list.

    1. the goal never appeared in an ego frame: exploration
    2. no positive on a frame showing the goal and no goal channel: re-id
       false negative
    3. the goal channel came from a frame without the goal: re-id false
       positive
    4. no channel from a correct detection, or its centroid lies farther than
       `localization_tolerance` from the footprint: localization
    5. anything else: local navigation
    """
    if outcome.success:
        raise ContractViolation(f'{outcome.episode_id} succeeded; nothing to label')
    trajectory = outcome.trajectory
    if not any(r.goal_pixels > 0 for r in trajectory):
        return EXPLORATION_ERROR
    correct = any(r.positive and r.goal_pixels > 0 for r in trajectory)
    if outcome.goal_step is None:
        return LOCALIZATION_ERROR if correct else REID_FALSE_NEGATIVE
    source = next((r for r in trajectory if r.step == outcome.goal_step), None)
    if source is None or source.goal_pixels == 0:
        return REID_FALSE_POSITIVE
    obj = scene.instance(episode.goal_instance_id)
    if obj.distance_to(outcome.goal_centroid) > localization_tolerance:
        return LOCALIZATION_ERROR
    return LOCAL_NAV_ERROR


def failure_distribution(outcomes):
    """(label, count, fraction of failures) for every label, fixed order."""
    counts = Counter(o.failure_label for o in outcomes if not o.success)
    total = sum(counts.values())
    return [
        (label, counts.get(label, 0), counts.get(label, 0) / total if total else 0.0)
        for label in FAILURE_LABELS
    ]
