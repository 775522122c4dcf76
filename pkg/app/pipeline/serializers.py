"""
Serializers for run configuration files, trajectories and episode outcomes.
"""
from django.conf import settings
from rest_framework import serializers

from core.serializers import FORMAT_VERSION, FormatVersionField, PoseSerializer
from pipeline.config import LOCALIZATION_METHODS, AgentConfig, RunConfig
from pipeline.runner import EpisodeOutcome, StepRecord
from reid.classifiers import METHODS, ORACLE


class RangeField(serializers.ListField):
    """A [low, high] pair of floats with low < high."""

    def __init__(self, **kwargs):
        super().__init__(
            child=serializers.FloatField(), min_length=2, max_length=2, **kwargs,
        )

    def to_internal_value(self, data):
        low, high = super().to_internal_value(data)
        if not low < high:
            raise serializers.ValidationError('range must be increasing')
        return (low, high)


class ReidKnobsSerializer(serializers.Serializer):
    fast_threshold = serializers.FloatField(min_value=0.0, required=False)
    fast_arc = serializers.IntegerField(min_value=1, max_value=16, required=False)
    max_keypoints = serializers.IntegerField(min_value=1, required=False)
    smoothing_sigma = serializers.FloatField(min_value=0.0, required=False)
    ratio = serializers.FloatField(min_value=0.0, max_value=1.0, required=False)
    embed_size = serializers.IntegerField(min_value=1, required=False)


class MappingKnobsSerializer(serializers.Serializer):
    floor_height = serializers.FloatField(min_value=0.0, required=False)
    min_frontier_size = serializers.IntegerField(min_value=1, required=False)
    initial_size = serializers.IntegerField(min_value=8, required=False)


class PlannerKnobsSerializer(serializers.Serializer):
    lookahead = serializers.FloatField(min_value=0.0, required=False)
    deadband = serializers.FloatField(min_value=0.0, required=False)
    explore_stop_radius = serializers.FloatField(min_value=0.0, required=False)
    goal_stop_radius = serializers.FloatField(min_value=0.0, required=False)


class LocalizeKnobsSerializer(serializers.Serializer):
    crop_x = RangeField(required=False)
    crop_y = RangeField(required=False)
    min_points_per_cell = serializers.IntegerField(min_value=1, required=False)


class AgentConfigSerializer(serializers.Serializer):
    """Serializer for run configuration files."""
    reid_method = serializers.ChoiceField(choices=METHODS, required=False)
    localization_method = serializers.ChoiceField(
        choices=LOCALIZATION_METHODS, required=False,
    )
    tau = serializers.FloatField(required=False, allow_null=True)
    budget = serializers.IntegerField(min_value=1, required=False)
    replan_every = serializers.IntegerField(min_value=1, required=False)
    preset = serializers.ChoiceField(
        choices=sorted(settings.NAVIGATION['presets']), required=False,
    )
    thresholds = serializers.DictField(child=serializers.FloatField(), required=False)
    ablation_grid = serializers.ListField(
        child=serializers.ListField(
            child=serializers.CharField(), min_length=2, max_length=2,
        ),
        required=False,
    )
    taus = serializers.ListField(child=serializers.FloatField(), required=False)
    reid = ReidKnobsSerializer(required=False)
    mapping = MappingKnobsSerializer(required=False)
    planner = PlannerKnobsSerializer(required=False)
    localize = LocalizeKnobsSerializer(required=False)

    def validate_thresholds(self, value):
        unknown = set(value) - set(METHODS)
        if unknown:
            raise serializers.ValidationError(f'unknown re-id methods {sorted(unknown)}')
        return value

    def validate_ablation_grid(self, value):
        for reid_method, localization_method in value:
            if reid_method not in METHODS:
                raise serializers.ValidationError(f'unknown re-id method {reid_method!r}')
            if localization_method not in LOCALIZATION_METHODS:
                raise serializers.ValidationError(
                    f'unknown localization method {localization_method!r}'
                )
        return [tuple(row) for row in value]

    def validate(self, attrs):
        thresholds = attrs.get('thresholds', {})
        reid_method = attrs.get('reid_method', settings.NAVIGATION['agent']['reid_method'])
        if not attrs.get('ablation_grid') and reid_method != ORACLE:
            if attrs.get('tau') is None and reid_method not in thresholds:
                raise serializers.ValidationError(
                    {'tau': f'{reid_method} needs tau or a calibrated threshold'}
                )
        for row_method, _ in attrs.get('ablation_grid', []):
            if row_method == ORACLE or row_method in thresholds:
                continue
            if row_method == reid_method and attrs.get('tau') is not None:
                continue
            raise serializers.ValidationError(
                {'ablation_grid': f'{row_method} needs a calibrated threshold'}
            )
        return attrs

    def create(self, validated_data):
        data = dict(validated_data)
        thresholds = dict(data.pop('thresholds', {}))
        grid = tuple(data.pop('ablation_grid', ()))
        taus = tuple(data.pop('taus', ()))
        knobs = {k: dict(data.pop(k)) for k in ('reid', 'mapping', 'planner', 'localize')
                 if k in data}
        agent = AgentConfig.from_settings(**knobs, **data)
        if agent.tau is None and agent.reid_method in thresholds:
            agent = agent.with_tau(thresholds[agent.reid_method])
        return RunConfig(agent=agent, ablation_grid=grid, taus=taus, thresholds=thresholds)


class StepRecordSerializer(serializers.Serializer):
    """Serializer for one trajectory line."""
    step = serializers.IntegerField(min_value=0)
    pose = PoseSerializer()
    action = serializers.CharField()
    mode = serializers.CharField()
    score = serializers.FloatField()
    positive = serializers.BooleanField()
    goal_pixels = serializers.IntegerField(min_value=0)
    events = serializers.ListField(child=serializers.CharField())
    goal_centroid = serializers.ListField(
        child=serializers.FloatField(), min_length=2, max_length=2, allow_null=True,
    )

    def to_representation(self, record):
        return {
            'step': record.step,
            'pose': PoseSerializer(record.pose).data,
            'action': record.action,
            'mode': record.mode,
            'score': round(float(record.score), 9),
            'positive': record.positive,
            'goal_pixels': record.goal_pixels,
            'events': list(record.events),
            'goal_centroid': _point(record.goal_centroid),
        }

    def create(self, validated_data):
        data = dict(validated_data)
        data['pose'] = PoseSerializer().create(dict(data['pose']))
        data['events'] = tuple(data['events'])
        if data['goal_centroid'] is not None:
            data['goal_centroid'] = tuple(data['goal_centroid'])
        return StepRecord(**data)


def _point(xy):
    return None if xy is None else [float(xy[0]), float(xy[1])]


class EpisodeOutcomeSerializer(serializers.Serializer):
    """Serializer for one per-episode results line."""
    format_version = FormatVersionField()
    episode_id = serializers.CharField()
    scene_id = serializers.CharField()
    method = serializers.CharField()
    success = serializers.BooleanField()
    stopped = serializers.BooleanField()
    steps_taken = serializers.IntegerField(min_value=0)
    budget = serializers.IntegerField(min_value=1)
    stop_pose = PoseSerializer()
    path_length = serializers.FloatField(min_value=0.0)
    stop_distance = serializers.FloatField(min_value=0.0)
    goal_step = serializers.IntegerField(allow_null=True)
    goal_centroid = serializers.ListField(
        child=serializers.FloatField(), min_length=2, max_length=2, allow_null=True,
    )
    collisions = serializers.IntegerField(min_value=0)
    failure_label = serializers.CharField(allow_null=True)
    trajectory = StepRecordSerializer(many=True, required=False)

    def validate(self, attrs):
        if attrs['steps_taken'] > attrs['budget']:
            raise serializers.ValidationError('steps_taken exceeds the budget')
        if attrs['success'] and not attrs['stopped']:
            raise serializers.ValidationError('a success must end with STOP')
        return attrs

    def to_representation(self, outcome):
        record = {
            'format_version': FORMAT_VERSION,
            'episode_id': outcome.episode_id,
            'scene_id': outcome.scene_id,
            'method': outcome.method,
            'success': outcome.success,
            'stopped': outcome.stopped,
            'steps_taken': outcome.steps_taken,
            'budget': outcome.budget,
            'stop_pose': PoseSerializer(outcome.stop_pose).data,
            'path_length': round(float(outcome.path_length), 9),
            'stop_distance': round(float(outcome.stop_distance), 9),
            'goal_step': outcome.goal_step,
            'goal_centroid': _point(outcome.goal_centroid),
            'collisions': outcome.collisions,
            'failure_label': outcome.failure_label,
        }
        if self.context.get('with_trajectory'):
            record['trajectory'] = StepRecordSerializer(outcome.trajectory, many=True).data
        return record

    def create(self, validated_data):
        data = dict(validated_data)
        data.pop('format_version')
        data['stop_pose'] = PoseSerializer().create(dict(data['stop_pose']))
        steps = data.pop('trajectory', [])
        data['trajectory'] = [StepRecordSerializer().create(dict(s)) for s in steps]
        if data['goal_centroid'] is not None:
            data['goal_centroid'] = tuple(data['goal_centroid'])
        return EpisodeOutcome(**data)
