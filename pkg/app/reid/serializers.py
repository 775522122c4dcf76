"""
Serializers for pair manifests and threshold reports.
"""
import numpy as np
from rest_framework import serializers

from core.serializers import FORMAT_VERSION, FormatVersionField
from reid.calibration import PairRecord, SceneSplit, ThresholdReport
from reid.classifiers import SCORED_METHODS


class PairSerializer(serializers.Serializer):
    """Serializer for one manifest line."""
    format_version = FormatVersionField()
    pair_id = serializers.IntegerField(min_value=0)
    image_a = serializers.CharField()
    image_b = serializers.CharField()
    instance_a = serializers.CharField()
    instance_b = serializers.CharField()
    same_instance = serializers.BooleanField()

    def validate(self, attrs):
        if attrs['image_a'] == attrs['image_b']:
            raise serializers.ValidationError('an image cannot be paired with itself')
        if attrs['same_instance'] != (attrs['instance_a'] == attrs['instance_b']):
            raise serializers.ValidationError('label disagrees with the instances')
        return attrs

    def to_representation(self, pair):
        return {
            'format_version': FORMAT_VERSION,
            'pair_id': pair.pair_id,
            'image_a': pair.image_a,
            'image_b': pair.image_b,
            'instance_a': pair.instance_a,
            'instance_b': pair.instance_b,
            'same_instance': pair.same_instance,
        }

    def create(self, validated_data):
        validated_data.pop('format_version')
        validated_data.pop('same_instance')
        return PairRecord(**validated_data)


class ThresholdReportSerializer(serializers.Serializer):
    """Serializer for a calibrated threshold and its curves."""
    format_version = FormatVersionField()
    method = serializers.ChoiceField(choices=SCORED_METHODS)
    tau_star = serializers.FloatField()
    max_f = serializers.FloatField(min_value=0.0, max_value=1.0)
    pr_auc = serializers.FloatField(min_value=0.0, max_value=1.0)
    thresholds = serializers.ListField(child=serializers.FloatField())
    precision = serializers.ListField(child=serializers.FloatField(min_value=0.0, max_value=1.0))
    recall = serializers.ListField(child=serializers.FloatField(min_value=0.0, max_value=1.0))
    f_measure = serializers.ListField(child=serializers.FloatField(min_value=0.0, max_value=1.0))

    def validate(self, attrs):
        lengths = {len(attrs[k]) for k in ('thresholds', 'precision', 'recall', 'f_measure')}
        if len(lengths) != 1:
            raise serializers.ValidationError('curves differ in length')
        return attrs

    def to_representation(self, report):
        return {
            'format_version': FORMAT_VERSION,
            'method': report.method,
            'tau_star': float(report.tau_star),
            'max_f': float(report.max_f),
            'pr_auc': float(report.pr_auc),
            'thresholds': report.thresholds.tolist(),
            'precision': report.precision.tolist(),
            'recall': report.recall.tolist(),
            'f_measure': report.f_measure.tolist(),
        }

    def create(self, validated_data):
        validated_data.pop('format_version')
        for key in ('thresholds', 'precision', 'recall', 'f_measure'):
            validated_data[key] = np.asarray(validated_data[key], dtype=np.float64)
        return ThresholdReport(**validated_data)


class SceneSplitSerializer(serializers.Serializer):
    """Serializer for the calibration/evaluation scene partition."""
    format_version = FormatVersionField()
    seed = serializers.IntegerField()
    train = serializers.ListField(child=serializers.CharField(), min_length=1)
    eval = serializers.ListField(child=serializers.CharField(), min_length=1)

    def validate(self, attrs):
        if set(attrs['train']) & set(attrs['eval']):
            raise serializers.ValidationError('training and evaluation scenes overlap')
        return attrs

    def to_representation(self, split):
        return {
            'format_version': FORMAT_VERSION,
            'seed': split.seed,
            'train': list(split.train),
            'eval': list(split.eval),
        }

    def create(self, validated_data):
        validated_data.pop('format_version')
        return SceneSplit(
            train=tuple(validated_data['train']),
            eval=tuple(validated_data['eval']),
            seed=validated_data['seed'],
        )
