"""
Serializers shared across apps: poses, cameras and the agent run config.
"""
import math

from rest_framework import serializers

from core.geometry import CameraModel, Pose

FORMAT_VERSION = 1


class FormatVersionField(serializers.IntegerField):
    """Rejects records written by a different format version."""

    def to_internal_value(self, data):
        value = super().to_internal_value(data)
        if value != FORMAT_VERSION:
            raise serializers.ValidationError(
                f'unsupported format_version {value}, expected {FORMAT_VERSION}'
            )
        return value


class PoseSerializer(serializers.Serializer):
    """Serializer for planar poses."""
    x = serializers.FloatField()
    y = serializers.FloatField()
    theta = serializers.FloatField()

    def create(self, validated_data):
        return Pose(**validated_data)


class CameraSerializer(serializers.Serializer):
    """Serializer for pinhole cameras."""
    width = serializers.IntegerField(min_value=1)
    height = serializers.IntegerField(min_value=1)
    hfov = serializers.FloatField(min_value=0.0, max_value=math.pi)
    mount_height = serializers.FloatField()
    pitch = serializers.FloatField()

    def validate_hfov(self, value):
        if not 0.0 < value < math.pi:
            raise serializers.ValidationError('hfov must lie in (0, pi)')
        return value

    def create(self, validated_data):
        return CameraModel(**validated_data)


def load(serializer_class, data, **context):
    """Validate one record and return the domain object it describes."""
    serializer = serializer_class(data=data, context=context)
    serializer.is_valid(raise_exception=True)
    return serializer.save()
