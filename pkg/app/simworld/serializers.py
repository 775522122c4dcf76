"""
Serializers for scene and episode records.
"""
import os

import numpy as np
from rest_framework import serializers

from core.imageio import read_image
from core.serializers import (
    FORMAT_VERSION,
    CameraSerializer,
    FormatVersionField,
    PoseSerializer,
)
from simworld.episodes import Episode
from simworld.goals import GoalView
from simworld.render import RenderOutput
from simworld.scene import CATEGORIES, ObjectInstance, Scene


def encode_rows(grid):
    """Run lengths of each boolean row, starting with a run of False."""
    rows = []
    for row in np.asarray(grid, dtype=bool):
        edges = np.flatnonzero(np.diff(row.astype(np.int8))) + 1
        bounds = np.concatenate([[0], edges, [len(row)]])
        runs = np.diff(bounds).tolist()
        if row[0]:
            runs.insert(0, 0)
        rows.append(runs)
    return rows


def decode_rows(rows, width):
    grid = np.zeros((len(rows), width), dtype=bool)
    for r, runs in enumerate(rows):
        col, value = 0, False
        for run in runs:
            grid[r, col:col + run] = value
            col += run
            value = not value
    return grid


def encode_ids(ids):
    """[value, count] runs over the row-major flattened id image."""
    flat = np.asarray(ids).ravel()
    if flat.size == 0:
        return []
    edges = np.flatnonzero(np.diff(flat)) + 1
    starts = np.concatenate([[0], edges])
    counts = np.diff(np.concatenate([starts, [flat.size]]))
    return [[int(flat[s]), int(c)] for s, c in zip(starts, counts)]


def decode_ids(runs, shape):
    values = [value for value, _ in runs]
    counts = [count for _, count in runs]
    return np.repeat(np.asarray(values, dtype=np.int32), counts).reshape(shape)


class ObjectInstanceSerializer(serializers.Serializer):
    """Serializer for object instances."""
    id = serializers.IntegerField(min_value=1)
    category = serializers.ChoiceField(choices=CATEGORIES)
    footprint = serializers.ListField(
        child=serializers.FloatField(), min_length=4, max_length=4,
    )
    height = serializers.FloatField()
    texture_seed = serializers.IntegerField()

    def validate(self, attrs):
        x0, y0, x1, y1 = attrs['footprint']
        if not (x0 < x1 and y0 < y1):
            raise serializers.ValidationError('footprint must have positive area')
        if not 0.2 < attrs['height'] < 2.0:
            raise serializers.ValidationError('height outside (0.2, 2.0)')
        return attrs

    def create(self, validated_data):
        validated_data['footprint'] = tuple(validated_data['footprint'])
        return ObjectInstance(**validated_data)


class SceneSerializer(serializers.Serializer):
    """Serializer for scene files."""
    format_version = FormatVersionField()
    scene_id = serializers.CharField()
    seed = serializers.IntegerField()
    resolution = serializers.FloatField(min_value=1e-6)
    width = serializers.IntegerField(min_value=1)
    wall_rows = serializers.ListField(
        child=serializers.ListField(child=serializers.IntegerField(min_value=0)),
        allow_empty=False,
    )
    objects = ObjectInstanceSerializer(many=True)
    texture_seed = serializers.IntegerField()
    wall_height = serializers.FloatField()
    texture_noise = serializers.FloatField(min_value=0.0, max_value=1.0)

    def validate(self, attrs):
        for runs in attrs['wall_rows']:
            if sum(runs) != attrs['width']:
                raise serializers.ValidationError(
                    'wall row run lengths do not add up to the width'
                )
        ids = [obj['id'] for obj in attrs['objects']]
        if len(set(ids)) != len(ids):
            raise serializers.ValidationError('duplicate instance ids')
        seeds = [obj['texture_seed'] for obj in attrs['objects']]
        if len(set(seeds)) != len(seeds):
            raise serializers.ValidationError('duplicate texture seeds')
        return attrs

    def to_representation(self, scene):
        return {
            'format_version': FORMAT_VERSION,
            'scene_id': scene.scene_id,
            'seed': int(scene.seed),
            'resolution': float(scene.resolution),
            'width': int(scene.shape[1]),
            'wall_rows': encode_rows(scene.wall_grid),
            'objects': ObjectInstanceSerializer(scene.objects, many=True).data,
            'texture_seed': int(scene.texture_seed),
            'wall_height': float(scene.wall_height),
            'texture_noise': float(scene.texture_noise),
        }

    def create(self, validated_data):
        objects = tuple(
            ObjectInstanceSerializer().create(dict(obj))
            for obj in validated_data['objects']
        )
        return Scene(
            scene_id=validated_data['scene_id'],
            seed=validated_data['seed'],
            resolution=validated_data['resolution'],
            wall_grid=decode_rows(validated_data['wall_rows'], validated_data['width']),
            objects=objects,
            texture_seed=validated_data['texture_seed'],
            wall_height=validated_data['wall_height'],
            texture_noise=validated_data['texture_noise'],
        )


class EpisodeSerializer(serializers.Serializer):
    """Serializer for one episode line.

    The goal image path is relative to the episode file; pass the file's
    directory as `base_dir` in the context to load the pixels.
    """
    format_version = FormatVersionField()
    episode_id = serializers.CharField()
    scene_id = serializers.CharField()
    start_pose = PoseSerializer()
    goal_instance_id = serializers.IntegerField(min_value=1)
    goal_category = serializers.ChoiceField(choices=CATEGORIES)
    goal_camera = CameraSerializer()
    goal_camera_pose = PoseSerializer()
    goal_image = serializers.CharField()
    goal_ids = serializers.ListField(
        child=serializers.ListField(
            child=serializers.IntegerField(min_value=0), min_length=2, max_length=2,
        ),
    )
    shortest_path_length = serializers.FloatField()
    viewpoints = serializers.ListField(
        child=serializers.ListField(
            child=serializers.FloatField(), min_length=2, max_length=2,
        ),
    )

    def validate_shortest_path_length(self, value):
        if not value > 0:
            raise serializers.ValidationError('must be positive')
        return value

    def validate(self, attrs):
        camera = attrs['goal_camera']
        if sum(count for _, count in attrs['goal_ids']) != camera['width'] * camera['height']:
            raise serializers.ValidationError('goal id runs do not cover the goal image')
        return attrs

    def to_representation(self, episode):
        goal = episode.goal
        return {
            'format_version': FORMAT_VERSION,
            'episode_id': episode.episode_id,
            'scene_id': episode.scene_id,
            'start_pose': PoseSerializer(episode.start_pose).data,
            'goal_instance_id': int(episode.goal_instance_id),
            'goal_category': episode.goal_category,
            'goal_camera': CameraSerializer(goal.camera).data,
            'goal_camera_pose': PoseSerializer(goal.pose).data,
            'goal_image': self.context.get('goal_image', f'{episode.episode_id}.ppm'),
            'goal_ids': encode_ids(goal.render.instance_ids),
            'shortest_path_length': float(episode.shortest_path_length),
            'viewpoints': [[float(x), float(y)] for x, y in episode.viewpoints],
        }

    def create(self, validated_data):
        camera = CameraSerializer().create(dict(validated_data['goal_camera']))
        shape = (camera.height, camera.width)
        ids = decode_ids(validated_data['goal_ids'], shape)
        base_dir = self.context.get('base_dir')
        if base_dir is not None:
            rgb = read_image(os.path.join(base_dir, validated_data['goal_image']))
        else:
            rgb = np.zeros(shape + (3,), dtype=np.uint8)
        goal = GoalView(
            render=RenderOutput(rgb=rgb, depth=np.zeros(shape), instance_ids=ids),
            camera=camera,
            pose=PoseSerializer().create(dict(validated_data['goal_camera_pose'])),
        )
        return Episode(
            episode_id=validated_data['episode_id'],
            scene_id=validated_data['scene_id'],
            start_pose=PoseSerializer().create(dict(validated_data['start_pose'])),
            goal_instance_id=validated_data['goal_instance_id'],
            goal_category=validated_data['goal_category'],
            goal=goal,
            shortest_path_length=validated_data['shortest_path_length'],
            viewpoints=[tuple(p) for p in validated_data['viewpoints']],
        )
