"""
Scene and episode files on disk.

Scenes are one JSON file each; episodes are JSON lines with the goal images
written as PPM files in a sibling directory.
"""
import logging
import os

from core.imageio import write_ppm
from core.jsonio import read_json, read_jsonl, write_json, write_jsonl
from core.serializers import load
from simworld.serializers import EpisodeSerializer, SceneSerializer

logger = logging.getLogger(__name__)


def scene_path(directory, scene_id):
    return os.path.join(directory, f'{scene_id}.json')


def save_scene(scene, directory):
    path = scene_path(directory, scene.scene_id)
    write_json(path, SceneSerializer(scene).data)
    return path


def load_scene(path):
    return load(SceneSerializer, read_json(path))


def load_scenes(directory):
    """Every scene file in `directory`, ordered by scene id."""
    names = sorted(n for n in os.listdir(directory) if n.endswith('.json'))
    scenes = [load_scene(os.path.join(directory, n)) for n in names]
    return {scene.scene_id: scene for scene in sorted(scenes, key=lambda s: s.scene_id)}


def images_dir(episode_file):
    stem, _ = os.path.splitext(os.path.basename(episode_file))
    return f'{stem}_images'


def save_episodes(episodes, path):
    base_dir = os.path.dirname(os.path.abspath(path))
    folder = images_dir(path)
    records = []
    for episode in episodes:
        relative = f'{folder}/{episode.episode_id}.ppm'
        write_ppm(os.path.join(base_dir, relative), episode.goal.render.rgb)
        serializer = EpisodeSerializer(episode, context={'goal_image': relative})
        records.append(serializer.data)
    write_jsonl(path, records)
    logger.info('wrote %d episodes to %s', len(records), path)
    return path


def load_episodes(path, with_images=True):
    base_dir = os.path.dirname(os.path.abspath(path)) if with_images else None
    return [
        load(EpisodeSerializer, record, base_dir=base_dir)
        for record in read_jsonl(path)
    ]
