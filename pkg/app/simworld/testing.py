"""
Small hand-built scenes and episodes shared by the test suites.
"""
import math

import numpy as np

from core.geometry import CameraModel, Pose
from simworld.episodes import Episode
from simworld.goals import GoalView
from simworld.render import render
from simworld.scene import ObjectInstance, Scene

ROOM_SHAPE = (60, 80)


def create_walls(shape=ROOM_SHAPE, thickness=2):
    walls = np.zeros(shape, dtype=bool)
    walls[:thickness, :] = True
    walls[-thickness:, :] = True
    walls[:, :thickness] = True
    walls[:, -thickness:] = True
    return walls


def create_objects():
    return (
        ObjectInstance(1, 'chair', (1.0, 0.5, 1.5, 1.0), 0.9, 11),
        ObjectInstance(2, 'plant', (3.0, 2.2, 3.4, 2.6), 1.1, 23),
    )


def create_scene(scene_id='room', walls=None, objects=None):
    """A 4 m x 3 m room with a chair and a plant."""
    return Scene(
        scene_id=scene_id,
        seed=0,
        resolution=0.05,
        wall_grid=create_walls() if walls is None else walls,
        objects=create_objects() if objects is None else objects,
        texture_seed=5,
    )


def create_closet_scene():
    """The room with the plant sealed inside a closet."""
    walls = create_walls()
    walls[42:54, 58:70] = True
    walls[44:52, 60:68] = False
    return create_scene('closet', walls=walls)


def create_two_room_scene():
    """Two 3 m x 3 m rooms joined by a 1 m doorway."""
    walls = create_walls((60, 120))
    walls[:, 58:61] = True
    walls[20:40, 58:61] = False
    objects = (
        ObjectInstance(1, 'chair', (1.0, 1.0, 1.5, 1.5), 0.9, 11),
        ObjectInstance(2, 'plant', (4.5, 1.3, 4.9, 1.7), 1.1, 23),
    )
    return create_scene('two-rooms', walls=walls, objects=objects)


def create_goal_view(scene, instance_id, cam_pose, size=64, hfov=math.radians(60.0),
                     height=1.0):
    """Goal image of an instance from a fixed camera pose."""
    obj = scene.instance(instance_id)
    cx, cy = obj.centroid
    horizontal = math.hypot(cx - cam_pose.x, cy - cam_pose.y)
    pitch = math.atan2(obj.height / 2 - height, horizontal)
    cam = CameraModel(size, size, hfov, height, pitch)
    return GoalView(render=render(scene, cam_pose, cam), camera=cam, pose=cam_pose)


def create_episode(scene, start=Pose(0.5, 1.5, 0.0), instance_id=1,
                   viewpoints=((1.25, 1.5),), shortest_path_length=1.0,
                   episode_id='room-ep0000'):
    obj = scene.instance(instance_id)
    cx, cy = obj.centroid
    goal_pose = Pose(cx, cy + 1.5, -math.pi / 2)
    return Episode(
        episode_id=episode_id,
        scene_id=scene.scene_id,
        start_pose=start,
        goal_instance_id=instance_id,
        goal_category=obj.category,
        goal=create_goal_view(scene, instance_id, goal_pose),
        shortest_path_length=shortest_path_length,
        viewpoints=list(viewpoints),
    )
