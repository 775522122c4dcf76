"""
Per-pixel ray marching of a 2.5D scene into RGB, depth and instance ids.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from django.conf import settings

from core.geometry import CameraModel, Pose, camera_origin, camera_rays
from simworld.scene import CATEGORIES, CATEGORY_PALETTES, Scene

PATTERN_SIZE = 32

WALL_COLOR = np.array([190.0, 185.0, 175.0])
FLOOR_COLOR = np.array([125.0, 105.0, 85.0])

# face shading: x-facing sides, y-facing sides, top
FACE_SHADE = np.array([0.8, 0.65, 1.0])


@dataclass(frozen=True)
class RenderParams:
    max_range: float = 10.0
    march_step: float = 0.025
    refine_iterations: int = 12
    texture_block: float = 0.06
    oracle_width: int = 80
    oracle_height: int = 45
    oracle_headings: int = 12
    oracle_pitches: tuple = (-0.5235987755982988, 0.0, 0.5235987755982988)

    @classmethod
    def from_settings(cls, **overrides):
        values = dict(settings.NAVIGATION['render'])
        values['oracle_pitches'] = tuple(values['oracle_pitches'])
        values.update(overrides)
        return cls(**values)


@dataclass
class RenderOutput:
    """Aligned RGB, Euclidean depth (0 = no return) and instance ids."""
    rgb: np.ndarray
    depth: np.ndarray
    instance_ids: np.ndarray

    def __post_init__(self):
        shape = self.instance_ids.shape
        if self.rgb.shape[:2] != shape or self.depth.shape != shape:
            raise ValueError('render channels disagree on image size')

    @property
    def shape(self):
        return self.instance_ids.shape


def _lookup(scene, points):
    """Per point: solid?, wall?, object id, inside the grid?"""
    rows, cols = scene.shape
    i = np.floor(points[:, 1] / scene.resolution).astype(np.int64)
    j = np.floor(points[:, 0] / scene.resolution).astype(np.int64)
    inside = (i >= 0) & (i < rows) & (j >= 0) & (j < cols)
    i = np.clip(i, 0, rows - 1)
    j = np.clip(j, 0, cols - 1)
    heights = np.where(inside, scene.height_grid[i, j], 0.0)
    solid = points[:, 2] <= heights
    return solid, inside, i, j


def march(scene: Scene, origin, directions, params: RenderParams):
    """Distance along each unit ray to the first solid, inf on a miss."""
    n = len(directions)
    lo = np.zeros(n)
    hi = np.full(n, np.inf)
    active = np.arange(n)
    # rays climbing above the walls never come back down
    escapes = (directions[:, 2] >= 0) & (origin[2] >= scene.wall_height)
    active = active[~escapes]
    t = 0.0
    while active.size and t < params.max_range:
        t_next = min(t + params.march_step, params.max_range)
        points = origin + directions[active] * t_next
        solid, inside, _, _ = _lookup(scene, points)
        hit = active[solid & inside]
        lo[hit] = t
        hi[hit] = t_next
        above = (points[:, 2] > scene.wall_height) & (directions[active, 2] >= 0)
        active = active[~solid & inside & ~above]
        t = t_next
    found = np.isfinite(hi)
    a, b = lo[found], hi[found]
    dirs = directions[found]
    for _ in range(params.refine_iterations):
        mid = (a + b) / 2
        solid, _, _, _ = _lookup(scene, origin + dirs * mid[:, None])
        b = np.where(solid, mid, b)
        a = np.where(solid, a, mid)
    # the floor plane is hit exactly
    points = origin + dirs * b[:, None]
    _, _, i, j = _lookup(scene, points)
    floor = (scene.height_grid[i, j] == 0) & (dirs[:, 2] < 0)
    b = np.where(floor, -origin[2] / np.where(floor, dirs[:, 2], -1.0), b)
    hi[found] = b
    return hi


def _pattern(seed):
    return np.random.default_rng(seed).random((PATTERN_SIZE, PATTERN_SIZE))


def _blocks(values, size):
    return np.floor(values / size).astype(np.int64) % PATTERN_SIZE


def _shade(scene, points, ids, i, j, params):
    """Procedural colors for hit points."""
    colors = np.zeros((len(points), 3))
    x, y, z = points[:, 0], points[:, 1], points[:, 2]
    walls = scene.wall_grid[i, j] & (ids == 0)
    floor = ~walls & (ids == 0)

    wall_pattern = _pattern(scene.texture_seed)
    # a wall hit sits on a cell edge; the closer grid line gives the face
    fx = np.abs(x / scene.resolution - np.round(x / scene.resolution))
    fy = np.abs(y / scene.resolution - np.round(y / scene.resolution))
    along = np.where(fx < fy, y, x)
    wr = wall_pattern[_blocks(along[walls], 0.25), _blocks(z[walls], 0.25)]
    colors[walls] = WALL_COLOR * (0.9 + 0.2 * wr)[:, None]

    floor_pattern = _pattern(scene.texture_seed + 1)
    fr = floor_pattern[_blocks(x[floor], 0.5), _blocks(y[floor], 0.5)]
    colors[floor] = FLOOR_COLOR * (0.85 + 0.3 * fr)[:, None]

    block = params.texture_block
    for obj in scene.objects:
        sel = ids == obj.id
        if not sel.any():
            continue
        x0, y0, x1, y1 = obj.footprint
        px, py, pz = x[sel], y[sel], z[sel]
        gaps = np.stack([
            np.minimum(np.abs(px - x0), np.abs(px - x1)),
            np.minimum(np.abs(py - y0), np.abs(py - y1)),
            np.abs(pz - obj.height),
        ], axis=1)
        face = np.argmin(gaps, axis=1)
        a = np.where(face == 0, py, px)
        b = np.where(face == 2, py, pz)
        ai, bi = _blocks(a, block), _blocks(b, block)
        own = _pattern(obj.texture_seed)[ai, bi]
        shared = _pattern(1000 + CATEGORIES.index(obj.category))[ai, bi]
        value = (1.0 - scene.texture_noise) * own + scene.texture_noise * shared
        palette = np.array(CATEGORY_PALETTES[obj.category], dtype=np.float64)
        colors[sel] = palette * ((0.35 + 0.9 * value) * FACE_SHADE[face])[:, None]
    return np.clip(np.round(colors), 0, 255).astype(np.uint8)


def render(scene: Scene, cam_pose: Pose, cam: CameraModel,
           params: RenderParams = None, with_rgb=True) -> RenderOutput:
    """Render the scene from a camera placed at `cam_pose`.

    The camera height and pitch come from `cam`. `with_rgb=False` skips
    texturing and leaves the color image black.
    """
    params = params or RenderParams.from_settings()
    origin = camera_origin(cam, cam_pose)
    directions = camera_rays(cam, cam_pose).reshape(-1, 3)
    distance = march(scene, origin, directions, params)
    hit = np.isfinite(distance) & (distance <= params.max_range)
    depth = np.where(hit, distance, 0.0)
    ids = np.zeros(len(directions), dtype=np.int32)
    rgb = np.zeros((len(directions), 3), dtype=np.uint8)
    if hit.any():
        points = origin + directions[hit] * distance[hit][:, None]
        _, _, i, j = _lookup(scene, points)
        on_floor = points[:, 2] <= 1e-9
        ids[hit] = np.where(on_floor, 0, scene.object_grid[i, j])
        if with_rgb:
            rgb[hit] = _shade(scene, points, ids[hit], i, j, params)
    shape = (cam.height, cam.width)
    return RenderOutput(
        rgb=rgb.reshape(shape + (3,)),
        depth=depth.reshape(shape),
        instance_ids=ids.reshape(shape),
    )
