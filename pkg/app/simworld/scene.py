"""
Procedural multi-room scenes built from extruded wall and object footprints.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from django.conf import settings
from scipy import ndimage

from core.exceptions import GenerationFailure, UnknownInstance

logger = logging.getLogger(__name__)

CATEGORIES = ('chair', 'couch', 'plant', 'bed', 'toilet', 'television')

# width (x), depth (y), height in meters; shared by every instance
CATEGORY_SHAPES = {
    'chair': (0.5, 0.5, 0.9),
    'couch': (1.8, 0.8, 0.85),
    'plant': (0.4, 0.4, 1.1),
    'bed': (2.0, 1.5, 0.6),
    'toilet': (0.45, 0.7, 0.75),
    'television': (1.0, 0.3, 1.3),
}

CATEGORY_PALETTES = {
    'chair': (170, 90, 50),
    'couch': (60, 90, 160),
    'plant': (60, 150, 70),
    'bed': (200, 170, 130),
    'toilet': (215, 215, 220),
    'television': (70, 70, 80),
}


@dataclass(frozen=True)
class ObjectInstance:
    """One object: a cell-aligned footprint extruded to `height`."""
    id: int
    category: str
    footprint: tuple
    height: float
    texture_seed: int

    def __post_init__(self):
        if self.category not in CATEGORIES:
            raise ValueError(f'unknown category {self.category!r}')
        if not 0.2 < self.height < 2.0:
            raise ValueError(f'object height {self.height} outside (0.2, 2.0)')

    @property
    def centroid(self):
        x0, y0, x1, y1 = self.footprint
        return ((x0 + x1) / 2.0, (y0 + y1) / 2.0)

    def distance_to(self, xy):
        """Euclidean distance from a point to the footprint rectangle."""
        x0, y0, x1, y1 = self.footprint
        dx = max(x0 - xy[0], 0.0, xy[0] - x1)
        dy = max(y0 - xy[1], 0.0, xy[1] - y1)
        return math.hypot(dx, dy)


@dataclass(frozen=True, eq=False)
class Scene:
    """Immutable scene: wall grid (rows = y) plus object instances."""
    scene_id: str
    seed: int
    resolution: float
    wall_grid: np.ndarray
    objects: tuple = ()
    texture_seed: int = 0
    wall_height: float = 2.5
    texture_noise: float = 0.15

    def __post_init__(self):
        self.wall_grid.setflags(write=False)

    @property
    def shape(self):
        return self.wall_grid.shape

    @property
    def extent(self):
        rows, cols = self.shape
        return (cols * self.resolution, rows * self.resolution)

    def instance(self, instance_id) -> ObjectInstance:
        for obj in self.objects:
            if obj.id == instance_id:
                return obj
        raise UnknownInstance(instance_id)

    @cached_property
    def categories(self):
        return {obj.id: obj.category for obj in self.objects}

    def footprint_cells(self, obj):
        x0, y0, x1, y1 = obj.footprint
        r0 = int(round(y0 / self.resolution))
        r1 = int(round(y1 / self.resolution))
        c0 = int(round(x0 / self.resolution))
        c1 = int(round(x1 / self.resolution))
        return slice(r0, r1), slice(c0, c1)

    @cached_property
    def object_grid(self):
        grid = np.zeros(self.shape, dtype=np.int32)
        for obj in self.objects:
            grid[self.footprint_cells(obj)] = obj.id
        grid.setflags(write=False)
        return grid

    @cached_property
    def height_grid(self):
        heights = np.where(self.wall_grid, self.wall_height, 0.0)
        for obj in self.objects:
            heights[self.footprint_cells(obj)] = obj.height
        heights.setflags(write=False)
        return heights

    @cached_property
    def obstacle_grid(self):
        return self.wall_grid | (self.object_grid > 0)

    @cached_property
    def clearance(self):
        """Distance (m) from each cell center to the nearest obstacle edge."""
        cells = ndimage.distance_transform_edt(~self.obstacle_grid)
        return np.maximum(cells * self.resolution - self.resolution / 2, 0.0)

    def traversable(self, agent_radius):
        return (self.clearance >= agent_radius) & ~self.obstacle_grid

    def world_to_cell(self, xy):
        return (
            int(math.floor(xy[1] / self.resolution)),
            int(math.floor(xy[0] / self.resolution)),
        )

    def cell_to_world(self, cell):
        return (
            (cell[1] + 0.5) * self.resolution,
            (cell[0] + 0.5) * self.resolution,
        )

    def contains(self, xy):
        rows, cols = self.shape
        row, col = self.world_to_cell(xy)
        return 0 <= row < rows and 0 <= col < cols


@dataclass(frozen=True)
class SceneParams:
    resolution: float = 0.05
    extent: tuple = (7.0, 11.0)
    rooms: tuple = (2, 4)
    min_room_side: float = 2.6
    objects_per_room: tuple = (2, 3)
    required_categories: dict = field(default_factory=dict)
    wall_height: float = 2.5
    wall_thickness: float = 0.1
    door_width: float = 1.0
    object_clearance: float = 0.45
    texture_noise: float = 0.15
    max_retries: int = 50
    agent_radius: float = 0.17

    @classmethod
    def from_settings(cls, **overrides):
        values = dict(settings.NAVIGATION['scene'])
        values['agent_radius'] = settings.NAVIGATION['agent_radius']
        values.update(overrides)
        for key in ('extent', 'rooms', 'objects_per_room'):
            values[key] = tuple(values[key])
        return cls(**values)


class _Rejected(Exception):
    """One generation attempt failed; the caller retries."""


def _split_room(rng, room, keep_clear, params, res):
    """Split a room with a wall and a doorway; None if it cannot be split."""
    r0, c0, r1, c1 = room
    t = max(1, int(round(params.wall_thickness / res)))
    side = int(math.ceil(params.min_room_side / res))
    door = int(round(params.door_width / res))
    margin = int(math.ceil(0.2 / res))
    vertical = (c1 - c0) >= (r1 - r0)
    low, high = (c0, c1) if vertical else (r0, r1)
    span_low, span_high = (r0, r1) if vertical else (c0, c1)
    if high - low < 2 * side + t or span_high - span_low < door + 2 * margin:
        return None
    for _ in range(10):
        pos = int(low + rng.uniform(0.35, 0.65) * (high - low))
        pos = min(max(pos, low + side), high - side - t)
        if vertical:
            wall = (r0, pos, r1, pos + t)
        else:
            wall = (pos, c0, pos + t, c1)
        if any(_overlaps(wall, zone) for zone in keep_clear):
            continue
        start = int(rng.integers(span_low + margin, span_high - margin - door + 1))
        if vertical:
            doorway = (start, pos, start + door, pos + t)
            first, second = (r0, c0, r1, pos), (r0, pos + t, r1, c1)
        else:
            doorway = (pos, start, pos + t, start + door)
            first, second = (r0, c0, pos, c1), (pos + t, c0, r1, c1)
        return wall, doorway, first, second
    return None


def _overlaps(a, b):
    return a[0] < b[2] and b[0] < a[2] and a[1] < b[3] and b[1] < a[3]


def _grow(rect, cells, shape):
    r0, c0, r1, c1 = rect
    return (
        max(r0 - cells, 0), max(c0 - cells, 0),
        min(r1 + cells, shape[0]), min(c1 + cells, shape[1]),
    )


def _layout(rng, params):
    """Rooms by binary space partition; returns (wall grid, rooms, zones)."""
    res = params.resolution
    width = rng.uniform(*params.extent)
    height = rng.uniform(*params.extent)
    shape = (int(math.ceil(height / res)), int(math.ceil(width / res)))
    t = max(1, int(round(params.wall_thickness / res)))
    walls = np.ones(shape, dtype=bool)
    rooms = [(t, t, shape[0] - t, shape[1] - t)]
    walls[t:shape[0] - t, t:shape[1] - t] = False
    doorways, keep_clear = [], []
    clear = int(math.ceil(0.6 / res))
    target = int(rng.integers(params.rooms[0], params.rooms[1] + 1))
    while len(rooms) < target:
        order = sorted(
            range(len(rooms)),
            key=lambda k: -(rooms[k][2] - rooms[k][0]) * (rooms[k][3] - rooms[k][1]),
        )
        for k in order:
            split = _split_room(rng, rooms[k], keep_clear, params, res)
            if split is not None:
                break
        else:
            raise _Rejected('rooms cannot be split further')
        wall, doorway, first, second = split
        walls[wall[0]:wall[2], wall[1]:wall[3]] = True
        doorways.append(doorway)
        keep_clear.append(_grow(doorway, clear, shape))
        rooms[k:k + 1] = [first, second]
    for r0, c0, r1, c1 in doorways:
        walls[r0:r1, c0:c1] = False
    return walls, rooms, keep_clear


def _categories(rng, params, slots):
    """Category list honouring minimums and the duplicate requirement."""
    chosen = []
    for category, count in sorted(params.required_categories.items()):
        chosen.extend([category] * int(count))
    while len(chosen) < slots:
        chosen.append(CATEGORIES[int(rng.integers(len(CATEGORIES)))])
    counts = {c: chosen.count(c) for c in set(chosen)}
    if chosen and max(counts.values()) < 2:
        chosen.append(chosen[0])
    return chosen


def _place(rng, category, rooms, blocked, params):
    """Find a cell-aligned footprint in free space; None if nothing fits."""
    res = params.resolution
    w, d, _ = CATEGORY_SHAPES[category]
    for _ in range(60):
        room = rooms[int(rng.integers(len(rooms)))]
        wx, dy = (w, d) if rng.integers(2) == 0 else (d, w)
        cw, ch = int(math.ceil(wx / res)), int(math.ceil(dy / res))
        r0, c0, r1, c1 = room
        if r1 - r0 <= ch or c1 - c0 <= cw:
            continue
        row = int(rng.integers(r0, r1 - ch + 1))
        col = int(rng.integers(c0, c1 - cw + 1))
        if blocked[row:row + ch, col:col + cw].any():
            continue
        return row, col, ch, cw
    return None


def _connected(mask):
    _, count = ndimage.label(mask)
    return count == 1


def generate_scene(seed, params: SceneParams = None, scene_id=None) -> Scene:
    """Generate a connected multi-room scene, deterministic in `seed`."""
    params = params or SceneParams.from_settings()
    rng = np.random.default_rng(seed)
    scene_id = scene_id or f'scene-{seed}'
    for attempt in range(params.max_retries):
        try:
            scene = _attempt(rng, seed, scene_id, params)
        except _Rejected as exc:
            logger.debug('scene %s attempt %d rejected: %s', scene_id, attempt, exc)
            continue
        logger.info(
            'generated %s: %dx%d cells, %d objects',
            scene_id, scene.shape[1], scene.shape[0], len(scene.objects),
        )
        return scene
    raise GenerationFailure(
        f'{scene_id}: no valid scene after {params.max_retries} attempts'
    )


def _attempt(rng, seed, scene_id, params):
    res = params.resolution
    walls, rooms, keep_clear = _layout(rng, params)
    clear = int(math.ceil(params.object_clearance / res))
    blocked = ndimage.binary_dilation(walls, iterations=clear)
    for r0, c0, r1, c1 in keep_clear:
        blocked[r0:r1, c0:c1] = True
    low, high = params.objects_per_room
    slots = sum(int(rng.integers(low, high + 1)) for _ in rooms)
    required = sum(int(v) for v in params.required_categories.values())
    objects, seeds = [], set()
    for index, category in enumerate(_categories(rng, params, slots)):
        spot = _place(rng, category, rooms, blocked, params)
        if spot is None:
            if index < required:
                raise _Rejected(f'required {category} does not fit')
            continue
        row, col, ch, cw = spot
        grown = _grow((row, col, row + ch, col + cw), clear, walls.shape)
        blocked[grown[0]:grown[2], grown[1]:grown[3]] = True
        texture_seed = int(rng.integers(1, 2 ** 31))
        while texture_seed in seeds:
            texture_seed = int(rng.integers(1, 2 ** 31))
        seeds.add(texture_seed)
        objects.append(ObjectInstance(
            id=len(objects) + 1,
            category=category,
            footprint=(col * res, row * res, (col + cw) * res, (row + ch) * res),
            height=CATEGORY_SHAPES[category][2],
            texture_seed=texture_seed,
        ))
    counts = {}
    for obj in objects:
        counts[obj.category] = counts.get(obj.category, 0) + 1
    if not counts or max(counts.values()) < 2:
        raise _Rejected('no category with two instances')
    scene = Scene(
        scene_id=scene_id,
        seed=int(seed),
        resolution=res,
        wall_grid=walls,
        objects=tuple(objects),
        texture_seed=int(rng.integers(1, 2 ** 31)),
        wall_height=params.wall_height,
        texture_noise=params.texture_noise,
    )
    if not _connected(~scene.obstacle_grid):
        raise _Rejected('free space is disconnected')
    if not _connected(scene.traversable(params.agent_radius)):
        raise _Rejected('traversable space is disconnected')
    return scene
