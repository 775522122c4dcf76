"""
Goal-image masks selecting which matched keypoints belong to the goal.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from django.conf import settings

from core.exceptions import MaskFailure

ORACLE_MASK = 'oracle-mask'
CROP = 'crop'
CLASS = 'class'
MASK_METHODS = (ORACLE_MASK, CROP, CLASS)


@dataclass(frozen=True)
class LocalizeParams:
    crop_x: tuple = (1 / 3, 2 / 3)
    crop_y: tuple = (1 / 3, 7 / 8)
    min_points_per_cell: int = 1

    @classmethod
    def from_settings(cls, **overrides):
        values = dict(settings.NAVIGATION['localize'])
        values.update(overrides)
        values['crop_x'] = tuple(values['crop_x'])
        values['crop_y'] = tuple(values['crop_y'])
        return cls(**values)


@dataclass
class GoalMask:
    mask: np.ndarray
    method: str
    category: str = None

    @property
    def area_fraction(self):
        return float(self.mask.mean())


def crop_bounds(width, height, crop_x=(1 / 3, 2 / 3), crop_y=(1 / 3, 7 / 8)):
    """Pixel rectangle (x0, x1, y0, y1), half-open, floor-rounded."""
    return (
        int(math.floor(width * crop_x[0])), int(math.floor(width * crop_x[1])),
        int(math.floor(height * crop_y[0])), int(math.floor(height * crop_y[1])),
    )


def make_goal_mask(goal_render, method, goal_instance_id=None, category=None,
                   params: LocalizeParams = None) -> GoalMask:
    """Build the goal-image mask for one localization method."""
    params = params or LocalizeParams.from_settings()
    height, width = goal_render.instance_ids.shape
    if method == ORACLE_MASK:
        center = int(goal_render.instance_ids[height // 2, width // 2])
        if center == 0:
            raise MaskFailure('goal image center pixel shows no object')
        if goal_instance_id is not None and center != goal_instance_id:
            raise MaskFailure(
                f'center pixel shows instance {center}, not the goal {goal_instance_id}'
            )
        return GoalMask(goal_render.instance_ids == center, ORACLE_MASK, category)
    if method == CROP:
        x0, x1, y0, y1 = crop_bounds(width, height, params.crop_x, params.crop_y)
        mask = np.zeros((height, width), dtype=bool)
        mask[y0:y1, x0:x1] = True
        return GoalMask(mask, CROP, category)
    if method == CLASS:
        return GoalMask(np.ones((height, width), dtype=bool), CLASS, category)
    raise ValueError(f'unknown mask method {method!r}')
