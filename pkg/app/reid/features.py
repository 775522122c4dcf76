"""
Segment-test corners, binary patch descriptors and mutual nearest
neighbour matching.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np
from django.conf import settings
from PIL import Image
from scipy import ndimage

DESCRIPTOR_BYTES = 32

# 16-pixel Bresenham circle of radius 3 as (dx, dy), clockwise from the top
RING = (
    (0, -3), (1, -3), (2, -2), (3, -1), (3, 0), (3, 1), (2, 2), (1, 3),
    (0, 3), (-1, 3), (-2, 2), (-3, 1), (-3, 0), (-3, -1), (-2, -2), (-1, -3),
)

POPCOUNT = np.array([bin(i).count('1') for i in range(256)], dtype=np.uint16)


@dataclass(frozen=True)
class FeatureParams:
    fast_threshold: float = 20.0
    fast_arc: int = 9
    max_keypoints: int = 500
    patch_size: int = 31
    smoothing_sigma: float = 2.0
    descriptor_bits: int = 256
    pattern_seed: int = 20230512
    ratio: float = 0.8
    embed_size: int = 16

    @classmethod
    def from_settings(cls, **overrides):
        values = dict(settings.NAVIGATION['reid'])
        values.update(overrides)
        return cls(**values)


@dataclass
class Keypoints:
    """Pixel coordinates (x, y) with packed 256-bit descriptors."""
    coords: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    descriptors: np.ndarray = field(
        default_factory=lambda: np.zeros((0, DESCRIPTOR_BYTES), dtype=np.uint8)
    )
    scores: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __len__(self):
        return len(self.coords)


@dataclass
class MatchSet:
    """Goal/ego index pairs sorted by confidence, highest first."""
    pairs: np.ndarray = field(default_factory=lambda: np.zeros((0, 2), dtype=np.int64))
    goal_xy: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    ego_xy: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    confidences: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __len__(self):
        return len(self.pairs)

    @property
    def confidence_sum(self):
        return float(np.sum(self.confidences))


def to_gray(rgb):
    rgb = np.asarray(rgb, dtype=np.float64)
    if rgb.ndim == 2:
        return rgb
    return rgb[..., 0] * 0.299 + rgb[..., 1] * 0.587 + rgb[..., 2] * 0.114


def _longest_arc(flags):
    """Longest circular run of True over the first axis (length 16)."""
    wrapped = np.concatenate([flags, flags[:-1]], axis=0)
    run = np.zeros(flags.shape[1:], dtype=np.int32)
    best = np.zeros(flags.shape[1:], dtype=np.int32)
    for layer in wrapped:
        run = np.where(layer, run + 1, 0)
        np.maximum(best, run, out=best)
    return np.minimum(best, len(flags))


def corner_scores(gray, threshold=20.0, arc=9):
    """Segment-test response per pixel; 0 where the pixel is not a corner."""
    height, width = gray.shape
    scores = np.zeros(gray.shape)
    if height < 7 or width < 7:
        return scores
    center = gray[3:height - 3, 3:width - 3]
    ring = np.stack([
        gray[3 + dy:height - 3 + dy, 3 + dx:width - 3 + dx] for dx, dy in RING
    ])
    diff = ring - center[None]
    brighter = diff > threshold
    darker = diff < -threshold
    is_corner = (_longest_arc(brighter) >= arc) | (_longest_arc(darker) >= arc)
    bright_sum = np.where(brighter, diff - threshold, 0.0).sum(axis=0)
    dark_sum = np.where(darker, -diff - threshold, 0.0).sum(axis=0)
    scores[3:height - 3, 3:width - 3] = np.where(
        is_corner, np.maximum(bright_sum, dark_sum), 0.0
    )
    return scores


@functools.lru_cache(maxsize=8)
def sampling_pattern(seed, bits=256, patch_size=31):
    """Frozen (bits, 4) pattern of (dx1, dy1, dx2, dy2) offsets."""
    rng = np.random.default_rng(seed)
    half = patch_size // 2
    pattern = np.rint(rng.normal(0.0, patch_size / 5.0, size=(bits, 4)))
    pattern = np.clip(pattern, -half, half).astype(np.int64)
    pattern.setflags(write=False)
    return pattern


def detect_and_describe(image, params: FeatureParams = None) -> Keypoints:
    """Corners with 3x3 non-max suppression and patch descriptors.

    Keypoints whose patch would leave the image are dropped; at most
    `max_keypoints` are kept, strongest first.
    """
    params = params or FeatureParams.from_settings()
    gray = to_gray(image)
    scores = corner_scores(gray, params.fast_threshold, params.fast_arc)
    peaks = (scores > 0) & (scores == ndimage.maximum_filter(scores, size=3))
    half = params.patch_size // 2
    peaks[:half, :] = False
    peaks[-half:, :] = False
    peaks[:, :half] = False
    peaks[:, -half:] = False
    ys, xs = np.nonzero(peaks)
    if len(xs) == 0:
        return Keypoints()
    strength = scores[ys, xs]
    order = np.argsort(-strength, kind='stable')[:params.max_keypoints]
    ys, xs, strength = ys[order], xs[order], strength[order]

    smooth = ndimage.gaussian_filter(gray, params.smoothing_sigma)
    pattern = sampling_pattern(params.pattern_seed, params.descriptor_bits, params.patch_size)
    first = smooth[ys[:, None] + pattern[None, :, 1], xs[:, None] + pattern[None, :, 0]]
    second = smooth[ys[:, None] + pattern[None, :, 3], xs[:, None] + pattern[None, :, 2]]
    descriptors = np.packbits(first < second, axis=1)
    coords = np.stack([xs, ys], axis=1).astype(np.float64)
    return Keypoints(coords=coords, descriptors=descriptors, scores=strength)


def hamming(a, b):
    """Pairwise Hamming distances between two packed descriptor sets."""
    if len(a) == 0 or len(b) == 0:
        return np.zeros((len(a), len(b)), dtype=np.int64)
    xor = np.bitwise_xor(a[:, None, :], b[None, :, :])
    return POPCOUNT[xor].sum(axis=2).astype(np.int64)


def match_features(goal: Keypoints, ego: Keypoints, ratio=0.8, bits=256) -> MatchSet:
    """Mutual nearest neighbours passing the ratio test.

    Confidence is 1 - d/bits for Hamming distance d. A second-best distance
    of 0 rejects the match; with a single candidate there is no ratio test.
    """
    if len(goal) == 0 or len(ego) == 0:
        return MatchSet()
    dist = hamming(goal.descriptors, ego.descriptors)
    forward = np.argmin(dist, axis=1)
    backward = np.argmin(dist, axis=0)
    goal_idx = np.arange(len(goal))
    mutual = backward[forward] == goal_idx
    d1 = dist[goal_idx, forward]
    if dist.shape[1] > 1:
        d2 = np.partition(dist, 1, axis=1)[:, 1]
        with np.errstate(divide='ignore', invalid='ignore'):
            passed = (d2 > 0) & (d1 <= ratio * d2)
    else:
        passed = np.ones(len(goal), dtype=bool)
    keep = np.flatnonzero(mutual & passed)
    confidences = np.clip(1.0 - d1[keep] / float(bits), 0.0, 1.0)
    order = np.argsort(-confidences, kind='stable')
    keep, confidences = keep[order], confidences[order]
    pairs = np.stack([keep, forward[keep]], axis=1).astype(np.int64)
    return MatchSet(
        pairs=pairs,
        goal_xy=goal.coords[pairs[:, 0]],
        ego_xy=ego.coords[pairs[:, 1]],
        confidences=confidences,
    )


def embed(image, size=16):
    """Mean-centered, downsampled color image as a flat vector."""
    array = np.ascontiguousarray(image, dtype=np.uint8)
    small = Image.fromarray(array).resize((size, size), Image.BOX)
    vector = np.asarray(small, dtype=np.float64).ravel()
    return vector - vector.mean()


def cosine_similarity(a, b):
    norm = np.linalg.norm(a) * np.linalg.norm(b)
    if norm == 0:
        return 1.0 if np.array_equal(a, b) else 0.0
    return float(np.dot(a, b) / norm)
