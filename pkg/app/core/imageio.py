"""
Netpbm image files (PPM/PGM) read and written through Pillow.
"""
import os

import numpy as np
from PIL import Image


def write_ppm(path, rgb):
    """Write an H x W x 3 uint8 array as binary PPM (P6)."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    image = Image.fromarray(np.ascontiguousarray(rgb, dtype=np.uint8), 'RGB')
    image.save(path, format='PPM')


def write_pgm(path, gray):
    """Write an H x W uint8 array as binary PGM (P5)."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    image = Image.fromarray(np.ascontiguousarray(gray, dtype=np.uint8), 'L')
    image.save(path, format='PPM')


def read_image(path):
    """Read a PPM or PGM file into a uint8 array."""
    with Image.open(path) as image:
        return np.asarray(image.copy(), dtype=np.uint8)


def normalize_to_gray(values, invalid=None):
    """Scale a float grid to 0..255; `invalid` cells become 0."""
    values = np.asarray(values, dtype=np.float64)
    valid = np.isfinite(values)
    if invalid is not None:
        valid &= ~invalid
    out = np.zeros(values.shape, dtype=np.uint8)
    if not valid.any():
        return out
    low, high = values[valid].min(), values[valid].max()
    span = high - low if high > low else 1.0
    out[valid] = np.round(1 + 254 * (values[valid] - low) / span)
    return out
