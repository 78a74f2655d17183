"""Lossless instance mask images: 8-bit single channel PNG, pixel = instance id.

Background and empty pixels both write as 0; persons keep their 1-255 id.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from ..geometry.raster import InstanceBuffer


def mask_image_array(buffer: InstanceBuffer) -> np.ndarray:
    ids = buffer.ids
    return np.where(ids > 0, ids, 0).astype(np.uint8)


def write_mask_png(buffer: InstanceBuffer, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(mask_image_array(buffer), mode="L").save(path, format="PNG")
    return path


def read_mask_png(path) -> np.ndarray:
    with Image.open(path) as img:
        return np.asarray(img.convert("L"), dtype=np.uint8)


def write_rgb_png(pixels: np.ndarray, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(pixels, mode="RGB").save(path, format="PNG")
    return path
