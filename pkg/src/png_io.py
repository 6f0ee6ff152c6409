"""8-bit PNG reading/writing, JPEG inputs and the edge-prior cache."""
import logging
from pathlib import Path

import numpy as np
import png
from PIL import Image, UnidentifiedImageError

from src.constants.constants_data import DATA_ERRORS, DATA_LOGS
from src.constants.constants_edge import EDGE_LOGS
from src.core.errors import GridError, ImageFormatError
from src.edge_prior import EdgePrior, ImageRGB, extract_edge_prior

logger = logging.getLogger(__name__)


def to_bytes(values):
    """[0, 1] -> [0, 255] with round-half-up."""
    values = np.asarray(values, dtype=np.float64)
    if values.size and (values.min() < 0.0 or values.max() > 1.0):
        raise GridError(DATA_ERRORS.WRITE_RANGE)
    return np.floor(values * 255.0 + 0.5).astype(np.uint8)


def from_bytes(values):
    return np.asarray(values, dtype=np.float64) / 255.0


def _read_pixels(path):
    """Decode a PNG to an (H, W, planes) uint8 array, alpha dropped."""
    try:
        width, height, rows, info = png.Reader(filename=str(path)).asDirect()
        if info['bitdepth'] != 8:
            raise ImageFormatError(DATA_ERRORS.BIT_DEPTH.format(bitdepth=info['bitdepth'], path=path))
        pixels = np.vstack([np.asarray(row, dtype=np.uint8) for row in rows])
    except (png.Error, OSError) as exc:
        raise ImageFormatError(DATA_ERRORS.UNREADABLE.format(path=path, error=exc)) from exc
    pixels = pixels.reshape(height, width, info['planes'])
    color_planes = 1 if info['greyscale'] else 3
    return pixels[:, :, :color_planes]


def read_png(path):
    """Grayscale PNG -> Grid, colour PNG -> ImageRGB."""
    pixels = _read_pixels(path)
    if pixels.shape[2] == 1:
        return from_bytes(pixels[:, :, 0])
    return ImageRGB.from_array(from_bytes(pixels))


def write_png(path, data):
    """Write an ImageRGB as RGB or a Grid as grayscale 8-bit PNG."""
    if isinstance(data, ImageRGB):
        pixels = to_bytes(np.moveaxis(data.as_array(), 0, -1))
        height, width = data.shape
        rows = pixels.reshape(height, width * 3)
        writer = png.Writer(width, height, greyscale=False, bitdepth=8)
    else:
        pixels = to_bytes(data)
        height, width = pixels.shape
        rows = pixels
        writer = png.Writer(width, height, greyscale=True, bitdepth=8)
    with open(path, 'wb') as handle:
        writer.write(handle, rows.tolist())
    logger.debug(DATA_LOGS.PNG_WRITTEN.format(path=path))


def _read_with_pillow(path):
    try:
        with Image.open(path) as image:
            return np.asarray(image.convert('RGB'), dtype=np.uint8)
    except (UnidentifiedImageError, OSError) as exc:
        raise ImageFormatError(DATA_ERRORS.UNREADABLE.format(path=path, error=exc)) from exc


def read_image(path):
    """Any supported input image as ImageRGB (grayscale replicated)."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == '.png':
        data = read_png(path)
        return data if isinstance(data, ImageRGB) else ImageRGB.from_gray(data)
    if suffix in ('.jpg', '.jpeg'):
        return ImageRGB.from_array(from_bytes(_read_with_pillow(path)))
    raise ImageFormatError(DATA_ERRORS.UNSUPPORTED_SUFFIX.format(suffix=suffix, path=path))


def read_gray(path):
    """Single-channel view of a PNG (first channel of colour files), values in [0, 1]."""
    data = read_png(path)
    return data.r.copy() if isinstance(data, ImageRGB) else data


def prior_cache_path(cache_dir, stem, op):
    return Path(cache_dir) / f'{stem}__{op.tag}.png'


def cached_prior(image, op, cache_dir, stem):
    """Extract or load a prior through the 8-bit PNG cache.

    Freshly extracted priors are quantised exactly as stored, so cached and
    uncached runs see the same values.
    """
    path = prior_cache_path(cache_dir, stem, op)
    if path.exists():
        logger.debug(EDGE_LOGS.CACHE_HIT.format(path=path))
        return EdgePrior(read_gray(path), op.tag)
    prior = extract_edge_prior(image, op)
    path.parent.mkdir(parents=True, exist_ok=True)
    write_png(path, prior.values)
    logger.debug(EDGE_LOGS.CACHE_STORE.format(path=path))
    return EdgePrior(from_bytes(to_bytes(prior.values)), op.tag)
