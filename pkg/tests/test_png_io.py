import numpy as np
import png
import pytest
from PIL import Image

from src.core.errors import GridError, ImageFormatError
from src.edge_prior import EdgeOperator, ImageRGB, extract_edge_prior
from src.png_io import (cached_prior, from_bytes, prior_cache_path, read_gray, read_image, read_png, to_bytes,
                        write_png)


def write_raw(path, rows, greyscale=True, bitdepth=8):
    height, width = len(rows), len(rows[0]) // (1 if greyscale else 3)
    with open(path, 'wb') as handle:
        png.Writer(width, height, greyscale=greyscale, bitdepth=bitdepth).write(handle, rows)


class TestByteMapping:
    def test_round_half_up(self):
        assert to_bytes(np.array([0.0, 0.5, 1.0])).tolist() == [0, 128, 255]

    def test_out_of_range(self):
        with pytest.raises(GridError):
            to_bytes(np.array([1.2]))

    def test_lossless_on_byte_values(self):
        values = np.arange(256)
        assert np.array_equal(to_bytes(from_bytes(values)), values)


class TestPng:
    def test_gray_round_trip(self, tmp_path, rng):
        grid = from_bytes(rng.integers(0, 256, (7, 9)))
        write_png(tmp_path / 'g.png', grid)
        assert np.array_equal(read_png(tmp_path / 'g.png'), grid)

    def test_rgb_round_trip(self, tmp_path, rng):
        image = ImageRGB.from_array(from_bytes(rng.integers(0, 256, (3, 5, 6))))
        write_png(tmp_path / 'c.png', image)
        loaded = read_png(tmp_path / 'c.png')
        assert isinstance(loaded, ImageRGB)
        assert np.array_equal(loaded.as_array(), image.as_array())

    def test_white_is_one(self, tmp_path):
        write_raw(tmp_path / 'w.png', [[255, 0], [0, 255]])
        assert read_png(tmp_path / 'w.png').tolist() == [[1.0, 0.0], [0.0, 1.0]]

    def test_sixteen_bit_rejected(self, tmp_path):
        write_raw(tmp_path / 'deep.png', [[0, 65535]], bitdepth=16)
        with pytest.raises(ImageFormatError, match='bit depth 16'):
            read_png(tmp_path / 'deep.png')

    def test_malformed_file(self, tmp_path):
        path = tmp_path / 'broken.png'
        path.write_bytes(b'not a png at all')
        with pytest.raises(ImageFormatError):
            read_png(path)

    def test_gray_read_of_colour_file(self, tmp_path):
        write_raw(tmp_path / 'c.png', [[255, 0, 0, 0, 0, 255]], greyscale=False)
        assert read_gray(tmp_path / 'c.png').tolist() == [[1.0, 0.0]]


class TestReadImage:
    def test_gray_png_is_replicated(self, tmp_path):
        write_raw(tmp_path / 'g.png', [[0, 51]])
        image = read_image(tmp_path / 'g.png')
        assert np.array_equal(image.r, image.b)
        assert image.g[0, 1] == pytest.approx(0.2)

    def test_jpeg(self, tmp_path):
        Image.new('RGB', (4, 3), (255, 255, 255)).save(tmp_path / 'white.jpg')
        image = read_image(tmp_path / 'white.jpg')
        assert image.shape == (3, 4)
        assert image.r.min() > 0.95

    def test_unsupported_suffix(self, tmp_path):
        path = tmp_path / 'x.bmp'
        path.write_bytes(b'')
        with pytest.raises(ImageFormatError):
            read_image(path)


class TestPriorCache:
    def test_cache_path_names_operator(self, tmp_path):
        assert prior_cache_path(tmp_path, 'cat', EdgeOperator('log')).name == 'cat__log_s1.4.png'

    def test_cached_and_fresh_agree(self, tmp_path, rng):
        image = ImageRGB.from_array(rng.random((3, 10, 10)))
        op = EdgeOperator('sobel')
        fresh = cached_prior(image, op, tmp_path, 'img')
        assert prior_cache_path(tmp_path, 'img', op).exists()
        cached = cached_prior(image, op, tmp_path, 'img')
        assert np.array_equal(fresh.values, cached.values)
        assert np.abs(fresh.values - extract_edge_prior(image, op).values).max() <= 0.5 / 255 + 1e-12
