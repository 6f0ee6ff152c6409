"""Tiny hierarchical conditional denoiser f(x_t, I, t) -> logits.

Stage 1 is a stride-2 convolutional embedding of [x_t, gray(I)]; its
pre-activation feature map is where the edge prior is injected. Further
stride-2 stages follow, and a bilinear-upsampling decoder with additive
skips returns one logit per input pixel.
"""
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np

from src import grid
from src.autodiff import conv2d, linear, parameter, reshape, resize_bilinear, silu
from src.constants.constants_train import DIFFUSION_ERRORS
from src.core import settings
from src.core.checks import is_integer
from src.core.errors import ConfigError, ShapeMismatchError
from src.edge_prior import ImageRGB, prior_values, to_grayscale
from src.injection import inject

INPUT_CHANNELS = 2  # x_t and grayscale image
KERNEL = 3


@dataclass(frozen=True)
class DenoiserConfig:
    widths: tuple = settings.STAGE_WIDTHS
    time_dim: int = settings.TIME_EMBED_DIM

    def __post_init__(self):
        object.__setattr__(self, 'widths', tuple(self.widths))
        if not 2 <= len(self.widths) <= 4 or not all(is_integer(w) and w >= 1 for w in self.widths):
            raise ConfigError(DIFFUSION_ERRORS.BAD_WIDTHS.format(widths=self.widths))
        if not is_integer(self.time_dim) or self.time_dim < 2 or self.time_dim % 2:
            raise ConfigError(DIFFUSION_ERRORS.BAD_EMBED.format(dim=self.time_dim))


def timestep_embedding(t, dim):
    """Sinusoidal embedding [sin(t w_k), cos(t w_k)] with geometric frequencies."""
    half = dim // 2
    freqs = np.exp(-np.log(10000.0) * np.arange(half) / half)
    args = float(t) * freqs
    return np.concatenate([np.sin(args), np.cos(args)])


def _he_normal(rng, shape, fan_in):
    return rng.standard_normal(shape) * np.sqrt(2.0 / fan_in)


class Denoiser:
    def __init__(self, config=None, seed=0):
        self.config = config or DenoiserConfig()
        self.seed = seed
        self.params = self._init_params(np.random.default_rng(seed))

    def _init_params(self, rng):
        widths, time_dim = self.config.widths, self.config.time_dim
        params = OrderedDict()
        c_in = INPUT_CHANNELS
        for i, width in enumerate(widths, start=1):
            params[f'stage{i}.weight'] = _he_normal(rng, (width, c_in, KERNEL, KERNEL), c_in * KERNEL * KERNEL)
            params[f'stage{i}.bias'] = np.zeros(width)
            params[f'stage{i}.time'] = _he_normal(rng, (width, time_dim), time_dim)
            c_in = width
        for i in range(len(widths) - 1, 0, -1):
            fan_in = widths[i] * KERNEL * KERNEL
            params[f'decoder{i}.weight'] = _he_normal(rng, (widths[i - 1], widths[i], KERNEL, KERNEL), fan_in)
            params[f'decoder{i}.bias'] = np.zeros(widths[i - 1])
        params['head.weight'] = _he_normal(rng, (1, widths[0], KERNEL, KERNEL), widths[0] * KERNEL * KERNEL)
        params['head.bias'] = np.zeros(1)
        return OrderedDict((name, parameter(value)) for name, value in params.items())

    def parameters(self):
        return list(self.params.values())

    def named_parameters(self):
        return list(self.params.items())

    def param_count(self):
        return int(sum(p.data.size for p in self.params.values()))

    def state_dict(self):
        return OrderedDict((name, p.data.copy()) for name, p in self.params.items())

    def load_state_dict(self, state):
        for name in state:
            if name not in self.params:
                raise ConfigError(DIFFUSION_ERRORS.UNEXPECTED_PARAM.format(name=name))
        for name, p in self.params.items():
            if name not in state:
                raise ConfigError(DIFFUSION_ERRORS.MISSING_PARAM.format(name=name))
            value = np.asarray(state[name], dtype=np.float64)
            if value.shape != p.data.shape:
                raise ConfigError(DIFFUSION_ERRORS.PARAM_SHAPE.format(name=name, expected=p.data.shape, actual=value.shape))
            p.data = value.copy()

    def _stage(self, index, x, emb, stride=2):
        p = self.params
        h = conv2d(x, p[f'stage{index}.weight'], p[f'stage{index}.bias'], stride=stride)
        channels = h.data.shape[0]
        return h + reshape(linear(p[f'stage{index}.time'], emb), (channels, 1, 1))

    def forward(self, x_t, image, prior, t, injection=None):
        """Logits z (H x W Value) for the clean mask; injection=None disables the prior path."""
        gray = to_grayscale(image) if isinstance(image, ImageRGB) else grid.as_grid(image, name='image')
        x_t = grid.as_grid(x_t, name='x_t')
        active = injection is not None and injection.enabled
        if gray.shape != x_t.shape or (active and prior_values(prior).shape != x_t.shape):
            raise ShapeMismatchError(DIFFUSION_ERRORS.INPUT_SHAPE.format(
                x_shape=x_t.shape, image_shape=gray.shape,
                prior_shape=None if prior is None else prior_values(prior).shape))
        height, width = x_t.shape
        emb = timestep_embedding(t, self.config.time_dim)

        f1 = self._stage(1, np.stack([x_t, gray]), emb)
        if active:
            f1 = inject(f1, prior, injection)
        skips = [silu(f1)]
        for index in range(2, len(self.config.widths) + 1):
            skips.append(silu(self._stage(index, skips[-1], emb)))

        h = skips[-1]
        for index in range(len(self.config.widths) - 1, 0, -1):
            skip = skips[index - 1]
            up = resize_bilinear(h, *skip.data.shape[1:])
            up = conv2d(up, self.params[f'decoder{index}.weight'], self.params[f'decoder{index}.bias'])
            h = silu(up + skip)
        h = resize_bilinear(h, height, width)
        logits = conv2d(h, self.params['head.weight'], self.params['head.bias'])
        return reshape(logits, (height, width))

    __call__ = forward


def denoiser_forward(denoiser, x_t, image, prior, t, injection=None):
    return denoiser.forward(x_t, image, prior, t, injection)
