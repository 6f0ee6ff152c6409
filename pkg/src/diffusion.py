"""Mask-space diffusion: cosine noise schedule, forward corruption, x0 sampler."""
import logging
from dataclasses import dataclass

import numpy as np

from src import grid
from src.autodiff import stable_sigmoid, unwrap
from src.constants.constants_train import DIFFUSION_ERRORS, DIFFUSION_LOGS
from src.core import settings
from src.core.checks import is_integer
from src.core.errors import ConfigError, GridError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DiffusionConfig:
    timesteps: int = settings.TIMESTEPS
    sampling_steps: int = settings.SAMPLING_STEPS

    def __post_init__(self):
        if not is_integer(self.timesteps) or self.timesteps < 1:
            raise ConfigError(DIFFUSION_ERRORS.BAD_T.format(T=self.timesteps))
        if not is_integer(self.sampling_steps) or not 1 <= self.sampling_steps <= self.timesteps:
            raise ConfigError(DIFFUSION_ERRORS.BAD_STEPS.format(T=self.timesteps, steps=self.sampling_steps))


@dataclass(frozen=True)
class NoiseSchedule:
    """alpha_bar[t - 1] holds the cumulative signal fraction at step t."""

    alpha_bar: np.ndarray

    @property
    def T(self):
        return len(self.alpha_bar)

    def at(self, t):
        self.check_timestep(t)
        return float(self.alpha_bar[t - 1])

    def check_timestep(self, t):
        if not 1 <= t <= self.T:
            raise GridError(DIFFUSION_ERRORS.T_RANGE.format(t=t, T=self.T))


@dataclass
class DiffusionState:
    x_t: np.ndarray
    t: int


def make_schedule(T=settings.TIMESTEPS, s=settings.COSINE_OFFSET):
    """Cosine schedule squeezed affinely into (margin, 1 - margin)."""
    if T < 1:
        raise ConfigError(DIFFUSION_ERRORS.BAD_T.format(T=T))

    def f(t):
        return np.cos((t / T + s) / (1.0 + s) * np.pi / 2.0) ** 2

    raw = f(np.arange(1, T + 1, dtype=np.float64)) / f(0.0)
    margin = settings.ALPHA_BAR_MARGIN
    alpha_bar = margin + (1.0 - 2.0 * margin) * np.clip(raw, 0.0, 1.0)
    alpha_bar.setflags(write=False)
    return NoiseSchedule(alpha_bar)


def forward_corrupt(y, t, schedule, rng=None):
    """x_t = sqrt(a_t) (2y - 1) + sqrt(1 - a_t) n with n ~ N(0, 1)."""
    y = grid.as_grid(y, name='mask')
    if not np.all((y == 0.0) | (y == 1.0)):
        raise GridError(DIFFUSION_ERRORS.NON_BINARY)
    a = schedule.at(t)
    noise = np.random.default_rng(rng).standard_normal(y.shape)
    return DiffusionState(np.sqrt(a) * (2.0 * y - 1.0) + np.sqrt(1.0 - a) * noise, t)


def sampling_timesteps(T, steps):
    if not 1 <= steps <= T:
        raise GridError(DIFFUSION_ERRORS.BAD_STEPS.format(T=T, steps=steps))
    ts = np.round(np.linspace(T, 1, steps)).astype(int)
    # keep first occurrences, order stays descending
    _, first = np.unique(ts, return_index=True)
    return [int(t) for t in ts[np.sort(first)]]


def sample(denoiser, image, prior, schedule, steps=settings.SAMPLING_STEPS, seed=None, injection=None):
    """Deterministic clipped x0-prediction sampler; returns sigma(z) of the last step."""
    timesteps = sampling_timesteps(schedule.T, steps)
    logger.debug(DIFFUSION_LOGS.SAMPLE_START.format(steps=len(timesteps), first=timesteps[0], last=timesteps[-1]))
    x = np.random.default_rng(seed).standard_normal(image.shape)
    probabilities = None
    for index, t in enumerate(timesteps):
        logits = unwrap(denoiser.forward(x, image, prior, t, injection))
        probabilities = stable_sigmoid(logits)
        if index == len(timesteps) - 1:
            break
        x0 = np.clip(2.0 * probabilities - 1.0, -1.0, 1.0)
        a_t = schedule.at(t)
        a_next = schedule.at(timesteps[index + 1])
        eps = (x - np.sqrt(a_t) * x0) / np.sqrt(1.0 - a_t)
        x = np.sqrt(a_next) * x0 + np.sqrt(1.0 - a_next) * eps
    return probabilities
