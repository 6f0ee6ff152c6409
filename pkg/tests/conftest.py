import numpy as np
import pytest

from src.core.config import DataConfig, ExperimentConfig
from src.denoiser import DenoiserConfig
from src.diffusion import DiffusionConfig
from src.losses import LossCoefficients
from src.trainer import TrainerConfig


def _numeric_gradient(f, x, h=1e-5):
    """Central differences of scalar f at float64 array x (x is restored)."""
    grad = np.zeros_like(x)
    for idx in np.ndindex(x.shape):
        original = x[idx]
        x[idx] = original + h
        plus = f(x)
        x[idx] = original - h
        minus = f(x)
        x[idx] = original
        grad[idx] = (plus - minus) / (2 * h)
    return grad


def _relative_error(analytic, numeric):
    scale = np.linalg.norm(analytic) + np.linalg.norm(numeric)
    if scale == 0:
        return 0.0
    return np.linalg.norm(analytic - numeric) / scale


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def numeric_gradient():
    return _numeric_gradient


@pytest.fixture
def relative_error():
    return _relative_error


@pytest.fixture
def step_image():
    """6x6 vertical step: left half 0, right half 1."""
    g = np.zeros((6, 6))
    g[:, 3:] = 1.0
    return g


@pytest.fixture
def impulse():
    g = np.zeros((3, 3))
    g[1, 1] = 1.0
    return g


@pytest.fixture
def tiny_denoiser_config():
    return DenoiserConfig(widths=(2, 3), time_dim=4)


@pytest.fixture
def tiny_experiment():
    """A configuration small enough for end-to-end runs in a test."""
    return ExperimentConfig(
        seed=3,
        data=DataConfig(count=6, height=12, width=12, holdout=2),
        loss=LossCoefficients(pool_k=5),
        denoiser=DenoiserConfig(widths=(2, 3), time_dim=4),
        diffusion=DiffusionConfig(timesteps=20, sampling_steps=3),
        trainer=TrainerConfig(learning_rate=1e-3, epochs=1, batch_size=2),
    )
