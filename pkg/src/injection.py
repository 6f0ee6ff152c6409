"""Parameter-free boundary injection into the stage-1 feature map.

F1~ = F1 + lambda_inj * (1_C x phi(E)), with phi(E) = |K_L * nearest(E)| when
the Laplacian pre-filter is on. Nothing here is learnable, and the prior is
a constant of the graph: no gradient flows through the injection path.
"""
from dataclasses import dataclass

import numpy as np

from src import grid
from src.autodiff import Value
from src.constants.constants_edge import EDGE_ERRORS
from src.core import settings
from src.core.checks import is_real
from src.core.errors import ConfigError, GridError
from src.edge_prior import prior_values


@dataclass(frozen=True)
class InjectionConfig:
    lambda_inj: float = settings.LAMBDA_INJ
    laplacian_prefilter: bool = settings.LAPLACIAN_PREFILTER
    enabled: bool = True

    def __post_init__(self):
        if not is_real(self.lambda_inj) or self.lambda_inj < 0:
            raise ConfigError(EDGE_ERRORS.NEGATIVE_LAMBDA.format(value=self.lambda_inj))
        for name in ('laplacian_prefilter', 'enabled'):
            if not isinstance(getattr(self, name), bool):
                raise ConfigError(EDGE_ERRORS.NOT_BOOLEAN.format(name=name, value=getattr(self, name)))


def sharpen_prior(e, height, width, laplacian_prefilter=True):
    """Rescale E to height x width (nearest), then optionally |K_L * .|."""
    rescaled = grid.resize_nearest(prior_values(e), height, width)
    if not laplacian_prefilter:
        return rescaled
    return np.abs(grid.conv2d_same(rescaled, grid.LAPLACIAN))


def broadcast_prior(phi, channels):
    if channels < 1:
        raise GridError(EDGE_ERRORS.BAD_CHANNELS.format(channels=channels))
    phi = np.asarray(phi, dtype=np.float64)
    return np.broadcast_to(phi, (channels,) + phi.shape).copy()


def injection_map(e, channels, height, width, cfg):
    """lambda_inj * Pi(E) at the feature resolution."""
    phi = sharpen_prior(e, height, width, cfg.laplacian_prefilter)
    return cfg.lambda_inj * broadcast_prior(phi, channels)


def inject(f1, e, cfg):
    """Add the scaled prior to a C x H' x W' feature map (ndarray or Value)."""
    if not cfg.enabled:
        return f1
    channels, height, width = (f1.data if isinstance(f1, Value) else np.asarray(f1)).shape
    if channels < 1:
        raise GridError(EDGE_ERRORS.BAD_CHANNELS.format(channels=channels))
    return f1 + injection_map(e, channels, height, width, cfg)
