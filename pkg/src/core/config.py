"""JSON experiment configuration: sections map one-to-one onto frozen dataclasses."""
import json
import logging
from dataclasses import asdict, dataclass, field, fields, replace

from src.constants.constants_config import CONFIG_ERRORS, CONFIG_LOGS
from src.constants.constants_data import DATA_ERRORS
from src.core import settings
from src.core.checks import is_integer, is_optional_path
from src.core.errors import ConfigError
from src.data import SyntheticConfig
from src.denoiser import DenoiserConfig
from src.diffusion import DiffusionConfig
from src.edge_prior import EdgeOperator
from src.injection import InjectionConfig
from src.losses import LossCoefficients
from src.trainer import TrainerConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DataConfig:
    root: str = None            # Images/GT layout; synthetic data when None
    count: int = settings.SYNTH_COUNT
    height: int = settings.SYNTH_SIZE
    width: int = settings.SYNTH_SIZE
    delta: float = settings.SYNTH_DELTA
    octaves: int = settings.SYNTH_OCTAVES
    family: str = settings.SHAPE_FAMILIES[0]
    holdout: int = settings.HOLDOUT
    cache_dir: str = None
    workers: int = 1

    def __post_init__(self):
        self.synthetic(0)
        for name, minimum in (('holdout', 0), ('workers', 1)):
            value = getattr(self, name)
            if not is_integer(value) or value < minimum:
                raise ConfigError(DATA_ERRORS.BAD_SYNTHETIC.format(name=name, value=value))
        for name in ('root', 'cache_dir'):
            if not is_optional_path(getattr(self, name)):
                raise ConfigError(DATA_ERRORS.BAD_SYNTHETIC.format(name=name, value=getattr(self, name)))

    def synthetic(self, seed):
        return SyntheticConfig(self.count, self.height, self.width, seed, self.delta, self.octaves, self.family)


@dataclass(frozen=True)
class EdgeConfig:
    operator: str = settings.SOBEL
    sigma: float = None
    low: float = settings.CANNY_LOW
    high: float = settings.CANNY_HIGH

    def __post_init__(self):
        self.to_operator()

    def to_operator(self):
        return EdgeOperator(self.operator, self.sigma, self.low, self.high)


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = 0
    data: DataConfig = field(default_factory=DataConfig)
    edge: EdgeConfig = field(default_factory=EdgeConfig)
    injection: InjectionConfig = field(default_factory=InjectionConfig)
    loss: LossCoefficients = field(default_factory=LossCoefficients)
    denoiser: DenoiserConfig = field(default_factory=DenoiserConfig)
    diffusion: DiffusionConfig = field(default_factory=DiffusionConfig)
    trainer: TrainerConfig = field(default_factory=TrainerConfig)

    def replace(self, **changes):
        return replace(self, **changes)

    @property
    def injection_or_none(self):
        return self.injection if self.injection.enabled else None


SECTIONS = {f.name: f.default_factory for f in fields(ExperimentConfig) if f.name != 'seed'}


def _build_section(name, values):
    cls = SECTIONS[name]
    if not isinstance(values, dict):
        raise ConfigError(CONFIG_ERRORS.NOT_OBJECT.format(section=name))
    known = [f.name for f in fields(cls)]
    for key in values:
        if key not in known:
            raise ConfigError(CONFIG_ERRORS.UNKNOWN_KEY.format(key=key, section=name, choices=', '.join(known)))
    try:
        return cls(**values)
    except (ValueError, TypeError) as exc:
        raise ConfigError(CONFIG_ERRORS.BAD_VALUE.format(section=name, error=exc)) from exc


def config_from_dict(raw):
    if not isinstance(raw, dict):
        raise ConfigError(CONFIG_ERRORS.NOT_OBJECT.format(section='<root>'))
    choices = ['seed'] + list(SECTIONS)
    for key in raw:
        if key not in choices:
            raise ConfigError(CONFIG_ERRORS.UNKNOWN_SECTION.format(section=key, choices=', '.join(choices)))
    seed = raw.get('seed', 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ConfigError(CONFIG_ERRORS.BAD_VALUE.format(section='seed', error=f'seed must be a non-negative integer, got {seed!r}'))
    sections = {name: _build_section(name, raw[name]) for name in SECTIONS if name in raw}
    return ExperimentConfig(seed=seed, **sections)


def parse_config(text, path='<string>'):
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(CONFIG_ERRORS.MALFORMED.format(path=path, line=exc.lineno, column=exc.colno, message=exc.msg)) from exc
    return config_from_dict(raw)


def load_config(path=None):
    """Parse a JSON config file; ``None`` gives the all-defaults configuration."""
    if path is None:
        logger.debug(CONFIG_LOGS.DEFAULTS)
        return ExperimentConfig()
    try:
        with open(path, encoding='utf-8') as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigError(CONFIG_ERRORS.UNREADABLE.format(path=path, error=exc)) from exc
    cfg = parse_config(text, path)
    logger.info(CONFIG_LOGS.LOADED.format(path=path))
    return cfg


def _plain(value):
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def config_to_dict(cfg):
    """Canonical JSON-ready form; ``config_from_dict`` inverts it."""
    return _plain(asdict(cfg))


def write_config(path, cfg):
    with open(path, 'w', encoding='utf-8') as handle:
        json.dump(config_to_dict(cfg), handle, indent=2, sort_keys=True)
        handle.write('\n')
    logger.info(CONFIG_LOGS.WRITTEN.format(path=path))
