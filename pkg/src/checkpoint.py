"""Single-file binary checkpoints.

Layout (little-endian)::

    header   magic(4s) version(H) payload_length(Q) md5[:4](4s)
    payload  meta_length(I) meta(JSON, utf-8)
             count(I) then per array:
             name_length(H) name(utf-8) ndim(B) dims(ndim x I) data(f8 x prod(dims))

Arrays are the denoiser parameters (``param/<name>``), the optimizer
moments (``adam_m/<name>``, ``adam_v/<name>``) and the schedule
(``alpha_bar``).
"""
import hashlib
import json
import logging
import struct
from dataclasses import dataclass, field

import numpy as np

from src.constants.constants_ckpt import CKPT_ERRORS, CKPT_LOGS
from src.core import settings
from src.core.errors import CheckpointError
from src.denoiser import Denoiser, DenoiserConfig

logger = logging.getLogger(__name__)

HEADER_FORMAT = '<4sHQ4s'
HEADER_SIZE = struct.calcsize(HEADER_FORMAT)


@dataclass
class Checkpoint:
    meta: dict
    params: dict
    adam_m: dict = field(default_factory=dict)
    adam_v: dict = field(default_factory=dict)
    alpha_bar: np.ndarray = None

    def optimizer_state(self):
        return {'step': self.meta.get('optimizer_step', 0), 'm': self.adam_m, 'v': self.adam_v}


def calculate_checksum(data):
    return hashlib.md5(data).digest()[:4]


def _pack_array(name, array):
    array = np.ascontiguousarray(array, dtype='<f8')
    encoded = name.encode('utf-8')
    parts = [struct.pack('<H', len(encoded)), encoded, struct.pack('<B', array.ndim)]
    parts.append(struct.pack(f'<{array.ndim}I', *array.shape))
    parts.append(array.tobytes())
    return b''.join(parts)


def _unpack_array(payload, offset):
    (name_length,) = struct.unpack_from('<H', payload, offset)
    offset += 2
    name = payload[offset:offset + name_length].decode('utf-8')
    offset += name_length
    (ndim,) = struct.unpack_from('<B', payload, offset)
    offset += 1
    shape = struct.unpack_from(f'<{ndim}I', payload, offset)
    offset += 4 * ndim
    size = int(np.prod(shape, dtype=np.int64)) * 8
    if offset + size > len(payload):
        raise CheckpointError(CKPT_ERRORS.CORRUPT.format(error=f'array {name} truncated'))
    array = np.frombuffer(payload, dtype='<f8', count=size // 8, offset=offset).reshape(shape).astype(np.float64)
    return name, array, offset + size


def create_checkpoint(meta, arrays):
    """Serialise ``meta`` (JSON-able) and named float arrays into checkpoint bytes."""
    meta_bytes = json.dumps(meta, sort_keys=True).encode('utf-8')
    body = [struct.pack('<I', len(meta_bytes)), meta_bytes, struct.pack('<I', len(arrays))]
    body.extend(_pack_array(name, array) for name, array in arrays.items())
    payload = b''.join(body)
    header = struct.pack(HEADER_FORMAT, settings.CHECKPOINT_MAGIC, settings.CHECKPOINT_VERSION,
                         len(payload), calculate_checksum(payload))
    return header + payload


def parse_checkpoint(data, path='<bytes>'):
    """Inverse of :func:`create_checkpoint`; returns (version, meta, {name: array})."""
    if len(data) < HEADER_SIZE:
        raise CheckpointError(CKPT_ERRORS.TOO_SMALL.format(size=len(data), expected=HEADER_SIZE))
    magic, version, payload_length, checksum = struct.unpack(HEADER_FORMAT, data[:HEADER_SIZE])
    if magic != settings.CHECKPOINT_MAGIC:
        raise CheckpointError(CKPT_ERRORS.BAD_MAGIC.format(magic=magic))
    if version != settings.CHECKPOINT_VERSION:
        raise CheckpointError(CKPT_ERRORS.BAD_VERSION.format(version=version, expected=settings.CHECKPOINT_VERSION))
    payload = data[HEADER_SIZE:]
    if len(payload) != payload_length:
        raise CheckpointError(CKPT_ERRORS.INCOMPLETE.format(expected=payload_length, actual=len(payload)))
    if calculate_checksum(payload) != checksum:
        raise CheckpointError(CKPT_ERRORS.CHECKSUM.format(path=path))
    try:
        (meta_length,) = struct.unpack_from('<I', payload, 0)
        meta = json.loads(payload[4:4 + meta_length].decode('utf-8'))
        offset = 4 + meta_length
        (count,) = struct.unpack_from('<I', payload, offset)
        offset += 4
        arrays = {}
        for _ in range(count):
            name, array, offset = _unpack_array(payload, offset)
            arrays[name] = array
    except (struct.error, UnicodeDecodeError, json.JSONDecodeError, ValueError) as exc:
        if isinstance(exc, CheckpointError):
            raise
        raise CheckpointError(CKPT_ERRORS.CORRUPT.format(error=exc)) from exc
    return version, meta, arrays


def save_checkpoint(path, denoiser, optimizer=None, schedule=None, meta=None):
    meta = dict(meta or {})
    meta['denoiser'] = {'widths': list(denoiser.config.widths), 'time_dim': denoiser.config.time_dim}
    arrays = {f'param/{name}': value for name, value in denoiser.state_dict().items()}
    if optimizer is not None:
        state = optimizer.state_dict()
        meta['optimizer_step'] = state['step']
        arrays.update({f'adam_m/{name}': value for name, value in state['m'].items()})
        arrays.update({f'adam_v/{name}': value for name, value in state['v'].items()})
    if schedule is not None:
        arrays['alpha_bar'] = schedule.alpha_bar
    data = create_checkpoint(meta, arrays)
    with open(path, 'wb') as handle:
        handle.write(data)
    logger.info(CKPT_LOGS.SAVED.format(arrays=len(arrays), size=len(data), path=path))


def load_checkpoint(path):
    try:
        with open(path, 'rb') as handle:
            data = handle.read()
    except OSError as exc:
        raise CheckpointError(CKPT_ERRORS.UNREADABLE.format(path=path, error=exc)) from exc
    version, meta, arrays = parse_checkpoint(data, path)
    groups = {'param': {}, 'adam_m': {}, 'adam_v': {}}
    alpha_bar = None
    for name, array in arrays.items():
        prefix, _, rest = name.partition('/')
        if prefix in groups:
            groups[prefix][rest] = array
        elif name == 'alpha_bar':
            alpha_bar = array
    logger.info(CKPT_LOGS.LOADED.format(path=path, version=version))
    return Checkpoint(meta, groups['param'], groups['adam_m'], groups['adam_v'], alpha_bar)


def restore_denoiser(ckpt):
    """Rebuild the denoiser a checkpoint was saved from."""
    arch = ckpt.meta.get('denoiser', {})
    denoiser = Denoiser(DenoiserConfig(tuple(arch.get('widths', settings.STAGE_WIDTHS)),
                                       arch.get('time_dim', settings.TIME_EMBED_DIM)))
    denoiser.load_state_dict(ckpt.params)
    return denoiser
