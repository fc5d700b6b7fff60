"""
Versioned model checkpoints.

A checkpoint is a zip archive of .npy members (one per parameter) plus a
meta.json member. Member order and timestamps are fixed, so identical
parameters always produce byte-identical files.
"""

from __future__ import annotations

import io
import json
import logging
import os
import zipfile
from pathlib import Path

import numpy as np

from utils.constants import CHECKPOINT_FORMAT_VERSION, CHECKPOINT_ZIP_DATE
from utils.fileio import atomic_write_bytes
from utils.network.model import VariantFlags
from utils.network.params import NetworkParams
from utils.validation import DataError

logger = logging.getLogger('depts.checkpoint')

META_MEMBER = 'meta.json'


def _member(name: str) -> zipfile.ZipInfo:
    info = zipfile.ZipInfo(name, date_time=CHECKPOINT_ZIP_DATE)
    info.compress_type = zipfile.ZIP_DEFLATED
    info.external_attr = 0o644 << 16
    return info


def write_archive(path: str | os.PathLike, arrays: dict[str, np.ndarray], meta: dict) -> Path:
    """Write arrays and a metadata document as a deterministic zip."""
    buffer = io.BytesIO()
    with zipfile.ZipFile(buffer, 'w') as archive:
        archive.writestr(_member(META_MEMBER), json.dumps(meta, indent=2, sort_keys=True))
        for name in sorted(arrays):
            payload = io.BytesIO()
            np.lib.format.write_array(payload, np.ascontiguousarray(arrays[name]), allow_pickle=False)
            archive.writestr(_member(f'{name}.npy'), payload.getvalue())
    return atomic_write_bytes(path, buffer.getvalue())


def read_archive(path: str | os.PathLike) -> tuple[dict[str, np.ndarray], dict]:
    """Read back (arrays, meta) written by write_archive."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"Checkpoint not found: {path}")
    try:
        with zipfile.ZipFile(path) as archive:
            meta = json.loads(archive.read(META_MEMBER).decode('utf-8'))
            arrays = {}
            for name in archive.namelist():
                if not name.endswith('.npy'):
                    continue
                with archive.open(name) as member:
                    arrays[name[:-4]] = np.lib.format.read_array(
                        io.BytesIO(member.read()), allow_pickle=False
                    )
    except (zipfile.BadZipFile, KeyError, ValueError) as e:
        raise DataError(f"Unreadable checkpoint {path}: {e}") from e
    return arrays, meta


def save_checkpoint(
    path: str | os.PathLike,
    params: NetworkParams,
    flags: VariantFlags,
    extra_arrays: dict[str, np.ndarray] | None = None,
    meta: dict | None = None,
) -> Path:
    """Write network weights, flags and optional extra state."""
    arrays = {f'network/{k}': v for k, v in params.to_arrays().items()}
    for name, arr in (extra_arrays or {}).items():
        arrays[f'extra/{name}'] = arr
    document = {
        'version': CHECKPOINT_FORMAT_VERSION,
        'lookback': params.lookback,
        'horizon': params.horizon,
        'width': params.width,
        'layers': params.depth,
        'n_series': params.n_series,
        'flags': flags.to_dict(),
        'meta': meta or {},
    }
    target = write_archive(path, arrays, document)
    logger.info(f"Saved checkpoint to {target}")
    return target


def load_checkpoint(path: str | os.PathLike) -> tuple[NetworkParams, VariantFlags, dict[str, np.ndarray], dict]:
    """Inverse of save_checkpoint: (params, flags, extra_arrays, meta)."""
    arrays, document = read_archive(path)
    version = document.get('version')
    if version != CHECKPOINT_FORMAT_VERSION:
        raise DataError(f"Unsupported checkpoint version {version!r} in {path}")

    network = {k[len('network/'):]: v for k, v in arrays.items() if k.startswith('network/')}
    extra = {k[len('extra/'):]: v for k, v in arrays.items() if k.startswith('extra/')}
    try:
        params = NetworkParams.from_arrays(network, document['lookback'], document['horizon'], document['width'])
    except KeyError as e:
        raise DataError(f"Checkpoint {path} is missing {e}") from e
    return params, VariantFlags.from_dict(document.get('flags', {})), extra, document.get('meta', {})
