"""Checkpoint persistence for model parameters."""

import json
import logging
import os
from typing import Optional, Dict, Any

import numpy as np

from ..models.graph import Dictionary
from ..models.parameters import ModelParameters
from ..utils.errors import CheckpointError
from ..utils.validators import MODEL_KINDS

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
MANIFEST = 'manifest'
ENTITIES_FILE = 'entities.vec'
RELATIONS_FILE = 'relations.vec'
CONVKB_FILE = 'convkb.vec'


def _write_vec(path: str, array: np.ndarray) -> None:
    with open(path, 'wb') as handle:
        handle.write(np.ascontiguousarray(array, dtype='<f8').tobytes())


def _read_vec(path: str, shape: tuple) -> np.ndarray:
    try:
        with open(path, 'rb') as handle:
            data = handle.read()
    except FileNotFoundError:
        raise CheckpointError(f"{path}: missing checkpoint file")
    expected = int(np.prod(shape)) * 8
    if len(data) != expected:
        raise CheckpointError(f"{path}: expected {expected} bytes, found {len(data)}")
    return np.frombuffer(data, dtype='<f8').astype(np.float64).reshape(shape)


def save_checkpoint(params: ModelParameters, directory: str,
                    entities: Optional[Dictionary] = None, relations: Optional[Dictionary] = None) -> None:
    """
    Write the manifest and little-endian float64 tensors to a directory.

    Args:
        params: Parameters to persist
        directory: Checkpoint directory (created if absent)
        entities: Entity dictionary whose checksum is recorded
        relations: Relation dictionary whose checksum is recorded
    """
    os.makedirs(directory, exist_ok=True)
    manifest: Dict[str, Any] = {
        'format_version': FORMAT_VERSION,
        'model_kind': params.kind,
        'k': params.k,
        'num_filters': params.num_filters,
        'num_entities': params.num_entities,
        'num_relations': params.num_relations,
        'seed': params.seed,
        'transe_norm': params.transe_norm,
        'entities_checksum': entities.checksum() if entities is not None else None,
        'relations_checksum': relations.checksum() if relations is not None else None
    }
    with open(os.path.join(directory, MANIFEST), 'w', encoding='utf-8') as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
        handle.write('\n')

    _write_vec(os.path.join(directory, ENTITIES_FILE), params.entities)
    _write_vec(os.path.join(directory, RELATIONS_FILE), params.relations)
    if params.kind == 'convkb':
        _write_vec(os.path.join(directory, CONVKB_FILE),
                   np.concatenate([params.filters.reshape(-1), params.bias, params.dense]))
    logger.info("Saved %s checkpoint to %s", params.kind, directory)


def load_checkpoint(directory: str, entities: Optional[Dictionary] = None,
                    relations: Optional[Dictionary] = None) -> ModelParameters:
    """
    Read a checkpoint, verifying dictionary checksums when dictionaries are supplied.

    Raises:
        CheckpointError: on a missing or malformed manifest, truncated tensors or
            checksum mismatch
    """
    path = os.path.join(directory, MANIFEST)
    try:
        with open(path, 'r', encoding='utf-8') as handle:
            manifest = json.load(handle)
    except FileNotFoundError:
        raise CheckpointError(f"{path}: missing manifest")
    except json.JSONDecodeError as e:
        raise CheckpointError(f"{path}: malformed manifest ({e.msg})")

    if manifest.get('format_version') != FORMAT_VERSION:
        raise CheckpointError(f"{path}: unsupported format version {manifest.get('format_version')!r}")
    kind = manifest.get('model_kind')
    if kind not in MODEL_KINDS:
        raise CheckpointError(f"{path}: unknown model kind {kind!r}")

    for name, dictionary in (('entities', entities), ('relations', relations)):
        recorded = manifest.get(f'{name}_checksum')
        if dictionary is not None and recorded is not None and recorded != dictionary.checksum():
            raise CheckpointError(f"{path}: {name} dictionary does not match the checkpoint")

    try:
        k = int(manifest['k'])
        num_entities = int(manifest['num_entities'])
        num_relations = int(manifest['num_relations'])
        num_filters = int(manifest.get('num_filters', 0))
    except (KeyError, TypeError, ValueError):
        raise CheckpointError(f"{path}: manifest lacks dimensions")

    width = 2 * k if kind == 'complex' else k
    params = ModelParameters(
        kind=kind,
        k=k,
        entities=_read_vec(os.path.join(directory, ENTITIES_FILE), (num_entities, width)),
        relations=_read_vec(os.path.join(directory, RELATIONS_FILE), (num_relations, width)),
        transe_norm=int(manifest.get('transe_norm', 1)),
        seed=int(manifest.get('seed', 0))
    )
    if kind == 'convkb':
        flat = _read_vec(os.path.join(directory, CONVKB_FILE), (num_filters * 3 + num_filters + num_filters * k,))
        params.filters = flat[:num_filters * 3].reshape(num_filters, 3).copy()
        params.bias = flat[num_filters * 3:num_filters * 4].copy()
        params.dense = flat[num_filters * 4:].copy()
    if not params.is_finite():
        raise CheckpointError(f"{directory}: checkpoint holds non-finite values")
    return params
