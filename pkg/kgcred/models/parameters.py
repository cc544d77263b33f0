"""Embedding parameter containers."""

from typing import Dict, Optional, Any
from dataclasses import dataclass

import numpy as np

from ..utils.errors import KGCredError
from ..utils.validators import MODEL_KINDS

DEFAULT_NUM_FILTERS = 24


@dataclass
class ModelParameters:
    """
    Entity and relation embeddings of one model.

    ComplEx rows hold the real half followed by the imaginary half (width 2k).
    HolE reads its relation rows as the correlation weights w_r. ConvKB adds
    per-filter weights (num_filters x 3), a per-filter bias and a dense
    vector of length num_filters * k.
    """

    kind: str
    k: int
    entities: np.ndarray
    relations: np.ndarray
    filters: Optional[np.ndarray] = None
    bias: Optional[np.ndarray] = None
    dense: Optional[np.ndarray] = None
    transe_norm: int = 1
    seed: int = 0

    @property
    def width(self) -> int:
        return 2 * self.k if self.kind == 'complex' else self.k

    @property
    def num_entities(self) -> int:
        return self.entities.shape[0]

    @property
    def num_relations(self) -> int:
        return self.relations.shape[0]

    @property
    def num_filters(self) -> int:
        return 0 if self.filters is None else self.filters.shape[0]

    def copy(self) -> 'ModelParameters':
        return ModelParameters(
            kind=self.kind,
            k=self.k,
            entities=self.entities.copy(),
            relations=self.relations.copy(),
            filters=None if self.filters is None else self.filters.copy(),
            bias=None if self.bias is None else self.bias.copy(),
            dense=None if self.dense is None else self.dense.copy(),
            transe_norm=self.transe_norm,
            seed=self.seed
        )

    def is_finite(self) -> bool:
        tensors = [self.entities, self.relations, self.filters, self.bias, self.dense]
        return all(np.all(np.isfinite(tensor)) for tensor in tensors if tensor is not None)

    def equals(self, other: 'ModelParameters') -> bool:
        """Bit-identical comparison of every tensor."""
        if (self.kind, self.k, self.transe_norm) != (other.kind, other.k, other.transe_norm):
            return False
        pairs = [(self.entities, other.entities), (self.relations, other.relations),
                 (self.filters, other.filters), (self.bias, other.bias), (self.dense, other.dense)]
        for left, right in pairs:
            if (left is None) != (right is None):
                return False
            if left is not None and (left.shape != right.shape or left.tobytes() != right.tobytes()):
                return False
        return True

    def to_dict(self) -> Dict[str, Any]:
        return {
            'kind': self.kind,
            'k': self.k,
            'num_entities': self.num_entities,
            'num_relations': self.num_relations,
            'num_filters': self.num_filters,
            'transe_norm': self.transe_norm,
            'seed': self.seed
        }


@dataclass
class Gradient:
    """Gradient rows aggregated per touched id, plus dense ConvKB tensors."""

    entity_ids: np.ndarray
    entity_rows: np.ndarray
    relation_ids: np.ndarray
    relation_rows: np.ndarray
    filters: Optional[np.ndarray] = None
    bias: Optional[np.ndarray] = None
    dense: Optional[np.ndarray] = None

    def is_finite(self) -> bool:
        tensors = [self.entity_rows, self.relation_rows, self.filters, self.bias, self.dense]
        return all(np.all(np.isfinite(tensor)) for tensor in tensors if tensor is not None)

    def entity_row(self, entity_id: int) -> np.ndarray:
        """Gradient row of one entity; zeros when untouched."""
        matches = np.nonzero(self.entity_ids == entity_id)[0]
        if len(matches) == 0:
            return np.zeros(self.entity_rows.shape[1])
        return self.entity_rows[matches[0]]

    def relation_row(self, relation_id: int) -> np.ndarray:
        matches = np.nonzero(self.relation_ids == relation_id)[0]
        if len(matches) == 0:
            return np.zeros(self.relation_rows.shape[1])
        return self.relation_rows[matches[0]]


def init_params(kind: str, k: int, seed: int, num_entities: int, num_relations: int,
                num_filters: int = DEFAULT_NUM_FILTERS, transe_norm: int = 1) -> ModelParameters:
    """
    Draw fresh parameters uniformly from [-6/sqrt(k), 6/sqrt(k)].

    Args:
        kind: transe, distmult, complex, hole or convkb
        k: Embedding dimension
        seed: Generator seed; equal seeds give bit-identical parameters
        num_entities: Entity dictionary size
        num_relations: Relation dictionary size
        num_filters: ConvKB filter count
        transe_norm: TransE norm order (1 or 2)

    Returns:
        ModelParameters (TransE entity rows L2-normalized)
    """
    if kind not in MODEL_KINDS:
        raise KGCredError(f"unknown model kind {kind!r}")
    if k < 1:
        raise KGCredError(f"embedding dimension must be >= 1, got {k}")
    if num_entities < 1 or num_relations < 1:
        raise KGCredError("entity and relation counts must be >= 1")
    if kind == 'convkb' and num_filters < 1:
        raise KGCredError(f"num_filters must be >= 1, got {num_filters}")

    rng = np.random.default_rng(seed)
    bound = 6.0 / np.sqrt(k)
    width = 2 * k if kind == 'complex' else k
    entities = rng.uniform(-bound, bound, size=(num_entities, width))
    relations = rng.uniform(-bound, bound, size=(num_relations, width))
    params = ModelParameters(kind=kind, k=k, entities=entities, relations=relations,
                             transe_norm=transe_norm, seed=seed)
    if kind == 'transe':
        params.entities /= np.linalg.norm(params.entities, axis=1, keepdims=True)
    elif kind == 'convkb':
        params.filters = rng.uniform(-bound, bound, size=(num_filters, 3))
        params.bias = rng.uniform(-bound, bound, size=num_filters)
        params.dense = rng.uniform(-bound, bound, size=num_filters * k)
    return params
