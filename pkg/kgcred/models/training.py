"""Training configuration, search space and result models."""

import json
from typing import Dict, List, Any, Optional
from dataclasses import dataclass, field, asdict

from ..utils.errors import KGCredError
from ..utils.validators import validate_training_params
from .parameters import ModelParameters, DEFAULT_NUM_FILTERS


@dataclass
class TrainingConfig:
    """Hyperparameters of one training run."""

    model: str
    k: int = 100
    epochs: int = 100
    batches_count: int = 10
    eta: int = 5
    seed: int = 0
    loss: str = 'pairwise'
    margin: float = 1.0
    regularizer: str = 'none'
    lambda_reg: float = 1e-5
    lp_norm: int = 2
    optimizer: str = 'adagrad'
    lr: float = 0.1
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    momentum: float = 0.9
    transe_norm: int = 1
    num_filters: int = DEFAULT_NUM_FILTERS
    normalize_ent_emb: bool = False
    verbose: bool = False

    @classmethod
    def from_dict(cls, params: Dict[str, Any]) -> 'TrainingConfig':
        """
        Build a validated config from raw values.

        Raises:
            KGCredError: with the validator's message
        """
        is_valid, error_msg, cleaned = validate_training_params(params)
        if not is_valid:
            raise KGCredError(error_msg)
        for name in ('normalize_ent_emb', 'verbose'):
            if name in params:
                cleaned[name] = _as_bool(params[name])
        return cls(**cleaned)

    def replace(self, **changes: Any) -> 'TrainingConfig':
        data = self.to_dict()
        data.update(changes)
        return TrainingConfig.from_dict(data)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _as_bool(value: Any) -> bool:
    if isinstance(value, str):
        return value.strip().lower() in ('1', 'true', 'yes', 'on')
    return bool(value)


@dataclass
class SearchSpace:
    """Candidate values per hyperparameter, sampled uniformly by random search."""

    model: str
    candidates: Dict[str, List[Any]]
    fixed: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        empty = [name for name, values in self.candidates.items() if not values]
        if empty:
            raise KGCredError(f"empty candidate list for: {', '.join(sorted(empty))}")

    @classmethod
    def load(cls, path: str, model: str, fixed: Optional[Dict[str, Any]] = None) -> 'SearchSpace':
        """Read the space of one model from a JSON file keyed by model kind."""
        with open(path, 'r', encoding='utf-8') as handle:
            data = json.load(handle)
        if model in data:
            data = data[model]
        if not isinstance(data, dict):
            raise KGCredError(f"{path}: no search space for model {model!r}")
        candidates = {name: list(values) if isinstance(values, list) else [values] for name, values in data.items()}
        return cls(model=model, candidates=candidates, fixed=dict(fixed or {}))


@dataclass
class TrialResult:
    """One sampled configuration and its validation MRR."""

    trial_id: int
    config: TrainingConfig
    sampled: Dict[str, Any]
    mrr: float

    def to_dict(self) -> Dict[str, Any]:
        return {'trial_id': self.trial_id, 'sampled': dict(self.sampled), 'mrr': self.mrr}


@dataclass
class TrainingResult:
    """Trained parameters with the per-epoch mean loss."""

    params: ModelParameters
    loss_trace: List[float]
    config: TrainingConfig

    @property
    def final_loss(self) -> float:
        return self.loss_trace[-1] if self.loss_trace else float('nan')
