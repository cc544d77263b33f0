"""Validation utilities for kgcred."""

import math
from typing import Dict, Any, Tuple, Sequence

MODEL_KINDS = ('transe', 'distmult', 'complex', 'hole', 'convkb')
LOSSES = ('pairwise', 'nll', 'absolute_margin')
OPTIMIZERS = ('sgd', 'adagrad', 'adam', 'momentum')
REGULARIZERS = ('none', 'lp')


def validate_split_ratios(ratios: Sequence[float]) -> Tuple[bool, str, Tuple[float, float, float]]:
    """
    Validate (train, valid, test) split ratios.

    Args:
        ratios: Three fractions

    Returns:
        Tuple of (is_valid, error_message, cleaned_ratios)
    """
    try:
        cleaned = tuple(float(value) for value in ratios)
    except (TypeError, ValueError):
        return False, "Ratios must be numbers", (0.0, 0.0, 0.0)
    if len(cleaned) != 3:
        return False, "Exactly three ratios (train, valid, test) are required", (0.0, 0.0, 0.0)
    if any(not value > 0 for value in cleaned):
        return False, "Ratios must be positive", (0.0, 0.0, 0.0)
    if abs(sum(cleaned) - 1.0) > 1e-9:
        return False, f"Ratios must sum to 1, got {sum(cleaned)!r}", (0.0, 0.0, 0.0)
    return True, "", cleaned


def _positive_int(params: Dict[str, Any], name: str, default: int, minimum: int = 1) -> Tuple[bool, str, int]:
    try:
        value = int(params.get(name, default))
    except (ValueError, TypeError):
        return False, f"{name} must be a valid integer", 0
    if value < minimum:
        return False, f"{name} must be at least {minimum}", 0
    return True, "", value


def _positive_float(params: Dict[str, Any], name: str, default: float, allow_zero: bool = False) -> Tuple[bool, str, float]:
    try:
        value = float(params.get(name, default))
    except (ValueError, TypeError):
        return False, f"{name} must be a valid number", 0.0
    if not math.isfinite(value) or value < 0 or (value == 0 and not allow_zero):
        bound = "non-negative" if allow_zero else "positive"
        return False, f"{name} must be {bound}", 0.0
    return True, "", value


def _unit_interval(params: Dict[str, Any], name: str, default: float) -> Tuple[bool, str, float]:
    try:
        value = float(params.get(name, default))
    except (ValueError, TypeError):
        return False, f"{name} must be a valid number", 0.0
    if not 0.0 <= value < 1.0:
        return False, f"{name} must be in [0, 1)", 0.0
    return True, "", value


def validate_training_params(params: Dict[str, Any]) -> Tuple[bool, str, Dict[str, Any]]:
    """
    Validate training hyperparameters.

    Args:
        params: Dictionary of raw hyperparameters (strings or numbers)

    Returns:
        Tuple of (is_valid, error_message, cleaned_params)
    """
    cleaned_params: Dict[str, Any] = {}

    model = str(params.get('model', '')).lower()
    if model not in MODEL_KINDS:
        return False, f"Model must be one of: {', '.join(MODEL_KINDS)}", {}
    cleaned_params['model'] = model

    for name, default in (('epochs', 100), ('batches_count', 10), ('k', 100), ('eta', 5), ('num_filters', 24)):
        ok, message, value = _positive_int(params, name, default)
        if not ok:
            return False, message, {}
        cleaned_params[name] = value

    try:
        cleaned_params['seed'] = int(params.get('seed', 0))
    except (ValueError, TypeError):
        return False, "seed must be a valid integer", {}

    loss = str(params.get('loss', 'pairwise')).lower()
    if loss not in LOSSES:
        return False, f"Loss must be one of: {', '.join(LOSSES)}", {}
    cleaned_params['loss'] = loss

    optimizer = str(params.get('optimizer', 'adagrad')).lower()
    if optimizer not in OPTIMIZERS:
        return False, f"Optimizer must be one of: {', '.join(OPTIMIZERS)}", {}
    cleaned_params['optimizer'] = optimizer

    regularizer = str(params.get('regularizer', 'none') or 'none').lower()
    if regularizer not in REGULARIZERS:
        return False, f"Regularizer must be one of: {', '.join(REGULARIZERS)}", {}
    cleaned_params['regularizer'] = regularizer

    for name, default, allow_zero in (('lr', 0.1, False), ('margin', 1.0, False), ('lambda_reg', 1e-5, True)):
        ok, message, value = _positive_float(params, name, default, allow_zero)
        if not ok:
            return False, message, {}
        cleaned_params[name] = value

    for name, default in (('beta1', 0.9), ('beta2', 0.999), ('momentum', 0.9)):
        ok, message, value = _unit_interval(params, name, default)
        if not ok:
            return False, message, {}
        cleaned_params[name] = value

    ok, message, value = _positive_float(params, 'epsilon', 1e-8)
    if not ok:
        return False, message, {}
    cleaned_params['epsilon'] = value

    try:
        lp_norm = int(params.get('lp_norm', 2))
    except (ValueError, TypeError):
        return False, "lp_norm must be a valid integer", {}
    if lp_norm not in (1, 2, 3):
        return False, "lp_norm must be 1, 2 or 3", {}
    cleaned_params['lp_norm'] = lp_norm

    try:
        transe_norm = int(params.get('transe_norm', 1))
    except (ValueError, TypeError):
        return False, "transe_norm must be a valid integer", {}
    if transe_norm not in (1, 2):
        return False, "transe_norm must be 1 or 2", {}
    cleaned_params['transe_norm'] = transe_norm

    return True, "", cleaned_params


def validate_cluster_params(params: Dict[str, Any], num_vectors: int) -> Tuple[bool, str, Dict[str, Any]]:
    """
    Validate clustering parameters against the number of vectors.

    Returns:
        Tuple of (is_valid, error_message, cleaned_params)
    """
    cleaned_params: Dict[str, Any] = {}
    try:
        clusters = int(params.get('clusters', 4))
    except (ValueError, TypeError):
        return False, "Clusters must be a valid integer", {}
    if clusters < 1:
        return False, "Clusters must be at least 1", {}
    if clusters > num_vectors:
        return False, f"Clusters ({clusters}) exceed the number of vectors ({num_vectors})", {}
    cleaned_params['clusters'] = clusters

    ok, message, max_iter = _positive_int(params, 'max_iter', 300)
    if not ok:
        return False, message, {}
    cleaned_params['max_iter'] = max_iter

    metric = str(params.get('metric', 'euclidean')).lower()
    if metric not in ('euclidean', 'cosine'):
        return False, "Metric must be one of: euclidean, cosine", {}
    cleaned_params['metric'] = metric

    return True, "", cleaned_params
