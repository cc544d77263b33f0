"""
Scoring functions and analytic gradients of the embedding models.

Every scorer works on (batch, width) arrays with elementwise products summed
along the last axis, so a triple scores identically whatever batch it sits in.
"""

from typing import Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from ..models.parameters import ModelParameters, Gradient
from ..utils.errors import KGCredError

TripleLike = Union[Sequence[int], np.ndarray]
PerTripleGrads = Tuple[np.ndarray, np.ndarray, np.ndarray, Dict[str, np.ndarray]]


def as_triple_array(triples: TripleLike) -> np.ndarray:
    """Coerce one triple or a list of triples to an (n, 3) int64 array."""
    array = np.asarray(triples, dtype=np.int64)
    return array.reshape(-1, 3)


def _lookup(params: ModelParameters, triples: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    return params.entities[triples[:, 0]], params.relations[triples[:, 1]], params.entities[triples[:, 2]]


# TransE

def transe_scores(h: np.ndarray, r: np.ndarray, t: np.ndarray, norm: int = 1) -> np.ndarray:
    """f = -||h + r - t||_p."""
    diff = np.atleast_2d(h) + np.atleast_2d(r) - np.atleast_2d(t)
    if norm == 1:
        return -np.abs(diff).sum(axis=1)
    return -np.sqrt((diff * diff).sum(axis=1))


def _transe_grads(h, r, t, norm):
    diff = h + r - t
    if norm == 1:
        direction = -np.sign(diff)
    else:
        length = np.sqrt((diff * diff).sum(axis=1, keepdims=True))
        direction = np.where(length > 0, -diff / np.where(length > 0, length, 1.0), 0.0)
    return direction, direction, -direction


# DistMult

def distmult_scores(h: np.ndarray, r: np.ndarray, t: np.ndarray) -> np.ndarray:
    """f = sum_i r_i h_i t_i."""
    # h * t first keeps f(h, r, t) == f(t, r, h) bit for bit
    return (np.atleast_2d(r) * (np.atleast_2d(h) * np.atleast_2d(t))).sum(axis=1)


def _distmult_grads(h, r, t):
    return r * t, h * t, h * r


# ComplEx

def _halves(x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    k = x.shape[1] // 2
    return x[:, :k], x[:, k:]


def complex_scores(h: np.ndarray, r: np.ndarray, t: np.ndarray) -> np.ndarray:
    """f = Re(sum_i r_i h_i conj(t_i)) over real||imaginary rows."""
    hr, hi = _halves(np.atleast_2d(h))
    rr, ri = _halves(np.atleast_2d(r))
    tr, ti = _halves(np.atleast_2d(t))
    return (rr * (hr * tr + hi * ti) + ri * (hr * ti - hi * tr)).sum(axis=1)


def _complex_grads(h, r, t):
    hr, hi = _halves(h)
    rr, ri = _halves(r)
    tr, ti = _halves(t)
    dh = np.concatenate([rr * tr + ri * ti, rr * ti - ri * tr], axis=1)
    dr = np.concatenate([hr * tr + hi * ti, hr * ti - hi * tr], axis=1)
    dt = np.concatenate([rr * hr - ri * hi, rr * hi + ri * hr], axis=1)
    return dh, dr, dt


# HolE

def _shift_index(k: int, sign: int) -> np.ndarray:
    """index[i, j] = (j + sign * i) mod k."""
    rows = np.arange(k)[:, None]
    cols = np.arange(k)[None, :]
    return (cols + sign * rows) % k


def hole_correlation(h: np.ndarray, t: np.ndarray, method: str = 'direct') -> np.ndarray:
    """
    Circular correlation (h * t)[i] = sum_j h[j] t[(j + i) mod k].

    Args:
        h: (k,) or (batch, k) array
        t: Same shape as h
        method: 'direct' double sum or 'fft' via real transforms

    Returns:
        Array with the shape of the 2-D inputs
    """
    h = np.atleast_2d(np.asarray(h, dtype=np.float64))
    t = np.atleast_2d(np.asarray(t, dtype=np.float64))
    k = h.shape[1]
    if method == 'direct':
        return (h[:, None, :] * t[:, _shift_index(k, 1)]).sum(axis=2)
    if method == 'fft':
        return np.fft.irfft(np.conj(np.fft.rfft(h, axis=1)) * np.fft.rfft(t, axis=1), n=k, axis=1)
    raise KGCredError(f"unknown correlation method {method!r}")


def hole_scores(h: np.ndarray, w: np.ndarray, t: np.ndarray, method: str = 'direct') -> np.ndarray:
    """f = sum_i w_r[i] (h * t)[i]."""
    return (np.atleast_2d(w) * hole_correlation(h, t, method)).sum(axis=1)


def _hole_grads(h, w, t):
    k = h.shape[1]
    dw = hole_correlation(h, t)
    dh = (w[:, :, None] * t[:, _shift_index(k, 1)]).sum(axis=1)
    dt = (w[:, :, None] * h[:, _shift_index(k, -1)]).sum(axis=1)
    return dh, dw, dt


# ConvKB

def _convkb_preactivation(h, r, t, filters, bias):
    return (h[:, None, :] * filters[None, :, 0:1]
            + r[:, None, :] * filters[None, :, 1:2]
            + t[:, None, :] * filters[None, :, 2:3]
            + bias[None, :, None])


def convkb_scores(h: np.ndarray, r: np.ndarray, t: np.ndarray, filters: np.ndarray,
                  bias: np.ndarray, dense: np.ndarray) -> np.ndarray:
    """
    One 1x3 filter per feature map over the stacked [h; r; t] columns, ReLU,
    then the concatenated maps dotted with the dense vector.
    """
    h, r, t = np.atleast_2d(h), np.atleast_2d(r), np.atleast_2d(t)
    filters = np.atleast_2d(filters)
    bias = np.atleast_1d(bias)
    pre = _convkb_preactivation(h, r, t, filters, bias)
    weights = np.asarray(dense).reshape(filters.shape[0], h.shape[1])
    return (np.maximum(pre, 0.0) * weights[None]).sum(axis=(1, 2))


def _convkb_grads(h, r, t, filters, bias, dense, upstream):
    pre = _convkb_preactivation(h, r, t, filters, bias)
    weights = dense.reshape(filters.shape[0], h.shape[1])
    active = np.maximum(pre, 0.0)
    # ReLU subgradient at 0 is 0
    gated = np.where(pre > 0, 1.0, 0.0) * weights[None]
    dh = (gated * filters[None, :, 0:1]).sum(axis=1)
    dr = (gated * filters[None, :, 1:2]).sum(axis=1)
    dt = (gated * filters[None, :, 2:3]).sum(axis=1)
    scaled = gated * upstream[:, None, None]
    extras = {
        'filters': np.stack([(scaled * h[:, None, :]).sum(axis=(0, 2)),
                             (scaled * r[:, None, :]).sum(axis=(0, 2)),
                             (scaled * t[:, None, :]).sum(axis=(0, 2))], axis=1),
        'bias': scaled.sum(axis=(0, 2)),
        'dense': (active * upstream[:, None, None]).sum(axis=0).reshape(-1)
    }
    return dh, dr, dt, extras


def score_vectors(params: ModelParameters, h: np.ndarray, r: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Score raw (batch, width) embeddings with the parameters' model."""
    if params.kind == 'transe':
        return transe_scores(h, r, t, params.transe_norm)
    if params.kind == 'distmult':
        return distmult_scores(h, r, t)
    if params.kind == 'complex':
        return complex_scores(h, r, t)
    if params.kind == 'hole':
        return hole_scores(h, r, t)
    if params.kind == 'convkb':
        return convkb_scores(h, r, t, params.filters, params.bias, params.dense)
    raise KGCredError(f"unknown model kind {params.kind!r}")


def score_batch(params: ModelParameters, triples: TripleLike) -> np.ndarray:
    """Scores of many id triples; higher means more plausible."""
    array = as_triple_array(triples)
    if len(array) == 0:
        return np.zeros(0)
    return score_vectors(params, *_lookup(params, array))


def _score_one(kind: str) -> Callable[[ModelParameters, TripleLike], float]:
    def scorer(params: ModelParameters, triple: TripleLike) -> float:
        if params.kind != kind:
            raise KGCredError(f"parameters belong to {params.kind!r}, not {kind!r}")
        return float(score_batch(params, triple)[0])
    scorer.__name__ = f"score_{kind}"
    scorer.__doc__ = f"Score one (h, r, t) id triple with {kind} parameters."
    return scorer


score_transe = _score_one('transe')
score_distmult = _score_one('distmult')
score_complex = _score_one('complex')
score_hole = _score_one('hole')
score_convkb = _score_one('convkb')


def _per_triple_grads(params: ModelParameters, triples: np.ndarray, upstream: np.ndarray) -> PerTripleGrads:
    h, r, t = _lookup(params, triples)
    extras: Dict[str, np.ndarray] = {}
    if params.kind == 'transe':
        dh, dr, dt = _transe_grads(h, r, t, params.transe_norm)
    elif params.kind == 'distmult':
        dh, dr, dt = _distmult_grads(h, r, t)
    elif params.kind == 'complex':
        dh, dr, dt = _complex_grads(h, r, t)
    elif params.kind == 'hole':
        dh, dr, dt = _hole_grads(h, r, t)
    elif params.kind == 'convkb':
        dh, dr, dt, extras = _convkb_grads(h, r, t, params.filters, params.bias, params.dense, upstream)
    else:
        raise KGCredError(f"unknown model kind {params.kind!r}")
    return dh, dr, dt, extras


def _aggregate(ids: np.ndarray, rows: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    unique, inverse = np.unique(ids, return_inverse=True)
    summed = np.zeros((len(unique), rows.shape[1]))
    np.add.at(summed, inverse, rows)
    return unique, summed


def gradient(params: ModelParameters, triples: TripleLike, upstream: Optional[np.ndarray] = None) -> Gradient:
    """
    Gradient of sum_b upstream[b] * f(triple_b) with respect to every touched parameter.

    Args:
        params: Model parameters
        triples: One id triple or an (n, 3) array
        upstream: Per-triple weights (dL/df); ones when omitted

    Returns:
        Gradient with rows summed per unique entity and relation id
    """
    array = as_triple_array(triples)
    weights = np.ones(len(array)) if upstream is None else np.asarray(upstream, dtype=np.float64).reshape(-1)
    if len(weights) != len(array):
        raise KGCredError("upstream weights must match the number of triples")

    dh, dr, dt, extras = _per_triple_grads(params, array, weights)
    scale = weights[:, None]
    entity_ids, entity_rows = _aggregate(np.concatenate([array[:, 0], array[:, 2]]),
                                         np.concatenate([dh * scale, dt * scale]))
    relation_ids, relation_rows = _aggregate(array[:, 1], dr * scale)
    return Gradient(
        entity_ids=entity_ids,
        entity_rows=entity_rows,
        relation_ids=relation_ids,
        relation_rows=relation_rows,
        filters=extras.get('filters'),
        bias=extras.get('bias'),
        dense=extras.get('dense')
    )
