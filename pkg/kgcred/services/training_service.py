"""Mini-batch training with negative sampling, and random hyperparameter search."""

import json
import logging
from typing import Dict, List, Optional, Tuple, Any

import numpy as np

from ..models.parameters import init_params
from ..models.reports import stable_sigmoid
from ..models.training import TrainingConfig, SearchSpace, TrialResult, TrainingResult
from ..services.evaluation_service import evaluate_ranking
from ..services.graph_service import KnowledgeGraph
from ..services.optimizers import make_optimizer
from ..services.scoring_service import gradient, score_batch
from ..utils.errors import KGCredError, TrainingDivergedError
from ..utils.formatting import format_row

logger = logging.getLogger(__name__)


def sample_negatives(batch: np.ndarray, eta: int, num_entities: int, rng: np.random.Generator) -> np.ndarray:
    """
    eta corruptions per positive, grouped positive by positive.

    Each corruption replaces the head or the tail (probability 1/2 each) with
    a uniformly drawn entity different from the one it replaces. Corruptions
    are not filtered against known triples.

    Returns:
        (len(batch) * eta, 3) int64 array
    """
    if num_entities < 2:
        raise KGCredError("negative sampling needs at least 2 entities")
    if eta < 1:
        raise KGCredError(f"eta must be >= 1, got {eta}")
    repeated = np.repeat(np.asarray(batch, dtype=np.int64).reshape(-1, 3), eta, axis=0)
    corrupt_head = rng.random(len(repeated)) < 0.5
    replacement = rng.integers(0, num_entities - 1, size=len(repeated))
    original = np.where(corrupt_head, repeated[:, 0], repeated[:, 2])
    replacement += replacement >= original

    negatives = repeated.copy()
    negatives[corrupt_head, 0] = replacement[corrupt_head]
    negatives[~corrupt_head, 2] = replacement[~corrupt_head]
    return negatives


def loss_with_grads(f_pos: np.ndarray, f_neg: np.ndarray, loss: str, margin: float = 1.0
                    ) -> Tuple[float, np.ndarray, np.ndarray]:
    """
    Summed loss over positives (n,) and their negatives (n, eta).

    Returns:
        Tuple of (loss, dL/df_pos, dL/df_neg)
    """
    f_pos = np.asarray(f_pos, dtype=np.float64).reshape(-1)
    f_neg = np.asarray(f_neg, dtype=np.float64).reshape(len(f_pos), -1)
    if loss == 'pairwise':
        hinge = margin - f_pos[:, None] + f_neg
        active = (hinge > 0).astype(np.float64)
        return float(np.sum(np.maximum(hinge, 0.0))), -active.sum(axis=1), active
    if loss == 'nll':
        value = np.sum(np.logaddexp(0.0, -f_pos)) + np.sum(np.logaddexp(0.0, f_neg))
        return float(value), -stable_sigmoid(-f_pos), stable_sigmoid(f_neg)
    if loss == 'absolute_margin':
        pos_part = margin - f_pos
        value = np.sum(np.maximum(pos_part, 0.0)) + np.sum(np.maximum(f_neg, 0.0))
        return float(value), -(pos_part > 0).astype(np.float64), (f_neg > 0).astype(np.float64)
    raise KGCredError(f"unknown loss {loss!r}")


def compute_loss(f_pos: float, f_negs: List[float], config: TrainingConfig) -> float:
    """Loss of one positive score against its negative scores."""
    value, _, _ = loss_with_grads(np.array([f_pos]), np.array([list(f_negs)]).reshape(1, -1),
                                  config.loss, config.margin)
    return value


def regularize(rows: np.ndarray, lambda_reg: float, p: int) -> Tuple[float, np.ndarray]:
    """
    LP penalty lambda * sum |theta|^p over the given rows.

    Returns:
        Tuple of (penalty, gradient with the shape of rows)
    """
    if p not in (1, 2, 3):
        raise KGCredError(f"lp norm must be 1, 2 or 3, got {p}")
    rows = np.asarray(rows, dtype=np.float64)
    magnitude = np.abs(rows)
    penalty = float(lambda_reg * np.sum(magnitude ** p))
    grad = lambda_reg * p * magnitude ** (p - 1) * np.sign(rows)
    return penalty, grad


def _normalize_rows(matrix: np.ndarray, ids: np.ndarray) -> None:
    norms = np.linalg.norm(matrix[ids], axis=1, keepdims=True)
    matrix[ids] = matrix[ids] / np.where(norms > 0, norms, 1.0)


def train(kg: KnowledgeGraph, config: TrainingConfig, tag: str = 'train') -> TrainingResult:
    """
    Train embeddings on one split.

    Positives are shuffled each epoch and cut into batches_count contiguous
    batches. Every batch scores positives and negatives, adds the optional LP
    penalty over touched rows and takes one optimizer step.

    Args:
        kg: Graph holding the split
        config: Training hyperparameters
        tag: Split to train on

    Returns:
        TrainingResult with the per-epoch mean loss

    Raises:
        TrainingDivergedError: on a non-finite loss or gradient, with the trace so far
    """
    positives = kg.triples_array(tag)
    if len(positives) == 0:
        raise KGCredError(f"split {tag!r} has no triples to train on")
    if config.epochs < 1:
        raise KGCredError("epochs must be >= 1")

    params = init_params(config.model, config.k, config.seed, kg.num_entities, kg.num_relations,
                         num_filters=config.num_filters, transe_norm=config.transe_norm)
    rng = np.random.default_rng([config.seed, 1])
    optimizer = make_optimizer(config)
    renormalize = config.model == 'transe' or config.normalize_ent_emb
    trace: List[float] = []

    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(len(positives))
        epoch_loss = 0.0
        for batch_ids in np.array_split(order, config.batches_count):
            if len(batch_ids) == 0:
                continue
            batch = positives[batch_ids]
            negatives = sample_negatives(batch, config.eta, kg.num_entities, rng)
            f_pos = score_batch(params, batch)
            f_neg = score_batch(params, negatives).reshape(len(batch), config.eta)
            batch_loss, d_pos, d_neg = loss_with_grads(f_pos, f_neg, config.loss, config.margin)

            grad = gradient(params, np.concatenate([batch, negatives]), np.concatenate([d_pos, d_neg.reshape(-1)]))
            if config.regularizer == 'lp' and config.lambda_reg > 0:
                penalty, reg_grad = regularize(params.entities[grad.entity_ids], config.lambda_reg, config.lp_norm)
                grad.entity_rows += reg_grad
                batch_loss += penalty
                penalty, reg_grad = regularize(params.relations[grad.relation_ids], config.lambda_reg, config.lp_norm)
                grad.relation_rows += reg_grad
                batch_loss += penalty

            if not np.isfinite(batch_loss):
                raise TrainingDivergedError(f"epoch {epoch}: non-finite loss", trace)
            try:
                optimizer.step(params, grad)
            except TrainingDivergedError as e:
                raise TrainingDivergedError(f"epoch {epoch}: {e}", trace)
            if renormalize:
                _normalize_rows(params.entities, grad.entity_ids)
            epoch_loss += batch_loss

        trace.append(epoch_loss / len(positives))
        if config.verbose:
            logger.info("Epoch %d/%d: mean loss %.6f", epoch, config.epochs, trace[-1])

    return TrainingResult(params=params, loss_trace=trace, config=config)


def sample_config(space: SearchSpace, rng: np.random.Generator) -> Dict[str, Any]:
    """Draw one value uniformly from every candidate list, in space order."""
    return {name: values[int(rng.integers(0, len(values)))] for name, values in space.candidates.items()}


def random_search(space: SearchSpace, trials: int, kg: KnowledgeGraph, seed: int,
                  threads: int = 1) -> Tuple[TrialResult, List[TrialResult], TrainingResult]:
    """
    Random hyperparameter search scored by filtered MRR on the validation split.

    Args:
        space: Candidate lists and fixed overrides
        trials: Number of sampled configurations
        kg: Graph with train and valid splits
        seed: Seed of the sampling stream
        threads: Evaluation threads

    Returns:
        Tuple of (best trial, all trials, best training result); ties keep the earlier trial
    """
    if trials < 1:
        raise KGCredError("trials must be >= 1")
    if len(kg.triples_array('valid')) == 0:
        raise KGCredError("random search needs a non-empty validation split")

    rng = np.random.default_rng(seed)
    results: List[TrialResult] = []
    best: Optional[TrialResult] = None
    best_training: Optional[TrainingResult] = None
    for trial_id in range(1, trials + 1):
        sampled = sample_config(space, rng)
        raw = {'model': space.model, 'seed': seed}
        raw.update(space.fixed)
        raw.update(sampled)
        config = TrainingConfig.from_dict(raw)
        training = train(kg, config)
        mrr = evaluate_ranking(training.params, kg, tag='valid', filtered=True, threads=threads).mrr
        trial = TrialResult(trial_id=trial_id, config=config, sampled=sampled, mrr=mrr)
        results.append(trial)
        logger.info("Trial %d/%d: valid MRR %.4f %s", trial_id, trials, mrr, json.dumps(sampled, sort_keys=True))
        if best is None or mrr > best.mrr:
            best, best_training = trial, training
    return best, results, best_training


def write_trial_log(path: str, trials: List[TrialResult]) -> None:
    """trial-id TAB sampled-config (JSON) TAB valid-MRR."""
    with open(path, 'w', encoding='utf-8', newline='\n') as handle:
        for trial in trials:
            handle.write(format_row([trial.trial_id, json.dumps(trial.sampled, sort_keys=True), trial.mrr]) + '\n')
