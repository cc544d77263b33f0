"""Link-prediction ranking, Platt calibration and triple classification."""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..models.parameters import ModelParameters
from ..models.reports import (
    RankingReport, ConfusionMatrix, ClassificationReport, Calibration, stable_sigmoid
)
from ..services.graph_service import KnowledgeGraph
from ..services.scoring_service import score_batch
from ..utils.errors import CalibrationError, KGCredError
from ..utils.formatting import format_row

logger = logging.getLogger(__name__)

SIDES = ('subject', 'object')
RIDGE = 1e-3

LabelledFact = Tuple[str, str, str, bool]
Prediction = Tuple[str, str, str, bool, bool, float]


def rank_triple(params: ModelParameters, kg: KnowledgeGraph, triple: Sequence[int], side: str,
                filtered: bool = True) -> int:
    """
    Rank of a test triple among its corruptions on one side.

    Ties count against the test triple: rank = 1 + |corruptions scoring >= f_test|.
    The filtered mode drops corruptions known anywhere in the graph.

    Args:
        params: Model parameters
        kg: Graph holding every split (used for filtering)
        triple: (s, p, o) ids
        side: 'subject' or 'object'
        filtered: Filtered (True) or raw (False) protocol

    Returns:
        Rank >= 1
    """
    s, p, o = (int(value) for value in triple)
    candidates = np.arange(params.num_entities, dtype=np.int64)
    batch = np.empty((len(candidates), 3), dtype=np.int64)
    if side == 'object':
        batch[:, 0], batch[:, 1], batch[:, 2] = s, p, candidates
        target = o
        known = kg.known_tails(s, p) if filtered else set()
    elif side == 'subject':
        batch[:, 0], batch[:, 1], batch[:, 2] = candidates, p, o
        target = s
        known = kg.known_heads(p, o) if filtered else set()
    else:
        raise KGCredError(f"side must be subject or object, got {side!r}")

    scores = score_batch(params, batch)
    keep = candidates != target
    if known:
        keep &= ~np.isin(candidates, np.fromiter(known, dtype=np.int64, count=len(known)))
    return 1 + int(np.count_nonzero(scores[keep] >= scores[target]))


def _rank_both(params: ModelParameters, kg: KnowledgeGraph, triple: Sequence[int], filtered: bool) -> Tuple[int, int]:
    return rank_triple(params, kg, triple, 'subject', filtered), rank_triple(params, kg, triple, 'object', filtered)


def evaluate_ranking(params: ModelParameters, kg: KnowledgeGraph, tag: str = 'test', filtered: bool = True,
                     threads: int = 1, triples: Optional[np.ndarray] = None) -> RankingReport:
    """
    Rank both sides of every triple in a split.

    Args:
        params: Model parameters
        kg: Graph with split tags
        tag: Split to evaluate
        filtered: Filtered or raw protocol
        threads: Worker threads; results equal the sequential run
        triples: Explicit (n, 3) id array overriding the split

    Returns:
        RankingReport
    """
    array = kg.triples_array(tag) if triples is None else np.asarray(triples, dtype=np.int64).reshape(-1, 3)
    if len(array) == 0:
        raise KGCredError(f"no triples to evaluate in split {tag!r}")

    rows = [tuple(int(value) for value in row) for row in array]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            ranks = list(executor.map(lambda row: _rank_both(params, kg, row, filtered), rows))
    else:
        ranks = [_rank_both(params, kg, row, filtered) for row in rows]

    report = RankingReport(
        mode='filtered' if filtered else 'raw',
        subject_ranks=[head for head, _ in ranks],
        object_ranks=[tail for _, tail in ranks],
        triples=rows
    )
    logger.info("Evaluated %d triples: MRR %.4f", report.size, report.mrr)
    return report


def _penalized_nll(a: float, b: float, x: np.ndarray, y: np.ndarray) -> float:
    z = a * x + b
    return float(np.sum(np.logaddexp(0.0, z) - y * z) + 0.5 * RIDGE * (a * a + b * b))


def calibrate(scores: Sequence[float], labels: Sequence[bool], max_iter: int = 100, tol: float = 1e-8) -> Calibration:
    """
    Fit Platt scaling sigma(a * f + b) by damped Newton on the ridge-penalized likelihood.

    Args:
        scores: Model scores
        labels: True/False labels
        max_iter: Newton iteration cap
        tol: Stop once |step_a| + |step_b| < tol

    Returns:
        Calibration

    Raises:
        CalibrationError: if only one class is present
    """
    x = np.asarray(scores, dtype=np.float64).reshape(-1)
    y = np.asarray(labels, dtype=np.float64).reshape(-1)
    if x.size == 0 or x.size != y.size:
        raise CalibrationError("calibration needs equally many scores and labels")
    if np.unique(y).size < 2:
        raise CalibrationError("calibration needs both true and false labels")
    if not np.all(np.isfinite(x)):
        raise CalibrationError("calibration scores must be finite")

    prior = float(np.clip(y.mean(), 1e-6, 1 - 1e-6))
    a, b = 0.0, float(np.log(prior / (1 - prior)))
    objective = _penalized_nll(a, b, x, y)

    iterations, converged = 0, False
    for iterations in range(1, max_iter + 1):
        p = stable_sigmoid(a * x + b)
        w = p * (1 - p)
        grad_a = float(np.sum((p - y) * x) + RIDGE * a)
        grad_b = float(np.sum(p - y) + RIDGE * b)
        h_aa = float(np.sum(w * x * x) + RIDGE)
        h_bb = float(np.sum(w) + RIDGE)
        h_ab = float(np.sum(w * x))
        det = h_aa * h_bb - h_ab * h_ab
        if det <= 1e-300:
            break
        step_a = (h_bb * grad_a - h_ab * grad_b) / det
        step_b = (h_aa * grad_b - h_ab * grad_a) / det

        scale = 1.0
        for _ in range(30):
            candidate = _penalized_nll(a - scale * step_a, b - scale * step_b, x, y)
            if candidate <= objective:
                break
            scale *= 0.5
        a -= scale * step_a
        b -= scale * step_b
        objective = _penalized_nll(a, b, x, y)
        if scale * (abs(step_a) + abs(step_b)) < tol:
            converged = True
            break

    return Calibration(a=a, b=b, iterations=iterations, converged=converged)


def classification_metrics(confusion: ConfusionMatrix) -> ClassificationReport:
    """Accuracy, precision, recall and F1; zero denominators give 0 and a flag."""
    degenerate = []
    total = confusion.total
    if total:
        accuracy = (confusion.true_pos + confusion.true_neg) / total
    else:
        accuracy = 0.0
        degenerate.append('accuracy')
    predicted_pos = confusion.true_pos + confusion.false_pos
    if predicted_pos:
        precision = confusion.true_pos / predicted_pos
    else:
        precision = 0.0
        degenerate.append('precision')
    actual_pos = confusion.true_pos + confusion.false_neg
    if actual_pos:
        recall = confusion.true_pos / actual_pos
    else:
        recall = 0.0
        degenerate.append('recall')
    if precision + recall > 0:
        f_score = 2 * precision * recall / (precision + recall)
    else:
        f_score = 0.0
        degenerate.append('f_score')
    return ClassificationReport(confusion=confusion, accuracy=accuracy, precision=precision,
                                recall=recall, f_score=f_score, degenerate=degenerate)


def synthesize_negatives(kg: KnowledgeGraph, positives: np.ndarray, rng: np.random.Generator,
                         max_attempts: int = 20) -> np.ndarray:
    """
    One corruption per positive that is not a known triple anywhere in the graph.

    Positives whose corruptions all hit known triples within max_attempts
    draws are skipped.
    """
    if kg.num_entities < 2:
        raise KGCredError("negative synthesis needs at least 2 entities")
    negatives = []
    for s, p, o in np.asarray(positives, dtype=np.int64).reshape(-1, 3):
        for _ in range(max_attempts):
            replacement = int(rng.integers(0, kg.num_entities))
            if rng.random() < 0.5:
                candidate = (replacement, int(p), int(o))
            else:
                candidate = (int(s), int(p), replacement)
            if not kg.contains(*candidate):
                negatives.append(candidate)
                break
    return np.asarray(negatives, dtype=np.int64).reshape(-1, 3)


def fit_calibration(params: ModelParameters, kg: KnowledgeGraph, seed: int, tag: str = 'valid') -> Calibration:
    """Calibrate on a split's positives plus synthesized, filtered negatives."""
    positives = kg.triples_array(tag)
    if len(positives) == 0:
        raise CalibrationError(f"split {tag!r} has no triples to calibrate on")
    negatives = synthesize_negatives(kg, positives, np.random.default_rng([seed, 2]))
    scores = np.concatenate([score_batch(params, positives), score_batch(params, negatives)])
    labels = np.concatenate([np.ones(len(positives)), np.zeros(len(negatives))])
    return calibrate(scores, labels)


def classify(params: ModelParameters, calibration: Calibration, kg: KnowledgeGraph,
             facts: Sequence[LabelledFact]) -> Tuple[ClassificationReport, List[Prediction]]:
    """
    Predict a fact true iff its calibrated probability is >= 0.5.

    Returns:
        Tuple of (report, per-fact predictions with probability)
    """
    if not facts:
        raise KGCredError("no labelled facts to classify")
    encoded = np.asarray([kg.encode(s, p, o).as_tuple() for s, p, o, _ in facts], dtype=np.int64)
    probabilities = calibration.probabilities(score_batch(params, encoded))
    predicted = probabilities >= 0.5
    labels = [label for _, _, _, label in facts]
    report = classification_metrics(ConfusionMatrix.from_predictions(predicted.tolist(), labels))
    predictions = [(s, p, o, label, bool(flag), float(probability))
                   for (s, p, o, label), flag, probability in zip(facts, predicted, probabilities)]
    return report, predictions


def write_predictions_tsv(path: str, predictions: Sequence[Prediction]) -> None:
    """subject, predicate, object, label, prediction, probability."""
    with open(path, 'w', encoding='utf-8', newline='\n') as handle:
        for row in predictions:
            handle.write(format_row(row) + '\n')
