"""Evaluation, calibration and analytics result models."""

from typing import Dict, List, Any, Optional, Sequence, Tuple
from dataclasses import dataclass, field

import numpy as np

from ..utils.formatting import format_row

HITS_AT = (1, 3, 10)


def ranking_metrics(ranks: Sequence[int], hits_at: Sequence[int] = HITS_AT) -> Tuple[float, float, Dict[int, float]]:
    """
    MRR, MR and Hits@N over a list of ranks.

    Returns:
        Tuple of (mrr, mr, {n: hits@n})
    """
    values = np.asarray(ranks, dtype=np.float64)
    if values.size == 0:
        return 0.0, 0.0, {n: 0.0 for n in hits_at}
    mrr = float(np.mean(1.0 / values))
    mr = float(np.mean(values))
    hits = {n: float(np.count_nonzero(values <= n)) / values.size for n in hits_at}
    return mrr, mr, hits


@dataclass
class RankingReport:
    """Subject-side and object-side ranks of each test triple with aggregates."""

    mode: str
    subject_ranks: List[int]
    object_ranks: List[int]
    triples: List[Tuple[int, int, int]] = field(default_factory=list)

    @property
    def ranks(self) -> List[int]:
        return list(self.subject_ranks) + list(self.object_ranks)

    @property
    def size(self) -> int:
        return len(self.subject_ranks)

    def metrics(self) -> Tuple[float, float, Dict[int, float]]:
        return ranking_metrics(self.ranks)

    @property
    def mrr(self) -> float:
        return self.metrics()[0]

    @property
    def mr(self) -> float:
        return self.metrics()[1]

    def hits(self, n: int) -> float:
        return ranking_metrics(self.ranks, (n,))[2][n]

    def to_dict(self) -> Dict[str, Any]:
        mrr, mr, hits = self.metrics()
        return {
            'mode': self.mode,
            'triples': self.size,
            'mrr': mrr,
            'mr': mr,
            'hits': {str(n): value for n, value in hits.items()}
        }

    def summary(self) -> str:
        mrr, mr, hits = self.metrics()
        hits_text = '  '.join(f"Hits@{n}: {value:.4f}" for n, value in hits.items())
        return (f"{self.mode.capitalize()} ranking over {self.size} triples "
                f"({2 * self.size} side-ranks)\n"
                f"  MRR: {mrr:.4f}  MR: {mr:.2f}\n"
                f"  {hits_text}")

    def write_tsv(self, path: str) -> None:
        """metric TAB value rows."""
        mrr, mr, hits = self.metrics()
        rows = [('mode', self.mode), ('triples', self.size), ('mrr', mrr), ('mr', mr)]
        rows.extend((f'hits@{n}', value) for n, value in hits.items())
        with open(path, 'w', encoding='utf-8', newline='\n') as handle:
            for row in rows:
                handle.write(format_row(row) + '\n')

    def write_ranks_tsv(self, path: str, labels: Optional[Sequence[Tuple[str, str, str]]] = None) -> None:
        """subject TAB predicate TAB object TAB subject-rank TAB object-rank."""
        with open(path, 'w', encoding='utf-8', newline='\n') as handle:
            for index, (head_rank, tail_rank) in enumerate(zip(self.subject_ranks, self.object_ranks)):
                triple = labels[index] if labels is not None else self.triples[index]
                handle.write(format_row(list(triple) + [head_rank, tail_rank]) + '\n')


@dataclass
class ConfusionMatrix:
    """Counts of a binary classification against labels."""

    true_pos: int = 0
    false_pos: int = 0
    true_neg: int = 0
    false_neg: int = 0

    @property
    def total(self) -> int:
        return self.true_pos + self.false_pos + self.true_neg + self.false_neg

    @classmethod
    def from_predictions(cls, predictions: Sequence[bool], labels: Sequence[bool]) -> 'ConfusionMatrix':
        matrix = cls()
        for predicted, actual in zip(predictions, labels):
            if predicted and actual:
                matrix.true_pos += 1
            elif predicted:
                matrix.false_pos += 1
            elif actual:
                matrix.false_neg += 1
            else:
                matrix.true_neg += 1
        return matrix

    def to_dict(self) -> Dict[str, int]:
        return {
            'true_pos': self.true_pos,
            'false_pos': self.false_pos,
            'true_neg': self.true_neg,
            'false_neg': self.false_neg
        }


@dataclass
class ClassificationReport:
    """Accuracy, precision, recall and F-score with degenerate-case flags."""

    confusion: ConfusionMatrix
    accuracy: float
    precision: float
    recall: float
    f_score: float
    degenerate: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'confusion': self.confusion.to_dict(),
            'accuracy': self.accuracy,
            'precision': self.precision,
            'recall': self.recall,
            'f_score': self.f_score,
            'degenerate': list(self.degenerate)
        }

    def summary(self) -> str:
        c = self.confusion
        lines = [
            f"Classified {c.total} facts (TPos={c.true_pos}, FPos={c.false_pos}, TNeg={c.true_neg}, FNeg={c.false_neg})",
            f"  Accuracy: {self.accuracy:.4f}  Precision: {self.precision:.4f}  "
            f"Recall: {self.recall:.4f}  F-score: {self.f_score:.4f}"
        ]
        if self.degenerate:
            lines.append(f"  Degenerate: {', '.join(self.degenerate)}")
        return '\n'.join(lines)


@dataclass
class Calibration:
    """Platt parameters mapping a score f to sigma(a * f + b)."""

    a: float
    b: float
    iterations: int = 0
    converged: bool = True

    def probabilities(self, scores: np.ndarray) -> np.ndarray:
        z = self.a * np.asarray(scores, dtype=np.float64) + self.b
        return stable_sigmoid(z)

    def to_dict(self) -> Dict[str, Any]:
        return {'a': self.a, 'b': self.b, 'iterations': self.iterations, 'converged': self.converged}


def stable_sigmoid(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    decay = np.exp(-np.abs(z))
    return np.where(z >= 0, 1.0 / (1.0 + decay), decay / (1.0 + decay))


@dataclass
class ClusterAssignment:
    """K-means result over a set of entity ids."""

    entity_ids: List[int]
    labels: np.ndarray
    centroids: np.ndarray
    inertia: float
    inertia_history: List[float] = field(default_factory=list)
    iterations: int = 0
    metric: str = 'euclidean'

    def cluster_of(self, entity_id: int) -> int:
        return int(self.labels[self.entity_ids.index(entity_id)])

    def to_dict(self) -> Dict[str, Any]:
        return {
            'clusters': int(self.centroids.shape[0]),
            'inertia': self.inertia,
            'iterations': self.iterations,
            'metric': self.metric,
            'assignment': {int(entity_id): int(label) for entity_id, label in zip(self.entity_ids, self.labels)}
        }


@dataclass
class Projection:
    """Low-dimensional coordinates of entities with explained-variance ratios."""

    entity_ids: List[int]
    coordinates: np.ndarray
    explained_variance_ratio: np.ndarray
    components: np.ndarray
    zero_variance: bool = False

    @property
    def dims(self) -> int:
        return self.coordinates.shape[1]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'dims': self.dims,
            'explained_variance_ratio': [float(value) for value in self.explained_variance_ratio],
            'zero_variance': self.zero_variance
        }
