"""Clustering, projection and export of entity embeddings."""

import logging
import os
from collections import Counter
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from sklearn.cluster import KMeans, kmeans_plusplus
from sklearn.decomposition import PCA
from sklearn.preprocessing import normalize

from ..models.graph import Dictionary
from ..models.reports import ClusterAssignment, Projection
from ..utils.errors import KGCredError
from ..utils.formatting import format_float, format_row
from ..utils.validators import validate_cluster_params

logger = logging.getLogger(__name__)


def _prepare(vectors: np.ndarray, metric: str) -> np.ndarray:
    data = np.asarray(vectors, dtype=np.float64)
    if data.ndim != 2:
        raise KGCredError("vectors must be a 2-D array")
    if metric == 'cosine':
        # zero rows stay zero
        data = normalize(data, norm='l2')
    return data


def kmeans(vectors: np.ndarray, clusters: int = 4, seed: int = 0, max_iter: int = 300,
           metric: str = 'euclidean', entity_ids: Optional[Sequence[int]] = None) -> ClusterAssignment:
    """
    K-means with k-means++ seeding and Lloyd iterations.

    KMeans is stepped one Lloyd iteration at a time from the previous centroids,
    so the inertia after every assignment is kept. Iteration stops at an
    assignment fixpoint or after max_iter steps. KMeans moves an emptied cluster
    to the point farthest from its centroid.

    Args:
        vectors: (n, dim) array
        clusters: Number of clusters (1..n)
        seed: Seed of the initialization
        max_iter: Step cap
        metric: 'euclidean', or 'cosine' to cluster L2-normalized rows
        entity_ids: Ids the rows stand for; defaults to 0..n-1

    Returns:
        ClusterAssignment with the inertia after every assignment
    """
    data = _prepare(vectors, metric)
    is_valid, error_msg, cleaned = validate_cluster_params(
        {'clusters': clusters, 'max_iter': max_iter, 'metric': metric}, len(data))
    if not is_valid:
        raise KGCredError(error_msg)
    clusters = cleaned['clusters']

    centroids, _ = kmeans_plusplus(data, clusters, random_state=seed)
    history: List[float] = []
    labels: Optional[np.ndarray] = None
    iterations = 0
    for iterations in range(1, cleaned['max_iter'] + 1):
        step = KMeans(n_clusters=clusters, init=centroids, n_init=1, max_iter=1,
                      algorithm='lloyd', random_state=seed).fit(data)
        history.append(float(step.inertia_))
        fixpoint = labels is not None and np.array_equal(step.labels_, labels)
        labels, centroids = step.labels_.astype(np.int64), step.cluster_centers_
        if fixpoint:
            break
    logger.debug("k-means stopped after %d steps, inertia %.6g", iterations, history[-1])

    ids = list(entity_ids) if entity_ids is not None else list(range(len(data)))
    return ClusterAssignment(entity_ids=ids, labels=labels, centroids=np.asarray(centroids, dtype=np.float64),
                             inertia=history[-1], inertia_history=history, iterations=iterations, metric=metric)


def pca_project(vectors: np.ndarray, dims: int = 2, entity_ids: Optional[Sequence[int]] = None) -> Projection:
    """
    Project mean-centered vectors onto their top principal directions.

    Each direction is signed so its largest-magnitude component is positive.
    Zero-variance input gives an all-zero projection with the zero_variance flag.
    """
    data = np.asarray(vectors, dtype=np.float64)
    if dims not in (2, 3):
        raise KGCredError(f"projection dims must be 2 or 3, got {dims}")
    if data.ndim != 2 or len(data) < dims + 1:
        raise KGCredError(f"projection to {dims}-D needs at least {dims + 1} vectors")
    if data.shape[1] < dims:
        raise KGCredError(f"vectors of width {data.shape[1]} cannot be projected to {dims}-D")

    ids = list(entity_ids) if entity_ids is not None else list(range(len(data)))
    centered = data - data.mean(axis=0)
    if not np.any(centered):
        return Projection(entity_ids=ids, coordinates=np.zeros((len(data), dims)),
                          explained_variance_ratio=np.zeros(dims), components=np.zeros((dims, data.shape[1])),
                          zero_variance=True)

    pca = PCA(n_components=dims, svd_solver='full').fit(data)
    components = pca.components_.copy()
    for row in components:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    coordinates = centered @ components.T
    return Projection(entity_ids=ids, coordinates=coordinates,
                      explained_variance_ratio=np.asarray(pca.explained_variance_ratio_, dtype=np.float64),
                      components=components)


def select_entities(entities: Dictionary, prefix: Optional[str] = None,
                    ids: Optional[Sequence[int]] = None) -> List[int]:
    """Entity ids to analyse: an explicit id list, labels with a prefix, or all."""
    if ids is not None:
        for entity_id in ids:
            entities.label_of(entity_id)
        return list(ids)
    if prefix:
        return [index for index, label in enumerate(entities.labels) if label.startswith(prefix)]
    return list(range(len(entities)))


def cluster_purity(assignment: ClusterAssignment, reference: Dict[int, str]) -> float:
    """
    Share of referenced entities whose reference label is their cluster's majority label.

    Majority ties go to the lexicographically smallest label.
    """
    by_cluster: Dict[int, List[str]] = {}
    for entity_id, label in zip(assignment.entity_ids, assignment.labels):
        if entity_id in reference:
            by_cluster.setdefault(int(label), []).append(reference[entity_id])
    total = sum(len(values) for values in by_cluster.values())
    if total == 0:
        return 0.0
    agreeing = 0
    for values in by_cluster.values():
        counts = Counter(values)
        top = max(counts.values())
        agreeing += counts[min(label for label, count in counts.items() if count == top)]
    return agreeing / total


def export_projector(vectors: np.ndarray, labels: Sequence[str], directory: str) -> Tuple[str, str]:
    """
    Write embeddings.tsv (no header, round-trip floats) and metadata.tsv (header `label`).

    Returns:
        Tuple of (embeddings path, metadata path)
    """
    data = np.asarray(vectors, dtype=np.float64)
    if len(data) != len(labels):
        raise KGCredError(f"{len(labels)} labels for {len(data)} vectors")
    os.makedirs(directory, exist_ok=True)
    embeddings_path = os.path.join(directory, 'embeddings.tsv')
    metadata_path = os.path.join(directory, 'metadata.tsv')
    with open(embeddings_path, 'w', encoding='utf-8', newline='\n') as handle:
        for row in data:
            handle.write('\t'.join(format_float(value) for value in row) + '\n')
    with open(metadata_path, 'w', encoding='utf-8', newline='\n') as handle:
        handle.write('label\n')
        for label in labels:
            handle.write(f"{label}\n")
    return embeddings_path, metadata_path


def load_projector(directory: str) -> Tuple[np.ndarray, List[str]]:
    """Read back the files written by export_projector."""
    with open(os.path.join(directory, 'embeddings.tsv'), 'r', encoding='utf-8') as handle:
        rows = [[float(cell) for cell in line.rstrip('\n').split('\t')] for line in handle if line.strip()]
    with open(os.path.join(directory, 'metadata.tsv'), 'r', encoding='utf-8') as handle:
        labels = [line.rstrip('\n') for line in handle][1:]
    return np.asarray(rows, dtype=np.float64), [label for label in labels if label]


def write_clusters_tsv(path: str, assignment: ClusterAssignment, entities: Dictionary) -> None:
    """entity-label TAB cluster-id."""
    with open(path, 'w', encoding='utf-8', newline='\n') as handle:
        for entity_id, label in zip(assignment.entity_ids, assignment.labels):
            handle.write(format_row([entities.label_of(entity_id), int(label)]) + '\n')


def write_projection_tsv(path: str, projection: Projection, entities: Dictionary) -> None:
    """entity-label TAB x TAB y [TAB z]."""
    with open(path, 'w', encoding='utf-8', newline='\n') as handle:
        for entity_id, point in zip(projection.entity_ids, projection.coordinates):
            handle.write(format_row([entities.label_of(entity_id)] + [float(value) for value in point]) + '\n')


def plot_projection(projection: Projection, path: str, labels: Optional[Sequence[str]] = None,
                    clusters: Optional[np.ndarray] = None, title: str = 'Entity embeddings (PCA)') -> str:
    """Render the first two projected coordinates as a PNG scatter."""
    import matplotlib
    matplotlib.use('Agg')
    from matplotlib import pyplot as plt

    figure, axes = plt.subplots(figsize=(8, 6))
    x, y = projection.coordinates[:, 0], projection.coordinates[:, 1]
    if clusters is not None:
        axes.scatter(x, y, c=clusters, cmap='tab10', s=12, alpha=0.7)
    else:
        axes.scatter(x, y, s=12, alpha=0.7)
    if labels is not None and len(labels) <= 60:
        for label, point in zip(labels, projection.coordinates):
            axes.annotate(label, (point[0], point[1]), fontsize=6)
    ratios = projection.explained_variance_ratio
    axes.set_xlabel(f"PC1 ({ratios[0]:.1%})")
    axes.set_ylabel(f"PC2 ({ratios[1]:.1%})")
    axes.set_title(title)
    figure.tight_layout()
    figure.savefig(path, dpi=120)
    plt.close(figure)
    return path
