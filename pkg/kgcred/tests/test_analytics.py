"""Tests for clustering, projection and projector export."""

import os
import tempfile
import unittest

import numpy as np

from kgcred.models.graph import Dictionary
from kgcred.models.reports import ClusterAssignment
from kgcred.services.analytics_service import (
    kmeans, pca_project, select_entities, cluster_purity, export_projector, load_projector,
    write_clusters_tsv, write_projection_tsv, plot_projection
)
from kgcred.utils.errors import KGCredError

CENTERS = np.array([[10.0, 10.0], [10.0, -10.0], [-10.0, 10.0], [-10.0, -10.0]])


def blobs(per_blob=25, seed=0):
    rng = np.random.default_rng(seed)
    points = np.concatenate([center + rng.normal(0.0, 0.5, size=(per_blob, 2)) for center in CENTERS])
    truth = np.repeat(np.arange(len(CENTERS)), per_blob)
    return points, truth


class TestKMeans(unittest.TestCase):
    """Test cases for kmeans."""

    def test_recovers_blobs(self):
        """Test that four separated blobs are recovered up to relabeling."""
        points, truth = blobs()
        assignment = kmeans(points, clusters=4, seed=0)
        mapping = {}
        for label, expected in zip(assignment.labels, truth):
            mapping.setdefault(int(expected), int(label))
            self.assertEqual(mapping[int(expected)], int(label))
        self.assertEqual(len(set(mapping.values())), 4)

    def test_inertia_non_increasing(self):
        """Test that inertia never rises between assignments."""
        points = np.random.default_rng(3).normal(size=(60, 5))
        assignment = kmeans(points, clusters=5, seed=1)
        history = assignment.inertia_history
        for before, after in zip(history, history[1:]):
            self.assertLessEqual(after, before + 1e-9)
        self.assertEqual(assignment.inertia, history[-1])

    def test_deterministic(self):
        """Test that equal seeds give equal assignments."""
        points = np.random.default_rng(4).normal(size=(40, 3))
        first = kmeans(points, clusters=3, seed=7)
        second = kmeans(points, clusters=3, seed=7)
        np.testing.assert_array_equal(first.labels, second.labels)
        np.testing.assert_array_equal(first.centroids, second.centroids)

    def test_one_cluster_per_point(self):
        """Test that as many clusters as points gives zero inertia."""
        points = np.arange(8, dtype=np.float64).reshape(4, 2)
        assignment = kmeans(points, clusters=4, seed=0)
        self.assertEqual(assignment.inertia, 0.0)
        self.assertEqual(len(set(assignment.labels.tolist())), 4)

    def test_single_cluster_mean(self):
        """Test that one cluster has the mean vector as its centroid."""
        points = np.random.default_rng(6).normal(size=(20, 3))
        assignment = kmeans(points, clusters=1, seed=2)
        np.testing.assert_allclose(assignment.centroids[0], points.mean(axis=0), atol=1e-12)
        self.assertEqual(set(assignment.labels.tolist()), {0})

    def test_cosine_metric(self):
        """Test that cosine clustering groups by direction, not length."""
        points = np.array([[1.0, 0.0], [5.0, 0.0], [0.0, 1.0], [0.0, 9.0]])
        assignment = kmeans(points, clusters=2, seed=0, metric='cosine', entity_ids=[10, 11, 12, 13])
        self.assertEqual(assignment.cluster_of(10), assignment.cluster_of(11))
        self.assertEqual(assignment.cluster_of(12), assignment.cluster_of(13))
        self.assertNotEqual(assignment.cluster_of(10), assignment.cluster_of(12))

    def test_invalid_parameters(self):
        """Test rejection of too many clusters, zero clusters and unknown metrics."""
        points = np.zeros((3, 2))
        with self.assertRaises(KGCredError):
            kmeans(points, clusters=4)
        with self.assertRaises(KGCredError):
            kmeans(points, clusters=0)
        with self.assertRaises(KGCredError):
            kmeans(points, clusters=2, metric='manhattan')


class TestProjection(unittest.TestCase):
    """Test cases for pca_project."""

    def test_plane_explained(self):
        """Test that points on a plane are explained by two components."""
        rng = np.random.default_rng(0)
        points = rng.normal(size=(50, 2)) @ rng.normal(size=(2, 5)) + 3.0
        projection = pca_project(points, dims=2)
        self.assertEqual(projection.coordinates.shape, (50, 2))
        self.assertGreaterEqual(float(projection.explained_variance_ratio.sum()), 0.999)
        self.assertGreaterEqual(projection.explained_variance_ratio[0], projection.explained_variance_ratio[1])
        np.testing.assert_allclose(projection.coordinates.mean(axis=0), np.zeros(2), atol=1e-9)

    def test_sign_convention(self):
        """Test that each component's largest-magnitude entry is positive."""
        points = np.random.default_rng(1).normal(size=(30, 4))
        projection = pca_project(points, dims=3)
        for row in projection.components:
            self.assertGreater(row[np.argmax(np.abs(row))], 0)
        np.testing.assert_allclose(projection.components @ projection.components.T, np.eye(3), atol=1e-10)

    def test_zero_variance(self):
        """Test that identical vectors project to zeros with a flag."""
        projection = pca_project(np.ones((5, 3)), dims=2)
        self.assertTrue(projection.zero_variance)
        np.testing.assert_array_equal(projection.coordinates, np.zeros((5, 2)))

    def test_invalid_dims(self):
        """Test that only 2-D and 3-D projections of enough vectors are allowed."""
        with self.assertRaises(KGCredError):
            pca_project(np.zeros((10, 5)), dims=4)
        with self.assertRaises(KGCredError):
            pca_project(np.random.default_rng(0).normal(size=(2, 5)), dims=2)


class TestPurityAndSelection(unittest.TestCase):
    """Test cases for cluster_purity and select_entities."""

    def test_purity(self):
        """Test the majority-label share."""
        assignment = ClusterAssignment(entity_ids=[0, 1, 2, 3, 4], labels=np.array([0, 0, 0, 1, 1]),
                                       centroids=np.zeros((2, 2)), inertia=0.0)
        reference = {0: 'Labor', 1: 'Labor', 2: 'Liberal', 3: 'Liberal', 4: 'Liberal'}
        self.assertAlmostEqual(cluster_purity(assignment, reference), 0.8)
        self.assertEqual(cluster_purity(assignment, {}), 0.0)

    def test_select_entities(self):
        """Test selection by prefix and by explicit ids."""
        entities = Dictionary(['MP Ryan', 'Labor', 'MP Albright'])
        self.assertEqual(select_entities(entities, prefix='MP '), [0, 2])
        self.assertEqual(select_entities(entities), [0, 1, 2])
        self.assertEqual(select_entities(entities, ids=[1]), [1])


class TestExport(unittest.TestCase):
    """Test cases for the output files."""

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.directory = self._tmp.name

    def tearDown(self):
        self._tmp.cleanup()

    def test_projector_round_trip(self):
        """Test that exported vectors reload bit for bit."""
        vectors = np.random.default_rng(0).normal(size=(4, 3))
        labels = ['Joanne Ryan', 'Labor', 'Liberal', 'Victoria']
        export_projector(vectors, labels, os.path.join(self.directory, 'projector'))
        loaded, loaded_labels = load_projector(os.path.join(self.directory, 'projector'))
        np.testing.assert_array_equal(loaded, vectors)
        self.assertEqual(loaded_labels, labels)
        with self.assertRaises(KGCredError):
            export_projector(vectors, labels[:2], self.directory)

    def test_cluster_and_projection_files(self):
        """Test the clusters, projection and plot outputs."""
        entities = Dictionary(['a', 'b', 'c', 'd'])
        points = np.array([[0.0, 0.0], [0.0, 1.0], [5.0, 0.0], [5.0, 1.0]])
        assignment = kmeans(points, clusters=2, seed=0)
        clusters_path = os.path.join(self.directory, 'clusters.tsv')
        write_clusters_tsv(clusters_path, assignment, entities)
        with open(clusters_path, 'r', encoding='utf-8') as handle:
            rows = [line.rstrip('\n').split('\t') for line in handle]
        self.assertEqual([row[0] for row in rows], ['a', 'b', 'c', 'd'])
        self.assertEqual(rows[0][1], rows[1][1])
        self.assertNotEqual(rows[0][1], rows[2][1])

        projection = pca_project(points, dims=2)
        projection_path = os.path.join(self.directory, 'projection.tsv')
        write_projection_tsv(projection_path, projection, entities)
        with open(projection_path, 'r', encoding='utf-8') as handle:
            first = handle.readline().rstrip('\n').split('\t')
        self.assertEqual(first[0], 'a')
        self.assertEqual(float(first[1]), projection.coordinates[0, 0])

        plot_path = plot_projection(projection, os.path.join(self.directory, 'projection.png'),
                                    labels=entities.labels, clusters=assignment.labels)
        self.assertGreater(os.path.getsize(plot_path), 0)


if __name__ == '__main__':
    unittest.main()
