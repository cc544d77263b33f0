"""Tests for losses, optimizers, training and random search."""

import json
import math
import os
import tempfile
import unittest

import numpy as np

from kgcred.models.parameters import ModelParameters, Gradient, init_params
from kgcred.models.training import TrainingConfig, SearchSpace
from kgcred.services.evaluation_service import evaluate_ranking
from kgcred.services.fixture_service import build_fixture
from kgcred.services.graph_service import build_graph
from kgcred.services.ingest_service import load_domains, load_politics_domain
from kgcred.services.optimizers import SGD, Adagrad, Adam, Momentum, make_optimizer
from kgcred.services.training_service import (
    sample_negatives, loss_with_grads, compute_loss, regularize, train, random_search, write_trial_log
)
from kgcred.utils.errors import KGCredError, TrainingDivergedError

DOMAINS_FILE = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'resources', 'domains.json')


def party_graph():
    """Two parties of ten politicians with party-specific policies, states and topics."""
    triples = []
    for party in ('Labor', 'Liberal'):
        for index in range(10):
            name = f"{party} MP {index}"
            triples.append((name, 'memberOfParty', party))
            triples.append((name, 'supports', f"{party} policy {index % 3}"))
            triples.append((name, 'hasLocation', f"{party} state {index % 2}"))
            triples.append((name, 'hasMentioned', f"{party} topic {index % 4}"))
    return build_graph(triples).split((0.7, 0.15, 0.15), seed=0)


def scalar_params(values):
    rows = np.asarray(values, dtype=np.float64).reshape(-1, 1)
    return ModelParameters(kind='distmult', k=1, entities=rows, relations=np.zeros((1, 1)))


def scalar_gradient(ids, values):
    return Gradient(
        entity_ids=np.asarray(ids, dtype=np.int64),
        entity_rows=np.asarray(values, dtype=np.float64).reshape(-1, 1),
        relation_ids=np.zeros(0, dtype=np.int64),
        relation_rows=np.zeros((0, 1))
    )


class TestNegativeSampling(unittest.TestCase):
    """Test cases for sample_negatives."""

    def setUp(self):
        self.batch = np.array([[0, 0, 1], [2, 1, 3], [4, 0, 5], [6, 1, 7]], dtype=np.int64)

    def test_corrupts_exactly_one_side(self):
        """Test eta corruptions per positive, each replacing head or tail."""
        negatives = sample_negatives(self.batch, 5, 10, np.random.default_rng(0))
        self.assertEqual(negatives.shape, (20, 3))
        for index, negative in enumerate(negatives):
            positive = self.batch[index // 5]
            self.assertEqual(negative[1], positive[1])
            changed = [slot for slot in (0, 2) if negative[slot] != positive[slot]]
            self.assertEqual(len(changed), 1)
            self.assertTrue(0 <= negative[changed[0]] < 10)

    def test_deterministic(self):
        """Test that equal generator seeds give equal corruptions."""
        first = sample_negatives(self.batch, 3, 10, np.random.default_rng(4))
        second = sample_negatives(self.batch, 3, 10, np.random.default_rng(4))
        np.testing.assert_array_equal(first, second)

    def test_invalid_arguments(self):
        """Test that too few entities or eta < 1 raise."""
        rng = np.random.default_rng(0)
        with self.assertRaises(KGCredError):
            sample_negatives(self.batch, 5, 1, rng)
        with self.assertRaises(KGCredError):
            sample_negatives(self.batch, 0, 10, rng)


class TestLosses(unittest.TestCase):
    """Test cases for the loss functions."""

    def test_pairwise(self):
        """Test the margin ranking loss."""
        config = TrainingConfig(model='transe', loss='pairwise', margin=0.5)
        self.assertEqual(compute_loss(1.0, [0.2], config), 0.0)
        self.assertAlmostEqual(compute_loss(0.2, [1.0], config), 1.3)

    def test_nll_without_negatives(self):
        """Test that nll at score 0 without negatives is ln 2."""
        config = TrainingConfig(model='distmult', loss='nll')
        self.assertAlmostEqual(compute_loss(0.0, [], config), math.log(2))

    def test_absolute_margin(self):
        """Test the absolute margin loss."""
        config = TrainingConfig(model='transe', loss='absolute_margin', margin=1.0)
        self.assertAlmostEqual(compute_loss(0.25, [0.5, -2.0], config), 1.25)

    def test_unknown_loss(self):
        """Test that an unknown loss raises."""
        with self.assertRaises(KGCredError):
            loss_with_grads(np.zeros(1), np.zeros((1, 1)), 'hinge')

    def test_gradients_match_finite_differences(self):
        """Test loss derivatives with respect to every score."""
        rng = np.random.default_rng(7)
        eps = 1e-6
        for loss in ('pairwise', 'nll', 'absolute_margin'):
            f_pos = rng.normal(size=4)
            f_neg = rng.normal(size=(4, 3))
            _, d_pos, d_neg = loss_with_grads(f_pos, f_neg, loss, 0.7)
            for index in range(4):
                up, down = f_pos.copy(), f_pos.copy()
                up[index] += eps
                down[index] -= eps
                numeric = (loss_with_grads(up, f_neg, loss, 0.7)[0] - loss_with_grads(down, f_neg, loss, 0.7)[0]) / (2 * eps)
                self.assertAlmostEqual(d_pos[index], numeric, places=5, msg=loss)
                for column in range(3):
                    up, down = f_neg.copy(), f_neg.copy()
                    up[index, column] += eps
                    down[index, column] -= eps
                    numeric = (loss_with_grads(f_pos, up, loss, 0.7)[0]
                               - loss_with_grads(f_pos, down, loss, 0.7)[0]) / (2 * eps)
                    self.assertAlmostEqual(d_neg[index, column], numeric, places=5, msg=loss)


class TestRegularize(unittest.TestCase):
    """Test cases for the LP penalty."""

    def test_penalties(self):
        """Test penalty values and gradients."""
        penalty, grad = regularize(np.array([[3.0, 4.0]]), 0.0, 2)
        self.assertEqual(penalty, 0.0)
        np.testing.assert_array_equal(grad, [[0.0, 0.0]])

        penalty, grad = regularize(np.array([[3.0, 4.0]]), 1.0, 2)
        self.assertAlmostEqual(penalty, 25.0)
        np.testing.assert_allclose(grad, [[6.0, 8.0]])

        penalty, grad = regularize(np.array([[2.0]]), 0.5, 3)
        self.assertAlmostEqual(penalty, 4.0)
        np.testing.assert_allclose(grad, [[6.0]])

        penalty, grad = regularize(np.array([[-2.0, 1.0]]), 1.0, 1)
        self.assertAlmostEqual(penalty, 3.0)
        np.testing.assert_allclose(grad, [[-1.0, 1.0]])

    def test_invalid_norm(self):
        """Test that p outside 1..3 raises."""
        with self.assertRaises(KGCredError):
            regularize(np.ones((1, 2)), 1.0, 4)


class TestOptimizers(unittest.TestCase):
    """Test cases for the optimizers."""

    def test_sgd(self):
        """Test one SGD step."""
        params = scalar_params([1.0])
        SGD(0.1).step(params, scalar_gradient([0], [2.0]))
        self.assertAlmostEqual(params.entities[0, 0], 0.8)

    def test_adagrad(self):
        """Test that Adagrad steps shrink with accumulated gradients."""
        params = scalar_params([0.0])
        optimizer = Adagrad(1.0, epsilon=0.0)
        optimizer.step(params, scalar_gradient([0], [1.0]))
        self.assertAlmostEqual(params.entities[0, 0], -1.0)
        optimizer.step(params, scalar_gradient([0], [1.0]))
        self.assertAlmostEqual(params.entities[0, 0], -1.0 - 1.0 / math.sqrt(2))

    def test_adam_first_step(self):
        """Test that the first Adam step moves by about the learning rate."""
        params = scalar_params([1.0])
        Adam(0.01).step(params, scalar_gradient([0], [2.0]))
        self.assertAlmostEqual(params.entities[0, 0], 0.99, places=6)

    def test_momentum(self):
        """Test that momentum accumulates velocity."""
        params = scalar_params([0.0])
        optimizer = Momentum(0.1, momentum=0.5)
        optimizer.step(params, scalar_gradient([0], [1.0]))
        optimizer.step(params, scalar_gradient([0], [1.0]))
        self.assertAlmostEqual(params.entities[0, 0], -0.1 - 0.15)

    def test_untouched_rows_unchanged(self):
        """Test that rows absent from the gradient keep values and state."""
        params = scalar_params([1.0, 1.0])
        optimizer = Adagrad(1.0, epsilon=0.0)
        optimizer.step(params, scalar_gradient([0], [1.0]))
        self.assertEqual(params.entities[1, 0], 1.0)
        optimizer.step(params, scalar_gradient([1], [1.0]))
        # row 1 takes a full first step
        self.assertAlmostEqual(params.entities[1, 0], 0.0)

    def test_non_finite_gradient(self):
        """Test that a NaN gradient raises and leaves parameters untouched."""
        params = scalar_params([1.0])
        with self.assertRaises(TrainingDivergedError):
            SGD(0.1).step(params, scalar_gradient([0], [float('nan')]))
        self.assertEqual(params.entities[0, 0], 1.0)

    def test_make_optimizer(self):
        """Test optimizer selection and learning-rate validation."""
        self.assertIsInstance(make_optimizer(TrainingConfig(model='transe', optimizer='adam')), Adam)
        self.assertIsInstance(make_optimizer(TrainingConfig(model='transe', optimizer='sgd')), SGD)
        with self.assertRaises(KGCredError):
            SGD(0.0)
        with self.assertRaises(KGCredError):
            make_optimizer(TrainingConfig(model='transe', optimizer='rmsprop'))


class TestTrain(unittest.TestCase):
    """Test cases for train."""

    @classmethod
    def setUpClass(cls):
        cls.graph = party_graph()

    def config(self, **changes):
        raw = {'model': 'transe', 'k': 8, 'epochs': 15, 'batches_count': 3, 'eta': 3, 'seed': 11}
        raw.update(changes)
        return TrainingConfig.from_dict(raw)

    def test_deterministic(self):
        """Test that the same seed reproduces parameters and losses."""
        first = train(self.graph, self.config())
        second = train(self.graph, self.config())
        self.assertTrue(first.params.equals(second.params))
        self.assertEqual(first.loss_trace, second.loss_trace)
        other = train(self.graph, self.config(seed=12))
        self.assertFalse(first.params.equals(other.params))

    def test_loss_decreases(self):
        """Test that the mean loss falls over training for every model."""
        for kind, loss in (('transe', 'pairwise'), ('distmult', 'nll'), ('complex', 'nll'),
                           ('hole', 'pairwise'), ('convkb', 'nll')):
            result = train(self.graph, self.config(model=kind, loss=loss, epochs=30, num_filters=4))
            self.assertEqual(len(result.loss_trace), 30)
            self.assertLess(np.mean(result.loss_trace[-5:]), result.loss_trace[0], msg=kind)
            self.assertTrue(result.params.is_finite())

    def test_transe_rows_stay_normalized(self):
        """Test that TransE entity rows keep unit length."""
        result = train(self.graph, self.config())
        norms = np.linalg.norm(result.params.entities, axis=1)
        np.testing.assert_allclose(norms, np.ones_like(norms), rtol=1e-9)

    def test_regularized_training(self):
        """Test training with the LP regularizer and SGD."""
        result = train(self.graph, self.config(model='distmult', regularizer='lp', lambda_reg=1e-3,
                                               lp_norm=3, optimizer='sgd', lr=0.01))
        self.assertTrue(result.params.is_finite())

    def test_learns_structure(self):
        """Test that trained embeddings rank test triples better than initial ones."""
        config = self.config(k=16, epochs=60, eta=5, batches_count=4)
        trained = train(self.graph, config).params
        initial = init_params('transe', 16, config.seed, self.graph.num_entities, self.graph.num_relations)
        trained_mrr = evaluate_ranking(trained, self.graph, tag='test').mrr
        initial_mrr = evaluate_ranking(initial, self.graph, tag='test').mrr
        self.assertGreater(trained_mrr, initial_mrr)

    def test_invalid_runs(self):
        """Test that zero epochs and empty splits are rejected."""
        with self.assertRaises(KGCredError):
            TrainingConfig.from_dict({'model': 'transe', 'epochs': 0})
        with self.assertRaises(KGCredError):
            train(self.graph, TrainingConfig(model='transe', epochs=0))
        unsplit = build_graph([('A', 'r', 'B'), ('B', 'r', 'C')])
        with self.assertRaises(KGCredError):
            train(unsplit, TrainingConfig(model='transe', epochs=1), tag='test')


class TestRandomSearch(unittest.TestCase):
    """Test cases for random_search."""

    @classmethod
    def setUpClass(cls):
        cls.graph = party_graph()
        cls.fixed = {'epochs': 3, 'batches_count': 2, 'eta': 2}

    def space(self, **candidates):
        return SearchSpace(model='distmult', candidates=candidates or {'k': [4, 8], 'lr': [0.05, 0.2]},
                           fixed=dict(self.fixed))

    def test_best_dominates(self):
        """Test that the best trial has the highest validation MRR."""
        best, results, training = random_search(self.space(), 3, self.graph, seed=0)
        self.assertEqual(len(results), 3)
        self.assertEqual([trial.trial_id for trial in results], [1, 2, 3])
        for trial in results:
            self.assertGreaterEqual(best.mrr, trial.mrr)
        self.assertEqual(training.config, best.config)

    def test_single_trial(self):
        """Test that one trial returns its own configuration."""
        best, results, _ = random_search(self.space(), 1, self.graph, seed=2)
        self.assertIs(best, results[0])
        self.assertEqual(best.config.epochs, 3)

    def test_ties_keep_earlier_trial(self):
        """Test that identical trials resolve to the first."""
        best, results, _ = random_search(self.space(k=[4]), 2, self.graph, seed=1)
        self.assertEqual(results[0].mrr, results[1].mrr)
        self.assertEqual(best.trial_id, 1)

    def test_deterministic(self):
        """Test that the same seed samples and scores the same trials."""
        _, first, _ = random_search(self.space(), 2, self.graph, seed=5)
        _, second, _ = random_search(self.space(), 2, self.graph, seed=5)
        self.assertEqual([trial.sampled for trial in first], [trial.sampled for trial in second])
        self.assertEqual([trial.mrr for trial in first], [trial.mrr for trial in second])

    def test_invalid_search(self):
        """Test that zero trials, an unsplit graph and empty candidates raise."""
        with self.assertRaises(KGCredError):
            random_search(self.space(), 0, self.graph, seed=0)
        with self.assertRaises(KGCredError):
            random_search(self.space(), 1, build_graph([('A', 'r', 'B')]), seed=0)
        with self.assertRaises(KGCredError):
            SearchSpace(model='distmult', candidates={'k': []})

    def test_trial_log(self):
        """Test the trial log rows."""
        _, results, _ = random_search(self.space(), 2, self.graph, seed=3)
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'trials.tsv')
            write_trial_log(path, results)
            with open(path, 'r', encoding='utf-8') as handle:
                rows = [line.rstrip('\n').split('\t') for line in handle]
        self.assertEqual([row[0] for row in rows], ['1', '2'])
        self.assertEqual(json.loads(rows[0][1]), results[0].sampled)
        self.assertAlmostEqual(float(rows[1][2]), results[1].mrr)


class TestFixtureLearnability(unittest.TestCase):
    """Test cases for link prediction on the politics fixture."""

    @classmethod
    def setUpClass(cls):
        domains = load_domains(DOMAINS_FILE)
        triples, _, _, _ = build_fixture(0, domains, load_politics_domain(DOMAINS_FILE, domains))
        cls.graph = build_graph(triples).split((0.8, 0.1, 0.1), seed=0)

    def test_hits_at_3(self):
        """Test that TransE, DistMult and ComplEx reach filtered Hits@3 >= 0.9."""
        for kind in ('transe', 'distmult', 'complex'):
            config = TrainingConfig.from_dict({'model': kind, 'k': 16, 'eta': 5, 'loss': 'pairwise',
                                               'optimizer': 'adagrad', 'lr': 0.1, 'epochs': 200,
                                               'batches_count': 10, 'seed': 0})
            params = train(self.graph, config).params
            report = evaluate_ranking(params, self.graph, tag='test', filtered=True)
            self.assertGreaterEqual(report.hits(3), 0.9, msg=kind)


if __name__ == '__main__':
    unittest.main()
