"""Tests for the knowledge-graph store."""

import os
import tempfile
import unittest

import numpy as np

from kgcred.models.graph import Triple, Dictionary
from kgcred.services.graph_service import KnowledgeGraph, build_graph
from kgcred.utils.errors import InvalidLabelError, UnknownIdError, ParseError, KGCredError


def grid_graph(size: int = 10) -> KnowledgeGraph:
    """Every ordered pair of `size` entities under one relation."""
    return build_graph((f"e{i}", 'linksTo', f"e{j}") for i in range(size) for j in range(size))


def random_label_graph(seed: int, entities: int, relations: int, draws: int) -> KnowledgeGraph:
    """Uniform random triples; repeated draws are stored once."""
    rng = np.random.default_rng(seed)
    return build_graph((f"e{rng.integers(0, entities)}", f"r{rng.integers(0, relations)}",
                        f"e{rng.integers(0, entities)}") for _ in range(draws))


class TestDictionary(unittest.TestCase):
    """Test cases for Dictionary."""

    def test_first_seen_ids(self):
        """Test that ids are dense in first-seen order."""
        dictionary = Dictionary()
        self.assertEqual(dictionary.intern('A'), (0, True))
        self.assertEqual(dictionary.intern('B'), (1, True))
        self.assertEqual(dictionary.intern('A'), (0, False))
        self.assertEqual(dictionary.labels, ['A', 'B'])

    def test_bijection(self):
        """Test label -> id -> label round trip."""
        dictionary = Dictionary(['x', 'y', 'z'])
        for item_id in range(len(dictionary)):
            self.assertEqual(dictionary.require_id(dictionary.label_of(item_id)), item_id)

    def test_unknown_lookups(self):
        """Test that unknown ids and labels raise."""
        dictionary = Dictionary(['x'])
        with self.assertRaises(UnknownIdError):
            dictionary.label_of(1)
        with self.assertRaises(UnknownIdError):
            dictionary.require_id('y')
        self.assertIsNone(dictionary.id_of('y'))

    def test_save_load(self):
        """Test persisting a dictionary."""
        dictionary = Dictionary(['Joanne Ryan', 'Australian Labor Party', 'Ünïcode'])
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'entities.tsv')
            dictionary.save(path)
            loaded = Dictionary.load(path)
        self.assertEqual(loaded.labels, dictionary.labels)
        self.assertEqual(loaded.checksum(), dictionary.checksum())

    def test_load_rejects_sparse_ids(self):
        """Test that non-dense ids are a parse error."""
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'entities.tsv')
            with open(path, 'w', encoding='utf-8') as handle:
                handle.write("0\tA\n2\tB\n")
            with self.assertRaises(ParseError):
                Dictionary.load(path)


class TestKnowledgeGraph(unittest.TestCase):
    """Test cases for KnowledgeGraph."""

    def test_add_triple_idempotent(self):
        """Test that adding the same triple twice stores it once."""
        graph = KnowledgeGraph()
        first = graph.add_triple('A', 'r', 'B')
        second = graph.add_triple('A', 'r', 'B')
        self.assertEqual(first, (0, False))
        self.assertEqual(second, (0, True))
        self.assertEqual(len(graph), 1)

    def test_entity_ids_first_seen(self):
        """Test that the first three distinct entities get ids 0, 1, 2."""
        graph = build_graph([('A', 'r', 'B'), ('B', 'q', 'C')])
        self.assertEqual([graph.entities.id_of(label) for label in 'ABC'], [0, 1, 2])
        self.assertEqual(graph.relations.labels, ['r', 'q'])

    def test_empty_label_rejected(self):
        """Test that empty or TAB-bearing labels raise before anything is interned."""
        graph = KnowledgeGraph()
        with self.assertRaises(InvalidLabelError):
            graph.add_triple('', 'r', 'B')
        with self.assertRaises(InvalidLabelError):
            graph.add_triple('A', 'r', 'B\tC')
        self.assertEqual(graph.num_entities, 0)
        self.assertEqual(len(graph), 0)

    def test_contains(self):
        """Test membership of stored and corrupted triples."""
        graph = build_graph([('A', 'r', 'B'), ('B', 'r', 'C')])
        self.assertTrue(graph.contains(0, 0, 1))
        self.assertFalse(graph.contains(0, 0, 2))
        with self.assertRaises(UnknownIdError):
            graph.contains(0, 0, 7)

    def test_contains_matches_linear_scan(self):
        """Test contains against a scan of the stored triples on random queries."""
        for seed in range(10):
            graph = random_label_graph(seed, entities=8, relations=2, draws=30)
            stored = [triple.as_tuple() for triple in graph.triples]
            rng = np.random.default_rng(100 + seed)
            queries = [(int(rng.integers(0, graph.num_entities)), int(rng.integers(0, graph.num_relations)),
                        int(rng.integers(0, graph.num_entities))) for _ in range(200)]
            for query in queries + stored:
                self.assertEqual(graph.contains(*query), any(triple == query for triple in stored))

    def test_contains_any_split(self):
        """Test that contains answers across every split."""
        graph = build_graph([(f"e{i}", 'r', f"e{i + 1}") for i in range(5)] + [('e0', 'r', 'e2')])
        split = graph.split((0.4, 0.3, 0.3), seed=3)
        for triple in split.triples:
            self.assertTrue(split.contains(*triple.as_tuple()))

    def test_frozen_graph_rejects_writes(self):
        """Test that a frozen graph refuses new triples."""
        graph = build_graph([('A', 'r', 'B')]).freeze()
        with self.assertRaises(KGCredError):
            graph.add_triple('B', 'r', 'C')

    def test_known_heads_and_tails(self):
        """Test the filter index."""
        graph = build_graph([('A', 'r', 'C'), ('B', 'r', 'C'), ('A', 'r', 'D')])
        a, b, c, d = (graph.entities.id_of(label) for label in 'ABCD')
        self.assertEqual(graph.known_heads(0, c), {a, b})
        self.assertEqual(graph.known_tails(a, 0), {c, d})
        self.assertEqual(graph.known_tails(b, 0), {c})

    def test_encode_and_molecule(self):
        """Test label lookup and the per-subject view."""
        graph = build_graph([
            ('Joanne Ryan', 'memberOfParty', 'Australian Labor Party'),
            ('Joanne Ryan', 'hasLocation', 'Victoria'),
            ('Tanya Albright', 'memberOfParty', 'Australian Labor Party')
        ])
        self.assertEqual(graph.encode('Joanne Ryan', 'hasLocation', 'Victoria'), Triple(0, 1, 2))
        self.assertEqual(graph.molecule('Joanne Ryan'), [
            ('Joanne Ryan', 'memberOfParty', 'Australian Labor Party'),
            ('Joanne Ryan', 'hasLocation', 'Victoria')
        ])
        self.assertEqual(graph.molecule('Nobody'), [])
        with self.assertRaises(UnknownIdError):
            graph.encode('Nobody', 'hasLocation', 'Victoria')

    def test_triples_array_without_split(self):
        """Test that an unsplit graph is all train."""
        graph = build_graph([('A', 'r', 'B'), ('B', 'r', 'C')])
        self.assertEqual(graph.triples_array('train').shape, (2, 3))
        self.assertEqual(graph.triples_array('test').shape, (0, 3))
        with self.assertRaises(KGCredError):
            graph.triples_array('holdout')


class TestSplit(unittest.TestCase):
    """Test cases for train/valid/test splitting."""

    def test_split_sizes(self):
        """Test split sizes on 100 triples."""
        split = grid_graph().split((0.8, 0.1, 0.1), seed=0)
        sizes = split.split_sizes()
        self.assertEqual(sizes, {'train': 80, 'valid': 10, 'test': 10})

    def test_split_deterministic(self):
        """Test that the same seed yields identical tags."""
        graph = grid_graph()
        self.assertEqual(graph.split((0.8, 0.1, 0.1), seed=5).tags, graph.split((0.8, 0.1, 0.1), seed=5).tags)

    def test_rare_entity_lands_in_train(self):
        """Test that a triple with a once-seen entity is trained on."""
        triples = [(f"e{i}", 'linksTo', f"e{j}") for i in range(6) for j in range(6)] + [('e0', 'linksTo', 'loner')]
        graph = build_graph(triples)
        for seed in range(20):
            split = graph.split((0.4, 0.3, 0.3), seed=seed)
            self.assertEqual(split.tags[-1], 'train')

    def test_held_out_ids_seen_in_train(self):
        """Test that every held-out entity and relation occurs in train."""
        graph = build_graph([(f"e{i}", f"r{i % 3}", f"e{(i * 7 + 1) % 25}") for i in range(60)])
        split = graph.split((0.6, 0.2, 0.2), seed=1)
        train = split.triples_array('train')
        entities = set(train[:, 0]) | set(train[:, 2])
        relations = set(train[:, 1])
        for tag in ('valid', 'test'):
            for s, p, o in split.triples_array(tag):
                self.assertIn(s, entities)
                self.assertIn(o, entities)
                self.assertIn(p, relations)

    def test_invalid_ratios(self):
        """Test that bad ratios raise."""
        with self.assertRaises(KGCredError):
            grid_graph().split((0.8, 0.1, 0.2), seed=0)

    def assert_partition(self, graph, split):
        """Every triple carries exactly one tag and the tagged sets cover the graph."""
        self.assertEqual(len(split.tags), len(graph))
        parts = {tag: {tuple(row) for row in split.triples_array(tag).tolist()} for tag in ('train', 'valid', 'test')}
        self.assertEqual(sum(len(part) for part in parts.values()), len(graph))
        self.assertEqual(parts['train'] | parts['valid'] | parts['test'],
                         {triple.as_tuple() for triple in graph.triples})

    def assert_held_out_covered(self, split):
        train = split.triples_array('train')
        entities = set(train[:, 0].tolist()) | set(train[:, 2].tolist())
        relations = set(train[:, 1].tolist())
        for tag in ('valid', 'test'):
            for s, p, o in split.triples_array(tag).tolist():
                self.assertIn(s, entities)
                self.assertIn(o, entities)
                self.assertIn(p, relations)

    def test_invariants_on_random_graphs(self):
        """Test coverage, partition and size bounds over 100 sparse random graphs."""
        ratio_choices = [(0.8, 0.1, 0.1), (0.6, 0.2, 0.2), (0.5, 0.25, 0.25), (0.7, 0.15, 0.15)]
        for seed in range(100):
            rng = np.random.default_rng(seed)
            graph = random_label_graph(seed, entities=int(rng.integers(4, 30)), relations=int(rng.integers(1, 6)),
                                       draws=int(rng.integers(5, 80)))
            ratios = ratio_choices[seed % len(ratio_choices)]
            split = graph.split(ratios, seed=seed)
            self.assert_partition(graph, split)
            self.assert_held_out_covered(split)
            sizes = split.split_sizes()
            self.assertLessEqual(sizes['valid'], int(round(len(graph) * ratios[1])))
            self.assertLessEqual(sizes['test'], int(round(len(graph) * ratios[2])))

    def test_sizes_follow_ratios_on_dense_graphs(self):
        """Test exact rounded split sizes over 100 dense random graphs."""
        for seed in range(100):
            graph = random_label_graph(seed, entities=12, relations=3, draws=150)
            split = graph.split((0.8, 0.1, 0.1), seed=seed)
            self.assert_partition(graph, split)
            self.assert_held_out_covered(split)
            sizes = split.split_sizes()
            total = len(graph)
            self.assertEqual(sizes['valid'], int(round(total * 0.1)))
            self.assertEqual(sizes['test'], int(round(total * 0.1)))
            self.assertEqual(sizes['train'], total - sizes['valid'] - sizes['test'])


class TestPersistence(unittest.TestCase):
    """Test cases for saving and loading the store."""

    def test_save_load_round_trip(self):
        """Test that save then load reproduces triples and tags."""
        split = grid_graph(6).split((0.6, 0.2, 0.2), seed=2)
        with tempfile.TemporaryDirectory() as directory:
            split.save(directory)
            loaded = KnowledgeGraph.load(directory)
        self.assertEqual(loaded.triples, split.triples)
        self.assertEqual(loaded.tags, split.tags)
        self.assertEqual(loaded.entities.labels, split.entities.labels)
        np.testing.assert_array_equal(loaded.triples_array('test'), split.triples_array('test'))

    def test_load_rejects_out_of_range_id(self):
        """Test that a triple id outside the dictionary is a parse error."""
        graph = build_graph([('A', 'r', 'B')])
        with tempfile.TemporaryDirectory() as directory:
            graph.save(directory)
            with open(os.path.join(directory, 'triples.tsv'), 'a', encoding='utf-8') as handle:
                handle.write("0\t0\t9\n")
            with self.assertRaises(ParseError):
                KnowledgeGraph.load(directory)


class TestStatistics(unittest.TestCase):
    """Test cases for graph statistics."""

    def test_statistics(self):
        """Test counts and connectivity."""
        graph = build_graph([('A', 'r', 'B'), ('B', 'r', 'C'), ('D', 'q', 'E')])
        stats = graph.statistics()
        self.assertEqual(stats.total_entities, 5)
        self.assertEqual(stats.total_relations, 2)
        self.assertEqual(stats.total_triples, 3)
        self.assertFalse(stats.is_connected)
        self.assertEqual(stats.components, 2)
        self.assertEqual(stats.max_degree, 2)
        self.assertEqual(stats.relation_counts, {'r': 2, 'q': 1})
        self.assertIn('triples: 3', stats.summary())


if __name__ == '__main__':
    unittest.main()
