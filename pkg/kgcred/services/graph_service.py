"""Dictionary-encoded triple store with splitting and persistence."""

import logging
import os
from typing import Dict, List, Set, Optional, Tuple, Iterable

import networkx as nx
import numpy as np

from ..models.graph import Triple, Dictionary, GraphMetadata, dictionary_paths, validate_label_text
from ..utils.errors import ParseError, UnknownIdError, KGCredError
from ..utils.validators import validate_split_ratios

logger = logging.getLogger(__name__)

SPLIT_TAGS = ('train', 'valid', 'test')

LabelTriple = Tuple[str, str, str]


class KnowledgeGraph:
    """
    Triple store over separate entity and relation dictionaries.

    Construction is single-writer. After `freeze()` the graph rejects writes
    and may be shared by concurrent readers.
    """

    def __init__(self, entities: Optional[Dictionary] = None, relations: Optional[Dictionary] = None):
        self.entities = entities or Dictionary()
        self.relations = relations or Dictionary()
        self.triples: List[Triple] = []
        self.tags: Optional[List[str]] = None
        self._index: Dict[Triple, int] = {}
        self._heads: Optional[Dict[Tuple[int, int], Set[int]]] = None
        self._tails: Optional[Dict[Tuple[int, int], Set[int]]] = None
        self._frozen = False

    @property
    def num_entities(self) -> int:
        return len(self.entities)

    @property
    def num_relations(self) -> int:
        return len(self.relations)

    @property
    def is_frozen(self) -> bool:
        return self._frozen

    def __len__(self) -> int:
        return len(self.triples)

    def freeze(self) -> 'KnowledgeGraph':
        self._build_filter_index()
        self._frozen = True
        return self

    def add_triple(self, subject: str, predicate: str, obj: str, line: Optional[int] = None) -> Tuple[int, bool]:
        """
        Intern the labels and append the triple.

        Args:
            subject: Subject label
            predicate: Predicate label
            obj: Object label
            line: Source line, reported in label errors

        Returns:
            Tuple of (triple_id, is_duplicate)
        """
        if self._frozen:
            raise KGCredError("knowledge graph is frozen")
        for slot, label in (('subject', subject), ('predicate', predicate), ('object', obj)):
            validate_label_text(label, slot=slot, line=line)

        s_id, _ = self.entities.intern(subject)
        p_id, _ = self.relations.intern(predicate)
        o_id, _ = self.entities.intern(obj)
        return self._append(Triple(s_id, p_id, o_id))

    def add_triples(self, label_triples: Iterable[LabelTriple]) -> int:
        """Add many label triples; returns the number of duplicates skipped."""
        duplicates = 0
        for subject, predicate, obj in label_triples:
            _, is_duplicate = self.add_triple(subject, predicate, obj)
            duplicates += int(is_duplicate)
        if duplicates:
            logger.info("Skipped %d duplicate triples", duplicates)
        return duplicates

    def _append(self, triple: Triple) -> Tuple[int, bool]:
        existing = self._index.get(triple)
        if existing is not None:
            return existing, True
        triple_id = len(self.triples)
        self.triples.append(triple)
        self._index[triple] = triple_id
        if self.tags is not None:
            self.tags.append('train')
        self._heads = None
        self._tails = None
        return triple_id, False

    def _check_ids(self, s: int, p: int, o: int) -> None:
        for name, value, bound in (('subject', s, self.num_entities), ('predicate', p, self.num_relations),
                                   ('object', o, self.num_entities)):
            if not 0 <= int(value) < bound:
                raise UnknownIdError(f"{name} id {value} outside 0..{bound - 1}")

    def contains(self, s: int, p: int, o: int) -> bool:
        """True iff the triple exists in any split."""
        self._check_ids(s, p, o)
        return Triple(int(s), int(p), int(o)) in self._index

    def _build_filter_index(self) -> None:
        heads: Dict[Tuple[int, int], Set[int]] = {}
        tails: Dict[Tuple[int, int], Set[int]] = {}
        for triple in self.triples:
            heads.setdefault((triple.predicate, triple.object), set()).add(triple.subject)
            tails.setdefault((triple.subject, triple.predicate), set()).add(triple.object)
        self._heads = heads
        self._tails = tails

    def known_heads(self, p: int, o: int) -> Set[int]:
        """Subjects s with (s, p, o) stored in any split."""
        if self._heads is None:
            self._build_filter_index()
        return self._heads.get((int(p), int(o)), set())

    def known_tails(self, s: int, p: int) -> Set[int]:
        """Objects o with (s, p, o) stored in any split."""
        if self._tails is None:
            self._build_filter_index()
        return self._tails.get((int(s), int(p)), set())

    def label_triple(self, triple: Triple) -> LabelTriple:
        return (self.entities.label_of(triple.subject),
                self.relations.label_of(triple.predicate),
                self.entities.label_of(triple.object))

    def encode(self, subject: str, predicate: str, obj: str) -> Triple:
        """Look up a label triple without interning; unknown labels raise."""
        return Triple(self.entities.require_id(subject),
                      self.relations.require_id(predicate),
                      self.entities.require_id(obj))

    def molecule(self, subject: str) -> List[LabelTriple]:
        """All triples sharing one subject, in insertion order."""
        s_id = self.entities.id_of(subject)
        if s_id is None:
            return []
        return [self.label_triple(triple) for triple in self.triples if triple.subject == s_id]

    def triples_array(self, tag: Optional[str] = None) -> np.ndarray:
        """Triples as an (n, 3) int64 array, optionally restricted to one split."""
        if tag is not None and tag not in SPLIT_TAGS:
            raise KGCredError(f"unknown split tag {tag!r}")
        if tag is None:
            selected = self.triples
        elif self.tags is None:
            selected = self.triples if tag == 'train' else []
        else:
            selected = [triple for triple, current in zip(self.triples, self.tags) if current == tag]
        if not selected:
            return np.zeros((0, 3), dtype=np.int64)
        return np.array([triple.as_tuple() for triple in selected], dtype=np.int64)

    def split_sizes(self) -> Dict[str, int]:
        if self.tags is None:
            return {}
        return {tag: self.tags.count(tag) for tag in SPLIT_TAGS}

    def split(self, ratios: Tuple[float, float, float], seed: int) -> 'KnowledgeGraph':
        """
        Assign train/valid/test tags deterministically.

        Triples in valid/test whose entities or relation never occur in train are
        moved to train, so every evaluated id has been trained.

        Args:
            ratios: (train, valid, test) fractions, positive and summing to 1
            seed: Seed of the permutation

        Returns:
            A new graph sharing the dictionaries, with tags set
        """
        is_valid, error_msg, cleaned = validate_split_ratios(ratios)
        if not is_valid:
            raise KGCredError(error_msg)
        _, valid_ratio, test_ratio = cleaned

        total = len(self.triples)
        rng = np.random.default_rng(seed)
        order = rng.permutation(total)
        n_valid = int(round(total * valid_ratio))
        n_test = int(round(total * test_ratio))
        n_train = total - n_valid - n_test

        tags = ['train'] * total
        for position, index in enumerate(order):
            if position >= n_train + n_valid:
                tags[index] = 'test'
            elif position >= n_train:
                tags[index] = 'valid'

        seen_entities: Set[int] = set()
        seen_relations: Set[int] = set()
        for triple, tag in zip(self.triples, tags):
            if tag == 'train':
                seen_entities.update((triple.subject, triple.object))
                seen_relations.add(triple.predicate)

        reassigned = 0
        for index in order[n_train:]:
            triple = self.triples[index]
            if (triple.subject not in seen_entities or triple.object not in seen_entities
                    or triple.predicate not in seen_relations):
                tags[index] = 'train'
                seen_entities.update((triple.subject, triple.object))
                seen_relations.add(triple.predicate)
                reassigned += 1
        if reassigned:
            logger.info("Reassigned %d held-out triples to train for coverage", reassigned)

        result = KnowledgeGraph(self.entities.copy(), self.relations.copy())
        for triple in self.triples:
            result._append(triple)
        result.tags = tags
        return result

    def save(self, directory: str) -> None:
        """Persist the dictionaries, triples and (if present) split tags."""
        os.makedirs(directory, exist_ok=True)
        entities_path, relations_path = dictionary_paths(directory)
        self.entities.save(entities_path)
        self.relations.save(relations_path)
        with open(os.path.join(directory, 'triples.tsv'), 'w', encoding='utf-8', newline='\n') as handle:
            for triple in self.triples:
                handle.write(f"{triple.subject}\t{triple.predicate}\t{triple.object}\n")
        splits_path = os.path.join(directory, 'splits.tsv')
        if self.tags is not None:
            with open(splits_path, 'w', encoding='utf-8', newline='\n') as handle:
                for index, tag in enumerate(self.tags):
                    handle.write(f"{index}\t{tag}\n")
        elif os.path.exists(splits_path):
            os.remove(splits_path)

    @classmethod
    def load(cls, directory: str) -> 'KnowledgeGraph':
        entities_path, relations_path = dictionary_paths(directory)
        graph = cls(Dictionary.load(entities_path), Dictionary.load(relations_path))
        triples_path = os.path.join(directory, 'triples.tsv')
        with open(triples_path, 'r', encoding='utf-8') as handle:
            for line_number, line in enumerate(handle, start=1):
                line = line.strip()
                if not line:
                    continue
                parts = line.split('\t')
                if len(parts) != 3:
                    raise ParseError("expected three id columns", path=triples_path, line=line_number)
                try:
                    s, p, o = (int(part) for part in parts)
                    graph._check_ids(s, p, o)
                except (ValueError, UnknownIdError) as e:
                    raise ParseError(str(e), path=triples_path, line=line_number)
                graph._append(Triple(s, p, o))

        splits_path = os.path.join(directory, 'splits.tsv')
        if os.path.exists(splits_path):
            tags = ['train'] * len(graph.triples)
            with open(splits_path, 'r', encoding='utf-8') as handle:
                for line_number, line in enumerate(handle, start=1):
                    line = line.strip()
                    if not line:
                        continue
                    parts = line.split('\t')
                    if len(parts) != 2 or parts[1] not in SPLIT_TAGS or not parts[0].isdigit():
                        raise ParseError("expected 'index<TAB>train|valid|test'", path=splits_path, line=line_number)
                    index = int(parts[0])
                    if index >= len(tags):
                        raise ParseError(f"triple index {index} out of range", path=splits_path, line=line_number)
                    tags[index] = parts[1]
            graph.tags = tags
        return graph

    def to_networkx(self) -> nx.MultiDiGraph:
        """Labelled multigraph view: nodes are entities, keyed edges are relations."""
        graph = nx.MultiDiGraph()
        graph.add_nodes_from(self.entities.labels)
        for index, triple in enumerate(self.triples):
            subject, predicate, obj = self.label_triple(triple)
            tag = self.tags[index] if self.tags is not None else 'train'
            graph.add_edge(subject, obj, key=predicate, split=tag)
        return graph

    def statistics(self) -> GraphMetadata:
        """
        Get statistics about the graph.

        Returns:
            GraphMetadata with counts, connectivity and per-relation fact counts
        """
        graph = self.to_networkx()
        node_count = graph.number_of_nodes()
        degrees = dict(graph.degree())
        relation_counts: Dict[str, int] = {label: 0 for label in self.relations.labels}
        for triple in self.triples:
            relation_counts[self.relations.label_of(triple.predicate)] += 1

        return GraphMetadata(
            total_entities=self.num_entities,
            total_relations=self.num_relations,
            total_triples=len(self.triples),
            graph_density=nx.density(graph) if node_count > 1 else 0.0,
            is_connected=nx.is_weakly_connected(graph) if node_count else False,
            components=nx.number_weakly_connected_components(graph) if node_count else 0,
            average_degree=sum(degrees.values()) / node_count if node_count else 0.0,
            max_degree=max(degrees.values()) if degrees else 0,
            split_sizes=self.split_sizes(),
            relation_counts=relation_counts
        )


def build_graph(label_triples: Iterable[LabelTriple]) -> KnowledgeGraph:
    """Build a graph from label triples in order."""
    graph = KnowledgeGraph()
    graph.add_triples(label_triples)
    return graph
