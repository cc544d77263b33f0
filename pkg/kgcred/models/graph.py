"""Graph data models: triples, dictionaries and graph metadata."""

import hashlib
import os
from typing import Dict, List, Any, Optional, Tuple, Iterable
from dataclasses import dataclass, field

from ..utils.errors import InvalidLabelError, ParseError, UnknownIdError


@dataclass(frozen=True)
class Triple:
    """A dictionary-encoded (subject, predicate, object) fact."""

    subject: int
    predicate: int
    object: int

    def as_tuple(self) -> Tuple[int, int, int]:
        return (self.subject, self.predicate, self.object)

    def to_dict(self) -> Dict[str, Any]:
        """Convert triple to dictionary for JSON serialization."""
        return {
            'subject': self.subject,
            'predicate': self.predicate,
            'object': self.object
        }


class Dictionary:
    """
    Bijective label <-> id map with dense ids assigned in first-seen order.

    Labels must be non-empty and free of TAB and newline characters so the
    persisted `id TAB label` files stay parseable.
    """

    def __init__(self, labels: Optional[Iterable[str]] = None):
        self._label_to_id: Dict[str, int] = {}
        self._labels: List[str] = []
        for label in labels or []:
            self.intern(label)

    def intern(self, label: str) -> Tuple[int, bool]:
        """
        Return the id of a label, assigning the next dense id if unseen.

        Returns:
            Tuple of (id, newly_added)
        """
        existing = self._label_to_id.get(label)
        if existing is not None:
            return existing, False
        validate_label_text(label)
        new_id = len(self._labels)
        self._label_to_id[label] = new_id
        self._labels.append(label)
        return new_id, True

    def id_of(self, label: str) -> Optional[int]:
        return self._label_to_id.get(label)

    def require_id(self, label: str) -> int:
        found = self._label_to_id.get(label)
        if found is None:
            raise UnknownIdError(f"unknown label {label!r}")
        return found

    def label_of(self, item_id: int) -> str:
        if not 0 <= item_id < len(self._labels):
            raise UnknownIdError(f"id {item_id} outside 0..{len(self._labels) - 1}")
        return self._labels[item_id]

    @property
    def labels(self) -> List[str]:
        return list(self._labels)

    def __len__(self) -> int:
        return len(self._labels)

    def __contains__(self, label: object) -> bool:
        return label in self._label_to_id

    def copy(self) -> 'Dictionary':
        return Dictionary(self._labels)

    def checksum(self) -> str:
        """SHA-256 over the labels in id order."""
        digest = hashlib.sha256()
        for label in self._labels:
            digest.update(label.encode('utf-8'))
            digest.update(b'\n')
        return digest.hexdigest()

    def save(self, path: str) -> None:
        with open(path, 'w', encoding='utf-8', newline='\n') as handle:
            for item_id, label in enumerate(self._labels):
                handle.write(f"{item_id}\t{label}\n")

    @classmethod
    def load(cls, path: str) -> 'Dictionary':
        dictionary = cls()
        with open(path, 'r', encoding='utf-8', newline='') as handle:
            for line_number, line in enumerate(handle, start=1):
                line = line.rstrip('\n')
                if not line:
                    continue
                parts = line.split('\t', 1)
                if len(parts) != 2 or not parts[0].isdigit():
                    raise ParseError("expected 'id<TAB>label'", path=path, line=line_number)
                item_id, added = dictionary.intern(parts[1])
                if not added or item_id != int(parts[0]):
                    raise ParseError(f"ids must be dense and unique, got {parts[0]}", path=path, line=line_number)
        return dictionary


def validate_label_text(label: str, slot: Optional[str] = None, line: Optional[int] = None) -> None:
    """Reject empty labels and labels that would corrupt the TSV store."""
    if not isinstance(label, str) or not label.strip():
        raise InvalidLabelError("empty label", slot=slot, line=line)
    if '\t' in label or '\n' in label or '\r' in label:
        raise InvalidLabelError(f"label {label!r} contains TAB or newline", slot=slot, line=line)


@dataclass
class GraphMetadata:
    """Summary statistics about a knowledge graph."""

    total_entities: int
    total_relations: int
    total_triples: int
    graph_density: float
    is_connected: bool
    components: int
    average_degree: float
    max_degree: int
    split_sizes: Dict[str, int] = field(default_factory=dict)
    relation_counts: Dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        """Convert metadata to dictionary for JSON serialization."""
        return {
            'total_entities': self.total_entities,
            'total_relations': self.total_relations,
            'total_triples': self.total_triples,
            'graph_density': self.graph_density,
            'is_connected': self.is_connected,
            'components': self.components,
            'average_degree': self.average_degree,
            'max_degree': self.max_degree,
            'split_sizes': dict(self.split_sizes),
            'relation_counts': dict(self.relation_counts)
        }

    def summary(self) -> str:
        lines = [
            f"entities: {self.total_entities}",
            f"relations: {self.total_relations}",
            f"triples: {self.total_triples}",
            f"density: {self.graph_density:.6f}",
            f"weakly connected: {self.is_connected} ({self.components} components)",
            f"degree: avg {self.average_degree:.3f}, max {self.max_degree}",
        ]
        if self.split_sizes:
            lines.append("splits: " + ", ".join(f"{tag}={size}" for tag, size in self.split_sizes.items()))
        for relation, count in self.relation_counts.items():
            lines.append(f"  {relation}: {count}")
        return "\n".join(lines)


def dictionary_paths(directory: str) -> Tuple[str, str]:
    return os.path.join(directory, 'entities.tsv'), os.path.join(directory, 'relations.tsv')
