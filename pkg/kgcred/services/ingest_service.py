"""Parsing of triple files, user records, tables and mapping rules."""

import csv
import io
import json
import logging
import os
from typing import List, Optional, Sequence, Tuple, Protocol

from ..models.records import UserRecord, UserRecordFormatter, MappingRule, Table, Tweet, DomainScore
from ..utils.errors import ParseError, RecordValidationError, MappingError

logger = logging.getLogger(__name__)

LabelTriple = Tuple[str, str, str]
LabelledFact = Tuple[str, str, str, bool]


def _read_utf8_lines(path: str) -> List[str]:
    """Decode a file strictly as UTF-8; decode errors cite the line number."""
    with open(path, 'rb') as handle:
        data = handle.read()
    try:
        text = data.decode('utf-8')
    except UnicodeDecodeError as e:
        line = data[:e.start].count(b'\n') + 1
        raise ParseError(f"invalid UTF-8 ({e.reason})", path=path, line=line)
    if text.startswith('\ufeff'):
        text = text[1:]
    return text.split('\n')


def parse_triples_tsv(path: str) -> List[LabelTriple]:
    """
    Parse a TAB-separated triple file.

    Blank lines and lines starting with '#' are skipped; every column is trimmed.

    Args:
        path: UTF-8 file with subject, predicate, object columns

    Returns:
        List of label triples in file order
    """
    triples = []
    for line_number, raw_line in enumerate(_read_utf8_lines(path), start=1):
        line = raw_line.strip()
        if not line or line.startswith('#'):
            continue
        columns = [column.strip() for column in line.split('\t')]
        if len(columns) != 3:
            raise ParseError(f"expected 3 TAB-separated columns, found {len(columns)}", path=path, line=line_number)
        if not all(columns):
            raise ParseError("empty label", path=path, line=line_number)
        triples.append((columns[0], columns[1], columns[2]))
    return triples


def write_triples_tsv(path: str, triples: Sequence[LabelTriple]) -> None:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='\n') as handle:
        for subject, predicate, obj in triples:
            handle.write(f"{subject}\t{predicate}\t{obj}\n")


def parse_labelled_facts(path: str) -> List[LabelledFact]:
    """Parse subject, predicate, object, label(true|false) rows."""
    facts = []
    for line_number, raw_line in enumerate(_read_utf8_lines(path), start=1):
        line = raw_line.strip()
        if not line or line.startswith('#'):
            continue
        columns = [column.strip() for column in line.split('\t')]
        if len(columns) != 4:
            raise ParseError(f"expected 4 TAB-separated columns, found {len(columns)}", path=path, line=line_number)
        label = columns[3].lower()
        if label not in ('true', 'false'):
            raise ParseError(f"label must be true or false, got {columns[3]!r}", path=path, line=line_number)
        facts.append((columns[0], columns[1], columns[2], label == 'true'))
    return facts


def write_labelled_facts(path: str, facts: Sequence[LabelledFact]) -> None:
    with open(path, 'w', encoding='utf-8', newline='\n') as handle:
        for subject, predicate, obj, label in facts:
            handle.write(f"{subject}\t{predicate}\t{obj}\t{'true' if label else 'false'}\n")


def load_domains(path: str) -> List[str]:
    """Load the canonical domain labels."""
    with open(path, 'r', encoding='utf-8') as handle:
        data = json.load(handle)
    domains = data.get('domains') if isinstance(data, dict) else data
    if not isinstance(domains, list) or not domains or len(set(domains)) != len(domains):
        raise ParseError("expected a non-empty list of distinct domain labels", path=path)
    return [str(domain) for domain in domains]


def parse_user_records(path: str, domains: Optional[Sequence[str]] = None) -> List[UserRecord]:
    """
    Parse newline-delimited JSON user records.

    Args:
        path: One JSON object per line
        domains: Canonical domain labels used to validate scores

    Returns:
        List of UserRecord in file order

    Raises:
        RecordValidationError: citing the line and field path of the first bad record
    """
    records = []
    for line_number, raw_line in enumerate(_read_utf8_lines(path), start=1):
        line = raw_line.strip()
        if not line:
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as e:
            raise ParseError(f"invalid JSON ({e.msg})", path=path, line=line_number)
        try:
            records.append(UserRecordFormatter.format_record(raw, domains))
        except RecordValidationError as e:
            raise RecordValidationError(e.reason, e.field_path, path=path, line=line_number)
    logger.info("Parsed %d user records from %s", len(records), path)
    return records


def write_user_records(path: str, records: Sequence[UserRecord]) -> None:
    with open(path, 'w', encoding='utf-8', newline='\n') as handle:
        for record in records:
            handle.write(json.dumps(record.to_dict(), ensure_ascii=False, sort_keys=True) + '\n')


class DomainScoreProvider(Protocol):
    """Source of per-tweet domain scores (text and linked pages)."""

    def tweet_scores(self, tweet: Tweet) -> List[DomainScore]:
        ...

    def url_scores(self, tweet: Tweet) -> List[DomainScore]:
        ...


class RecordDomainScoreProvider:
    """Reads the scores shipped inside the user records."""

    def tweet_scores(self, tweet: Tweet) -> List[DomainScore]:
        return tweet.domain_scores

    def url_scores(self, tweet: Tweet) -> List[DomainScore]:
        return tweet.url_domain_scores


def read_table(path: str) -> Table:
    """Read a CSV (or .tsv) file whose first row is the header."""
    text = '\n'.join(_read_utf8_lines(path))
    delimiter = '\t' if path.endswith(('.tsv', '.tab')) else ','
    rows = [row for row in csv.reader(io.StringIO(text), delimiter=delimiter) if row]
    if not rows:
        raise ParseError("table has no header", path=path)
    header = [cell.strip() for cell in rows[0]]
    body = []
    for line_number, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} cells, found {len(row)}", path=path, line=line_number)
        body.append(row)
    return Table(header=header, rows=body)


def load_mapping_rules(path: str) -> List[MappingRule]:
    with open(path, 'r', encoding='utf-8') as handle:
        data = json.load(handle)
    raw_rules = data.get('rules') if isinstance(data, dict) else data
    if not isinstance(raw_rules, list) or not raw_rules:
        raise MappingError(f"{path}: expected a non-empty list of rules")
    return [MappingRule.from_dict(item) for item in raw_rules]


def map_tabular(table: Table, rules: Sequence[MappingRule]) -> List[LabelTriple]:
    """
    Map table rows to label triples, row-major then rule order.

    Rows whose mapped subject or object cell is empty produce no triple for
    that rule.

    Raises:
        MappingError: if a rule references a column absent from the header
    """
    positions = {name: index for index, name in enumerate(table.header)}
    for rule in rules:
        missing = [column for column in rule.columns() if column not in positions]
        if missing:
            raise MappingError(f"rule {rule.predicate!r} references missing column(s): {', '.join(missing)}")

    triples = []
    for row in table.rows:
        for rule in rules:
            subject_cell = row[positions[rule.subject_column]].strip()
            if rule.object_column is not None:
                object_cell = row[positions[rule.object_column]].strip()
            else:
                object_cell = rule.object_constant.strip()
            if not subject_cell or not object_cell:
                continue
            obj = rule.object_prefix + object_cell if rule.object_column is not None else object_cell
            triples.append((rule.subject_prefix + subject_cell, rule.predicate, obj))
    return triples


def load_politics_domain(path: str, domains: Sequence[str]) -> str:
    """The domain whose credibility drives interest-level facts."""
    with open(path, 'r', encoding='utf-8') as handle:
        data = json.load(handle)
    politics = data.get('politics_domain') if isinstance(data, dict) else None
    if politics is None:
        politics = next((domain for domain in domains if 'politic' in domain), domains[0])
    if politics not in domains:
        raise ParseError(f"politics domain {politics!r} is not a listed domain", path=path)
    return politics
