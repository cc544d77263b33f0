"""Commands that build, map and split knowledge graphs."""

import argparse
import logging

from ..services.fixture_service import generate_fixture
from ..services.graph_service import KnowledgeGraph
from ..services.ingest_service import (
    parse_triples_tsv, read_table, load_mapping_rules, map_tabular, write_triples_tsv
)
from ..utils.errors import UsageError
from ..utils.validators import validate_split_ratios
from .common import CommandContext

logger = logging.getLogger(__name__)


def ingest(args: argparse.Namespace, context: CommandContext) -> int:
    """Build a graph store from one or more triple files."""
    graph = KnowledgeGraph()
    for path in args.triples:
        duplicates = graph.add_triples(parse_triples_tsv(path))
        logger.info("Loaded %s (%d duplicates skipped)", path, duplicates)
    directory = context.path_or_default(args.store, 'graph', 'graph')
    graph.save(directory)
    print(graph.statistics().summary())
    print(f"Graph store written to {directory}")
    return 0


def map_table(args: argparse.Namespace, context: CommandContext) -> int:
    """Map a CSV/TSV table to triples with JSON rules."""
    triples = map_tabular(read_table(args.table), load_mapping_rules(args.mapping))
    output = args.output or context.output_path('mapped_triples.tsv')
    write_triples_tsv(output, triples)
    print(f"Mapped {len(triples)} triples to {output}")
    return 0


def split(args: argparse.Namespace, context: CommandContext) -> int:
    """Tag the stored triples train/valid/test."""
    ratios = args.ratios or context.pipeline.split_ratios
    is_valid, error_msg, cleaned = validate_split_ratios(ratios)
    if not is_valid:
        raise UsageError(error_msg)
    directory = context.path_or_default(args.graph, 'graph', 'graph')
    graph = KnowledgeGraph.load(directory).split(cleaned, context.seed)
    graph.save(directory)
    print(graph.statistics().summary())
    return 0


def fixture(args: argparse.Namespace, context: CommandContext) -> int:
    """Write the synthetic politics fixture."""
    domains = context.domains()
    directory = args.dir or context.output_path('fixture')
    paths = generate_fixture(context.seed, directory, domains, context.politics_domain(domains))
    for role, path in paths.items():
        print(f"{role}: {path}")
    return 0


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser('ingest', help='Build a graph store from triple files')
    parser.add_argument('--triples', action='append', required=True, help='TAB-separated triple file (repeatable)')
    parser.add_argument('--store', help='Graph store directory (default: <out>/graph)')
    parser.set_defaults(handler=ingest)

    parser = subparsers.add_parser('map', help='Map a table to triples')
    parser.add_argument('--table', required=True)
    parser.add_argument('--mapping', required=True, help='JSON mapping rules')
    parser.add_argument('--output', help='Triple file (default: <out>/mapped_triples.tsv)')
    parser.set_defaults(handler=map_table)

    parser = subparsers.add_parser('split', help='Split a graph store into train/valid/test')
    parser.add_argument('--graph', help='Graph store directory (default: <out>/graph)')
    parser.add_argument('--ratios', type=float, nargs=3, metavar=('TRAIN', 'VALID', 'TEST'))
    parser.set_defaults(handler=split)

    parser = subparsers.add_parser('fixture', help='Generate the synthetic politics fixture')
    parser.add_argument('--dir', help='Output directory (default: <out>/fixture)')
    parser.set_defaults(handler=fixture)
