"""Shared parser, context and helpers of the command groups."""

import argparse
import logging
import os
import sys
from typing import Any, Dict, List, Optional

from ..models.pipeline import PipelineConfig
from ..services.checkpoint_service import load_checkpoint
from ..services.graph_service import KnowledgeGraph
from ..services.ingest_service import load_domains, load_politics_domain
from ..models.parameters import ModelParameters
from ..utils.errors import UsageError

LOG_FORMAT = '%(levelname)s %(name)s: %(message)s'


class KGCredArgumentParser(argparse.ArgumentParser):
    """Argument parser that raises UsageError instead of exiting."""

    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


class CommandContext:
    """Resolved configuration handed to every command handler."""

    def __init__(self, pipeline: PipelineConfig, verbose: bool = False):
        self.pipeline = pipeline
        self.verbose = verbose

    @property
    def seed(self) -> int:
        return self.pipeline.seed

    @property
    def threads(self) -> int:
        return self.pipeline.threads

    def output_path(self, *parts: str) -> str:
        """Path under the output directory, which is created on demand."""
        os.makedirs(self.pipeline.output_dir, exist_ok=True)
        return os.path.join(self.pipeline.output_dir, *parts)

    def path_or_default(self, value: Optional[str], key: str, *default_parts: str) -> str:
        """Flag value, then the config file's `paths` entry, then a default under the output directory."""
        if value:
            return value
        if key in self.pipeline.paths:
            return self.pipeline.paths[key]
        return os.path.join(self.pipeline.output_dir, *default_parts)

    def domains(self) -> List[str]:
        return load_domains(self.pipeline.domains_file)

    def politics_domain(self, domains: List[str]) -> str:
        return load_politics_domain(self.pipeline.domains_file, domains)

    def load_graph(self, directory: Optional[str]) -> KnowledgeGraph:
        return KnowledgeGraph.load(self.path_or_default(directory, 'graph', 'graph')).freeze()

    def load_params(self, directory: Optional[str], graph: KnowledgeGraph) -> ModelParameters:
        return load_checkpoint(self.path_or_default(directory, 'checkpoint', 'checkpoint'),
                               graph.entities, graph.relations)


def configure_logging(verbose: bool, level_name: str) -> None:
    """Configure the root handler once per invocation."""
    level = logging.INFO if verbose else getattr(logging, str(level_name).upper(), logging.WARNING)
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


def training_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    """Training flags that were given on the command line."""
    mapping = {
        'model': 'model', 'k': 'k', 'eta': 'eta', 'loss': 'loss', 'optimizer': 'optimizer', 'lr': 'lr',
        'epochs': 'epochs', 'batches': 'batches_count', 'margin': 'margin', 'regularizer': 'regularizer',
        'lambda_reg': 'lambda_reg', 'lp_norm': 'lp_norm', 'transe_norm': 'transe_norm',
        'num_filters': 'num_filters'
    }
    overrides = {}
    for flag, key in mapping.items():
        value = getattr(args, flag, None)
        if value is not None:
            overrides[key] = value
    if getattr(args, 'normalize_ent_emb', False):
        overrides['normalize_ent_emb'] = True
    return overrides


def add_training_flags(parser: argparse.ArgumentParser, model_required: bool = True) -> None:
    parser.add_argument('--model', required=model_required, choices=['transe', 'distmult', 'complex', 'hole', 'convkb'])
    parser.add_argument('--k', type=int, help='Embedding dimension')
    parser.add_argument('--eta', type=int, help='Negatives per positive')
    parser.add_argument('--loss', choices=['pairwise', 'nll', 'absolute_margin'])
    parser.add_argument('--optimizer', choices=['sgd', 'adagrad', 'adam', 'momentum'])
    parser.add_argument('--lr', type=float, help='Learning rate')
    parser.add_argument('--epochs', type=int)
    parser.add_argument('--batches', type=int, help='Batches per epoch')
    parser.add_argument('--margin', type=float, help='Loss margin')
    parser.add_argument('--regularizer', choices=['none', 'lp'])
    parser.add_argument('--lambda', dest='lambda_reg', type=float, help='Regularization weight')
    parser.add_argument('--lp-norm', dest='lp_norm', type=int, choices=[1, 2, 3])
    parser.add_argument('--transe-norm', dest='transe_norm', type=int, choices=[1, 2])
    parser.add_argument('--num-filters', dest='num_filters', type=int, help='ConvKB filters')
    parser.add_argument('--normalize-ent-emb', dest='normalize_ent_emb', action='store_true')


def add_graph_flags(parser: argparse.ArgumentParser, checkpoint: bool = True) -> None:
    parser.add_argument('--graph', help='Graph store directory (default: <out>/graph)')
    if checkpoint:
        parser.add_argument('--checkpoint', help='Checkpoint directory (default: <out>/checkpoint)')
