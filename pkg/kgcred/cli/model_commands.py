"""Training, tuning and evaluation commands."""

import argparse
import logging

from ..models.graph import Triple
from ..models.training import TrainingConfig, SearchSpace
from ..services.checkpoint_service import save_checkpoint
from ..services.evaluation_service import evaluate_ranking, fit_calibration, classify, write_predictions_tsv
from ..services.ingest_service import parse_labelled_facts
from ..services.training_service import train, random_search, write_trial_log
from ..utils.formatting import format_row
from .common import CommandContext, add_training_flags, add_graph_flags, training_overrides

logger = logging.getLogger(__name__)


def _training_config(args: argparse.Namespace, context: CommandContext) -> TrainingConfig:
    raw = {'seed': context.seed}
    raw.update(context.pipeline.training)
    raw.update(training_overrides(args))
    raw['verbose'] = context.verbose
    return TrainingConfig.from_dict(raw)


def train_model(args: argparse.Namespace, context: CommandContext) -> int:
    """Train one model on the train split and write its checkpoint."""
    graph = context.load_graph(args.graph)
    config = _training_config(args, context)
    result = train(graph, config)

    directory = context.path_or_default(args.checkpoint, 'checkpoint', 'checkpoint')
    save_checkpoint(result.params, directory, graph.entities, graph.relations)
    with open(context.output_path('loss_trace.tsv'), 'w', encoding='utf-8', newline='\n') as handle:
        for epoch, value in enumerate(result.loss_trace, start=1):
            handle.write(format_row([epoch, value]) + '\n')
    print(f"Trained {config.model} (k={config.k}, {config.epochs} epochs); final mean loss {result.final_loss:.6f}")
    print(f"Checkpoint written to {directory}")
    return 0


def tune(args: argparse.Namespace, context: CommandContext) -> int:
    """Random search over the model's space, scored by validation MRR."""
    graph = context.load_graph(args.graph)
    fixed = dict(context.pipeline.training)
    fixed.update(training_overrides(args))
    fixed.pop('model', None)
    fixed['verbose'] = context.verbose
    space_path = args.space or context.pipeline.search_space_file
    space = SearchSpace.load(space_path, args.model)
    # flags pin their hyperparameters instead of sampling them
    for name in training_overrides(args):
        space.candidates.pop(name, None)
    space.fixed = fixed

    best, trials, best_training = random_search(space, args.trials, graph, context.seed, threads=context.threads)
    log_path = context.output_path('trials.tsv')
    write_trial_log(log_path, trials)
    directory = context.path_or_default(args.checkpoint, 'checkpoint', 'checkpoint')
    save_checkpoint(best_training.params, directory, graph.entities, graph.relations)
    print(f"Best trial {best.trial_id}/{len(trials)}: valid MRR {best.mrr:.4f}")
    print(f"  {best.sampled}")
    print(f"Trial log written to {log_path}; best checkpoint to {directory}")
    return 0


def evaluate(args: argparse.Namespace, context: CommandContext) -> int:
    """Rank the test split and write report.tsv and ranks.tsv."""
    graph = context.load_graph(args.graph)
    params = context.load_params(args.checkpoint, graph)
    filtered = context.pipeline.filtered if args.filtered is None else args.filtered
    report = evaluate_ranking(params, graph, tag=args.split, filtered=filtered, threads=context.threads)
    report.write_tsv(context.output_path('report.tsv'))
    labels = [graph.label_triple(Triple(*triple)) for triple in report.triples]
    report.write_ranks_tsv(context.output_path('ranks.tsv'), labels)
    print(report.summary())
    return 0


def classify_facts(args: argparse.Namespace, context: CommandContext) -> int:
    """Calibrate on the validation split, then classify labelled facts."""
    graph = context.load_graph(args.graph)
    params = context.load_params(args.checkpoint, graph)
    calibration = fit_calibration(params, graph, context.seed)
    report, predictions = classify(params, calibration, graph, parse_labelled_facts(args.facts))
    output = context.output_path('predictions.tsv')
    write_predictions_tsv(output, predictions)
    print(f"Platt calibration: a={calibration.a:.6f} b={calibration.b:.6f}")
    print(report.summary())
    print(f"Predictions written to {output}")
    return 0


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser('train', help='Train an embedding model')
    add_training_flags(parser)
    add_graph_flags(parser)
    parser.set_defaults(handler=train_model)

    parser = subparsers.add_parser('tune', help='Random hyperparameter search')
    add_training_flags(parser)
    add_graph_flags(parser)
    parser.add_argument('--trials', type=int, default=10)
    parser.add_argument('--space', help='Search space JSON (default: bundled space)')
    parser.set_defaults(handler=tune)

    parser = subparsers.add_parser('eval', help='Link-prediction ranking evaluation')
    add_graph_flags(parser)
    parser.add_argument('--split', default='test', choices=['train', 'valid', 'test'])
    mode = parser.add_mutually_exclusive_group()
    mode.add_argument('--filtered', dest='filtered', action='store_true', default=None)
    mode.add_argument('--raw', dest='filtered', action='store_false')
    parser.set_defaults(handler=evaluate, filtered=None)

    parser = subparsers.add_parser('classify', help='Calibrated triple classification')
    add_graph_flags(parser)
    parser.add_argument('--facts', required=True, help='Labelled facts (s, p, o, true|false)')
    parser.set_defaults(handler=classify_facts)
