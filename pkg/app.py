"""Command-line entry point for kgcred."""

import logging
import os
import sys

from kgcred import __version__
from kgcred.cli import KGCredArgumentParser, CommandContext, configure_logging, COMMAND_GROUPS
from kgcred.models.pipeline import PipelineConfig
from kgcred.utils.errors import KGCredError, UsageError
from config import get_config

logger = logging.getLogger(__name__)


def create_app(config_name=None):
    """
    Create and configure the command parser.

    Args:
        config_name: Name of the environment configuration (see config.py)

    Returns:
        KGCredArgumentParser with every command group registered
    """
    config_class = get_config(config_name)

    parser = KGCredArgumentParser(
        prog='kgcred',
        description='Knowledge-graph embeddings with domain-based user credibility'
    )
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('--seed', type=int, help=f'Seed for all randomness (default: {config_class.SEED})')
    parser.add_argument('--config', help='Pipeline configuration JSON')
    parser.add_argument('--verbose', action='store_true', help='Per-epoch progress and INFO logging')
    parser.add_argument('--threads', type=int, help='Worker threads for evaluation and tuning')
    parser.add_argument('--out', help=f'Output directory (default: {config_class.OUTPUT_DIR})')
    parser.set_defaults(config_class=config_class)

    subparsers = parser.add_subparsers(dest='command', metavar='command', parser_class=KGCredArgumentParser)
    subparsers.required = True
    for group in COMMAND_GROUPS:
        group.register(subparsers)

    return parser


def resolve_pipeline(args) -> PipelineConfig:
    """Environment defaults, then the --config file, then global flags."""
    pipeline = PipelineConfig.from_app_config(args.config_class)
    if args.config:
        pipeline.merge_file(args.config)
    if args.seed is not None:
        pipeline.seed = args.seed
    if args.threads is not None:
        if args.threads < 1:
            raise UsageError("--threads must be at least 1")
        pipeline.threads = args.threads
    if args.out:
        pipeline.output_dir = args.out
    return pipeline


def run_command(argv=None, config_name=None) -> int:
    """
    Parse argv and run the selected command.

    Returns:
        0 on success, 1 on usage error, 2 on data or file error
    """
    parser = create_app(config_name)
    try:
        args = parser.parse_args(argv)
        configure_logging(args.verbose, args.config_class.LOG_LEVEL)
        context = CommandContext(resolve_pipeline(args), verbose=args.verbose)
        return args.handler(args, context)
    except UsageError as e:
        print(str(e), file=sys.stderr)
        return 1
    except (KGCredError, OSError) as e:
        logger.debug("Command failed", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return 2


def main(argv=None) -> int:
    return run_command(argv, os.getenv('KGCRED_ENV'))


if __name__ == '__main__':
    sys.exit(main())
