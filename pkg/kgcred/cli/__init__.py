"""Command-line surface for kgcred."""

from .common import KGCredArgumentParser, CommandContext, configure_logging
from . import data_commands, credibility_commands, model_commands, analytics_commands

COMMAND_GROUPS = (data_commands, credibility_commands, model_commands, analytics_commands)

__all__ = ['KGCredArgumentParser', 'CommandContext', 'configure_logging', 'COMMAND_GROUPS']
