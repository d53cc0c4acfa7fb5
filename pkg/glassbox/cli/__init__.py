from glassbox.cli.views import CommandResult, RunConfig
from glassbox.cli.registry import Command, Registry
from glassbox.cli.commands import COMMANDS
from glassbox.cli.service import main, build_parser, configure_logging

__all__=[
    'CommandResult',
    'RunConfig',
    'Command',
    'Registry',
    'COMMANDS',
    'main',
    'build_parser',
    'configure_logging',
]
