from glassbox.cli.config import EXIT_FAILURE, EXIT_USAGE
from glassbox.cli.views import CommandResult, CommandArgs, RunConfig
from pydantic import ValidationError
from rich.console import Console
from typing import Callable
import logging

logger = logging.getLogger(__name__)

class Command:
    def __init__(self, name:str|None=None, description:str|None=None, args_schema:type[CommandArgs]|None=None):
        self.name=name
        self.description=description
        self.model=args_schema
        self.function:Callable|None=None

    def __call__(self, function:Callable)->'Command':
        if self.name is None:
            self.name=function.__name__
        if self.description is None:
            self.description=function.__doc__
        self.function=function
        return self

    @property
    def summary(self)->str:
        '''First line of the description, used as subcommand help.'''
        return (self.description or '').strip().splitlines()[0] if self.description else ''

    def invoke(self, *args, **kwargs):
        return self.function(*args, **kwargs)

class Registry:
    def __init__(self, commands:list[Command]):
        self.commands=commands
        self.commands_registry={command.name:command for command in commands}

    def get(self, name:str)->Command|None:
        return self.commands_registry.get(name)

    def resolve(self, name:str, /, **kwargs)->CommandArgs:
        '''Validated arguments of a command with every default filled in.'''
        command=self.commands_registry.get(name)
        if command is None:
            raise KeyError(f"Command '{name}' not found.")
        return command.model.model_validate(kwargs)

    def execute(self, name:str, /, run:RunConfig|None=None, console:Console|None=None, **kwargs)->CommandResult:
        command=self.commands_registry.get(name)
        if command is None:
            return CommandResult(is_success=False,error=f"Command '{name}' not found.",exit_code=EXIT_USAGE)
        try:
            args=command.model.model_validate(kwargs)
        except ValidationError as error:
            return CommandResult(is_success=False,error=_describe(error),exit_code=EXIT_USAGE)
        try:
            with (console or Console()).status(f"[bold]glassbox {name}[/bold] running..."):
                content,artifacts=command.invoke(args,run=run or RunConfig())
            return CommandResult(is_success=True,content=content,artifacts=[str(path) for path in artifacts])
        except Exception as error:
            logger.debug(f"[CLI] {name} failed",exc_info=True)
            return CommandResult(is_success=False,error=f"{type(error).__name__}: {error}",exit_code=EXIT_FAILURE)

def _describe(error:ValidationError)->str:
    parts=[]
    for issue in error.errors():
        location='.'.join(str(part) for part in issue['loc']) or 'arguments'
        parts.append(f"--{location.replace('_','-')}: {issue['msg']}")
    return '; '.join(parts)
