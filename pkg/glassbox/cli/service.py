from glassbox.cli.config import OUT_ENV, THREADS_ENV, DEFAULT_OUT, LOG_FORMAT, EXIT_OK, EXIT_USAGE, EXPLAIN_METHODS, SUITES, PRESETS
from glassbox.cli.views import RunConfig, CommandResult
from glassbox.cli.commands import COMMANDS
from glassbox.cli.registry import Registry
from glassbox.evalbench.config import MODELS
from threadpoolctl import threadpool_limits
from pydantic import ValidationError
from rich.console import Console
from termcolor import colored
from dotenv import load_dotenv
from pathlib import Path
import argparse
import logging
import json
import sys
import os

logger = logging.getLogger(__name__)

RUN_OPTIONS=('out','threads','deterministic','overwrite')
CONSOLE_OPTIONS=('verbose','quiet','print_config','command')

def configure_logging(verbose:bool=False, quiet:bool=False):
    '''Route the package logger to the current stderr; a repeated call replaces the previous handler.'''
    package=logging.getLogger('glassbox')
    for handler in list(package.handlers):
        package.removeHandler(handler)
    handler=logging.StreamHandler()
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    package.addHandler(handler)
    package.setLevel(logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO)
    package.propagate=False

def _common_options()->argparse.ArgumentParser:
    common=argparse.ArgumentParser(add_help=False,argument_default=argparse.SUPPRESS)
    common.add_argument('--out',help=f"Output root (default: ${OUT_ENV} or ./{DEFAULT_OUT})")
    common.add_argument('--threads',type=int,help=f"BLAS/OpenMP thread limit (default: ${THREADS_ENV})")
    common.add_argument('--deterministic',action='store_true',help="Single-threaded numerics for bit-identical reruns")
    common.add_argument('--overwrite',action='store_true',help="Replace an existing artifact directory")
    common.add_argument('--print-config',action='store_true',help="Print the resolved configuration and exit")
    verbosity=common.add_mutually_exclusive_group()
    verbosity.add_argument('-v','--verbose',action='store_true')
    verbosity.add_argument('-q','--quiet',action='store_true')
    return common

def _transformer_options(parser:argparse.ArgumentParser):
    parser.add_argument('--preset',choices=PRESETS,help="Transformer size preset")
    parser.add_argument('--epochs',type=int)
    parser.add_argument('--n-head',type=int)

def build_parser(registry:Registry)->argparse.ArgumentParser:
    parser=argparse.ArgumentParser(prog='glassbox',description="Simulate, fit, explain and evaluate on data with known "
        "generative structure.")
    subparsers=parser.add_subparsers(dest='command',required=True)
    common=_common_options()

    def subcommand(name:str)->argparse.ArgumentParser:
        return subparsers.add_parser(name,parents=[common],argument_default=argparse.SUPPRESS,
            help=registry.get(name).summary)

    simulate=subcommand('simulate')
    simulate.add_argument('--n',type=int,help="Number of subjects")
    simulate.add_argument('--timepoints',type=int)
    simulate.add_argument('--species',type=int)
    simulate.add_argument('--communities',type=int)
    simulate.add_argument('--seed',type=int)
    simulate.add_argument('--format',choices=['binary','csv'])
    simulate.add_argument('--name')

    featurize=subcommand('featurize')
    featurize.add_argument('dataset')
    featurize.add_argument('--representation',choices=['raw','featurized'])
    featurize.add_argument('--unstandardized',dest='standardized',action='store_false')
    featurize.add_argument('--format',choices=['binary','csv'])
    featurize.add_argument('--name')

    fit=subcommand('fit')
    fit.add_argument('dataset')
    fit.add_argument('--model',help=f"One of {', '.join(MODELS)}")
    fit.add_argument('--representation',choices=['raw','featurized'])
    fit.add_argument('--seed',type=int)
    fit.add_argument('--n-folds',type=int)
    fit.add_argument('--n-lambda',type=int)
    fit.add_argument('--name')
    _transformer_options(fit)

    explain=subcommand('explain')
    explain.add_argument('model')
    explain.add_argument('--method',choices=EXPLAIN_METHODS)
    explain.add_argument('--samples',type=int,nargs='+')
    explain.add_argument('--target-class',type=int)
    explain.add_argument('--baseline',choices=['zero','mean'])
    explain.add_argument('--n-steps',type=int)
    explain.add_argument('--window',type=int)
    explain.add_argument('--layer')
    explain.add_argument('--pooling',choices=['mean','none','species'])
    explain.add_argument('--species',type=int)
    explain.add_argument('--n-components',type=int)
    explain.add_argument('--sparsity-penalty',type=float)
    explain.add_argument('--probe',type=int,nargs=2,metavar=('ID_A','ID_B'))
    explain.add_argument('--features',nargs='+')
    explain.add_argument('--resolution',type=int)
    explain.add_argument('--no-figures',dest='figures',action='store_false')
    explain.add_argument('--name')

    evaluate=subcommand('eval')
    evaluate.add_argument('suite',choices=SUITES)
    evaluate.add_argument('--n',type=int,nargs='+')
    evaluate.add_argument('--seeds',type=int,nargs='+')
    evaluate.add_argument('--models',nargs='+')
    evaluate.add_argument('--representations',nargs='+',choices=['raw','featurized'])
    evaluate.add_argument('--dataset')
    evaluate.add_argument('--model',help="Model retrained by the ablation and faithfulness suites")
    evaluate.add_argument('--method',choices=['integrated_gradients','occlusion'])
    evaluate.add_argument('--q',type=float)
    evaluate.add_argument('--n-samples',type=int)
    evaluate.add_argument('--n-steps',type=int)
    evaluate.add_argument('--window',type=int)
    evaluate.add_argument('--attributions')
    evaluate.add_argument('--occlusions')
    evaluate.add_argument('--k',type=int)
    evaluate.add_argument('--n-shuffles',type=int)
    evaluate.add_argument('--n-folds',type=int)
    evaluate.add_argument('--n-lambda',type=int)
    evaluate.add_argument('--seed',type=int,help="Transformer initialization seed")
    evaluate.add_argument('--name')
    _transformer_options(evaluate)

    report=subcommand('report')
    report.add_argument('artifacts',nargs='+')
    report.add_argument('--no-figures',dest='figures',action='store_false')
    report.add_argument('--name')
    return parser

def resolve_run(options:dict)->RunConfig:
    '''Run options from the command line, falling back to the environment.'''
    values={key:options[key] for key in RUN_OPTIONS if key in options}
    values.setdefault('out',os.getenv(OUT_ENV) or DEFAULT_OUT)
    if 'threads' not in values and os.getenv(THREADS_ENV):
        values['threads']=int(os.getenv(THREADS_ENV))
    return RunConfig(**values)

def _report(console:Console, result:CommandResult):
    if result.is_success:
        console.print(result.content,markup=False,highlight=False,soft_wrap=True)
    else:
        print(colored(f"Error: {result.error}",'red'),file=sys.stderr)

def main(argv:list[str]|None=None)->int:
    load_dotenv()
    registry=Registry(COMMANDS)
    parser=build_parser(registry)
    try:
        options=vars(parser.parse_args(argv))
    except SystemExit as exit:
        return exit.code if isinstance(exit.code,int) else EXIT_USAGE
    configure_logging(options.get('verbose',False),options.get('quiet',False))
    name=options['command']
    arguments={key:value for key,value in options.items() if key not in RUN_OPTIONS+CONSOLE_OPTIONS}
    console=Console()
    try:
        run=resolve_run(options)
    except (ValidationError,ValueError) as error:
        print(colored(f"Error: invalid run options: {error}",'red'),file=sys.stderr)
        return EXIT_USAGE
    if options.get('print_config'):
        try:
            args=registry.resolve(name,**arguments)
        except ValidationError as error:
            print(colored(f"Error: {error}",'red'),file=sys.stderr)
            return EXIT_USAGE
        document={'command':name,'run':run.model_dump(mode='json'),'args':args.model_dump(mode='json')}
        console.print_json(json.dumps(document))
        return EXIT_OK
    logger.debug(f"[CLI] {name} with {arguments} (threads={run.thread_limit})")
    with threadpool_limits(limits=run.thread_limit):
        result=registry.execute(name,run=run,console=console,**arguments)
    _report(console,result)
    if result.is_success:
        for path in result.artifacts:
            logger.debug(f"[CLI] wrote {Path(path)}")
    return result.exit_code
