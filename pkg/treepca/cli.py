"""
Command line interface: ``treepca run``, ``treepca table`` and
``treepca list``.
"""
import argparse
import logging
import os
import sys

from treepca import __version__, config
from treepca.bench import functions, tables
from treepca.bench.experiments import FORMATS, load_config, run_experiment
from treepca.errors import TreePcaError
from treepca.utils import mkdir

logger = logging.getLogger(__name__)


def _common_options():
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument('--seed', type=int, default=None,
                        help='base seed; run i uses seed + i')
    parser.add_argument('--runs', type=int, default=None,
                        help='number of independent runs')
    parser.add_argument('--mc-samples', type=int, default=None,
                        help='Monte-Carlo sample size for error estimates')
    parser.add_argument('--out', default=None,
                        help='output directory (default: $%s or ~/%s)' % (
                            config.output_directory_variable, config.filename))
    parser.add_argument('--format', choices=FORMATS, default=None,
                        help='output format')
    parser.add_argument('--workers', type=int, default=None,
                        help='threads running independent runs')
    parser.add_argument('--defaults', default=None,
                        help='user defaults file (default: %s)' % config.configuration_file)

    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action='store_true',
                           help='log per-node progress')
    verbosity.add_argument('-q', '--quiet', action='store_true',
                           help='only log warnings and errors')

    return parser


def build_parser():
    parser = argparse.ArgumentParser(
        prog='treepca',
        description='Tree-based tensor approximation of black-box functions'
    )
    parser.add_argument('--version', action='version',
                        version='%(prog)s ' + __version__)

    common = _common_options()
    commands = parser.add_subparsers(dest='command')
    commands.required = True

    run = commands.add_parser('run', parents=[common],
                              help='run an experiment from a configuration file')
    run.add_argument('--config', required=True,
                     help='experiment configuration (.json, .ini or .cfg)')

    table = commands.add_parser('table', parents=[common],
                                help='regenerate a named benchmark table')
    table.add_argument('name', help='table name, see "treepca list"')
    table.add_argument('--quick', action='store_true',
                       help='only run the first configuration of the table')

    commands.add_parser('list', parents=[common],
                        help='list benchmark tables and test functions')

    return parser


def configure_logging(args):
    level = logging.INFO
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING

    logging.basicConfig(
        level=level, format='%(asctime)s %(levelname)s %(name)s: %(message)s'
    )


def _overrides(args):
    return {
        'seed': args.seed,
        'runs': args.runs,
        'mc_samples': args.mc_samples,
    }


def _progress(count, total):
    logger.debug('Finished run %d of %d', count, total)


def run_command(args, user_config):
    defaults = config.experiment_defaults(user_config)
    cfg = load_config(args.config, defaults=defaults).replace(**_overrides(args))

    report = run_experiment(
        cfg,
        workers_count=args.workers or defaults['workers'],
        listener=_progress,
        output=args.out or cfg.output or config.output_directory(user_config),
        fmt=args.format or cfg.format,
    )

    print(report.summary.to_string())

    return 1 if report.failures else 0


def table_command(args, user_config):
    defaults = config.experiment_defaults(user_config)
    directory = args.out or config.output_directory(user_config)
    fmt = args.format or config.output_format(user_config)

    overrides = _overrides(args)
    for key in ('seed', 'runs', 'mc_samples', 'candidates'):
        if overrides.get(key) is None:
            overrides[key] = defaults[key]

    reports, table = tables.run_table(
        args.name, quick=args.quick,
        workers_count=args.workers or defaults['workers'],
        output=directory, fmt=fmt, **overrides
    )

    mkdir(directory)
    path = os.path.join(directory, args.name + '.csv')
    table.to_csv(path, index=False)
    logger.info('Wrote %s', path)

    print(table.to_string(index=False))

    return 1 if any(report.failures for report in reports) else 0


def list_command(args, user_config):
    print('Tables:')
    for name, (_, description) in tables.TABLES.items():
        print('  %-24s %s' % (name, description))

    print('Test functions:')
    for name, (_, description) in functions.FUNCTIONS.items():
        print('  %-24s %s' % (name, description))

    return 0


COMMANDS = {
    'run': run_command,
    'table': table_command,
    'list': list_command,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    configure_logging(args)

    try:
        user_config = config.load_configuration(args.defaults)
        return COMMANDS[args.command](args, user_config)
    except TreePcaError as exc:
        logger.error('%s: %s', type(exc).__name__, exc)
        return 1


if __name__ == '__main__':
    sys.exit(main())
