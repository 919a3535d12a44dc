# -*- coding: utf-8 -*-
###############################################################################
# Copyright (c) 2026 hoidiag contributors - Apache License 2.0.
###############################################################################

"""Entry point and argument parsing for the hoidiag cli"""

from __future__ import absolute_import
import argparse
import logging
import sys

from hoidiag._cli._cli_subcommands import \
    BiasSubcommand, \
    CategorizeSubcommand, \
    ConvertSubcommand, \
    ErrorsSubcommand, \
    EvalSubcommand, \
    StatsSubcommand, \
    SynthSubcommand, \
    build_run_config, \
    check_input_paths
from hoidiag.exceptions import HoiDiagException, InvariantViolationError

logger = logging.getLogger(__name__)

_SUBCOMMAND_CLASSES = [CategorizeSubcommand,
                       StatsSubcommand,
                       EvalSubcommand,
                       ErrorsSubcommand,
                       BiasSubcommand,
                       SynthSubcommand,
                       ConvertSubcommand]

#: Exit status of a successful run
EXIT_OK = 0
#: Exit status for bad input, bad configuration and usage errors
EXIT_INPUT_ERROR = 1
#: Exit status when an internal invariant is violated
EXIT_INVARIANT_VIOLATION = 2


class _ArgumentParser(argparse.ArgumentParser):
    """
    Argument parser whose usage errors exit with :data:`EXIT_INPUT_ERROR`
    """

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT_ERROR,
                  "{}: error: {}\n".format(self.prog, message))


def _create_argparser():
    """
    Create the top-level argparser for the cli
    :return: the argparser
    :rtype: argparse.ArgumentParser
    """
    parser = _ArgumentParser(
        prog="hoidiag",
        description="Diagnostics for human-object interaction detection: "
                    "scene categories, pair-matching mAP, false-positive "
                    "error types and class-frequency bias.")
    parser.add_argument("-s", "--silent", action="store_true",
                        required=False,
                        help="""show only errors (no info/debug messages)
                            while a command is running""")
    parser.add_argument("-v", "--verbose", action="count",
                        default=0,
                        required=False,
                        help="""Verbose mode. Additional v characters increase
                            the verbosity level, e.g., -vv, -vvv.""")
    parser.add_argument("--config", metavar="FILE", dest="config_file",
                        default=None,
                        help="run configuration file (see the docs for the "
                             "format)")
    parser.add_argument("--threads", metavar="N", type=int, default=None,
                        help="worker threads (results do not depend on it)")
    parser.add_argument("--output-dir", metavar="DIR", default=None,
                        help="""directory receiving the reports (default: .,
                            or the HOIDIAG_OUTPUT_DIR environment
                            variable)""")
    parser.add_argument("--manifest", action="store_true", default=None,
                        help="""record the settings and the SHA-256 digest of
                            every input in each report""")
    return parser


def _add_subcommand_argparsers(parser):
    """
    Append subparsers for each of the cli subcommands to the supplied argparser
    :param argparse.ArgumentParser parser: the base argparser
    """
    subparsers = parser.add_subparsers(title="subcommands")

    # Adding these lines to force argparser to validate the presence of a
    # subcommand in Python 3. See https://bugs.python.org/issue9253#msg186387.
    subparsers.required = True
    subparsers.dest = 'subcommand'

    for subcommand_class in _SUBCOMMAND_CLASSES:
        subcommand = subcommand_class()
        subcommand_parser = subparsers.add_parser(subcommand.name,
                                                  help=subcommand.help,
                                                  parents=subcommand.parents)
        subcommand_parser.set_defaults(func=subcommand.execute,
                                       input_paths=subcommand.input_paths)
        subcommand.add_parser_args(subcommand_parser)


def _get_log_level(verbosity_level):
    """
    Translate the supplied numeric verbosity level into a :mod:`logging` level
    :param int verbosity_level: the verbosity level
    :return: An appropriate level from :mod:`logging`, one of
        :const:`logging.ERROR`, :const:`logging.DEBUG`, or
        :const:`logging.INFO`.
    """
    log_level = logging.ERROR
    if verbosity_level >= 2:
        log_level = logging.DEBUG
    elif verbosity_level >= 1:
        log_level = logging.INFO
    return log_level


def _get_log_formatter(verbosity_level):
    """
    Get a log formatter string based on the supplied numeric verbosity level.
    :param int verbosity_level: the verbosity level
    :return: the log formatter string
    :rtype: str
    """
    formatter = "%(levelname)s: %(message)s"
    if verbosity_level >= 3:
        formatter = "%(levelname)s: %(name)s: %(message)s"
    return formatter


def run(argv=None):
    """
    Run one cli command.

    :param argv: command line arguments, defaults to ``sys.argv[1:]``
    :return: the exit status: :data:`EXIT_OK`, :data:`EXIT_INPUT_ERROR` or
        :data:`EXIT_INVARIANT_VIOLATION`
    :rtype: int
    """
    parser = _create_argparser()
    _add_subcommand_argparsers(parser)

    input_args = list(sys.argv[1:] if argv is None else argv)
    if not input_args:
        input_args = ["-h"]
    try:
        parsed_args = parser.parse_args(input_args)
    except SystemExit as ex:
        return ex.code if isinstance(ex.code, int) else EXIT_INPUT_ERROR

    verbosity_level = 0 if parsed_args.silent else parsed_args.verbose+1
    logging.basicConfig(level=_get_log_level(verbosity_level),
                        format=_get_log_formatter(verbosity_level))
    try:
        config = build_run_config(parsed_args)
        check_input_paths(parsed_args.input_paths(parsed_args))
        parsed_args.func(parsed_args, config)
    except InvariantViolationError as ex:
        logger.error("Invariant violated: %s", ex)
        logger.debug("Traceback of the violation", exc_info=True)
        return EXIT_INVARIANT_VIOLATION
    except (HoiDiagException, OSError, ValueError) as ex:
        logger.error("Command failed. Message: %s", ex)
        logger.debug("Traceback of the failure", exc_info=True)
        return EXIT_INPUT_ERROR
    except Exception:  # pylint: disable=broad-except
        logger.exception("Internal error")
        return EXIT_INVARIANT_VIOLATION
    return EXIT_OK


def cli_run():
    """
    Main routine for running CLI commands
    """
    sys.exit(run(sys.argv[1:]))
