# Copyright 2026 The rkhs-kit authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""
Command line entry point: ``rkhs-kit <experiment> [options]``
"""
from logging import getLogger
import argparse
import logging
import sys

from numpy.linalg import LinAlgError

from rkhskit.config import ConfigError
from rkhskit.config import config_defaults
from rkhskit.config import find_config
from rkhskit.config import read_config
from rkhskit.config import update_argparser_defaults
from rkhskit.exceptions import NumericalFailure

logger = getLogger("rkhskit.scripts")

verbosity_levels = {
    0: logging.ERROR,
    1: logging.WARN,
    2: logging.INFO,
    3: logging.DEBUG,
}

min_verbosity = min(verbosity_levels)
max_verbosity = max(verbosity_levels)

EXIT_OK = 0
EXIT_IO = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class InvalidArgument(Exception):
    pass


def parse_args(argv=None):
    """
    Parse the config file and command line args.

    :return: tuple of (config, argparser, parsed_args)
    """
    globalparser, argparser, subparsers = make_argparser()

    # Initial parse to extract --config and any global arguments
    global_args, _ = globalparser.parse_known_args(argv)

    try:
        config = read_config(
            (global_args.config or find_config())
            if global_args.use_config_file
            else None
        )
        defaults = config_defaults(config)
        section_defaults = {
            name: config_defaults(config, name) for name in subparsers.choices
        }
    except ConfigError as e:
        argparser.error(str(e))

    update_argparser_defaults(globalparser, defaults)
    update_argparser_defaults(argparser, defaults)
    for name, subp in subparsers.choices.items():
        update_argparser_defaults(subp, section_defaults[name])

    args = argparser.parse_args(argv)

    # Global args (eg '-v') are honoured whether placed before or after the
    # experiment name; otherwise the subparser copy would take precedence.
    args.__dict__.update(globalparser.parse_known_args(argv)[0].__dict__)

    return config, argparser, args


def make_argparser():
    """
    Return the global options parser, the top-level parser and its
    subparsers
    """
    global_parser = argparse.ArgumentParser(add_help=False)
    global_parser.add_argument(
        "--config", "-c", default=None, help="Path to config file"
    )
    global_parser.add_argument(
        "-v",
        dest="verbosity",
        action="count",
        default=min_verbosity,
        help="Verbose output. Use multiple times "
        "to increase level of verbosity",
    )
    global_parser.add_argument(
        "--no-config-file",
        dest="use_config_file",
        action="store_false",
        default=True,
        help="Don't look for a rkhs-kit.ini config file",
    )
    argparser = argparse.ArgumentParser(
        prog="rkhs-kit", parents=[global_parser]
    )

    subparsers = argparser.add_subparsers(help="Commands help")

    from . import run

    run.install_argparsers(global_parser, subparsers)

    return global_parser, argparser, subparsers


def configure_logging(level):
    """
    Configure the python logging module with the requested loglevel
    """
    logging.basicConfig(level=verbosity_levels[level])


def main(argv=None):
    config, argparser, args = parse_args(argv)

    if getattr(args, "func", None) is None:
        argparser.print_usage(sys.stderr)
        argparser.exit(EXIT_CONFIG)

    verbosity = min(max_verbosity, max(min_verbosity, args.verbosity))
    configure_logging(verbosity)

    try:
        args.func(args, config)
    except (NumericalFailure, LinAlgError) as e:
        argparser.exit(
            EXIT_NUMERICAL, "{}: numerical failure: {}\n".format(argparser.prog, e)
        )
    except (InvalidArgument, ValueError) as e:
        argparser.error(str(e))
    except OSError as e:
        argparser.exit(EXIT_IO, "{}: {}\n".format(argparser.prog, e))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
