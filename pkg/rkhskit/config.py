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
Read experiment settings from ``rkhs-kit.ini`` files.

Settings in ``[DEFAULT]`` apply to every experiment and are overridden by
a section named after the experiment, eg ``[krls-predict]``. A file may
pull in others with ``%inherit`` (read first, so overridden by this file)
and ``%include`` (read last). Prefix a path with ``?`` to ignore it when
missing. Values may interpolate environment variables, eg ``%(HOME)s``,
and ``%(here)s``, the directory of the file.
"""
from collections import deque
from configparser import ConfigParser
from pathlib import Path
from typing import Any
from typing import Callable
from typing import Dict
from typing import List
from typing import Optional
from typing import Tuple
from typing import Union
import configparser
import functools
import itertools
import os

CONFIG_FILENAME = "rkhs-kit.ini"

INHERIT = "%inherit"
INCLUDE = "%include"

#: INI option name -> (argparse destination, type)
OPTIONS = {
    "n": ("n_samples", int),
    "seed": ("seed", int),
    "sigma2": ("sigma2", float),
    "mu": ("mu", float),
    "e0": ("e0", float),
    "lambda": ("reg_lambda", float),
    "epsilon": ("reg_epsilon", float),
    "domains": ("num_domains", int),
    "perms": ("num_perms", int),
    "level": ("level", float),
    "coupling": ("coupling", float),
    "theta_steps": ("theta_steps", int),
    "runs": ("runs", int),
    "eigs": ("eigs", int),
    "steps": ("steps", int),
    "out": ("output_path", str),
    "verbosity": ("verbosity", int),
}  # type: Dict[str, Tuple[str, Callable[[str], Any]]]


class ConfigError(configparser.Error):
    """
    A configuration file could not be used
    """


class CircularReferenceError(ConfigError):
    """
    %include or %inherit directive has created a circular reference.
    """


class EnvironmentInterpolation(configparser.BasicInterpolation):
    """
    BasicInterpolation that falls back to a fixed set of defaults, such as
    the process environment
    """

    def __init__(self, defaults=None):
        self.defaults = defaults or {}  # type: Dict[str, str]

    def before_get(self, parser, section, option, value, defaults):
        merged = dict(self.defaults)
        merged.update(defaults)
        return super(EnvironmentInterpolation, self).before_get(
            parser, section, option, value, merged
        )


def interpolation_defaults(path: Optional[Path] = None) -> Dict[str, str]:
    optionxform = ConfigParser().optionxform
    defaults = {
        optionxform(k): v.replace("%", "%%") for k, v in os.environ.items()
    }
    if path:
        defaults["here"] = str(path.parent).replace("%", "%%")
    return defaults


def get_configparser(defaults=None) -> ConfigParser:
    return ConfigParser(interpolation=EnvironmentInterpolation(defaults))


def update_argparser_defaults(parser, defaults: Dict[str, Any]):
    """
    Set defaults only for the destinations ``parser`` actually has, which
    ArgumentParser.set_defaults does not check.
    """
    known = {action.dest for action in parser._actions}
    parser.set_defaults(**{k: v for k, v in defaults.items() if k in known})


def read_config(src: Optional[str]) -> ConfigParser:
    """
    Read the configuration file at ``src`` with everything it inherits or
    includes. ``None`` gives an empty configuration.
    """
    if src is None:
        return get_configparser(interpolation_defaults())

    path = _resolve(src)
    config_files = {path: _read_one(path)}
    merge_order = deque([path])
    pending = [
        ((), path)
    ]  # type: List[Tuple[Union[Tuple, Tuple[Path, ...]], Path]]
    while pending:
        ancestors, current = pending.pop()
        inherits, includes = find_includes(current, config_files[current])
        for p in itertools.chain(inherits, includes):
            if p in ancestors or p == current:
                raise CircularReferenceError(
                    "{} contains circular references".format(current)
                )
            if p not in config_files:
                config_files[p] = _read_one(p)
            pending.append((ancestors + (current,), p))
        merge_order.extendleft(inherits)
        merge_order.extend(includes)

    configs = [config_files[p] for p in merge_order]
    merged = functools.reduce(_merge, configs[1:], configs[0])
    merged.remove_option("DEFAULT", INHERIT)
    merged.remove_option("DEFAULT", INCLUDE)
    return merged


def _merge(target: ConfigParser, source: ConfigParser) -> ConfigParser:
    # source values are interpolated against their own file
    target.read_dict(source)
    return target


def _resolve(src: str, relative_to: Optional[Path] = None) -> Path:
    path = relative_to.parent / src if relative_to else Path(src)
    path = path.resolve()
    if not path.is_file():
        raise ConfigError("configuration file {} not found".format(path))
    return path


def _read_one(path: Path) -> ConfigParser:
    config = get_configparser(interpolation_defaults(path))
    try:
        config.read([str(path)], encoding="UTF-8")
    except configparser.Error as e:
        raise ConfigError("cannot parse {}: {}".format(path, e))
    return config


def find_includes(
    basepath: Path, config: ConfigParser
) -> Tuple[List[Path], List[Path]]:
    """
    Paths named by the ``%inherit`` and ``%include`` keys of ``config``
    """
    result = {INHERIT: [], INCLUDE: []}  # type: Dict[str, List[Path]]
    for key in (INHERIT, INCLUDE):
        for name in config.defaults().get(key, "").split():
            optional = name.startswith("?")
            try:
                result[key].append(_resolve(name.lstrip("?"), basepath))
            except ConfigError:
                if not optional:
                    raise
    return result[INHERIT], result[INCLUDE]


def config_defaults(config: ConfigParser, section: str = "DEFAULT") -> Dict[str, Any]:
    """
    Typed argparse defaults from ``section``, falling back to ``[DEFAULT]``
    """
    if section != "DEFAULT" and not config.has_section(section):
        section = "DEFAULT"
    defaults = {}
    for name, (dest, convert) in OPTIONS.items():
        if not config.has_option(section, name):
            continue
        value = config.get(section, name)
        try:
            defaults[dest] = convert(value)
        except ValueError:
            raise ConfigError(
                "[{}] {} = {!r} is not a valid {}".format(
                    section, name, value, convert.__name__
                )
            )
    return defaults


def find_config() -> Optional[str]:
    """Find the closest config file in the cwd or a parent directory"""
    d = os.getcwd()
    while d != os.path.dirname(d):
        path = os.path.join(d, CONFIG_FILENAME)
        if os.path.isfile(path):
            return path
        d = os.path.dirname(d)
    return None
