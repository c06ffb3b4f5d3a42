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

from configparser import ConfigParser
from typing import Dict
import os
import pathlib
import tempfile

import pytest

from rkhskit import config as rkhsconfig


def to_dict(parser: ConfigParser) -> Dict[str, Dict[str, str]]:
    return {section: dict(parser[section]) for section in parser}


def _test_files(files, expected):
    with tempfile.TemporaryDirectory() as tmpdir:
        tmpdir_path = pathlib.Path(tmpdir)
        for path, data in files.items():
            with (tmpdir_path / path).open("w") as f:
                f.write(data)
        config = rkhsconfig.read_config(str(tmpdir_path / next(iter(sorted(files)))))
        assert to_dict(config) == expected


class TestInheritance:
    def test_read_config_returns_empty_on_None(self):
        config = rkhsconfig.read_config(None)
        assert to_dict(config) == {"DEFAULT": {}}

    def test_inherit_one(self):
        _test_files(
            {
                "a.ini": "[DEFAULT]\n%inherit = b.ini\nn=10\nseed=1\n",
                "b.ini": "[DEFAULT]\nseed = 2\nruns = 3\n",
            },
            {"DEFAULT": {"n": "10", "seed": "1", "runs": "3"}},
        )

    def test_include_one(self):
        _test_files(
            {
                "a.ini": "[DEFAULT]\n%include = b.ini\nn=10\nseed=1\n",
                "b.ini": "[DEFAULT]\nseed = 2\nruns = 3\n",
            },
            {"DEFAULT": {"n": "10", "seed": "2", "runs": "3"}},
        )

    def test_inherit_many(self):
        _test_files(
            {
                "a.ini": "[DEFAULT]\n%inherit = b.ini c.ini\nv = a\nw = a\n",
                "b.ini": "[DEFAULT]\nw = b\nx = b\ny = b",
                "c.ini": "[DEFAULT]\nx = c\ny = c\nz = c",
            },
            {"DEFAULT": {"v": "a", "w": "a", "x": "b", "y": "b", "z": "c"}},
        )

    def test_nested_include(self):
        _test_files(
            {
                "a.ini": "[DEFAULT]\n%include = b.ini\nv = a\nw = a\nx = a\n",
                "b.ini": "[DEFAULT]\n%include = c.ini\nw = b\nx = b\ny = b\n",
                "c.ini": "[DEFAULT]\nx = c\ny = c\nz = c",
            },
            {"DEFAULT": {"v": "a", "w": "b", "x": "c", "y": "c", "z": "c"}},
        )

    def test_sections_are_merged(self):
        _test_files(
            {
                "a.ini": "[DEFAULT]\n%inherit = b.ini\n[krls-predict]\ne0 = 0.2\n",
                "b.ini": "[krls-predict]\ne0 = 0.1\nn = 500\n",
            },
            {"DEFAULT": {}, "krls-predict": {"e0": "0.2", "n": "500"}},
        )

    def test_it_raises_on_not_found(self):
        with pytest.raises(rkhsconfig.ConfigError):
            _test_files({"a.ini": "[DEFAULT]\n%inherit = b.ini\n"}, {"DEFAULT": {}})

    def test_it_ignores_not_found(self):
        _test_files(
            {"a.ini": "[DEFAULT]\n%inherit = ?b.ini\nn = 5\n"},
            {"DEFAULT": {"n": "5"}},
        )

    def test_it_detects_cycles(self):
        with pytest.raises(rkhsconfig.CircularReferenceError):
            _test_files(
                {
                    "a.ini": "[DEFAULT]\n%inherit = b.ini\n",
                    "b.ini": "[DEFAULT]\n%include = a.ini\n",
                },
                {},
            )

    def test_it_detects_self_reference(self):
        with pytest.raises(rkhsconfig.CircularReferenceError):
            _test_files({"a.ini": "[DEFAULT]\n%include = a.ini\n"}, {})

    def test_unparseable_file(self):
        with pytest.raises(rkhsconfig.ConfigError):
            _test_files({"a.ini": "n = 5\n"}, {})


class TestInterpolation:
    def test_environment_variables(self, monkeypatch):
        monkeypatch.setenv("RKHS_KIT_TEST_DIR", "/data")
        _test_files(
            {"a.ini": "[DEFAULT]\nout = %(RKHS_KIT_TEST_DIR)s/run.csv\n"},
            {"DEFAULT": {"out": "/data/run.csv"}},
        )

    def test_here_is_the_file_directory(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            path = pathlib.Path(tmpdir).resolve() / "a.ini"
            path.write_text("[DEFAULT]\nout = %(here)s/out.csv\n")
            config = rkhsconfig.read_config(str(path))
            assert config.get("DEFAULT", "out") == str(path.parent / "out.csv")


class TestConfigDefaults:
    def get_config(self, text):
        config = rkhsconfig.get_configparser()
        config.read_string(text)
        return config

    def test_typed_values(self):
        config = self.get_config(
            "[DEFAULT]\nn = 100\nsigma2 = 0.25\nlambda = 1e-3\nout = x.csv\n"
        )
        assert rkhsconfig.config_defaults(config) == {
            "n_samples": 100,
            "sigma2": 0.25,
            "reg_lambda": 1e-3,
            "output_path": "x.csv",
        }

    def test_section_overrides_default(self):
        config = self.get_config(
            "[DEFAULT]\nn = 100\nseed = 1\n[kbr-predict]\nn = 50\n"
        )
        assert rkhsconfig.config_defaults(config, "kbr-predict") == {
            "n_samples": 50,
            "seed": 1,
        }

    def test_missing_section_falls_back(self):
        config = self.get_config("[DEFAULT]\nseed = 4\n")
        assert rkhsconfig.config_defaults(config, "mercer-check") == {"seed": 4}

    def test_unknown_options_are_ignored(self):
        config = self.get_config("[DEFAULT]\ncolour = blue\n")
        assert rkhsconfig.config_defaults(config) == {}

    def test_bad_value(self):
        config = self.get_config("[DEFAULT]\nn = many\n")
        with pytest.raises(rkhsconfig.ConfigError) as excinfo:
            rkhsconfig.config_defaults(config)
        assert "'many'" in str(excinfo.value)


class TestFindConfig:
    def test_finds_config_in_a_parent_directory(self, monkeypatch):
        with tempfile.TemporaryDirectory() as tmpdir:
            root = pathlib.Path(tmpdir).resolve()
            (root / rkhsconfig.CONFIG_FILENAME).write_text("[DEFAULT]\n")
            (root / "sub").mkdir()
            monkeypatch.chdir(root / "sub")
            assert rkhsconfig.find_config() == os.path.join(
                str(root), rkhsconfig.CONFIG_FILENAME
            )
