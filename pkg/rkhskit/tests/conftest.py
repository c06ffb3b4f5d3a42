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

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20260)


@pytest.fixture
def serial(monkeypatch):
    """
    Run replica loops on the calling thread
    """
    monkeypatch.setenv("RKHS_KIT_THREADS", "1")


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "slow: full size experiment runs (deselect with -m 'not slow')"
    )
