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

from tempfile import mkdtemp
from shutil import rmtree
import contextlib
import csv

import numpy as np


def random_spd(rng, n, jitter=0.1):
    """
    A random symmetric positive definite n x n matrix
    """
    a = rng.standard_normal((n, n))
    return a @ a.T + jitter * np.eye(n)


def random_orthonormal(rng, n, r):
    """
    An n x r matrix with orthonormal columns
    """
    q, _ = np.linalg.qr(rng.standard_normal((n, r)))
    return q


@contextlib.contextmanager
def tempdir():
    tmpdir = mkdtemp()
    try:
        yield tmpdir
    finally:
        rmtree(tmpdir)


def read_csv_rows(path):
    with open(path, encoding="UTF-8", newline="") as f:
        return list(csv.DictReader(f))


def experiment_rows(name, **options):
    """
    Rows produced by the ``name`` runner, without writing a CSV
    """
    from rkhskit.experiments import EXPERIMENTS
    from rkhskit.experiments import ExperimentConfig

    config = ExperimentConfig.create(name, **options).validate()
    return EXPERIMENTS[name].runner(config)[0]


def converged_rmse(rows, field="sq_err"):
    """
    Root mean of ``field`` over the second half of a learning curve
    """
    values = [row[field] for row in rows]
    return float(np.sqrt(np.mean(values[len(values) // 2 :])))
