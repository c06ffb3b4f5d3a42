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

from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor
from typing import Callable
from typing import Iterable
from typing import List
from typing import Sequence
from typing import TypeVar
from typing import Union
import csv
import math
import os

import numpy as np
import scipy.linalg

from rkhskit.exceptions import InvalidParameter
from rkhskit.exceptions import SingularMatrix

THREADS_ENVVAR = "RKHS_KIT_THREADS"

SeedLike = Union[int, np.random.SeedSequence]

T = TypeVar("T")
R = TypeVar("R")


def plural(quantity: int, one: str, plural: str) -> str:
    """
    >>> def obsequious_cat(n):
    ...     return plural(n, 'I have {} paw', 'I have {} paws')
    >>> obsequious_cat(1)
    'I have 1 paw'
    >>> obsequious_cat(4)
    'I have 4 paws'
    """
    if quantity == 1:
        return one.format(quantity)
    return plural.format(quantity)


def seed_sequence(seed: SeedLike) -> np.random.SeedSequence:
    """
    Return a :class:`numpy.random.SeedSequence` for ``seed``.

    Integer seeds must fit in 64 unsigned bits.
    """
    if isinstance(seed, np.random.SeedSequence):
        return seed
    seed = int(seed)
    if not 0 <= seed < 2 ** 64:
        raise InvalidParameter("seed must be a 64 bit unsigned integer")
    return np.random.SeedSequence(seed)


def make_rng(seed: SeedLike) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed_sequence(seed)))


def spawn_rngs(seed: SeedLike, count: int) -> List[np.random.Generator]:
    """
    Return ``count`` independent generators derived from ``seed``, in a
    fixed order.
    """
    children = seed_sequence(seed).spawn(count)
    return [np.random.Generator(np.random.PCG64(s)) for s in children]


def max_workers() -> int:
    """
    Worker cap from ``RKHS_KIT_THREADS``, falling back to the cpu count
    """
    value = os.environ.get(THREADS_ENVVAR)
    if value:
        try:
            workers = int(value)
        except ValueError:
            raise InvalidParameter(
                "{} must be a positive integer, got {!r}".format(
                    THREADS_ENVVAR, value
                )
            )
        if workers < 1:
            raise InvalidParameter(
                "{} must be a positive integer".format(THREADS_ENVVAR)
            )
        return workers
    return min(32, os.cpu_count() or 1)


def parallel_map(func: Callable[[T], R], items: Iterable[T]) -> List[R]:
    """
    Apply ``func`` to every item, returning results in input order.

    numpy releases the GIL inside its linear algebra kernels so a thread pool
    gives real concurrency for the replica loops in this package.
    """
    items = list(items)
    workers = min(max_workers(), len(items))
    if workers <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, items))


def ceil_index(level: float, count: int) -> int:
    """
    Sorted index of the (1 - level) order statistic among ``count`` values
    """
    return min(count - 1, int(math.ceil(round((1.0 - level) * count, 9))))


def format_value(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return "%.12g" % value
    return str(value)


def write_csv(path: str, fieldnames: Sequence[str], rows: Iterable[dict]):
    """
    Write ``rows`` to ``path`` as UTF-8 CSV with a header row.
    """
    with open(path, "w", encoding="UTF-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=fieldnames, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: format_value(v) for k, v in row.items()})


PermutationResult = namedtuple("PermutationResult", "statistic threshold reject")


def permutation_threshold(values: Sequence[float], level: float) -> float:
    """
    The (1 - level) empirical quantile of permutation statistics, taking
    the order statistic at sorted index ceil((1 - level) * P).

    ``level = 1`` gives the smallest value.
    """
    if not 0 < level <= 1:
        raise InvalidParameter("level must lie in (0, 1]")
    ordered = np.sort(np.asarray(values, dtype=float))
    return float(ordered[ceil_index(level, len(ordered))])


def solve_pos(matrix, rhs, what: str = "matrix") -> np.ndarray:
    """
    Solve ``matrix @ x = rhs`` for a symmetric positive definite matrix,
    raising :class:`SingularMatrix` when the factorization fails.
    """
    try:
        return scipy.linalg.solve(matrix, rhs, assume_a="pos")
    except np.linalg.LinAlgError as e:
        raise SingularMatrix("the {} is not positive definite: {}".format(what, e))


def cho_factor_pos(matrix, what: str = "matrix"):
    """
    Cholesky factor of ``matrix`` for :func:`scipy.linalg.cho_solve`
    """
    try:
        return scipy.linalg.cho_factor(matrix)
    except np.linalg.LinAlgError as e:
        raise SingularMatrix("the {} is not positive definite: {}".format(what, e))
