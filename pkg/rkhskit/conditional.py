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
Conditional independence measures built on the Hilbert-Schmidt norm of the
empirical conditional cross-covariance operator.

X is tested against Y given Z by extending X with Z (product kernel on
(X, Z)) and comparing the measure with its distribution when X is shuffled
within groups of samples sharing similar Z values.
"""
from collections import namedtuple
from logging import getLogger
from typing import List
from typing import Sequence

import numpy as np

from rkhskit.exceptions import DimensionMismatch
from rkhskit.exceptions import InvalidParameter
from rkhskit.kernels import KernelSpec
from rkhskit.kernels import as_points
from rkhskit.kernels import center_gram
from rkhskit.kernels import gram_matrix
from rkhskit.utils import PermutationResult
from rkhskit.utils import SeedLike
from rkhskit.utils import parallel_map
from rkhskit.utils import permutation_threshold
from rkhskit.utils import solve_pos
from rkhskit.utils import spawn_rngs

logger = getLogger("rkhskit.conditional")

MIN_DOMAIN_SIZE = 4

_CondTestConfig = namedtuple(
    "_CondTestConfig", "reg_lambda num_domains num_perms level use_normalized"
)


class CondTestConfig(_CondTestConfig):
    """
    Parameters of the conditional independence test. Defaults are 100
    permutations within 8 domains at the 5% level.
    """

    __slots__ = ()

    def __new__(
        cls,
        reg_lambda=1e-3,
        num_domains=8,
        num_perms=100,
        level=0.05,
        use_normalized=True,
    ):
        if not reg_lambda > 0:
            raise InvalidParameter("reg_lambda must be positive")
        if num_domains < 1:
            raise InvalidParameter("num_domains must be at least 1")
        if num_perms < 1:
            raise InvalidParameter("num_perms must be at least 1")
        if not 0 < level <= 1:
            raise InvalidParameter("level must lie in (0, 1]")
        return super(CondTestConfig, cls).__new__(
            cls, reg_lambda, num_domains, num_perms, level, use_normalized
        )

    def validate(self, n: int):
        if n // self.num_domains < MIN_DOMAIN_SIZE:
            raise InvalidParameter(
                "{} domains over {} samples leaves fewer than {} samples "
                "per domain".format(self.num_domains, n, MIN_DOMAIN_SIZE)
            )


def _regularized_ratio(centered: np.ndarray, reg: float) -> np.ndarray:
    """
    K~ (K~ + reg I)^{-1}, which equals (K~ + reg I)^{-1} K~
    """
    n = centered.shape[0]
    ratio = solve_pos(
        centered + reg * np.eye(n), centered, "regularized centered Gram matrix"
    )
    return (ratio + ratio.T) / 2.0


def _cond_trace(ax: np.ndarray, ay: np.ndarray, nz: np.ndarray) -> float:
    """
    Tr(Ax Ay - 2 Ay Nz Ax + Ay Nz Ax Nz) for symmetric Ax, Ay, Nz
    """
    ynz = ay @ nz
    first = (ax * ay).sum()
    second = (ynz * ax.T).sum()
    third = (ynz * (ax @ nz).T).sum()
    return float(first - 2.0 * second + third)


class _ConditionalStatistic(object):
    """
    The parts of cond_hs_norm that do not depend on the X Gram matrix,
    computed once and reused across permutation replicas.
    """

    def __init__(self, gram_y, gram_z, reg_lambda: float, normalized: bool):
        if not reg_lambda > 0:
            raise InvalidParameter("reg_lambda must be positive")
        self.n = gram_y.shape[0]
        self.reg = self.n * reg_lambda
        self.normalized = normalized
        centered_y = center_gram(gram_y)
        self.nz = _regularized_ratio(center_gram(gram_z), self.reg)
        if normalized:
            self.ay = _regularized_ratio(centered_y, self.reg)
        else:
            self.ay = centered_y

    def __call__(self, gram_x) -> float:
        centered_x = center_gram(gram_x)
        if self.normalized:
            ax = _regularized_ratio(centered_x, self.reg)
            return _cond_trace(ax, self.ay, self.nz)
        return _cond_trace(centered_x, self.ay, self.nz) / self.n ** 2


def _check_grams(*grams) -> List[np.ndarray]:
    arrays = [np.asarray(g, dtype=float) for g in grams]
    shape = arrays[0].shape
    if len(shape) != 2 or shape[0] != shape[1]:
        raise DimensionMismatch("gram matrices must be square")
    if any(a.shape != shape for a in arrays):
        raise DimensionMismatch("gram matrices must share the same size")
    return arrays


def cond_hs_norm(
    gram_x, gram_y, gram_z, reg_lambda: float, normalized: bool = True
) -> float:
    """
    Squared Hilbert-Schmidt norm of the empirical conditional
    cross-covariance operator of X and Y given Z.

    The raw form is
    Tr(K~x K~y - 2 K~y R^{-1} K~z K~x + K~y K~z R^{-1} K~x R^{-1} K~z) / N^2
    with K~ = C K C and R = K~z + N lambda I. The normalized form replaces
    every K~u by N_u = K~u (K~u + N lambda I)^{-1} and drops the 1/N^2.
    """
    gx, gy, gz = _check_grams(gram_x, gram_y, gram_z)
    return _ConditionalStatistic(gy, gz, reg_lambda, normalized)(gx)


def _grams(samples_x, samples_y, samples_z, specs: Sequence[KernelSpec]):
    spec_x, spec_y, spec_z = specs
    gx = gram_matrix(spec_x, samples_x)
    gy = gram_matrix(spec_y, samples_y)
    gz = gram_matrix(spec_z, samples_z)
    if not gx.shape == gy.shape == gz.shape:
        raise DimensionMismatch("sample lists differ in length")
    return gx, gy, gz


def extended_cond_measure(
    samples_x,
    samples_y,
    samples_z,
    spec_x: KernelSpec,
    spec_y: KernelSpec,
    spec_z: KernelSpec,
    config: CondTestConfig = CondTestConfig(),
) -> float:
    """
    cond_hs_norm with X replaced by the pair (X, Z), whose Gram matrix is
    the elementwise product of the X and Z Gram matrices.
    """
    gx, gy, gz = _grams(samples_x, samples_y, samples_z, (spec_x, spec_y, spec_z))
    return cond_hs_norm(gx * gz, gy, gz, config.reg_lambda, config.use_normalized)


def conditioning_domains(samples_z, spec_z: KernelSpec, num_domains: int):
    """
    Split sample indices into ``num_domains`` groups of (almost) equal size
    by sorting on Z. Vector valued Z is sorted on its first principal
    coordinate; ties keep sample order.
    """
    z = as_points(spec_z, samples_z)
    if z.shape[1] == 1:
        key = z[:, 0]
    else:
        centered = z - z.mean(axis=0)
        u, s, _ = np.linalg.svd(centered, full_matrices=False)
        key = u[:, 0] * s[0]
    order = np.argsort(key, kind="stable")
    return np.array_split(order, num_domains)


def permute_within_domains(domains, rng: np.random.Generator) -> np.ndarray:
    """
    A permutation of the sample indices that only moves indices inside
    their own domain
    """
    n = sum(len(d) for d in domains)
    perm = np.arange(n)
    for domain in domains:
        perm[domain] = domain[rng.permutation(len(domain))]
    return perm


def cond_perm_threshold(
    samples_x,
    samples_y,
    samples_z,
    specs: Sequence[KernelSpec],
    config: CondTestConfig = CondTestConfig(),
    rng_seed: SeedLike = 0,
) -> float:
    """
    The (1 - level) quantile of extended_cond_measure when X is shuffled
    independently inside each Z domain.
    """
    gx, gy, gz = _grams(samples_x, samples_y, samples_z, specs)
    config.validate(gx.shape[0])
    return _perm_threshold(gx, gy, gz, samples_z, specs[2], config, rng_seed)


def _perm_threshold(gx, gy, gz, samples_z, spec_z, config, rng_seed) -> float:
    statistic = _ConditionalStatistic(
        gy, gz, config.reg_lambda, config.use_normalized
    )
    domains = conditioning_domains(samples_z, spec_z, config.num_domains)

    def replica(rng):
        perm = permute_within_domains(domains, rng)
        return statistic(gx[np.ix_(perm, perm)] * gz)

    null = parallel_map(replica, spawn_rngs(rng_seed, config.num_perms))
    return permutation_threshold(null, config.level)


def markov_cond_test(
    samples_x,
    samples_y,
    samples_z,
    specs: Sequence[KernelSpec],
    config: CondTestConfig = CondTestConfig(),
    rng_seed: SeedLike = 0,
) -> PermutationResult:
    """
    Test X independent of Y given Z. Rejection means the data contradict
    a Markov chain X - Z - Y.
    """
    gx, gy, gz = _grams(samples_x, samples_y, samples_z, specs)
    config.validate(gx.shape[0])
    statistic = cond_hs_norm(
        gx * gz, gy, gz, config.reg_lambda, config.use_normalized
    )
    threshold = _perm_threshold(gx, gy, gz, samples_z, specs[2], config, rng_seed)
    logger.debug(
        "conditional measure %.6g against threshold %.6g", statistic, threshold
    )
    return PermutationResult(statistic, threshold, statistic > threshold)
