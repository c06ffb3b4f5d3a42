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
Hilbert-Schmidt independence criterion: batch estimate, maximal correlation,
the recursive sparse estimate and a permutation test.
"""
from logging import getLogger
from typing import Tuple

import numpy as np
import scipy.linalg

from rkhskit.exceptions import DimensionMismatch
from rkhskit.exceptions import InvalidParameter
from rkhskit.exceptions import NonNormalizedKernel
from rkhskit.kernels import KernelSpec
from rkhskit.kernels import as_points
from rkhskit.kernels import as_vector
from rkhskit.kernels import center_gram
from rkhskit.kernels import cross_gram
from rkhskit.kernels import eval_kernel
from rkhskit.kernels import gram_matrix
from rkhskit.kernels import is_normalized
from rkhskit.utils import PermutationResult
from rkhskit.utils import SeedLike
from rkhskit.utils import parallel_map
from rkhskit.utils import permutation_threshold
from rkhskit.utils import spawn_rngs

logger = getLogger("rkhskit.independence")


def _check_pair(gram_x, gram_y) -> Tuple[np.ndarray, np.ndarray]:
    gx = np.asarray(gram_x, dtype=float)
    gy = np.asarray(gram_y, dtype=float)
    if gx.ndim != 2 or gx.shape[0] != gx.shape[1] or gx.shape != gy.shape:
        raise DimensionMismatch(
            "gram matrices must be square and of equal size, got {} and {}".format(
                gx.shape, gy.shape
            )
        )
    if gx.shape[0] < 2:
        raise InvalidParameter("at least two samples are required")
    return gx, gy


def hsic_batch(gram_x, gram_y) -> float:
    """
    (1/N^2) Tr(C K_x C K_y)
    """
    gx, gy = _check_pair(gram_x, gram_y)
    n = gx.shape[0]
    # C is idempotent, so this equals Tr(C Kx C Ky) and is exactly symmetric
    return float((center_gram(gx) * center_gram(gy)).sum()) / n ** 2


def _psd_sqrt(gram: np.ndarray) -> np.ndarray:
    values, vectors = scipy.linalg.eigh(gram)
    root = np.sqrt(np.clip(values, 0.0, None))
    return (vectors * root) @ vectors.T


def max_correlation(gram_x, gram_y) -> float:
    """
    (1/N) times the spectral norm of K_x^{1/2} C K_y^{1/2}.

    Negative eigenvalues left by round-off are clipped to zero before the
    square roots are taken.
    """
    gx, gy = _check_pair(gram_x, gram_y)
    n = gx.shape[0]
    product = _psd_sqrt(gx) @ center_gram(_psd_sqrt(gy), side="left")
    return float(scipy.linalg.svdvals(product)[0]) / n


class HsicDictionary(object):
    """
    Running state of the sparse HSIC recursion.

    Every sample is either admitted as a new dictionary atom or merged into
    the most coherent existing atom, whose count is incremented. A sample is
    admitted when its coherence ``|K_x(x, x_a) K_y(y, y_a)|`` with every atom
    is at most ``mu``; with ``mu = 1`` and normalized kernels every sample is
    admitted and the recursion reproduces :func:`hsic_batch` exactly.
    """

    def __init__(self, mu: float):
        if not 0 < mu <= 1:
            raise InvalidParameter("mu must lie in (0, 1]")
        self.mu = mu
        self.n = 0
        self.indices = []  # type: list
        self.counts = np.zeros(0, dtype=np.int64)
        self.v_x = np.zeros(0)
        self.v_y = np.zeros(0)
        self.points_x = None  # type: np.ndarray
        self.points_y = None  # type: np.ndarray
        self.norm_sq_Myx = 0.0
        self.norm_sq_mx = 0.0
        self.norm_sq_my = 0.0
        self.cross_c = 0.0

    def __len__(self):
        return len(self.indices)

    def __repr__(self):
        return "<HsicDictionary mu={:g} n={} size={}>".format(
            self.mu, self.n, len(self)
        )

    @property
    def hsic(self) -> float:
        return (
            self.norm_sq_Myx
            + self.norm_sq_mx * self.norm_sq_my
            - 2.0 * self.cross_c
        )

    def update(self, x, y, spec_x: KernelSpec, spec_y: KernelSpec) -> float:
        if not (is_normalized(spec_x) and is_normalized(spec_y)):
            raise NonNormalizedKernel(
                "sparse HSIC needs normalized kernels, got {} and {}".format(
                    spec_x, spec_y
                )
            )
        x = as_vector(spec_x, x)
        y = as_vector(spec_y, y)
        kappa_x = eval_kernel(spec_x, x, x)
        kappa_y = eval_kernel(spec_y, y, y)
        n = self.n + 1

        if len(self):
            kx = cross_gram(spec_x, self.points_x, x[None, :])[:, 0]
            ky = cross_gram(spec_y, self.points_y, y[None, :])[:, 0]
        else:
            kx = ky = np.zeros(0)

        pi = self.counts.astype(float)
        shrink = (n - 1) ** 2 / n ** 2
        self.norm_sq_Myx = (
            shrink * self.norm_sq_Myx
            + 2.0 / n ** 2 * float(pi @ (kx * ky))
            + kappa_x * kappa_y / n ** 2
        )
        self.norm_sq_mx = (
            shrink * self.norm_sq_mx + 2.0 / n ** 2 * float(pi @ kx) + kappa_x / n ** 2
        )
        self.norm_sq_my = (
            shrink * self.norm_sq_my + 2.0 / n ** 2 * float(pi @ ky) + kappa_y / n ** 2
        )

        coherence = np.abs(kx * ky)
        if not len(self) or coherence.max() <= self.mu:
            self.v_x = np.append(self.v_x + kx, float(pi @ kx) + kappa_x)
            self.v_y = np.append(self.v_y + ky, float(pi @ ky) + kappa_y)
            self.counts = np.append(self.counts, 1)
            self.indices.append(self.n)
            if self.points_x is None:
                self.points_x = x[None, :]
                self.points_y = y[None, :]
            else:
                self.points_x = np.vstack([self.points_x, x])
                self.points_y = np.vstack([self.points_y, y])
        else:
            # argmax returns the lowest index among ties
            atom = int(np.argmax(coherence))
            self.v_x = self.v_x + kx
            self.v_y = self.v_y + ky
            self.counts[atom] += 1

        self.n = n
        self.cross_c = float(self.counts @ (self.v_x * self.v_y)) / n ** 3
        return self.hsic


def sparse_hsic_update(
    state: HsicDictionary, x, y, spec_x: KernelSpec, spec_y: KernelSpec
) -> Tuple[HsicDictionary, float]:
    """
    Feed one sample pair to ``state`` and return it with the updated
    estimate.
    """
    value = state.update(x, y, spec_x, spec_y)
    return state, value


def sparse_hsic(
    samples_x, samples_y, spec_x: KernelSpec, spec_y: KernelSpec, mu: float
) -> HsicDictionary:
    """
    Run the sparse recursion over whole sample lists
    """
    px = as_points(spec_x, samples_x)
    py = as_points(spec_y, samples_y)
    if px.shape[0] != py.shape[0]:
        raise DimensionMismatch("sample lists differ in length")
    state = HsicDictionary(mu)
    for x, y in zip(px, py):
        state.update(x, y, spec_x, spec_y)
    logger.debug("%r", state)
    return state


def independence_perm_test(
    samples_x,
    samples_y,
    spec_x: KernelSpec,
    spec_y: KernelSpec,
    num_perms: int = 100,
    level: float = 0.05,
    rng_seed: SeedLike = 0,
) -> PermutationResult:
    """
    Compare hsic_batch against its values over ``num_perms`` random
    permutations of ``samples_y`` and reject independence when it exceeds
    the (1 - level) quantile.
    """
    if num_perms < 20:
        raise InvalidParameter("num_perms must be at least 20")
    gx = gram_matrix(spec_x, samples_x)
    gy = gram_matrix(spec_y, samples_y)
    n = gx.shape[0]
    if n < 4:
        raise InvalidParameter("the permutation test needs at least 4 samples")
    if gy.shape != gx.shape:
        raise DimensionMismatch("sample lists differ in length")

    centered_x = center_gram(gx)
    statistic = hsic_batch(gx, gy)

    def replica(rng):
        order = rng.permutation(n)
        permuted = center_gram(gy[np.ix_(order, order)])
        return float((centered_x * permuted).sum()) / n ** 2

    null = parallel_map(replica, spawn_rngs(rng_seed, num_perms))
    threshold = permutation_threshold(null, level)
    logger.debug(
        "HSIC %.6g against permutation threshold %.6g", statistic, threshold
    )
    return PermutationResult(statistic, threshold, statistic > threshold)
