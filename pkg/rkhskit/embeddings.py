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
Empirical mean elements and covariance operators in Gram-matrix form.

An element f = sum_i alpha_i K(., x_i) is carried as its coefficient vector
alpha over the sample points. Covariance operators act on these vectors
through the Gram matrices of the samples.
"""
from collections import namedtuple
from logging import getLogger
from typing import Optional
from typing import Union

import numpy as np
import scipy.linalg

from rkhskit.exceptions import DimensionMismatch
from rkhskit.exceptions import InvalidParameter
from rkhskit.exceptions import SingularMatrix
from rkhskit.kernels import KernelSpec
from rkhskit.kernels import as_points
from rkhskit.kernels import center_gram
from rkhskit.kernels import cross_gram
from rkhskit.kernels import gram_matrix
from rkhskit.kernels import gram_sum
from rkhskit.utils import PermutationResult
from rkhskit.utils import SeedLike
from rkhskit.utils import parallel_map
from rkhskit.utils import permutation_threshold
from rkhskit.utils import solve_pos
from rkhskit.utils import spawn_rngs

logger = getLogger("rkhskit.embeddings")


class MeanEmbedding(object):
    """
    The element sum_i coeffs[i] K(., points[i]) of the RKHS of ``spec``.
    """

    def __init__(self, spec: KernelSpec, points, coeffs):
        points = as_points(spec, points).copy()
        coeffs = np.array(coeffs, dtype=float)
        if coeffs.shape != (points.shape[0],):
            raise DimensionMismatch(
                "{} coefficients for {} points".format(
                    coeffs.shape, points.shape[0]
                )
            )
        points.flags.writeable = False
        coeffs.flags.writeable = False
        self.spec = spec
        self.points = points
        self.coeffs = coeffs

    def __len__(self):
        return self.points.shape[0]

    def __repr__(self):
        return "<MeanEmbedding N={} kernel={}>".format(len(self), self.spec)

    def evaluate(self, z) -> np.ndarray:
        """
        Values sum_i coeffs[i] K(z_j, points[i]) at every point z_j
        """
        return cross_gram(self.spec, z, self.points) @ self.coeffs

    def inner_with_coeffs(self, beta) -> float:
        """
        <f, m> for f = sum_j beta_j K(., points[j])
        """
        beta = np.asarray(beta, dtype=float)
        return float(self.coeffs @ gram_matrix(self.spec, self.points) @ beta)

    def norm_sq(self) -> float:
        return embedding_inner(self, self)


def mean_embed(spec: KernelSpec, samples) -> MeanEmbedding:
    """
    The sample mean (1/N) sum_i K(., x_i)
    """
    points = as_points(spec, samples)
    n = points.shape[0]
    return MeanEmbedding(spec, points, np.full(n, 1.0 / n))


def embedding_inner(a: MeanEmbedding, b: MeanEmbedding) -> float:
    if a.spec != b.spec:
        raise InvalidParameter("embeddings live in different spaces")
    return float(a.coeffs @ cross_gram(a.spec, a.points, b.points) @ b.coeffs)


def embedding_distance_sq(a: MeanEmbedding, b: MeanEmbedding) -> float:
    value = (
        embedding_inner(a, a)
        + embedding_inner(b, b)
        - 2.0 * embedding_inner(a, b)
    )
    return max(value, 0.0)


def gaussian_normal_embedding_error(samples, sigma2: float) -> float:
    """
    |m_N - m|^2 where m_N is the sample mean embedding of ``samples`` and m
    the exact mean element of the standard normal law, both under the
    gaussian kernel of bandwidth ``sigma2``.
    """
    points = np.asarray(samples, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    spec = KernelSpec.gaussian(sigma2, points.shape[1])
    n, d = points.shape
    s = spec.sigma2
    sample_term = gram_sum(spec, points, points) / n ** 2
    exact_at_samples = (s / (s + 1.0)) ** (d / 2.0) * np.exp(
        -(points ** 2).sum(axis=1) / (2.0 * (s + 1.0))
    )
    exact_norm_sq = (s / (s + 2.0)) ** (d / 2.0)
    return float(sample_term - 2.0 * exact_at_samples.mean() + exact_norm_sq)


class CovOperatorRep(object):
    """
    Gram-matrix representation of an empirical (cross-)covariance operator.

    When ``centered`` is false the centering matrix is dropped, which gives
    the uncentered second moment operator.
    """

    def __init__(self, gram_x, gram_y=None, centered=True, reg_lambda=0.0):
        gram_x = np.asarray(gram_x, dtype=float)
        gram_y = gram_x if gram_y is None else np.asarray(gram_y, dtype=float)
        if (
            gram_x.ndim != 2
            or gram_x.shape[0] != gram_x.shape[1]
            or gram_x.shape != gram_y.shape
        ):
            raise DimensionMismatch(
                "gram matrices must be square and of equal size, got "
                "{} and {}".format(gram_x.shape, gram_y.shape)
            )
        if reg_lambda < 0:
            raise InvalidParameter("reg_lambda must be nonnegative")
        self.gram_x = gram_x
        self.gram_y = gram_y
        self.centered = centered
        self.reg_lambda = reg_lambda

    @property
    def n(self) -> int:
        return self.gram_x.shape[0]

    def __repr__(self):
        return "<CovOperatorRep N={} centered={} reg_lambda={:g}>".format(
            self.n, self.centered, self.reg_lambda
        )


def cov_bilinear(rep: CovOperatorRep, alpha, beta) -> float:
    """
    <f, Sigma_XY g> = (1/N) alpha' K_x C K_y beta
    """
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if alpha.shape != (rep.n,) or beta.shape != (rep.n,):
        raise DimensionMismatch("coefficient vectors must have length N")
    fx = rep.gram_x @ alpha
    gy = rep.gram_y @ beta
    if rep.centered:
        gy = gy - gy.mean()
    return float(fx @ gy) / rep.n


def apply_reg_inverse(gram, reg_lambda: float, beta) -> np.ndarray:
    """
    Coefficients of (Sigma + lambda I)^{-1} g for g = sum_i beta_i K(., x_i),
    ie N (K + N lambda I)^{-1} beta.
    """
    if not reg_lambda > 0:
        raise InvalidParameter("reg_lambda must be positive")
    K = np.asarray(gram, dtype=float)
    beta = np.asarray(beta, dtype=float)
    n = K.shape[0]
    if beta.shape[0] != n:
        raise DimensionMismatch("beta must have one entry per sample")
    regularized = K + n * reg_lambda * np.eye(n)
    return n * solve_pos(regularized, beta, "regularized Gram matrix")


def _mmd_from_gram(gram, first, second) -> float:
    kpp = gram[np.ix_(first, first)].mean()
    kqq = gram[np.ix_(second, second)].mean()
    kpq = gram[np.ix_(first, second)].mean()
    return max(kpp + kqq - 2.0 * kpq, 0.0)


def mmd_sq(spec: KernelSpec, samples_p, samples_q) -> float:
    """
    Biased (V-statistic) estimate of |mu_P - mu_Q|^2.

    The bias is of order 1/N + 1/M, so the estimate is positive even for
    two samples of the same law.
    """
    p = as_points(spec, samples_p)
    q = as_points(spec, samples_q)
    kpp = cross_gram(spec, p, p).mean()
    kqq = cross_gram(spec, q, q).mean()
    kpq = cross_gram(spec, p, q).mean()
    return max(kpp + kqq - 2.0 * kpq, 0.0)


def mmd_perm_test(
    spec: KernelSpec,
    samples_p,
    samples_q,
    num_perms: int = 100,
    level: float = 0.05,
    rng_seed: SeedLike = 0,
) -> PermutationResult:
    """
    Two sample test: mmd_sq against its distribution under random
    relabelling of the pooled sample.
    """
    if num_perms < 20:
        raise InvalidParameter("num_perms must be at least 20")
    p = as_points(spec, samples_p)
    q = as_points(spec, samples_q)
    pooled = np.vstack([p, q])
    gram = gram_matrix(spec, pooled)
    n = p.shape[0]
    labels = np.arange(pooled.shape[0])
    statistic = _mmd_from_gram(gram, labels[:n], labels[n:])

    def replica(rng):
        order = rng.permutation(labels)
        return _mmd_from_gram(gram, order[:n], order[n:])

    null = parallel_map(replica, spawn_rngs(rng_seed, num_perms))
    threshold = permutation_threshold(null, level)
    return PermutationResult(statistic, threshold, statistic > threshold)


_Detector = namedtuple("_Detector", "coeffs d_max centers spec")


class Detector(_Detector):
    """
    A deflection-optimal detector f and its deflection d_max.

    For the finite dimensional case ``coeffs`` is f itself and the detector
    output is f'y. Otherwise f = sum_j coeffs[j] K(., centers[j]).

    Since f = Sigma_0^{-1}(mu_1 - mu_0) also represents the likelihood
    ratio of H1 against H0 in the linear span of the kernel atoms, the same
    object serves as its estimate.
    """

    __slots__ = ()

    def evaluate(self, z) -> np.ndarray:
        if self.spec is None:
            return np.asarray(z, dtype=float) @ self.coeffs
        return cross_gram(self.spec, z, self.centers) @ self.coeffs


def _finite_detector(mu0, mu1, sigma0, reg_lambda: float) -> Detector:
    mu0 = np.atleast_1d(np.asarray(mu0, dtype=float))
    mu1 = np.atleast_1d(np.asarray(mu1, dtype=float))
    sigma0 = np.atleast_2d(np.asarray(sigma0, dtype=float))
    n = mu0.shape[0]
    if mu1.shape != (n,) or sigma0.shape != (n, n):
        raise DimensionMismatch("means and covariance do not agree in dimension")
    S = sigma0 + reg_lambda * np.eye(n)
    try:
        factor = scipy.linalg.cho_factor(S)
    except scipy.linalg.LinAlgError:
        raise SingularMatrix(
            "covariance is not positive definite; use reg_lambda > 0"
        )
    diff = mu1 - mu0
    f = scipy.linalg.cho_solve(factor, diff)
    return Detector(f, float(diff @ f), None, None)


def _empirical_detector(
    mu0: MeanEmbedding, mu1: MeanEmbedding, reg_lambda: float, centered: bool
) -> Detector:
    if mu0.spec != mu1.spec:
        raise InvalidParameter("embeddings live in different spaces")
    spec = mu0.spec
    centers = np.vstack([mu0.points, mu1.points])
    k_z0 = cross_gram(spec, centers, mu0.points)
    k_z1 = cross_gram(spec, centers, mu1.points)
    k_zz = gram_matrix(spec, centers)
    # (mu_1 - mu_0) evaluated at each center
    d = k_z1 @ mu1.coeffs - k_z0 @ mu0.coeffs

    n0 = len(mu0)
    spread = center_gram(k_z0, side="right") if centered else k_z0
    S = spread @ spread.T / n0 + reg_lambda * k_zz
    S = (S + S.T) / 2.0
    values = np.linalg.eigvalsh(S)
    rank_cut = 1e-12 * max(values[-1], 0.0)
    if reg_lambda == 0 and (values <= rank_cut).any():
        raise SingularMatrix(
            "empirical covariance is rank deficient; use reg_lambda > 0"
        )
    coeffs = scipy.linalg.pinvh(S, rtol=1e-12) @ d
    return Detector(coeffs, float(d @ coeffs), centers, spec)


def deflection_detector(
    mu0: Union[MeanEmbedding, np.ndarray],
    mu1: Union[MeanEmbedding, np.ndarray],
    sigma0: Optional[Union[CovOperatorRep, np.ndarray]] = None,
    reg_lambda: float = 0.0,
) -> Detector:
    """
    The detector maximizing the deflection (E_1 f - E_0 f)^2 / Var_0 f,
    f = (Sigma_0 + lambda I)^{-1}(mu_1 - mu_0), with
    d_max = <mu_1 - mu_0, f>.

    Pass vectors and a covariance matrix for the finite dimensional case,
    or two :class:`MeanEmbedding` for the empirical case. In the empirical
    case Sigma_0 is the covariance of the H0 sample; ``sigma0`` may be a
    :class:`CovOperatorRep` whose ``centered`` and ``reg_lambda`` then
    apply.
    """
    if reg_lambda < 0:
        raise InvalidParameter("reg_lambda must be nonnegative")
    if isinstance(mu0, MeanEmbedding):
        centered = True
        if isinstance(sigma0, CovOperatorRep):
            centered = sigma0.centered
            reg_lambda = reg_lambda or sigma0.reg_lambda
        return _empirical_detector(mu0, mu1, reg_lambda, centered)
    if sigma0 is None:
        raise InvalidParameter("a covariance matrix is required")
    return _finite_detector(mu0, mu1, sigma0, reg_lambda)


def empirical_deflection_detector(
    spec: KernelSpec, samples_h0, samples_h1, reg_lambda: float
) -> Detector:
    return deflection_detector(
        mean_embed(spec, samples_h0),
        mean_embed(spec, samples_h1),
        None,
        reg_lambda,
    )


def deflection(mu0, mu1, sigma0, direction) -> float:
    """
    <mu_1 - mu_0, f>^2 / <f, Sigma_0 f> for a finite dimensional f
    """
    f = np.asarray(direction, dtype=float)
    diff = np.asarray(mu1, dtype=float) - np.asarray(mu0, dtype=float)
    spread = float(f @ np.asarray(sigma0, dtype=float) @ f)
    if spread <= 0:
        raise InvalidParameter("direction has zero variance under H0")
    return float(diff @ f) ** 2 / spread
