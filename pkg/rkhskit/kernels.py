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
Kernel functions, Gram matrices and centering.

Every kernel is described by an immutable :class:`KernelSpec`. Points are
passed around as ``(N, input_dim)`` arrays; a flat sequence of scalars is
accepted wherever ``input_dim`` is 1.
"""
from collections import namedtuple
from logging import getLogger
from typing import Tuple

import numpy as np
from scipy.spatial.distance import cdist

from rkhskit.exceptions import DimensionMismatch
from rkhskit.exceptions import EmptySample
from rkhskit.exceptions import InvalidDomain
from rkhskit.exceptions import InvalidParameter

logger = getLogger("rkhskit.kernels")

LINEAR = "linear"
GAUSSIAN = "gaussian"
POLYNOMIAL = "polynomial"
MIN = "min"
SINC = "sinc"

FAMILIES = (LINEAR, GAUSSIAN, POLYNOMIAL, MIN, SINC)

#: Per-point slack allowed on the smallest Gram eigenvalue
PSD_EPS = 1e-9

_KernelSpec = namedtuple(
    "_KernelSpec", "family input_dim sigma2 degree band"
)


class KernelSpec(_KernelSpec):
    """
    A positive semi-definite kernel on ``input_dim``-dimensional vectors.

    The gaussian family is ``exp(-|x - y|^2 / (2 * sigma2))``. Use
    :meth:`gaussian_from_unit_exponent` when a bandwidth is quoted for
    ``exp(-|x - y|^2 / s2)`` instead.
    """

    __slots__ = ()

    @classmethod
    def linear(cls, input_dim: int = 1) -> "KernelSpec":
        return cls(LINEAR, _check_dim(input_dim), None, None, None)

    @classmethod
    def gaussian(cls, sigma2: float = 1.0, input_dim: int = 1) -> "KernelSpec":
        if not sigma2 > 0:
            raise InvalidParameter("gaussian bandwidth must be positive")
        return cls(GAUSSIAN, _check_dim(input_dim), float(sigma2), None, None)

    @classmethod
    def gaussian_from_unit_exponent(
        cls, s2: float, input_dim: int = 1
    ) -> "KernelSpec":
        """
        The kernel ``exp(-|x - y|^2 / s2)``, ie ``sigma2 = s2 / 2``
        """
        if not s2 > 0:
            raise InvalidParameter("gaussian bandwidth must be positive")
        return cls.gaussian(s2 / 2.0, input_dim)

    @classmethod
    def polynomial(cls, degree: int, input_dim: int = 1) -> "KernelSpec":
        if int(degree) != degree or degree < 1:
            raise InvalidParameter("polynomial degree must be an integer >= 1")
        return cls(POLYNOMIAL, _check_dim(input_dim), None, int(degree), None)

    @classmethod
    def min(cls) -> "KernelSpec":
        return cls(MIN, 1, None, None, None)

    @classmethod
    def sinc(cls, band: float) -> "KernelSpec":
        if not band > 0:
            raise InvalidParameter("sinc band must be positive")
        return cls(SINC, 1, None, None, float(band))

    @property
    def is_radial(self) -> bool:
        return self.family == GAUSSIAN

    def __call__(self, points_a, points_b=None) -> np.ndarray:
        if points_b is None:
            return gram_matrix(self, points_a)
        return cross_gram(self, points_a, points_b)

    def __str__(self):
        if self.family == GAUSSIAN:
            return "gaussian(sigma2={:g}, dim={})".format(
                self.sigma2, self.input_dim
            )
        if self.family == POLYNOMIAL:
            return "polynomial(degree={}, dim={})".format(
                self.degree, self.input_dim
            )
        if self.family == SINC:
            return "sinc(band={:g})".format(self.band)
        return "{}(dim={})".format(self.family, self.input_dim)


def _check_dim(input_dim: int) -> int:
    if int(input_dim) != input_dim or input_dim < 1:
        raise InvalidParameter("input_dim must be a positive integer")
    return int(input_dim)


def as_points(spec: KernelSpec, points) -> np.ndarray:
    """
    Coerce ``points`` to a float array of shape ``(N, spec.input_dim)``.
    """
    arr = np.asarray(points, dtype=float)
    if arr.size == 0:
        raise EmptySample("no points given")
    d = spec.input_dim
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        if d == 1:
            arr = arr.reshape(-1, 1)
        elif arr.shape[0] == d:
            arr = arr.reshape(1, d)
        else:
            raise DimensionMismatch(
                "expected points of dimension {}, got a vector of "
                "length {}".format(d, arr.shape[0])
            )
    if arr.ndim != 2 or arr.shape[1] != d:
        raise DimensionMismatch(
            "expected points of dimension {}, got array of shape {}".format(
                d, arr.shape
            )
        )
    if spec.family == MIN and (arr < 0).any():
        raise InvalidDomain("the min kernel is defined on nonnegative reals")
    return arr


def as_vector(spec: KernelSpec, x) -> np.ndarray:
    """
    Coerce a single point to a vector of length ``spec.input_dim``
    """
    v = np.atleast_1d(np.asarray(x, dtype=float))
    if v.ndim != 1 or v.shape[0] != spec.input_dim:
        raise DimensionMismatch(
            "expected a point of dimension {}, got shape {}".format(
                spec.input_dim, v.shape
            )
        )
    if spec.family == MIN and (v < 0).any():
        raise InvalidDomain("the min kernel is defined on nonnegative reals")
    return v


def _cross(spec: KernelSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    family = spec.family
    if family == LINEAR:
        return a @ b.T
    if family == GAUSSIAN:
        return np.exp(-cdist(a, b, "sqeuclidean") / (2.0 * spec.sigma2))
    if family == POLYNOMIAL:
        return (1.0 + a @ b.T) ** spec.degree
    if family == MIN:
        return np.minimum(a[:, 0][:, None], b[:, 0][None, :])
    if family == SINC:
        diff = a[:, 0][:, None] - b[:, 0][None, :]
        # np.sinc(0) == 1 gives the continuous extension a / pi
        return (spec.band / np.pi) * np.sinc(spec.band * diff / np.pi)
    raise InvalidParameter("unknown kernel family {!r}".format(family))


def eval_kernel(spec: KernelSpec, x, y) -> float:
    """
    Return K(x, y).
    """
    a = as_vector(spec, x)[None, :]
    b = as_vector(spec, y)[None, :]
    return float(_cross(spec, a, b)[0, 0])


def cross_gram(spec: KernelSpec, points_a, points_b) -> np.ndarray:
    """
    Return the matrix of K(a_i, b_j).
    """
    a = as_points(spec, points_a)
    b = as_points(spec, points_b)
    return _cross(spec, a, b)


def gram_matrix(spec: KernelSpec, points) -> np.ndarray:
    """
    Return the symmetric Gram matrix of K(x_i, x_j).
    """
    p = as_points(spec, points)
    g = _cross(spec, p, p)
    return (g + g.T) / 2.0


def kernel_diagonal(spec: KernelSpec, points) -> np.ndarray:
    """
    Return the vector of K(x_i, x_i)
    """
    p = as_points(spec, points)
    if spec.family == GAUSSIAN:
        return np.ones(p.shape[0])
    return np.array([_cross(spec, row[None, :], row[None, :])[0, 0] for row in p])


def gram_sum(spec: KernelSpec, points_a, points_b, chunk: int = 2048) -> float:
    """
    Return the sum of K(a_i, b_j) over all pairs, computed in row blocks
    of ``chunk`` so that the full cross Gram is never held in memory.
    """
    a = as_points(spec, points_a)
    b = as_points(spec, points_b)
    total = 0.0
    for start in range(0, a.shape[0], chunk):
        total += float(_cross(spec, a[start : start + chunk], b).sum())
    return total


def is_normalized(spec: KernelSpec) -> bool:
    """
    True when K(x, x) = 1 for every x
    """
    return spec.family == GAUSSIAN


def centering_matrix(n: int) -> np.ndarray:
    return np.eye(n) - np.full((n, n), 1.0 / n)


def center_gram(gram, side: str = "both") -> np.ndarray:
    """
    Return ``C G C`` where ``C = I - 11'/N``.

    :param side: ``"both"`` (default), ``"left"`` for ``C G`` or
                 ``"right"`` for ``G C``
    """
    g = np.asarray(gram, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise DimensionMismatch("center_gram needs a square matrix")
    if side == "left":
        return g - g.mean(axis=0, keepdims=True)
    if side == "right":
        return g - g.mean(axis=1, keepdims=True)
    if side != "both":
        raise InvalidParameter("side must be one of 'both', 'left', 'right'")
    return (
        g
        - g.mean(axis=0, keepdims=True)
        - g.mean(axis=1, keepdims=True)
        + g.mean()
    )


def psd_check(gram) -> Tuple[float, bool]:
    """
    Return the smallest eigenvalue of ``gram`` and whether it clears the
    size-scaled tolerance ``-PSD_EPS * N``.
    """
    g = np.asarray(gram, dtype=float)
    smallest = float(np.linalg.eigvalsh(g)[0])
    return smallest, smallest >= -PSD_EPS * g.shape[0]


def rkhs_distance_sq(spec: KernelSpec, x, y) -> float:
    """
    Squared RKHS distance between the kernel atoms K(., x) and K(., y)
    """
    return (
        eval_kernel(spec, x, x)
        - 2.0 * eval_kernel(spec, x, y)
        + eval_kernel(spec, y, y)
    )


def gaussian_curve_length(
    spec: KernelSpec, x, t: float, segments: int
) -> float:
    """
    Length of the polygon through the atoms K(., s x), s = 0, t/N, ..., t.

    For ``sigma2 = 1`` this converges to ``t * |x|`` as the number of
    segments grows.
    """
    if spec.family != GAUSSIAN:
        raise InvalidParameter("curve length is defined for gaussian kernels")
    if t < 0:
        raise InvalidParameter("t must be nonnegative")
    if segments < 1:
        raise InvalidParameter("segments must be at least 1")
    v = as_vector(spec, x)
    steps = np.linspace(0.0, t, segments + 1)[:, None] * v[None, :]
    step_sq = (np.diff(steps, axis=0) ** 2).sum(axis=1)
    # K(p, p) = 1 so |K(., p) - K(., q)|^2 = 2 - 2 K(p, q)
    dist_sq = -2.0 * np.expm1(-step_sq / (2.0 * spec.sigma2))
    return float(np.sqrt(np.clip(dist_sq, 0.0, None)).sum())
