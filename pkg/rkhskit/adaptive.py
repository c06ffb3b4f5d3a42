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
Online kernel adaptive filters.

kRLS admits a sample into its dictionary when the approximate linear
dependence (ALD) residual of its kernel atom exceeds ``ald_threshold``.
kLMS admits a sample when its largest kernel similarity to the dictionary
falls below ``coherence_threshold``. A larger threshold therefore means a
smaller kRLS dictionary but a larger kLMS one.
"""
from logging import getLogger
import logging
from typing import Tuple
from typing import Union

import numpy as np
import scipy.linalg

from rkhskit.exceptions import DimensionMismatch
from rkhskit.exceptions import EmptySample
from rkhskit.exceptions import InvalidParameter
from rkhskit.exceptions import SingularMatrix
from rkhskit.kernels import KernelSpec
from rkhskit.kernels import as_points
from rkhskit.kernels import as_vector
from rkhskit.kernels import cross_gram
from rkhskit.kernels import eval_kernel
from rkhskit.kernels import gram_matrix

logger = getLogger("rkhskit.adaptive")

#: Floor applied to the ALD residual before dividing by it
ALD_FLOOR = 1e-12

INVERSE_TOL = 1e-6


class KrlsState(object):
    """
    kRLS filter state: dictionary, inverse dictionary Gram ``K_inv``,
    ``P = (A'A)^{-1}`` and the coefficients ``alpha``.
    """

    def __init__(self, dict_points, K_inv, P, alpha, ald_threshold, n=1):
        if not ald_threshold > 0:
            raise InvalidParameter("ald_threshold must be positive")
        self.dict_points = np.atleast_2d(np.asarray(dict_points, dtype=float))
        self.K_inv = np.atleast_2d(np.asarray(K_inv, dtype=float))
        self.P = np.atleast_2d(np.asarray(P, dtype=float))
        self.alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
        self.ald_threshold = ald_threshold
        self.n = n

    @classmethod
    def start(cls, x, y: float, spec: KernelSpec, ald_threshold: float):
        x = as_vector(spec, x)
        kxx = eval_kernel(spec, x, x)
        if not kxx > 0:
            raise InvalidParameter("K(x, x) must be positive for the first sample")
        return cls(x[None, :], [[1.0 / kxx]], [[1.0]], [y / kxx], ald_threshold)

    def __len__(self):
        return self.dict_points.shape[0]

    def __repr__(self):
        return "<KrlsState n={} dictionary={} e0={:g}>".format(
            self.n, len(self), self.ald_threshold
        )


class KlmsState(object):
    """
    Normalized kLMS filter state
    """

    def __init__(
        self,
        dict_points,
        alpha,
        coherence_threshold: float,
        step_size: float,
        stabilizer: float,
        n: int = 1,
    ):
        if not 0 < coherence_threshold < 1:
            raise InvalidParameter("coherence_threshold must lie in (0, 1)")
        if not step_size > 0:
            raise InvalidParameter("step_size must be positive")
        if not stabilizer > 0:
            raise InvalidParameter("stabilizer must be positive")
        self.dict_points = np.atleast_2d(np.asarray(dict_points, dtype=float))
        self.alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
        self.coherence_threshold = coherence_threshold
        self.step_size = step_size
        self.stabilizer = stabilizer
        self.n = n

    @classmethod
    def start(
        cls,
        x,
        y: float,
        spec: KernelSpec,
        coherence_threshold: float,
        step_size: float = 0.09,
        stabilizer: float = 0.03,
    ):
        x = as_vector(spec, x)
        kxx = eval_kernel(spec, x, x)
        if not kxx > 0:
            raise InvalidParameter("K(x, x) must be positive for the first sample")
        return cls(
            x[None, :], [y / kxx], coherence_threshold, step_size, stabilizer
        )

    def __len__(self):
        return self.dict_points.shape[0]

    def __repr__(self):
        return "<KlmsState n={} dictionary={} e0={:g}>".format(
            self.n, len(self), self.coherence_threshold
        )


def _kernel_vector(state, x: np.ndarray, spec: KernelSpec) -> np.ndarray:
    if not len(state):
        raise EmptySample("the dictionary is empty")
    return cross_gram(spec, state.dict_points, x[None, :])[:, 0]


def _verify_inverse(state: KrlsState, spec: KernelSpec):
    product = state.K_inv @ gram_matrix(spec, state.dict_points)
    error = float(np.abs(product - np.eye(len(state))).max())
    if error > INVERSE_TOL:
        logger.warning(
            "kRLS inverse Gram drifted by %.3g after %d samples", error, state.n
        )


def krls_step(
    state: KrlsState, x, y: float, spec: KernelSpec
) -> Tuple[KrlsState, float, float]:
    """
    Process one sample, returning the state, the prediction made before the
    update and the ALD residual e_n.
    """
    x = as_vector(spec, x)
    k = _kernel_vector(state, x, spec)
    prediction = float(k @ state.alpha)
    innovation = y - prediction
    a = state.K_inv @ k
    ald = eval_kernel(spec, x, x) - float(k @ a)

    if ald <= state.ald_threshold:
        P_a = state.P @ a
        gain = P_a / (1.0 + float(a @ P_a))
        state.alpha = state.alpha + (state.K_inv @ gain) * innovation
        state.P = state.P - np.outer(gain, P_a)
    else:
        if ald < ALD_FLOOR:
            logger.warning(
                "ALD residual %.3g clipped to %g at sample %d",
                ald,
                ALD_FLOOR,
                state.n + 1,
            )
        e = max(ald, ALD_FLOOR)
        d = len(state)
        K_inv = np.empty((d + 1, d + 1))
        K_inv[:d, :d] = e * state.K_inv + np.outer(a, a)
        K_inv[:d, d] = -a
        K_inv[d, :d] = -a
        K_inv[d, d] = 1.0
        state.K_inv = K_inv / e
        state.P = scipy.linalg.block_diag(state.P, 1.0)
        state.alpha = np.append(
            state.alpha - a * innovation / e, innovation / e
        )
        state.dict_points = np.vstack([state.dict_points, x])

    state.n += 1
    if logger.isEnabledFor(logging.DEBUG):
        _verify_inverse(state, spec)
    return state, prediction, ald


def klms_step(
    state: KlmsState, x, y: float, spec: KernelSpec
) -> Tuple[KlmsState, float]:
    """
    Process one sample, returning the state and the prediction made before
    the update.
    """
    x = as_vector(spec, x)
    k = _kernel_vector(state, x, spec)
    prediction = float(k @ state.alpha)
    innovation = y - prediction
    coherence = float(np.abs(k).max())

    if coherence >= state.coherence_threshold:
        step = state.step_size * innovation / (state.stabilizer + float(k @ k))
        state.alpha = state.alpha + step * k
    else:
        extended = np.append(k, eval_kernel(spec, x, x))
        step = state.step_size * innovation / (
            state.stabilizer + float(extended @ extended)
        )
        state.alpha = np.append(state.alpha, 0.0) + step * extended
        state.dict_points = np.vstack([state.dict_points, x])

    state.n += 1
    return state, prediction


def adaptive_predict(
    state: Union[KrlsState, KlmsState], x, spec: KernelSpec
) -> float:
    """
    sum_i alpha_i K(x, d_i) over the dictionary
    """
    x = as_vector(spec, x)
    return float(_kernel_vector(state, x, spec) @ state.alpha)


def ridge_fit(spec: KernelSpec, points, targets, reg_lambda: float) -> np.ndarray:
    """
    Batch kernel ridge regression coefficients (K + lambda I)^{-1} y
    """
    if reg_lambda < 0:
        raise InvalidParameter("reg_lambda must be nonnegative")
    pts = as_points(spec, points)
    y = np.asarray(targets, dtype=float)
    if y.shape != (pts.shape[0],):
        raise DimensionMismatch("one target per point is required")
    system = gram_matrix(spec, pts) + reg_lambda * np.eye(pts.shape[0])
    try:
        return scipy.linalg.solve(system, y, assume_a="pos")
    except scipy.linalg.LinAlgError:
        raise SingularMatrix("the regularized Gram matrix is singular")
