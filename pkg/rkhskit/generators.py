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
Reproducible synthetic data sets used by the experiments.

Every generator takes an explicit seed and draws from its own
:class:`numpy.random.Generator`; no global random state is touched.
"""
from typing import Tuple

import numpy as np

from rkhskit.exceptions import InvalidParameter
from rkhskit.utils import SeedLike
from rkhskit.utils import make_rng

#: Half width of the uniform X component of the rotation pair
ROTATION_X_HALF_WIDTH = np.sqrt(7.0)

#: Y is uniform on [-c, -b] U [b, c]; these match Var(X) = 7/3
ROTATION_Y_INNER = 1.0
ROTATION_Y_OUTER = 2.0


def _check_length(n: int, minimum: int = 1):
    if int(n) != n or n < minimum:
        raise InvalidParameter("n must be an integer >= {}".format(minimum))


def gen_rotation_pair(
    n: int, theta: float, seed: SeedLike
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Rotate an independent pair (X, Y) of equal variance by ``theta``.

    The rotated components are uncorrelated for every angle but independent
    only when theta is a multiple of pi / 2.
    """
    _check_length(n)
    rng = make_rng(seed)
    x = rng.uniform(-ROTATION_X_HALF_WIDTH, ROTATION_X_HALF_WIDTH, size=n)
    sign = rng.choice([-1.0, 1.0], size=n)
    y = sign * rng.uniform(ROTATION_Y_INNER, ROTATION_Y_OUTER, size=n)
    c, s = np.cos(theta), np.sin(theta)
    return x * c - y * s, x * s + y * c


def gen_markov_triple(
    n: int, coupling: float, seed: SeedLike
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    X = U1, Y = a (X^2 - 1) + U2, Z = Y + U3 with standard normal U's, so
    that X - Y - Z is a Markov chain.
    """
    _check_length(n)
    rng = make_rng(seed)
    u = rng.standard_normal((3, n))
    x = u[0]
    y = coupling * (x ** 2 - 1.0) + u[1]
    z = y + u[2]
    return x, y, z


def _nl_ar_map(z1: float, z2: float) -> float:
    decay = np.exp(-z1 ** 2)
    return (
        (8.0 - 5.0 * decay) * z1 / 10.0
        - (3.0 + 9.0 * decay) * z2 / 10.0
        + np.sin(np.pi * z1) / 10.0
    )


def gen_nl_ar(n: int, noise_sd: float, seed: SeedLike) -> np.ndarray:
    """
    The nonlinear autoregression

        z_n = (8 - 5 exp(-z_{n-1}^2)) z_{n-1} / 10
              - (3 + 9 exp(-z_{n-1}^2)) z_{n-2} / 10
              + sin(pi z_{n-1}) / 10 + noise

    started from z_{-1} = z_0 = 0.
    """
    _check_length(n, 3)
    if noise_sd < 0:
        raise InvalidParameter("noise_sd must be nonnegative")
    noise = noise_sd * make_rng(seed).standard_normal(n)
    z = np.zeros(n + 2)
    for i in range(2, n + 2):
        z[i] = _nl_ar_map(z[i - 1], z[i - 2]) + noise[i - 2]
    return z[2:]


def gen_linear_gaussian_ssm(
    n: int, phi: float, q: float, r: float, seed: SeedLike
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Scalar state x_n = phi x_{n-1} + w_n, observed as y_n = x_n + v_n with
    Var w = q and Var v = r. x_1 is drawn from the stationary law.
    """
    _check_length(n)
    if not abs(phi) < 1:
        raise InvalidParameter("|phi| must be below 1")
    if not (q > 0 and r > 0):
        raise InvalidParameter("noise variances must be positive")
    rng = make_rng(seed)
    w = np.sqrt(q) * rng.standard_normal(n)
    v = np.sqrt(r) * rng.standard_normal(n)
    states = np.empty(n)
    states[0] = np.sqrt(q / (1.0 - phi ** 2)) * rng.standard_normal()
    for i in range(1, n):
        states[i] = phi * states[i - 1] + w[i]
    return states, states + v


def kalman_filter(
    obs, phi: float, q: float, r: float
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Filtered means and variances of the state of
    :func:`gen_linear_gaussian_ssm` given ``obs``, starting from the
    stationary prior.
    """
    y = np.asarray(obs, dtype=float)
    if not abs(phi) < 1:
        raise InvalidParameter("|phi| must be below 1")
    means = np.empty(len(y))
    variances = np.empty(len(y))
    mean, var = 0.0, q / (1.0 - phi ** 2)
    for i, obs_i in enumerate(y):
        if i:
            mean, var = phi * mean, phi ** 2 * var + q
        gain = var / (var + r)
        mean = mean + gain * (obs_i - mean)
        var = (1.0 - gain) * var
        means[i], variances[i] = mean, var
    return means, variances


def ar_regression_pairs(z, order: int = 2) -> Tuple[np.ndarray, np.ndarray]:
    """
    Regression inputs (z_{n-1}, ..., z_{n-order}) with target z_n
    """
    z = np.asarray(z, dtype=float)
    if order < 1 or len(z) <= order:
        raise InvalidParameter("series too short for order {}".format(order))
    inputs = np.column_stack(
        [z[order - lag : len(z) - lag] for lag in range(1, order + 1)]
    )
    return inputs, z[order:]


def ar_state_pairs(z) -> Tuple[np.ndarray, np.ndarray]:
    """
    States (z_n, z_{n+1}) and their observations z_n
    """
    z = np.asarray(z, dtype=float)
    if len(z) < 2:
        raise InvalidParameter("series too short")
    return np.column_stack([z[:-1], z[1:]]), z[:-1]
