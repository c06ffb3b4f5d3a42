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
Kernel Bayes rule, the kernel Bayes filter and pre-image decoding.

The filter is trained on a state sequence x_1 .. x_{N+1} with observations
y_1 .. y_{N+1}. Posterior embeddings are carried as coefficient vectors
alpha over the training states x_1 .. x_N.

Regularized Gram inverses take the form (K + N lambda I)^{-1}, the sample
counterpart of the operator inverse (Sigma + lambda I)^{-1}.
"""
from collections import deque
from logging import getLogger

import numpy as np
import scipy.linalg

from rkhskit.exceptions import DimensionMismatch
from rkhskit.exceptions import FilterOverflow
from rkhskit.exceptions import InvalidParameter
from rkhskit.exceptions import PreimageDiverged
from rkhskit.kernels import KernelSpec
from rkhskit.kernels import as_points
from rkhskit.kernels import as_vector
from rkhskit.kernels import cross_gram
from rkhskit.kernels import gram_matrix
from rkhskit.utils import SeedLike
from rkhskit.utils import cho_factor_pos
from rkhskit.utils import solve_pos
from rkhskit.utils import spawn_rngs

logger = getLogger("rkhskit.kbr")

#: Iterates further than this many data radii from the centroid diverge
DIVERGENCE_RADII = 10.0

#: Number of past iterates inspected for cycles
CYCLE_WINDOW = 4

#: LU pivot ratio below which a Bayes system is reported as ill-conditioned
ILL_CONDITIONED = 1e-12


def _bayes_weights(mu, gram, k_query, reg_epsilon) -> np.ndarray:
    """
    Lambda K ((K Lambda)^2 + eps I)^{-1} Lambda k with Lambda = Diag(mu)
    """
    n = gram.shape[0]
    k_lambda = gram * mu[None, :]
    system = k_lambda @ k_lambda + reg_epsilon * np.eye(n)
    lu, piv = scipy.linalg.lu_factor(system, check_finite=False)
    pivots = np.abs(np.diag(lu))
    if pivots.min() < ILL_CONDITIONED * pivots.max():
        logger.debug(
            "Bayes system is ill-conditioned (pivot ratio %.3g)",
            pivots.min() / pivots.max(),
        )
    solution = scipy.linalg.lu_solve((lu, piv), mu * k_query, check_finite=False)
    return mu * (gram @ solution)


def _check_regularizers(reg_lambda, reg_epsilon):
    if not reg_lambda > 0:
        raise InvalidParameter("reg_lambda must be positive")
    if not reg_epsilon > 0:
        raise InvalidParameter("reg_epsilon must be positive")


def kbr_posterior(
    prior_coeffs,
    prior_points,
    joint_x,
    joint_y,
    spec_x: KernelSpec,
    spec_y: KernelSpec,
    reg_lambda: float,
    reg_epsilon: float,
    query_x,
) -> np.ndarray:
    """
    Posterior embedding of Y given X = ``query_x``, as coefficients over
    the joint samples y_j.

    The prior on Y is sum_i prior_coeffs[i] K_y(., prior_points[i]) and the
    likelihood is learnt from the joint samples (x_j, y_j).
    """
    _check_regularizers(reg_lambda, reg_epsilon)
    gamma = np.asarray(prior_coeffs, dtype=float)
    jx = as_points(spec_x, joint_x)
    jy = as_points(spec_y, joint_y)
    if jx.shape[0] != jy.shape[0]:
        raise DimensionMismatch("joint sample lists differ in length")
    n = jx.shape[0]

    prior_at_joint = cross_gram(spec_y, jy, prior_points) @ gamma
    gram_y = gram_matrix(spec_y, jy)
    mu = solve_pos(
        gram_y + n * reg_lambda * np.eye(n),
        prior_at_joint,
        "regularized Gram matrix of the joint y samples",
    )
    gram_x = gram_matrix(spec_x, jx)
    k_query = cross_gram(spec_x, jx, as_vector(spec_x, query_x)[None, :])[:, 0]
    return _bayes_weights(mu, gram_x, k_query, reg_epsilon)


def conditional_embedding(gram_x, k_query, reg_lambda: float) -> np.ndarray:
    """
    Coefficients (K_x + N lambda I)^{-1} k_X(x) of the conditional mean
    embedding Sigma_YX Sigma_XX^{-1} K(., x) over the joint y samples
    """
    gram_x = np.asarray(gram_x, dtype=float)
    n = gram_x.shape[0]
    return solve_pos(
        gram_x + n * reg_lambda * np.eye(n),
        np.asarray(k_query),
        "regularized Gram matrix",
    )


class KbrModel(object):
    """
    Precomputed Gram structures of a trained kernel Bayes filter.

    ``transition_T`` is (K_x + N lambda I)^{-1} K_{XX+} (K_x + N lambda I)^{-1} K_x
    where K_{XX+}[i, j] = K(x_i, x_{j+1}); it maps the posterior
    coefficients at one step to the prior weights at the next.
    """

    def __init__(
        self,
        train_x,
        train_y,
        spec_x: KernelSpec,
        spec_y: KernelSpec,
        reg_lambda: float = 1e-4,
        reg_epsilon: float = 1e-4,
    ):
        _check_regularizers(reg_lambda, reg_epsilon)
        x = as_points(spec_x, train_x)
        y = as_points(spec_y, train_y)
        if x.shape[0] != y.shape[0]:
            raise DimensionMismatch("state and observation sequences differ")
        if x.shape[0] < 2:
            raise InvalidParameter("at least two training steps are required")
        n = x.shape[0] - 1
        self.spec_x = spec_x
        self.spec_y = spec_y
        self.reg_lambda = reg_lambda
        self.reg_epsilon = reg_epsilon
        self.train_x = x
        self.train_y = y
        self.gram_x = gram_matrix(spec_x, x[:n])
        self.gram_y = gram_matrix(spec_y, y[:n])
        self.gram_x_shift = cross_gram(spec_x, x[:n], x[1:])

        ridge = n * reg_lambda * np.eye(n)
        x_factor = cho_factor_pos(self.gram_x + ridge, "regularized state Gram matrix")
        inner = scipy.linalg.cho_solve(x_factor, self.gram_x)
        self.transition_T = scipy.linalg.cho_solve(
            x_factor, self.gram_x_shift @ inner
        )
        if not np.isfinite(self.transition_T).all():
            raise FilterOverflow("transition matrix is not finite", step=0)
        self._y_factor = cho_factor_pos(
            self.gram_y + ridge, "regularized observation Gram matrix"
        )
        logger.debug("Built %r", self)

    @classmethod
    def build(
        cls,
        train_x,
        train_y,
        spec_x: KernelSpec,
        spec_y: KernelSpec,
        reg_lambda: float = 1e-4,
        reg_epsilon: float = 1e-4,
    ) -> "KbrModel":
        return cls(train_x, train_y, spec_x, spec_y, reg_lambda, reg_epsilon)

    @property
    def n(self) -> int:
        return self.gram_x.shape[0]

    @property
    def states(self) -> np.ndarray:
        """
        The states x_1 .. x_N carrying the posterior coefficients
        """
        return self.train_x[: self.n]

    def k_y(self, y_obs) -> np.ndarray:
        y = as_vector(self.spec_y, y_obs)
        return cross_gram(self.spec_y, self.train_y[: self.n], y[None, :])[:, 0]

    def __repr__(self):
        return "<KbrModel N={} kernel_x={} kernel_y={}>".format(
            self.n, self.spec_x, self.spec_y
        )


class KbrState(object):
    def __init__(self, alpha, step: int = 0):
        self.alpha = np.asarray(alpha, dtype=float)
        self.step = step

    def __repr__(self):
        return "<KbrState step={} N={}>".format(self.step, len(self.alpha))


def kbr_filter_init(model: KbrModel, y_first) -> KbrState:
    """
    alpha = (K_y + N lambda I)^{-1} k_Y(y_first)
    """
    alpha = scipy.linalg.cho_solve(model._y_factor, model.k_y(y_first))
    return KbrState(alpha, 0)


def kbr_prior_weights(model: KbrModel, state: KbrState) -> np.ndarray:
    """
    Prior weights mu = T alpha for the next step over the joint samples.

    Negative weights are clipped and the rest scaled to unit sum, so the
    result is a probability vector, or all zeros when no weight is positive.
    Non-finite weights are returned unchanged.
    """
    if state.alpha.shape != (model.n,):
        raise DimensionMismatch("state does not belong to this model")
    with np.errstate(over="ignore", invalid="ignore"):
        mu = model.transition_T @ state.alpha
    if not np.isfinite(mu).all():
        return mu
    mu = np.clip(mu, 0.0, None)
    total = mu.sum()
    if not total > 0:
        return mu
    return mu / total


def kbr_filter_step(model: KbrModel, state: KbrState, y_obs) -> KbrState:
    """
    Predict with the transition matrix, then condition on ``y_obs``
    """
    step = state.step + 1
    mu = kbr_prior_weights(model, state)
    if not np.isfinite(mu).all():
        raise FilterOverflow(
            "prior weights overflowed at step {}".format(step), step=step
        )
    if not mu.any():
        logger.warning("prior weights vanished at step %d", step)
    alpha = _bayes_weights(mu, model.gram_y, model.k_y(y_obs), model.reg_epsilon)
    if not np.isfinite(alpha).all():
        raise FilterOverflow(
            "filter coefficients overflowed at step {}".format(step), step=step
        )
    return KbrState(alpha, step)
def preimage_map(x, alpha, points, spec: KernelSpec) -> np.ndarray:
    """
    One fixed point step x -> sum_i w_i x_i / sum_i w_i with
    w_i = alpha_i K(x, x_i). Returns NaNs when the weights cancel.
    """
    weights = alpha * cross_gram(spec, x[None, :], points)[0]
    total = weights.sum()
    if not np.isfinite(total) or abs(total) < 1e-300:
        return np.full_like(x, np.nan)
    return (weights @ points) / total


def _run_restart(x, alpha, points, spec, max_iters, tol, centroid, limit):
    history = deque(maxlen=CYCLE_WINDOW)  # type: deque
    for _ in range(max_iters):
        x_next = preimage_map(x, alpha, points, spec)
        if not np.isfinite(x_next).all():
            return x, False, "vanishing weights"
        if np.linalg.norm(x_next - centroid) > limit:
            return x, False, "diverged"
        if np.linalg.norm(x_next - x) <= tol:
            return x, True, None
        if any(np.linalg.norm(x_next - h) <= tol for h in history):
            return x, False, "oscillating"
        history.append(x)
        x = x_next
    return x, False, "no convergence in {} iterations".format(max_iters)


def preimage(
    alpha,
    points,
    spec: KernelSpec,
    max_iters: int = 200,
    num_restarts: int = 5,
    tol: float = 1e-8,
    rng_seed: SeedLike = 0,
) -> np.ndarray:
    """
    Find x whose atom K(., x) best approximates sum_i alpha_i K(., x_i).

    Each restart iterates :func:`preimage_map` from a random convex
    combination of the points, weighted towards atoms with large |alpha_i|.
    Restarts that diverge, oscillate or stall are discarded and the
    converged point of smallest approximation error is returned.
    """
    if not spec.is_radial:
        raise InvalidParameter("pre-images need a radial kernel")
    if num_restarts < 1:
        raise InvalidParameter("num_restarts must be at least 1")
    if max_iters < 1:
        raise InvalidParameter("max_iters must be at least 1")
    pts = as_points(spec, points)
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (pts.shape[0],):
        raise DimensionMismatch("one coefficient per point is required")
    magnitude = np.abs(alpha)
    if not magnitude.sum() > 0:
        raise InvalidParameter("cannot decode the zero element")

    centroid = pts.mean(axis=0)
    radius = float(np.linalg.norm(pts - centroid, axis=1).max()) or 1.0
    limit = DIVERGENCE_RADII * radius

    def cost(x):
        # |K(., x) - f|^2 up to the constant |f|^2
        return 1.0 - 2.0 * float(cross_gram(spec, x[None, :], pts)[0] @ alpha)

    best = None
    fallback = None
    for attempt, rng in enumerate(spawn_rngs(rng_seed, num_restarts)):
        weights = rng.dirichlet(np.ones(len(alpha))) * magnitude
        start = (weights / weights.sum()) @ pts
        x, converged, reason = _run_restart(
            start, alpha, pts, spec, max_iters, tol, centroid, limit
        )
        value = cost(x)
        if converged:
            if best is None or value < best[0]:
                best = (value, x)
        else:
            logger.debug("pre-image restart %d failed: %s", attempt, reason)
            if fallback is None or value < fallback[0]:
                fallback = (value, x)

    if best is None:
        raise PreimageDiverged(
            "all {} pre-image restarts failed".format(num_restarts),
            fallback[1],
        )
    return best[1]


def decode_state(
    model: KbrModel,
    state: KbrState,
    max_iters: int = 200,
    num_restarts: int = 5,
    tol: float = 1e-8,
    rng_seed: SeedLike = 0,
) -> np.ndarray:
    """
    Pre-image of the posterior embedding held in ``state``
    """
    return preimage(
        state.alpha,
        model.states,
        model.spec_x,
        max_iters=max_iters,
        num_restarts=num_restarts,
        tol=tol,
        rng_seed=rng_seed,
    )

