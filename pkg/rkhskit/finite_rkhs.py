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
Kernels of finite dimensional inner product subspaces, minimum norm
interpolation and linear solving, and the Mercer decomposition of the
discretized min kernel.

A subspace V of R^n with an inner product has a unique kernel matrix K whose
columns k_i lie in V and satisfy <v, k_i> = v_i for every v in V. The
constructions below compute K from an orthonormal basis, from a metric on
the whole space, from an arbitrary spanning set, or column by column as the
solution of a constrained minimization.
"""
from collections import namedtuple
from logging import getLogger
from typing import Iterable
from typing import List
from typing import Optional
from typing import Tuple
from typing import Union

import numpy as np
import scipy.linalg

from rkhskit.exceptions import DimensionMismatch
from rkhskit.exceptions import InfeasibleConstraints
from rkhskit.exceptions import InvalidParameter
from rkhskit.exceptions import NotOrthonormal
from rkhskit.exceptions import SingularMatrix
from rkhskit.kernels import KernelSpec
from rkhskit.kernels import as_points
from rkhskit.kernels import cross_gram
from rkhskit.kernels import gram_matrix
from rkhskit.utils import solve_pos

logger = getLogger("rkhskit.finite_rkhs")

ORTHONORMAL_TOL = 1e-8

#: Relative eigenvalue cutoff for pseudo-inverses
PINV_RTOL = 1e-10


class SubspaceKernel(object):
    """
    The kernel matrix of an inner product subspace of R^n
    """

    def __init__(self, K):
        K = np.asarray(K, dtype=float)
        if K.ndim != 2 or K.shape[0] != K.shape[1]:
            raise DimensionMismatch("a subspace kernel must be a square matrix")
        self.K = (K + K.T) / 2.0

    @property
    def n(self) -> int:
        return self.K.shape[0]

    @property
    def rank(self) -> int:
        return int(np.linalg.matrix_rank(self.K, tol=PINV_RTOL * self.scale))

    @property
    def scale(self) -> float:
        return max(float(np.abs(self.K).max()), 1.0)

    def column(self, i: int) -> np.ndarray:
        return self.K[:, i].copy()

    def inner(self, u, v) -> float:
        return subspace_inner(self, u, v)

    def __repr__(self):
        return "<SubspaceKernel n={} rank={}>".format(self.n, self.rank)


class InnerProductSubspace(object):
    """
    A subspace spanned by the columns of ``basis`` (n x r), with inner
    products between spanning vectors given by ``gram_of_basis`` (r x r).
    """

    def __init__(self, basis, gram_of_basis, is_basis: bool = True):
        basis = np.asarray(basis, dtype=float)
        if basis.ndim == 1:
            basis = basis[:, None]
        gram = np.atleast_2d(np.asarray(gram_of_basis, dtype=float))
        n, r = basis.shape
        if r > n and is_basis:
            raise DimensionMismatch(
                "{} basis vectors cannot be independent in R^{}".format(r, n)
            )
        if gram.shape != (r, r):
            raise DimensionMismatch(
                "gram_of_basis must be {0}x{0}, got {1}".format(r, gram.shape)
            )
        if not np.allclose(gram, gram.T, atol=1e-12 * max(1.0, abs(gram).max())):
            raise InvalidParameter("gram_of_basis must be symmetric")
        self.basis = basis
        self.gram_of_basis = (gram + gram.T) / 2.0
        self.is_basis = is_basis

    @classmethod
    def full_space(cls, Q) -> "InnerProductSubspace":
        """
        All of R^n with the inner product <x, y> = y' Q x
        """
        Q = np.asarray(Q, dtype=float)
        return cls(np.eye(Q.shape[0]), Q)

    @classmethod
    def euclidean(cls, basis, is_basis: bool = True) -> "InnerProductSubspace":
        """
        The span of ``basis`` with the inner product inherited from R^n
        """
        basis = np.asarray(basis, dtype=float)
        if basis.ndim == 1:
            basis = basis[:, None]
        return cls(basis, basis.T @ basis, is_basis=is_basis)

    @property
    def n(self) -> int:
        return self.basis.shape[0]

    @property
    def r(self) -> int:
        return self.basis.shape[1]

    def __repr__(self):
        return "<InnerProductSubspace n={} r={}>".format(self.n, self.r)


def subspace_inner(kernel: SubspaceKernel, u, v) -> float:
    """
    The inner product induced by ``kernel`` on its range: <u, v> = v' K^+ u.

    For u = K a and v = K b this is b' K a.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    pinv = scipy.linalg.pinvh(kernel.K, rtol=PINV_RTOL)
    return float(v @ pinv @ u)


def kernel_from_orthonormal_basis(
    U, gram_of_basis=None, tol: float = ORTHONORMAL_TOL
) -> SubspaceKernel:
    """
    Return K = U U' for a basis U orthonormal under the declared inner
    product.

    :param gram_of_basis: inner products between the columns of U. When
                          omitted the euclidean inner product U'U is used.
    """
    U = np.asarray(U, dtype=float)
    if U.ndim == 1:
        U = U[:, None]
    gram = U.T @ U if gram_of_basis is None else np.atleast_2d(gram_of_basis)
    if gram.shape != (U.shape[1], U.shape[1]):
        raise DimensionMismatch("gram_of_basis does not match the basis")
    deviation = float(np.abs(gram - np.eye(U.shape[1])).max())
    if deviation > tol:
        raise NotOrthonormal(
            "basis deviates from orthonormality by {:.3g}".format(deviation)
        )
    return SubspaceKernel(U @ U.T)


def kernel_from_metric(Q) -> SubspaceKernel:
    """
    The kernel of R^n under <x, y> = y' Q x is Q^{-1}.
    """
    Q = np.asarray(Q, dtype=float)
    if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
        raise DimensionMismatch("the metric must be a square matrix")
    if not np.allclose(Q, Q.T, rtol=0, atol=1e-12 * max(1.0, abs(Q).max())):
        raise InvalidParameter("the metric must be symmetric")
    try:
        factor = scipy.linalg.cho_factor(Q)
    except scipy.linalg.LinAlgError:
        raise SingularMatrix("the metric is not positive definite")
    return SubspaceKernel(scipy.linalg.cho_solve(factor, np.eye(Q.shape[0])))


def kernel_from_spanning_set(space: InnerProductSubspace) -> SubspaceKernel:
    """
    Solve <v_j, k_i> = e_i' v_j for columns k_i in the span, giving
    K = B G^{-1} B'.

    Redundant spanning sets (``is_basis=False``) use the pseudo-inverse
    of G.
    """
    B, G = space.basis, space.gram_of_basis
    if space.is_basis:
        try:
            factor = scipy.linalg.cho_factor(G)
        except scipy.linalg.LinAlgError:
            raise SingularMatrix("the Gram matrix of the basis is singular")
        coeffs = scipy.linalg.cho_solve(factor, B.T)
    else:
        coeffs = scipy.linalg.pinvh(G, rtol=PINV_RTOL) @ B.T
    return SubspaceKernel(B @ coeffs)


def geometric_kernel_column(
    space: InnerProductSubspace, i: int, tol: float = 1e-12
) -> np.ndarray:
    """
    Column i of the kernel, built as c * z where z is the element of
    smallest norm in V with z_i = 1 and c = 1 / <z, z>.

    Returns the zero vector when no element of V has z_i = 1.
    """
    if not 0 <= i < space.n:
        raise InvalidParameter("index {} out of range".format(i))
    B, G = space.basis, space.gram_of_basis
    r = space.r
    b = B[i, :]
    if np.abs(b).max() <= tol * max(1.0, np.abs(B).max()):
        return np.zeros(space.n)

    # minimize c'Gc subject to b'c = 1
    kkt = np.zeros((r + 1, r + 1))
    kkt[:r, :r] = 2.0 * G
    kkt[:r, r] = b
    kkt[r, :r] = b
    rhs = np.zeros(r + 1)
    rhs[r] = 1.0
    if space.is_basis:
        solution = scipy.linalg.solve(kkt, rhs, assume_a="sym")
    else:
        solution = scipy.linalg.lstsq(kkt, rhs)[0]
    c = solution[:r]
    norm_sq = float(c @ G @ c)
    return (B @ c) / norm_sq


def line_kernel(theta: float) -> SubspaceKernel:
    """
    Kernel of the line through (cos theta, sin theta) in euclidean R^2
    """
    u = np.array([np.cos(theta), np.sin(theta)])
    return kernel_from_orthonormal_basis(u)


def kernel_projection(kernel: SubspaceKernel, p) -> np.ndarray:
    """
    sum_i p_i k_i, the orthogonal projection of p onto the subspace
    """
    return kernel.K @ np.asarray(p, dtype=float)


_Interpolant = namedtuple("_Interpolant", "coeffs centers norm_sq kernel")


class Interpolant(_Interpolant):
    """
    f = sum_j coeffs[j] K(., centers[j]).

    ``centers`` holds column indices for a :class:`SubspaceKernel` and an
    ``(m, d)`` array of points for a :class:`KernelSpec`.
    """

    __slots__ = ()

    @property
    def vector(self) -> np.ndarray:
        if not isinstance(self.kernel, SubspaceKernel):
            raise TypeError("vector is only defined for subspace kernels")
        return self.kernel.K[:, self.centers] @ self.coeffs

    def evaluate(self, z) -> np.ndarray:
        if isinstance(self.kernel, SubspaceKernel):
            return self.vector[z]
        return cross_gram(self.kernel, z, self.centers) @ self.coeffs


def _solve_psd(A: np.ndarray, c: np.ndarray) -> np.ndarray:
    """
    Minimum norm solution of A x = c for symmetric PSD A, raising
    InfeasibleConstraints when c is outside the range of A.
    """
    values, vectors = scipy.linalg.eigh(A)
    top = values[-1] if values.size else 0.0
    cutoff = PINV_RTOL * max(top, 0.0)
    keep = values > cutoff
    if keep.all() and top > 0:
        return solve_pos(A, c, "constraint matrix")
    logger.debug(
        "constraint matrix is singular (%d of %d eigenvalues kept)",
        keep.sum(),
        len(values),
    )
    projected = vectors[:, keep].T @ c
    x = vectors[:, keep] @ (projected / values[keep])
    residual = float(np.linalg.norm(A @ x - c))
    if residual > 1e-8 * max(1.0, float(np.linalg.norm(c))):
        raise InfeasibleConstraints(
            "constraints are inconsistent (residual {:.3g})".format(residual)
        )
    return x


def min_norm_interpolate(
    kernel: Union[SubspaceKernel, KernelSpec],
    constraints: Iterable[Tuple[object, float]],
) -> Interpolant:
    """
    Find the element of smallest norm with f(x_j) = c_j for every
    constraint ``(x_j, c_j)``.

    With a :class:`SubspaceKernel` each x_j is a coordinate index; with a
    :class:`KernelSpec` it is a point.
    """
    constraints = list(constraints)
    if not constraints:
        raise InvalidParameter("at least one constraint is required")
    where = [w for w, _ in constraints]
    values = np.array([v for _, v in constraints], dtype=float)

    if isinstance(kernel, SubspaceKernel):
        centers = np.array([int(w) for w in where])
        if len(set(centers.tolist())) != len(centers):
            raise InvalidParameter("constraint indices must be distinct")
        A = kernel.K[np.ix_(centers, centers)]
    else:
        centers = as_points(kernel, where)
        if len(np.unique(centers, axis=0)) != len(centers):
            raise InvalidParameter("constraint points must be distinct")
        A = gram_matrix(kernel, centers)

    coeffs = _solve_psd(A, values)
    return Interpolant(coeffs, centers, float(coeffs @ A @ coeffs), kernel)


def _gram_is_invertible(M: np.ndarray) -> bool:
    values = np.linalg.eigvalsh(M)
    return values.size > 0 and values[0] > PINV_RTOL * max(values[-1], 0.0)


def _as_system(A, b) -> Tuple[np.ndarray, np.ndarray]:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    if b.shape != (A.shape[0],):
        raise DimensionMismatch(
            "right hand side has shape {}, expected ({},)".format(
                b.shape, A.shape[0]
            )
        )
    return A, b


def min_norm_linear_solve(A, b) -> np.ndarray:
    """
    The solution of A x = b with the smallest euclidean norm,
    x = A'(AA')^{-1} b.

    Falls back to the pseudo-inverse when AA' is singular; an inconsistent
    system then gives the least squares solution and logs its residual.
    """
    A, b = _as_system(A, b)
    M = A @ A.T
    if _gram_is_invertible(M):
        return A.T @ solve_pos(M, b, "row Gram matrix AA'")

    x = scipy.linalg.pinv(A) @ b
    residual = float(np.linalg.norm(A @ x - b))
    if residual > 1e-8 * max(1.0, float(np.linalg.norm(b))):
        logger.warning(
            "System is inconsistent, returning least squares solution "
            "(residual %.3g)",
            residual,
        )
    return x


def solve_via_frame(A, b) -> np.ndarray:
    """
    Solve A x = b through the kernel K = AA' of the row space.

    The component x_s is the K-inner product of b with column s of A,
    <b, c_s>_K = c_s' K^{-1} b.
    """
    A, b = _as_system(A, b)
    K = A @ A.T
    if not _gram_is_invertible(K):
        raise SingularMatrix("AA' is singular")
    factor = scipy.linalg.cho_factor(K)

    def inner(u, w):
        return float(w @ scipy.linalg.cho_solve(factor, u))

    return np.array([inner(b, A[:, s]) for s in range(A.shape[1])])


MercerPair = namedtuple("MercerPair", "value vector")


def mercer_grid(grid_size: int) -> np.ndarray:
    return np.arange(1, grid_size + 1) / grid_size


def mercer_min_kernel(grid_size: int, num_eigs: int) -> List[MercerPair]:
    """
    Leading eigenpairs of min(t, s) on [0, 1], discretized on the grid
    {i / G} with uniform weights 1 / G.

    Eigenvectors are scaled so that (1/G) sum psi(t_i)^2 = 1 and signed
    to be positive at the first grid point.
    """
    if num_eigs < 1:
        raise InvalidParameter("num_eigs must be at least 1")
    if grid_size < 8 * num_eigs:
        raise InvalidParameter(
            "grid_size must be at least 8 * num_eigs = {}".format(8 * num_eigs)
        )
    t = mercer_grid(grid_size)
    R = np.minimum(t[:, None], t[None, :]) / grid_size
    values, vectors = scipy.linalg.eigh(
        R, subset_by_index=[grid_size - num_eigs, grid_size - 1]
    )
    pairs = []
    for j in reversed(range(num_eigs)):
        v = vectors[:, j] * np.sqrt(grid_size)
        if v[0] < 0:
            v = -v
        pairs.append(MercerPair(float(values[j]), v))
    return pairs


def analytic_min_kernel_eigenpair(
    k: int, t: Optional[np.ndarray] = None
) -> Tuple[float, Optional[np.ndarray]]:
    """
    Exact k-th eigenvalue 1 / ((k - 1/2) pi)^2 of the min kernel on [0, 1]
    and, when ``t`` is given, the eigenfunction sqrt(2) sin((k - 1/2) pi t).
    """
    freq = (k - 0.5) * np.pi
    value = 1.0 / freq ** 2
    if t is None:
        return value, None
    return value, np.sqrt(2.0) * np.sin(freq * np.asarray(t, dtype=float))
