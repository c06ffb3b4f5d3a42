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

import numpy as np
import pytest

from rkhskit import finite_rkhs
from rkhskit.exceptions import InfeasibleConstraints
from rkhskit.exceptions import NotOrthonormal
from rkhskit.exceptions import SingularMatrix
from rkhskit.finite_rkhs import InnerProductSubspace
from rkhskit.finite_rkhs import SubspaceKernel
from rkhskit.kernels import KernelSpec
from rkhskit.tests import random_orthonormal
from rkhskit.tests import random_spd


def random_subspace(rng):
    """
    A random subspace of R^n, n <= 6, with a random inner product, together
    with a basis orthonormal under that inner product
    """
    n = int(rng.integers(1, 7))
    r = int(rng.integers(1, n + 1))
    basis = rng.standard_normal((n, r))
    gram = random_spd(rng, r)
    # B L^{-T} is orthonormal when <B a, B b> = b' G a and G = L L'
    lower = np.linalg.cholesky(gram)
    orthonormal = np.linalg.solve(lower, basis.T).T
    return InnerProductSubspace(basis, gram), orthonormal


class TestKernelConstructions:
    def test_orthonormal_examples(self):
        K = finite_rkhs.kernel_from_orthonormal_basis([[1.0], [1.0]], [[1.0]]).K
        np.testing.assert_array_equal(K, [[1, 1], [1, 1]])
        K = finite_rkhs.kernel_from_orthonormal_basis(np.eye(3)).K
        np.testing.assert_array_equal(K, np.eye(3))
        K = finite_rkhs.kernel_from_orthonormal_basis([1.0, 0.0]).K
        np.testing.assert_array_equal(K, np.diag([1.0, 0.0]))

    def test_rejects_non_orthonormal_basis(self):
        with pytest.raises(NotOrthonormal):
            finite_rkhs.kernel_from_orthonormal_basis([[1.0], [1.0]])

    def test_metric_examples(self):
        K = finite_rkhs.kernel_from_metric(np.eye(2)).K
        np.testing.assert_allclose(K, np.eye(2))
        K = finite_rkhs.kernel_from_metric(np.diag([1.0, 16.0])).K
        np.testing.assert_allclose(K, np.diag([1.0, 1.0 / 16]))

    def test_metric_inverse(self, rng):
        Q = random_spd(rng, 3)
        K = finite_rkhs.kernel_from_metric(Q).K
        np.testing.assert_allclose(K @ Q, np.eye(3), atol=1e-8)

    def test_metric_must_be_positive_definite(self):
        with pytest.raises(SingularMatrix):
            finite_rkhs.kernel_from_metric(np.diag([1.0, 0.0]))

    def test_spanning_set_examples(self, rng):
        Q = random_spd(rng, 3)
        np.testing.assert_allclose(
            finite_rkhs.kernel_from_spanning_set(InnerProductSubspace.full_space(Q)).K,
            finite_rkhs.kernel_from_metric(Q).K,
            atol=1e-8,
        )
        line = InnerProductSubspace([1.0, 1.0], [[1.0]])
        np.testing.assert_allclose(
            finite_rkhs.kernel_from_spanning_set(line).K, [[1, 1], [1, 1]]
        )

    def test_redundant_spanning_set(self, rng):
        U = random_orthonormal(rng, 4, 2)
        redundant = np.hstack([U, U @ rng.standard_normal((2, 1))])
        space = InnerProductSubspace.euclidean(redundant, is_basis=False)
        np.testing.assert_allclose(
            finite_rkhs.kernel_from_spanning_set(space).K, U @ U.T, atol=1e-8
        )

    def test_constructions_agree(self, rng):
        for _ in range(100):
            space, orthonormal = random_subspace(rng)
            from_basis = finite_rkhs.kernel_from_orthonormal_basis(
                orthonormal,
                gram_of_basis=np.eye(orthonormal.shape[1]),
            ).K
            from_span = finite_rkhs.kernel_from_spanning_set(space).K
            np.testing.assert_allclose(from_span, from_basis, atol=1e-8)
            geometric = np.column_stack(
                [finite_rkhs.geometric_kernel_column(space, i) for i in range(space.n)]
            )
            np.testing.assert_allclose(geometric, from_span, atol=1e-8)

    def test_geometric_column_outside_support(self):
        space = InnerProductSubspace.euclidean([1.0, 0.0])
        np.testing.assert_array_equal(
            finite_rkhs.geometric_kernel_column(space, 1), [0.0, 0.0]
        )
        full = InnerProductSubspace.full_space(np.eye(2))
        np.testing.assert_allclose(
            finite_rkhs.geometric_kernel_column(full, 0), [1.0, 0.0]
        )

    def test_reproducing_property(self, rng):
        space, _ = random_subspace(rng)
        kernel = finite_rkhs.kernel_from_spanning_set(space)
        v = kernel.K @ rng.standard_normal(space.n)
        for i in range(space.n):
            assert finite_rkhs.subspace_inner(kernel, v, kernel.column(i)) == (
                pytest.approx(v[i], abs=1e-8)
            )

    def test_line_kernel_projects(self):
        kernel = finite_rkhs.line_kernel(np.pi / 4)
        np.testing.assert_allclose(kernel.K, [[0.5, 0.5], [0.5, 0.5]], atol=1e-15)
        np.testing.assert_allclose(
            finite_rkhs.kernel_projection(kernel, [1.0, 0.0]), [0.5, 0.5]
        )
        assert kernel.rank == 1


class TestInterpolation:
    def test_single_constraint(self, rng):
        kernel = SubspaceKernel(random_spd(rng, 4))
        result = finite_rkhs.min_norm_interpolate(kernel, [(2, 1.0)])
        K = kernel.K
        np.testing.assert_allclose(result.vector, K[:, 2] / K[2, 2])
        assert result.norm_sq == pytest.approx(1.0 / K[2, 2])
        assert result.evaluate(2) == pytest.approx(1.0)

    def test_identity_kernel(self):
        result = finite_rkhs.min_norm_interpolate(SubspaceKernel(np.eye(3)), [(0, 2.5)])
        np.testing.assert_allclose(result.vector, [2.5, 0, 0])

    def test_min_kernel_energy(self):
        t = [0.25, 0.5, 1.0]
        result = finite_rkhs.min_norm_interpolate(KernelSpec.min(), zip(t, t))
        assert result.norm_sq == pytest.approx(1.0, abs=1e-10)
        # piecewise linear between the knots
        assert result.evaluate([0.75])[0] == pytest.approx(0.75)

    def test_inconsistent_constraints(self):
        kernel = finite_rkhs.line_kernel(0.0)
        with pytest.raises(InfeasibleConstraints):
            finite_rkhs.min_norm_interpolate(kernel, [(1, 1.0)])

    def test_rank_deficient_but_consistent(self):
        kernel = finite_rkhs.line_kernel(np.pi / 4)
        result = finite_rkhs.min_norm_interpolate(kernel, [(0, 1.0), (1, 1.0)])
        np.testing.assert_allclose(result.vector, [1.0, 1.0], atol=1e-10)


class TestLinearSolve:
    def test_identity(self):
        b = np.array([1.0, -2.0, 3.0])
        np.testing.assert_allclose(finite_rkhs.min_norm_linear_solve(np.eye(3), b), b)
        np.testing.assert_allclose(finite_rkhs.solve_via_frame(np.eye(3), b), b)

    def test_equal_split(self):
        x = finite_rkhs.min_norm_linear_solve([[1.0, 1.0]], [2.0])
        np.testing.assert_allclose(x, [1.0, 1.0])

    def test_matches_pseudo_inverse(self, rng):
        for _ in range(100):
            r = int(rng.integers(1, 9))
            n = int(rng.integers(r, 17))
            A = rng.standard_normal((r, n))
            b = rng.standard_normal(r)
            expected = np.linalg.pinv(A) @ b
            np.testing.assert_allclose(
                finite_rkhs.min_norm_linear_solve(A, b), expected, atol=1e-8
            )
            np.testing.assert_allclose(
                finite_rkhs.solve_via_frame(A, b), expected, atol=1e-8
            )

    def test_frame_closed_form(self, rng):
        A = rng.standard_normal((2, 4))
        b = rng.standard_normal(2)
        closed_form = A.T @ np.linalg.solve(A @ A.T, b)
        np.testing.assert_allclose(finite_rkhs.solve_via_frame(A, b), closed_form)

    def test_frame_needs_full_row_rank(self):
        with pytest.raises(SingularMatrix):
            finite_rkhs.solve_via_frame([[1.0, 1.0], [2.0, 2.0]], [1.0, 2.0])

    def test_inconsistent_system_logs_residual(self, caplog):
        x = finite_rkhs.min_norm_linear_solve([[1.0, 1.0], [1.0, 1.0]], [1.0, 3.0])
        np.testing.assert_allclose(x, [1.0, 1.0])
        assert "inconsistent" in caplog.text


class TestMercer:
    def test_eigenvalues(self):
        pairs = finite_rkhs.mercer_min_kernel(1000, 5)
        assert pairs[0].value == pytest.approx(4 / np.pi ** 2, abs=0.002)
        assert pairs[2].value == pytest.approx(1 / (2.5 * np.pi) ** 2, abs=0.0005)
        for k, pair in enumerate(pairs, 1):
            exact, _ = finite_rkhs.analytic_min_kernel_eigenpair(k)
            assert abs(pair.value - exact) / exact < 0.02

    def test_first_eigenvector(self):
        t = finite_rkhs.mercer_grid(1000)
        pair = finite_rkhs.mercer_min_kernel(1000, 1)[0]
        _, psi = finite_rkhs.analytic_min_kernel_eigenpair(1, t)
        cosine = pair.vector @ psi / (np.linalg.norm(pair.vector) * np.linalg.norm(psi))
        assert cosine > 0.999

    def test_grid_must_resolve_eigenvectors(self):
        with pytest.raises(ValueError):
            finite_rkhs.mercer_min_kernel(30, 4)
