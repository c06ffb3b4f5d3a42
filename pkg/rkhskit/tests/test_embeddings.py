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

from scipy import integrate
import numpy as np
import pytest

from rkhskit import embeddings
from rkhskit.embeddings import CovOperatorRep
from rkhskit.embeddings import MeanEmbedding
from rkhskit.exceptions import DimensionMismatch
from rkhskit.exceptions import SingularMatrix
from rkhskit.kernels import KernelSpec
from rkhskit.kernels import eval_kernel
from rkhskit.kernels import gram_matrix
from rkhskit.kernels import rkhs_distance_sq
from rkhskit.tests import random_spd


class TestMeanEmbedding:
    def test_single_sample_evaluates_to_its_atom(self):
        spec = KernelSpec.gaussian(0.7)
        m = embeddings.mean_embed(spec, [0.3])
        assert m.evaluate([1.1])[0] == pytest.approx(eval_kernel(spec, 1.1, 0.3))

    def test_inner_with_coefficients(self, rng):
        spec = KernelSpec.gaussian(1.0, 2)
        x = rng.standard_normal((6, 2))
        beta = rng.standard_normal(6)
        m = embeddings.mean_embed(spec, x)
        expected = np.ones(6) @ gram_matrix(spec, x) @ beta / 6
        assert m.inner_with_coeffs(beta) == pytest.approx(expected)

    def test_arrays_are_read_only(self):
        m = embeddings.mean_embed(KernelSpec.gaussian(), [0.0, 1.0])
        with pytest.raises(ValueError):
            m.coeffs[0] = 2.0

    def test_coefficient_count_must_match(self):
        with pytest.raises(DimensionMismatch):
            MeanEmbedding(KernelSpec.gaussian(), [0.0, 1.0], [1.0])

    def test_distance_matches_mmd(self, rng):
        spec = KernelSpec.gaussian(0.5)
        p = rng.standard_normal(20)
        q = rng.standard_normal(15) + 0.5
        distance = embeddings.embedding_distance_sq(
            embeddings.mean_embed(spec, p), embeddings.mean_embed(spec, q)
        )
        assert distance == pytest.approx(embeddings.mmd_sq(spec, p, q))

    def test_exact_error_for_a_single_sample(self):
        sigma2 = 0.8
        x0 = 0.4

        def density(z):
            return np.exp(-(z ** 2) / 2) / np.sqrt(2 * np.pi)

        def mean_element(z):
            return integrate.quad(
                lambda x: np.exp(-((z - x) ** 2) / (2 * sigma2)) * density(x),
                -np.inf,
                np.inf,
            )[0]

        norm_sq = integrate.quad(
            lambda z: mean_element(z) * density(z), -12, 12, limit=200
        )[0]
        expected = 1.0 - 2.0 * mean_element(x0) + norm_sq
        value = embeddings.gaussian_normal_embedding_error([x0], sigma2)
        assert value == pytest.approx(expected, rel=1e-6)

    def test_error_decays_like_one_over_n(self, rng):
        sigma2 = 1.0
        norm_sq = np.sqrt(sigma2 / (sigma2 + 2))
        for n in (20, 200):
            errors = [
                embeddings.gaussian_normal_embedding_error(
                    rng.standard_normal(n), sigma2
                )
                for _ in range(400)
            ]
            assert np.mean(errors) == pytest.approx((1 - norm_sq) / n, rel=0.15)


class TestCovariance:
    def test_zero_coefficients(self, rng):
        rep = CovOperatorRep(random_spd(rng, 5))
        assert embeddings.cov_bilinear(rep, np.ones(5), np.zeros(5)) == 0.0

    def test_matches_sample_covariance(self, rng):
        x = rng.standard_normal(30)
        spec = KernelSpec.linear()
        gram = gram_matrix(spec, x)
        alpha = rng.standard_normal(30)
        beta = rng.standard_normal(30)
        f = gram @ alpha
        g = gram @ beta
        expected = np.mean((f - f.mean()) * (g - g.mean()))
        rep = CovOperatorRep(gram)
        assert embeddings.cov_bilinear(rep, alpha, beta) == pytest.approx(expected)

    def test_constant_samples_vanish(self, rng):
        gram = gram_matrix(KernelSpec.gaussian(), np.full(6, 2.0))
        rep = CovOperatorRep(gram)
        value = embeddings.cov_bilinear(rep, rng.standard_normal(6), np.ones(6))
        assert value == pytest.approx(0.0, abs=1e-12)

    def test_uncentered_second_moment(self, rng):
        gram = random_spd(rng, 4)
        alpha, beta = rng.standard_normal((2, 4))
        rep = CovOperatorRep(gram, centered=False)
        expected = (gram @ alpha) @ (gram @ beta) / 4
        assert embeddings.cov_bilinear(rep, alpha, beta) == pytest.approx(expected)

    def test_reg_inverse_examples(self, rng):
        beta = rng.standard_normal(3)
        np.testing.assert_allclose(
            embeddings.apply_reg_inverse(np.zeros((3, 3)), 0.5, beta), beta / 0.5
        )
        np.testing.assert_allclose(
            embeddings.apply_reg_inverse([[1.0]], 0.25, [2.0]), [2.0 / 1.25]
        )

    def test_reg_inverse_residual(self, rng):
        K = random_spd(rng, 6)
        beta = rng.standard_normal(6)
        alpha = embeddings.apply_reg_inverse(K, 0.1, beta)
        np.testing.assert_allclose((K / 6 + 0.1 * np.eye(6)) @ alpha, beta, atol=1e-8)


class TestMmd:
    def test_identical_samples(self, rng):
        x = rng.standard_normal(10)
        assert embeddings.mmd_sq(KernelSpec.gaussian(), x, x) == pytest.approx(
            0.0, abs=1e-12
        )

    def test_two_points(self):
        spec = KernelSpec.gaussian(1.0)
        assert embeddings.mmd_sq(spec, [0.2], [1.5]) == pytest.approx(
            rkhs_distance_sq(spec, 0.2, 1.5)
        )

    def test_detects_a_shift(self, rng, serial):
        spec = KernelSpec.gaussian(1.0)
        p = rng.standard_normal(500)
        q = rng.standard_normal(500) + 1.0
        result = embeddings.mmd_perm_test(spec, p, q, num_perms=100, level=0.01)
        assert result.reject
        assert result.statistic > result.threshold > 0

    def test_identical_samples_are_not_rejected(self, rng):
        spec = KernelSpec.gaussian(1.0)
        p = rng.standard_normal(200)
        result = embeddings.mmd_perm_test(spec, p, rng.permutation(p))
        assert result.statistic == pytest.approx(0.0, abs=1e-12)
        assert not result.reject

    def test_threads_do_not_change_the_result(self, rng, monkeypatch):
        spec = KernelSpec.gaussian(1.0)
        p = rng.standard_normal(60)
        q = rng.standard_normal(60) + 0.3
        monkeypatch.setenv("RKHS_KIT_THREADS", "1")
        serial = embeddings.mmd_perm_test(spec, p, q, rng_seed=5)
        monkeypatch.setenv("RKHS_KIT_THREADS", "4")
        threaded = embeddings.mmd_perm_test(spec, p, q, rng_seed=5)
        assert serial == threaded


class TestDeflection:
    def test_identity_covariance_gives_matched_filter(self):
        mu0 = np.array([0.0, 1.0])
        mu1 = np.array([2.0, -1.0])
        detector = embeddings.deflection_detector(mu0, mu1, np.eye(2))
        np.testing.assert_allclose(detector.coeffs, mu1 - mu0)
        assert detector.d_max == pytest.approx(8.0)

    def test_equal_means(self):
        mu = np.array([1.0, 2.0])
        detector = embeddings.deflection_detector(mu, mu, np.eye(2))
        np.testing.assert_array_equal(detector.coeffs, [0.0, 0.0])
        assert detector.d_max == 0.0

    def test_dominates_random_directions(self, rng):
        mu0, mu1 = rng.standard_normal((2, 2))
        sigma0 = random_spd(rng, 2)
        detector = embeddings.deflection_detector(mu0, mu1, sigma0)
        diff = mu1 - mu0
        assert detector.d_max == pytest.approx(
            diff @ np.linalg.solve(sigma0, diff), abs=1e-10
        )
        assert embeddings.deflection(
            mu0, mu1, sigma0, detector.coeffs
        ) == pytest.approx(detector.d_max)
        for direction in rng.standard_normal((10 ** 4, 2)):
            direction /= np.linalg.norm(direction)
            value = embeddings.deflection(mu0, mu1, sigma0, direction)
            assert value <= detector.d_max * (1 + 1e-12)

    def test_singular_covariance_needs_regularization(self):
        sigma0 = np.diag([1.0, 0.0])
        with pytest.raises(SingularMatrix):
            embeddings.deflection_detector([0, 0], [1, 1], sigma0)
        detector = embeddings.deflection_detector([0, 0], [1, 1], sigma0, 0.5)
        np.testing.assert_allclose(detector.coeffs, [1 / 1.5, 1 / 0.5])

    def test_empirical_linear_kernel_matches_sample_covariance(self, rng):
        h0 = rng.standard_normal((40, 2))
        h1 = rng.standard_normal((30, 2)) + [1.0, -0.5]
        reg = 0.1
        detector = embeddings.empirical_deflection_detector(
            KernelSpec.linear(2), h0, h1, reg
        )
        diff = h1.mean(axis=0) - h0.mean(axis=0)
        centered = h0 - h0.mean(axis=0)
        cov = centered.T @ centered / len(h0)
        expected = diff @ np.linalg.solve(cov + reg * np.eye(2), diff)
        assert detector.d_max == pytest.approx(expected, rel=1e-6)

    def test_empirical_detector_separates_hypotheses(self, rng):
        spec = KernelSpec.gaussian(1.0)
        h0 = rng.standard_normal(100)
        h1 = rng.standard_normal(100) * 0.3
        detector = embeddings.empirical_deflection_detector(spec, h0, h1, 1e-3)
        assert detector.d_max > 0
        assert detector.evaluate(h1).mean() > detector.evaluate(h0).mean()

    def test_empirical_rank_deficiency(self, rng):
        h0 = rng.standard_normal((10, 2))
        h1 = rng.standard_normal((10, 2))
        with pytest.raises(SingularMatrix):
            embeddings.empirical_deflection_detector(KernelSpec.linear(2), h0, h1, 0.0)
