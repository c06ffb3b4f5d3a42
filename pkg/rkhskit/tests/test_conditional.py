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

import collections

import numpy as np
import pytest

from rkhskit import conditional
from rkhskit.conditional import CondTestConfig
from rkhskit.exceptions import DimensionMismatch
from rkhskit.exceptions import InvalidParameter
from rkhskit.generators import gen_markov_triple
from rkhskit.independence import hsic_batch
from rkhskit.kernels import KernelSpec
from rkhskit.kernels import gram_matrix
from rkhskit.tests import experiment_rows

SPEC = KernelSpec.gaussian(1.0)
SPECS = (SPEC, SPEC, SPEC)


class TestCondTestConfig:
    def test_defaults(self):
        config = CondTestConfig()
        assert config.num_domains == 8
        assert config.num_perms == 100
        assert config.level == 0.05
        assert config.use_normalized

    @pytest.mark.parametrize(
        "options",
        [
            {"reg_lambda": 0},
            {"num_domains": 0},
            {"num_perms": 0},
            {"level": 0},
            {"level": 1.5},
        ],
    )
    def test_out_of_range(self, options):
        with pytest.raises(InvalidParameter):
            CondTestConfig(**options)

    def test_domain_size(self):
        CondTestConfig(num_domains=8).validate(32)
        with pytest.raises(InvalidParameter):
            CondTestConfig(num_domains=8).validate(31)


class TestCondHsNorm:
    def test_constant_conditioning_reduces_to_hsic(self, rng):
        x = rng.standard_normal(20)
        y = np.tanh(x) + rng.standard_normal(20)
        gx, gy = gram_matrix(SPEC, x), gram_matrix(SPEC, y)
        gz = np.ones((20, 20))
        value = conditional.cond_hs_norm(gx, gy, gz, 1e-3, normalized=False)
        assert value == pytest.approx(hsic_batch(gx, gy))

    def test_symmetric_in_x_and_y(self, rng):
        x, y, z = rng.standard_normal((3, 15))
        gx, gy, gz = (gram_matrix(SPEC, s) for s in (x, y, z))
        for normalized in (True, False):
            assert conditional.cond_hs_norm(
                gx, gy, gz, 1e-2, normalized
            ) == pytest.approx(conditional.cond_hs_norm(gy, gx, gz, 1e-2, normalized))

    def test_conditioning_removes_explained_dependence(self, rng):
        z = rng.standard_normal(60)
        x = z + 0.05 * rng.standard_normal(60)
        y = z + 0.05 * rng.standard_normal(60)
        gx, gy, gz = (gram_matrix(SPEC, s) for s in (x, y, z))
        given_z = conditional.cond_hs_norm(gx, gy, gz, 1e-3)
        given_nothing = conditional.cond_hs_norm(gx, gy, np.ones((60, 60)), 1e-3)
        assert given_z < given_nothing

    def test_regularization_must_be_positive(self):
        with pytest.raises(InvalidParameter):
            conditional.cond_hs_norm(np.eye(4), np.eye(4), np.eye(4), 0.0)

    def test_gram_shapes(self):
        with pytest.raises(DimensionMismatch):
            conditional.cond_hs_norm(np.eye(4), np.eye(4), np.eye(5), 1e-3)

    def test_extended_measure_uses_product_gram(self, rng):
        x, y, z = rng.standard_normal((3, 12))
        gx, gy, gz = (gram_matrix(SPEC, s) for s in (x, y, z))
        assert conditional.extended_cond_measure(
            x, y, z, SPEC, SPEC, SPEC
        ) == pytest.approx(conditional.cond_hs_norm(gx * gz, gy, gz, 1e-3))

    def test_sample_lengths(self):
        with pytest.raises(DimensionMismatch):
            conditional.extended_cond_measure(
                [1.0, 2.0], [1.0, 2.0], [1.0], SPEC, SPEC, SPEC
            )


class TestDomains:
    def test_partition_by_sorted_z(self, rng):
        z = rng.standard_normal(50)
        domains = conditional.conditioning_domains(z, SPEC, 8)
        assert len(domains) == 8
        assert sorted(np.concatenate(domains).tolist()) == list(range(50))
        assert {len(d) for d in domains} <= {6, 7}
        for lower, upper in zip(domains, domains[1:]):
            assert z[lower].max() <= z[upper].min()

    def test_vector_conditioning_uses_principal_direction(self):
        t = np.linspace(-1, 1, 16)
        z = np.column_stack([t, 2 * t])
        domains = conditional.conditioning_domains(z, KernelSpec.gaussian(1.0, 2), 4)
        order = np.concatenate(domains).tolist()
        assert order in (list(range(16)), list(range(15, -1, -1)))

    def test_permutation_stays_in_domain(self, rng):
        domains = conditional.conditioning_domains(rng.standard_normal(40), SPEC, 5)
        perm = conditional.permute_within_domains(domains, rng)
        assert sorted(perm.tolist()) == list(range(40))
        for domain in domains:
            assert set(perm[domain].tolist()) == set(domain.tolist())


class TestMarkovTest:
    def test_detects_a_broken_chain(self, serial):
        x, y, z = gen_markov_triple(200, 1.0, seed=4)
        # Y and Z stay dependent given X
        result = conditional.markov_cond_test(y, z, x, SPECS)
        assert result.reject

    def test_threshold_matches_standalone_computation(self, rng):
        x, y, z = gen_markov_triple(64, 0.5, seed=1)
        config = CondTestConfig(num_perms=30)
        result = conditional.markov_cond_test(x, z, y, SPECS, config, rng_seed=2)
        threshold = conditional.cond_perm_threshold(x, z, y, SPECS, config, rng_seed=2)
        assert result.threshold == threshold
        assert result.statistic == pytest.approx(
            conditional.extended_cond_measure(x, z, y, *SPECS, config=config)
        )

    def test_too_many_domains(self):
        x, y, z = gen_markov_triple(20, 0.5, seed=0)
        with pytest.raises(InvalidParameter):
            conditional.markov_cond_test(x, y, z, SPECS)


@pytest.mark.slow
class TestMarkovExperiment:
    def test_correct_chains_are_kept(self):
        kept = collections.Counter()
        for seed in range(10):
            for row in experiment_rows("markov-test", seed=seed):
                if not row["reject"]:
                    kept[row["hypothesis"], row["coupling"]] += 1
        for coupling in (0.2, 0.5, 1.0):
            assert kept["X-Y-Z", coupling] >= 8
        assert kept["X-Z-Y", 0.0] >= 8
