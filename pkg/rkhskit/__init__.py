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
__all__ = [
    "CondTestConfig",
    "ExperimentConfig",
    "HsicDictionary",
    "KbrModel",
    "KbrState",
    "KernelSpec",
    "KlmsState",
    "KrlsState",
    "MeanEmbedding",
    "SubspaceKernel",
    "adaptive_predict",
    "cond_hs_norm",
    "cov_bilinear",
    "decode_state",
    "deflection_detector",
    "eval_kernel",
    "extended_cond_measure",
    "gram_matrix",
    "hsic_batch",
    "independence_perm_test",
    "kbr_filter_init",
    "kbr_filter_step",
    "kbr_posterior",
    "kernel_from_metric",
    "kernel_from_orthonormal_basis",
    "kernel_from_spanning_set",
    "klms_step",
    "krls_step",
    "markov_cond_test",
    "max_correlation",
    "mean_embed",
    "mercer_min_kernel",
    "min_norm_interpolate",
    "min_norm_linear_solve",
    "mmd_sq",
    "preimage",
    "rkhs_distance_sq",
    "run_experiment",
    "sparse_hsic_update",
]

from rkhskit.adaptive import KlmsState
from rkhskit.adaptive import KrlsState
from rkhskit.adaptive import adaptive_predict
from rkhskit.adaptive import klms_step
from rkhskit.adaptive import krls_step
from rkhskit.conditional import CondTestConfig
from rkhskit.conditional import cond_hs_norm
from rkhskit.conditional import extended_cond_measure
from rkhskit.conditional import markov_cond_test
from rkhskit.embeddings import MeanEmbedding
from rkhskit.embeddings import cov_bilinear
from rkhskit.embeddings import deflection_detector
from rkhskit.embeddings import mean_embed
from rkhskit.embeddings import mmd_sq
from rkhskit.experiments import ExperimentConfig
from rkhskit.experiments import run_experiment
from rkhskit.finite_rkhs import SubspaceKernel
from rkhskit.finite_rkhs import kernel_from_metric
from rkhskit.finite_rkhs import kernel_from_orthonormal_basis
from rkhskit.finite_rkhs import kernel_from_spanning_set
from rkhskit.finite_rkhs import mercer_min_kernel
from rkhskit.finite_rkhs import min_norm_interpolate
from rkhskit.finite_rkhs import min_norm_linear_solve
from rkhskit.independence import HsicDictionary
from rkhskit.independence import hsic_batch
from rkhskit.independence import independence_perm_test
from rkhskit.independence import max_correlation
from rkhskit.independence import sparse_hsic_update
from rkhskit.kbr import KbrModel
from rkhskit.kbr import KbrState
from rkhskit.kbr import decode_state
from rkhskit.kbr import kbr_filter_init
from rkhskit.kbr import kbr_filter_step
from rkhskit.kbr import kbr_posterior
from rkhskit.kbr import preimage
from rkhskit.kernels import KernelSpec
from rkhskit.kernels import eval_kernel
from rkhskit.kernels import gram_matrix
from rkhskit.kernels import rkhs_distance_sq

__version__ = "1.0.0.dev0"
