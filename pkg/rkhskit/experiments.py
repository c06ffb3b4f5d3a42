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
The experiment catalogue: each experiment turns an
:class:`ExperimentConfig` into CSV rows and a one line summary.
"""
from collections import OrderedDict
from collections import namedtuple
from logging import getLogger
from typing import Callable
from typing import Dict
from typing import List
from typing import Tuple
import math

import numpy as np

from rkhskit.adaptive import KlmsState
from rkhskit.adaptive import KrlsState
from rkhskit.adaptive import klms_step
from rkhskit.adaptive import krls_step
from rkhskit.conditional import CondTestConfig
from rkhskit.conditional import markov_cond_test
from rkhskit.embeddings import deflection_detector
from rkhskit.embeddings import gaussian_normal_embedding_error
from rkhskit.exceptions import InvalidParameter
from rkhskit.exceptions import PreimageDiverged
from rkhskit.finite_rkhs import analytic_min_kernel_eigenpair
from rkhskit.finite_rkhs import mercer_grid
from rkhskit.finite_rkhs import mercer_min_kernel
from rkhskit.generators import ar_regression_pairs
from rkhskit.generators import ar_state_pairs
from rkhskit.generators import gen_linear_gaussian_ssm
from rkhskit.generators import gen_markov_triple
from rkhskit.generators import gen_nl_ar
from rkhskit.generators import gen_rotation_pair
from rkhskit.generators import kalman_filter
from rkhskit.independence import independence_perm_test
from rkhskit.independence import sparse_hsic
from rkhskit.kbr import KbrModel
from rkhskit.kbr import KbrState
from rkhskit.kbr import decode_state
from rkhskit.kbr import kbr_filter_init
from rkhskit.kbr import kbr_filter_step
from rkhskit.kernels import KernelSpec
from rkhskit.utils import make_rng
from rkhskit.utils import parallel_map
from rkhskit.utils import plural
from rkhskit.utils import seed_sequence
from rkhskit.utils import write_csv

logger = getLogger("rkhskit.experiments")

HSIC_ROTATION = "hsic-rotation"
MARKOV_TEST = "markov-test"
KBR_PREDICT = "kbr-predict"
KRLS_PREDICT = "krls-predict"
KLMS_PREDICT = "klms-predict"
MERCER_CHECK = "mercer-check"
DEFLECTION_DEMO = "deflection-demo"
EMBEDDING_RATE = "embedding-rate"
KBR_KALMAN = "kbr-kalman"

MIN_SAMPLES = 8

MU_SWEEP = (0.8, 0.85, 0.9, 0.95, 1.0)
COUPLING_SWEEP = (0.0, 0.2, 0.5, 1.0)
AR_NOISE_SD = 0.1

#: Chain name and the (first, second, given) roles of x, y and z
MARKOV_HYPOTHESES = (
    ("X-Z-Y", ("x", "y", "z")),
    ("Y-X-Z", ("y", "z", "x")),
    ("X-Y-Z", ("x", "z", "y")),
)

DEFLECTION_DIM = 4

#: Linear gaussian state space model with unit stationary variance
SSM_PHI = 0.9
SSM_Q = 1.0 - SSM_PHI ** 2
SSM_R = 0.1

#: exp(-|x - y|^2 / s2) with s2 = 1 / 3.73, in the sigma2 convention
ADAPTIVE_SIGMA2 = KernelSpec.gaussian_from_unit_exponent(1 / 3.73, 2).sigma2

PREDICT_FIELDS = ["n", "y_true", "y_pred", "sq_err", "dict_size"]

Rows = List[Dict[str, object]]

_ExperimentConfig = namedtuple(
    "_ExperimentConfig",
    "experiment n_samples seed sigma2 mu e0 reg_lambda reg_epsilon "
    "num_domains num_perms level coupling theta_steps runs eigs steps "
    "output_path",
)


class ExperimentConfig(_ExperimentConfig):
    """
    Settings for one experiment run. Fields left as ``None`` by
    :meth:`create` take the experiment's defaults.

    ``reg_lambda`` and ``reg_epsilon`` are the step size and stabilizer
    for klms-predict.
    """

    __slots__ = ()

    @classmethod
    def create(cls, experiment: str, **options) -> "ExperimentConfig":
        try:
            entry = EXPERIMENTS[experiment]
        except KeyError:
            raise InvalidParameter("unknown experiment {!r}".format(experiment))
        values = dict(COMMON_DEFAULTS)
        values.update(entry.defaults)
        values["output_path"] = "{}.csv".format(experiment)
        unknown = set(options) - set(cls._fields)
        if unknown:
            raise InvalidParameter(
                "unknown options: {}".format(", ".join(sorted(unknown)))
            )
        values.update({k: v for k, v in options.items() if v is not None})
        values["experiment"] = experiment
        return cls(**values)

    @classmethod
    def from_args(cls, args) -> "ExperimentConfig":
        options = {
            name: getattr(args, name, None)
            for name in cls._fields
            if name != "experiment"
        }
        return cls.create(args.experiment, **options)

    def validate(self) -> "ExperimentConfig":
        def check(ok, message):
            if not ok:
                raise InvalidParameter(message)

        check(self.n_samples >= MIN_SAMPLES, "n must be at least 8")
        check(0 <= self.seed < 2 ** 64, "seed must be a 64 bit unsigned integer")
        check(self.sigma2 is None or self.sigma2 > 0, "sigma2 must be positive")
        check(self.mu is None or 0 < self.mu <= 1, "mu must lie in (0, 1]")
        check(self.e0 is None or self.e0 > 0, "e0 must be positive")
        check(0 < self.level <= 1, "level must lie in (0, 1]")
        check(self.num_perms >= 20, "perms must be at least 20")
        check(self.num_domains >= 1, "domains must be at least 1")
        check(self.theta_steps >= 1, "theta-steps must be at least 1")
        check(self.runs >= 1, "runs must be at least 1")
        check(self.eigs >= 1, "eigs must be at least 1")
        check(self.steps >= 1, "steps must be at least 1")
        check(self.reg_lambda >= 0, "lambda must be nonnegative")
        check(self.reg_epsilon >= 0, "epsilon must be nonnegative")
        if self.experiment == KLMS_PREDICT:
            check(self.e0 < 1, "e0 must lie in (0, 1) for kLMS")
            check(self.reg_lambda > 0, "lambda (step size) must be positive")
            check(self.reg_epsilon > 0, "epsilon must be positive")
        if self.experiment in (KBR_PREDICT, KBR_KALMAN, MARKOV_TEST):
            check(self.reg_lambda > 0, "lambda must be positive")
        if self.experiment in (KBR_PREDICT, KBR_KALMAN):
            check(self.reg_epsilon > 0, "epsilon must be positive")
        if self.experiment == MARKOV_TEST:
            CondTestConfig(
                self.reg_lambda, self.num_domains, self.num_perms, self.level
            ).validate(self.n_samples)
        if self.experiment == MERCER_CHECK:
            check(
                self.n_samples >= 8 * self.eigs,
                "the Mercer grid needs n >= 8 * eigs",
            )
        return self


Experiment = namedtuple(
    "Experiment", "name description fieldnames defaults runner"
)

#: name -> Experiment, in catalogue order
EXPERIMENTS = OrderedDict()  # type: Dict[str, Experiment]

COMMON_DEFAULTS = {
    "n_samples": 512,
    "seed": 0,
    "sigma2": 0.5,
    "mu": None,
    "e0": None,
    "reg_lambda": 1e-4,
    "reg_epsilon": 1e-4,
    "num_domains": 8,
    "num_perms": 100,
    "level": 0.05,
    "coupling": None,
    "theta_steps": 18,
    "runs": 1,
    "eigs": 5,
    "steps": 200,
}


def experiment(name: str, description: str, fieldnames: List[str], **defaults):
    """
    Register the decorated runner in :data:`EXPERIMENTS`
    """

    def register(
        runner: Callable[[ExperimentConfig], Tuple[Rows, str]]
    ) -> Callable[[ExperimentConfig], Tuple[Rows, str]]:
        EXPERIMENTS[name] = Experiment(
            name, description, fieldnames, defaults, runner
        )
        return runner

    return register


def _rmse(sq_errors) -> float:
    return math.sqrt(float(np.mean(sq_errors)))


def _converged(values) -> np.ndarray:
    """
    The second half of a learning curve
    """
    values = np.asarray(values, dtype=float)
    return values[len(values) // 2 :]


@experiment(
    HSIC_ROTATION,
    "HSIC and sparse HSIC of a rotated independent pair against the angle",
    ["theta", "mu", "hsic", "dict_size", "exact_hsic", "threshold"],
)
def run_hsic_rotation(config: ExperimentConfig) -> Tuple[Rows, str]:
    spec = KernelSpec.gaussian(config.sigma2)
    mus = MU_SWEEP if config.mu is None else (config.mu,)
    thetas = [
        k * math.pi / (2 * config.theta_steps)
        for k in range(config.theta_steps + 1)
    ]
    rows = []  # type: Rows
    rejected = 0
    for theta, point_seed in zip(
        thetas, seed_sequence(config.seed).spawn(len(thetas))
    ):
        data_seed, perm_seed = point_seed.spawn(2)
        x, y = gen_rotation_pair(config.n_samples, theta, data_seed)
        test = independence_perm_test(
            x, y, spec, spec, config.num_perms, config.level, perm_seed
        )
        rejected += test.reject
        logger.info(
            "theta=%.4f hsic=%.6g threshold=%.6g",
            theta,
            test.statistic,
            test.threshold,
        )
        for mu in mus:
            state = sparse_hsic(x, y, spec, spec, mu)
            rows.append(
                {
                    "theta": theta,
                    "mu": mu,
                    "hsic": state.hsic,
                    "dict_size": len(state),
                    "exact_hsic": test.statistic,
                    "threshold": test.threshold,
                }
            )
    summary = "{}: independence rejected at {} of {}".format(
        HSIC_ROTATION, rejected, plural(len(thetas), "{} angle", "{} angles")
    )
    return rows, summary


@experiment(
    MARKOV_TEST,
    "Permutation tests of three Markov chain hypotheses on X, Y, Z",
    ["coupling", "hypothesis", "statistic", "threshold", "reject"],
    sigma2=1.0,
    reg_lambda=1e-3,
)
def run_markov_test(config: ExperimentConfig) -> Tuple[Rows, str]:
    spec = KernelSpec.gaussian(config.sigma2)
    couplings = COUPLING_SWEEP if config.coupling is None else (config.coupling,)
    cond_config = CondTestConfig(
        config.reg_lambda, config.num_domains, config.num_perms, config.level
    )
    rows = []  # type: Rows
    for coupling, point_seed in zip(
        couplings, seed_sequence(config.seed).spawn(len(couplings))
    ):
        data_seed, *perm_seeds = point_seed.spawn(1 + len(MARKOV_HYPOTHESES))
        x, y, z = gen_markov_triple(config.n_samples, coupling, data_seed)
        samples = {"x": x, "y": y, "z": z}
        for (name, roles), perm_seed in zip(MARKOV_HYPOTHESES, perm_seeds):
            first, second, given = (samples[r] for r in roles)
            result = markov_cond_test(
                first, second, given, (spec, spec, spec), cond_config, perm_seed
            )
            logger.info(
                "a=%g %s statistic=%.6g threshold=%.6g",
                coupling,
                name,
                result.statistic,
                result.threshold,
            )
            rows.append(
                {
                    "coupling": coupling,
                    "hypothesis": name,
                    "statistic": result.statistic,
                    "threshold": result.threshold,
                    "reject": result.reject,
                }
            )
    rejected = sum(1 for row in rows if row["reject"])
    summary = "{}: {} of {} rejected".format(
        MARKOV_TEST, rejected, plural(len(rows), "{} hypothesis", "{} hypotheses")
    )
    return rows, summary


def _average_runs(name: str, config: ExperimentConfig, run_once) -> Tuple[Rows, str]:
    """
    Repeat ``run_once`` over independent seeds. The first run provides
    y_true and y_pred; sq_err and dict_size are averaged over all runs.
    """
    runs = parallel_map(run_once, seed_sequence(config.seed).spawn(config.runs))
    rows = runs[0]
    for i, row in enumerate(rows):
        row["sq_err"] = float(np.mean([r[i]["sq_err"] for r in runs]))
        row["dict_size"] = float(np.mean([r[i]["dict_size"] for r in runs]))
    rmse = _rmse(_converged([row["sq_err"] for row in rows]))
    summary = "{}: converged RMSE {:.4g}, dictionary size {:.4g} ({})".format(
        name,
        rmse,
        rows[-1]["dict_size"],
        plural(config.runs, "{} run", "{} runs"),
    )
    return rows, summary


def _decode(model: KbrModel, state, seed) -> np.ndarray:
    try:
        return decode_state(model, state, rng_seed=seed)
    except PreimageDiverged as e:
        logger.warning("step %d: %s; using best effort point", state.step, e)
        return e.point


def _advance(model: KbrModel, state: KbrState, y_obs) -> KbrState:
    """
    One filter step, restarting from the observation when the prior
    weights vanish
    """
    state = kbr_filter_step(model, state, y_obs)
    if not state.alpha.any():
        logger.warning("step %d: restarting the filter", state.step)
        state = KbrState(kbr_filter_init(model, y_obs).alpha, state.step)
    return state


@experiment(
    KBR_PREDICT,
    "One step ahead prediction of the nonlinear AR series by the kernel "
    "Bayes filter",
    PREDICT_FIELDS,
)
def run_kbr_predict(config: ExperimentConfig) -> Tuple[Rows, str]:
    n = config.n_samples
    spec_x = KernelSpec.gaussian(config.sigma2, 2)
    spec_y = KernelSpec.gaussian(config.sigma2, 1)

    def run_once(run_seed) -> Rows:
        data_seed, decode_seed = run_seed.spawn(2)
        z = gen_nl_ar(n + 2 + config.steps, AR_NOISE_SD, data_seed)
        states, observations = ar_state_pairs(z[: n + 2])
        model = KbrModel.build(
            states, observations, spec_x, spec_y, config.reg_lambda, config.reg_epsilon
        )
        rows = []
        state = kbr_filter_init(model, z[n + 1])
        for i, step_seed in enumerate(decode_seed.spawn(config.steps)):
            current = n + 1 + i
            if i:
                state = _advance(model, state, z[current])
            predicted = float(_decode(model, state, step_seed)[1])
            target = float(z[current + 1])
            rows.append(
                {
                    "n": current + 1,
                    "y_true": target,
                    "y_pred": predicted,
                    "sq_err": (target - predicted) ** 2,
                    "dict_size": model.n,
                }
            )
        return rows

    return _average_runs(KBR_PREDICT, config, run_once)


def _adaptive_rows(config: ExperimentConfig, start, step) -> Callable:
    spec = KernelSpec.gaussian(config.sigma2, 2)

    def run_once(run_seed) -> Rows:
        z = gen_nl_ar(config.n_samples + 2, AR_NOISE_SD, run_seed)
        inputs, targets = ar_regression_pairs(z, 2)
        state = start(inputs[0], targets[0], spec)
        rows = []
        for i in range(1, len(targets)):
            state, predicted = step(state, inputs[i], targets[i], spec)[:2]
            rows.append(
                {
                    "n": i + 2,
                    "y_true": targets[i],
                    "y_pred": predicted,
                    "sq_err": (targets[i] - predicted) ** 2,
                    "dict_size": len(state),
                }
            )
        return rows

    return run_once


@experiment(
    KRLS_PREDICT,
    "Online prediction of the nonlinear AR series by kRLS with ALD "
    "sparsification",
    PREDICT_FIELDS,
    n_samples=2000,
    sigma2=ADAPTIVE_SIGMA2,
    e0=0.1,
)
def run_krls_predict(config: ExperimentConfig) -> Tuple[Rows, str]:
    def start(x, y, spec):
        return KrlsState.start(x, y, spec, config.e0)

    return _average_runs(
        KRLS_PREDICT, config, _adaptive_rows(config, start, krls_step)
    )


@experiment(
    KLMS_PREDICT,
    "Online prediction of the nonlinear AR series by normalized kLMS with "
    "the coherence criterion",
    PREDICT_FIELDS,
    n_samples=2000,
    sigma2=ADAPTIVE_SIGMA2,
    e0=0.7,
    reg_lambda=0.09,
    reg_epsilon=0.03,
)
def run_klms_predict(config: ExperimentConfig) -> Tuple[Rows, str]:
    def start(x, y, spec):
        return KlmsState.start(
            x, y, spec, config.e0, config.reg_lambda, config.reg_epsilon
        )

    return _average_runs(
        KLMS_PREDICT, config, _adaptive_rows(config, start, klms_step)
    )


@experiment(
    MERCER_CHECK,
    "Discretized eigenvalues of the min kernel against the exact ones",
    ["k", "lambda_emp", "lambda_analytic", "rel_err"],
    n_samples=1000,
)
def run_mercer_check(config: ExperimentConfig) -> Tuple[Rows, str]:
    grid = mercer_grid(config.n_samples)
    pairs = mercer_min_kernel(config.n_samples, config.eigs)
    rows = []  # type: Rows
    for k, pair in enumerate(pairs, 1):
        exact, _ = analytic_min_kernel_eigenpair(k)
        rows.append(
            {
                "k": k,
                "lambda_emp": pair.value,
                "lambda_analytic": exact,
                "rel_err": abs(pair.value - exact) / exact,
            }
        )
    _, first = analytic_min_kernel_eigenpair(1, grid)
    vector = pairs[0].vector
    cosine = abs(vector @ first) / (np.linalg.norm(vector) * np.linalg.norm(first))
    summary = "{}: max relative error {:.3g}, first eigenvector cosine {:.6f}".format(
        MERCER_CHECK, max(row["rel_err"] for row in rows), cosine
    )
    return rows, summary


@experiment(
    DEFLECTION_DEMO,
    "Deflection of the optimal detector against random directions",
    ["trial", "d_max", "d_formula", "best_random"],
    n_samples=10000,
    runs=10,
    reg_lambda=0.0,
)
def run_deflection_demo(config: ExperimentConfig) -> Tuple[Rows, str]:
    """
    ``runs`` trials, each drawing means and a covariance in dimension
    :data:`DEFLECTION_DIM` and comparing against ``n`` random directions
    """
    d = DEFLECTION_DIM
    rows = []  # type: Rows
    for trial, rng_seed in enumerate(seed_sequence(config.seed).spawn(config.runs)):
        rng = make_rng(rng_seed)
        mu0 = rng.standard_normal(d)
        mu1 = rng.standard_normal(d)
        factor = rng.standard_normal((d, d))
        sigma0 = factor @ factor.T + np.eye(d)
        detector = deflection_detector(mu0, mu1, sigma0, config.reg_lambda)
        diff = mu1 - mu0
        regularized = sigma0 + config.reg_lambda * np.eye(d)
        formula = float(diff @ np.linalg.solve(regularized, diff))
        directions = rng.standard_normal((config.n_samples, d))
        spread = np.einsum("ij,jk,ik->i", directions, sigma0, directions)
        best = float(((directions @ diff) ** 2 / spread).max())
        rows.append(
            {
                "trial": trial,
                "d_max": detector.d_max,
                "d_formula": formula,
                "best_random": best,
            }
        )
    dominated = sum(1 for row in rows if row["best_random"] <= row["d_max"])
    summary = "{}: detector dominated random search in {} of {}".format(
        DEFLECTION_DEMO, dominated, plural(len(rows), "{} trial", "{} trials")
    )
    return rows, summary


def _embedding_sizes(n: int) -> List[int]:
    size = 10 if n < 1000 else 100
    sizes = []
    while size <= n:
        sizes.append(size)
        size *= 10
    if not sizes or sizes[-1] != n:
        sizes.append(n)
    return sizes


@experiment(
    EMBEDDING_RATE,
    "Mean squared error of the empirical mean embedding of a standard normal "
    "sample against its size",
    ["n", "mean_err_sq", "std_err_sq"],
    n_samples=10000,
    runs=20,
    sigma2=1.0,
)
def run_embedding_rate(config: ExperimentConfig) -> Tuple[Rows, str]:
    sizes = _embedding_sizes(config.n_samples)
    rows = []  # type: Rows
    for size, size_seed in zip(sizes, seed_sequence(config.seed).spawn(len(sizes))):

        def replicate(rng_seed, size=size):
            samples = make_rng(rng_seed).standard_normal(size)
            return gaussian_normal_embedding_error(samples, config.sigma2)

        errors = parallel_map(replicate, size_seed.spawn(config.runs))
        rows.append(
            {
                "n": size,
                "mean_err_sq": float(np.mean(errors)),
                "std_err_sq": float(np.std(errors)),
            }
        )
    if len(rows) > 1:
        slope = np.polyfit(
            np.log([row["n"] for row in rows]),
            np.log([row["mean_err_sq"] for row in rows]),
            1,
        )[0]
        summary = "{}: log-log slope {:.3f}".format(EMBEDDING_RATE, slope)
    else:
        summary = "{}: a single sample size, no slope".format(EMBEDDING_RATE)
    return rows, summary


@experiment(
    KBR_KALMAN,
    "Kernel Bayes filter against the Kalman filter on a linear gaussian "
    "state space model",
    ["n", "y_true", "kalman_mean", "kbr_mean"],
)
def run_kbr_kalman(config: ExperimentConfig) -> Tuple[Rows, str]:
    n = config.n_samples
    spec = KernelSpec.gaussian(config.sigma2, 1)
    states, observations = gen_linear_gaussian_ssm(
        n + 1 + config.steps, SSM_PHI, SSM_Q, SSM_R, config.seed
    )
    model = KbrModel.build(
        states[: n + 1],
        observations[: n + 1],
        spec,
        spec,
        config.reg_lambda,
        config.reg_epsilon,
    )
    test_states = states[n + 1 :]
    test_obs = observations[n + 1 :]
    kalman_means, _ = kalman_filter(test_obs, SSM_PHI, SSM_Q, SSM_R)

    rows = []  # type: Rows
    state = kbr_filter_init(model, test_obs[0])
    decode_seeds = seed_sequence(config.seed).spawn(config.steps)
    for i, step_seed in enumerate(decode_seeds):
        if i:
            state = _advance(model, state, test_obs[i])
        rows.append(
            {
                "n": n + 1 + i,
                "y_true": test_states[i],
                "kalman_mean": kalman_means[i],
                "kbr_mean": float(_decode(model, state, step_seed)[0]),
            }
        )
    kalman_rmse = _rmse([(r["y_true"] - r["kalman_mean"]) ** 2 for r in rows])
    kbr_rmse = _rmse([(r["y_true"] - r["kbr_mean"]) ** 2 for r in rows])
    summary = "{}: Kalman RMSE {:.4g}, KBR RMSE {:.4g}".format(
        KBR_KALMAN, kalman_rmse, kbr_rmse
    )
    return rows, summary


def run_experiment(config: ExperimentConfig) -> str:
    """
    Run ``config.experiment``, write its CSV to ``config.output_path`` and
    return the summary line.
    """
    config.validate()
    entry = EXPERIMENTS[config.experiment]
    logger.info("Running %s", config.experiment)
    rows, summary = entry.runner(config)
    write_csv(config.output_path, entry.fieldnames, rows)
    logger.info("Wrote %d rows to %s", len(rows), config.output_path)
    return summary
