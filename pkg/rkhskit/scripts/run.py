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

import argparse

import tabulate

from rkhskit.experiments import EXPERIMENTS
from rkhskit.experiments import ExperimentConfig
from rkhskit.experiments import run_experiment


def install_argparsers(global_parser, subparsers):
    options_parser = argparse.ArgumentParser(add_help=False)
    options_parser.add_argument(
        "--n", dest="n_samples", type=int, help="Sample size or stream length"
    )
    options_parser.add_argument(
        "--seed", type=int, help="Random seed (64 bit unsigned integer)"
    )
    options_parser.add_argument(
        "--sigma2",
        type=float,
        help="Gaussian bandwidth for exp(-|x - y|^2 / (2 sigma2))",
    )
    options_parser.add_argument(
        "--mu", type=float, help="Sparse HSIC coherence threshold"
    )
    options_parser.add_argument(
        "--e0", type=float, help="kRLS ALD or kLMS coherence threshold"
    )
    options_parser.add_argument(
        "--lambda",
        dest="reg_lambda",
        type=float,
        help="Regularization, or the step size for klms-predict",
    )
    options_parser.add_argument(
        "--epsilon",
        dest="reg_epsilon",
        type=float,
        help="Second regularizer, or the stabilizer for klms-predict",
    )
    options_parser.add_argument(
        "--domains",
        dest="num_domains",
        type=int,
        help="Number of conditioning domains",
    )
    options_parser.add_argument(
        "--perms", dest="num_perms", type=int, help="Number of permutations"
    )
    options_parser.add_argument("--level", type=float, help="Test level")
    options_parser.add_argument(
        "--coupling", type=float, help="Coupling of the Markov triple"
    )
    options_parser.add_argument(
        "--theta-steps",
        dest="theta_steps",
        type=int,
        help="Rotation angles between 0 and pi/2",
    )
    options_parser.add_argument(
        "--runs",
        type=int,
        help="Independent repetitions (trials for deflection-demo, "
        "replicates for embedding-rate)",
    )
    options_parser.add_argument(
        "--eigs", type=int, help="Number of Mercer eigenpairs"
    )
    options_parser.add_argument(
        "--steps", type=int, help="Number of filtering steps"
    )
    options_parser.add_argument(
        "--out",
        dest="output_path",
        metavar="PATH",
        help="CSV output file (default: <experiment>.csv)",
    )

    for entry in EXPERIMENTS.values():
        parser = subparsers.add_parser(
            entry.name,
            help=entry.description,
            parents=[global_parser, options_parser],
        )
        parser.set_defaults(
            func=run, experiment=entry.name, command_name=entry.name
        )

    parser_list = subparsers.add_parser(
        "list", help="List the available experiments", parents=[global_parser]
    )
    parser_list.set_defaults(func=list_experiments, command_name="list")


def run(args, config):
    print(run_experiment(ExperimentConfig.from_args(args)))


def list_experiments(args, config):
    rows = [
        (entry.name, entry.description, ", ".join(entry.fieldnames))
        for entry in EXPERIMENTS.values()
    ]
    print(tabulate.tabulate(rows, headers=["Experiment", "Description", "Columns"]))
