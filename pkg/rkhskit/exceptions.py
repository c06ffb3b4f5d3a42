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


class DimensionMismatch(ValueError):
    """
    Arrays or points do not share the expected shape
    """


class InvalidDomain(ValueError):
    """
    An input lies outside the domain of the kernel (eg a negative
    argument to the min kernel)
    """


class EmptySample(ValueError):
    """
    An operation needing at least one sample was given none
    """


class NotOrthonormal(ValueError):
    """
    The supplied basis is not orthonormal under the declared inner product
    """


class NonNormalizedKernel(ValueError):
    """
    The operation requires K(x, x) = 1 for every x
    """


class InvalidParameter(ValueError):
    """
    A numerical parameter is out of range
    """


class NumericalFailure(ArithmeticError):
    """
    Base class for failures arising during a computation on valid input
    """


class SingularMatrix(NumericalFailure):
    """
    A linear system that must be solved exactly is singular
    """


class InfeasibleConstraints(NumericalFailure):
    """
    Interpolation constraints are inconsistent: no element of the space
    satisfies all of them
    """


class FilterOverflow(NumericalFailure):
    """
    The filter recursion produced non-finite coefficients
    """

    def __init__(self, message, step):
        super(FilterOverflow, self).__init__(message)
        self.step = step


class PreimageDiverged(NumericalFailure):
    """
    Every restart of the pre-image iteration diverged or oscillated.

    ``point`` holds the best-effort estimate, ``converged`` is always False.
    """

    def __init__(self, message, point):
        super(PreimageDiverged, self).__init__(message)
        self.point = point
        self.converged = False
