# SPDX-FileCopyrightText: 2024-2025 ModelCloud.ai
# SPDX-FileCopyrightText: 2024-2025 qubitium@modelcloud.ai
# SPDX-License-Identifier: Apache-2.0
# Contact: qubitium@modelcloud.ai, x.com/qubitium

"""Exception hierarchy shared by every SDLab module.

Each family carries the process exit code the command line maps it to:
configuration problems exit 2, numerical failures exit 3 and unmet theorem
hypotheses exit 4. Inequality violations are reported, never raised.
"""

from typing import Optional, Tuple


class SDLabError(Exception):
    """Root of all SDLab errors."""

    exit_code = 3


class ConfigError(SDLabError, ValueError):
    """Invalid user input: unknown names, bad files, out-of-range settings."""

    exit_code = 2


class UnknownKind(ConfigError):
    """Requested catalog entry does not exist."""


class NumericalError(SDLabError):
    """A numerical kernel could not produce a trustworthy value."""

    exit_code = 3


class NonFiniteCoefficient(NumericalError):
    pass


class StepUnderflow(NumericalError):
    """Adaptive stepping stalled."""

    def __init__(self, message: str, abscissa: Optional[float] = None):
        super().__init__(message)
        self.abscissa = abscissa


class NonFiniteIntegrand(NumericalError):
    pass


class MaxSubdivisions(NumericalError):
    """Adaptive quadrature ran out of subintervals."""

    def __init__(self, message: str, worst_interval: Optional[Tuple[float, float]] = None):
        super().__init__(message)
        self.worst_interval = worst_interval


class StencilOutsideDomain(NumericalError):
    pass


class DoubleZeroDetected(NumericalError):
    """The solution that should stay positive vanished: p is not disconjugate."""

    def __init__(self, message: str, witness: Optional[Tuple[float, float]] = None):
        super().__init__(message)
        self.witness = witness


class ConvexityViolated(NumericalError):
    pass


class DegenerateTangent(NumericalError):
    pass


class InversionSingularity(NumericalError):
    """An inversion center sits on the curve."""

    def __init__(self, message: str, x: Optional[float] = None):
        super().__init__(message)
        self.x = x


class ZeroConformalFactor(NumericalError):
    pass


class NonSmoothSigma(NumericalError):
    pass


class PositiveCurvature(NumericalError):
    pass


class PathOutsideDisk(NumericalError):
    pass


class DomainError(NumericalError, ValueError):
    """Argument outside the domain of a closed form or metric."""


class Disconnected(NumericalError):
    pass


class OutOfGrid(NumericalError):
    pass


class HypothesisFailed(SDLabError):
    """A theorem's hypothesis does not hold on the sampled grid."""

    exit_code = 4

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness
