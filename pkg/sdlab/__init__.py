# SPDX-FileCopyrightText: 2024-2025 ModelCloud.ai
# SPDX-FileCopyrightText: 2024-2025 qubitium@modelcloud.ai
# SPDX-License-Identifier: Apache-2.0
# Contact: qubitium@modelcloud.ai, x.com/qubitium

"""Top-level package for SDLab: Schwarzian derivative distortion checks."""

from .config import RunConfig
from .curves import CurveJet, MobiusRn, ahlfors_s1, normalize_curve, verify_theorem1, verify_theorem2
from .errors import ConfigError, HypothesisFailed, NumericalError, SDLabError
from .harmonic import HarmonicMap, builtin_map, harmonic_schwarzian, verify_theorem3, we_lift
from .log import LabLog
from .metric import ConformalGrid, conformal_distance, verify_corollary16, verify_theorem4
from .nehari import NehariFunction, builtin_nehari, extremal_F, extremal_G
from .report import CoveringReport, DistortionReport

__all__ = [
    "ConfigError",
    "ConformalGrid",
    "CoveringReport",
    "CurveJet",
    "DistortionReport",
    "HarmonicMap",
    "HypothesisFailed",
    "LabLog",
    "MobiusRn",
    "NehariFunction",
    "NumericalError",
    "RunConfig",
    "SDLabError",
    "ahlfors_s1",
    "builtin_map",
    "builtin_nehari",
    "conformal_distance",
    "extremal_F",
    "extremal_G",
    "harmonic_schwarzian",
    "normalize_curve",
    "verify_corollary16",
    "verify_theorem1",
    "verify_theorem2",
    "verify_theorem3",
    "verify_theorem4",
    "we_lift",
]
