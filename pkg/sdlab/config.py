# SPDX-FileCopyrightText: 2024-2025 ModelCloud.ai
# SPDX-FileCopyrightText: 2024-2025 qubitium@modelcloud.ai
# SPDX-License-Identifier: Apache-2.0
# Contact: qubitium@modelcloud.ai, x.com/qubitium

import math
import os
from dataclasses import dataclass, replace
from typing import Optional, Tuple

from .errors import ConfigError

DEFAULT_EPS = 1e-3
DEFAULT_TOL = 1e-10
DEFAULT_RESOLUTION = 401
DEFAULT_STENCIL_RADIUS = 3
DEFAULT_R_MAX = 0.995
DEFAULT_HYPOTHESIS_NODES = 2001

P_ALIASES = {
    "classical": "classical_nehari",
    "classical_nehari": "classical_nehari",
    "nehari": "classical_nehari",
    "pi2": "constant_pi2",
    "constant_pi2": "constant_pi2",
    "pokornyi": "pokornyi",
}

THEOREMS = ("1", "2", "3", "4", "corollary", "A-probe")
FORMATS = ("json", "csv", "obj")


def _env_float(name: str) -> Optional[float]:
    raw = os.environ.get(name, "").strip()
    if not raw:
        return None
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"{name} must be a number, got {raw!r}") from exc


def _env_int(name: str) -> Optional[int]:
    raw = os.environ.get(name, "").strip()
    if not raw:
        return None
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"{name} must be an integer, got {raw!r}") from exc


@dataclass(frozen=True)
class RunConfig:
    """Everything one CLI command needs; immutable once validated."""

    command: str = "verify"
    theorem: Optional[str] = None
    map_name: Optional[str] = None
    map_file: Optional[str] = None
    p_kind: Optional[str] = "classical_nehari"
    p_file: Optional[str] = None
    eps: float = DEFAULT_EPS
    tol: float = DEFAULT_TOL
    margin_tol: float = 1e-9
    nodes: int = DEFAULT_HYPOTHESIS_NODES
    resolution: int = DEFAULT_RESOLUTION
    stencil_radius: int = DEFAULT_STENCIL_RADIUS
    r_max: float = DEFAULT_R_MAX
    pairs: int = 200
    probe_samples: int = 500
    seed: int = 0
    radii: Tuple[float, ...] = (0.3, 0.6, 0.9)
    alpha: complex = 0j
    enneper_eps: float = 1.0 / math.sqrt(2.0)
    out: Optional[str] = None
    report_format: str = "json"
    workers: int = 1
    rings: int = 24
    sectors: int = 48
    mesh_radius: float = 0.9

    def with_env(self) -> "RunConfig":
        """Apply ``SDL_THREADS`` and ``SDL_EPS`` on top of explicit settings."""

        updates = {}
        threads = _env_int("SDL_THREADS")
        if threads is not None:
            updates["workers"] = threads
        eps = _env_float("SDL_EPS")
        if eps is not None:
            updates["eps"] = eps
        return replace(self, **updates) if updates else self

    @classmethod
    def from_env(cls, **overrides) -> "RunConfig":
        return cls(**overrides).with_env().validate()

    def validate(self) -> "RunConfig":
        """Check ranges and normalize aliases; returns the normalized config."""

        if not (0.0 < self.eps < 1.0):
            raise ConfigError(f"eps must lie in (0, 1), got {self.eps}")
        if self.tol <= 0 or self.margin_tol <= 0:
            raise ConfigError("tolerances must be positive")
        if not (0.0 < self.r_max < 1.0):
            raise ConfigError(f"r_max must lie in (0, 1), got {self.r_max}")
        for name in ("nodes", "resolution", "stencil_radius", "pairs", "probe_samples", "workers", "rings", "sectors"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be at least 1")
        if self.resolution < 3:
            raise ConfigError("resolution must be at least 3")
        if self.report_format not in FORMATS:
            raise ConfigError(f"unknown format {self.report_format!r}")
        if self.theorem is not None and self.theorem not in THEOREMS:
            raise ConfigError(f"unknown theorem {self.theorem!r}; expected one of {', '.join(THEOREMS)}")
        for r in self.radii:
            if not (0.0 <= r < 1.0):
                raise ConfigError(f"radius {r} outside [0, 1)")
        if abs(self.alpha) >= 1.0:
            raise ConfigError("alpha must lie inside the unit disk")
        if not (0.0 < self.mesh_radius < 1.0):
            raise ConfigError(f"mesh radius must lie in (0, 1), got {self.mesh_radius}")

        p_kind = self.p_kind
        if self.p_file is None and p_kind is not None:
            key = p_kind.strip().lower()
            if key not in P_ALIASES:
                raise ConfigError(f"unknown p kind {p_kind!r}; expected classical, pi2 or pokornyi")
            p_kind = P_ALIASES[key]
        return replace(self, p_kind=p_kind)
