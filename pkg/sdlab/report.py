# SPDX-FileCopyrightText: 2024-2025 ModelCloud.ai
# SPDX-FileCopyrightText: 2024-2025 qubitium@modelcloud.ai
# SPDX-License-Identifier: Apache-2.0
# Contact: qubitium@modelcloud.ai, x.com/qubitium

"""Machine-readable verification reports (JSON with ``schema: 1`` and CSV)."""

import csv
import datetime
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from .errors import NumericalError

SCHEMA_VERSION = 1

MARGIN_TOL = 1e-9
VIOLATION_TOL = 1e-6

Site = Union[float, complex, Tuple[Any, ...]]


def _jsonable(value: Any) -> Any:
    """Complex numbers become ``[re, im]``; tuples become lists."""

    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, (tuple, list)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, float) and not math.isfinite(value):
        return repr(float(value))
    if hasattr(value, "item"):
        return _jsonable(value.item())
    return value


def _site_text(site: Site) -> str:
    if isinstance(site, tuple):
        return ";".join(_site_text(s) for s in site)
    if isinstance(site, complex):
        return f"{float(site.real)!r}{float(site.imag):+}j"
    return repr(float(site))


def _timestamp() -> str:
    return datetime.datetime.now(datetime.timezone.utc).replace(microsecond=0).isoformat()


@dataclass(frozen=True)
class Sample:
    """One checked inequality ``lhs >= rhs``; ``margin = lhs - rhs``."""

    site: Site
    lhs: float
    rhs: float
    margin: float
    part: str = ""

    def to_dict(self) -> Dict[str, Any]:
        out = {"site": _jsonable(self.site), "lhs": self.lhs, "rhs": self.rhs, "margin": self.margin}
        if self.part:
            out["part"] = self.part
        return out


def sample(site: Site, lhs: float, rhs: float, part: str = "") -> Sample:
    return Sample(site=site, lhs=float(lhs), rhs=float(rhs), margin=float(lhs) - float(rhs), part=part)


@dataclass(frozen=True)
class HypothesisEcho:
    """What was checked before a verification run, and how it went."""

    p_kind: str
    ok: bool
    nodes: int = 0
    worst_margin: float = math.inf
    witness: Optional[Site] = None
    detail: str = ""
    rescaled_by: Optional[float] = None
    label: str = "sampled hypothesis"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "p_kind": self.p_kind,
            "ok": self.ok,
            "nodes": self.nodes,
            "worst_margin": _jsonable(self.worst_margin),
            "witness": _jsonable(self.witness),
            "detail": self.detail,
            "rescaled_by": self.rescaled_by,
            "label": self.label,
        }


class _ReportIO:
    """Shared JSON/CSV writers; subclasses provide ``to_dict`` and ``csv_rows``."""

    def to_dict(self, *, timestamp: bool = True) -> Dict[str, Any]:  # pragma: no cover - abstract
        raise NotImplementedError

    def csv_rows(self) -> Tuple[List[str], List[List[Any]]]:  # pragma: no cover - abstract
        raise NotImplementedError

    def to_json(self, *, timestamp: bool = True) -> str:
        return json.dumps(self.to_dict(timestamp=timestamp), indent=2, sort_keys=True)

    def write(self, path: Union[str, Path], fmt: str = "json") -> Path:
        path = Path(path)
        if fmt == "json":
            path.write_text(self.to_json() + "\n", encoding="utf-8")
        elif fmt == "csv":
            header, rows = self.csv_rows()
            with open(path, "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh)
                writer.writerow(header)
                writer.writerows(rows)
        else:
            raise ValueError(f"unsupported report format {fmt!r}")
        return path


@dataclass(frozen=True)
class DistortionReport(_ReportIO):
    """Margins of a two-point or pointwise distortion inequality over samples."""

    theorem: str
    p_kind: str
    samples: Tuple[Sample, ...]
    hypothesis: HypothesisEcho
    tol: float = MARGIN_TOL
    extras: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        for s in self.samples:
            if not math.isfinite(s.margin):
                raise NumericalError(f"non-finite margin at site {s.site!r}")

    @property
    def min_margin(self) -> float:
        return min((s.margin for s in self.samples), default=math.inf)

    @property
    def worst(self) -> Optional[Sample]:
        if not self.samples:
            return None
        return min(self.samples, key=lambda s: s.margin)

    @property
    def worst_site(self) -> Optional[Site]:
        worst = self.worst
        return None if worst is None else worst.site

    @property
    def ok(self) -> bool:
        return self.min_margin >= -self.tol

    @property
    def rounding_sites(self) -> Tuple[Site, ...]:
        return tuple(s.site for s in self.samples if -VIOLATION_TOL <= s.margin < -self.tol)

    @property
    def violation_sites(self) -> Tuple[Site, ...]:
        return tuple(s.site for s in self.samples if s.margin < -VIOLATION_TOL)

    def equality(self, tol: float = 1e-7) -> bool:
        """True when every sample is an equality case within ``tol``."""

        return bool(self.samples) and all(abs(s.margin) <= tol for s in self.samples)

    def to_dict(self, *, timestamp: bool = True) -> Dict[str, Any]:
        out = {
            "schema": SCHEMA_VERSION,
            "theorem": self.theorem,
            "p_kind": self.p_kind,
            "samples": [s.to_dict() for s in self.samples],
            "min_margin": _jsonable(self.min_margin),
            "worst_site": _jsonable(self.worst_site),
            "hypothesis_ok": self.hypothesis.ok,
            "hypothesis": self.hypothesis.to_dict(),
            "tol": self.tol,
            "ok": self.ok,
            "rounding_sites": _jsonable(self.rounding_sites),
            "violation_sites": _jsonable(self.violation_sites),
        }
        if self.extras:
            out["extras"] = _jsonable(self.extras)
        if timestamp:
            out["generated_at"] = _timestamp()
        return out

    def csv_rows(self) -> Tuple[List[str], List[List[Any]]]:
        header = ["site", "part", "lhs", "rhs", "margin"]
        rows = [[_site_text(s.site), s.part, repr(s.lhs), repr(s.rhs), repr(s.margin)] for s in self.samples]
        return header, rows


@dataclass(frozen=True)
class CoveringReport(_ReportIO):
    """Measured surface distances against the covering bound at each radius."""

    radii: Tuple[float, ...]
    measured_min_rho: Tuple[float, ...]
    H_bound: Tuple[float, ...]
    allowance: Tuple[float, ...]
    covering_radius_R: float
    sigma_z0: complex
    lambda0: float
    hypothesis: HypothesisEcho
    radial_upper: Tuple[float, ...] = ()
    theorem: str = "4"
    extras: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        for name in ("radii", "measured_min_rho", "H_bound", "allowance", "radial_upper"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))
        n = len(self.radii)
        if len(self.measured_min_rho) != n or len(self.H_bound) != n or len(self.allowance) != n:
            raise ValueError("covering report sequences must match the radii")
        for value in self.measured_min_rho + self.H_bound:
            if not math.isfinite(value):
                raise NumericalError("non-finite entry in covering report")

    @property
    def margins(self) -> Tuple[float, ...]:
        return tuple(m - b for m, b in zip(self.measured_min_rho, self.H_bound))

    @property
    def min_margin(self) -> float:
        return min(self.margins, default=math.inf)

    @property
    def worst_site(self) -> Optional[float]:
        if not self.radii:
            return None
        slack = [m + a for m, a in zip(self.margins, self.allowance)]
        return self.radii[min(range(len(slack)), key=slack.__getitem__)]

    @property
    def ok(self) -> bool:
        return all(m >= -a for m, a in zip(self.margins, self.allowance))

    def to_dict(self, *, timestamp: bool = True) -> Dict[str, Any]:
        out = {
            "schema": SCHEMA_VERSION,
            "theorem": self.theorem,
            "p_kind": self.hypothesis.p_kind,
            "radii": list(self.radii),
            "measured_min_rho": list(self.measured_min_rho),
            "H_bound": list(self.H_bound),
            "margins": list(self.margins),
            "allowance": list(self.allowance),
            "radial_upper": list(self.radial_upper),
            "covering_radius_R": _jsonable(self.covering_radius_R),
            "sigma_z0": _jsonable(complex(self.sigma_z0)),
            "lambda0": self.lambda0,
            "min_margin": _jsonable(self.min_margin),
            "worst_site": self.worst_site,
            "hypothesis_ok": self.hypothesis.ok,
            "hypothesis": self.hypothesis.to_dict(),
            "ok": self.ok,
        }
        if self.extras:
            out["extras"] = _jsonable(self.extras)
        if timestamp:
            out["generated_at"] = _timestamp()
        return out

    def csv_rows(self) -> Tuple[List[str], List[List[Any]]]:
        header = ["r", "measured_min_rho", "H_bound", "margin", "allowance", "radial_upper"]
        rows = []
        for i, r in enumerate(self.radii):
            upper = self.radial_upper[i] if i < len(self.radial_upper) else ""
            rows.append([repr(r), repr(self.measured_min_rho[i]), repr(self.H_bound[i]), repr(self.margins[i]), repr(self.allowance[i]), repr(upper) if upper != "" else ""])
        return header, rows


@dataclass(frozen=True)
class ProbeReport(_ReportIO):
    """Outcome of a numerical search for a self-intersection of a curve."""

    curve: str
    hypothesis: HypothesisEcho
    samples: int
    collision: Optional[Tuple[float, float]] = None
    theorem: str = "A-probe"

    @property
    def ok(self) -> bool:
        return self.collision is None

    @property
    def worst_site(self) -> Optional[Tuple[float, float]]:
        return self.collision

    def to_dict(self, *, timestamp: bool = True) -> Dict[str, Any]:
        out = {
            "schema": SCHEMA_VERSION,
            "theorem": self.theorem,
            "curve": self.curve,
            "p_kind": self.hypothesis.p_kind,
            "samples": self.samples,
            "collision": _jsonable(self.collision),
            "worst_site": _jsonable(self.worst_site),
            "hypothesis_ok": self.hypothesis.ok,
            "hypothesis": self.hypothesis.to_dict(),
            "ok": self.ok,
        }
        if timestamp:
            out["generated_at"] = _timestamp()
        return out

    def csv_rows(self) -> Tuple[List[str], List[List[Any]]]:
        header = ["curve", "x1", "x2"]
        if self.collision is None:
            return header, []
        return header, [[self.curve, repr(float(self.collision[0])), repr(float(self.collision[1]))]]
