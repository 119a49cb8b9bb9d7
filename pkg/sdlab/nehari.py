# SPDX-FileCopyrightText: 2024-2025 ModelCloud.ai
# SPDX-FileCopyrightText: 2024-2025 qubitium@modelcloud.ai
# SPDX-License-Identifier: Apache-2.0
# Contact: qubitium@modelcloud.ai, x.com/qubitium

"""Nehari weights p, the extremal profiles F and G built from them, and the
numerical disconjugacy and extremality scans."""

import csv
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Callable, FrozenSet, Iterable, Optional, Tuple, Union

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import interpolate

from .errors import (
    ConfigError,
    ConvexityViolated,
    DomainError,
    DoubleZeroDetected,
    HypothesisFailed,
    UnknownKind,
)
from .log import LabLog
from .numerics import (
    DEFAULT_EPS,
    DEFAULT_ODE_TOL,
    Jet3Real,
    OdeProfile,
    clustered_grid,
    cumulative_gauss_legendre,
    evaluate_on,
    integrate_linear_ode,
)

log = LabLog.shared()

SQRT2 = math.sqrt(2.0)
PI2_CONST = math.pi ** 2 / 4.0

EVIDENCE_LABEL = "numerical evidence"


class NehariKind(str, Enum):
    CLASSICAL = "classical_nehari"
    PI2 = "constant_pi2"
    POKORNYI = "pokornyi"
    CUSTOM = "custom"


class Flag(str, Enum):
    EVEN = "even"
    POSITIVE = "positive"
    DECAY_NONINCREASING = "decay_nonincreasing"
    MONOTONE_NONDECREASING = "monotone_nondecreasing"
    EXTREMAL = "extremal"


_BUILTIN_FLAGS = frozenset(Flag)


def _classical(x):
    return 1.0 / np.square(1.0 - np.square(x))


def _pi2(x):
    return np.full(np.shape(x), PI2_CONST)


def _pokornyi(x):
    return 2.0 / (1.0 - np.square(x))


_BUILTIN_EVALUATORS = {
    NehariKind.CLASSICAL: _classical,
    NehariKind.PI2: _pi2,
    NehariKind.POKORNYI: _pokornyi,
}


@dataclass(frozen=True, eq=False)
class NehariFunction:
    """An even positive weight p on (-1, 1) with its claimed structural flags."""

    evaluator: Callable
    kind: NehariKind
    flags: FrozenSet[Flag] = frozenset()
    label: str = ""
    scale: float = 1.0

    def __call__(self, x):
        value = self.evaluator(x)
        return self.scale * value if self.scale != 1.0 else value

    @property
    def name(self) -> str:
        base = self.label or self.kind.value
        return base if self.scale == 1.0 else f"{self.scale:.6g}*{base}"

    def has(self, flag: Flag) -> bool:
        return flag in self.flags

    def scaled(self, c: float, *, extremal: bool = False) -> "NehariFunction":
        """Return c * p; the extremal flag survives only when asked for."""

        if c <= 0:
            raise ConfigError(f"scale must be positive, got {c}")
        flags = set(self.flags)
        flags.discard(Flag.EXTREMAL)
        if extremal:
            flags.add(Flag.EXTREMAL)
        return replace(self, scale=self.scale * c, flags=frozenset(flags))

    @classmethod
    def custom(cls, fn: Callable, flags: Iterable[Union[Flag, str]] = (), label: str = "custom") -> "NehariFunction":
        return cls(evaluator=fn, kind=NehariKind.CUSTOM, flags=frozenset(Flag(f) for f in flags), label=label)

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "NehariFunction":
        """Load samples ``x p`` on [0, 1) and extend evenly.

        A ``# flags: a, b`` comment line declares structural flags beyond
        ``even`` and ``positive``. Past the last sample the weight continues
        with (1 - x^2)^2 p held constant.
        """

        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read p file {path}: {exc}") from exc

        flags = {Flag.EVEN, Flag.POSITIVE}
        rows = []
        for raw in text.splitlines():
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line.lstrip("#").strip()
                if body.lower().startswith("flags:"):
                    for name in body.split(":", 1)[1].split(","):
                        name = name.strip()
                        if not name:
                            continue
                        try:
                            flags.add(Flag(name))
                        except ValueError as exc:
                            raise ConfigError(f"unknown flag {name!r} in {path}") from exc
                continue
            parts = line.replace(",", " ").split()
            if len(parts) != 2:
                raise ConfigError(f"{path}: expected two columns 'x p', got {raw!r}")
            try:
                rows.append((float(parts[0]), float(parts[1])))
            except ValueError as exc:
                raise ConfigError(f"{path}: non-numeric row {raw!r}") from exc

        if len(rows) < 2:
            raise ConfigError(f"{path}: need at least two samples")
        data = np.array(sorted(rows))
        xs, ps = data[:, 0], data[:, 1]
        if not np.all(np.isfinite(ps)) or np.any(ps <= 0):
            raise ConfigError("p must be positive")
        if xs[0] < 0 or xs[-1] >= 1 or np.any(np.diff(xs) <= 0):
            raise ConfigError(f"{path}: abscissae must be distinct and lie in [0, 1)")

        spline = interpolate.PchipInterpolator(xs, ps, extrapolate=False)
        x_last, p_last = float(xs[-1]), float(ps[-1])
        decay_last = (1.0 - x_last ** 2) ** 2 * p_last

        def evaluator(x):
            a = np.abs(np.asarray(x, dtype=float))
            inside = np.clip(a, xs[0], x_last)
            tail = decay_last / np.square(1.0 - np.square(np.minimum(a, 1.0 - 1e-15)))
            out = np.where(a > x_last, tail, spline(inside))
            return out if out.ndim else float(out)

        return cls(evaluator=evaluator, kind=NehariKind.CUSTOM, flags=frozenset(flags), label=path.stem)

    def verify_flags(self, eps: float = DEFAULT_EPS, samples: int = 2001) -> Tuple[Flag, ...]:
        """Check the claimed flags on a sampled grid; return the ones that fail.

        ``extremal`` is not grid-checkable and is taken on trust here.
        """

        xs = clustered_grid(eps, samples)
        values = evaluate_on(self, xs)
        half = xs >= 0
        xh, vh = xs[half], values[half]
        failed = []

        if self.has(Flag.POSITIVE) and (not np.all(np.isfinite(values)) or np.any(values <= 0)):
            failed.append(Flag.POSITIVE)
        if self.has(Flag.EVEN):
            mirrored = evaluate_on(self, -xs)
            if np.any(np.abs(mirrored - values) > 1e-12 * np.maximum(1.0, np.abs(values))):
                failed.append(Flag.EVEN)
        if self.has(Flag.DECAY_NONINCREASING):
            decay = np.square(1.0 - np.square(xh)) * vh
            if np.any(np.diff(decay) > 1e-12 * np.maximum(1.0, np.abs(decay[:-1]))):
                failed.append(Flag.DECAY_NONINCREASING)
        if self.has(Flag.MONOTONE_NONDECREASING):
            if np.any(np.diff(vh) < -1e-12 * np.maximum(1.0, np.abs(vh[:-1]))):
                failed.append(Flag.MONOTONE_NONDECREASING)
        return tuple(failed)


def builtin_nehari(kind: Union[NehariKind, str]) -> NehariFunction:
    """Return one of the three classical extremal weights with all flags set."""

    try:
        kind = NehariKind(kind)
    except ValueError as exc:
        raise UnknownKind(f"unknown Nehari kind {kind!r}") from exc
    if kind not in _BUILTIN_EVALUATORS:
        raise UnknownKind(f"{kind.value!r} is not a built-in weight")
    return NehariFunction(evaluator=_BUILTIN_EVALUATORS[kind], kind=kind, flags=_BUILTIN_FLAGS, label=kind.value)


def _check_open_interval(x) -> np.ndarray:
    a = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(a)) or np.any(np.abs(a) >= 1.0):
        raise DomainError("closed forms are defined on (-1, 1) only")
    return a


def _scalar(a: np.ndarray):
    return float(a) if np.ndim(a) == 0 else a


def closed_form_F(kind: Union[NehariKind, str], x):
    """F for the three built-in weights."""

    kind = NehariKind(kind)
    a = _check_open_interval(x)
    if kind is NehariKind.CLASSICAL:
        return _scalar(np.arctanh(a))
    if kind is NehariKind.PI2:
        return _scalar((2.0 / math.pi) * np.tan(0.5 * math.pi * a))
    if kind is NehariKind.POKORNYI:
        return _scalar(0.5 * np.arctanh(a) + 0.5 * a / (1.0 - a * a))
    raise UnknownKind(f"no closed form F for {kind.value!r}")


def closed_form_u0(kind: Union[NehariKind, str], x):
    """The even positive solution of u'' + p u = 0 with u(0)=1 for the built-ins."""

    kind = NehariKind(kind)
    a = _check_open_interval(x)
    if kind is NehariKind.CLASSICAL:
        return _scalar(np.sqrt(1.0 - a * a))
    if kind is NehariKind.PI2:
        return _scalar(np.cos(0.5 * math.pi * a))
    if kind is NehariKind.POKORNYI:
        return _scalar(1.0 - a * a)
    raise UnknownKind(f"no closed form u0 for {kind.value!r}")


def closed_form_G_classical(x):
    """G for (1 - x^2)^-2 in closed form; tends to 1/sqrt(2) at the boundary."""

    a = _check_open_interval(x)
    up = np.power(1.0 + a, SQRT2)
    dn = np.power(1.0 - a, SQRT2)
    return _scalar((up - dn) / (up + dn) / SQRT2)


def closed_form_u_minus_classical(x):
    """The convex solution of u'' - (1 - x^2)^-2 u = 0 with u(0)=1, u'(0)=0."""

    a = _check_open_interval(x)
    ratio = (1.0 + a) / (1.0 - a)
    half = SQRT2 / 2.0
    return _scalar(0.5 * np.sqrt(1.0 - a * a) * (np.power(ratio, half) + np.power(ratio, -half)))


def closed_form_G(kind: Union[NehariKind, str], x):
    """G for the weights that have one: classical and the constant."""

    kind = NehariKind(kind)
    if kind is NehariKind.CLASSICAL:
        return closed_form_G_classical(x)
    a = _check_open_interval(x)
    if kind is NehariKind.PI2:
        return _scalar((2.0 / math.pi) * np.tanh(0.5 * math.pi * a))
    raise UnknownKind(f"no closed form G for {kind.value!r}")


class ProfileKind(str, Enum):
    F = "F_profile"
    G = "G_profile"
    H = "H_profile"


_GL_X, _GL_W = leggauss(8)


@dataclass(frozen=True, eq=False)
class ExtremalProfile:
    """F (or G) = integral from 0 of u^-2 over the grid of an ODE solution.

    ``base`` is the nonvanishing u0 for F (sign +1) or the convex solution for
    G (sign -1); queries between nodes integrate the Hermite interpolant.
    """

    base: OdeProfile
    p: NehariFunction
    kind: ProfileKind
    values: np.ndarray = field(repr=False)
    eps: float = DEFAULT_EPS

    @property
    def sign(self) -> int:
        return self.base.sign

    def _inv_sq(self, x):
        u = self.base.u_at(x)
        return 1.0 / (u * u)

    def F(self, x):
        """Profile value at x (vectorized)."""

        grid = self.base.grid
        a = self.base._check(x)
        idx = np.clip(np.searchsorted(grid, a, side="right") - 1, 0, grid.size - 2)
        left = np.asarray(grid[idx])
        half = np.asarray(0.5 * (a - left))
        pts = left[..., None] + half[..., None] * (_GL_X + 1.0)
        integral = half * (self._inv_sq(pts) @ _GL_W)
        return _scalar(self.values[idx] + integral)

    def dF(self, x):
        return _scalar(self._inv_sq(x))

    def jet(self, x: float) -> Jet3Real:
        """Exact 3-jet of the profile from (u, u') and the equation for u''."""

        u = float(self.base.u_at(x))
        du = float(self.base.du_at(x))
        d2u = float(self.base.d2u_at(x))
        return Jet3Real(
            value=[float(self.F(x))],
            d1=[u ** -2],
            d2=[-2.0 * du * u ** -3],
            d3=[-2.0 * d2u * u ** -3 + 6.0 * du * du * u ** -4],
        )

    def u_plus_independent(self, x):
        """u0 * F: the second solution of u'' + p u = 0 (F profiles only)."""

        if self.kind is not ProfileKind.F:
            raise ConfigError("independent solution is defined for F profiles only")
        return _scalar(np.asarray(self.base.u_at(x)) * np.asarray(self.F(x)))

    def endpoint_value(self) -> float:
        """Boundary limit of the profile at x -> 1.

        Closed forms cover the classical and constant weights; otherwise the
        value at the cut is extended linearly by eps * dF.
        """

        unscaled = self.p.scale == 1.0
        if unscaled and self.p.kind in (NehariKind.CLASSICAL, NehariKind.PI2, NehariKind.POKORNYI):
            if self.kind is ProfileKind.F:
                return math.inf
            if self.kind is ProfileKind.G and self.p.kind is NehariKind.CLASSICAL:
                return 1.0 / SQRT2
            if self.kind is ProfileKind.G and self.p.kind is NehariKind.PI2:
                return (2.0 / math.pi) * math.tanh(0.5 * math.pi)
        x = self.base.hi
        return float(self.F(x)) + (1.0 - x) * float(self.dF(x))

    def to_csv(self, path: Union[str, Path]) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "u", "du", "F", "dF", "sign"])
            for x, u, du, value in zip(self.base.grid, self.base.u, self.base.du, self.values):
                writer.writerow([repr(float(x)), repr(float(u)), repr(float(du)), repr(float(value)), repr(float(1.0 / (u * u))), self.sign])


def _build_profile(base: OdeProfile, p: NehariFunction, kind: ProfileKind, eps: float) -> ExtremalProfile:
    origin = int(np.searchsorted(base.grid, 0.0))
    values = cumulative_gauss_legendre(base.grid, lambda t: base.u_at(t) ** -2, origin)
    values.setflags(write=False)
    return ExtremalProfile(base=base, p=p, kind=kind, values=values, eps=eps)


def _first_crossing(x: np.ndarray, u: np.ndarray) -> Optional[float]:
    """First abscissa where u reaches zero, by linear interpolation."""

    hits = np.nonzero(u <= 0.0)[0]
    if hits.size == 0:
        return None
    k = int(hits[0])
    if k == 0 or u[k] == 0.0:
        return float(x[k])
    x0, x1, u0, u1 = x[k - 1], x[k], u[k - 1], u[k]
    return float(x0 - u0 * (x1 - x0) / (u1 - u0))


def _zero_witness(profile: OdeProfile) -> Optional[Tuple[float, float]]:
    """Nearest zeros of u on each side of the origin, or None if u > 0."""

    x, u = profile.grid, profile.u
    if np.all(u > 0):
        return None
    origin = int(np.searchsorted(x, 0.0))
    right = _first_crossing(x[origin:], u[origin:])
    left = _first_crossing(x[: origin + 1][::-1], u[: origin + 1][::-1])
    if right is None:
        right = -left
    if left is None:
        left = -right
    return (left, right)


def extremal_F(p: NehariFunction, eps: float = DEFAULT_EPS, tol: float = DEFAULT_ODE_TOL) -> ExtremalProfile:
    """F from the nonvanishing solution u0 of u'' + p u = 0, u0(0)=1, u0'(0)=0."""

    base = integrate_linear_ode(p, +1, 1.0, 0.0, eps, tol)
    witness = _zero_witness(base)
    if witness is not None:
        raise DoubleZeroDetected(f"u0 vanishes for {p.name}: p is not disconjugate", witness=witness)
    return _build_profile(base, p, ProfileKind.F, eps)


def extremal_G(p: NehariFunction, eps: float = DEFAULT_EPS, tol: float = DEFAULT_ODE_TOL) -> ExtremalProfile:
    """G from the convex solution of u'' - p u = 0, u(0)=1, u'(0)=0."""

    base = integrate_linear_ode(p, -1, 1.0, 0.0, eps, tol)
    low = float(np.min(base.u))
    if low < 1.0 - 1e-9:
        at = float(base.grid[int(np.argmin(base.u))])
        raise ConvexityViolated(f"convex solution dropped to {low:.12g} at x={at:.6g}")
    return _build_profile(base, p, ProfileKind.G, eps)


def companion_H(
    p: NehariFunction,
    lambda0: float,
    sigma_abs: float,
    eps: float = DEFAULT_EPS,
    tol: float = DEFAULT_ODE_TOL,
) -> ExtremalProfile:
    """Integral of u^-2 for u'' - p u = 0 with u(0)=lambda0^-1/2, u'(0)=sigma_abs*lambda0^-1/2.

    Equals lambda0 G / (1 + sigma_abs G), giving an ODE-side oracle for the
    covering bound.
    """

    if lambda0 <= 0 or sigma_abs < 0:
        raise DomainError("need lambda0 > 0 and sigma_abs >= 0")
    scale = lambda0 ** -0.5
    base = integrate_linear_ode(p, -1, scale, sigma_abs * scale, eps, tol)
    return _build_profile(base, p, ProfileKind.H, eps)


@dataclass(frozen=True)
class DisconjugacyReport:
    ok: bool
    witness: Optional[Tuple[float, float]] = None
    p_label: str = ""
    eps: float = DEFAULT_EPS
    evidence: str = EVIDENCE_LABEL


def disconjugacy_check(p: NehariFunction, eps: float = DEFAULT_EPS, tol: float = DEFAULT_ODE_TOL) -> DisconjugacyReport:
    """Sampled check that u'' + p u = 0 has no solution with two zeros.

    u0 must stay positive, and the solution vanishing at the left cut must
    not vanish again. Results are numerical evidence, not certificates.
    """

    u0 = integrate_linear_ode(p, +1, 1.0, 0.0, eps, tol)
    witness = _zero_witness(u0)
    if witness is not None:
        log.debug("disconjugacy: u0 of %s vanishes near %s", p.name, witness)
        return DisconjugacyReport(ok=False, witness=witness, p_label=p.name, eps=eps)

    lo = -1.0 + eps
    v = integrate_linear_ode(p, +1, 0.0, 1.0, eps, tol, origin=lo)
    second = _first_crossing(v.grid[1:], v.u[1:])
    if second is not None:
        return DisconjugacyReport(ok=False, witness=(lo, second), p_label=p.name, eps=eps)
    return DisconjugacyReport(ok=True, p_label=p.name, eps=eps)


def extremal_scan(
    p: NehariFunction,
    c_max: float = 4.0,
    steps: int = 12,
    eps: float = DEFAULT_EPS,
    tol: float = 1e-9,
) -> float:
    """Largest c in [1, c_max] with c * p passing the disconjugacy check (bisection).

    On the cut domain the answer is resolution-limited: for (1 - x^2)^-2 it
    settles near 1 + (pi / (2 F(1 - eps)))^2 rather than exactly 1.
    """

    if c_max <= 1.0:
        raise ConfigError("c_max must exceed 1")
    if steps < 1:
        raise ConfigError("steps must be positive")

    start = disconjugacy_check(p, eps, tol)
    if not start.ok:
        raise HypothesisFailed(f"{p.name} is not disconjugate on the cut domain", witness=start.witness)
    if disconjugacy_check(p.scaled(c_max), eps, tol).ok:
        return float(c_max)

    lo, hi = 1.0, float(c_max)
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if disconjugacy_check(p.scaled(mid), eps, tol).ok:
            lo = mid
        else:
            hi = mid
    log.debug("extremal scan %s: c* in [%.6g, %.6g]", p.name, lo, hi)
    return lo


@dataclass(frozen=True)
class GrowthReport:
    ok: bool
    first_violation: Optional[float] = None
    min_value: float = 1.0
    evidence: str = EVIDENCE_LABEL


def check_F_growth(profile: ExtremalProfile, slack: float = 1e-8) -> GrowthReport:
    """(1 - x^2) F'(x) >= 1 and nondecreasing on the sampled [0, 1 - eps)."""

    if profile.kind is not ProfileKind.F:
        raise ConfigError("growth check needs an F profile")
    grid = profile.base.grid
    mask = grid >= 0.0
    x = grid[mask]
    u = profile.base.u[mask]
    g = (1.0 - x * x) / (u * u)

    below = np.nonzero(g < 1.0 - 1e-9)[0]
    drops = np.nonzero(np.diff(g) < -slack * np.maximum(1.0, g[:-1]))[0] + 1
    bad = np.union1d(below, drops)
    if bad.size:
        return GrowthReport(ok=False, first_violation=float(x[int(bad[0])]), min_value=float(g.min()))
    return GrowthReport(ok=True, min_value=float(g.min()))


def schwarzian_from_derivative(profile: ExtremalProfile, x: float, h: float = 1e-4) -> float:
    """Schwarzian of the profile by central differences of log F'."""

    def log_dF(t):
        return math.log(float(profile.dF(t)))

    lp, l0, lm = log_dF(x + h), log_dF(x), log_dF(x - h)
    first = (lp - lm) / (2 * h)
    second = (lp - 2 * l0 + lm) / (h * h)
    return second - 0.5 * first * first
