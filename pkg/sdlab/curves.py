# SPDX-FileCopyrightText: 2024-2025 ModelCloud.ai
# SPDX-FileCopyrightText: 2024-2025 qubitium@modelcloud.ai
# SPDX-License-Identifier: Apache-2.0
# Contact: qubitium@modelcloud.ai, x.com/qubitium

"""Curves in R^n given as exact 3-jets: the Ahlfors Schwarzian, its
arclength/curvature split, Moebius postcomposition and the pointwise and
two-point distortion checks."""

import math
from dataclasses import dataclass, field
from operator import attrgetter
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import optimize

from .errors import ConfigError, DegenerateTangent, HypothesisFailed, InversionSingularity
from .log import LabLog
from .nehari import ExtremalProfile, NehariFunction, ProfileKind, extremal_F
from .numerics import DEFAULT_EPS, Jet3Real, clustered_grid, evaluate_on
from .progress import sweep
from .report import DistortionReport, HypothesisEcho, sample

log = LabLog.shared()

TANGENT_FLOOR = 1e-12
NORMALIZATION_TOL = 1e-9
DEFAULT_NODES = 2001

# jets travel as (value, d1, d2, d3) tuples of float arrays
Jet4 = Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]


@dataclass(frozen=True)
class CurveJet:
    """A regular curve phi: (-1, 1) -> R^dim evaluated as exact 3-jets."""

    dim: int
    evaluator: Callable[[float], Jet3Real] = field(repr=False)
    label: str = ""

    def eval(self, x: float) -> Jet3Real:
        jet = self.evaluator(float(x))
        if jet.dim != self.dim:
            raise ValueError(f"curve {self.label!r} returned a {jet.dim}-jet, expected {self.dim}")
        return jet

    def point(self, x: float) -> np.ndarray:
        return self.eval(x).value

    def speed(self, x: float) -> float:
        return float(np.linalg.norm(self.eval(x).d1))


def _unpack(jet: Jet3Real) -> Jet4:
    return jet.value, jet.d1, jet.d2, jet.d3


def _pack(parts: Sequence[np.ndarray]) -> Jet3Real:
    return Jet3Real(*parts)


def _regular(jet: Jet3Real, x: float) -> float:
    v2 = float(jet.d1 @ jet.d1)
    if math.sqrt(v2) < TANGENT_FLOOR:
        raise DegenerateTangent(f"tangent vanishes at x={x:.12g}")
    return v2


def s1_from_jet(jet: Jet3Real, x: float = math.nan) -> float:
    """Ahlfors Schwarzian of a curve from its 3-jet at one parameter."""

    v2 = _regular(jet, x)
    d1, d2, d3 = jet.d1, jet.d2, jet.d3
    a = float(d1 @ d2)
    return float(d1 @ d3) / v2 - 3.0 * a * a / (v2 * v2) + 1.5 * float(d2 @ d2) / v2


def ahlfors_s1(curve: CurveJet, x: float) -> float:
    return s1_from_jet(curve.eval(x), x)


@dataclass(frozen=True)
class ArclengthDecomposition:
    v: float
    Ss: float
    k: float
    s1_recombined: float


def decompose_jet(jet: Jet3Real, x: float = math.nan) -> ArclengthDecomposition:
    v2 = _regular(jet, x)
    v = math.sqrt(v2)
    d1, d2, d3 = jet.d1, jet.d2, jet.d3
    a = float(d1 @ d2)
    dv = a / v
    d2v = (float(d2 @ d2) + float(d1 @ d3)) / v - a * a / (v2 * v)
    ratio = dv / v
    Ss = d2v / v - 1.5 * ratio * ratio
    normal = d2 - (a / v2) * d1
    k = float(np.linalg.norm(normal)) / v2
    return ArclengthDecomposition(v=v, Ss=Ss, k=k, s1_recombined=Ss + 0.5 * v2 * k * k)


def arclength_decomposition(curve: CurveJet, x: float) -> ArclengthDecomposition:
    """Speed, Schwarzian of arclength and curvature; S1 = Ss + v^2 k^2 / 2."""

    return decompose_jet(curve.eval(x), x)


# -- jet calculus for the Moebius factors ---------------------------------


def _scalar_inverse(r: Sequence[float]) -> Tuple[float, float, float, float]:
    r0, r1, r2, r3 = r
    i0 = 1.0 / r0
    return (
        i0,
        -r1 * i0 * i0,
        -r2 * i0 ** 2 + 2.0 * r1 * r1 * i0 ** 3,
        -r3 * i0 ** 2 + 6.0 * r1 * r2 * i0 ** 3 - 6.0 * r1 ** 3 * i0 ** 4,
    )


def _times_scalar(w: Jet4, s: Sequence[float]) -> Jet4:
    """Leibniz rule for vector jet times scalar jet."""

    w0, w1, w2, w3 = w
    s0, s1, s2, s3 = s
    return (
        w0 * s0,
        w1 * s0 + w0 * s1,
        w2 * s0 + 2.0 * w1 * s1 + w0 * s2,
        w3 * s0 + 3.0 * w2 * s1 + 3.0 * w1 * s2 + w0 * s3,
    )


def _norm_sq(w: Jet4) -> Tuple[float, float, float, float]:
    w0, w1, w2, w3 = w
    return (
        float(w0 @ w0),
        2.0 * float(w0 @ w1),
        2.0 * (float(w1 @ w1) + float(w0 @ w2)),
        2.0 * (3.0 * float(w1 @ w2) + float(w0 @ w3)),
    )


@dataclass(frozen=True, eq=False)
class Translation:
    vector: np.ndarray

    def apply(self, y: np.ndarray) -> np.ndarray:
        return y + self.vector

    def push(self, w: Jet4, x: float) -> Jet4:
        return (w[0] + self.vector, w[1], w[2], w[3])


@dataclass(frozen=True, eq=False)
class Rotation:
    matrix: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.matrix, dtype=float)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise ConfigError("rotation must be a square matrix")
        if np.max(np.abs(q.T @ q - np.eye(q.shape[0]))) > 1e-12:
            raise ConfigError("rotation matrix is not orthogonal")
        object.__setattr__(self, "matrix", q)

    def apply(self, y: np.ndarray) -> np.ndarray:
        return self.matrix @ y

    def push(self, w: Jet4, x: float) -> Jet4:
        return tuple(self.matrix @ part for part in w)  # type: ignore[return-value]


@dataclass(frozen=True)
class Scaling:
    factor: float

    def __post_init__(self):
        if not self.factor > 0:
            raise ConfigError(f"scaling must be positive, got {self.factor}")

    def apply(self, y: np.ndarray) -> np.ndarray:
        return self.factor * y

    def push(self, w: Jet4, x: float) -> Jet4:
        return tuple(self.factor * part for part in w)  # type: ignore[return-value]


@dataclass(frozen=True, eq=False)
class Inversion:
    """y -> c + (y - c) / |y - c|^2."""

    center: np.ndarray

    def apply(self, y: np.ndarray) -> np.ndarray:
        w = y - self.center
        r = float(w @ w)
        if r < 1e-24:
            raise InversionSingularity("point sits on the inversion center", x=math.nan)
        return self.center + w / r

    def push(self, w: Jet4, x: float) -> Jet4:
        shifted = (w[0] - self.center, w[1], w[2], w[3])
        r = _norm_sq(shifted)
        if r[0] < 1e-24:
            raise InversionSingularity(f"curve passes through the inversion center at x={x:.12g}", x=x)
        out = _times_scalar(shifted, _scalar_inverse(r))
        return (out[0] + self.center, out[1], out[2], out[3])


@dataclass(frozen=True, eq=False)
class SpecialConformal:
    """y -> (y - b|y|^2) / (1 - 2<b, y> + |b|^2 |y|^2); fixes 0 with identity derivative."""

    b: np.ndarray

    def _denominator(self, y: np.ndarray) -> float:
        bb = float(self.b @ self.b)
        return 1.0 - 2.0 * float(self.b @ y) + bb * float(y @ y)

    def apply(self, y: np.ndarray) -> np.ndarray:
        d = self._denominator(y)
        if abs(d) < 1e-24:
            raise InversionSingularity("point maps to infinity", x=math.nan)
        return (y - self.b * float(y @ y)) / d

    def push(self, w: Jet4, x: float) -> Jet4:
        r = _norm_sq(w)
        bb = float(self.b @ self.b)
        num = tuple(w[k] - self.b * r[k] for k in range(4))
        den = [bb * r[k] - 2.0 * float(self.b @ w[k]) for k in range(4)]
        den[0] += 1.0
        if abs(den[0]) < 1e-24:
            raise InversionSingularity(f"curve hits the pole of the special conformal map at x={x:.12g}", x=x)
        return _times_scalar(num, _scalar_inverse(den))  # type: ignore[arg-type]


Factor = Union[Translation, Rotation, Scaling, Inversion, SpecialConformal]


@dataclass(frozen=True)
class MobiusRn:
    """A Moebius transformation of R^n as a sequence of elementary factors (applied in order)."""

    factors: Tuple[Factor, ...] = ()

    @classmethod
    def identity(cls) -> "MobiusRn":
        return cls(())

    def then(self, factor: Factor) -> "MobiusRn":
        return MobiusRn(self.factors + (factor,))

    def compose(self, other: "MobiusRn") -> "MobiusRn":
        """``other`` after ``self``."""

        return MobiusRn(self.factors + other.factors)

    def apply(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        for factor in self.factors:
            y = factor.apply(y)
        return y

    def push(self, jet: Jet3Real, x: float) -> Jet3Real:
        parts = _unpack(jet)
        for factor in self.factors:
            parts = factor.push(parts, x)
        return _pack(parts)

    @classmethod
    def random(cls, dim: int, rng: np.random.Generator, *, inversion_distance: Tuple[float, float] = (20.0, 30.0)) -> "MobiusRn":
        """A random composition of every factor kind.

        Poles stay clear of curves bounded by 3: |b| <= 0.1 and the inversion
        center lies beyond ``inversion_distance[0]``.
        """

        q, r = np.linalg.qr(rng.normal(size=(dim, dim)))
        q = q * np.sign(np.diag(r))
        direction = rng.normal(size=dim)
        direction /= np.linalg.norm(direction)
        center = direction * rng.uniform(*inversion_distance)
        b = rng.normal(size=dim)
        b *= rng.uniform(0.0, 0.1) / np.linalg.norm(b)
        return cls(
            (
                SpecialConformal(b),
                Translation(rng.uniform(-0.5, 0.5, size=dim)),
                Rotation(q),
                Scaling(float(rng.uniform(0.5, 2.0))),
                Inversion(center),
            )
        )


def mobius_postcompose(curve: CurveJet, T: MobiusRn) -> CurveJet:
    """The curve T o phi with jets pushed through each factor by the chain rule."""

    def evaluator(x: float) -> Jet3Real:
        return T.push(curve.eval(x), x)

    return CurveJet(dim=curve.dim, evaluator=evaluator, label=f"T({curve.label})")


@dataclass(frozen=True)
class NormalizedCurve:
    curve: CurveJet
    T: MobiusRn


def normalize_curve(curve: CurveJet) -> NormalizedCurve:
    """Postcompose so that psi(0)=0, |psi'(0)|=1 and <psi'(0), psi''(0)>=0."""

    jet = curve.eval(0.0)
    speed = math.sqrt(_regular(jet, 0.0))
    T = MobiusRn((Translation(-jet.value), Scaling(1.0 / speed)))
    mid = T.push(jet, 0.0)
    tangent_dot = float(mid.d1 @ mid.d2)
    if abs(tangent_dot) > 0.0:
        T = T.then(SpecialConformal(-(tangent_dot / 2.0) * mid.d1))
    return NormalizedCurve(curve=mobius_postcompose(curve, T), T=T)


def is_normalized(curve: CurveJet, tol: float = NORMALIZATION_TOL) -> bool:
    jet = curve.eval(0.0)
    return (
        float(np.linalg.norm(jet.value)) <= tol
        and abs(float(np.linalg.norm(jet.d1)) - 1.0) <= tol
        and abs(float(jet.d1 @ jet.d2)) <= tol
    )


# -- built-in curves -------------------------------------------------------


def _padded(values: Sequence[float], dim: int) -> np.ndarray:
    out = np.zeros(dim)
    out[: len(values)] = values
    return out


def _scalar_curve(fn: Callable[[float], Tuple[float, float, float, float]], dim: int, label: str) -> CurveJet:
    """f(x) * e1 in R^dim from a scalar 3-jet."""

    def evaluator(x: float) -> Jet3Real:
        return Jet3Real(*(_padded([c], dim) for c in fn(x)))

    return CurveJet(dim=dim, evaluator=evaluator, label=label)


def line(a: Sequence[float] = (0.0, 0.0), v: Sequence[float] = (1.0, 0.0)) -> CurveJet:
    a = np.asarray(a, dtype=float)
    v = np.asarray(v, dtype=float)
    if a.shape != v.shape:
        raise ConfigError("line base point and direction must share a dimension")
    if np.linalg.norm(v) == 0:
        raise ConfigError("line direction must be nonzero")
    zero = np.zeros_like(v)
    return CurveJet(dim=v.size, evaluator=lambda x: Jet3Real(a + x * v, v, zero, zero), label="line")


def line_F(profile: ExtremalProfile, dim: int = 2) -> CurveJet:
    """F(x) e1: the extremal curve, equality case of the distortion bounds."""

    def fn(x):
        jet = profile.jet(x)
        return jet.value[0], jet.d1[0], jet.d2[0], jet.d3[0]

    return _scalar_curve(fn, dim, f"line_F[{profile.p.name}]")


def tanh_curve(dim: int = 2) -> CurveJet:
    def fn(x):
        t = math.tanh(x)
        s = 1.0 - t * t
        return t, s, -2.0 * t * s, s * (6.0 * t * t - 2.0)

    return _scalar_curve(fn, dim, "tanh")


def exp_curve(dim: int = 2) -> CurveJet:
    def fn(x):
        e = math.exp(x)
        return e, e, e, e

    return _scalar_curve(fn, dim, "exp")


def sine3(dim: int = 2) -> CurveJet:
    """(sin 3 pi x, 0): folds back on itself."""

    w = 3.0 * math.pi

    def fn(x):
        s, c = math.sin(w * x), math.cos(w * x)
        return s, w * c, -w * w * s, -(w ** 3) * c

    return _scalar_curve(fn, dim, "sine3")


def circle(radius: float = 1.0, center: Sequence[float] = (0.0, 0.0)) -> CurveJet:
    """Unit-speed circle of the given radius."""

    if radius <= 0:
        raise ConfigError("radius must be positive")
    c = np.asarray(center, dtype=float)

    def evaluator(x: float) -> Jet3Real:
        t = x / radius
        cs, sn = math.cos(t), math.sin(t)
        return Jet3Real(
            c + radius * np.array([cs, sn]),
            np.array([-sn, cs]),
            np.array([-cs, -sn]) / radius,
            np.array([sn, -cs]) / radius ** 2,
        )

    return CurveJet(dim=2, evaluator=evaluator, label="circle")


def helix(a: float = 1.0, b: float = 0.5) -> CurveJet:
    def evaluator(x: float) -> Jet3Real:
        cs, sn = math.cos(x), math.sin(x)
        return Jet3Real(
            np.array([a * cs, a * sn, b * x]),
            np.array([-a * sn, a * cs, b]),
            np.array([-a * cs, -a * sn, 0.0]),
            np.array([a * sn, -a * cs, 0.0]),
        )

    return CurveJet(dim=3, evaluator=evaluator, label="helix")


CURVE_NAMES = ("line", "line_F", "tanh", "circle", "sine3", "exp", "helix")


def builtin_curve(name: str, p: Optional[NehariFunction] = None, *, eps: float = DEFAULT_EPS) -> CurveJet:
    """Catalog lookup; ``line_F`` needs the weight p."""

    if name == "line":
        return line()
    if name == "line_F":
        if p is None:
            raise ConfigError("line_F needs a Nehari weight")
        return line_F(extremal_F(p, eps))
    if name == "tanh":
        return tanh_curve()
    if name == "circle":
        return circle()
    if name == "sine3":
        return sine3()
    if name == "exp":
        return exp_curve()
    if name == "helix":
        return helix()
    raise ConfigError(f"unknown curve {name!r}; expected one of {', '.join(CURVE_NAMES)}")


# -- verification ----------------------------------------------------------


def hypothesis_scan(curve: CurveJet, p: NehariFunction, grid: Sequence[float]) -> HypothesisEcho:
    """Sampled check of S1 phi <= 2p plus a guard against tangent reversals between nodes."""

    grid = np.asarray(grid, dtype=float)
    p_values = evaluate_on(p, grid)
    worst, witness, detail = math.inf, None, ""
    prev_tangent = None

    for x, pv in zip(grid, p_values):
        try:
            jet = curve.eval(x)
            s1 = s1_from_jet(jet, x)
        except DegenerateTangent:
            return HypothesisEcho(p_kind=p.name, ok=False, nodes=grid.size, worst_margin=-math.inf, witness=float(x), detail="degenerate tangent")
        margin = 2.0 * pv - s1
        if margin < worst:
            worst, witness = margin, float(x)
        # rounding in S1 grows like |phi''/phi'|^2
        bend = float(jet.d2 @ jet.d2) / float(jet.d1 @ jet.d1)
        if margin < -1e-9 * (1.0 + 2.0 * pv + bend):
            return HypothesisEcho(p_kind=p.name, ok=False, nodes=grid.size, worst_margin=margin, witness=float(x), detail="S1 exceeds 2p")
        if prev_tangent is not None and float(prev_tangent @ jet.d1) < 0.0:
            return HypothesisEcho(p_kind=p.name, ok=False, nodes=grid.size, worst_margin=margin, witness=float(x), detail="tangent reverses between nodes")
        prev_tangent = jet.d1

    return HypothesisEcho(p_kind=p.name, ok=True, nodes=grid.size, worst_margin=worst, witness=witness, detail=detail)


def _require(echo: HypothesisEcho) -> None:
    if not echo.ok:
        raise HypothesisFailed(f"hypothesis S1 <= 2p fails: {echo.detail} at x={echo.witness}", witness=echo.witness)


def _profile_for(p: NehariFunction, profile: Optional[ExtremalProfile], eps: float) -> ExtremalProfile:
    if profile is None:
        return extremal_F(p, eps)
    if profile.kind is not ProfileKind.F:
        raise ConfigError("distortion checks need an F profile")
    return profile


def _default_grid(profile: ExtremalProfile, nodes: int) -> np.ndarray:
    return clustered_grid(profile.eps, nodes)


def verify_theorem1(
    curve: CurveJet,
    p: NehariFunction,
    grid: Optional[Sequence[float]] = None,
    *,
    profile: Optional[ExtremalProfile] = None,
    eps: float = DEFAULT_EPS,
    nodes: int = DEFAULT_NODES,
    workers: Optional[int] = None,
) -> DistortionReport:
    """Pointwise bounds |phi'| <= F' and |phi'|/(1+|phi|^2) <= F'/(1+F^2) for a normalized curve."""

    profile = _profile_for(p, profile, eps)
    if not is_normalized(curve):
        raise ConfigError("curve is not normalized; run normalize_curve first")
    grid = _default_grid(profile, nodes) if grid is None else np.asarray(grid, dtype=float)
    echo = hypothesis_scan(curve, p, grid)
    _require(echo)

    def check(x: float):
        jet = curve.eval(x)
        speed = float(np.linalg.norm(jet.d1))
        size2 = float(jet.value @ jet.value)
        F, dF = float(profile.F(x)), float(profile.dF(x))
        return (
            sample(float(x), dF, speed, part="a"),
            sample(float(x), dF / (1.0 + F * F), speed / (1.0 + size2), part="b"),
        )

    rows = sweep(check, list(grid), title="theorem 1", workers=workers)
    samples = [s for pair in rows for s in pair]
    return DistortionReport(theorem="1", p_kind=p.name, samples=tuple(samples), hypothesis=echo)


def theorem2_rhs(profile: ExtremalProfile, x1: float, x2: float) -> float:
    """|F(x1) - F(x2)| / sqrt(F'(x1) F'(x2))."""

    F1, F2 = float(profile.F(x1)), float(profile.F(x2))
    return abs(F1 - F2) / math.sqrt(float(profile.dF(x1)) * float(profile.dF(x2)))


def theorem2_rhs_pi2(x1: float, x2: float) -> float:
    return (2.0 / math.pi) * math.sin(0.5 * math.pi * abs(x1 - x2))


def theorem2_rhs_classical(x1: float, x2: float) -> float:
    d = math.atanh(abs((x1 - x2) / (1.0 - x1 * x2)))
    return math.sqrt((1.0 - x1 * x1) * (1.0 - x2 * x2)) * d


def random_pairs(rng: np.random.Generator, count: int, bound: float) -> List[Tuple[float, float]]:
    raw = rng.uniform(-bound, bound, size=(count, 2))
    return [(float(a), float(b)) for a, b in raw]


def verify_theorem2(
    curve: CurveJet,
    p: NehariFunction,
    pairs: Sequence[Tuple[float, float]],
    *,
    profile: Optional[ExtremalProfile] = None,
    eps: float = DEFAULT_EPS,
    nodes: int = DEFAULT_NODES,
    workers: Optional[int] = None,
) -> DistortionReport:
    """Two-point bound; equality means phi(x1), phi(x2) lie on a circle arc traced like F."""

    profile = _profile_for(p, profile, eps)
    echo = hypothesis_scan(curve, p, _default_grid(profile, nodes))
    _require(echo)

    def check(pair: Tuple[float, float]):
        x1, x2 = pair
        j1, j2 = curve.eval(x1), curve.eval(x2)
        s1 = float(np.linalg.norm(j1.d1))
        s2 = float(np.linalg.norm(j2.d1))
        if min(s1, s2) < TANGENT_FLOOR:
            raise DegenerateTangent(f"tangent vanishes in pair {pair}")
        lhs = float(np.linalg.norm(j1.value - j2.value)) / math.sqrt(s1 * s2)
        return sample((float(x1), float(x2)), lhs, theorem2_rhs(profile, x1, x2))

    samples = sweep(check, list(pairs), title="theorem 2", workers=workers, margin=attrgetter("margin"))
    return DistortionReport(theorem="2", p_kind=p.name, samples=tuple(samples), hypothesis=echo)


def verify_inequality4(
    curve: CurveJet,
    p: NehariFunction,
    grid: Optional[Sequence[float]] = None,
    *,
    profile: Optional[ExtremalProfile] = None,
    eps: float = DEFAULT_EPS,
    nodes: int = DEFAULT_NODES,
) -> DistortionReport:
    """|phi(x)| / sqrt|phi'(x)| >= |F(x)| / sqrt F'(x) for a normalized curve (Sturm comparison)."""

    profile = _profile_for(p, profile, eps)
    if not is_normalized(curve):
        raise ConfigError("curve is not normalized; run normalize_curve first")
    grid = _default_grid(profile, nodes) if grid is None else np.asarray(grid, dtype=float)
    echo = hypothesis_scan(curve, p, grid)
    _require(echo)

    samples = []
    for x in grid:
        jet = curve.eval(x)
        lhs = float(np.linalg.norm(jet.value)) / math.sqrt(float(np.linalg.norm(jet.d1)))
        rhs = abs(float(profile.F(x))) / math.sqrt(float(profile.dF(x)))
        samples.append(sample(float(x), lhs, rhs))
    return DistortionReport(theorem="inequality4", p_kind=p.name, samples=tuple(samples), hypothesis=echo)


def injectivity_probe(curve: CurveJet, m: int = 500, *, eps: float = DEFAULT_EPS) -> Optional[Tuple[float, float]]:
    """Look for x1 != x2 with phi(x1) = phi(x2).

    Segments of an m-point polyline whose midpoints are close are refined
    with a bounded least-squares solve; the first confirmed pair is returned.
    """

    if m < 2:
        raise ConfigError("injectivity probe needs at least two samples")
    xs = np.linspace(-1.0 + eps, 1.0 - eps, m)
    pts = np.array([curve.point(x) for x in xs])
    if m < 4:
        return None

    lengths = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    mids = 0.5 * (pts[:-1] + pts[1:])
    scale = 1.0 + float(np.max(np.linalg.norm(pts, axis=1)))
    dist = np.linalg.norm(mids[:, None, :] - mids[None, :, :], axis=-1)
    reach = 0.75 * (lengths[:, None] + lengths[None, :]) + 1e-12 * scale
    i_idx, j_idx = np.nonzero(np.triu(dist <= reach, k=2))

    def residual(v):
        return curve.point(v[0]) - curve.point(v[1])

    def jacobian(v):
        return np.column_stack([curve.eval(v[0]).d1, -curve.eval(v[1]).d1])

    for i, j in zip(i_idx, j_idx):
        lo = [xs[i], xs[j]]
        hi = [xs[i + 1], xs[j + 1]]
        start = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])]
        fit = optimize.least_squares(residual, start, jac=jacobian, bounds=(lo, hi), method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15)
        x1, x2 = float(fit.x[0]), float(fit.x[1])
        gap = float(np.linalg.norm(residual(fit.x)))
        if gap < 1e-9 * (1.0 + float(np.linalg.norm(curve.point(x1)))) and abs(x1 - x2) > 1e-6:
            log.debug("collision on %s: x1=%.9g x2=%.9g gap=%.2e", curve.label, x1, x2, gap)
            return (x1, x2)
    return None
