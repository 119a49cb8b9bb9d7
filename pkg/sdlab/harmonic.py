# SPDX-FileCopyrightText: 2024-2025 ModelCloud.ai
# SPDX-FileCopyrightText: 2024-2025 qubitium@modelcloud.ai
# SPDX-License-Identifier: Apache-2.0
# Contact: qubitium@modelcloud.ai, x.com/qubitium

"""Harmonic maps f = h + conj(g) with dilatation q^2: conformal factor,
harmonic Schwarzian, Weierstrass-Enneper lift, curvature and the two-point
distortion check for the lift."""

import cmath
import json
import math
from dataclasses import dataclass, field
from operator import attrgetter
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import (
    ConfigError,
    DomainError,
    HypothesisFailed,
    NonSmoothSigma,
    PathOutsideDisk,
    PositiveCurvature,
    UnknownKind,
    ZeroConformalFactor,
)
from .log import LabLog
from .nehari import ExtremalProfile, Flag, NehariFunction, extremal_F, extremal_scan
from .numerics import DEFAULT_EPS, Jet3Complex, Jet3Real, quadrature
from .progress import sweep
from .report import DistortionReport, HypothesisEcho, sample

log = LabLog.shared()

SQRT2 = math.sqrt(2.0)
LIFT_TOL = 1e-12
CURVATURE_SLACK = 1e-9
# |g'| below this (relative to lambda) counts as a zero of g'
_ZERO_DERIVATIVE = 1e-15

AnalyticJet = Callable[[complex], Jet3Complex]


@dataclass(frozen=True)
class HarmonicMap:
    """f = h + conj(g) on the unit disk with g' = q^2 h'.

    ``q_jet`` returns (q, q', q'') in a Jet3Complex whose d3 is unused.
    Evaluators accept complex scalars or numpy arrays.
    """

    h_jet: AnalyticJet = field(repr=False)
    g_jet: AnalyticJet = field(repr=False)
    q_jet: AnalyticJet = field(repr=False)
    label: str = ""

    def jets(self, z) -> Tuple[Jet3Complex, Jet3Complex, Jet3Complex]:
        return self.h_jet(z), self.g_jet(z), self.q_jet(z)

    def value(self, z) -> complex:
        h, g, _ = self.jets(z)
        return h.value + np.conj(g.value)

    def check(self, points: Sequence[complex]) -> None:
        """Validate lambda > 0, q^2 h' = g' and g(0) = 0 at sample points."""

        g0 = self.g_jet(0j).value
        if abs(g0) > 1e-12:
            raise ConfigError(f"{self.label}: decomposition is not canonical, g(0) = {g0}")
        for z in points:
            h, g, q = self.jets(complex(z))
            lam = abs(h.d1) + abs(g.d1)
            if not lam > 0:
                raise ZeroConformalFactor(f"{self.label}: lambda vanishes at z={z}")
            if abs(q.value ** 2 * h.d1 - g.d1) > 1e-9 * lam * lam:
                raise ConfigError(f"{self.label}: q^2 h' differs from g' at z={z}")


def _const_jet(value: complex) -> AnalyticJet:
    return lambda z: Jet3Complex(value, 0j, 0j, 0j)


def _identity_jet(z) -> Jet3Complex:
    return Jet3Complex(z, 1.0, 0.0, 0.0)


def identity_map() -> HarmonicMap:
    return HarmonicMap(h_jet=_identity_jet, g_jet=_const_jet(0j), q_jet=_const_jet(0j), label="identity")


def analytic_map(h_jet: AnalyticJet, label: str) -> HarmonicMap:
    return HarmonicMap(h_jet=h_jet, g_jet=_const_jet(0j), q_jet=_const_jet(0j), label=label)


def _log_mobius_jet(z) -> Jet3Complex:
    s = 1.0 - z * z
    return Jet3Complex(np.arctanh(z), 1.0 / s, 2.0 * z / s ** 2, (2.0 + 6.0 * z * z) / s ** 3)


def log_mobius() -> HarmonicMap:
    """h(z) = (1/2) log((1+z)/(1-z)): the extremal F of (1-x^2)^-2 as an analytic map."""

    return analytic_map(_log_mobius_jet, "log_mobius")


def enneper_eps(eps: float = 1.0 / SQRT2) -> HarmonicMap:
    """f = z + conj(eps^2 z^3 / 3), dilatation (eps z)^2."""

    e2 = eps * eps
    return HarmonicMap(
        h_jet=_identity_jet,
        g_jet=lambda z: Jet3Complex(e2 * z ** 3 / 3.0, e2 * z * z, 2.0 * e2 * z, 2.0 * e2),
        q_jet=lambda z: Jet3Complex(eps * z, eps, 0.0),
        label=f"enneper_eps[{eps:.6g}]",
    )


def _gstar_jet(z) -> Jet3Complex:
    w = (1.0 - z) / (1.0 + z)
    d1 = np.power(w, SQRT2 - 1.0) / (1.0 + z) ** 2
    e1 = -2.0 * (SQRT2 - 1.0) / (1.0 - z * z) - 2.0 / (1.0 + z)
    e2 = -4.0 * (SQRT2 - 1.0) * z / (1.0 - z * z) ** 2 + 2.0 / (1.0 + z) ** 2
    value = (1.0 - np.power(w, SQRT2)) / (2.0 * SQRT2)
    return Jet3Complex(value, d1, d1 * e1, d1 * (e2 + e1 * e1))


def gstar() -> HarmonicMap:
    """G*(z) = (1 - ((1-z)/(1+z))^sqrt2) / (2 sqrt2); a2 = -sqrt2, covering radius sqrt2/4."""

    return analytic_map(_gstar_jet, "gstar")


def _koebe_jet(z) -> Jet3Complex:
    m = 1.0 - z
    return Jet3Complex(z / m ** 2, (1.0 + z) / m ** 3, (4.0 + 2.0 * z) / m ** 4, (18.0 + 6.0 * z) / m ** 5)


def koebe() -> HarmonicMap:
    return analytic_map(_koebe_jet, "koebe")


def mobius(c: complex = 0.5) -> HarmonicMap:
    """z / (1 + c z), normalized at the origin; pole outside the disk for |c| < 1."""

    if abs(c) >= 1:
        raise ConfigError("mobius pole must stay outside the closed disk")

    def jet(z):
        m = 1.0 + c * z
        return Jet3Complex(z / m, 1.0 / m ** 2, -2.0 * c / m ** 3, 6.0 * c * c / m ** 4)

    return analytic_map(jet, "mobius")


def _poly_jet(coeffs: np.ndarray, order: int = 3) -> AnalyticJet:
    derivs = [coeffs]
    for _ in range(order):
        derivs.append(P.polyder(derivs[-1]) if derivs[-1].size > 1 else np.zeros(1, dtype=complex))

    def jet(z):
        vals = [P.polyval(z, c) for c in derivs]
        return Jet3Complex(*vals[:4]) if order >= 3 else Jet3Complex(vals[0], vals[1], vals[2])

    return jet


def _coeffs(raw, name: str) -> np.ndarray:
    try:
        out = np.array([complex(float(re), float(im)) for re, im in raw], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name} coefficients must be [re, im] pairs") from exc
    return out if out.size else np.zeros(1, dtype=complex)


def polynomial_map(spec: dict, label: str = "polynomial") -> HarmonicMap:
    """Polynomial h, g (and q) from ``{"h": [[re, im], ...], "g": ..., "q": ...}``, degree 0 first.

    A constant term in g is moved into h to make the decomposition canonical.
    """

    if "h" not in spec:
        raise ConfigError("map spec needs 'h' coefficients")
    h = _coeffs(spec["h"], "h")
    g = _coeffs(spec.get("g", []), "g")
    if g[0] != 0:
        h = h.copy()
        h[0] += np.conj(g[0])
        g = g.copy()
        g[0] = 0
    g_prime = P.polyder(g) if g.size > 1 else np.zeros(1, dtype=complex)
    nonconstant = bool(np.any(g_prime != 0))
    if "q" in spec:
        q = _coeffs(spec["q"], "q")
    elif nonconstant:
        raise ConfigError("map spec with non-constant g needs 'q' with q^2 h' = g'")
    else:
        q = np.zeros(1, dtype=complex)

    h_prime = P.polyder(h) if h.size > 1 else np.zeros(1, dtype=complex)
    lhs = P.polymul(P.polymul(q, q), h_prime)
    size = max(lhs.size, g_prime.size)
    diff = np.zeros(size, dtype=complex)
    diff[: lhs.size] += lhs
    diff[: g_prime.size] -= g_prime
    scale = 1.0 + float(np.max(np.abs(np.concatenate([h, g]))))
    if np.max(np.abs(diff)) > 1e-9 * scale:
        raise ConfigError("q^2 h' does not match g' in map spec")

    return HarmonicMap(h_jet=_poly_jet(h), g_jet=_poly_jet(g), q_jet=_poly_jet(q, order=2), label=label)


def load_map_spec(path: Union[str, Path]) -> HarmonicMap:
    path = Path(path)
    try:
        spec = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read map spec {path}: {exc}") from exc
    if not isinstance(spec, dict):
        raise ConfigError("map spec must be a JSON object")
    return polynomial_map(spec, label=path.stem)


MAP_NAMES = ("identity", "log_mobius", "enneper_eps", "gstar", "koebe", "mobius")


def builtin_map(name: str, *, enneper: float = 1.0 / SQRT2) -> HarmonicMap:
    if name == "identity":
        return identity_map()
    if name == "log_mobius":
        return log_mobius()
    if name == "enneper_eps":
        return enneper_eps(enneper)
    if name == "gstar":
        return gstar()
    if name == "koebe":
        return koebe()
    if name == "mobius":
        return mobius()
    raise UnknownKind(f"unknown map {name!r}; expected one of {', '.join(MAP_NAMES)}")


# -- conformal data --------------------------------------------------------


@dataclass(frozen=True)
class ConformalData:
    lambda_: float
    sigma_z: complex


def _in_disk(z) -> None:
    if np.any(np.abs(z) >= 1.0):
        raise DomainError(f"point {z} is outside the unit disk")


def _abs_term(d1: complex, d2: complex, lam: float, which: str, z: complex) -> complex:
    """d2 conj(d1) / (2|d1|), continued by 0 at a zero where d2 also vanishes."""

    if abs(d1) <= _ZERO_DERIVATIVE * lam:
        if abs(d2) <= _ZERO_DERIVATIVE * lam:
            return 0j
        raise NonSmoothSigma(f"|{which}'| is not differentiable at z={z}: {which}' = 0 but {which}'' != 0")
    return d2 * np.conj(d1) / (2.0 * abs(d1))


def conformal_factor(f: HarmonicMap, z: complex) -> ConformalData:
    """lambda = |h'| + |g'| and sigma_z of log(lambda) from the modulus form."""

    z = complex(z)
    _in_disk(z)
    h, g, _ = f.jets(z)
    lam = abs(h.d1) + abs(g.d1)
    if not lam > 0:
        raise ZeroConformalFactor(f"lambda vanishes at z={z}")
    s = _abs_term(h.d1, h.d2, lam, "h", z) + _abs_term(g.d1, g.d2, lam, "g", z)
    return ConformalData(lambda_=float(lam), sigma_z=complex(s / lam))


@dataclass(frozen=True)
class _Sigma:
    lam: float
    s_z: complex
    s_zz: complex
    s_zzbar: float


def _sigma(f: HarmonicMap, z: complex) -> _Sigma:
    """Wirtinger derivatives of sigma = log|h'| + log(1 + |q|^2)."""

    h, _, q = f.jets(z)
    if h.d1 == 0:
        raise ZeroConformalFactor(f"h' vanishes at z={z}")
    n = 1.0 + abs(q.value) ** 2
    qb = np.conj(q.value)
    r = h.d2 / h.d1
    s_z = 0.5 * r + qb * q.d1 / n
    s_zz = 0.5 * (h.d3 / h.d1 - r * r) + qb * q.d2 / n - (qb * q.d1) ** 2 / (n * n)
    return _Sigma(lam=abs(h.d1) * n, s_z=complex(s_z), s_zz=complex(s_zz), s_zzbar=abs(q.d1) ** 2 / (n * n))


def sigma_z_q(f: HarmonicMap, z: complex) -> complex:
    """sigma_z from the dilatation form h''/(2h') + conj(q) q'/(1 + |q|^2)."""

    z = complex(z)
    _in_disk(z)
    return _sigma(f, z).s_z


def harmonic_schwarzian(f: HarmonicMap, z: complex) -> complex:
    """Sf = 2 (sigma_zz - sigma_z^2)."""

    z = complex(z)
    _in_disk(z)
    s = _sigma(f, z)
    return 2.0 * (s.s_zz - s.s_z * s.s_z)


def classical_schwarzian(jet: Jet3Complex) -> complex:
    r = jet.d2 / jet.d1
    return complex(jet.d3 / jet.d1 - 1.5 * r * r)


def gauss_curvature(f: HarmonicMap, z: complex) -> float:
    """K = -4 sigma_zzbar / lambda^2 of the lifted minimal surface."""

    z = complex(z)
    _in_disk(z)
    s = _sigma(f, z)
    K = -4.0 * s.s_zzbar / (s.lam * s.lam)
    if not K <= CURVATURE_SLACK:
        raise PositiveCurvature(f"K = {K} > 0 at z={z}")
    return float(K)


def conformal_density(f: HarmonicMap, zs) -> np.ndarray:
    """Vectorized lambda = |h'| (1 + |q|^2) on an array of points."""

    zs = np.asarray(zs, dtype=complex)
    h, _, q = f.jets(zs)
    lam = np.abs(h.d1) * (1.0 + np.abs(q.value) ** 2)
    return np.broadcast_to(np.asarray(lam, dtype=float), zs.shape).copy()


def criterion5_margin(f: HarmonicMap, p: NehariFunction, z: complex) -> float:
    """2 p(|z|) - |Sf(z)| - lambda^2 |K|; nonnegative where the univalence criterion holds."""

    z = complex(z)
    _in_disk(z)
    s = _sigma(f, z)
    sf = 2.0 * (s.s_zz - s.s_z * s.s_z)
    K = -4.0 * s.s_zzbar / (s.lam * s.lam)
    return float(2.0 * float(p(abs(z))) - abs(sf) - s.lam * s.lam * abs(K))


def criterion_grid_check(
    f: HarmonicMap,
    p: NehariFunction,
    radii: Sequence[float],
    angles: int = 36,
) -> HypothesisEcho:
    """Worst criterion margin over a polar grid, with relative slack 1e-9 (1 + 2p)."""

    worst, site, failed = math.inf, None, None
    count = 0
    for r in radii:
        ring = [0.0] if r == 0 else [2.0 * math.pi * k / angles for k in range(angles)]
        for theta in ring:
            z = r * cmath.exp(1j * theta)
            m = criterion5_margin(f, p, z)
            count += 1
            if m < worst:
                worst, site = m, z
            if failed is None and m < -1e-9 * (1.0 + 2.0 * float(p(r))):
                failed = z
    if failed is not None:
        return HypothesisEcho(p_kind=p.name, ok=False, nodes=count, worst_margin=worst, witness=failed, detail="criterion |Sf| + lambda^2|K| <= 2p fails")
    return HypothesisEcho(p_kind=p.name, ok=True, nodes=count, worst_margin=worst, witness=site)


def hyperbolic_distance(z1: complex, z2: complex) -> float:
    """artanh |(z1 - z2) / (1 - conj(z1) z2)|, density 1/(1 - |z|^2)."""

    z1, z2 = complex(z1), complex(z2)
    if abs(z1) >= 1.0 or abs(z2) >= 1.0:
        raise DomainError("hyperbolic distance needs points inside the unit disk")
    ratio = abs((z1 - z2) / (1.0 - z1.conjugate() * z2))
    return math.atanh(min(ratio, 1.0 - 2.0 ** -53))


# -- lift ------------------------------------------------------------------


@dataclass(frozen=True)
class LiftPoint:
    U: float
    V: float
    W: float
    lambda_: float
    K: float
    sf: complex

    def __post_init__(self):
        if not self.lambda_ > 0:
            raise ZeroConformalFactor("lift point with nonpositive lambda")
        for value in (self.U, self.V, self.W, self.lambda_, self.K, self.sf.real, self.sf.imag):
            if not math.isfinite(value):
                raise DomainError("lift point has non-finite entries")

    @property
    def xyz(self) -> np.ndarray:
        return np.array([self.U, self.V, self.W])


def radial_path(z: complex) -> List[complex]:
    return [0j, complex(z)]


def lift_height(f: HarmonicMap, path: Sequence[complex]) -> float:
    """W = 2 Im of the integral of h'q along a polyline starting at 0."""

    vertices = [complex(v) for v in path]
    if not vertices or vertices[0] != 0:
        raise ConfigError("lift paths start at the origin")
    for v in vertices:
        if abs(v) >= 1.0:
            raise PathOutsideDisk(f"path vertex {v} leaves the unit disk")

    total = 0.0
    for a, b in zip(vertices[:-1], vertices[1:]):
        step = b - a
        if step == 0:
            continue

        def integrand(t, a=a, step=step):
            h, _, q = f.jets(a + t * step)
            return (h.d1 * q.value * step).imag

        total += quadrature(integrand, 0.0, 1.0, LIFT_TOL)
    return 2.0 * total


def we_lift(f: HarmonicMap, z: complex, path: Optional[Sequence[complex]] = None) -> LiftPoint:
    """Weierstrass-Enneper lift (Re f, Im f, W) with lambda, K and Sf at z."""

    z = complex(z)
    path = radial_path(z) if path is None else list(path)
    if complex(path[-1]) != z:
        raise ConfigError("lift path must end at z")
    W = lift_height(f, path)
    value = complex(f.value(z))
    s = _sigma(f, z)
    K = gauss_curvature(f, z)
    return LiftPoint(U=value.real, V=value.imag, W=W, lambda_=float(s.lam), K=K, sf=2.0 * (s.s_zz - s.s_z * s.s_z))


@dataclass(frozen=True)
class DiskCurve:
    """A curve gamma in the disk given by (gamma, gamma', gamma'', gamma''') at t."""

    evaluator: Callable[[float], Jet3Complex] = field(repr=False)
    label: str = ""

    def eval(self, t: float) -> Jet3Complex:
        return self.evaluator(float(t))

    def curvature(self, t: float) -> float:
        """Signed planar curvature Im(conj(g') g'') / |g'|^3."""

        j = self.eval(t)
        return float((np.conj(j.d1) * j.d2).imag / abs(j.d1) ** 3)


def diameter(angle: float = 0.0) -> DiskCurve:
    e = cmath.exp(1j * angle)
    return DiskCurve(lambda t: Jet3Complex(t * e, e, 0j, 0j), label="diameter")


def disk_circle(radius: float = 0.5) -> DiskCurve:
    """Unit-speed circle |z| = radius."""

    if not 0 < radius < 1:
        raise ConfigError("circle radius must lie in (0, 1)")

    def evaluator(t):
        e = cmath.exp(1j * t / radius)
        return Jet3Complex(radius * e, 1j * e, -e / radius, -1j * e / radius ** 2)

    return DiskCurve(evaluator, label=f"circle[{radius:g}]")


def _compose(a: Jet3Complex, g: Jet3Complex) -> Tuple[complex, complex, complex]:
    """Derivatives 1..3 of A o gamma from A's jet at gamma(t) and gamma's jet."""

    g1, g2, g3 = g.d1, g.d2, g.d3
    return (
        a.d1 * g1,
        a.d2 * g1 * g1 + a.d1 * g2,
        a.d3 * g1 ** 3 + 3.0 * a.d2 * g1 * g2 + a.d1 * g3,
    )


def lift_curve_jet(f: HarmonicMap, gamma: DiskCurve, t: float) -> Jet3Real:
    """Analytic 3-jet of the lifted curve (U, V, W) o gamma in R^3."""

    gj = gamma.eval(t)
    z = complex(gj.value)
    h, g, q = f.jets(z)
    dh = _compose(h, gj)
    dg = _compose(g, gj)
    psi = Jet3Complex(0j, h.d1 * q.value, h.d2 * q.value + h.d1 * q.d1, h.d3 * q.value + 2.0 * h.d2 * q.d1 + h.d1 * q.d2)
    dpsi = _compose(psi, gj)
    point = we_lift(f, z)

    rows = [point.xyz]
    for k in range(3):
        w = dh[k] + np.conj(dg[k])
        rows.append(np.array([w.real, w.imag, 2.0 * dpsi[k].imag]))
    return Jet3Real(*rows)


def surface_normal(f: HarmonicMap, z: complex) -> np.ndarray:
    """Unit normal of the lift from the coordinate tangents f_x, f_y."""

    h, g, q = f.jets(complex(z))
    hq = h.d1 * q.value
    fx_c = h.d1 + np.conj(g.d1)
    fy_c = 1j * h.d1 - 1j * np.conj(g.d1)
    fx = np.array([fx_c.real, fx_c.imag, 2.0 * hq.imag])
    fy = np.array([fy_c.real, fy_c.imag, 2.0 * hq.real])
    n = np.cross(fx, fy)
    return n / np.linalg.norm(n)


# -- disk automorphisms ----------------------------------------------------


@dataclass(frozen=True)
class DiskAutomorphism:
    """z -> e^{i theta} (z + alpha) / (1 + conj(alpha) z)."""

    alpha: complex = 0j
    theta: float = 0.0

    def __post_init__(self):
        if abs(self.alpha) >= 1.0:
            raise DomainError("automorphism parameter must satisfy |alpha| < 1")
        object.__setattr__(self, "alpha", complex(self.alpha))

    @classmethod
    def geodesic_transport(cls, rho: float) -> "DiskAutomorphism":
        """(i rho - z) / (1 + i rho z): swaps 0 and i rho."""

        return cls(alpha=-1j * rho, theta=math.pi)

    @property
    def rotation(self) -> complex:
        return cmath.exp(1j * self.theta)

    def apply(self, z):
        return self.rotation * (z + self.alpha) / (1.0 + np.conj(self.alpha) * z)

    def jet(self, z) -> Jet3Complex:
        a_bar = np.conj(self.alpha)
        m = 1.0 + a_bar * z
        d1 = self.rotation * (1.0 - abs(self.alpha) ** 2) / m ** 2
        return Jet3Complex(self.apply(z), d1, -2.0 * a_bar * d1 / m, 6.0 * a_bar ** 2 * d1 / m ** 2)

    def inverse(self) -> "DiskAutomorphism":
        return DiskAutomorphism(alpha=-self.rotation * self.alpha, theta=-self.theta)


def _faa_di_bruno(a: Jet3Complex, t: Jet3Complex, shift: complex = 0j) -> Jet3Complex:
    t1, t2, t3 = t.d1, t.d2, t.d3
    return Jet3Complex(
        a.value + shift,
        a.d1 * t1,
        a.d2 * t1 * t1 + a.d1 * t2,
        a.d3 * t1 ** 3 + 3.0 * a.d2 * t1 * t2 + a.d1 * t3,
    )


def transport_by_automorphism(f: HarmonicMap, T: DiskAutomorphism) -> HarmonicMap:
    """f o T in canonical form: the constant g(T(0)) moves into h."""

    g_shift = complex(f.g_jet(T.apply(0j)).value)

    def h1(z):
        t = T.jet(z)
        return _faa_di_bruno(f.h_jet(t.value), t, np.conj(g_shift))

    def g1(z):
        t = T.jet(z)
        return _faa_di_bruno(f.g_jet(t.value), t, -g_shift)

    def q1(z):
        t = T.jet(z)
        q = f.q_jet(t.value)
        return Jet3Complex(q.value, q.d1 * t.d1, q.d2 * t.d1 * t.d1 + q.d1 * t.d2)

    return HarmonicMap(h_jet=h1, g_jet=g1, q_jet=q1, label=f"{f.label}oT")


# -- verification ----------------------------------------------------------


def random_disk_pairs(rng: np.random.Generator, count: int, bound: float = 0.9) -> List[Tuple[complex, complex]]:
    r = bound * np.sqrt(rng.uniform(0.0, 1.0, size=(count, 2)))
    theta = rng.uniform(0.0, 2.0 * math.pi, size=(count, 2))
    pts = r * np.exp(1j * theta)
    return [(complex(a), complex(b)) for a, b in pts]


def resolve_extremal(p: NehariFunction, eps: float = DEFAULT_EPS) -> Tuple[NehariFunction, Optional[float]]:
    """Return p itself when flagged extremal, else c* p from the extremal scan."""

    if p.has(Flag.EXTREMAL):
        return p, None
    c = extremal_scan(p, eps=eps)
    log.info("p %s is not flagged extremal; rescaled by c* = %.6g", p.name, c)
    return p.scaled(c, extremal=True), c


def verify_theorem3(
    f: HarmonicMap,
    p: NehariFunction,
    pairs: Sequence[Tuple[complex, complex]],
    *,
    lift_path: Callable[[complex], Sequence[complex]] = radial_path,
    cover_radii: Optional[Sequence[float]] = None,
    eps: float = DEFAULT_EPS,
    profile: Optional[ExtremalProfile] = None,
    workers: Optional[int] = None,
) -> DistortionReport:
    """|f~(z1) - f~(z2)| >= sqrt(lambda1 lambda2 / (F'(|z1|) F'(|z2|))) d(z1, z2) on the lift."""

    pts = [z for pair in pairs for z in pair]
    reach = max((abs(z) for z in pts), default=0.0)
    if cover_radii is None:
        cover_radii = np.linspace(0.0, max(reach, 0.5), 24)
    echo = criterion_grid_check(f, p, cover_radii)
    if not echo.ok:
        raise HypothesisFailed(f"criterion fails for {f.label} at z={echo.witness}", witness=echo.witness)

    p1, rescale = resolve_extremal(p, eps)
    if profile is None:
        profile = extremal_F(p1, eps)
    echo = HypothesisEcho(
        p_kind=p.name,
        ok=True,
        nodes=echo.nodes,
        worst_margin=echo.worst_margin,
        witness=echo.witness,
        detail="criterion",
        rescaled_by=rescale,
    )

    def check(pair: Tuple[complex, complex]):
        z1, z2 = complex(pair[0]), complex(pair[1])
        w1, w2 = we_lift(f, z1, lift_path(z1)), we_lift(f, z2, lift_path(z2))
        lhs = float(np.linalg.norm(w1.xyz - w2.xyz))
        scale = w1.lambda_ * w2.lambda_ / (float(profile.dF(abs(z1))) * float(profile.dF(abs(z2))))
        return sample((z1, z2), lhs, math.sqrt(scale) * hyperbolic_distance(z1, z2))

    samples = sweep(check, list(pairs), title="theorem 3", workers=workers, margin=attrgetter("margin"))
    return DistortionReport(theorem="3", p_kind=p.name, samples=tuple(samples), hypothesis=echo, extras={"map": f.label})
