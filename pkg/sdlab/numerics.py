# SPDX-FileCopyrightText: 2024-2025 ModelCloud.ai
# SPDX-FileCopyrightText: 2024-2025 qubitium@modelcloud.ai
# SPDX-License-Identifier: Apache-2.0
# Contact: qubitium@modelcloud.ai, x.com/qubitium

"""Shared numerical kernels: jets, quadrature, the linear ODE integrator and
finite-difference Wirtinger oracles."""

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate, interpolate

from .errors import (
    ConfigError,
    DomainError,
    MaxSubdivisions,
    NonFiniteCoefficient,
    NonFiniteIntegrand,
    NumericalError,
    StencilOutsideDomain,
    StepUnderflow,
)
from .log import LabLog

log = LabLog.shared()

DEFAULT_EPS = 1e-3
DEFAULT_ODE_TOL = 1e-10
DEFAULT_SAMPLES = 4001
DEFAULT_FD_STEP = 1e-4

# solver nodes closer than this to a sampling node are merged
_NODE_MERGE = 1e-9


@dataclass(frozen=True, eq=False)
class Jet3Real:
    """Value and first three parameter derivatives of a curve in R^n."""

    value: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    d3: np.ndarray

    def __post_init__(self):
        arrays = [np.atleast_1d(np.asarray(getattr(self, name), dtype=float)) for name in ("value", "d1", "d2", "d3")]
        shapes = {a.shape for a in arrays}
        if len(shapes) != 1 or arrays[0].ndim != 1 or arrays[0].size < 1:
            raise ValueError(f"jet entries must share one dimension n >= 1, got shapes {sorted(shapes)}")
        if not all(np.all(np.isfinite(a)) for a in arrays):
            raise NumericalError("jet entries must be finite")
        for name, a in zip(("value", "d1", "d2", "d3"), arrays):
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    @property
    def dim(self) -> int:
        return int(self.value.size)


@dataclass(frozen=True, eq=False)
class Jet3Complex:
    """An analytic function and three derivatives at a point (or a point array)."""

    value: complex
    d1: complex
    d2: complex
    d3: complex = 0j

    def __post_init__(self):
        for name in ("value", "d1", "d2", "d3"):
            raw = np.asarray(getattr(self, name), dtype=complex)
            if not np.all(np.isfinite(raw)):
                raise NumericalError(f"complex jet entry {name} is not finite")
            object.__setattr__(self, name, complex(raw) if raw.ndim == 0 else raw)


def evaluate_on(fn: Callable, xs) -> np.ndarray:
    """Evaluate a scalar evaluator on an array, vectorized when it allows it."""

    xs = np.asarray(xs, dtype=float)
    try:
        values = np.asarray(fn(xs), dtype=float)
        if values.shape == xs.shape:
            return values
        if values.ndim == 0:
            return np.full(xs.shape, float(values))
    except (TypeError, ValueError):
        pass
    return np.array([float(fn(x)) for x in xs.ravel()]).reshape(xs.shape)


def clustered_grid(eps: float, samples: int = DEFAULT_SAMPLES) -> np.ndarray:
    """Symmetric grid on [-1+eps, 1-eps] clustered toward the endpoints.

    An odd ``samples`` count places a node exactly at 0.
    """

    if samples % 2 == 0:
        samples += 1
    s = np.linspace(-1.0, 1.0, samples)
    return (1.0 - eps) * np.sin(0.5 * np.pi * s)


@dataclass(frozen=True, eq=False)
class OdeProfile:
    """Nodes and (u, u') for u'' + sign * p * u = 0.

    ``sign`` is +1 for u'' + p u = 0 and -1 for u'' - p u = 0. Between nodes
    the profile is the cubic Hermite interpolant of (u, u').
    """

    grid: np.ndarray
    u: np.ndarray
    du: np.ndarray
    sign: int
    p: Optional[Callable] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        u = np.asarray(self.u, dtype=float)
        du = np.asarray(self.du, dtype=float)
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")
        if grid.ndim != 1 or grid.size < 2:
            raise ValueError("profile grid needs at least two nodes")
        if u.shape != grid.shape or du.shape != grid.shape:
            raise ValueError("u and du must match the grid length")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("profile grid must be strictly increasing")
        if np.any((u == 0.0) & (du == 0.0)):
            raise NumericalError("trivial solution: u and u' vanish together")
        for name, a in (("grid", grid), ("u", u), ("du", du)):
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        object.__setattr__(self, "_spline", interpolate.CubicHermiteSpline(grid, u, du, extrapolate=False))

    @property
    def lo(self) -> float:
        return float(self.grid[0])

    @property
    def hi(self) -> float:
        return float(self.grid[-1])

    def _check(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        slack = 1e-12
        if np.any(x < self.lo - slack) or np.any(x > self.hi + slack):
            raise DomainError(f"abscissa outside the profile domain [{self.lo}, {self.hi}]")
        return np.clip(x, self.lo, self.hi)

    def u_at(self, x):
        return self._spline(self._check(x))

    def du_at(self, x):
        return self._spline(self._check(x), 1)

    def d2u_at(self, x):
        """u'' from the equation when p is known, else from the interpolant."""

        x = self._check(x)
        if self.p is None:
            return self._spline(x, 2)
        return -self.sign * evaluate_on(self.p, x) * self._spline(x)

    def hermite_d2(self, x):
        """Second derivative of the interpolant itself (residual checks)."""

        return self._spline(self._check(x), 2)

    def wronskian(self, other: "OdeProfile") -> np.ndarray:
        """u1 u2' - u2 u1' at this profile's nodes."""

        return self.u * other.du_at(self.grid) - other.u_at(self.grid) * self.du


def integrate_linear_ode(
    p: Callable,
    sign: int,
    init_value: float,
    init_slope: float,
    eps: float = DEFAULT_EPS,
    tol: float = DEFAULT_ODE_TOL,
    *,
    origin: float = 0.0,
    samples: int = DEFAULT_SAMPLES,
) -> OdeProfile:
    """Solve u'' + sign * p(x) u = 0 on [-1+eps, 1-eps] from data at ``origin``.

    Integration runs outward from ``origin`` in both directions with the
    DOP853 embedded pair; the returned nodes are the endpoint-clustered
    sampling grid merged with the solver's own steps.
    """

    if sign not in (1, -1):
        raise ConfigError(f"sign must be +1 or -1, got {sign}")
    if not (0.0 < eps < 1.0):
        raise ConfigError(f"domain cut must lie in (0, 1), got {eps}")
    if tol <= 0:
        raise ConfigError("tolerance must be positive")
    lo, hi = -1.0 + eps, 1.0 - eps
    if not (lo <= origin <= hi):
        raise DomainError(f"origin {origin} outside the cut domain [{lo}, {hi}]")

    base = clustered_grid(eps, samples)
    coeff = evaluate_on(p, base)
    bad = ~np.isfinite(coeff)
    if np.any(bad):
        raise NonFiniteCoefficient(f"p is not finite at x={float(base[np.argmax(bad)]):.6g}")

    def rhs(x, y):
        c = float(p(x))
        if not math.isfinite(c):
            raise NonFiniteCoefficient(f"p is not finite at x={x:.6g}")
        return [y[1], -sign * c * y[0]]

    xs = [np.array([origin])]
    us = [np.array([float(init_value)])]
    dus = [np.array([float(init_slope)])]

    for end in (hi, lo):
        if abs(end - origin) < 1e-15:
            continue
        sol = integrate.solve_ivp(
            rhs,
            (origin, end),
            [float(init_value), float(init_slope)],
            method="DOP853",
            rtol=tol,
            atol=tol * 1e-3,
            dense_output=True,
        )
        if sol.status == -1 or not sol.success:
            raise StepUnderflow(f"integration stalled: {sol.message}", abscissa=float(sol.t[-1]))

        a, b = min(origin, end), max(origin, end)
        nodes = np.union1d(base[(base >= a) & (base <= b)], sol.t)
        nodes = nodes[nodes != origin]
        values = sol.sol(nodes)
        xs.append(nodes)
        us.append(values[0])
        dus.append(values[1])

    x = np.concatenate(xs)
    order = np.argsort(x, kind="stable")
    x = x[order]
    u = np.concatenate(us)[order]
    du = np.concatenate(dus)[order]

    keep = np.concatenate([[True], np.diff(x) > _NODE_MERGE])
    # never merge the origin away
    origin_idx = int(np.searchsorted(x, origin))
    keep[origin_idx] = True
    if origin_idx + 1 < keep.size and x[origin_idx + 1] - x[origin_idx] <= _NODE_MERGE:
        keep[origin_idx + 1] = False

    log.debug("ode sign=%+d nodes=%d tol=%.1e", sign, int(keep.sum()), tol)
    return OdeProfile(grid=x[keep], u=u[keep], du=du[keep], sign=sign, p=p)


def cumulative_gauss_legendre(nodes: np.ndarray, integrand: Callable, origin_index: int, order: int = 8) -> np.ndarray:
    """Cumulative integral of ``integrand`` over sorted ``nodes`` anchored at ``origin_index``.

    Each interval gets an ``order``-point Gauss-Legendre rule; sums run
    outward from the origin so that symmetric data stays symmetric.
    """

    nodes = np.asarray(nodes, dtype=float)
    xg, wg = leggauss(order)
    mid = 0.5 * (nodes[:-1] + nodes[1:])
    half = 0.5 * (nodes[1:] - nodes[:-1])
    pts = mid[:, None] + half[:, None] * xg[None, :]
    vals = np.asarray(integrand(pts.ravel()), dtype=float).reshape(pts.shape)
    if not np.all(np.isfinite(vals)):
        raise NonFiniteIntegrand("integrand not finite on the profile grid")
    seg = half * (vals @ wg)

    out = np.zeros_like(nodes)
    out[origin_index + 1:] = np.cumsum(seg[origin_index:])
    if origin_index > 0:
        out[:origin_index] = -np.cumsum(seg[:origin_index][::-1])[::-1]
    return out


def quadrature(f: Callable[[float], float], a: float, b: float, tol: float = 1e-10, *, limit: int = 500) -> float:
    """Adaptive estimate of the integral of ``f`` over [a, b] to absolute ``tol``."""

    if tol <= 0:
        raise ConfigError("tolerance must be positive")
    if a == b:
        return 0.0
    direction = 1.0
    if a > b:
        a, b = b, a
        direction = -1.0

    def checked(t):
        value = float(f(t))
        if not math.isfinite(value):
            raise NonFiniteIntegrand(f"integrand not finite at t={t:.6g}")
        return value

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        result = integrate.quad(checked, a, b, epsabs=tol, epsrel=0.0, limit=limit, full_output=1)

    value, abserr, info = result[0], result[1], result[2]
    if len(result) > 3 and abserr > tol:
        last = int(info.get("last", 0))
        worst = None
        if last > 0:
            idx = int(np.argmax(info["elist"][:last]))
            worst = (float(info["alist"][idx]), float(info["blist"][idx]))
        raise MaxSubdivisions(
            f"quadrature on [{a:.6g}, {b:.6g}] missed tol {tol:.1e} (estimate {abserr:.1e}): {result[3]}",
            worst_interval=worst,
        )
    return direction * float(value)


@dataclass(frozen=True)
class WirtingerEstimate:
    """Central-difference field value and Wirtinger derivatives at one point."""

    s: complex
    s_z: complex
    s_zbar: complex
    s_zz: complex
    s_zzbar: complex


def _wirtinger_stencil(field_fn: Callable, z: complex, h: float) -> WirtingerEstimate:
    def at(dx: int, dy: int) -> complex:
        return complex(field_fn(z + complex(dx * h, dy * h)))

    s0 = at(0, 0)
    sxp, sxm, syp, sym = at(1, 0), at(-1, 0), at(0, 1), at(0, -1)
    spp, spm, smp, smm = at(1, 1), at(1, -1), at(-1, 1), at(-1, -1)

    s_x = (sxp - sxm) / (2 * h)
    s_y = (syp - sym) / (2 * h)
    s_xx = (sxp - 2 * s0 + sxm) / (h * h)
    s_yy = (syp - 2 * s0 + sym) / (h * h)
    s_xy = (spp - spm - smp + smm) / (4 * h * h)

    return WirtingerEstimate(
        s=s0,
        s_z=0.5 * (s_x - 1j * s_y),
        s_zbar=0.5 * (s_x + 1j * s_y),
        s_zz=0.25 * (s_xx - 2j * s_xy - s_yy),
        s_zzbar=0.25 * (s_xx + s_yy),
    )


def wirtinger_fd(field_fn: Callable, z: complex, h: float = DEFAULT_FD_STEP, *, richardson: bool = False) -> WirtingerEstimate:
    """Finite-difference oracle for d/dz, d/dzbar, d2/dz2 and d2/dz dzbar.

    Only used to cross-check analytic formulas. ``richardson`` combines steps
    h and h/2 to cancel the leading O(h^2) term.
    """

    z = complex(z)
    if h <= 0:
        raise ConfigError("finite-difference step must be positive")
    if abs(z) + 2 * h >= 1.0:
        raise StencilOutsideDomain(f"stencil of radius {2 * h:g} around {z} leaves the unit disk")

    coarse = _wirtinger_stencil(field_fn, z, h)
    if not richardson:
        return coarse
    fine = _wirtinger_stencil(field_fn, z, 0.5 * h)

    def extrapolate(name: str) -> complex:
        return (4 * getattr(fine, name) - getattr(coarse, name)) / 3

    return WirtingerEstimate(
        s=coarse.s,
        s_z=extrapolate("s_z"),
        s_zbar=extrapolate("s_zbar"),
        s_zz=extrapolate("s_zz"),
        s_zzbar=extrapolate("s_zzbar"),
    )


def jet_from_samples(fn: Callable[[float], np.ndarray], x: float, h: float = 1e-3) -> Jet3Real:
    """Finite-difference 3-jet of a vector curve (cross-check oracle only)."""

    f = lambda t: np.atleast_1d(np.asarray(fn(t), dtype=float))
    fm2, fm1, f0, fp1, fp2 = f(x - 2 * h), f(x - h), f(x), f(x + h), f(x + 2 * h)
    return Jet3Real(
        value=f0,
        d1=(fp1 - fm1) / (2 * h),
        d2=(fp1 - 2 * f0 + fm1) / (h * h),
        d3=(fp2 - 2 * fp1 + 2 * fm1 - fm2) / (2 * h ** 3),
    )
