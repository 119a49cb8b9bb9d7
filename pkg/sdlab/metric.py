# SPDX-FileCopyrightText: 2024-2025 ModelCloud.ai
# SPDX-FileCopyrightText: 2024-2025 qubitium@modelcloud.ai
# SPDX-License-Identifier: Apache-2.0
# Contact: qubitium@modelcloud.ai, x.com/qubitium

"""Surface distance on the lifted surface, covering bounds and the lifted
curve identity for the Ahlfors Schwarzian."""

import cmath
import math
import threading
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .config import DEFAULT_R_MAX, DEFAULT_RESOLUTION, DEFAULT_STENCIL_RADIUS
from .curves import s1_from_jet
from .errors import ConfigError, Disconnected, DomainError, HypothesisFailed, OutOfGrid
from .harmonic import (
    DiskAutomorphism,
    DiskCurve,
    HarmonicMap,
    conformal_density,
    conformal_factor,
    criterion_grid_check,
    gauss_curvature,
    harmonic_schwarzian,
    lift_curve_jet,
    surface_normal,
    transport_by_automorphism,
)
from .log import LabLog
from .nehari import ExtremalProfile, Flag, NehariFunction, builtin_nehari, extremal_G
from .numerics import DEFAULT_EPS, quadrature
from .report import CoveringReport, HypothesisEcho

log = LabLog.shared()

DensityFn = Callable[[np.ndarray], np.ndarray]


def stencil_offsets(radius: int) -> Tuple[Tuple[int, int], ...]:
    """Primitive lattice steps with max(|a|, |b|) <= radius, one per +/- pair."""

    if radius < 1:
        raise ConfigError("stencil radius must be at least 1")
    out = []
    for a in range(0, radius + 1):
        for b in range(-radius, radius + 1):
            if (a, b) == (0, 0) or (a == 0 and b < 0):
                continue
            if math.gcd(a, abs(b)) == 1:
                out.append((a, b))
    return tuple(out)


@dataclass(frozen=True, eq=False)
class ConformalGrid:
    """Cartesian lattice clipped to |z| <= r_max with Simpson-weighted edges.

    Shortest paths in the graph bound the surface distance from above and
    converge to it under refinement.
    """

    density_fn: DensityFn = field(repr=False)
    resolution: int
    r_max: float
    stencil_radius: int
    coords: np.ndarray = field(repr=False)
    density: np.ndarray = field(repr=False)
    index: np.ndarray = field(repr=False)
    graph: sparse.csr_matrix = field(repr=False)
    level: int = 0
    _cache: Dict[int, np.ndarray] = field(default_factory=dict, init=False, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, init=False, repr=False)

    @classmethod
    def build(
        cls,
        density_fn: DensityFn,
        resolution: int = DEFAULT_RESOLUTION,
        r_max: float = DEFAULT_R_MAX,
        stencil_radius: int = DEFAULT_STENCIL_RADIUS,
        level: int = 0,
    ) -> "ConformalGrid":
        if resolution < 3:
            raise ConfigError("grid resolution must be at least 3")
        if not 0 < r_max < 1:
            raise ConfigError("r_max must lie in (0, 1)")
        if resolution % 2 == 0:
            resolution += 1

        axis = np.linspace(-r_max, r_max, resolution)
        X, Y = np.meshgrid(axis, axis, indexing="ij")
        Z = X + 1j * Y
        inside = np.abs(Z) <= r_max
        index = np.full(Z.shape, -1, dtype=np.int64)
        index[inside] = np.arange(int(inside.sum()))
        coords = Z[inside]
        density = np.asarray(density_fn(coords), dtype=float)
        if density.shape != coords.shape or not np.all(np.isfinite(density)) or np.any(density <= 0):
            raise DomainError("conformal density must be finite and positive on the grid")

        rows, cols, weights = [], [], []
        n = resolution
        for a, b in stencil_offsets(stencil_radius):
            i0, i1 = max(0, -a), min(n, n - a)
            j0, j1 = max(0, -b), min(n, n - b)
            src = index[i0:i1, j0:j1]
            dst = index[i0 + a : i1 + a, j0 + b : j1 + b]
            ok = (src >= 0) & (dst >= 0)
            s, d = src[ok], dst[ok]
            za, zb = coords[s], coords[d]
            mid = np.asarray(density_fn(0.5 * (za + zb)), dtype=float)
            w = np.abs(zb - za) * (density[s] + 4.0 * mid + density[d]) / 6.0
            rows.append(s)
            cols.append(d)
            weights.append(w)

        size = coords.size
        graph = sparse.csr_matrix(
            (np.concatenate(weights), (np.concatenate(rows), np.concatenate(cols))),
            shape=(size, size),
        )
        log.debug("conformal grid n=%d nodes=%d edges=%d radius=%d", resolution, size, graph.nnz, stencil_radius)
        return cls(
            density_fn=density_fn,
            resolution=resolution,
            r_max=r_max,
            stencil_radius=stencil_radius,
            coords=coords,
            density=density,
            index=index,
            graph=graph,
            level=level,
        )

    @classmethod
    def for_map(cls, f: HarmonicMap, **kwargs) -> "ConformalGrid":
        return cls.build(lambda zs: conformal_density(f, zs), **kwargs)

    @property
    def spacing(self) -> float:
        return 2.0 * self.r_max / (self.resolution - 1)

    def refine(self) -> "ConformalGrid":
        """Double the resolution and widen the stencil by one ring."""

        return ConformalGrid.build(
            self.density_fn,
            resolution=2 * self.resolution - 1,
            r_max=self.r_max,
            stencil_radius=self.stencil_radius + 1,
            level=self.level + 1,
        )

    def node_of(self, z: complex) -> int:
        """Index of the lattice node nearest to z."""

        z = complex(z)
        if abs(z) > self.r_max + 1e-12:
            raise OutOfGrid(f"z={z} lies outside the grid radius {self.r_max}")
        h = self.spacing
        i = int(round((z.real + self.r_max) / h))
        j = int(round((z.imag + self.r_max) / h))
        best, best_d = -1, math.inf
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                ii, jj = i + di, j + dj
                if 0 <= ii < self.resolution and 0 <= jj < self.resolution and self.index[ii, jj] >= 0:
                    k = int(self.index[ii, jj])
                    d = abs(self.coords[k] - z)
                    if d < best_d:
                        best, best_d = k, d
        if best < 0:
            raise OutOfGrid(f"no grid node near z={z}")
        return best

    def distances_from(self, source: int) -> np.ndarray:
        with self._lock:
            cached = self._cache.get(source)
        if cached is not None:
            return cached
        dist = csgraph.dijkstra(self.graph, directed=False, indices=source)
        dist.setflags(write=False)
        with self._lock:
            self._cache[source] = dist
        return dist

    def distance_field(self, source: complex = 0j) -> np.ndarray:
        """Distances from the node nearest ``source`` to every node."""

        return self.distances_from(self.node_of(source))

    def nodes_near_circle(self, r: float) -> np.ndarray:
        """Nodes within half a cell of |z| = r."""

        band = np.abs(np.abs(self.coords) - r) <= 0.5 * self.spacing
        picked = np.nonzero(band)[0]
        if picked.size == 0:
            raise OutOfGrid(f"no grid nodes near the circle r={r}")
        return picked

    def write_distance_csv(self, path, source: complex = 0j) -> None:
        dist = self.distance_field(source)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("node,x,y,rho\n")
            for k, (z, d) in enumerate(zip(self.coords, dist)):
                fh.write(f"{k},{float(z.real)!r},{float(z.imag)!r},{float(d)!r}\n")


def conformal_distance(grid: ConformalGrid, z1: complex, z2: complex) -> float:
    """Shortest-path length between the lattice nodes nearest z1 and z2."""

    a, b = grid.node_of(z1), grid.node_of(z2)
    if a == b:
        return 0.0
    d = float(grid.distances_from(a)[b])
    if not math.isfinite(d):
        raise Disconnected(f"no path between {z1} and {z2} at resolution {grid.resolution}")
    return d


@lru_cache(maxsize=8)
def _euclidean_relative_error(resolution: int, r_max: float, stencil_radius: int) -> float:
    grid = ConformalGrid.build(lambda zs: np.ones(np.shape(zs)), resolution, r_max, stencil_radius)
    dist = grid.distance_field(0j)
    radius = np.abs(grid.coords)
    far = radius >= 0.25 * r_max
    return float(np.max((dist[far] - radius[far]) / radius[far]))


def calibrate_allowance(grid: ConformalGrid) -> float:
    """Relative error of the same lattice and stencil on the flat density."""

    return _euclidean_relative_error(grid.resolution, grid.r_max, grid.stencil_radius)


def profile_value(profile: ExtremalProfile, r: float) -> float:
    """G(r) on [0, 1), continued linearly past the cut."""

    if not 0.0 <= r < 1.0:
        raise DomainError(f"radius {r} outside [0, 1)")
    hi = profile.base.hi
    if r <= hi:
        return float(profile.F(r))
    return float(profile.F(hi)) + (r - hi) * float(profile.dF(hi))


def H_bound(G_profile: ExtremalProfile, lambda0: float, sigma_z0_abs: float, r: float) -> float:
    """lambda0 G(r) / (1 + |sigma_z(0)| G(r))."""

    if lambda0 <= 0 or sigma_z0_abs < 0:
        raise DomainError("need lambda0 > 0 and |sigma_z(0)| >= 0")
    G = profile_value(G_profile, r)
    return lambda0 * G / (1.0 + sigma_z0_abs * G)


def covering_radius(G_profile: ExtremalProfile, lambda0: float, sigma_z0_abs: float) -> float:
    """Limit of the bound as r -> 1."""

    G1 = G_profile.endpoint_value()
    return lambda0 * G1 / (1.0 + sigma_z0_abs * G1)


def radial_length(f: HarmonicMap, z: complex, tol: float = 1e-10) -> float:
    """Integral of lambda along the segment from 0 to z."""

    z = complex(z)
    if abs(z) >= 1.0:
        raise DomainError("radial length needs |z| < 1")
    if z == 0:
        return 0.0
    r = abs(z)
    direction = z / r
    return quadrature(lambda t: float(conformal_density(f, np.array([t * direction]))[0]), 0.0, r, tol)


def _check_monotone(p: NehariFunction, eps: float) -> None:
    if not p.has(Flag.MONOTONE_NONDECREASING):
        raise HypothesisFailed(f"{p.name} is not declared nondecreasing on [0, 1)")
    failed = p.verify_flags(eps)
    if failed:
        raise HypothesisFailed(f"{p.name} fails its claimed flags: {', '.join(f.value for f in failed)}")


def verify_theorem4(
    f: HarmonicMap,
    p: NehariFunction,
    radii: Sequence[float],
    grid_resolution: int = DEFAULT_RESOLUTION,
    *,
    stencil_radius: int = DEFAULT_STENCIL_RADIUS,
    r_max: float = DEFAULT_R_MAX,
    eps: float = DEFAULT_EPS,
    grid: Optional[ConformalGrid] = None,
    angles: int = 64,
    theorem: str = "4",
) -> CoveringReport:
    """Minimum surface distance from f~(0) over |z| = r against the covering bound."""

    radii = tuple(float(r) for r in radii)
    if not radii:
        raise ConfigError("need at least one radius")
    for r in radii:
        if not 0.0 < r <= r_max:
            raise DomainError(f"radius {r} outside (0, {r_max}]")

    _check_monotone(p, eps)
    cover = np.linspace(0.0, max(radii), 24)
    echo = criterion_grid_check(f, p, cover)
    if not echo.ok:
        raise HypothesisFailed(f"criterion fails for {f.label} at z={echo.witness}", witness=echo.witness)

    data = conformal_factor(f, 0j)
    G = extremal_G(p, eps)
    sigma_abs = abs(data.sigma_z)
    if grid is None:
        grid = ConformalGrid.for_map(f, resolution=grid_resolution, r_max=r_max, stencil_radius=stencil_radius)
    dist = grid.distance_field(0j)
    rel = calibrate_allowance(grid)

    measured, bounds, allowance, upper = [], [], [], []
    for r in radii:
        ring = grid.nodes_near_circle(r)
        measured.append(float(np.min(dist[ring])))
        bound = H_bound(G, data.lambda_, sigma_abs, r)
        bounds.append(bound)
        # ring nodes sit up to half a cell inside r; H is nondecreasing
        inner = H_bound(G, data.lambda_, sigma_abs, float(np.min(np.abs(grid.coords[ring]))))
        allowance.append(2.0 * rel * bound + (bound - inner))
        upper.append(min(radial_length(f, r * cmath.exp(2j * math.pi * k / angles)) for k in range(angles)))

    R = covering_radius(G, data.lambda_, sigma_abs)
    log.debug("covering radius for %s: %.9g", f.label, R)
    return CoveringReport(
        radii=radii,
        measured_min_rho=tuple(measured),
        H_bound=tuple(bounds),
        allowance=tuple(allowance),
        covering_radius_R=R,
        sigma_z0=data.sigma_z,
        lambda0=data.lambda_,
        hypothesis=HypothesisEcho(p_kind=p.name, ok=True, nodes=echo.nodes, worst_margin=echo.worst_margin, witness=echo.witness, detail="criterion"),
        radial_upper=tuple(upper),
        theorem=theorem,
        extras={"map": f.label, "resolution": grid.resolution, "stencil_radius": grid.stencil_radius, "calibrated_error": rel},
    )


def verify_corollary16(
    f: HarmonicMap,
    alpha: complex,
    r,
    grid_resolution: int = DEFAULT_RESOLUTION,
    **kwargs,
) -> CoveringReport:
    """Covering bound at the base point alpha, via the transported map f o T with T(0) = alpha."""

    alpha = complex(alpha)
    radii = (float(r),) if np.isscalar(r) else tuple(float(v) for v in r)
    T = DiskAutomorphism(alpha=alpha)
    transported = transport_by_automorphism(f, T)
    report = verify_theorem4(transported, builtin_nehari("classical_nehari"), radii, grid_resolution, theorem="corollary", **kwargs)
    base = conformal_factor(f, alpha)
    extras = dict(report.extras)
    extras.update({"alpha": alpha, "lambda_alpha": base.lambda_, "sigma_z_alpha": base.sigma_z})
    return replace(report, extras=extras)


@dataclass(frozen=True)
class LemmaSides:
    lhs: float
    rhs: float
    k_e: float
    kappa: float

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs)


def lemma12_sides(f: HarmonicMap, gamma: DiskCurve, t: float) -> LemmaSides:
    """Both sides of S1(f~ o gamma) = Re(Sf gamma'^2) + lambda^2 (|K| + k_e^2)/2 + kappa^2/2."""

    g = gamma.eval(t)
    if abs(abs(g.d1) - 1.0) > 1e-9:
        raise ConfigError("lifted-curve identity needs a unit-speed disk curve")
    z = complex(g.value)
    jet = lift_curve_jet(f, gamma, t)
    lhs = s1_from_jet(jet, t)

    sf = harmonic_schwarzian(f, z)
    lam = conformal_factor(f, z).lambda_
    K = gauss_curvature(f, z)
    kappa = gamma.curvature(t)
    normal = surface_normal(f, z)
    k_e = float(jet.d2 @ normal) / float(jet.d1 @ jet.d1)
    rhs = (sf * g.d1 * g.d1).real + 0.5 * lam * lam * (abs(K) + k_e * k_e) + 0.5 * kappa * kappa
    return LemmaSides(lhs=lhs, rhs=float(rhs), k_e=k_e, kappa=kappa)


def lemma12_residual(f: HarmonicMap, gamma: DiskCurve, t: float) -> float:
    return lemma12_sides(f, gamma, t).residual
