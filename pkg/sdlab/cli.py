# SPDX-FileCopyrightText: 2024-2025 ModelCloud.ai
# SPDX-FileCopyrightText: 2024-2025 qubitium@modelcloud.ai
# SPDX-License-Identifier: Apache-2.0
# Contact: qubitium@modelcloud.ai, x.com/qubitium

"""``sdlab`` command line: profiles, verification campaigns and lift meshes.

Exit codes: 0 pass, 1 violation, 2 configuration, 3 numerical failure,
4 hypothesis not satisfied.
"""

import argparse
import csv
import json
import math
import sys
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np

from . import curves, harmonic, metric
from .config import FORMATS, THEOREMS, RunConfig
from .errors import ConfigError, HypothesisFailed, SDLabError
from .log import LabLog
from .mesh import build_lift_mesh
from .nehari import (
    NehariFunction,
    NehariKind,
    builtin_nehari,
    closed_form_F,
    closed_form_G,
    extremal_F,
    extremal_G,
)
from .report import SCHEMA_VERSION, CoveringReport, DistortionReport, ProbeReport

log = LabLog.shared()

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_HYPOTHESIS = HypothesisFailed.exit_code

DEVIATION_WINDOW = 0.99
PAIR_BOUND = 0.9

Report = Union[DistortionReport, CoveringReport, ProbeReport]


def _radii(text: str) -> Tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"radii must be comma-separated numbers, got {text!r}") from exc


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from exc


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--p", dest="p_kind", default="classical", help="weight: classical, pi2 or pokornyi")
    parser.add_argument("--p-file", dest="p_file", default=None, help="two-column x p table on [0, 1)")
    parser.add_argument("--eps", type=float, default=None, help="domain cut: profiles live on [-1+eps, 1-eps]")
    parser.add_argument("--tol", type=float, default=None, help="ODE tolerance")
    parser.add_argument("--out", default=None, help="output path")
    parser.add_argument("--workers", type=int, default=None, help="worker threads (SDL_THREADS overrides)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sdlab", description="Schwarzian derivative distortion toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    profile = sub.add_parser("profile", help="extremal profiles F and G for a weight p")
    _add_common(profile)

    verify = sub.add_parser("verify", help="check a distortion or covering bound numerically")
    _add_common(verify)
    verify.add_argument("--theorem", required=True, choices=THEOREMS)
    verify.add_argument("--map", dest="map_name", default=None, help="curve name (1, 2, A-probe) or map name (3, 4, corollary)")
    verify.add_argument("--map-file", dest="map_file", default=None, help="JSON polynomial map spec")
    verify.add_argument("--pairs", type=int, default=200)
    verify.add_argument("--probe-samples", dest="probe_samples", type=int, default=500)
    verify.add_argument("--nodes", type=int, default=None, help="hypothesis sampling nodes")
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--radii", type=_radii, default=None)
    verify.add_argument("--alpha", type=_complex, default=0j)
    verify.add_argument("--resolution", type=int, default=None, help="lattice points per axis")
    verify.add_argument("--stencil-radius", dest="stencil_radius", type=int, default=None)
    verify.add_argument("--enneper-eps", dest="enneper_eps", type=float, default=None)
    verify.add_argument("--format", dest="report_format", default="json", choices=FORMATS)

    mesh = sub.add_parser("lift-mesh", help="OBJ mesh of the lifted surface with a sidecar CSV")
    _add_common(mesh)
    mesh.add_argument("--map", dest="map_name", default="enneper_eps")
    mesh.add_argument("--map-file", dest="map_file", default=None)
    mesh.add_argument("--rings", type=int, default=24)
    mesh.add_argument("--sectors", type=int, default=48)
    mesh.add_argument("--radius", dest="mesh_radius", type=float, default=0.9)
    mesh.add_argument("--enneper-eps", dest="enneper_eps", type=float, default=None)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    fields = {k: v for k, v in vars(args).items() if v is not None}
    fields["command"] = args.command
    if args.p_file is not None:
        fields["p_kind"] = None
    return RunConfig.from_env(**fields)


def resolve_p(cfg: RunConfig) -> NehariFunction:
    if cfg.p_file is not None:
        return NehariFunction.from_file(cfg.p_file)
    return builtin_nehari(cfg.p_kind)


def resolve_map(cfg: RunConfig) -> harmonic.HarmonicMap:
    if cfg.map_file is not None:
        return harmonic.load_map_spec(cfg.map_file)
    if cfg.map_name is None:
        raise ConfigError("--map or --map-file is required")
    return harmonic.builtin_map(cfg.map_name, enneper=cfg.enneper_eps)


def resolve_curve(cfg: RunConfig, p: NehariFunction) -> curves.CurveJet:
    if cfg.map_name is None:
        raise ConfigError("--map must name a curve for this check")
    return curves.builtin_curve(cfg.map_name, p, eps=cfg.eps)


# -- profile ---------------------------------------------------------------


def _summary_path(out: Path) -> Path:
    return out.with_suffix(".json")


def cmd_profile(cfg: RunConfig) -> int:
    p = resolve_p(cfg)
    F = extremal_F(p, cfg.eps, cfg.tol)
    G = extremal_G(p, cfg.eps, cfg.tol)
    xs = F.base.grid
    out = Path(cfg.out or f"{p.name}_profile.csv")

    Fx, dFx = np.asarray(F.F(xs)), np.asarray(F.dF(xs))
    Gx, dGx = np.asarray(G.F(xs)), np.asarray(G.dF(xs))
    uG = np.asarray(G.base.u_at(xs))
    with open(out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "u", "du", "F", "dF", "uG", "G", "dG"])
        for row in zip(xs, F.base.u, F.base.du, Fx, dFx, uG, Gx, dGx):
            writer.writerow([repr(float(v)) for v in row])

    window = np.abs(xs) <= DEVIATION_WINDOW
    dev_F: Optional[float] = None
    dev_G: Optional[float] = None
    if p.scale == 1.0 and p.kind is not NehariKind.CUSTOM:
        dev_F = float(np.max(np.abs(Fx[window] - closed_form_F(p.kind, xs[window]))))
        if p.kind in (NehariKind.CLASSICAL, NehariKind.PI2):
            dev_G = float(np.max(np.abs(Gx[window] - closed_form_G(p.kind, xs[window]))))

    summary = {
        "schema": SCHEMA_VERSION,
        "p_kind": p.name,
        "eps": cfg.eps,
        "nodes": int(xs.size),
        "window": DEVIATION_WINDOW,
        "max_abs_dev_F": dev_F,
        "max_abs_dev_G": dev_G,
        "F_endpoint": _finite_or_text(F.endpoint_value()),
        "G_endpoint": _finite_or_text(G.endpoint_value()),
    }
    _summary_path(out).write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    cols = log.columns("p", "nodes", "max |F - closed|", "max |G - closed|", "G(1)")
    cols.info.header()
    cols.info(p.name, xs.size, _fmt(dev_F), _fmt(dev_G), _fmt(G.endpoint_value()))
    cols.info.border()
    return EXIT_OK


def _finite_or_text(value: float):
    return value if math.isfinite(value) else repr(float(value))


def _fmt(value: Optional[float]) -> str:
    return "-" if value is None else f"{value:.3e}" if abs(value) < 1e-2 else f"{value:.9g}"


# -- verify ----------------------------------------------------------------


def run_verification(cfg: RunConfig) -> Report:
    """Dispatch one verification campaign; raises on hypothesis or numerical failure."""

    p = resolve_p(cfg)
    rng = np.random.default_rng(cfg.seed)
    theorem = cfg.theorem

    if theorem in ("1", "2", "A-probe"):
        curve = resolve_curve(cfg, p)
        if theorem == "1":
            curve = curves.normalize_curve(curve).curve
            return curves.verify_theorem1(curve, p, eps=cfg.eps, nodes=cfg.nodes, workers=cfg.workers)
        if theorem == "2":
            pairs = curves.random_pairs(rng, cfg.pairs, PAIR_BOUND)
            return curves.verify_theorem2(curve, p, pairs, eps=cfg.eps, nodes=cfg.nodes, workers=cfg.workers)
        grid = np.linspace(-1.0 + cfg.eps, 1.0 - cfg.eps, cfg.nodes)
        echo = curves.hypothesis_scan(curve, p, grid)
        collision = curves.injectivity_probe(curve, cfg.probe_samples, eps=cfg.eps)
        report = ProbeReport(curve=curve.label, hypothesis=echo, samples=cfg.probe_samples, collision=collision)
        if not echo.ok:
            log.warn("hypothesis S1 <= 2p fails for %s at x=%s (%s)", curve.label, echo.witness, echo.detail)
        return report

    f = resolve_map(cfg)
    if theorem == "3":
        pairs = harmonic.random_disk_pairs(rng, cfg.pairs, PAIR_BOUND)
        return harmonic.verify_theorem3(f, p, pairs, eps=cfg.eps, workers=cfg.workers)
    grid_args = dict(stencil_radius=cfg.stencil_radius, r_max=cfg.r_max, eps=cfg.eps)
    if theorem == "4":
        return metric.verify_theorem4(f, p, cfg.radii, cfg.resolution, **grid_args)
    if cfg.p_file is not None or cfg.p_kind != NehariKind.CLASSICAL.value:
        log.warn.once("the base-point covering check always uses the classical weight")
    return metric.verify_corollary16(f, cfg.alpha, cfg.radii, cfg.resolution, **grid_args)


def _report_ok(report: Report, cfg: RunConfig) -> bool:
    if isinstance(report, DistortionReport):
        return report.min_margin >= -cfg.margin_tol
    return report.ok


def _print_summary(report: Report, ok: bool) -> None:
    status = "ok" if ok else "VIOLATION"
    if isinstance(report, CoveringReport):
        cols = log.columns("r", "min rho", "bound", "margin", "allowance", "radial upper")
        cols.info.header()
        for i, r in enumerate(report.radii):
            upper = report.radial_upper[i] if i < len(report.radial_upper) else math.nan
            cols.info(r, _fmt(report.measured_min_rho[i]), _fmt(report.H_bound[i]), _fmt(report.margins[i]), _fmt(report.allowance[i]), _fmt(upper))
        cols.info.border()
        log.info("covering radius R = %.9g (%s)", report.covering_radius_R, status)
        return
    if isinstance(report, ProbeReport):
        found = "none" if report.collision is None else f"x1={report.collision[0]:.9g} x2={report.collision[1]:.9g}"
        log.info("self-intersection probe on %s: %s (%s)", report.curve, found, status)
        return
    cols = log.columns("theorem", "p", "samples", "min margin", "worst site", "status")
    cols.info.header()
    cols.info(report.theorem, report.p_kind, len(report.samples), _fmt(report.min_margin), report.worst_site, status)
    cols.info.border()
    if report.rounding_sites:
        log.info("%d sites inside the rounding band", len(report.rounding_sites))


def cmd_verify(cfg: RunConfig) -> int:
    if cfg.report_format == "obj":
        raise ConfigError("obj output belongs to lift-mesh")
    report = run_verification(cfg)
    ok = _report_ok(report, cfg)
    _print_summary(report, ok)
    if cfg.out:
        report.write(cfg.out, cfg.report_format)
    if isinstance(report, ProbeReport) and not report.hypothesis.ok:
        return EXIT_HYPOTHESIS
    return EXIT_OK if ok else EXIT_VIOLATION


# -- lift-mesh -------------------------------------------------------------


def cmd_lift_mesh(cfg: RunConfig) -> int:
    f = resolve_map(cfg)
    p = resolve_p(cfg)
    mesh = build_lift_mesh(f, p, cfg.rings, cfg.sectors, cfg.mesh_radius, workers=cfg.workers)
    out = Path(cfg.out or f"{f.label}.obj")
    mesh.write_obj(out)
    sidecar = mesh.write_sidecar(out.with_suffix(".csv"))
    log.info("wrote %s (%d vertices) and %s", out, mesh.vertex_count, sidecar)
    return EXIT_OK


COMMANDS = {"profile": cmd_profile, "verify": cmd_verify, "lift-mesh": cmd_lift_mesh}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        cfg = config_from_args(args)
        return COMMANDS[cfg.command](cfg)
    except SDLabError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return exc.exit_code
    except OSError as exc:
        log.error("i/o failure: %s", exc)
        return ConfigError.exit_code


if __name__ == "__main__":
    sys.exit(main())
