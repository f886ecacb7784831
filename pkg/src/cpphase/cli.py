"""Command-line front end: JSON job configs in, tables / CSV / JSON out.

Exit codes: 0 success, 1 verification failure, 2 input syntax error,
3 domain invariant violation. All diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import channels as ch
from . import geometry as geo
from . import interferometry as itf
from .numerics import dag, hermitian_eig, max_abs
from .states import density_from_bloch, spectral_gap, validate_density

DEFAULT_VERIFY_TOL = 1e-10
DEFAULT_PT_TOL = 1e-6
DEGENERACY_GAP = 1e-9


class ConfigError(Exception):
    """Config file cannot be interpreted (syntax / missing fields): exit 2."""


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------

def _load_config(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"malformed JSON in {path}: {exc.msg} at line {exc.lineno} column {exc.colno}"
        ) from exc
    if not isinstance(cfg, dict):
        raise ConfigError("top-level config must be a JSON object")
    return cfg


def _decode_matrix(obj, what: str) -> np.ndarray:
    """Row-major nested arrays with [re, im] entry pairs."""
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{what} is not a numeric nested array") from exc
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ConfigError(f"{what} must be a matrix of [re, im] pairs")
    return arr[..., 0] + 1.0j * arr[..., 1]


def _encode_matrix(m: np.ndarray) -> list:
    return [[[float(x.real), float(x.imag)] for x in row] for row in np.asarray(m, dtype=complex)]


def _parse_state(cfg: dict) -> np.ndarray:
    section = cfg.get("state")
    if not isinstance(section, dict):
        raise ConfigError("config needs a 'state' object")
    present = [key for key in ("bloch", "density") if key in section]
    if len(present) != 1:
        raise ValueError(
            f"exactly one state representation required (bloch or density), got {present or 'none'}"
        )
    if present[0] == "bloch":
        vec = section["bloch"]
        if not isinstance(vec, (list, tuple)) or len(vec) != 3:
            raise ConfigError("'bloch' must be a list of 3 numbers")
        return density_from_bloch(np.asarray(vec, dtype=float))
    rho = _decode_matrix(section["density"], "'density'")
    return validate_density(rho)


def _parse_channel(cfg: dict, sys_dim: int) -> ch.KrausChannel:
    section = cfg.get("channel")
    if not isinstance(section, dict):
        raise ConfigError("config needs a 'channel' object")
    preset = section.get("preset")
    if preset is None:
        raise ConfigError("channel needs a 'preset' name")
    if preset == "identity":
        return ch.identity_channel(sys_dim)
    if preset in ("depolarizing", "amplitude_damping"):
        if "p" not in section:
            raise ConfigError(f"channel preset '{preset}' needs parameter 'p'")
        maker = ch.depolarizing if preset == "depolarizing" else ch.amplitude_damping
        return maker(float(section["p"]))
    if preset == "kraus":
        ops = section.get("operators")
        if not isinstance(ops, list) or not ops:
            raise ConfigError("channel preset 'kraus' needs a nonempty 'operators' list")
        return ch.KrausChannel(tuple(_decode_matrix(op, f"Kraus operator {i}") for i, op in enumerate(ops)))
    raise ValueError(f"unknown channel preset {preset!r}")


def _phase_tol(cfg: dict) -> float:
    return float(cfg.get("tolerances", {}).get("phase", itf.PHASE_TOL))


def _verify_tol(cfg: dict, args) -> float:
    if getattr(args, "tol", None) is not None:
        return float(args.tol)
    return float(cfg.get("tolerances", {}).get("verify", DEFAULT_VERIFY_TOL))


def _parse_path(cfg: dict):
    """Returns (unitary_path, loop_solid_angle_or_None)."""
    section = cfg.get("path")
    if not isinstance(section, dict):
        raise ConfigError("config needs a 'path' object")
    kind = section.get("type")
    if kind == "geodesic_polygon":
        vertices = section.get("vertices")
        if not isinstance(vertices, list) or len(vertices) < 2:
            raise ConfigError("'vertices' must list at least 2 unit vectors")
        steps = int(section.get("steps_per_edge", 300))
        pts = np.asarray(vertices, dtype=float)
        norms = np.linalg.norm(pts, axis=1)
        if np.max(np.abs(norms - 1.0)) > 1e-6:
            raise ValueError("loop vertices must be unit vectors")
        pts = pts / norms[:, None]
        path = geo.geodesic_polygon_path(pts, steps_per_edge=steps)
        omega = None
        if pts.shape[0] >= 3:
            omega = geo.solid_angle(geo.BlochLoop(kind="geodesic_polygon", points=pts))
        return path, omega
    if kind == "axis_rotation":
        axis = section.get("axis")
        if not isinstance(axis, (list, tuple)) or len(axis) != 3:
            raise ConfigError("'axis' must be a list of 3 numbers")
        if "angle" not in section:
            raise ConfigError("'axis_rotation' path needs an 'angle'")
        steps = int(section.get("steps", 1000))
        return geo.axis_rotation_path(np.asarray(axis, dtype=float), float(section["angle"]), steps), None
    raise ConfigError("path 'type' must be 'geodesic_polygon' or 'axis_rotation'")


# ---------------------------------------------------------------------------
# report formatting
# ---------------------------------------------------------------------------

def _pattern_table(patterns) -> str:
    lines = [
        f"{'mu':>3}  {'re':>22}  {'im':>22}  {'visibility':>22}  {'phase_radians':>22}  {'phase_defined':>13}"
    ]
    for p in patterns:
        lines.append(
            f"{p.mu:>3}  {p.value.real:>22.15e}  {p.value.imag:>22.15e}  "
            f"{p.visibility:>22.15e}  {p.phase:>22.15e}  {'yes' if p.phase_defined else 'no':>13}"
        )
    return "\n".join(lines)


def _emit(payload: str, out_path):
    if out_path:
        Path(out_path).write_text(payload + "\n")
    else:
        sys.stdout.write(payload + "\n")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_pattern(cfg: dict, args) -> tuple[str, int]:
    rho = _parse_state(cfg)
    channel = _parse_channel(cfg, rho.shape[0])
    patterns = itf.pattern_set(channel, rho, phase_tol=_phase_tol(cfg))
    return _pattern_table(patterns), 0


def cmd_fringe(cfg: dict, args) -> tuple[str, int]:
    rho = _parse_state(cfg)
    channel = _parse_channel(cfg, rho.shape[0])
    if "mu" not in cfg:
        raise ConfigError("fringe needs a flip index 'mu'")
    grid_spec = cfg.get("chi_grid")
    if not isinstance(grid_spec, (list, tuple)) or len(grid_spec) != 3:
        raise ConfigError("fringe needs 'chi_grid' as [start, stop, points]")
    start, stop, points = float(grid_spec[0]), float(grid_spec[1]), int(grid_spec[2])
    if points < 1:
        raise ConfigError("'chi_grid' needs at least one point")
    pat = itf.pattern(channel, rho, int(cfg["mu"]), phase_tol=_phase_tol(cfg))
    chi = np.linspace(start, stop, points)
    intensities = itf.fringe(pat, chi)
    rows = "\n".join(f"{c:.15g},{i:.15g}" for c, i in zip(chi, intensities))
    return "chi,intensity\n" + rows, 0


def cmd_verify(cfg: dict, args) -> tuple[str, int]:
    rho = _parse_state(cfg)
    channel = _parse_channel(cfg, rho.shape[0])
    tol = _verify_tol(cfg, args)
    dilation = ch.dilate(channel)
    lines = [f"{'mu':>3}  {'kraus_vs_dilation':>18}  {'kraus_vs_purif':>18}  {'dilation_vs_purif':>18}"]
    worst = 0.0
    for mu in range(channel.env_dim):
        z_kraus = itf.pattern(channel, rho, mu).value
        z_dil = itf.pattern_via_dilation(dilation, rho, mu).value
        z_pur = itf.pattern_via_purification(channel, rho, mu).value
        devs = (abs(z_kraus - z_dil), abs(z_kraus - z_pur), abs(z_dil - z_pur))
        worst = max(worst, *devs)
        lines.append(f"{mu:>3}  {devs[0]:>18.3e}  {devs[1]:>18.3e}  {devs[2]:>18.3e}")
    ok = worst < tol
    verdict = "PASS" if ok else "FAIL"
    lines.append(f"max pairwise deviation: {worst:.3e} (tolerance {tol:.3e})")
    lines.append(verdict)
    return "\n".join(lines), 0 if ok else 1


def cmd_geomphase(cfg: dict, args) -> tuple[str, int]:
    rho = _parse_state(cfg)
    channel = _parse_channel(cfg, rho.shape[0])
    path, omega = _parse_path(cfg)
    if path.dim != rho.shape[0]:
        raise ValueError(
            f"path dimension {path.dim} does not match state dimension {rho.shape[0]}"
        )
    gap = spectral_gap(rho)
    if gap < DEGENERACY_GAP:
        raise ValueError(
            f"state eigenbasis is degenerate (smallest eigenvalue gap {gap:.3e}); "
            "the parallel transport basis is not physically determined"
        )
    _, basis = hermitian_eig(rho)
    corrected = geo.pt_correct(path, basis)
    residual = geo.pt_residual(corrected, basis)
    composed = channel.compose_unitary(corrected.final)
    patterns = itf.pattern_set(composed, rho, phase_tol=_phase_tol(cfg))
    lines = [_pattern_table(patterns), f"pt_residual: {residual:.3e}"]
    if omega is not None:
        lines.append(f"solid_angle: {omega:.15g}")
    pt_tol = float(cfg.get("tolerances", {}).get("pt_residual", DEFAULT_PT_TOL))
    if residual > pt_tol:
        lines.append(f"warning: pt_residual {residual:.3e} exceeds {pt_tol:.3e}")
    return "\n".join(lines), 0


def cmd_dilate(cfg: dict, args) -> tuple[str, int]:
    rho = None
    if "state" in cfg:
        rho = _parse_state(cfg)
    channel = _parse_channel(cfg, rho.shape[0] if rho is not None else int(cfg.get("dim", 2)))
    dilation = ch.dilate(channel)
    d = dilation.u.shape[0]
    unitarity = max_abs(dag(dilation.u) @ dilation.u - np.eye(d))
    recovered = ch.kraus_from_dilation(dilation)
    roundtrip = max(
        max_abs(a - b) for a, b in zip(recovered.kraus, channel.kraus)
    )
    doc = {
        "sys_dim": dilation.sys_dim,
        "env_dim": dilation.env_dim,
        "ref_env_index": dilation.ref_env_index,
        "unitary": _encode_matrix(dilation.u),
        "unitarity_residual": unitarity,
        "kraus_roundtrip_residual": roundtrip,
    }
    return json.dumps(doc, indent=2, sort_keys=True), 0


_COMMANDS = {
    "pattern": cmd_pattern,
    "fringe": cmd_fringe,
    "verify": cmd_verify,
    "geomphase": cmd_geomphase,
    "dilate": cmd_dilate,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cp-phase",
        description="Interference patterns and geometric phases of CP maps",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("pattern", "full interference pattern set of a channel and state"),
        ("fringe", "CSV fringe profile for one flip index"),
        ("verify", "cross-check the three pattern computation routes"),
        ("geomphase", "pattern set after a parallel-transported loop"),
        ("dilate", "emit the system-environment dilation unitary as JSON"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="JSON job configuration file")
        p.add_argument("--out", default=None, help="write the report to this file instead of stdout")
        p.add_argument("--tol", type=float, default=None, help="override the verification tolerance")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _load_config(args.config)
        payload, code = _COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 3
    _emit(payload, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
