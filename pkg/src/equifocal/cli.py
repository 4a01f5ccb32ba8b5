"""Command-line front end.

Exit codes: 0 pass, 2 quantitative check failed, 1 runtime/input error,
64 usage error.  Reports are JSON (canonical) or a flat ``key,value`` CSV.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from ._util import jsonable, parallel_map
from .focal import (
    ScanOptions,
    ShapeOperator,
    count_and_bound,
    cut_focal_check,
    focal_scan,
    focal_scan_adapted,
    principal_curvature_constancy,
    verify_equifocal,
)
from .hopf import alpha_invariant, anchor_points, omega_F, structure_for, thorbergsson_check, thorbergsson_product
from .otfkm import build_clifford, eval_F, sample_level, shape_operator_at
from .symspace import RootSpectrum, SpaceKind, focal_lower_bound, make_space, parse_space, spectrum_at

EXIT_OK, EXIT_ERROR, EXIT_CHECK, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


@dataclass
class RunConfig:
    command: str
    params: dict
    seed: int
    tolerances: dict = field(default_factory=dict)
    output: str | None = None
    format: str = "json"


def _common(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o", default=None, help="report path (default: stdout)")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--config", default=None, help="JSON file of defaults; explicit flags win")


def _scan_tolerances(p):
    p.add_argument("--points-per-half-period", type=int, default=ScanOptions.points_per_half_period)
    p.add_argument("--t-tol", type=float, default=ScanOptions.t_tol)
    p.add_argument("--null-tol", type=float, default=ScanOptions.null_tol)
    p.add_argument("--det-tol", type=float, default=ScanOptions.det_tol)


def _otfkm_args(p, samples=20):
    p.add_argument("--m", type=int)
    p.add_argument("--l", type=int)
    p.add_argument("--level", type=float, default=0.0)
    p.add_argument("--samples", type=int, default=samples)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="equifocal", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"equifocal {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("focal-scan", help="focal parameters along one normal circle")
    p.add_argument("--space", help="sphere:N | cpn:N | hpn:N | cap2 | generic:FILE")
    p.add_argument("--direction", default=None, help="comma-separated abelian coordinates (generic)")
    p.add_argument("--shape",
                   help="diag:v1,v2,... | file:PATH | otfkm:M,L[,LEVEL[,INDEX]]")
    p.add_argument("--tmax", type=float, default=None, help="scan end (default: circle length)")
    p.add_argument("--circle-length", type=float, default=2 * math.pi)
    p.add_argument("--adapted", action="store_true", help="closed-form scan (curvature-adapted only)")
    _scan_tolerances(p)
    _common(p)

    p = sub.add_parser("otfkm", help="Clifford system, level samples and curvature tables")
    _otfkm_args(p, samples=5)
    _common(p)

    p = sub.add_parser("invariants", help="Omega_F and alpha statistics on a level set")
    _otfkm_args(p)
    p.add_argument("--structure", choices=["j", "jprime"], default="j")
    p.add_argument("--anchor-points", action="store_true")
    p.add_argument("--g-degree", type=float, default=4.0)
    _common(p)

    p = sub.add_parser("bounds", help="focal-distance lower bounds for an ambient space")
    p.add_argument("--space")
    p.add_argument("--circle-length", type=float, default=2 * math.pi)
    p.add_argument("--g", type=int, default=None)
    p.add_argument("--m1", type=int, default=None)
    p.add_argument("--m2", type=int, default=None)
    _common(p)

    p = sub.add_parser("verify", help="end-to-end equifocality check on an OT-FKM level set")
    _otfkm_args(p)
    _scan_tolerances(p)
    _common(p)
    return parser


def _scan_options(ns) -> ScanOptions:
    return ScanOptions(ns.points_per_half_period, ns.t_tol, ns.null_tol, ns.det_tol)


def _read_json(path: str, what: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{what}: cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{what}: {path} line {exc.lineno}: {exc.msg}") from None


def _load_shape(spec: str, spectrum: RootSpectrum, seed: int):
    kind, _, arg = spec.partition(":")
    if kind == "diag":
        try:
            vals = [float(v) for v in arg.split(",") if v.strip()]
        except ValueError:
            raise InputError(f"shape: cannot parse diagonal {arg!r}") from None
        return np.diag(vals), {}
    if kind == "file":
        doc = _read_json(arg, "shape")
        mat = doc.get("matrix") if isinstance(doc, dict) else doc
        if mat is None:
            raise InputError(f"shape: {arg}: missing field 'matrix'")
        try:
            mat = np.array(mat, dtype=float)
        except (TypeError, ValueError):
            raise InputError(f"shape: {arg}: field 'matrix' must be a numeric 2-D array") from None
        if mat.ndim != 2:
            raise InputError(f"shape: {arg}: field 'matrix' must be a 2-D array")
        return mat, {}
    if kind == "otfkm":
        parts = arg.split(",")
        try:
            m, l = int(parts[0]), int(parts[1])
            level = float(parts[2]) if len(parts) > 2 else 0.0
            index = int(parts[3]) if len(parts) > 3 else 0
        except (ValueError, IndexError):
            raise InputError(f"shape: expected otfkm:M,L[,LEVEL[,INDEX]], got {spec!r}") from None
        system = build_clifford(m, l)
        z = sample_level(system, level, index + 1, seed)[index]
        sample = shape_operator_at(system, z)
        return sample.shape.matrix, {"z": z, "level": sample.level}
    raise InputError(f"shape: unknown source {kind!r}")


def cmd_focal_scan(ns) -> tuple[dict, bool]:
    space = parse_space(ns.space, ns.circle_length)
    direction = None
    if ns.direction:
        direction = [float(v) for v in ns.direction.split(",")]
    spectrum = spectrum_at(space, direction)
    matrix, extra = _load_shape(ns.shape, spectrum, ns.seed)
    if matrix.shape != (spectrum.tangent_dim,) * 2:
        raise InputError(
            f"shape: matrix is {matrix.shape[0]}x{matrix.shape[1]}, space needs "
            f"{spectrum.tangent_dim}x{spectrum.tangent_dim}"
        )
    shape = ShapeOperator(matrix, spectrum.frame_tag)
    l = space.circle_length
    t_max = l if ns.tmax is None else min(ns.tmax, l)
    if ns.adapted:
        profile = focal_scan_adapted(spectrum, shape, t_max, l, ns.t_tol)
    else:
        profile = focal_scan(spectrum, shape, t_max, _scan_options(ns), l)
    bound = count_and_bound(profile, spectrum, space.beta_sup)
    passed = bound.passed and (bound.sphere_passed is not False)
    result = {
        "space": space.to_dict(),
        "spectrum": spectrum.to_dict(),
        "t_max": t_max,
        "profile": profile.to_dict(),
        "bound": asdict(bound),
    }
    if extra:
        result["sample"] = extra
    return result, passed


def cmd_otfkm(ns) -> tuple[dict, bool]:
    system = build_clifford(ns.m, ns.l)
    zs = sample_level(system, ns.level, ns.samples, ns.seed)
    samples = parallel_map(lambda z: shape_operator_at(system, z), zs)
    table = [
        {"value": k, "mult": m, "focal_t": math.pi / 2 - math.atan(k)}
        for k, m in samples[0].curvatures
    ]
    result = {
        "system": system.to_dict(),
        "expected_multiplicities": list(system.multiplicities),
        "samples": [s.to_dict() for s in samples],
        "curvature_table": table,
    }
    return result, True


def cmd_invariants(ns) -> tuple[dict, bool]:
    system = build_clifford(ns.m, ns.l)
    structure = structure_for("J" if ns.structure == "j" else "Jprime", ns.l)
    rows = []
    for i, z in enumerate(sample_level(system, ns.level, ns.samples, ns.seed)):
        rows.append({"point": f"sample{i}", "F": eval_F(system, z),
                     "omega": omega_F(system, structure, z),
                     "alpha": alpha_invariant(system, structure, z, ns.g_degree)})
    if ns.anchor_points:
        if system.m != 1 or ns.l % 2 or ns.l < 4:
            raise InputError("anchor-points: need m=1 and even l >= 4")
        for name, z in zip(("z", "zhat"), anchor_points(ns.l // 2 - 1)):
            if abs(eval_F(system, z) - ns.level) > 1e-10:
                raise InputError(f"anchor-points: anchors lie on level 0, not {ns.level}")
            rows.append({"point": name, "F": eval_F(system, z),
                         "omega": omega_F(system, structure, z),
                         "alpha": alpha_invariant(system, structure, z, ns.g_degree)})
    stats = {}
    for key in ("omega", "alpha"):
        v = np.array([r[key] for r in rows])
        stats[key] = {"mean": v.mean(), "std": v.std(), "min": v.min(), "max": v.max(),
                      "count": len(v)}
    a = stats["alpha"]
    verdict = "constant" if a["std"] < 1e-6 * max(1.0, abs(a["mean"])) else "non-constant"
    result = {
        "invariant": "alpha",
        "structure": structure.label.value,
        "level": ns.level,
        "g_degree": ns.g_degree,
        "stats": stats,
        "verdict": verdict,
        "rows": rows,
    }
    return result, True


def cmd_bounds(ns) -> tuple[dict, bool]:
    space = parse_space(ns.space, ns.circle_length)
    result = {"space": space.to_dict(), "focal_lower_bound": focal_lower_bound(space)}
    passed = True
    if space.kind is SpaceKind.SPHERE:
        result["sphere_bound"] = math.pi / space.dim
    if space.rank == 1 and space.kind is not SpaceKind.GENERIC:
        req = thorbergsson_product(space)
        result["thorbergsson"] = {
            "required_product": req,
            "requirement": f"g(m1+m2) = {req}",
            "focal_distance_lower_bound": space.circle_length / req,
        }
        given = (ns.g, ns.m1, ns.m2)
        if any(v is not None for v in given):
            if None in given:
                raise InputError("bounds: --g, --m1 and --m2 must be given together")
            check = thorbergsson_check(space, *given)
            result["thorbergsson"]["check"] = asdict(check)
            passed = check.passed
    return result, passed


def cmd_verify(ns) -> tuple[dict, bool]:
    system = build_clifford(ns.m, ns.l)
    zs = sample_level(system, ns.level, ns.samples, ns.seed)
    samples = parallel_map(lambda z: shape_operator_at(system, z), zs)
    sphere = make_space("sphere", system.dim - 1)
    spectrum = spectrum_at(sphere)
    opts = _scan_options(ns)
    profiles = parallel_map(lambda s: focal_scan(spectrum, s.shape, sphere.circle_length, opts,
                                                 sphere.circle_length), samples)
    eq = verify_equifocal(profiles)
    const = principal_curvature_constancy(samples)
    cuts = [cut_focal_check(p, s.shape) for p, s in zip(profiles, samples)]
    bounds = [count_and_bound(p, spectrum) for p in profiles]
    lower = focal_lower_bound(sphere)
    expected = list(system.multiplicities)
    checks = {
        "equifocal": eq.passed,
        "curvature_constancy": const.constant,
        "cut_focal": all(c.passed for c in cuts),
        "focal_count_bound": all(b.passed and b.sphere_passed is not False for b in bounds),
        "distance_lower_bound": bool(eq.passed and eq.focal_distance >= lower),
        "multiplicities": bool(eq.passed and [eq.m1, eq.m2] == expected),
    }
    result = {
        "system": {"m": system.m, "l": system.l},
        "level": ns.level,
        "equifocal": eq.to_dict(),
        "curvature_constancy": asdict(const),
        "cut_focal_max_product": max(c.product for c in cuts),
        "focal_count": {"max_L": max(b.count for b in bounds), "bound": bounds[0].bound,
                        "sphere_bound": bounds[0].sphere_bound},
        "focal_lower_bound": lower,
        "expected_multiplicities": expected,
        "profile": eq.profiles[0].to_dict() if eq.passed else profiles[0].to_dict(),
        "checks": checks,
    }
    return result, all(checks.values())


COMMANDS = {
    "focal-scan": cmd_focal_scan,
    "otfkm": cmd_otfkm,
    "invariants": cmd_invariants,
    "bounds": cmd_bounds,
    "verify": cmd_verify,
}
TOLERANCE_KEYS = ("points_per_half_period", "t_tol", "null_tol", "det_tol")
# checked after --config is merged, so a config file may supply them
REQUIRED = {
    "focal-scan": ("space", "shape"),
    "otfkm": ("m", "l"),
    "invariants": ("m", "l"),
    "bounds": ("space",),
    "verify": ("m", "l"),
}


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def render(report: dict, fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["key", "value"])
        for k, v in _flatten(report):
            writer.writerow([k, "" if v is None else json.dumps(v)])
        return buf.getvalue()
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def parse_config(argv, parser) -> argparse.Namespace:
    ns = parser.parse_args(argv)
    if ns.config:
        cfg = _read_json(ns.config, "config")
        if not isinstance(cfg, dict):
            raise InputError("config: top level must be a JSON object")
        known = set(vars(ns))
        for key in cfg:
            if key.replace("-", "_") not in known:
                raise InputError(f"config: unknown field {key!r} for {ns.command}")
        sub = parser._subparsers._group_actions[0].choices[ns.command]
        sub.set_defaults(**{k.replace("-", "_"): v for k, v in cfg.items()})
        ns = parser.parse_args(argv)
    missing = [k for k in REQUIRED[ns.command] if getattr(ns, k) is None]
    if missing:
        flags = ", ".join("--" + k.replace("_", "-") for k in missing)
        raise UsageError(f"equifocal {ns.command}: error: the following arguments are required: {flags}")
    return ns


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parse_config(argv, parser)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"equifocal: {exc}", file=sys.stderr)
        return EXIT_ERROR

    params = {k: v for k, v in vars(ns).items()
              if k not in ("command", "seed", "output", "format", "config") and k not in TOLERANCE_KEYS}
    tolerances = {k: getattr(ns, k) for k in TOLERANCE_KEYS if hasattr(ns, k)}
    config = RunConfig(ns.command, params, ns.seed, tolerances, ns.output, ns.format)
    try:
        result, passed = COMMANDS[ns.command](ns)
    except Exception as exc:  # every library error becomes exit 1 with its message
        print(f"equifocal {ns.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR

    report = jsonable({
        "tool": "equifocal",
        "version": __version__,
        "command": config.command,
        "config": config.params,
        "seed": config.seed,
        "tolerances": config.tolerances,
        "passed": passed,
        "result": result,
    })
    text = render(report, config.format)
    if config.output:
        Path(config.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if passed else EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
