"""Command-line entry point.

Subcommands ``transform``, ``maxprofile``, ``verify`` and ``kernel-split``.
Settings come from command-line flags, then a JSON ``--config`` file, then
defaults, in that order of precedence. Outputs go to ``--out`` (default: the
``ANGMAX_OUT`` environment variable, else ``./angmax-out``).

Exit codes: 0 success, 1 a verification flag failed, 2 configuration error,
3 domain error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .func_model import AngmaxError, DomainError, ExpFunction, RadialGrid, SimpleFunction, lp_norm
from .kernel_split import p2_threshold_radius, reflected_geometry, split_convolutions
from .maximal import AngleSearchConfig, angular_max, distribution, format_float, lp_norm_profile, max_profile
from .transforms import TransformKind, evaluate_polar, hilbert, poisson, stieltjes, cauchy_integral
from . import verify

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_DOMAIN = 0, 1, 2, 3

EXPERIMENTS = ("theorem1", "theorem2", "theorem3", "theorem4", "ray-hy", "cauchy-rep",
               "identity-sec4", "splitting", "lemma1")


class ConfigError(Exception):
    pass


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file; flags override its values")
    common.add_argument("--f", dest="f", help="fixture:NAME, inline JSON or a path to a JSON file")
    common.add_argument("--kind", help="poisson, stieltjes, laplace, cauchy or hilbert")
    common.add_argument("--p", help="exponent or comma-separated exponents (inf allowed)")
    for name in ("rho", "theta", "x", "y"):
        common.add_argument(f"--{name}", help="value or comma-separated values")
    common.add_argument("--z", help="complex point(s), e.g. 0.5+1j, comma-separated")
    common.add_argument("--grid", help="rho_min,rho_max,count")
    common.add_argument("--seed", type=int)
    common.add_argument("--jobs", type=int)
    common.add_argument("--out", help="output directory")
    common.add_argument("--format", choices=("csv", "json", "both"))

    parser = argparse.ArgumentParser(prog="angmax", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"angmax {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("transform", parents=[common], help="evaluate a transform at points")
    sub.add_parser("maxprofile", parents=[common], help="angular maximal function on a radial grid")
    v = sub.add_parser("verify", parents=[common], help="run an experiment and write its report")
    v.add_argument("experiment")
    sub.add_parser("kernel-split", parents=[common],
                   help="split geometry and g1/g2 at radius --rho")
    return parser


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    return data


def _merge(args: argparse.Namespace) -> dict:
    cfg = _load_config(args.config)
    for key in ("f", "kind", "p", "rho", "theta", "x", "y", "z", "grid", "seed", "jobs", "out", "format"):
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    cfg.setdefault("format", "both")
    cfg.setdefault("jobs", 1)
    cfg["command"] = args.command
    if args.command == "verify":
        cfg["experiment"] = args.experiment
    return cfg


def _floats(value, name) -> list[float]:
    if value is None:
        return []
    items = value if isinstance(value, list) else str(value).split(",")
    try:
        return [float(v) for v in items]
    except ValueError:
        raise ConfigError(f"--{name}: cannot parse {value!r}") from None


def _complexes(value) -> list[complex]:
    if value is None:
        return []
    items = value if isinstance(value, list) else str(value).split(",")
    out = []
    for v in items:
        try:
            out.append(complex(*v) if isinstance(v, list) else complex(str(v).replace(" ", "")))
        except (ValueError, TypeError):
            raise ConfigError(f"--z: cannot parse {v!r}") from None
    return out


def _grid(cfg) -> RadialGrid | None:
    g = cfg.get("grid")
    if g is None:
        return None
    parts = g if isinstance(g, list) else str(g).split(",")
    if len(parts) != 3:
        raise ConfigError("--grid expects rho_min,rho_max,count")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(float(parts[2]))
    except ValueError:
        raise ConfigError(f"--grid: cannot parse {g!r}") from None
    if not (0 < lo < hi < math.inf) or n < 2:
        raise ConfigError("--grid requires 0 < rho_min < rho_max and count >= 2")
    return RadialGrid(lo, hi, n)


def _angle_cfg(cfg) -> AngleSearchConfig | None:
    raw = cfg.get("angle_search")
    if raw is None:
        return None
    try:
        return AngleSearchConfig(**raw)
    except TypeError as exc:
        raise ConfigError(f"angle_search: {exc}") from None


def load_function(source):
    """Parse a function source: ``fixture:NAME``, inline JSON, or a JSON file path.

    JSON objects hold ``breakpoints`` and ``values`` for a simple function, or
    ``{"exp": {"amplitude": A, "rate": c}}`` for ``A exp(-c t)``.
    """
    if source is None:
        raise ConfigError("a function source (--f) is required")
    if isinstance(source, dict):
        data = source
    else:
        text = str(source).strip()
        if text.startswith("fixture:"):
            return verify.fixture(text[len("fixture:"):])
        if not text.startswith("{"):
            try:
                text = Path(text).read_text()
            except OSError as exc:
                raise ConfigError(f"cannot read function file {source}: {exc}") from None
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid function JSON: {exc}") from None
    if isinstance(data, dict) and "exp" in data:
        e = data["exp"]
        return ExpFunction(complex(*e["amplitude"]) if isinstance(e.get("amplitude"), list)
                           else float(e.get("amplitude", 1.0)), float(e.get("rate", 1.0)))
    return SimpleFunction.from_dict(data)


def _out_dir(cfg) -> Path:
    out = Path(cfg.get("out") or os.environ.get("ANGMAX_OUT") or "angmax-out")
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {out}: {exc}") from None
    return out


def _echo(cfg) -> dict:
    return {k: cfg[k] for k in sorted(cfg) if k not in ("out", "config")}


def _csv_header(cfg) -> str:
    return f"# angmax {__version__}\n# config {json.dumps(_echo(cfg), sort_keys=True)}\n"


def _write(out: Path, name: str, text: str) -> Path:
    path = out / name
    path.write_text(text)
    return path


# --- commands -----------------------------------------------------------------

def cmd_transform(cfg) -> int:
    if cfg.get("kind") is None:
        raise ConfigError("--kind is required")
    kind = TransformKind.parse(cfg["kind"])
    f = load_function(cfg.get("f"))
    if kind is TransformKind.POISSON:
        xs, ys = _floats(cfg.get("x"), "x"), _floats(cfg.get("y"), "y")
        if not xs or len(xs) != len(ys):
            raise ConfigError("poisson needs --x and --y of equal length")
        cols = ["x", "y"]
        vals = [complex(poisson(f, x, y)) for x, y in zip(xs, ys)]
        pts = list(zip(xs, ys))
    elif kind is TransformKind.HILBERT:
        xs = _floats(cfg.get("x"), "x")
        if not xs:
            raise ConfigError("hilbert needs --x")
        cols = ["x"]
        vals = [complex(hilbert(f, x)) for x in xs]
        pts = [(x,) for x in xs]
    elif kind in (TransformKind.STIELTJES, TransformKind.CAUCHY_INTEGRAL) and cfg.get("z") is not None:
        zs = _complexes(cfg.get("z"))
        fn = stieltjes if kind is TransformKind.STIELTJES else cauchy_integral
        cols = ["z_re", "z_im"]
        vals = [complex(fn(f, z)) for z in zs]
        pts = [(z.real, z.imag) for z in zs]
    else:
        rhos, thetas = _floats(cfg.get("rho"), "rho"), _floats(cfg.get("theta"), "theta")
        if not rhos or len(rhos) != len(thetas):
            raise ConfigError(f"{kind.value} needs --rho and --theta of equal length (or --z)")
        cols = ["rho", "theta"]
        vals = [complex(evaluate_polar(kind, f, r, t)) for r, t in zip(rhos, thetas)]
        pts = list(zip(rhos, thetas))
    lines = [",".join(cols + ["value_re", "value_im"])]
    for pt, v in zip(pts, vals):
        lines.append(",".join([format_float(c) for c in pt] + [format_float(v.real), format_float(v.imag)]))
    body = "\n".join(lines) + "\n"
    sys.stdout.write(body)
    if cfg.get("out") or os.environ.get("ANGMAX_OUT"):
        _write(_out_dir(cfg), "transform.csv", _csv_header(cfg) + body)
    return EXIT_OK


def cmd_maxprofile(cfg) -> int:
    if cfg.get("kind") is None:
        raise ConfigError("--kind is required")
    kind = TransformKind.parse(cfg["kind"])
    f = load_function(cfg.get("f"))
    grid = _grid(cfg) or RadialGrid()
    prof = max_profile(kind, f, grid, cfg=_angle_cfg(cfg), jobs=int(cfg["jobs"]))
    ps = _floats(cfg.get("p"), "p") or [2.0]
    norms = []
    for p in ps:
        if not p >= 1:
            raise DomainError("exponents must satisfy p >= 1")
        # the Laplace maximal function is measured in the conjugate exponent
        q = (math.inf if p == 1 else p / (p - 1)) if kind is TransformKind.LAPLACE_RAY else p
        res = lp_norm_profile(prof, q, tail_policy="report")
        fin = lp_norm(f, p)
        norms.append({"p": p, "q": q, "profile_norm": res.norm, "tail": res.tail,
                      "input_norm": fin, "ratio": res.norm / fin if fin else 0.0})
    top = float(np.max(prof.values))
    weak = 0.0
    if top > 0:
        weak = distribution(prof, np.geomspace(1e-3 * top, top, 64)).weak_norm
    summary = {"version": __version__, "config": _echo(cfg), "kind": kind.value,
               "grid": {"rho_min": grid.rho_min, "rho_max": grid.rho_max, "count": grid.count},
               "profile_max": top, "weak_norm": weak, "norms": norms}
    out = _out_dir(cfg)
    fmt = cfg["format"]
    if fmt in ("csv", "both"):
        _write(out, "profile.csv", _csv_header(cfg) + prof.to_csv())
    if fmt in ("json", "both"):
        _write(out, "summary.json", verify.dumps(summary) + "\n")
    sys.stdout.write(verify.dumps({"profile_max": top, "weak_norm": weak, "norms": norms}) + "\n")
    return EXIT_OK


def _family(cfg, default: verify.FunctionFamily) -> verify.FunctionFamily:
    over = dict(cfg.get("family", {}))
    if cfg.get("seed") is not None:
        over["seed"] = int(cfg["seed"])
    for key in ("breakpoint_range", "value_range", "fixtures"):
        if key in over:
            over[key] = tuple(over[key])
    try:
        return verify.FunctionFamily(**{**default.__dict__, **over})
    except TypeError as exc:
        raise ConfigError(f"family: {exc}") from None


def _run_experiment(cfg) -> verify.RatioReport:
    name = cfg["experiment"]
    grid, acfg, jobs = _grid(cfg), _angle_cfg(cfg), int(cfg["jobs"])
    ps = _floats(cfg.get("p"), "p") or None
    kw = {} if ps is None else {"ps": tuple(ps)}
    if name == "theorem1":
        return verify.run_theorem1(_family(cfg, verify.NONNEG_FAMILY), grid, acfg, jobs=jobs)
    if name == "theorem2":
        return verify.run_theorem2(_family(cfg, verify.NONNEG_FAMILY), grid, acfg, jobs=jobs, **kw)
    if name == "theorem3":
        return verify.run_theorem3(_family(cfg, verify.SIGNED_FAMILY), grid, acfg, jobs=jobs, **kw)
    if name == "theorem4":
        return verify.run_theorem4(_family(cfg, verify.SIGNED_FAMILY), grid, acfg, jobs=jobs, **kw)
    if name == "ray-hy":
        thetas = _floats(cfg.get("theta"), "theta") or None
        return verify.run_ray_hy(_family(cfg, verify.RAY_FAMILY), thetas=thetas, grid=grid,
                                 jobs=jobs, **kw)
    if name == "cauchy-rep":
        return verify.run_cauchy_suite(T=float(cfg.get("T", 1e3)), nodes=int(cfg.get("nodes", 10_000)),
                                       family=_family(cfg, verify.SIGNED_FAMILY))
    if name == "identity-sec4":
        f = load_function(cfg["f"]) if cfg.get("f") is not None else None
        zs = _complexes(cfg.get("z")) or None
        return verify.run_identity_sec4(f, zs)
    if name == "splitting":
        radii = None
        if grid is not None:
            radii = grid.nodes
        return verify.run_splitting_suite(_family(cfg, verify.SPLIT_FAMILY), radii=radii, cfg=acfg)
    if name == "lemma1":
        return verify.run_lemma1()
    raise ConfigError(f"unknown experiment {name!r}; choose from {', '.join(EXPERIMENTS)}")


def cmd_verify(cfg) -> int:
    if cfg["experiment"] not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {cfg['experiment']!r}; choose from {', '.join(EXPERIMENTS)}")
    report = _run_experiment(cfg)
    report.config = {"cli": _echo(cfg), **report.config}
    out = _out_dir(cfg)
    stem = cfg["experiment"]
    fmt = cfg["format"]
    if fmt in ("json", "both"):
        _write(out, f"{stem}.json", report.to_json())
    if fmt in ("csv", "both"):
        _write(out, f"{stem}.csv", _csv_header(cfg) + report.rows_csv())
    status = "PASSED" if report.passed else "FAILED"
    sys.stdout.write(f"{stem}: {status}\n")
    for fl in report.flags:
        sys.stdout.write(f"  [{'ok' if fl['passed'] else 'FAIL'}] {fl['name']}: {fl['detail']}\n")
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_kernel_split(cfg) -> int:
    rhos = _floats(cfg.get("rho"), "rho")
    if len(rhos) != 1:
        raise ConfigError("kernel-split needs a single radius --rho")
    R = rhos[0]
    f = load_function(cfg["f"]) if cfg.get("f") is not None else None
    thetas = _floats(cfg.get("theta"), "theta")
    if thetas:
        theta = thetas[0]
    elif f is not None:
        _, theta = angular_max(TransformKind.POISSON, f, R, cfg=_angle_cfg(cfg))
    else:
        raise ConfigError("kernel-split needs --theta or --f")
    geom = reflected_geometry(R, theta)
    result = {"version": __version__, "config": _echo(cfg), "R": geom.R, "theta": theta,
              "reflected": geom.reflected, "x_star": geom.x_star, "y_star": geom.y_star,
              "delta": geom.delta, "x_eval": geom.x_eval}
    if f is not None:
        g1, g2 = split_convolutions(f, geom)
        g = float(poisson(f, geom.x_eval, geom.y_star))
        result.update({"g": g, "g1": g1, "g2": g2,
                       "split_mismatch": abs(g1 + g2 - g) / g if g else abs(g1 + g2)})
        lambdas = _floats(cfg.get("lambdas"), "lambdas")
        if lambdas and lp_norm(f, 1) > 0:
            result["g2_threshold_radius"] = {format_float(lam): p2_threshold_radius(lp_norm(f, 1), lam / 2)
                                             for lam in lambdas}
    text = verify.dumps(result) + "\n"
    sys.stdout.write(text)
    if cfg.get("out") or os.environ.get("ANGMAX_OUT"):
        _write(_out_dir(cfg), "kernel_split.json", text)
    return EXIT_OK


COMMANDS = {"transform": cmd_transform, "maxprofile": cmd_maxprofile, "verify": cmd_verify,
            "kernel-split": cmd_kernel_split}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = _merge(args)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"angmax: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AngmaxError as exc:
        print(f"angmax: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
