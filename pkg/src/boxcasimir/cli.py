"""Command-line front end: ``boxcasimir <command> [options]``.

Settings come from flags, then from a ``key=value`` file given by
``--config``, then from built-in defaults.  Axes and side numbers on the
command line start at 1.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import analysis
from .boxmodel import BoxGeometry, SideId
from .dirichlet import CertifiedValue, TruncationParams
from .errors import BracketError, CasimirError, DomainError, EdgeError, FitError, PoleError
from .observables import energy_ren, force_ren, pressure, stress_energy

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_SOLVER = 0, 2, 3, 4

DEFAULTS = {
    "dimension": None,
    "sides": None,
    "T": "1",
    "N": "auto",
    "alpha": None,
    "tol": "1e-12",
    "xi": None,
    "format": "csv",
    "output": None,
    "threads": None,
    "grid": "11",
    "points": None,
    "side": "1,0",
    "a2": "0.1:10:50",
    "spacing": "linear",
}


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    geometry: BoxGeometry
    truncation: TruncationParams
    xi: float | None
    fmt: str
    output: str | None
    threads: int
    grid: str
    points: str | None
    side: SideId
    a2: tuple[float, float, int]
    spacing: str
    kind: str | None = None

    def describe(self) -> dict:
        tp = self.truncation
        return {
            "command": self.command,
            "kind": self.kind,
            "sides": list(self.geometry.sides),
            "T": "balanced" if tp.T is None else tp.T,
            "N": "auto" if tp.N is None else tp.N,
            "alpha": "default" if tp.alpha is None else tp.alpha,
            "tol": tp.tol,
            "xi": self.xi,
            "side": [self.side.axis + 1, self.side.lam],
        }


# ---------------------------------------------------------------- parsing

def read_config_file(path: str) -> dict:
    """Plain ``key = value`` lines; blank lines and ``#`` comments are skipped."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_").lstrip("_")
        key = {"d": "dimension", "t": "T", "n": "N"}.get(key, key)
        if key not in DEFAULTS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


def _float(name: str, text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{name} must be a number, got {text!r}") from None


def _int(name: str, text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {text!r}") from None


def parse_side(text: str) -> SideId:
    """``"p"`` or ``"p,lam"`` with p counted from 1 and lam in {0, 1}."""
    parts = text.split(",")
    if len(parts) not in (1, 2):
        raise ConfigError(f"side must look like 'p' or 'p,lam', got {text!r}")
    axis = _int("side", parts[0])
    lam = _int("side", parts[1]) if len(parts) == 2 else 0
    if axis < 1 or lam not in (0, 1):
        raise ConfigError(f"side axis starts at 1 and lam is 0 or 1, got {text!r}")
    return SideId(axis - 1, lam)


def parse_range(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"range must be lo:hi:count, got {text!r}")
    lo, hi, count = _float("range", parts[0]), _float("range", parts[1]), _int("range count", parts[2])
    if not (0 < lo < hi) or count < 2:
        raise ConfigError(f"range needs 0 < lo < hi and count >= 2, got {text!r}")
    return lo, hi, count


def grid_counts(text: str, dims: int) -> list[int]:
    parts = text.lower().split("x")
    counts = [_int("grid", p) for p in parts]
    if len(counts) == 1:
        counts = counts * dims
    if len(counts) != dims or any(c < 1 for c in counts):
        raise ConfigError(f"grid {text!r} does not describe {dims} positive counts")
    return counts


def interior_grid(lengths, counts) -> list[tuple[float, ...]]:
    """Points a k / (n + 1), k = 1..n on every axis, first axis slowest."""
    axes = [[a * k / (n + 1) for k in range(1, n + 1)] for a, n in zip(lengths, counts)]
    return list(itertools.product(*axes))


def parse_points(text: str, dims: int) -> list[tuple[float, ...]]:
    pts = []
    for chunk in text.split(";"):
        coords = tuple(_float("point", c) for c in chunk.split(","))
        if len(coords) != dims:
            raise ConfigError(f"point {chunk!r} needs {dims} coordinates")
        pts.append(coords)
    return pts


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-d", "--dimension", help="spatial dimension (inferred from --sides when omitted)")
    common.add_argument("--sides", help="comma-separated side lengths, e.g. 1,5")
    common.add_argument("--T", dest="T", help="Mellin cut, or 'balanced' for T = a A / pi (default 1)")
    common.add_argument("--N", dest="N", help="shell radius, or 'auto' (default)")
    common.add_argument("--alpha", help="tail-bound parameter in (0, 1), or 'auto'")
    common.add_argument("--tol", help="target tail bound when N is auto (default 1e-12)")
    common.add_argument("--xi", help="curvature coupling (default: conformal value)")
    common.add_argument("--config", help="file of key=value settings")
    common.add_argument("--format", choices=("csv", "json", "text"), help="output format (default csv)")
    common.add_argument("--output", help="write to this file instead of stdout")
    common.add_argument("--threads", help="worker threads for per-point work (env CASIMIR_THREADS)")

    parser = argparse.ArgumentParser(prog="boxcasimir",
                                     description="Certified Casimir observables of a Dirichlet scalar in a box.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("tensor", parents=[common], help="stress-energy tensor on a grid of interior points")
    p.add_argument("--grid", help="points per axis, 'n' or 'n1xn2...'")
    p.add_argument("--points", help="explicit points 'x1,x2;x1,x2;...'")
    p = sub.add_parser("pressure", parents=[common], help="pressure on one side")
    p.add_argument("--side", help="side 'p,lam': axis p from 1, lam 0 or 1 (default 1,0)")
    p.add_argument("--grid", help="points per remaining axis")
    p.add_argument("--points", help="explicit coordinates along the remaining axes 'c,..;c,..'")
    sub.add_parser("energy", parents=[common], help="renormalized total energy")
    p = sub.add_parser("force", parents=[common], help="renormalized force on one side")
    p.add_argument("--side", help="side 'p,lam' (default 1,0)")
    p = sub.add_parser("scan", parents=[common], help="energy or force against the second side length")
    p.add_argument("kind", choices=analysis.KINDS)
    p.add_argument("--a2", help="lo:hi:count (default 0.1:10:50)")
    p.add_argument("--spacing", choices=("linear", "log"))
    p.add_argument("--side", help="side for the force (default 1,0)")
    sub.add_parser("features", parents=[common], help="maximum, zeros and fits for the box (1, a2)")
    return parser


def resolve(args: argparse.Namespace) -> RunConfig:
    """Merge flags over the config file over defaults and validate the result."""
    settings = dict(DEFAULTS)
    if args.config:
        settings.update(read_config_file(args.config))
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    if settings["threads"] is None:
        settings["threads"] = os.environ.get("CASIMIR_THREADS", "1")

    command = args.command
    if settings["sides"] is None:
        if command in ("scan", "features"):
            settings["sides"] = "1,1"
        else:
            raise ConfigError("--sides is required")
    sides = tuple(_float("sides", v) for v in str(settings["sides"]).split(","))
    if settings["dimension"] is not None and _int("dimension", settings["dimension"]) != len(sides):
        raise ConfigError(f"dimension {settings['dimension']} does not match {len(sides)} sides")
    if command in ("scan", "features") and len(sides) < 2:
        raise ConfigError("scans vary the second side and need d >= 2")

    T = settings["T"]
    T = None if str(T).lower() == "balanced" else _float("T", T)
    N = settings["N"]
    N = None if str(N).lower() == "auto" else _float("N", N)
    alpha = settings["alpha"]
    if alpha is not None and str(alpha).lower() != "auto":
        alpha = _float("alpha", alpha)
    elif alpha is not None:
        alpha = "auto"
    xi = None if settings["xi"] is None else _float("xi", settings["xi"])
    threads = _int("threads", settings["threads"])
    if threads < 1:
        raise ConfigError("threads must be at least 1")
    if settings["format"] not in ("csv", "json", "text"):
        raise ConfigError(f"unknown format {settings['format']!r}")
    if settings["spacing"] not in ("linear", "log"):
        raise ConfigError(f"unknown spacing {settings['spacing']!r}")
    try:
        g = BoxGeometry(sides)
        tp = TruncationParams(T=T, N=N, alpha=alpha, tol=_float("tol", settings["tol"]))
    except DomainError as exc:
        raise ConfigError(str(exc)) from None
    side = parse_side(str(settings["side"]))
    if side.axis >= g.d:
        raise ConfigError(f"side axis {side.axis + 1} exceeds d = {g.d}")
    return RunConfig(command, g, tp, xi, settings["format"], settings["output"], threads,
                     str(settings["grid"]), settings["points"], side, parse_range(str(settings["a2"])),
                     settings["spacing"], getattr(args, "kind", None))


# ---------------------------------------------------------------- output

def format_certified(value: float, radius: float) -> str:
    """Value rounded to the leading digit of its radius, radius rounded up to one digit."""
    if not math.isfinite(radius):
        return f"{value:.12g} ± inf"
    if radius <= 0:
        return f"{value:.17g} ± 0"
    e = math.floor(math.log10(radius))
    m = math.ceil(radius / 10.0 ** e)
    if m == 10:
        m, e = 1, e + 1
    decimals = min(17, max(0, -e))
    return f"{value:.{decimals}f} ± {m}e{e}"


def _real(v: CertifiedValue) -> float:
    z = v.value
    if isinstance(z, complex):
        if z.imag != 0:
            raise DomainError("complex observable values are not supported on the command line")
        z = z.real
    return float(z)


def _put(row: dict, name: str, v: CertifiedValue):
    row[name] = _real(v)
    row[name + "_radius"] = float(v.radius)


def _cell(v) -> str:
    return format(v, ".17g") if isinstance(v, float) else str(v)


def render(cfg: RunConfig, columns: list[str], rows: list[dict]) -> str:
    if cfg.fmt == "json":
        return json.dumps({"config": cfg.describe(), "rows": rows}, indent=1) + "\n"
    if cfg.fmt == "text":
        out = []
        for row in rows:
            labels, cells = [], []
            for col in columns:
                if col.endswith("_radius"):
                    continue
                if col + "_radius" in row:
                    cells.append((col, format_certified(row[col], row[col + "_radius"])))
                elif isinstance(row[col], str):
                    labels.append(row[col])
                else:
                    cells.append((col, _cell(row[col])))
            if len(cells) == 1:
                body = cells[0][1]
            else:
                body = "  ".join(f"{c} = {v}" for c, v in cells)
            out.append(": ".join(labels + [body]))
        return "\n".join(out) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(_cell(row[c]) for c in columns)
    return buf.getvalue()


def _map(cfg: RunConfig, fn, items):
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


# ---------------------------------------------------------------- commands

def cmd_tensor(cfg: RunConfig):
    g = cfg.geometry
    pts = parse_points(cfg.points, g.d) if cfg.points else interior_grid(g.sides, grid_counts(cfg.grid, g.d))
    pairs = [(m, n) for m in range(g.d + 1) for n in range(m, g.d + 1)]
    columns = [f"x{i + 1}" for i in range(g.d)]
    for m, n in pairs:
        for part in ("conf", "nonconf"):
            columns += [f"T{m}{n}_{part}", f"T{m}{n}_{part}_radius"]
    if cfg.xi is not None:
        for m, n in pairs:
            columns += [f"T{m}{n}", f"T{m}{n}_radius"]

    def one(x):
        t = stress_energy(x, g, cfg.xi, cfg.truncation)
        row = {f"x{i + 1}": xi for i, xi in enumerate(x)}
        for m, n in pairs:
            _put(row, f"T{m}{n}_conf", t.conformal[m][n])
            _put(row, f"T{m}{n}_nonconf", t.nonconformal[m][n])
        if cfg.xi is not None:
            total = t.total
            for m, n in pairs:
                _put(row, f"T{m}{n}", total[m][n])
        return row
    return columns, _map(cfg, one, pts)


def cmd_pressure(cfg: RunConfig):
    g, side = cfg.geometry, cfg.side
    others = [i for i in range(g.d) if i != side.axis]
    if not others:
        rests = [()]
    elif cfg.points:
        rests = parse_points(cfg.points, len(others))
    else:
        rests = interior_grid([g.sides[i] for i in others], grid_counts(cfg.grid, len(others)))

    def one(rest):
        x = [0.0] * g.d
        x[side.axis] = side.coordinate(g)
        for i, c in zip(others, rest):
            x[i] = c
        p = pressure(side, x, g, cfg.truncation)[side.axis]
        row = {f"x{i + 1}": c for i, c in enumerate(x)}
        _put(row, "p", p)
        return row
    columns = [f"x{i + 1}" for i in range(g.d)] + ["p", "p_radius"]
    return columns, _map(cfg, one, rests)


def cmd_energy(cfg: RunConfig):
    row = {}
    _put(row, "energy", energy_ren(cfg.geometry, cfg.truncation))
    return ["energy", "energy_radius"], [row]


def cmd_force(cfg: RunConfig):
    row = {}
    _put(row, "force", force_ren(cfg.side, cfg.geometry, cfg.truncation))
    return ["force", "force_radius"], [row]


def cmd_scan(cfg: RunConfig):
    lo, hi, count = cfg.a2
    res = analysis.scan(cfg.kind, cfg.geometry, lo, hi, count, cfg.truncation, cfg.spacing,
                        side=cfg.side, threads=cfg.threads)
    rows = []
    for a2, v in zip(res.abscissas, res.values):
        row = {"a2": a2}
        _put(row, cfg.kind, v)
        rows.append(row)
    return ["a2", cfg.kind, cfg.kind + "_radius"], rows


def cmd_features(cfg: RunConfig):
    found = analysis.features(cfg.truncation, threads=cfg.threads)
    rows = []
    for name, v in found.items():
        row = {"feature": name}
        _put(row, "value", v)
        rows.append(row)
    return ["feature", "value", "value_radius"], rows


COMMANDS = {
    "tensor": cmd_tensor,
    "pressure": cmd_pressure,
    "energy": cmd_energy,
    "force": cmd_force,
    "scan": cmd_scan,
    "features": cmd_features,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = resolve(args)
        columns, rows = COMMANDS[cfg.command](cfg)
        text = render(cfg, columns, rows)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BracketError, FitError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (PoleError, EdgeError, DomainError, CasimirError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK
