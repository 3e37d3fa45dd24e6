"""Command-line driver.

Every subcommand reads its parameters from an optional JSON file
(``--config``) overridden by flags, writes CSV/JSON artifacts into
``--out`` and finishes with ``manifest.json`` listing each file with its
SHA-256.  Exit status is 0 on success, 1 for bad input and 2 when the
computation itself fails; failures are reported as JSON on stderr.

Examples
--------
    wavesing bore --H 1 --u 1 --delta 0.01 --g 9.8
    wavesing rays --out runs/neph --n_rays 2000
    wavesing hodograph verify --n 101 --radius 0.8
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import bore as bore_mod
from . import caustic_layer as cl
from . import characteristics as ch
from . import hodograph as hg
from . import phase as ph
from . import rays as ry
from . import steady as st
from . import wavefront as wf
from .errors import WaveSingError
from .fields import FLOAT_FMT, Grid2D, VectorField2D, read_complex_csv, read_scalar_csv, read_vector_csv

__all__ = ["RunConfig", "RunReport", "parse_config", "run", "main", "InputError"]


class InputError(Exception):
    """Invalid configuration; mapped to exit status 1."""


@dataclass
class RunConfig:
    subcommand: str
    params: dict
    out: Path
    seed: int = 0
    tolerances: dict = field(default_factory=dict)


@dataclass
class RunReport:
    subcommand: str
    wall_time: float
    files: list
    warnings: list
    result: dict

    def manifest(self) -> dict:
        # wall time is left out so that reruns are byte-identical
        return {"subcommand": self.subcommand, "files": self.files, "warnings": self.warnings}


# ---------------------------------------------------------------- parameters
# name -> (type, default, help); "json" types accept nested values from
# the config file or a JSON literal on the command line

def _json_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise argparse.ArgumentTypeError(f"not valid JSON: {text!r}") from exc


def _flag(text):
    low = str(text).lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


PARAMS: dict[str, dict[str, tuple]] = {
    "characteristics": {
        "c0": (float, 1.0, "undisturbed wave speed"),
        "g": (float, 9.81, "gravity"),
        "piston": (_json_value, {"kind": "linear", "a": 1.0, "t_max": 2.0},
                   "piston velocity: {kind: linear, a, t_max} or {kind: table, t: [...], u: [...]}"),
        "emission_times": (_json_value, None, "emission times, or [t0, t1, n]; default 201 up to t_max"),
        "method": (str, "adjacent", "crossing search: adjacent or all-pairs"),
    },
    "bore": {
        "H": (float, 1.0, "undisturbed depth"),
        "delta": (float, 0.01, "floor rise"),
        "u": (float, 1.0, "current speed"),
        "g": (float, 9.81, "gravity"),
        "exact": (_flag, True, "also solve the cubic relation"),
    },
    "steady": {
        "C": (float, 3.0, "Bernoulli constant"),
        "g": (float, 9.81, "gravity"),
        "input": (str, None, "CSV with columns x,y,u,v"),
        "field": (_json_value, {"type": "radial", "s": 0.5}, "synthetic field spec"),
        "grid": (_json_value, {"lo": -2.0, "hi": 2.0, "n": 101}, "synthetic grid"),
    },
    "hodograph": {
        "action": (str, "verify", "only 'verify'"),
        "f": (str, "unity", "coefficient: unity or quartic"),
        "radius": (float, 0.8, "disc radius"),
        "n": (int, 201, "nodes per axis"),
        "center": (_json_value, [0.0, 0.0], "disc centre [u, v]"),
        "boundary": (str, "cubic", "boundary data: linear, quadratic, cubic or mixed"),
    },
    "rays": {
        "medium": (_json_value, {"kind": "homogeneous", "n": 1.0},
                   "{kind: homogeneous, n} or {kind: linear, a, b, n0_sq}"),
        "launch": (_json_value, {"kind": "parallel", "xi": [-0.99, 0.99, 400], "direction": [0.0, -1.0],
                                 "offset": 0.0},
                   "{kind: parallel, xi: [lo, hi, n], direction, offset} or {kind: converging, xi, focus}"),
        "n_rays": (int, None, "override the number of rays in the launch"),
        "tau_max": (float, 1.6, "ray parameter range"),
        "dtau": (float, 0.02, "RK4 step"),
        "mirror": (_json_value, {"center": [0.0, 0.0], "radius": 1.0, "max_bounces": 1},
                   "circular mirror or null"),
        "bounds": (_json_value, [-3.0, 3.0, -3.0, 3.0], "domain [x0, x1, y0, y1]"),
        "save_every": (int, 10, "write every n-th lattice point of each ray"),
    },
    "caustic": {
        "action": (str, "eval", "only 'eval'"),
        "k": (float, 100.0, "wave number"),
        "ansatz": (str, "canonical-fold", "canonical-fold or csv"),
        "fields": (_json_value, None, "CSV paths {theta, rho, g0, g1} for the csv ansatz"),
        "grid": (_json_value, {"x": [-1.0, 1.0, 5], "y": [-1.0, 2.0, 301]}, "grid for the canonical fold"),
        "g0": (float, 1.0, "canonical g0"),
        "g1": (float, 0.0, "canonical g1"),
    },
    "wavefront": {
        "source": (str, "quartic", "quartic, circle or table"),
        "direction": (str, "plus", "plus or minus"),
        "times": (_json_value, [0.0, 0.5, 1.0], "front times"),
        "samples": (int, 401, "samples per front"),
        "interval": (_json_value, [-2.0, 2.0], "parameter interval for graphs"),
        "radius": (float, 1.0, "circle radius"),
        "table": (_json_value, None, "{x: [...], y: [...]} for the table source"),
        "x_range": (_json_value, [0.2, 2.0, 50], "singular-time samples [lo, hi, n]"),
    },
    "amphidromic": {
        "input": (str, None, "CSV with columns x,y,re,im"),
        "constituents": (_json_value, None, "harmonic constants"),
        "grid": (_json_value, {"lo": -2.0, "hi": 2.0, "n": 161}, "synthesis grid"),
        "phases": (_json_value, None, "cotidal phases in radians (default 12 evenly spaced)"),
        "check_loops": (int, 16, "random loops used to confirm each charge"),
    },
}

TOLERANCES: dict[str, dict[str, float]] = {
    "characteristics": {},
    "bore": {"root_rtol": 1e-13},
    "steady": {},
    "hodograph": {"zero_tol": 1e-12},
    "rays": {"det_tol": 1e-10, "classify_tol": 1e-5},
    "caustic": {},
    "wavefront": {"singular_tol": 1e-9},
    "amphidromic": {"alpha_rtol": 1e-12},
}

GLOBAL_KEYS = {"seed", "tol"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(json.dumps({"error": "usage", "message": message}) + "\n")
        raise SystemExit(1)


def _tol_pair(text):
    if "=" not in text:
        raise argparse.ArgumentTypeError("expected NAME=VALUE")
    name, val = text.split("=", 1)
    try:
        return name.strip(), float(val)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad tolerance value {val!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", default=argparse.SUPPRESS, help="output directory (default: out)")
    common.add_argument("--config", default=argparse.SUPPRESS, help="JSON parameter file")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="random seed")
    common.add_argument("--tol", type=_tol_pair, action="append", default=argparse.SUPPRESS,
                        metavar="NAME=VALUE", help="tolerance override (repeatable)")

    parser = _Parser(prog="wavesing", parents=[common],
                     description="Waves, caustics and phase singularities.")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    for name, params in PARAMS.items():
        sp = sub.add_parser(name, parents=[common], help=f"{name} computations")
        for key, (typ, _, hlp) in params.items():
            if key == "action":
                sp.add_argument("action", nargs="?", default=params[key][1], choices=[params[key][1]],
                                help=hlp)
                continue
            sp.add_argument(f"--{key}", type=typ, default=argparse.SUPPRESS, help=hlp)
    return parser


def parse_config(argv, config: dict | None = None) -> RunConfig:
    """Merge defaults, the JSON file and flags (flags win).

    Raises ``SystemExit(1)`` on usage errors and :class:`InputError` on
    unknown keys or bad values.
    """
    ns = vars(build_parser().parse_args(argv))
    name = ns.pop("subcommand")
    spec = PARAMS[name]
    if config is None and "config" in ns:
        try:
            config = json.loads(Path(ns["config"]).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config: {exc}") from exc
    config = dict(config or {})
    if not isinstance(config, dict):
        raise InputError("config must be a JSON object")
    unknown = set(config) - set(spec) - GLOBAL_KEYS - {"out"}
    if unknown:
        raise InputError(f"unknown config keys for {name}: {sorted(unknown)}")

    params = {k: v[1] for k, v in spec.items()}
    for k in spec:
        if k in config:
            typ = spec[k][0]
            try:
                params[k] = config[k] if typ in (_json_value, str) or config[k] is None else typ(config[k])
            except (TypeError, ValueError, argparse.ArgumentTypeError) as exc:
                raise InputError(f"bad value for {k}: {exc}") from exc
    for k in spec:
        if k in ns:
            params[k] = ns[k]

    tols = dict(TOLERANCES[name])
    overrides = list((config.get("tol") or {}).items()) + list(ns.get("tol", []))
    for key, val in overrides:
        if key not in tols:
            raise InputError(f"unknown tolerance {key!r} for {name}; known: {sorted(tols)}")
        val = float(val)
        if not val > 0:
            raise InputError(f"tolerance {key} must be positive")
        tols[key] = val

    seed = ns.get("seed", config.get("seed", 0))
    if not isinstance(seed, int) or seed < 0:
        raise InputError("seed must be a non-negative integer")
    out = Path(ns.get("out", config.get("out", "out")))
    return RunConfig(name, params, out, seed, tols)


# ---------------------------------------------------------------- writers

class _Out:
    def __init__(self, root: Path):
        self.root = root
        self.files: list[str] = []

    def path(self, name):
        self.files.append(name)
        return self.root / name

    def csv(self, name, header, rows, fmt=None):
        fmt = fmt or [FLOAT_FMT] * len(header)
        with self.path(name).open("w", newline="") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join((f % v) if isinstance(f, str) else f(v) for f, v in zip(fmt, row)) + "\n")

    def json(self, name, obj):
        self.path(name).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _f(x):
    return None if x is None else float(x)


# ---------------------------------------------------------------- subcommands
# each returns (prepare, compute): prepare validates and builds inputs
# (errors -> exit 1), compute does the numerics (errors -> exit 2)

def _characteristics(cfg: RunConfig, out: _Out):
    p = cfg.params
    if p["method"] not in ("adjacent", "all-pairs"):
        raise InputError("method must be adjacent or all-pairs")
    pist = dict(p["piston"] or {})
    kind = pist.get("kind", "linear")
    if kind == "linear":
        a = float(pist.get("a", 1.0))
        path = ch.PistonPath.linear(a, p["c0"], float(pist.get("t_max", 2.0)))
    elif kind == "table":
        if "t" not in pist or "u" not in pist:
            raise InputError("table piston needs t and u arrays")
        path = ch.PistonPath.table(pist["t"], pist["u"], p["c0"])
    else:
        raise InputError("piston kind must be linear or table")
    if not np.isfinite(path.t_max):
        raise InputError("piston needs a finite t_max")
    em = p["emission_times"]
    if em is None:
        times = np.linspace(0.0, path.t_max, 201)
    elif len(em) == 3 and isinstance(em[2], int) and em[2] > 3:
        times = np.linspace(float(em[0]), float(em[1]), em[2])
    else:
        times = np.asarray(em, dtype=float)
    if times.size < 2:
        raise InputError("need at least 2 emission times")

    def compute():
        lines = ch.emit_characteristics(path, times)
        out.csv("lines.csv", ["t0", "x0", "v", "invariant"],
                [(l.t0, l.x0, l.v, l.invariant) for l in lines])
        hit = ch.first_focusing_time(lines, p["method"])
        out.csv("focus.csv", ["t", "x"], [] if hit is None else [hit])
        res = {"n_lines": len(lines), "first_focusing": None if hit is None else {"t": hit[0], "x": hit[1]}}
        if kind == "linear" and a > 0:
            t, x = ch.linear_piston_onset(a, p["c0"])
            res["envelope_onset"] = {"t": t, "x": x}
        out.json("result.json", res)
        return res

    return compute


def _bore(cfg: RunConfig, out: _Out):
    p = cfg.params
    inp = bore_mod.BoreInput(p["H"], p["delta"], p["u"], p["g"])

    def compute():
        reg = bore_mod.froude(inp.u, inp.c)
        res = {"input": {"H": inp.H, "delta": inp.delta, "u": inp.u, "g": inp.g},
               "froude": reg.froude, "regime": reg.tag.value,
               "eps_first_order": bore_mod.elevation_first_order(inp)}
        if p["exact"]:
            eps = bore_mod.elevation_exact(inp, cfg.tolerances["root_rtol"])
            lhs, rhs = bore_mod.relation_sides(inp, eps)
            res.update(eps_exact=eps, residual=abs(lhs - rhs))
        out.json("result.json", res)
        return res

    return compute


def _steady_field(spec, grid):
    kind = spec.get("type")
    X, Y = grid.mesh()
    if kind == "radial":
        s = float(spec.get("s", 1.0))
        return VectorField2D(grid, s * X, s * Y)
    if kind == "uniform":
        return VectorField2D(grid, np.full_like(X, float(spec.get("U", 0.0))),
                             np.full_like(X, float(spec.get("V", 0.0))))
    if kind == "vortex":
        w = float(spec.get("omega", 1.0))
        return VectorField2D(grid, -w * Y, w * X)
    raise InputError(f"unknown steady field type {kind!r}")


def _grid_from(spec):
    try:
        return Grid2D.square(float(spec["lo"]), float(spec["hi"]), int(spec["n"]))
    except (KeyError, TypeError) as exc:
        raise InputError(f"grid needs lo, hi, n: {exc}") from exc


def _steady(cfg: RunConfig, out: _Out):
    p = cfg.params
    conf = st.SteadyFlowConfig(p["C"], p["g"])
    vf = read_vector_csv(p["input"]) if p["input"] else _steady_field(p["field"], _grid_from(p["grid"]))

    def compute():
        tags = st.classify_type(vf, conf)
        r_cont, r_curl = st.residuals(vf, conf)
        X, Y = vf.grid.mesh()
        band = tags.band()
        out.csv("type.csv", ["x", "y", "tag", "band"],
                zip(X.ravel(), Y.ravel(), tags.tags.ravel(), band.ravel()),
                [FLOAT_FMT, FLOAT_FMT, "%d", "%d"])
        out.csv("residuals.csv", ["x", "y", "r_cont", "r_curl"],
                zip(X.ravel(), Y.ravel(), r_cont.values.ravel(), r_curl.values.ravel()))
        res = {"counts": {t.name.lower(): tags.count(t) for t in st.FlowType},
               "band_nodes": int(band.sum()),
               "energy": st.energy_functional(vf, conf)}
        out.json("result.json", res)
        return res

    return compute


BOUNDARIES: dict[str, Callable] = {
    "linear": lambda u, v: u,
    "quadratic": lambda u, v: u * u - v * v,
    "cubic": lambda u, v: u**3 - 3 * u * v * v,
    "mixed": lambda u, v: u + 0.3 * u * v + 0.2 * v**3,
}


def _hodograph(cfg: RunConfig, out: _Out):
    p = cfg.params
    f = {"unity": hg.FCoefficient.unity, "quartic": hg.FCoefficient.quartic}.get(p["f"])
    if f is None:
        raise InputError("f must be unity or quartic")
    if p["boundary"] not in BOUNDARIES:
        raise InputError(f"boundary must be one of {sorted(BOUNDARIES)}")
    if not p["radius"] > 0 or p["n"] < 5:
        raise InputError("need radius > 0 and n >= 5")
    cu, cv = (float(c) for c in p["center"])
    R = p["radius"]
    pad = 2.0 * R / (p["n"] - 3)
    grid = Grid2D(cu - R - pad, cu + R + pad, cv - R - pad, cv + R + pad, p["n"], p["n"])

    def compute():
        rep = hg.verify_theorem_numerically(f(), grid, BOUNDARIES[p["boundary"]], R, (cu, cv),
                                            cfg.tolerances["zero_tol"])
        U, V = grid.mesh()
        m = rep.interior
        out.csv("jacobian.csv", ["u", "v", "x", "J", "J_closed"],
                zip(U[m], V[m], rep.x[m], rep.J[m], rep.J_closed[m]))
        res = rep.summary()
        out.json("result.json", res)
        return res

    return compute


def _medium(spec, bounds):
    kind = spec.get("kind", spec.get("type", "homogeneous"))
    kw = {"bounds": tuple(float(b) for b in bounds)}
    if kind == "homogeneous":
        return ry.MediumSpec.homogeneous(float(spec.get("n", 1.0)), **kw)
    if kind == "linear":
        return ry.MediumSpec.linear(float(spec["a"]), float(spec.get("b", 0.0)),
                                    float(spec.get("n0_sq", 1.0)), **kw)
    raise InputError(f"unknown medium kind {kind!r}")


def _rays(cfg: RunConfig, out: _Out):
    p = cfg.params
    launch = dict(p["launch"] or {})
    lo, hi, n = launch.get("xi", [-0.99, 0.99, 400])
    n = int(p["n_rays"] or n)
    if n < 5 or not float(lo) < float(hi):
        raise InputError("need at least 5 rays and xi lo < hi")
    if not (p["tau_max"] > 0 and p["dtau"] > 0) or p["save_every"] < 1:
        raise InputError("tau_max, dtau and save_every must be positive")
    medium = _medium(p["medium"], p["bounds"])
    xi = np.linspace(float(lo), float(hi), n)
    kind = launch.get("kind", "parallel")
    if kind == "parallel":
        pos, mom = ry.parallel_launch(xi, launch.get("direction", (0.0, -1.0)), float(launch.get("offset", 0.0)))
    elif kind == "converging":
        pos, mom = ry.converging_launch(xi, launch.get("focus", (0.0, -1.0)))
    else:
        raise InputError("launch kind must be parallel or converging")
    n2 = medium.n2(pos[:, 0], pos[:, 1])
    if np.any(n2 <= 0):
        raise InputError("refractive index must be real at every launch point")
    # momenta start on the index surface |p| = n
    mom = mom * np.sqrt(n2)[:, None]
    mirror = None
    if p["mirror"]:
        m = p["mirror"]
        mirror = ry.CircularMirror(tuple(m.get("center", (0.0, 0.0))), float(m.get("radius", 1.0)),
                                   int(m.get("max_bounces", 1)))

    def compute():
        fan = ry.trace_fan(xi, pos, mom, medium, p["tau_max"], p["dtau"], mirror)
        sel = np.arange(0, fan.tau.size, p["save_every"])
        rows = [(xi[i], fan.tau[j], *fan.r[i, j], *fan.p[i, j], fan.psi[i, j], fan.bounces[i, j])
                for i in range(xi.size) for j in sel]
        out.csv("fan.csv", ["xi", "tau", "x", "y", "px", "py", "psi", "bounces"], rows,
                [FLOAT_FMT] * 7 + ["%d"])
        pts = ry.detect_caustic(fan, cfg.tolerances["det_tol"], cfg.tolerances["classify_tol"])
        out.csv("caustics.csv", ["x", "y", "type", "xi", "tau", "abs_det"],
                [(c.position[0], c.position[1], c.type.value, c.xi, c.tau, c.abs_det) for c in pts],
                [FLOAT_FMT, FLOAT_FMT, "%s", FLOAT_FMT, FLOAT_FMT, FLOAT_FMT])
        counts = {t.value: sum(1 for c in pts if c.type is t) for t in ry.CausticType}
        res = {"n_rays": int(xi.size), "n_caustic_points": len(pts), "types": counts}
        out.json("result.json", res)
        return res

    return compute


def _caustic(cfg: RunConfig, out: _Out):
    p = cfg.params
    if not p["k"] > 0:
        raise InputError("k must be positive")
    if p["ansatz"] == "canonical-fold":
        try:
            gx, gy = p["grid"]["x"], p["grid"]["y"]
            grid = Grid2D(float(gx[0]), float(gx[1]), float(gy[0]), float(gy[1]), int(gx[2]), int(gy[2]))
        except (KeyError, TypeError, IndexError) as exc:
            raise InputError(f"grid needs x and y as [lo, hi, n]: {exc}") from exc
        ansatz = cl.canonical_fold_ansatz(grid, p["k"], p["g0"], p["g1"])
    elif p["ansatz"] == "csv":
        paths = p["fields"] or {}
        missing = {"theta", "rho", "g0", "g1"} - set(paths)
        if missing:
            raise InputError(f"csv ansatz needs field paths for {sorted(missing)}")
        fs = {k: read_scalar_csv(paths[k]) for k in ("theta", "rho", "g0", "g1")}
        ansatz = cl.UniformAnsatz(fs["theta"], fs["rho"], fs["g0"], fs["g1"], p["k"])
    else:
        raise InputError("ansatz must be canonical-fold or csv")

    def compute():
        t = ansatz.k ** (2.0 / 3.0) * ansatz.rho.values
        airy = cl.canonical_airy(min(float(t.min()), 0.0) - 1.0, max(float(t.max()), 0.0) + 1.0)
        u = cl.evaluate_uniform_field(ansatz, airy)
        zones = cl.zone_partition(ansatz)
        X, Y = ansatz.grid.mesh()
        out.csv("field.csv", ["x", "y", "re", "im", "zone"],
                zip(X.ravel(), Y.ravel(), u.values.real.ravel(), u.values.imag.ravel(), zones.ravel()),
                [FLOAT_FMT] * 4 + ["%d"])
        res = {"k": ansatz.k, "max_abs": float(np.abs(u.values).max()),
               "zones": {z.name.lower(): int(np.count_nonzero(zones == z)) for z in cl.Zone},
               "airy_residual": airy.max_residual()}
        out.json("result.json", res)
        return res

    return compute


def _wavefront(cfg: RunConfig, out: _Out):
    p = cfg.params
    try:
        direction = wf.Direction(p["direction"])
    except ValueError as exc:
        raise InputError("direction must be plus or minus") from exc
    if p["source"] == "quartic":
        src = wf.SourceCurve.quartic(tuple(p["interval"]))
    elif p["source"] == "circle":
        src = wf.SourceCurve.circle(p["radius"])
    elif p["source"] == "table":
        tab = p["table"] or {}
        if "x" not in tab or "y" not in tab:
            raise InputError("table source needs {x: [...], y: [...]}")
        src = wf.SourceCurve.from_table(tab["x"], tab["y"])
    else:
        raise InputError("source must be quartic, circle or table")
    times = [float(t) for t in p["times"]]
    if any(t < 0 for t in times):
        raise InputError("times must be non-negative")
    lo, hi, n = p["x_range"]
    xs = np.linspace(float(lo), float(hi), int(n))
    if src.name == "circle":
        xs = np.clip(xs, src.s_min, src.s_max)

    def compute():
        fronts = []
        for i, t in enumerate(times):
            fr = wf.evolve(src, t, direction, p["samples"])
            out.csv(f"front_t{i}.csv", ["s", "x", "y", "dx_ds", "dy_ds"],
                    zip(fr.curve.parameter, fr.curve.points[:, 0], fr.curve.points[:, 1],
                        fr.tangent[:, 0], fr.tangent[:, 1]))
            sing = wf.detect_front_singularities(fr, cfg.tolerances["singular_tol"])
            fronts.append({"t": t, "singular_samples": len(sing),
                           "self_intersections": int(len(wf.self_intersections(fr)))})
        st_ = wf.singular_times(src, direction, xs)
        out.csv("singular.csv", ["x", "t_singular"], st_)
        first = wf.first_singular_time(src, direction)
        res = {"fronts": fronts, "n_singular": len(st_),
               "first_singular": None if first is None else {"s": first[0], "t": first[1]}}
        out.json("result.json", res)
        return res

    return compute


def _amphidromic(cfg: RunConfig, out: _Out):
    p = cfg.params
    if p["input"]:
        field_ = read_complex_csv(p["input"])
    elif p["constituents"]:
        field_ = ph.harmonic_field(_grid_from(p["grid"]), p["constituents"])
    else:
        raise InputError("amphidromic needs --input or constituents")
    phases = p["phases"]
    if phases is None:
        phases = list(np.linspace(-np.pi, np.pi, 13)[1:])
    phases = [float(v) for v in phases]
    rng = np.random.default_rng(cfg.seed)

    def compute():
        alpha = np.abs(field_.values)
        dec = ph.decompose(field_, cfg.tolerances["alpha_rtol"] * float(alpha.max()))
        pts = ph.detect_amphidromic(dec)
        g = dec.grid
        h = max(g.hx, g.hy)
        checks = []
        for pt in pts:
            ok = 0
            for _ in range(p["check_loops"]):
                r = h * rng.uniform(2.0, 4.0)
                try:
                    loop = ph.circle_loop(g, pt.position, r)
                    ok += ph.winding_number(dec, loop) == pt.charge
                except WaveSingError:
                    pass
            checks.append(ok)
        out.csv("points.csv", ["x", "y", "charge"], [(q.position[0], q.position[1], q.charge) for q in pts],
                [FLOAT_FMT, FLOAT_FMT, "%d"])
        rows = []
        seg = 0
        for phi, curves in ph.cotidal_lines_by_phase(dec, phases).items():
            for c in curves:
                rows += [(phi, x, y, seg) for x, y in c.points]
                seg += 1
        out.csv("cotidal.csv", ["phase", "x", "y", "segment_id"], rows, [FLOAT_FMT] * 3 + ["%d"])
        res = {"points": [{"x": q.position[0], "y": q.position[1], "charge": q.charge,
                           "loops_confirming": c} for q, c in zip(pts, checks)],
               "n_cotidal_segments": seg, "seed": cfg.seed}
        out.json("result.json", res)
        return res

    return compute


COMMANDS = {
    "characteristics": _characteristics,
    "bore": _bore,
    "steady": _steady,
    "hodograph": _hodograph,
    "rays": _rays,
    "caustic": _caustic,
    "wavefront": _wavefront,
    "amphidromic": _amphidromic,
}


# ---------------------------------------------------------------- driver

class NumericalFailure(Exception):
    def __init__(self, err: WaveSingError):
        super().__init__(str(err))
        self.err = err


def _threads():
    val = os.environ.get("SW_THREADS")
    if val is None:
        return None
    try:
        n = int(val)
    except ValueError:
        n = 0
    if n < 1:
        raise InputError("SW_THREADS must be a positive integer")
    return n


def run(cfg: RunConfig) -> RunReport:
    """Execute a configured run and write its manifest.

    Raises
    ------
    InputError
        Invalid parameters.
    NumericalFailure
        The computation raised a library error.
    """
    _threads()
    start = time.perf_counter()
    try:
        cfg.out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise InputError(f"cannot create output directory: {exc}") from exc
    if not os.access(cfg.out, os.W_OK):
        raise InputError(f"output directory {cfg.out} is not writable")
    out = _Out(cfg.out)
    np.random.seed(cfg.seed)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            compute = COMMANDS[cfg.subcommand](cfg, out)
        except InputError:
            raise
        except (ValueError, TypeError, KeyError, OSError) as exc:
            raise InputError(str(exc)) from exc
        try:
            result = compute()
        except WaveSingError as exc:
            raise NumericalFailure(exc) from exc
    msgs = sorted({str(w.message) for w in caught})
    files = [{"name": n, "sha256": _sha256(cfg.out / n), "bytes": (cfg.out / n).stat().st_size}
             for n in out.files]
    report = RunReport(cfg.subcommand, time.perf_counter() - start, files, msgs, result)
    (cfg.out / "manifest.json").write_text(json.dumps(
        {**report.manifest(), "seed": cfg.seed, "tolerances": cfg.tolerances,
         "params": cfg.params}, indent=2, sort_keys=True, default=str) + "\n")
    return report


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
        report = run(cfg)
    except SystemExit as exc:
        return int(exc.code or 0)
    except InputError as exc:
        sys.stderr.write(json.dumps({"error": "validation", "message": str(exc)}) + "\n")
        return 1
    except NumericalFailure as exc:
        sys.stderr.write(json.dumps({"error": exc.err.kind, "message": str(exc.err)}) + "\n")
        return 2
    sys.stdout.write(json.dumps({"subcommand": report.subcommand, "result": report.result,
                                 "files": report.files, "warnings": report.warnings,
                                 "wall_time": report.wall_time}, default=_f) + "\n")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
