"""Command-line interface.

Subcommands ``watson``, ``spectrum``, ``surface``, ``wavefunction``, ``g0``
and ``verify`` write JSON or CSV to stdout (or ``--out``).  Errors are
reported as a JSON object on stderr with a nonzero exit code.

Defaults may be supplied in a ``key = value`` file given by ``--config`` or
the ``DELTAWALK_CONFIG`` environment variable; explicit flags win.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, DeltaWalkError, ParameterError
from .green import watson_asymptotic, watson_c, watson_c1
from .model import OneParticleParams, QuasiMomentum, TwoParticleParams
from .spectral import classify_fiber, classify_one_particle, surface_grid_units
from .verify import SUITES, run_suite
from .wavefunction import (
    Gauge,
    LatticeVector,
    fiber_eigenvector,
    fit_decay,
    kernel_K,
    one_particle_eigenfunction,
    subspace_generator_g0,
)

CONFIG_ENV = "DELTAWALK_CONFIG"

EXIT_USAGE = 2
EXIT_FAILURE = 1


class UsageError(Exception):
    """Command-line usage error; reported with exit code 2."""


@dataclass
class RunConfig:
    """Validated output settings shared by every subcommand."""

    output: str
    output_path: str | None
    threads: int
    tol: float | None


# ---------------------------------------------------------------------------
# Encoding


def _json_safe(obj):
    """Replace non-finite floats by strings so the output is strict JSON."""
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def dumps_json(obj) -> str:
    return json.dumps(_json_safe(obj), indent=2) + "\n"


def csv_cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "NAN"
        if math.isinf(x):
            return "INF" if x > 0 else "-INF"
        return repr(x)
    return str(x)


class _Writer:
    """Line sink that streams to stdout or a file."""

    def __init__(self, path: str | None):
        self._fh = open(path, "w", newline="") if path else sys.stdout
        self._own = path is not None
        self._csv = csv.writer(self._fh, lineterminator="\n")

    def row(self, cells: Sequence) -> None:
        self._csv.writerow([csv_cell(c) for c in cells])
        self._fh.flush()

    def comment(self, text: str) -> None:
        self._fh.write(f"# {text}\n")

    def text(self, s: str) -> None:
        self._fh.write(s)

    def close(self) -> None:
        if self._own:
            self._fh.close()
        else:
            self._fh.flush()


# ---------------------------------------------------------------------------
# Argument parsing


def parse_d_range(text: str) -> list:
    """``"3"``, ``"1..4"`` or ``"3,5,10"`` to a list of dimensions."""
    out = []
    try:
        for part in str(text).split(","):
            part = part.strip()
            if ".." in part:
                lo, hi = (int(s) for s in part.split(".."))
                if hi < lo:
                    raise ValueError
                out.extend(range(lo, hi + 1))
            else:
                out.append(int(part))
    except ValueError:
        raise ParameterError(f"invalid dimension list {text!r}", field="d") from None
    for d in out:
        if d < 1:
            raise ParameterError(f"dimension must be >= 1, got {d}", field="d")
    return out


def parse_floats(text: str, field: str) -> list:
    try:
        return [float(s) for s in str(text).split(",") if s.strip() != ""]
    except ValueError:
        raise ParameterError(f"invalid number list {text!r}", field=field) from None


def parse_ints(text: str, field: str) -> list:
    try:
        return [int(s) for s in str(text).split(",") if s.strip() != ""]
    except ValueError:
        raise ParameterError(f"invalid integer list {text!r}", field=field) from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(sub: argparse.ArgumentParser, *, model: bool = True) -> None:
    g = sub.add_argument_group("output")
    g.add_argument("--format", choices=("json", "csv"), default="json", help="output format")
    g.add_argument("--out", metavar="PATH", help="write to PATH instead of stdout")
    g.add_argument("--threads", type=int, default=1, help="worker threads; 0 picks automatically")
    g.add_argument("--tol", type=float, help="solver tolerance override")
    g.add_argument("--config", metavar="PATH", help=f"key=value defaults file (also ${CONFIG_ENV})")
    if model:
        m = sub.add_argument_group("model")
        m.add_argument("--d", type=int, help="lattice dimension")
        m.add_argument("--lambda", dest="lam", type=float, help="one-particle hopping")
        m.add_argument("--lambda1", type=float, help="hopping of particle one")
        m.add_argument("--lambda2", type=float, help="hopping of particle two")
        m.add_argument("--mu", type=float, help="interaction strength")
        m.add_argument("--phi", help="quasi-momentum, comma-separated, in units of pi")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="deltawalk", description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = subs.add_parser("watson", help="edge constants c(d) and c1(d)")
    _common(p, model=False)
    p.add_argument("--d", default="3", help="dimension, range a..b, or comma list")

    p = subs.add_parser("spectrum", help="essential spectrum and bound state")
    _common(p)

    p = subs.add_parser("surface", help="bound-state energy on a quasi-momentum grid")
    _common(p)
    p.add_argument("--grid", help="samples per axis, one value or comma list")

    p = subs.add_parser("wavefunction", help="bound-state eigenvector on a box")
    _common(p)
    p.add_argument("--radius", type=int, default=10, help="box radius")
    p.add_argument("--gauge", choices=[g.value for g in Gauge], default=Gauge.FIBER.value)

    p = subs.add_parser("g0", help="one-particle subspace generator")
    _common(p)
    p.add_argument("--radius", default="3", help="box radius, or R1,R for the two coordinates")
    p.add_argument("--gauge", choices=[g.value for g in Gauge], default=Gauge.FIBER.value)

    p = subs.add_parser("verify", help="run a self-check suite")
    _common(p, model=False)
    p.add_argument("suite", choices=tuple(SUITES))
    return parser


_CONFIG_KEYS = {
    "d": "d",
    "lambda": "lam",
    "lam": "lam",
    "lambda1": "lambda1",
    "lambda2": "lambda2",
    "mu": "mu",
    "phi": "phi",
    "grid": "grid",
    "radius": "radius",
    "tol": "tol",
    "format": "format",
    "threads": "threads",
    "gauge": "gauge",
}


def load_config(path: str) -> dict:
    """Read a ``key = value`` file; sections are optional and ignored."""
    cp = configparser.ConfigParser()
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path!r}: {exc.strerror}") from None
    try:
        cp.read_string("[deltawalk]\n" + text)
    except configparser.Error as exc:
        raise ConfigurationError(f"malformed config {path!r}: {exc}") from None
    out = {}
    for section in cp.sections():
        for key, value in cp.items(section):
            if key not in _CONFIG_KEYS:
                raise ConfigurationError(f"unknown config key {key!r} in {path!r}")
            out[_CONFIG_KEYS[key]] = value
    return out


def _parse(argv) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    path = args.config or os.environ.get(CONFIG_ENV)
    if path:
        defaults = load_config(path)
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest: a for a in sub._actions}
        typed = {}
        for dest, raw in defaults.items():
            if dest not in known:
                continue
            conv = known[dest].type
            try:
                typed[dest] = conv(raw) if conv else raw
            except ValueError:
                raise ConfigurationError(f"invalid config value {raw!r} for {dest!r}") from None
        sub.set_defaults(**typed)
        args = parser.parse_args(argv)
    return args


# ---------------------------------------------------------------------------
# Parameter assembly


def _require(args, name: str, field: str):
    value = getattr(args, name)
    if value is None:
        raise ParameterError(f"--{field} is required", field=field)
    return value


def _two_particle(args) -> TwoParticleParams:
    return TwoParticleParams(
        _require(args, "lambda1", "lambda1"),
        _require(args, "lambda2", "lambda2"),
        _require(args, "mu", "mu"),
        _require(args, "d", "d"),
    )


def _one_particle(args) -> OneParticleParams:
    lam = args.lam
    if lam is None and args.lambda1 is not None and args.lambda2 is not None:
        lam = args.lambda1 + args.lambda2
    if lam is None:
        raise ParameterError("--lambda is required", field="lambda")
    return OneParticleParams(lam, _require(args, "mu", "mu"), _require(args, "d", "d"))


def _phi_units(args, d: int) -> list:
    units = parse_floats(args.phi, "phi")
    if len(units) != d:
        raise ParameterError(f"--phi has {len(units)} components but d = {d}", field="phi")
    return units


def _run_config(args) -> RunConfig:
    if args.threads < 0:
        raise ParameterError("--threads must be >= 0", field="threads")
    if args.tol is not None and not (0.0 < args.tol < 1.0):
        raise ParameterError("--tol must lie in (0, 1)", field="tol")
    return RunConfig(args.format, args.out, args.threads, args.tol)


# ---------------------------------------------------------------------------
# Commands


def cmd_watson(args, cfg: RunConfig, out: _Writer) -> int:
    rows = []
    for d in parse_d_range(args.d):
        c, c1 = watson_c(d), watson_c1(d)
        rows.append({"d": d, "c": c.value, "c1": c1.value, "asym3": watson_asymptotic(d), "status": c.status.value})
    if cfg.output == "csv":
        out.row(["d", "c", "c1", "asym3", "status"])
        for r in rows:
            out.row(list(r.values()))
    else:
        out.text(dumps_json(rows))
    return 0


def cmd_spectrum(args, cfg: RunConfig, out: _Writer) -> int:
    if args.phi is not None:
        p = _two_particle(args)
        units = _phi_units(args, p.d)
        report = classify_fiber(QuasiMomentum.from_pi_units(units), p, tol=cfg.tol)
        head = {"problem": "fiber", "phi": units}
    else:
        p = _one_particle(args)
        report = classify_one_particle(p, tol=cfg.tol)
        head = {"problem": "one-particle"}
    body = report.to_dict()
    doc = {**head, "essential": body["essential"], "point": body["point"], "regime": report.point.regime}
    if cfg.output == "csv":
        out.row(["beta1", "beta2", "kind", "nu", "regime"])
        out.row([*report.essential, report.point.kind.value, report.point.nu, report.point.regime])
    else:
        out.text(dumps_json(doc))
    return 0


def cmd_surface(args, cfg: RunConfig, out: _Writer) -> int:
    p = _two_particle(args)
    if p.mu == 0.0:
        raise ParameterError("the dispersion surface needs mu != 0", field="mu")
    counts = parse_ints(_require(args, "grid", "grid"), "grid")
    if len(counts) == 1:
        counts = counts * p.d
    if len(counts) != p.d:
        raise ParameterError(f"--grid has {len(counts)} axes but d = {p.d}", field="grid")
    units = surface_grid_units(counts)
    grid = [QuasiMomentum.from_pi_units(u) for u in units]
    names = [f"phi{k + 1}" for k in range(p.d)]

    def point(phi):
        return classify_fiber(phi, p, tol=cfg.tol).point

    workers = cfg.threads if cfg.threads > 0 else os.cpu_count() or 1
    # Executor.map yields in submission order, so rows stream in grid order.
    with ThreadPoolExecutor(max_workers=workers) as pool:
        verdicts = pool.map(point, grid)
        if cfg.output == "csv":
            out.row([*names, "verdict", "nu"])
            for u, v in zip(units, verdicts):
                out.row([*u, v.kind.value, v.nu])
        else:
            rows = []
            for u, v in zip(units, verdicts):
                rows.append({"phi": list(u), "verdict": v.kind.value, "nu": v.nu})
            out.text(dumps_json(rows))
    return 0


def _emit_lattice(cfg: RunConfig, out: _Writer, meta: dict, coords, values, coord_names) -> None:
    if cfg.output == "csv":
        for key, val in meta.items():
            out.comment(f"{key}={csv_cell(val) if not isinstance(val, dict) else json.dumps(_json_safe(val))}")
        out.row([*coord_names, "re", "im"])
        for x, v in zip(coords, values):
            out.row([*x, float(np.real(v)), float(np.imag(v))])
        fit = meta.get("decay")
        if fit is not None:
            out.row(["decay_fit", "C", fit["C"], "t", fit["t"]])
    else:
        doc = dict(meta)
        doc["columns"] = [*coord_names, "re", "im"]
        doc["values"] = [[*x, float(np.real(v)), float(np.imag(v))] for x, v in zip(coords, values)]
        out.text(dumps_json(doc))


def cmd_wavefunction(args, cfg: RunConfig, out: _Writer) -> int:
    if args.radius < 1:
        raise UsageError("--radius must be >= 1")
    if args.phi is not None:
        p = _two_particle(args)
        units = _phi_units(args, p.d)
        phi = QuasiMomentum.from_pi_units(units)
        nu, vec = fiber_eigenvector(phi, p, args.radius, gauge=Gauge(args.gauge))
        k0 = kernel_K(phi, nu, p, 0).at_origin
        meta = {"problem": "fiber", "phi": units, "gauge": args.gauge, "nu": nu}
    else:
        p = _one_particle(args)
        nu = classify_one_particle(p, tol=cfg.tol).point.nu
        vec = one_particle_eigenfunction(p, nu, args.radius)
        k0 = float(np.real(vec.at((0,) * p.d)))
        meta = {"problem": "one-particle", "nu": nu}
    fit = fit_decay(vec)
    meta.update({"K0": k0, "K0_error": abs(k0 - 1.0), "radius": args.radius, "decay": {"C": fit.C, "t": fit.t}})
    names = [f"x{k + 1}" for k in range(p.d)]
    _emit_lattice(cfg, out, meta, list(vec.points()), vec.values.ravel(), names)
    return 0


def cmd_g0(args, cfg: RunConfig, out: _Writer) -> int:
    radii = parse_ints(args.radius, "radius")
    if len(radii) == 1:
        radii = radii * 2
    if len(radii) != 2 or min(radii) < 1:
        raise UsageError("--radius must be R or R1,R with both >= 1")
    p = _two_particle(args)
    res = subspace_generator_g0(p, tuple(radii), gauge=Gauge(args.gauge))
    d = p.d
    r1, r = radii
    x1_pts = list(np.ndindex(*(2 * r1 + 1,) * d))
    x_pts = list(np.ndindex(*(2 * r + 1,) * d))
    coords, vals = [], []
    for i, a in enumerate(x1_pts):
        for j, b in enumerate(x_pts):
            coords.append((*(c - r1 for c in a), *(c - r for c in b)))
            vals.append(res.values[i, j])
    # Decay of the relative-coordinate profile at x1 = 0.
    centre = np.ravel_multi_index((r1,) * d, (2 * r1 + 1,) * d)
    fit = fit_decay(LatticeVector(r, res.values[centre].reshape((2 * r + 1,) * d)))
    k0 = kernel_K(QuasiMomentum.zero(d), classify_fiber(QuasiMomentum.zero(d), p).point.nu, p, 0).at_origin
    meta = {
        "gauge": res.gauge.value,
        "radius": list(radii),
        "K0": k0,
        "K0_error": abs(k0 - 1.0),
        "status": res.status.value,
        "phi_points": res.phi_points,
        "abs_error_estimate": res.abs_error_estimate,
        "decay": {"C": fit.C, "t": fit.t},
    }
    names = [f"x1_{k + 1}" for k in range(d)] + [f"x_{k + 1}" for k in range(d)]
    _emit_lattice(cfg, out, meta, coords, vals, names)
    return 0


def cmd_verify(args, cfg: RunConfig, out: _Writer) -> int:
    report = run_suite(args.suite)
    if cfg.output == "csv":
        out.row(["name", "observed", "tolerance", "passed", "detail"])
        for c in report.checks:
            out.row([c.name, c.observed, c.tolerance, "PASS" if c.passed else "FAIL", c.detail])
    else:
        out.text(dumps_json(report.to_dict()))
    return 0 if report.passed else EXIT_FAILURE


COMMANDS = {
    "watson": cmd_watson,
    "spectrum": cmd_spectrum,
    "surface": cmd_surface,
    "wavefunction": cmd_wavefunction,
    "g0": cmd_g0,
    "verify": cmd_verify,
}


def _fail(obj: dict, code: int) -> int:
    sys.stderr.write(dumps_json(obj))
    return code


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _parse(argv)
        cfg = _run_config(args)
    except UsageError as exc:
        return _fail({"error": "usage", "message": str(exc)}, EXIT_USAGE)
    except DeltaWalkError as exc:
        return _fail(exc.to_dict(), EXIT_USAGE)
    writer = _Writer(cfg.output_path)
    try:
        return COMMANDS[args.command](args, cfg, writer)
    except UsageError as exc:
        return _fail({"error": "usage", "message": str(exc)}, EXIT_USAGE)
    except DeltaWalkError as exc:
        return _fail(exc.to_dict(), EXIT_FAILURE)
    finally:
        writer.close()


if __name__ == "__main__":
    sys.exit(main())
