"""Command-line front end.

Spectra are given as builtin expressions (``two_level(1)``, ``harmonic(1,64)``,
``random(seed,n,low,high)``), JSON files, or names from ``--library``.
Stable-equilibrium points are ``SPEC:E`` or ``SPEC:beta=X``.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import harness, thermo
from .config import GlobalConfig
from .entropy import entropy_difference, entropy_value, irreversible_bound
from .errors import EntropometerError, StepUnderflowError
from .extension import EntropyRangeResult, entropy_range, load_graph
from .interconnect import (
    SePoint,
    TemperatureScale,
    df11,
    f11,
    f11_domain,
    temperature,
    triple_point_scale,
)
from .processes import ModelState, simulate_standard_process
from .spectra import EnergySpectrum, SpectrumLibrary, compose, save_spectrum


class CliError(EntropometerError):
    pass


# --- formatting ----------------------------------------------------------


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def _json(obj) -> str:
    """JSON with every float written to 17 significant digits."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return json.dumps(obj)
    if isinstance(obj, (float, np.floating)):
        return fmt(obj) if math.isfinite(obj) else json.dumps(str(float(obj)))
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _emit(obj, out) -> None:
    out.write(_json(obj) + "\n")


def _table(args, header: list[str], rows, out) -> None:
    """Rows as CSV with a header line, or as a JSON list of records."""
    if args.config.output_format == "json":
        _emit([dict(zip(header, (float(v) for v in row))) for row in rows], out)
        return
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(fmt(v) for v in row) + "\n")


# --- argument parsing helpers -------------------------------------------


def parse_grid(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise CliError(f"grid must be START:STOP:N, got {text!r}")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise CliError(f"grid must be START:STOP:N, got {text!r}") from None
    if n < 1:
        raise CliError(f"grid needs at least one point, got {n}")
    return a, b, n


def _grid(text: str, log: bool = False) -> np.ndarray:
    a, b, n = parse_grid(text)
    if log:
        if not (a > 0 and b > 0):
            raise CliError("a logarithmic grid needs positive end points")
        return np.geomspace(a, b, n)
    return np.linspace(a, b, n)


def parse_point(text: str, library: SpectrumLibrary) -> SePoint:
    spec, sep, value = text.rpartition(":")
    if not sep:
        raise CliError(f"point must be SPEC:E or SPEC:beta=X, got {text!r}")
    spectrum = library.resolve(spec)
    try:
        if value.startswith("beta="):
            return SePoint.from_beta(spectrum, float(value[5:]))
        return SePoint(spectrum, float(value))
    except ValueError as exc:
        if isinstance(exc, EntropometerError):
            raise
        raise CliError(f"bad number in point {text!r}") from None


def parse_scale(text: str | None, triple: bool, library: SpectrumLibrary) -> TemperatureScale | None:
    if triple:
        if text:
            raise CliError("give either --ref or --triple-point, not both")
        return triple_point_scale()
    if not text:
        return None
    point, sep, t_ref = text.rpartition(":")
    if not sep:
        raise CliError(f"reference must be SPEC:E:T_REF, got {text!r}")
    try:
        T = float(t_ref)
    except ValueError:
        raise CliError(f"bad reference temperature in {text!r}") from None
    return TemperatureScale(parse_point(point, library), T)


def load_state(path: str, library: SpectrumLibrary) -> ModelState:
    """State file: ``{"spectrum": SPEC or {levels...}, "probs": [...]}`` or ``"beta": X``."""
    p = Path(path)
    try:
        data = json.loads(p.read_text())
    except FileNotFoundError:
        raise CliError(f"state file not found: {p}") from None
    except json.JSONDecodeError as exc:
        raise CliError(f"cannot parse {p}: {exc}") from None
    if not isinstance(data, dict) or "spectrum" not in data:
        raise CliError(f"{p}: state needs a 'spectrum' entry")
    spec = data["spectrum"]
    if isinstance(spec, dict):
        spectrum = EnergySpectrum.from_dict(spec)
    else:
        candidate = p.parent / spec
        spectrum = library.resolve(str(candidate) if candidate.is_file() else spec)
    if "probs" in data:
        return ModelState(spectrum, data["probs"])
    if "beta" in data:
        return ModelState.canonical(spectrum, float(data["beta"]))
    raise CliError(f"{p}: state needs 'probs' or 'beta'")


def _scale_or_calibrated(args, library, aux: SePoint) -> tuple[TemperatureScale, float]:
    """The requested scale, or one calibrated on the auxiliary state; plus the entropy unit factor."""
    scale = parse_scale(args.ref, args.triple_point, library)
    if scale is None:
        return TemperatureScale.calibrated(aux), args.kB
    # an explicit scale fixes its own entropy unit
    return scale, 1.0


# --- subcommands ---------------------------------------------------------


def cmd_spectrum_info(args, lib, out):
    s = lib.resolve(args.spectrum)
    s_lo, s_hi = thermo.entropy_bounds(s)
    _emit(
        {
            "name": s.name,
            "levels": s.n_levels,
            "microstates": s.microstate_count,
            "ground_energy": s.ground_energy,
            "top_energy": s.energies[-1],
            "infinite_temperature_energy": thermo.infinite_temperature_energy(s),
            "S_min": args.kB * s_lo,
            "S_max": args.kB * s_hi,
        },
        out,
    )


def cmd_spectrum_compose(args, lib, out):
    s = compose(lib.resolve(args.a), lib.resolve(args.b))
    save_spectrum(s, args.output)
    _emit({"name": s.name, "levels": s.n_levels, "microstates": s.microstate_count, "path": args.output}, out)


def cmd_thermo_table(args, lib, out):
    s = lib.resolve(args.spectrum)
    betas = _grid(args.beta_grid, args.log)
    if np.any(betas <= 0):
        raise CliError("beta grid must be positive")
    rows = zip(
        betas,
        thermo.ln_partition(s, betas),
        thermo.mean_energy(s, betas),
        args.kB * thermo.entropy_se(s, betas),
        args.kB * thermo.heat_capacity(s, betas),
    )
    _table(args, ["beta", "lnZ", "E", "S", "C"], rows, out)


def cmd_f11_curve(args, lib, out):
    b, c = parse_point(args.b, lib), parse_point(args.c, lib)
    if args.grid:
        grid = _grid(args.grid)
    else:
        lo, hi = f11_domain(b, c)
        grid = np.linspace(lo, hi, args.points + 2)[1:-1]
    E_C = np.atleast_1d(f11(b, c, grid))
    rows = []
    underflows = 0
    for e_b, e_c in zip(grid, E_C):
        try:
            fd = df11(b, c, float(e_b), "finite_difference")
        except StepUnderflowError:
            fd, underflows = math.nan, underflows + 1
        rows.append((e_b, e_c, df11(b, c, float(e_b)), fd))
    _table(args, ["E_B", "E_C", "df_analytic", "df_fd"], rows, out)
    if underflows:
        print(f"warning: finite-difference step underflowed at {underflows} point(s); wrote nan", file=sys.stderr)


def cmd_temperature(args, lib, out):
    point = parse_point(args.point, lib)
    scale = parse_scale(args.ref, args.triple_point, lib)
    if scale is None:
        raise CliError("temperature needs --ref SPEC:E:T_REF or --triple-point")
    _emit({"T": temperature(point, scale, args.method), "T_ref": scale.T_ref, "method": args.method}, out)


def cmd_process_run(args, lib, out):
    a1, a2 = load_state(args.a1, lib), load_state(args.a2, lib)
    b = parse_point(args.b, lib)
    r = simulate_standard_process(a1, a2, b, args.sigma)
    _emit(
        {
            "E_B_initial": r.E_B_initial,
            "E_B_final": r.E_B_final,
            "delta_S_A": args.kB * r.delta_S_A,
            "sigma": args.kB * r.sigma,
            "reversible": r.reversible,
            "work": r.work,
        },
        out,
    )


def cmd_entropy_diff(args, lib, out):
    a1, a2 = load_state(args.a1, lib), load_state(args.a2, lib)
    b = parse_point(args.b, lib)
    scale, unit = _scale_or_calibrated(args, lib, b)
    m = entropy_difference(a1, a2, b, scale, args.config.quadrature, args.config.check_tol)
    _emit(
        {
            "delta_S": unit * m.delta_S,
            "E_B1": m.E_B_path[0],
            "E_B2rev": m.E_B_path[1],
            "err_estimate": unit * m.quadrature_error_estimate,
        },
        out,
    )


def cmd_entropy_value(args, lib, out):
    a1, a0 = load_state(args.a1, lib), load_state(args.a0, lib)
    b = parse_point(args.b, lib)
    scale, unit = _scale_or_calibrated(args, lib, b)
    S = entropy_value(a1, a0, args.s0 / unit, b, scale, args.config.quadrature, args.config.check_tol)
    _emit({"S": unit * S}, out)


def cmd_entropy_bracket(args, lib, out):
    a1, a2 = load_state(args.a1, lib), load_state(args.a2, lib)
    bf = parse_point(args.b, lib)
    bb = parse_point(args.b_backward, lib) if args.b_backward else bf
    scale, unit = _scale_or_calibrated(args, lib, bf)
    br = irreversible_bound(a1, a2, bf, args.sigma_f, bb, args.sigma_b, scale, args.config.quadrature)
    _emit({"lower": unit * br.lower, "upper": unit * br.upper, "width": unit * br.width}, out)


def _find_node(g, token: str):
    for n in g.nodes:
        if n == token or str(n) == token:
            return n
    raise CliError(f"unknown node {token!r}")


def _range_json(r: EntropyRangeResult, kB: float) -> dict:
    return {"low": kB * r.low, "high": kB * r.high}


def cmd_extend_range(args, lib, out):
    g = load_graph(args.graph)
    node = _find_node(g, args.node)
    _emit({"node": str(node), **_range_json(entropy_range(g, node), args.kB)}, out)


def cmd_extend_check(args, lib, out):
    g = load_graph(args.graph)
    ranges = {str(n): _range_json(entropy_range(g, n), args.kB) for n in g.nodes if not g.in_sigma(n)}
    _emit({"consistent": True, "nodes": len(g.nodes), "sigma": len(g.sigma), "ranges": ranges}, out)


def cmd_verify_all(args, lib, out):
    cfg = harness.SuiteConfig(
        seed=args.seed,
        n_instances=args.instances,
        checks=tuple(args.check) if args.check else None,
        f11_skew=args.inject_f11_skew,
        tolerances={"quadrature": args.config.quad_tol},
    )
    reports = harness.run_suite(cfg)
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        out.write(f"{status} {r.name}: residual {r.max_residual:.3e} <= {r.tolerance:g} over {r.instances} instances\n")
    if args.out:
        Path(args.out).write_text(harness.report_json(reports))
    return 0 if all(r.passed for r in reports) else 1


# --- parser --------------------------------------------------------------


def _add_scale_args(p):
    p.add_argument("--ref", help="temperature scale reference SPEC:E:T_REF (default: calibrated on the auxiliary)")
    p.add_argument("--triple-point", action="store_true", help="use the triple-point preset scale (T_ref = 273.16)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entropometer", description=__doc__.splitlines()[0])
    parser.add_argument("--kB", type=float, default=1.0, help="Boltzmann constant for entropy output (default 1)")
    parser.add_argument("--format", choices=["csv", "json"], default="csv", help="table output format")
    parser.add_argument("--library", help="directory of spectrum JSON files resolvable by name")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", help="inspect and combine spectra").add_subparsers(dest="action", required=True)
    p = sp.add_parser("info")
    p.add_argument("spectrum")
    p.set_defaults(func=cmd_spectrum_info)
    p = sp.add_parser("compose")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_spectrum_compose)

    sp = sub.add_parser("thermo", help="canonical tables").add_subparsers(dest="action", required=True)
    p = sp.add_parser("table")
    p.add_argument("spectrum")
    p.add_argument("--beta-grid", required=True, metavar="START:STOP:N")
    p.add_argument("--log", action="store_true", help="geometric instead of linear beta spacing")
    p.set_defaults(func=cmd_thermo_table)

    sp = sub.add_parser("f11", help="interconnection curves").add_subparsers(dest="action", required=True)
    p = sp.add_parser("curve")
    p.add_argument("--b", required=True, metavar="SPEC:E")
    p.add_argument("--c", required=True, metavar="SPEC:E")
    p.add_argument("--grid", metavar="START:STOP:N", help="E_B grid (default: interior of the domain)")
    p.add_argument("--points", type=int, default=50, help="points when --grid is omitted")
    p.set_defaults(func=cmd_f11_curve)

    p = sub.add_parser("temperature", help="temperature of a stable-equilibrium state")
    p.add_argument("--point", required=True, metavar="SPEC:E")
    _add_scale_args(p)
    p.add_argument("--method", choices=["analytic", "finite_difference"], default="analytic")
    p.set_defaults(func=cmd_temperature)

    sp = sub.add_parser("process", help="standard weight processes").add_subparsers(dest="action", required=True)
    p = sp.add_parser("run")
    p.add_argument("--a1", required=True)
    p.add_argument("--a2", required=True)
    p.add_argument("--b", required=True, metavar="SPEC:E")
    p.add_argument("--sigma", type=float, default=0.0)
    p.set_defaults(func=cmd_process_run)

    sp = sub.add_parser("entropy", help="operational entropy").add_subparsers(dest="action", required=True)
    p = sp.add_parser("diff")
    p.add_argument("--a1", required=True)
    p.add_argument("--a2", required=True)
    p.add_argument("--b", required=True, metavar="SPEC:E")
    _add_scale_args(p)
    p.set_defaults(func=cmd_entropy_diff)
    p = sp.add_parser("value")
    p.add_argument("--a1", required=True)
    p.add_argument("--a0", required=True)
    p.add_argument("--s0", type=float, required=True, help="entropy assigned to the reference state a0")
    p.add_argument("--b", required=True, metavar="SPEC:E")
    _add_scale_args(p)
    p.set_defaults(func=cmd_entropy_value)
    p = sp.add_parser("bracket")
    p.add_argument("--a1", required=True)
    p.add_argument("--a2", required=True)
    p.add_argument("--b", required=True, metavar="SPEC:E", help="auxiliary for the forward process")
    p.add_argument("--b-backward", metavar="SPEC:E", help="auxiliary for the backward process (default: --b)")
    p.add_argument("--sigma-f", type=float, required=True)
    p.add_argument("--sigma-b", type=float, required=True)
    _add_scale_args(p)
    p.set_defaults(func=cmd_entropy_bracket)

    sp = sub.add_parser("extend", help="entropy ranges on accessibility graphs").add_subparsers(dest="action", required=True)
    p = sp.add_parser("range")
    p.add_argument("graph")
    p.add_argument("node")
    p.set_defaults(func=cmd_extend_range)
    p = sp.add_parser("check")
    p.add_argument("graph")
    p.set_defaults(func=cmd_extend_check)

    sp = sub.add_parser("verify", help="certification suite").add_subparsers(dest="action", required=True)
    p = sp.add_parser("all")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--instances", type=int, help="instances per check (default: each check's own)")
    p.add_argument("--check", action="append", choices=harness.CHECK_NAMES, help="run only this check (repeatable)")
    p.add_argument("--out", help="write the JSON report here")
    p.add_argument("--inject-f11-skew", type=float, default=0.0, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify_all)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.config = GlobalConfig(kB=args.kB, output_format=args.format).with_env()
        library = SpectrumLibrary()
        if args.library:
            library.load_dir(args.library)
        code = args.func(args, library, sys.stdout)
    except (EntropometerError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return code or 0


if __name__ == "__main__":
    sys.exit(main())
