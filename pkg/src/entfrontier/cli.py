"""Command-line front end.

Exit codes: 0 success, 2 input or domain error, 3 verification failure.
Single objects are printed as JSON, tables as CSV.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import frontier as fr
from .channels import adc_closed_form, damp, pdc_closed_form
from .errors import EntFrontierError, InvalidState
from .kkt import a2_params, d_params, kkt_check
from .measures import measure_set
from .ree import SolverConfig, css_gen_horodecki, ree
from .states import gen_horodecki, load_state, state_to_json

EXIT_OK, EXIT_INPUT, EXIT_VERIFY = 0, 2, 3
VERIFY_TOL = 1e-10
TABLE_TOL = 1e-3

# (alpha, p, C, N, E_R, B) of the six marked amplitude-damped states
TABLE_I = {
    "rho1": (0.0369, 1.0000, 0.3770, 0.3770, 0.2279, 0.3770),
    "rho2": (0.0751, 1.0000, 0.5271, 0.5271, 0.3847, 0.5271),
    "rho3": (0.2198, 0.8536, 0.7070, 0.5756, 0.4039, 0.0000),
    "rho4": (0.3510, 0.9565, 0.9130, 0.8706, 0.7445, 0.8169),
    "rho5": (0.2116, 1.0000, 0.8169, 0.8169, 0.7445, 0.8169),
    "rho6": (0.0947, 1.0000, 0.5856, 0.5856, 0.4520, 0.5856),
}


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_INPUT):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class RunConfig:
    command: str
    input: str | None = None
    output: str | None = None
    seed: int = 0
    n: int = 0
    grid: int = fr.GRID_POINTS
    starts: int = 8
    tol: float = 1e-13
    format: str = "json"

    def __post_init__(self):
        if self.seed < 0 or self.n < 0:
            raise CliError("seed and n must be non-negative")
        if self.grid < 2 or self.starts < 1 or not self.tol > 0.0:
            raise CliError("grid >= 2, starts >= 1 and tol > 0 are required")
        if self.format not in ("csv", "json"):
            raise CliError(f"unknown format {self.format!r}")

    @property
    def solver(self) -> SolverConfig:
        return SolverConfig(starts=self.starts, tol=self.tol, seed=self.seed)


def threads() -> int:
    raw = os.environ.get("ENTFRONTIER_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise CliError(f"ENTFRONTIER_THREADS={raw!r} is not an integer")
    if n < 1:
        raise CliError("ENTFRONTIER_THREADS must be positive")
    return n


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True)


def _emit(text: str, cfg: RunConfig) -> None:
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _load(path: str):
    try:
        return load_state(path)
    except InvalidState as exc:
        raise CliError(f"invalid state ({exc.invariant}): {exc}")
    except (OSError, ValueError) as exc:
        raise CliError(f"cannot read state file {path}: {exc}")


# --- commands ---------------------------------------------------------------

def cmd_measure(cfg: RunConfig) -> int:
    rho = _load(cfg.input)
    out = measure_set(rho).as_dict()
    sol = ree(rho, cfg.solver)
    out.update(E_R=sol.ree, method=sol.method)
    _emit(_json(out), cfg)
    return EXIT_OK


def cmd_channel(cfg: RunConfig, kind: str, alpha: float, q1: float, q2: float,
                verify: bool) -> int:
    out = {"channel": kind, "alpha": alpha, "q1": q1, "q2": q2}
    if kind == "adc":
        s = adc_closed_form(alpha, q1, q2)
        out.update(alpha_eff=s.alpha_eff, p=s.p, degenerate=s.degenerate)
    else:
        s = pdc_closed_form(alpha, q1, q2)
        out.update(alpha_eff=s.alpha_eff, p_eff=s.p_eff, y=s.y, degenerate=s.degenerate)
    out["state"] = state_to_json(s.density)
    out["measures"] = measure_set(s.density).as_dict()
    code = EXIT_OK
    if verify:
        kraus = damp(kind, alpha, q1, q2, closed_form=False)
        err = float(np.max(np.abs(kraus.matrix - s.density.matrix)))
        out["kraus_discrepancy"] = err
        if err > VERIFY_TOL:
            code = EXIT_VERIFY
    _emit(_json(out), cfg)
    return code


CURVE_BUILDERS = {
    "P": lambda axis, g: fr.curve_pure(axis, g),
    "D": lambda axis, g: fr.curve_lower_D(axis, g),
    "H": lambda axis, g: fr.curve_horodecki(axis, g),
    "A1": lambda axis, g: fr.curve_upper_A1(g),
    "A2": lambda axis, g: fr.curve_upper_A2(g),
}
CURVE_AXES = {"P": "CNB", "D": "NB", "H": "CNB", "A1": "N", "A2": "B"}


def _curves(axis: str, names: str, grid) -> list:
    out = []
    for name in (s.strip() for s in names.split(",") if s.strip()):
        if name not in CURVE_BUILDERS:
            raise CliError(f"unknown curve {name!r}")
        if axis not in CURVE_AXES[name]:
            raise CliError(f"curve {name} is not defined on axis {axis}")
        g = grid
        if name == "A2" and grid is None:
            g = fr.a2_grid()
        out.append(CURVE_BUILDERS[name](axis, fr.default_grid() if g is None else g))
    if not out:
        raise CliError("no curves requested")
    return out


def cmd_frontier(cfg: RunConfig, mode: str, axis: str, names: str) -> int:
    grid = None if cfg.grid == fr.GRID_POINTS else fr.default_grid(cfg.grid)
    if mode == "curves":
        _emit(fr.to_csv(fr.curve_rows(_curves(axis, names, grid))), cfg)
        return EXIT_OK
    if mode == "gap":
        results = []
        for c in _curves(axis, names, grid):
            g = fr.gap(c)
            results.append({"curve": g.curve, "axis": axis, "x_opt": g.x_opt, "delta": g.delta})
        _emit(_json(results), cfg)
        return EXIT_OK
    curves = _curves(axis, names, grid)
    if len(curves) != 2:
        raise CliError("crossing needs exactly two curves")
    pts = fr.crossing(*curves)
    _emit(_json([{"axis": axis, "x": x, "E_R": e} for x, e in pts]), cfg)
    return EXIT_OK


def cmd_scatter(cfg: RunConfig, check: bool) -> int:
    bands = fr.Bands.build() if check and cfg.n else None
    res = fr.monte_carlo_scatter(cfg.n, cfg.seed, bands=bands, starts=cfg.starts,
                                 workers=threads())
    if cfg.format == "json":
        text = _json([p.__dict__ for p in res.points])
    else:
        text = fr.to_csv(fr.scatter_rows(res.points))
    _emit(text, cfg)
    if check and res.flagged:
        for pt, bad in res.flagged:
            print(f"point {pt.index} violates {','.join(bad)}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_kkt(cfg: RunConfig, family: str | None, B: float | None, css: str | None,
            extremum: str) -> int:
    if family:
        if B is None:
            raise CliError("--family needs --B")
        point = (d_params if family == "D" else a2_params)(B)
        report = point.kkt()
    else:
        if not (cfg.input and css):
            raise CliError("give --family/--B or --state and --css")
        rho, sigma = _load(cfg.input), _load(css)
        from .measures import chsh_operator

        report = kkt_check(rho, sigma, chsh_operator(rho).matrix, extremum)
    _emit(_json(report.as_dict()), cfg)
    return EXIT_OK if report.verdict else EXIT_VERIFY


def table1_rows() -> list:
    rows = []
    for name, (alpha, p, C, N, E, B) in TABLE_I.items():
        m = measure_set(gen_horodecki(alpha, p))
        e = css_gen_horodecki(alpha, p)[1].ree
        got = (m.concurrence, m.negativity, e, m.nonlocality_B)
        ref = (C, N, E, B)
        rows.append({
            "state": name, "alpha": alpha, "p": p,
            **{k: v for k, v in zip(("C", "N", "E_R", "B"), got)},
            **{f"{k}_ref": v for k, v in zip(("C", "N", "E_R", "B"), ref)},
            "max_dev": max(abs(a - b) for a, b in zip(got, ref)),
        })
    return rows


def cmd_table1(cfg: RunConfig) -> int:
    rows = table1_rows()
    worst = max(r["max_dev"] for r in rows)
    if cfg.format == "json":
        text = _json({"rows": rows, "max_dev": worst})
    else:
        cols = ("state", "alpha", "p", "C", "C_ref", "N", "N_ref", "E_R", "E_R_ref",
                "B", "B_ref", "max_dev")
        lines = [",".join(cols)]
        for r in rows:
            lines.append(",".join(r[c] if isinstance(r[c], str) else f"{r[c]:.6f}" for c in cols))
        lines.append(f"max_dev,{worst:.6f}")
        text = "\n".join(lines)
    _emit(text, cfg)
    return EXIT_OK if worst <= TABLE_TOL else EXIT_VERIFY


# --- argument parsing -------------------------------------------------------

def _unit(text: str) -> float:
    v = float(text)
    if not (0.0 <= v <= 1.0) or math.isnan(v):
        raise argparse.ArgumentTypeError(f"{text} outside [0, 1]")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="entfrontier", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, fmt="json"):
        p.add_argument("--output", "-o")
        p.add_argument("--format", choices=["csv", "json"], default=fmt)
        p.add_argument("--starts", type=int, default=8)
        p.add_argument("--tol", type=float, default=1e-13)
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("measure", help="C, N, M, B, purity and E_R of a state file")
    p.add_argument("state")
    common(p)

    p = sub.add_parser("channel", help="damped |psi_alpha> in closed form")
    p.add_argument("kind", choices=["adc", "pdc"])
    p.add_argument("--alpha", type=_unit, required=True)
    p.add_argument("--q1", type=_unit, default=0.0)
    p.add_argument("--q2", type=_unit, default=0.0)
    p.add_argument("--verify", action="store_true", help="compare with Kraus summation")
    common(p)

    p = sub.add_parser("frontier", help="boundary curves (CSV), gaps or crossings (JSON)")
    p.add_argument("mode", nargs="?", choices=["curves", "gap", "crossing"], default="curves")
    p.add_argument("--axis", choices=list(fr.AXES), default="B")
    p.add_argument("--curves", default="P,D,A2")
    p.add_argument("--grid", type=int, default=fr.GRID_POINTS)
    common(p, "csv")

    p = sub.add_parser("scatter", help="Monte Carlo E_R against C, N, B")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--check", action="store_true", help="exit 3 on band violations")
    common(p, "csv")
    p.set_defaults(starts=4)

    p = sub.add_parser("kkt", help="KKT extremality report")
    p.add_argument("--family", choices=["D", "A2"])
    p.add_argument("--B", type=_unit)
    p.add_argument("--state")
    p.add_argument("--css")
    p.add_argument("--extremum", choices=["min", "max"], default="min")
    common(p)

    p = sub.add_parser("table1", help="marked amplitude-damped states, computed vs reference values")
    common(p, "csv")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(
            command=args.command,
            input=getattr(args, "state", None),
            output=args.output,
            seed=args.seed,
            n=getattr(args, "n", 0),
            grid=getattr(args, "grid", fr.GRID_POINTS),
            starts=args.starts,
            tol=args.tol,
            format=args.format,
        )
        if args.command == "measure":
            return cmd_measure(cfg)
        if args.command == "channel":
            return cmd_channel(cfg, args.kind, args.alpha, args.q1, args.q2, args.verify)
        if args.command == "frontier":
            return cmd_frontier(cfg, args.mode, args.axis, args.curves)
        if args.command == "scatter":
            return cmd_scatter(cfg, args.check)
        if args.command == "kkt":
            return cmd_kkt(cfg, args.family, args.B, args.css, args.extremum)
        return cmd_table1(cfg)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except InvalidState as exc:
        print(f"error: invalid state ({exc.invariant}): {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (EntFrontierError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
