"""Command-line entry point: ``phigrad {analyze,verdict,scan,verify,constants}``."""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from typing import List, Optional

from .config import MAX_CELLS, ConfigError, RunConfig, UnsupportedError, load_config
from .coupling import Phi1Violation, coupling_profile, iteration_constants
from .degree import degree_profile
from .radial import SolverError, sweep_radii
from .reports import (
    analyze_lines, analyze_rows, constants_lines, constants_rows, csv_text,
    render_svg, scan, scan_table, verdict_lines, write_csv,
)
from .verdict import classify

EXIT_OK = 0
EXIT_NOT_APPLICABLE = 2
EXIT_CONFIG = 64
EXIT_UNSUPPORTED = 65
EXIT_RESOURCE = 66
EXIT_SOLVER = 70

COMMANDS = ("analyze", "verdict", "scan", "verify", "constants")


class ResourceError(RuntimeError):
    pass


def _need(cfg: RunConfig, *names):
    for name in names:
        if getattr(cfg, name) is None:
            raise ConfigError(f"configuration needs '{name}'")


def _emit_csv(path, header, rows, prec):
    if path:
        write_csv(path, header, rows, prec)


def cmd_analyze(cfg: RunConfig, out) -> int:
    _need(cfg, "phi", "n")
    prof = degree_profile(cfg.phi, cfg.n)
    cp = coupling_profile(cfg.phi, cfg.psi, cfg.n, prof) if prof.phi1_ok else None
    prec = cfg.output.precision
    for line in analyze_lines(prof, cp, prec):
        print(line, file=out)
    _emit_csv(cfg.output.csv, ["quantity", "value", "method"], analyze_rows(prof, cp), prec)
    return EXIT_OK


def cmd_verdict(cfg: RunConfig, out) -> int:
    _need(cfg, "phi", "n")
    k = cfg.space.k if cfg.space is not None else 0.0
    v = classify(cfg.phi, cfg.psi, cfg.n, assume_nonneg_ricci_bounded=(k == 0))
    for line in verdict_lines(v, cfg.output.precision):
        print(line, file=out)
    if cfg.output.csv:
        liou = v.liouville.kind if v.liouville else ""
        _emit_csv(cfg.output.csv, ["status", "failed_condition", "margin", "boundary", "liouville"],
                  [[v.status, v.failed_condition or "", v.margin, v.boundary, liou]],
                  cfg.output.precision)
    return EXIT_OK if v.applicable else EXIT_NOT_APPLICABLE


def cmd_scan(cfg: RunConfig, out) -> int:
    if cfg.scan is None:
        raise ConfigError("scan needs a [scan] table")
    if cfg.scan.cells > MAX_CELLS:
        raise ResourceError(f"grid has {cfg.scan.cells} cells, limit is {MAX_CELLS}")
    _need(cfg, "phi")
    cells = scan(cfg)
    compare = cfg.scan.compare is not None
    header, rows = scan_table(cells, compare)
    prec = cfg.output.precision
    _emit_csv(cfg.output.csv, header, rows, prec)
    if cfg.output.svg:
        with open(cfg.output.svg, "w", encoding="utf-8", newline="") as fh:
            fh.write(render_svg(cells, cfg.scan.x.param, cfg.scan.y.param))
    n_adm = sum(c.admissible == 1 for c in cells)
    n_bd = sum(c.admissible == 2 for c in cells)
    print(f"cells={len(cells)} admissible={n_adm} boundary={n_bd}", file=out)
    return EXIT_OK


def cmd_verify(cfg: RunConfig, out) -> int:
    _need(cfg, "phi", "space")
    s = cfg.solver
    rows = sweep_radii(cfg.phi, cfg.psi, cfg.space, s.u0, s.radii, s.h, s.workers)
    table = [[r.R, r.c_hat, r.harnack_log, r.positive_ok, r.residual_max] for r in rows]
    header = ["R", "c_hat", "harnack_log", "positive_ok", "residual_max"]
    _emit_csv(cfg.output.csv, header, table, cfg.output.precision)
    out.write(csv_text(header, table, cfg.output.precision))
    return EXIT_OK


def cmd_constants(cfg: RunConfig, out) -> int:
    _need(cfg, "phi", "n")
    prof = degree_profile(cfg.phi, cfg.n)
    failed = prof.failed_condition()
    if failed:
        print(f"constants unavailable: ({failed}) fails", file=out)
        return EXIT_NOT_APPLICABLE
    k = iteration_constants(prof)
    cp = coupling_profile(cfg.phi, cfg.psi, cfg.n, prof)
    prec = cfg.output.precision
    for line in constants_lines(k, cp, prec):
        print(line, file=out)
    _emit_csv(cfg.output.csv, ["quantity", "value", "method"], constants_rows(k, cp), prec)
    return EXIT_OK


HANDLERS = {
    "analyze": cmd_analyze, "verdict": cmd_verdict, "scan": cmd_scan,
    "verify": cmd_verify, "constants": cmd_constants,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phigrad",
        description="Gradient-estimate applicability, constants, region scans and radial checks "
                    "for div(phi(|grad u|^2) grad u) + psi(u^2) u = 0.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="TOML run configuration")
    parser.add_argument("--csv", help="write CSV output here (overrides output.csv)")
    parser.add_argument("--svg", help="write SVG output here (scan only; overrides output.svg)")
    parser.add_argument("--precision", type=int, help="significant digits, 6..17")
    return parser


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    out = cfg.output
    if args.precision is not None:
        if not 6 <= args.precision <= 17:
            raise ConfigError("--precision must lie in [6, 17]")
        out = replace(out, precision=args.precision)
    if args.csv:
        out = replace(out, csv=args.csv)
    if args.svg:
        out = replace(out, svg=args.svg)
    return replace(cfg, output=out)


def main(argv: Optional[List[str]] = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        cfg = _apply_overrides(load_config(args.config), args)
        return HANDLERS[args.command](cfg, out)
    except UnsupportedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except Phi1Violation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (SolverError, ArithmeticError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
