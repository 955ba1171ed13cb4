"""Region scans and deterministic CSV/SVG/text output."""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence

from .config import ConfigError, RunConfig, ScanSpec, _num, build_phi, build_psi, with_value
from .coupling import CouplingProfile, IterationConstants
from .degree import DegreeProfile
from .verdict import Verdict, classify

__all__ = [
    "fmt", "ScanCell", "scan", "cell_verdict", "comparison_region",
    "write_csv", "csv_text", "render_svg", "analyze_lines", "verdict_lines",
    "constants_lines",
]


def fmt(v, precision: int = 12) -> str:
    """Fixed-significant-digit rendering used for every numeric output."""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, int):
        return str(v)
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    s = f"{v:.{precision}g}"
    # rounding up near the float maximum would read back as inf
    return s if math.isfinite(float(s)) else repr(v)


@dataclass(frozen=True)
class ScanCell:
    x: float
    y: float
    admissible: int  # 0 no, 1 yes, 2 boundary
    margin: float
    comparison: Optional[int] = None


def cell_verdict(raw: dict) -> Optional[Verdict]:
    """Classify one configuration; None when the parameters are invalid (e.g. m >= k)."""
    try:
        n = _num(raw["n"], "n")
        phi = build_phi(raw["phi"])
        psi = build_psi(raw.get("psi"))
    except (ConfigError, KeyError):
        return None
    return classify(phi, psi, n)


def comparison_region(n, m, k) -> bool:
    """The older double-power region: ``(1 < m < (n+3)/(n-1) or 1 < k < (n+3)/(n-1)) and m < k``."""
    c3 = (n + 3) / (n - 1)
    return (1 < m < c3 or 1 < k < c3) and m < k


def _eval_cell(args) -> ScanCell:
    raw, spec, xv, yv = args
    cell_raw = with_value(with_value(raw, spec.x.param, xv), spec.y.param, yv)
    v = cell_verdict(cell_raw)
    if v is None:
        adm, margin = 0, math.nan
    elif v.boundary:
        adm, margin = 2, v.margin
    else:
        adm, margin = int(v.applicable), v.margin
    comp = None
    if spec.compare == "wang":
        psi = cell_raw.get("psi", {})
        comp = int(comparison_region(float(cell_raw["n"]), float(psi["m"]), float(psi["k"])))
    return ScanCell(xv, yv, adm, margin, comp)


def scan(cfg: RunConfig) -> List[ScanCell]:
    """Evaluate every grid cell; the row order is x-major regardless of workers."""
    spec: ScanSpec = cfg.scan
    if spec is None:
        raise ConfigError("scan needs a [scan] table")
    if "n" not in cfg.raw and "n" not in (spec.x.param, spec.y.param):
        raise ConfigError("scan needs n")
    if spec.compare == "wang":
        params = {spec.x.param, spec.y.param}
        if params != {"psi.m", "psi.k"}:
            raise ConfigError("compare = 'wang' needs axes psi.m and psi.k")
    jobs = [(cfg.raw, spec, xv, yv) for xv in spec.x.values() for yv in spec.y.values()]
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            return list(pool.map(_eval_cell, jobs, chunksize=64))
    return [_eval_cell(j) for j in jobs]


# -- CSV -------------------------------------------------------------------

def csv_text(header: Sequence[str], rows: Sequence[Sequence], precision: int = 12) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else fmt(v, precision) for v in row])
    return buf.getvalue()


def write_csv(path: str, header, rows, precision: int = 12) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(csv_text(header, rows, precision))


def scan_table(cells: Sequence[ScanCell], compare: bool):
    header = ["param1", "param2", "admissible", "margin"] + (["comparison"] if compare else [])
    rows = []
    for c in cells:
        row = [c.x, c.y, c.admissible, c.margin]
        if compare:
            row.append(c.comparison)
        rows.append(row)
    return header, rows


# -- SVG -------------------------------------------------------------------

_COLORS = {0: "#eeeeee", 1: "#4a7fb5", 2: "#e8a33d"}


def render_svg(cells: Sequence[ScanCell], xlabel: str, ylabel: str,
               precision: int = 6) -> str:
    """A grid of filled cells; an optional comparison layer is drawn on top."""
    xs = sorted({c.x for c in cells})
    ys = sorted({c.y for c in cells})
    ix = {v: i for i, v in enumerate(xs)}
    iy = {v: i for i, v in enumerate(ys)}
    size = max(2, min(20, 600 // max(len(xs), len(ys))))
    left, bottom, top, right = 60, 40, 10, 10
    width = left + size * len(xs) + right
    height = top + size * len(ys) + bottom

    def cell_rect(c, fill, extra=""):
        x = left + ix[c.x] * size
        y = top + (len(ys) - 1 - iy[c.y]) * size
        return f'<rect x="{x}" y="{y}" width="{size}" height="{size}" fill="{fill}"{extra}/>'

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}">',
        '<g id="admissible">',
    ]
    out += [cell_rect(c, _COLORS[c.admissible]) for c in cells]
    out.append("</g>")
    if any(c.comparison is not None for c in cells):
        out.append('<g id="comparison">')
        out += [cell_rect(c, "#c0392b", ' fill-opacity="0.35"') for c in cells if c.comparison]
        out.append("</g>")
    base = top + size * len(ys)
    out.append(f'<text x="{left}" y="{base + 15}" font-size="11">{fmt(xs[0], precision)}</text>')
    out.append(f'<text x="{width - right}" y="{base + 15}" font-size="11" '
               f'text-anchor="end">{fmt(xs[-1], precision)}</text>')
    out.append(f'<text x="{left + size * len(xs) / 2:g}" y="{base + 32}" font-size="12" '
               f'text-anchor="middle">{xlabel}</text>')
    out.append(f'<text x="{left - 4}" y="{base}" font-size="11" text-anchor="end">'
               f'{fmt(ys[0], precision)}</text>')
    out.append(f'<text x="{left - 4}" y="{top + 10}" font-size="11" text-anchor="end">'
               f'{fmt(ys[-1], precision)}</text>')
    out.append(f'<text x="12" y="{top + size * len(ys) / 2:g}" font-size="12" '
               f'text-anchor="middle" transform="rotate(-90 12 {top + size * len(ys) / 2:g})">'
               f'{ylabel}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# -- text reports ------------------------------------------------------------

def _degree_rows(p: DegreeProfile):
    closed = "closed_form" if p.gamma_closed is not None else "numeric"
    return [
        ("l_phi", p.l, "closed_form"),
        ("d_phi", p.d, "closed_form"),
        ("gamma_phi", p.gamma, "numeric"),
        ("Gamma_phi", p.Gamma, closed),
        ("gamma_phi_closed", math.nan if p.gamma_closed is None else float(p.gamma_closed), closed),
        ("phi1_ok", p.phi1_ok, ""),
        ("phi2_ok", p.phi2_ok, ""),
    ]


def _coupling_rows(c: CouplingProfile):
    return [
        ("I_psi", repr(c.i_psi), c.method),
        ("Theta", c.theta_big, c.method),
        ("threshold", c.threshold, c.method),
        ("psi2_ok", c.psi2_ok, ""),
        ("theta", c.theta_small, c.method),
        ("alpha", c.alpha, c.method),
    ]


def analyze_rows(prof: DegreeProfile, cp: Optional[CouplingProfile]):
    rows = _degree_rows(prof)
    if cp is not None:
        rows += _coupling_rows(cp)
    return rows


def _line(name, value, method, precision):
    val = value if isinstance(value, str) else fmt(value, precision)
    return f"{name:<18} {val}" + (f"  [{method}]" if method else "")


def analyze_lines(prof: DegreeProfile, cp: Optional[CouplingProfile], precision: int = 12):
    lines = [_line(*r, precision) for r in analyze_rows(prof, cp)]
    if not prof.phi1_ok:
        why = "d_phi = inf" if math.isinf(prof.d) else f"l_phi = {fmt(prof.l, precision)} <= -1"
        lines.append(f"(phi1) fails: {why}")
    elif not prof.phi2_ok:
        lines.append(f"(phi2) fails: gamma_phi = {fmt(prof.gamma, precision)}")
    return lines


def verdict_lines(v: Verdict, precision: int = 12):
    lines = []
    if v.status == "not_applicable":
        lines.append(f"estimate does not apply: {v.detail}")
    else:
        lines.append("gradient estimate |grad u|/u <= C (1 + sqrt(K) R)/R holds on B(o, R)")
        lines.append(f"Harnack: {v.harnack}")
        if v.liouville is not None:
            lines.append(f"Liouville (Ric >= 0, u bounded): {v.liouville.describe()}")
    lines.append(v.summary())
    return lines


def constants_rows(k: IterationConstants, cp: CouplingProfile):
    return [("a0", k.a0, ""), ("a1", k.a1, ""), ("a2", k.a2, ""), ("a3", k.a3, ""),
            ("theta", cp.theta_small, ""), ("alpha", cp.alpha, ""),
            ("b_threshold", k.b_threshold, "")]


def constants_lines(k: IterationConstants, cp: CouplingProfile, precision: int = 12):
    lines = [_line(*r, precision) for r in constants_rows(k, cp)]
    lines.append(f"iteration exponent: b > {fmt(k.b_threshold, precision)}")
    return lines
