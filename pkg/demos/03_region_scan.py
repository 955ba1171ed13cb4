"""Admissible (m, k) region for u^m - u^k with the Laplacian in R^3.

Writes demos/out/region.csv and demos/out/region.svg. Cells in the older
comparison region are overlaid in red; every one of them lies inside the
admissible set, which is strictly larger.
"""
import pathlib

from phigrad.config import parse_config
from phigrad.reports import render_svg, scan, scan_table, write_csv

out = pathlib.Path(__file__).parent / "out"
out.mkdir(exist_ok=True)

cfg = parse_config({
    "n": 3,
    "phi": {"kind": "power_law", "p": 2},
    "psi": {"kind": "double_power", "m": 0, "k": 1},
    "scan": {"compare": "wang",
             "x": {"param": "psi.m", "start": -1.0, "stop": 5.0, "num": 49},
             "y": {"param": "psi.k", "start": -1.0, "stop": 5.0, "num": 49}},
})
cells = scan(cfg)
header, rows = scan_table(cells, compare=True)
write_csv(out / "region.csv", header, rows)
(out / "region.svg").write_text(render_svg(cells, "m", "k"))

ours = {(c.x, c.y) for c in cells if c.admissible == 1}
older = {(c.x, c.y) for c in cells if c.comparison}
print(f"admissible cells: {len(ours)}, comparison cells: {len(older)}")
print("comparison region contained in admissible set:", older <= ours)
print("cells gained:", len(ours - older))
