"""JSON spec files, CSV residual tables and the SVG residual chart."""

from __future__ import annotations

import csv
import io
import json
import math

import jsonschema
import numpy as np

from . import expr as ex
from . import geometry as geo
from . import numerics as nm
from .soliton import SolitonSpec

__all__ = ["SPEC_SCHEMA", "load_spec", "spec_from_dict", "spec_to_dict", "residual_csv", "residual_svg"]

_FUNCTION = {
    "oneOf": [
        {"type": "string", "minLength": 1},
        {
            "type": "object",
            "properties": {
                "values": {"type": "array", "items": {"type": "number"}},
                "derivatives": {"type": "array",
                                "items": {"type": "array", "items": {"type": "number"}}},
            },
            "required": ["values"],
            "additionalProperties": False,
        },
    ]
}

SPEC_SCHEMA = {
    "type": "object",
    "properties": {
        "interval": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
        "grid_points": {"type": "integer", "minimum": 3},
        "fibers": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "properties": {
                    "dim": {"type": "integer", "minimum": 1},
                    "mu": {"type": "number"},
                    "h": _FUNCTION,
                },
                "required": ["dim", "mu", "h"],
                "additionalProperties": False,
            },
        },
        "f": _FUNCTION,
        "lambda": _FUNCTION,
        "meta": {"type": "object"},
    },
    "required": ["interval", "fibers", "f"],
    "additionalProperties": False,
}


def _handle_from_json(obj, grid: nm.Grid) -> nm.FunctionHandle:
    if isinstance(obj, str):
        return nm.Closed(ex.parse(obj))
    values = nm.SampledFunction(grid, obj["values"])
    known = tuple(nm.SampledFunction(grid, d) for d in obj.get("derivatives", []))
    return nm.Sampled(values, known)


def _handle_to_json(fh: nm.FunctionHandle):
    if isinstance(fh, nm.Closed):
        return ex.to_string(fh.expr)
    out = {"values": fh.func.values.tolist()}
    if fh.known:
        out["derivatives"] = [k.values.tolist() for k in fh.known]
    return out


def _derived_lambda(product: geo.ProductSpec, f: nm.FunctionHandle) -> nm.FunctionHandle:
    """``f'' - sum r_j h_j''/h_j`` from the base equation."""
    handles = [f] + [fb.h for fb in product.fibers]
    if all(isinstance(h, nm.Closed) for h in handles):
        lam = f.derivative_expr(2)
        for fb in product.fibers:
            lam = lam - fb.dim * fb.h.derivative_expr(2) / fb.h.expr
        return nm.Closed(lam)
    f2 = nm.derivatives(f, product.grid, 2)[2]
    return nm.Sampled(nm.SampledFunction(product.grid, f2 + geo.ricci_base(product).values))


def spec_from_dict(doc: dict) -> tuple[SolitonSpec, bool]:
    """Build a spec; returns ``(spec, lambda_derived)``."""
    jsonschema.validate(doc, SPEC_SCHEMA)
    a, b = doc["interval"]
    grid = nm.Grid(float(a), float(b), int(doc.get("grid_points", nm.DEFAULT_COUNT)))
    fibers = tuple(geo.FiberSpec(fd["dim"], fd["mu"], _handle_from_json(fd["h"], grid))
                   for fd in doc["fibers"])
    product = geo.ProductSpec(grid, fibers)
    f = _handle_from_json(doc["f"], grid)
    derived = "lambda" not in doc
    lam = _derived_lambda(product, f) if derived else _handle_from_json(doc["lambda"], grid)
    return SolitonSpec(product, f, lam, dict(doc.get("meta", {}))), derived


def load_spec(path) -> tuple[SolitonSpec, bool]:
    with open(path, encoding="utf-8") as fh:
        return spec_from_dict(json.load(fh))


def _jsonable(v):
    if isinstance(v, (bool, int, str)) or v is None:
        return v
    if isinstance(v, float):
        return v if math.isfinite(v) else str(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    return str(v)


def spec_to_dict(spec: SolitonSpec) -> dict:
    g = spec.grid
    return {
        "interval": [g.a, g.b],
        "grid_points": g.count,
        "fibers": [{"dim": fb.dim, "mu": fb.mu, "h": _handle_to_json(fb.h)}
                   for fb in spec.product.fibers],
        "f": _handle_to_json(spec.f),
        "lambda": _handle_to_json(spec.lam),
        "meta": _jsonable(spec.meta),
    }


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def residual_csv(grid: nm.Grid, columns: dict) -> str:
    """Per-point residual table; deterministic 17-significant-digit formatting."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    names = list(columns)
    writer.writerow(["s"] + names)
    pts = grid.points
    arrays = [np.asarray(columns[c], dtype=float) for c in names]
    for i, s in enumerate(pts):
        writer.writerow([_fmt(s)] + [_fmt(a[i]) for a in arrays])
    return buf.getvalue()


_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
            "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"]


def residual_svg(grid: nm.Grid, columns: dict, title: str = "residual magnitudes",
                 width: int = 760, height: int = 440, floor: float = 1e-18) -> str:
    """Line chart of log10 |residual| against s as a standalone SVG document."""
    left, right, top, bottom = 70, 170, 40, 50
    pw, ph = width - left - right, height - top - bottom
    s = grid.points
    logs = {name: np.log10(np.maximum(np.abs(np.asarray(v, dtype=float)), floor))
            for name, v in columns.items()}
    if logs:
        lo = math.floor(min(float(v.min()) for v in logs.values()))
        hi = math.ceil(max(float(v.max()) for v in logs.values()))
    else:
        lo, hi = -16, 0
    if hi <= lo:
        hi = lo + 1

    def sx(x):
        return left + (x - grid.a) / (grid.b - grid.a) * pw

    def sy(y):
        return top + (hi - y) / (hi - lo) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
           f'<rect width="{width}" height="{height}" fill="white"/>',
           f'<text x="{left + pw / 2:.1f}" y="22" text-anchor="middle" font-size="14">{title}</text>',
           f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    step = max(1, (hi - lo) // 8)
    for e in range(lo, hi + 1, step):
        y = sy(e)
        out.append(f'<line x1="{left}" y1="{y:.1f}" x2="{left + pw}" y2="{y:.1f}" stroke="#ddd"/>')
        out.append(f'<text x="{left - 6}" y="{y + 4:.1f}" text-anchor="end">1e{e}</text>')
    for t in np.linspace(grid.a, grid.b, 5):
        x = sx(t)
        out.append(f'<line x1="{x:.1f}" y1="{top + ph}" x2="{x:.1f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{x:.1f}" y="{top + ph + 18}" text-anchor="middle">{t:.4g}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{height - 10}" text-anchor="middle">s</text>')
    out.append(f'<text x="16" y="{top + ph / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 16 {top + ph / 2:.1f})">|residual|</text>')
    stride = max(1, s.size // 600)
    for idx, (name, v) in enumerate(logs.items()):
        color = _PALETTE[idx % len(_PALETTE)]
        pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(s[::stride], v[::stride]))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{pts}"/>')
        ly = top + 14 + 16 * idx
        out.append(f'<line x1="{left + pw + 10}" y1="{ly - 4}" x2="{left + pw + 30}" y2="{ly - 4}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw + 35}" y="{ly}">{name}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
