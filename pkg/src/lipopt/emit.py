"""Report and trace writers: CSV traces, JSON reports, SVG plots and a
plain-text summary table. Output is deterministic for a given report."""

from __future__ import annotations

import csv
import json
import math
import os
from typing import Any, Iterable, Union
from xml.sax.saxutils import escape

from .baselines import TRACE_COLUMNS as POINT_COLUMNS
from .baselines import PointTrace
from .errors import EXIT_IO, LipoptError
from .harness import ExperimentReport
from .sugd import TRACE_COLUMNS as BRACKET_COLUMNS
from .sugd import BracketTrace

Trace = Union[BracketTrace, PointTrace]


class OutputError(LipoptError, OSError):
    exit_code = EXIT_IO


def _num(v: Any) -> str:
    # repr() of a float is the shortest string that round-trips
    if isinstance(v, float):
        return repr(v)
    return str(v)


def trace_columns(trace: Trace) -> tuple[str, ...]:
    return BRACKET_COLUMNS if isinstance(trace, BracketTrace) else POINT_COLUMNS


def emit_trace_csv(trace: Trace, path: str) -> None:
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(trace_columns(trace))
            for rec in trace.records:
                w.writerow([_num(v) for v in rec])
    except OSError as exc:
        raise OutputError(f"cannot write trace CSV {path}: {exc}") from exc


def read_trace_csv(path: str) -> Trace:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header = tuple(rows[0])
    if header == BRACKET_COLUMNS:
        trace: Trace = BracketTrace()
    elif header == POINT_COLUMNS:
        trace = PointTrace()
    else:
        raise ValueError(f"{path}: unrecognised trace header {header}")
    for row in rows[1:]:
        if isinstance(trace, BracketTrace):
            trace.append(int(row[0]), *(float(v) for v in row[1:]))
        else:
            trace.append(int(row[0]), float(row[1]), float(row[2]), float(row[3]), int(row[4]))
    return trace


def report_json(report: ExperimentReport) -> str:
    return json.dumps(report.to_dict(), indent=2, allow_nan=True) + "\n"


def emit_report_json(report: ExperimentReport, path: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(report_json(report))
    except OSError as exc:
        raise OutputError(f"cannot write report JSON {path}: {exc}") from exc


def load_report_json(path: str) -> ExperimentReport:
    with open(path, encoding="utf-8") as fh:
        return ExperimentReport.from_dict(json.load(fh))


def _fmt(v: Any, spec: str) -> str:
    if v is None:
        return "-"
    if isinstance(v, float):
        return format(v, spec)
    return str(v)


def render_table(report: ExperimentReport) -> str:
    """Fixed-width summary, best gap first; failed runs sink to the bottom."""
    def key(a):
        return (a.gap is None, a.gap if a.gap is not None else math.inf, a.label)

    rows = sorted(report.algorithms, key=key)
    head = (f"{'algorithm':<14} {'x_min':>14} {'f_min':>14} {'gap':>11} "
            f"{'iters':>9} {'evals':>9}  termination")
    lines = [
        f"function {report.function} on [{report.domain[0]:g}, {report.domain[1]:g}]   "
        f"oracle x*={report.oracle.x_star:.9g} f*={report.oracle.f_star:.9g}",
        head,
        "-" * len(head),
    ]
    for a in rows:
        term = a.termination or ""
        if a.error:
            term = f"ERROR {a.error}"
        lines.append(
            f"{a.label:<14} {_fmt(a.x_min, '14.8g')} {_fmt(a.f_min, '14.8g')} "
            f"{_fmt(a.gap, '11.3e')} {_fmt(a.iters, ''):>9} {_fmt(a.evals, ''):>9}  {term}"
        )
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------------------ SVG

PALETTE = ("#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf")
WIDTH, PANEL_H, MARGIN = 900, 320, 60
MAX_PATH_POINTS = 600


def _subsample(n: int, limit: int = MAX_PATH_POINTS) -> list[int]:
    if n <= limit:
        return list(range(n))
    step = (n - 1) / (limit - 1)
    idx = sorted({round(i * step) for i in range(limit)})
    return idx


def _finite(vals: Iterable[float]) -> list[float]:
    return [v for v in vals if v is not None and math.isfinite(v)]


class _Axes:
    def __init__(self, top: float, xlo: float, xhi: float, ylo: float, yhi: float):
        if xhi <= xlo:
            xhi = xlo + 1.0
        if yhi <= ylo:
            yhi = ylo + 1.0
        pad = 0.05 * (yhi - ylo)
        self.top, self.xlo, self.xhi = top, xlo, xhi
        self.ylo, self.yhi = ylo - pad, yhi + pad

    def px(self, x: float) -> float:
        return MARGIN + (x - self.xlo) / (self.xhi - self.xlo) * (WIDTH - 2 * MARGIN)

    def py(self, y: float) -> float:
        y = min(max(y, self.ylo), self.yhi)
        return self.top + PANEL_H - (y - self.ylo) / (self.yhi - self.ylo) * PANEL_H

    def polyline(self, pts: list[tuple[float, float]], color: str, width: float = 1.5, dash: str = "") -> str:
        coords = " ".join(f"{self.px(x):.2f},{self.py(y):.2f}" for x, y in pts
                          if math.isfinite(x) and math.isfinite(y))
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        return (f'<polyline fill="none" stroke="{color}" stroke-width="{width}"{extra} '
                f'points="{coords}"/>')

    def frame(self, title: str, xlabel: str, ylabel: str) -> list[str]:
        x0, x1 = MARGIN, WIDTH - MARGIN
        y0, y1 = self.top, self.top + PANEL_H
        out = [
            f'<rect x="{x0}" y="{y0}" width="{x1 - x0}" height="{PANEL_H}" fill="none" stroke="#333"/>',
            f'<text x="{WIDTH / 2:.0f}" y="{y0 - 8}" text-anchor="middle" font-size="14">{escape(title)}</text>',
            f'<text x="{WIDTH / 2:.0f}" y="{y1 + 36}" text-anchor="middle" font-size="12">{escape(xlabel)}</text>',
            f'<text x="14" y="{(y0 + y1) / 2:.0f}" font-size="12" '
            f'transform="rotate(-90 14 {(y0 + y1) / 2:.0f})" text-anchor="middle">{escape(ylabel)}</text>',
        ]
        for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
            xv = self.xlo + frac * (self.xhi - self.xlo)
            yv = self.ylo + frac * (self.yhi - self.ylo)
            out.append(f'<text x="{self.px(xv):.2f}" y="{y1 + 16}" text-anchor="middle" '
                       f'font-size="10">{xv:.4g}</text>')
            out.append(f'<text x="{x0 - 4}" y="{self.py(yv) + 3:.2f}" text-anchor="end" '
                       f'font-size="10">{yv:.4g}</text>')
        return out


def _path_points(trace: Trace) -> tuple[list[float], list[float], list[int]]:
    """Iterate positions, objective values and iteration numbers."""
    if isinstance(trace, BracketTrace):
        return list(trace.x1), list(trace.f1), list(trace.iters)
    return list(trace.x), list(trace.f_x), list(trace.iters)


def render_svg(report: ExperimentReport) -> str:
    lo, hi = report.domain
    xs, ys = report.landscape if report.landscape else ([lo, hi], [0.0, 0.0])
    paths = []
    for a in report.algorithms:
        if a.trace is not None and len(a.trace):
            paths.append((a.label, _path_points(a.trace)))

    fvals = _finite(ys)
    for _, (_, pf, _) in paths:
        fvals += _finite(pf)
    ylo, yhi = (min(fvals), max(fvals)) if fvals else (0.0, 1.0)

    top1 = MARGIN
    top2 = MARGIN + PANEL_H + 90
    height = top2 + PANEL_H + 100 + 16 * len(paths)
    land = _Axes(top1, lo, hi, ylo, yhi)
    max_it = max((p[2][-1] for _, p in paths), default=1)
    loss = _Axes(top2, 0.0, math.log10(1 + max(max_it, 1)), ylo, yhi)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{height}" '
        f'viewBox="0 0 {WIDTH} {height}" font-family="sans-serif">',
        f'<rect width="{WIDTH}" height="{height}" fill="white"/>',
    ]
    out += land.frame(f"{report.function}: landscape and iterate paths", "x", "f(x)")
    out.append(land.polyline(list(zip(xs, ys)), "#888", 1.0))
    out.append(f'<circle cx="{land.px(report.oracle.x_star):.2f}" cy="{land.py(report.oracle.f_star):.2f}" '
               f'r="5" fill="none" stroke="black" stroke-width="1.5"/>')
    out += loss.frame("objective value vs iteration", "log10(1 + iteration)", "f(x_n)")
    out.append(loss.polyline([(loss.xlo, report.oracle.f_star), (loss.xhi, report.oracle.f_star)],
                             "black", 1.0, "4 3"))
    for i, (label, (px, pf, pit)) in enumerate(paths):
        color = PALETTE[i % len(PALETTE)]
        idx = _subsample(len(px))
        out.append(f'<g id="path-{escape(label)}">')
        out.append(land.polyline([(px[j], pf[j]) for j in idx], color, 1.2))
        last = idx[-1]
        if math.isfinite(px[last]) and math.isfinite(pf[last]):
            out.append(f'<circle cx="{land.px(px[last]):.2f}" cy="{land.py(pf[last]):.2f}" r="3.5" '
                       f'fill="{color}"/>')
        out.append(loss.polyline([(math.log10(1 + pit[j]), pf[j]) for j in idx], color, 1.2))
        out.append("</g>")
        ly = top2 + PANEL_H + 60 + 16 * i
        out.append(f'<rect x="{MARGIN}" y="{ly - 9}" width="14" height="4" fill="{color}"/>')
        out.append(f'<text x="{MARGIN + 20}" y="{ly - 4}" font-size="11">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_plot_svg(report: ExperimentReport, path: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(render_svg(report))
    except OSError as exc:
        raise OutputError(f"cannot write SVG {path}: {exc}") from exc


def emit_all(report: ExperimentReport, out_dir: str, formats: Iterable[str]) -> list[str]:
    """Write every requested artifact under ``out_dir``; returns written paths.
    The table is written as ``summary.txt``."""
    formats = set(formats)
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"cannot create output directory {out_dir}: {exc}") from exc
    stem = _safe(report.function)
    written = []
    if "csv" in formats:
        for a in report.algorithms:
            if a.trace is not None:
                p = os.path.join(out_dir, f"{stem}_{_safe(a.label)}_trace.csv")
                emit_trace_csv(a.trace, p)
                written.append(p)
    if "json" in formats:
        p = os.path.join(out_dir, f"{stem}_report.json")
        emit_report_json(report, p)
        written.append(p)
    if "svg" in formats:
        p = os.path.join(out_dir, f"{stem}_plot.svg")
        emit_plot_svg(report, p)
        written.append(p)
    if "table" in formats:
        p = os.path.join(out_dir, f"{stem}_summary.txt")
        try:
            with open(p, "w", encoding="utf-8") as fh:
                fh.write(render_table(report))
        except OSError as exc:
            raise OutputError(f"cannot write table {p}: {exc}") from exc
        written.append(p)
    return written


def _safe(name: str) -> str:
    out = "".join(c if c.isalnum() or c in "-_" else "_" for c in name)
    return out[:60] or "expr"
