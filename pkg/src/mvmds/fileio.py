"""CSV, JSON, and SVG input/output used by the command-line front end.

All writers are deterministic: floats are serialized with ``repr`` (full
round-trip precision) in CSVs, JSON objects are emitted with sorted keys,
newlines are always LF, and SVG files are assembled from fixed format
strings so identical runs produce byte-identical files.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .errors import ParseError
from .redistrict import Ensemble


def format_float(x: float) -> str:
    return repr(float(x))


def _write_text(path, text: str):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _split_csv_line(line: str) -> list[str]:
    return [cell.strip() for cell in line.rstrip("\n").rstrip("\r").split(",")]


def read_distance_csv(path) -> tuple[np.ndarray, tuple[str, ...] | None]:
    """Read a square distance matrix, with an optional label header row."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln for ln in fh if ln.strip()]
    if not lines:
        raise ParseError("empty distance file", line=1)
    first = _split_csv_line(lines[0])
    labels = None
    start = 0
    try:
        [float(c) for c in first]
    except ValueError:
        labels = tuple(first)
        start = 1
    rows = []
    width = None
    for offset, line in enumerate(lines[start:], start=start + 1):
        cells = _split_csv_line(line)
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise ParseError(f"expected {width} columns, found {len(cells)}", line=offset)
        try:
            rows.append([float(c) for c in cells])
        except ValueError as exc:
            raise ParseError(f"bad number: {exc}", line=offset) from None
    D = np.array(rows, dtype=float)
    if D.size == 0 or D.shape[0] != D.shape[1]:
        raise ParseError(f"matrix is not square: shape {D.shape}", line=start + 1)
    if labels is not None and len(labels) != D.shape[0]:
        raise ParseError("header label count does not match matrix size", line=1)
    return D, labels


def write_distance_csv(path, D, labels=None):
    D = np.asarray(D, dtype=float)
    out = []
    if labels is not None:
        out.append(",".join(str(x) for x in labels))
    for row in D:
        out.append(",".join(format_float(v) for v in row))
    _write_text(path, "\n".join(out) + "\n")


def read_weights_file(path) -> np.ndarray:
    """One weight per line."""
    values = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                values.append(float(text))
            except ValueError as exc:
                raise ParseError(f"bad weight: {exc}", line=lineno) from None
    if not values:
        raise ParseError("empty weights file", line=1)
    return np.array(values)


def read_plans_csv(path) -> Ensemble:
    """Plans table: header of unit ids, then one row per plan
    (plan id followed by the unit labels)."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln for ln in fh if ln.strip()]
    if len(lines) < 2:
        raise ParseError("plans file needs a header and at least one plan", line=1)
    header = _split_csv_line(lines[0])
    rows = [_split_csv_line(ln) for ln in lines[1:]]
    n_fields = len(rows[0])
    if len(header) == n_fields:
        unit_ids = tuple(header[1:])
    elif len(header) == n_fields - 1:
        unit_ids = tuple(header)
    else:
        raise ParseError("header length does not match the plan rows", line=1)
    plan_ids = []
    table = []
    for lineno, cells in enumerate(rows, start=2):
        if len(cells) != n_fields:
            raise ParseError(f"expected {n_fields} columns, found {len(cells)}", line=lineno)
        plan_ids.append(cells[0])
        try:
            table.append([int(c) for c in cells[1:]])
        except ValueError as exc:
            raise ParseError(f"bad district label: {exc}", line=lineno) from None
    try:
        return Ensemble(np.array(table), unit_ids=unit_ids, plan_ids=tuple(plan_ids))
    except ValueError as exc:
        raise ParseError(str(exc), line=2) from None


def write_plans_csv(path, ensemble: Ensemble):
    out = ["plan_id," + ",".join(ensemble.unit_ids)]
    for pid, row in zip(ensemble.plan_ids, ensemble.assignments):
        out.append(pid + "," + ",".join(str(int(v)) for v in row))
    _write_text(path, "\n".join(out) + "\n")


def write_json(path, payload):
    _write_text(path, json.dumps(payload, sort_keys=True, indent=2) + "\n")


def write_coupling_csv(path, plan):
    plan = np.asarray(plan, dtype=float)
    out = [",".join(format_float(v) for v in row) for row in plan]
    _write_text(path, "\n".join(out) + "\n")


def write_embedding_csv(path, ids, coords, scale, circular=None):
    """Embedding table: id, coord_0.., optional circular_coordinate, scale."""
    coords = np.atleast_2d(np.asarray(coords, dtype=float))
    if coords.shape[0] == 1 and len(ids) > 1:
        coords = coords.T
    header = ["id"] + [f"coord_{k}" for k in range(coords.shape[1])]
    if circular is not None:
        header.append("circular_coordinate")
    header.append("scale")
    out = [",".join(header)]
    for i, pid in enumerate(ids):
        cells = [str(pid)] + [format_float(v) for v in coords[i]]
        if circular is not None:
            cells.append(format_float(circular[i]))
        cells.append(format_float(scale))
        out.append(",".join(cells))
    _write_text(path, "\n".join(out) + "\n")


def read_embedding_csv(path) -> tuple[list[str], np.ndarray, np.ndarray | None, float]:
    """Inverse of :func:`write_embedding_csv`."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln for ln in fh if ln.strip()]
    if len(lines) < 2:
        raise ParseError("embedding file needs a header and one row", line=1)
    header = _split_csv_line(lines[0])
    coord_cols = [i for i, h in enumerate(header) if h.startswith("coord_")]
    circ_col = header.index("circular_coordinate") if "circular_coordinate" in header else None
    scale_col = header.index("scale") if "scale" in header else None
    ids, coords, circ = [], [], []
    scale = 1.0
    for lineno, line in enumerate(lines[1:], start=2):
        cells = _split_csv_line(line)
        if len(cells) != len(header):
            raise ParseError(f"expected {len(header)} columns", line=lineno)
        try:
            ids.append(cells[0])
            coords.append([float(cells[i]) for i in coord_cols])
            if circ_col is not None:
                circ.append(float(cells[circ_col]))
            if scale_col is not None:
                scale = float(cells[scale_col])
        except ValueError as exc:
            raise ParseError(f"bad number: {exc}", line=lineno) from None
    return ids, np.array(coords), (np.array(circ) if circ_col is not None else None), scale


def write_arc_csv(path, unit_ids, fractions):
    out = ["unit_id,fraction"]
    for uid, frac in zip(unit_ids, fractions):
        out.append(f"{uid},{format_float(frac)}")
    _write_text(path, "\n".join(out) + "\n")


def histogram_counts(coords, bins: int = 20) -> np.ndarray:
    """Counts of circular coordinates over equal bins of [0, 1)."""
    coords = np.asarray(coords, dtype=float)
    idx = np.minimum((coords * bins).astype(int), bins - 1)
    return np.bincount(idx, minlength=bins)


def write_histogram_csv(path, coords, bins: int = 20):
    counts = histogram_counts(coords, bins)
    out = ["bin_start,bin_end,count"]
    for k, c in enumerate(counts):
        out.append(f"{format_float(k / bins)},{format_float((k + 1) / bins)},{int(c)}")
    _write_text(path, "\n".join(out) + "\n")


_SVG_HEAD = ('<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
             'viewBox="0 0 {w} {h}">\n')


def svg_circle_scatter(coords, size: int = 420) -> str:
    """Scatter of circular coordinates on a drawn circle (pure text SVG)."""
    coords = np.asarray(coords, dtype=float)
    cx = cy = size / 2.0
    R = 0.38 * size
    parts = [_SVG_HEAD.format(w=size, h=size)]
    parts.append(f'<circle cx="{cx:.3f}" cy="{cy:.3f}" r="{R:.3f}" '
                 'fill="none" stroke="#888888" stroke-width="1"/>\n')
    for c in coords:
        angle = 2.0 * math.pi * float(c)
        x = cx + R * math.cos(angle)
        y = cy - R * math.sin(angle)
        parts.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="3" '
                     'fill="#1f77b4" fill-opacity="0.6"/>\n')
    parts.append("</svg>\n")
    return "".join(parts)


def svg_plane_scatter(points, size: int = 420) -> str:
    """Scatter of planar points, rescaled into the canvas."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))[:, :2]
    lo = pts.min(axis=0)
    span = np.maximum(pts.max(axis=0) - lo, 1e-12)
    margin = 0.08 * size
    scale = (size - 2 * margin) / span.max()
    parts = [_SVG_HEAD.format(w=size, h=size)]
    for p in pts:
        x = margin + (p[0] - lo[0]) * scale
        y = size - margin - (p[1] - lo[1]) * scale
        parts.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="3" '
                     'fill="#1f77b4" fill-opacity="0.6"/>\n')
    parts.append("</svg>\n")
    return "".join(parts)


def svg_sphere_scatter(points, size: int = 420) -> str:
    """Equirectangular (longitude/latitude) scatter of unit vectors."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    w, h = size, size // 2
    parts = [_SVG_HEAD.format(w=w, h=h)]
    parts.append(f'<rect x="0" y="0" width="{w}" height="{h}" '
                 'fill="none" stroke="#888888" stroke-width="1"/>\n')
    for p in pts:
        lon = math.atan2(p[1], p[0])
        lat = math.asin(max(-1.0, min(1.0, p[2])))
        x = (lon + math.pi) / (2.0 * math.pi) * w
        y = (1.0 - (lat + math.pi / 2.0) / math.pi) * h
        parts.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="3" '
                     'fill="#1f77b4" fill-opacity="0.6"/>\n')
    parts.append("</svg>\n")
    return "".join(parts)
