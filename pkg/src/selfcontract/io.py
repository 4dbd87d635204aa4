"""
Curve CSV and trace JSON formats.

Curve CSV: one vertex per line, comma-separated coordinates, optionally led
by a ``t=<param>`` column; lines starting with ``#`` are comments. The
dimension is fixed by the first data row.

Trace JSON: ``{"dimension", "points", "values", "steps", "residuals"}``,
plus ``"levels"`` for foliation orbits and ``"terminated_by"`` when known.
"""

import csv
import io as _io
import json

import numpy as np

from .curves import DiscreteCurve
from .errors import InputError
from .prox import ProxTrace


def parse_curve_csv(text):
    rows = [line for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")]
    if not rows:
        raise InputError("curve file has no vertices")
    pts, params = [], []
    has_param = None
    dim = None
    for lineno, row in enumerate(csv.reader(rows), 1):
        cells = [c.strip() for c in row]
        lead = cells[0].startswith("t=")
        if has_param is None:
            has_param = lead
        elif lead != has_param:
            raise InputError(f"row {lineno}: parameter column must be present on all rows or none")
        try:
            if lead:
                params.append(float(cells[0][2:]))
                cells = cells[1:]
            coords = [float(c) for c in cells]
        except ValueError as exc:
            raise InputError(f"row {lineno}: {exc}") from None
        if dim is None:
            dim = len(coords)
            if dim == 0:
                raise InputError("row 1 has no coordinates")
        elif len(coords) != dim:
            raise InputError(f"row {lineno}: expected {dim} coordinates, got {len(coords)}")
        pts.append(coords)
    return DiscreteCurve(np.array(pts), params if has_param else None)


def read_curve_csv(path):
    with open(path, encoding="utf-8") as fh:
        return parse_curve_csv(fh.read())


def format_curve_csv(curve, header=None):
    buf = _io.StringIO()
    if header:
        for line in header.splitlines():
            buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    for i, p in enumerate(curve.points):
        row = [repr(float(c)) for c in p]
        if curve.params is not None:
            row.insert(0, f"t={float(curve.params[i])!r}")
        w.writerow(row)
    return buf.getvalue()


def write_curve_csv(curve, path, header=None):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_curve_csv(curve, header))


def trace_to_json(trace=None, *, points=None, values=None, levels=None, extra=None):
    """Serialize a :class:`ProxTrace` (or bare points/levels for an orbit)."""
    if trace is not None:
        doc = {
            "dimension": int(trace.dim),
            "points": trace.iterates.tolist(),
            "values": trace.values.tolist(),
            "steps": trace.steps.tolist(),
            "residuals": trace.residuals.tolist(),
            "terminated_by": trace.terminated_by,
        }
    else:
        P = np.atleast_2d(points)
        doc = {
            "dimension": int(P.shape[1]),
            "points": P.tolist(),
            "values": [] if values is None else np.asarray(values).tolist(),
            "steps": [],
            "residuals": [],
        }
    if levels is not None:
        doc["levels"] = np.asarray(levels).tolist()
    if extra:
        doc.update(extra)
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def parse_trace_json(text):
    """Return the decoded document with ``points`` as an array; raises InputError."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or "points" not in doc:
        raise InputError("trace JSON needs a 'points' array")
    P = np.asarray(doc["points"], dtype=float)
    if P.ndim != 2 or P.shape[0] == 0:
        raise InputError("'points' must be a nonempty list of coordinate lists")
    if "dimension" in doc and int(doc["dimension"]) != P.shape[1]:
        raise InputError("'dimension' does not match the points")
    doc["points"] = P
    return doc


def trace_from_json(text):
    doc = parse_trace_json(text)
    return ProxTrace(doc["points"], np.asarray(doc.get("values", []), dtype=float),
                     np.asarray(doc.get("steps", []), dtype=float),
                     np.asarray(doc.get("residuals", []), dtype=float),
                     doc.get("terminated_by", "max_iter"))
