"""CSV / JSON writers and readers for grids, difference grids, swelling
reports and decoherence curves.

CSV numbers carry 12 significant digits in positional notation, LF line
endings, rows in row-major axis order.  JSON keeps full double precision.
Only deterministic metadata is written, so identical inputs give
byte-identical files whatever the worker count.
"""
from __future__ import annotations

import csv
import io
import json
import os

import numpy as np

from .qfield import trajectory_from_tag
from .sweep import (
    DecoherenceCurve,
    DiffGrid,
    GridSpec,
    Spacing,
    SwellingComponent,
    SwellingReport,
    SweepGrid,
)

__all__ = ["format_number", "serialize", "parse", "write", "read", "detect_format",
           "serialize_point", "write_point"]

_DETERMINISTIC_META = ("rel_tol", "flagged")


def format_number(x: float) -> str:
    """12 significant digits, never exponent notation."""
    x = float(x)
    if x == 0.0:
        return "0.000000000000"
    return np.format_float_positional(x, precision=12, unique=False, fractional=False,
                                      trim="k")


def _kind(obj):
    if isinstance(obj, SweepGrid):
        return "grid"
    if isinstance(obj, DiffGrid):
        return "diff"
    if isinstance(obj, SwellingReport):
        return "regions"
    if isinstance(obj, DecoherenceCurve):
        return "curve"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _grid_rows(spec, values, errors):
    e_axis, t_axis = spec.e_axis, spec.t_axis
    for i, e in enumerate(e_axis):
        for j, t in enumerate(t_axis):
            yield [format_number(e), format_number(t), format_number(values[i, j]),
                   format_number(errors[i, j])]


def _axes(spec):
    return {"e_over_omega": spec.e_axis.tolist(), "omega_t": spec.t_axis.tolist()}


def serialize(obj, fmt: str = "csv") -> bytes:
    """Encode a grid, diff grid, swelling report or curve as CSV or JSON bytes."""
    kind = _kind(obj)
    if fmt == "csv":
        text = _to_csv(kind, obj)
    elif fmt == "json":
        text = json.dumps(_to_json(kind, obj), indent=1, allow_nan=False) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return text.encode("utf-8")


def _to_csv(kind, obj):
    if kind == "grid":
        return _csv_text(["e_over_omega", "omega_t", "c_over_g", "err"],
                         _grid_rows(obj.spec, obj.values, obj.errors))
    if kind == "diff":
        return _csv_text(["e_over_omega", "omega_t", "dc_over_g", "err"],
                         _grid_rows(obj.spec, obj.values, obj.errors))
    if kind == "regions":
        label = {}
        for c, comp in enumerate(obj.components):
            for cell in comp.cells:
                label[cell] = c
        rows = [[str(i), str(j), format_number(e), format_number(t), format_number(d),
                 str(label[(i, j)])] for i, j, e, t, d in obj.cells]
        return _csv_text(["i", "j", "e_over_omega", "omega_t", "dc_over_g", "component"], rows)
    rows = [[format_number(t)] + [format_number(v) for v in obj.values[k]]
            for k, t in enumerate(obj.t_bar)]
    return _csv_text(["omega_t"] + obj.tags, rows)


def _to_json(kind, obj):
    if kind == "grid":
        tag = obj.trajectory.tag if obj.trajectory is not None else None
        return {"kind": kind, "spec": obj.spec.to_dict(), "trajectory": tag,
                "axes": _axes(obj.spec), "values": obj.values.tolist(),
                "errors": obj.errors.tolist(),
                "meta": {k: obj.meta[k] for k in _DETERMINISTIC_META if k in obj.meta}
                | {"flagged_cells": [list(map(int, ij)) for ij in zip(*np.nonzero(obj.flagged))]}}
    if kind == "diff":
        return {"kind": kind, "spec": obj.spec.to_dict(),
                "trajectory": {"minuend": obj.minuend, "subtrahend": obj.subtrahend},
                "axes": _axes(obj.spec), "values": obj.values.tolist(),
                "errors": obj.errors.tolist(), "meta": {}}
    if kind == "regions":
        return {"kind": kind, "spec": obj.spec.to_dict(), "threshold": obj.threshold,
                "cells": [list(c) for c in obj.cells],
                "components": [{
                    "cells": [list(c) for c in comp.cells],
                    "i_range": list(comp.i_range), "j_range": list(comp.j_range),
                    "e_bar_range": list(comp.e_bar_range),
                    "t_bar_range": list(comp.t_bar_range),
                    "peak": list(comp.peak)} for comp in obj.components]}
    return {"kind": kind, "e_bar": obj.e_bar, "trajectories": obj.tags,
            "axes": {"omega_t": obj.t_bar.tolist()}, "values": obj.values.tolist(),
            "errors": obj.errors.tolist(), "flagged": obj.flagged.tolist()}


# ---------------------------------------------------------------------------
# readers
# ---------------------------------------------------------------------------

def _spec_from_axes(e_axis, t_axis):
    def spacing(ax):
        lin = np.linspace(ax[0], ax[-1], len(ax))
        return "linear" if np.allclose(ax, lin, rtol=1e-10, atol=0) else "log"

    kinds = {spacing(e_axis), spacing(t_axis)}
    if len(kinds) != 1:
        raise ValueError("mixed axis spacings are not representable")
    return GridSpec(float(e_axis[0]), float(e_axis[-1]), float(t_axis[0]), float(t_axis[-1]),
                    len(e_axis), len(t_axis), Spacing(kinds.pop()))


def parse(data: bytes, fmt: str = "csv", trajectory=None):
    """Inverse of :func:`serialize`.

    CSV grid files carry no trajectory; pass it in if needed.  The grid
    spec is rebuilt from the axis columns.
    """
    text = data.decode("utf-8")
    if fmt == "json":
        return _from_json(json.loads(text))
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    if header[:2] == ["e_over_omega", "omega_t"]:
        arr = np.array([[float(x) for x in r] for r in body]).reshape(-1, 4)
        e_axis = np.unique(arr[:, 0])
        t_axis = np.unique(arr[:, 1])
        shape = (len(e_axis), len(t_axis))
        spec = _spec_from_axes(e_axis, t_axis)
        values = arr[:, 2].reshape(shape)
        errors = arr[:, 3].reshape(shape)
        if header[2] == "c_over_g":
            return SweepGrid(spec, trajectory, values, errors)
        return DiffGrid(spec, "unknown", "unknown", values, errors)
    if header[0] == "i":
        raise ValueError("CSV region reports are write-only; use JSON to round-trip")
    if header[0] == "omega_t":
        arr = np.array([[float(x) for x in r] for r in body])
        trajs = [trajectory_from_tag(t) for t in header[1:]]
        return DecoherenceCurve(float("nan"), trajs, arr[:, 0], arr[:, 1:],
                                np.zeros_like(arr[:, 1:]), np.zeros(arr[:, 1:].shape, bool))
    raise ValueError(f"unrecognised CSV header {header!r}")


def _from_json(d):
    kind = d.get("kind")
    if kind == "grid":
        spec = GridSpec.from_dict(d["spec"])
        traj = trajectory_from_tag(d["trajectory"]) if d["trajectory"] else None
        flagged = np.zeros(spec.shape, bool)
        for i, j in d["meta"].get("flagged_cells", []):
            flagged[i, j] = True
        meta = {k: v for k, v in d["meta"].items() if k != "flagged_cells"}
        return SweepGrid(spec, traj, np.array(d["values"], float), np.array(d["errors"], float),
                         flagged, meta)
    if kind == "diff":
        spec = GridSpec.from_dict(d["spec"])
        return DiffGrid(spec, d["trajectory"]["minuend"], d["trajectory"]["subtrahend"],
                        np.array(d["values"], float), np.array(d["errors"], float))
    if kind == "regions":
        spec = GridSpec.from_dict(d["spec"])
        comps = [SwellingComponent(
            cells=tuple(tuple(c) for c in comp["cells"]),
            i_range=tuple(comp["i_range"]), j_range=tuple(comp["j_range"]),
            e_bar_range=tuple(comp["e_bar_range"]), t_bar_range=tuple(comp["t_bar_range"]),
            peak=(int(comp["peak"][0]), int(comp["peak"][1]), *map(float, comp["peak"][2:])))
            for comp in d["components"]]
        cells = [(int(c[0]), int(c[1]), float(c[2]), float(c[3]), float(c[4]))
                 for c in d["cells"]]
        return SwellingReport(spec, float(d["threshold"]), cells, comps)
    if kind == "curve":
        trajs = [trajectory_from_tag(t) for t in d["trajectories"]]
        return DecoherenceCurve(float(d["e_bar"]), trajs, np.array(d["axes"]["omega_t"], float),
                                np.array(d["values"], float), np.array(d["errors"], float),
                                np.array(d["flagged"], bool))
    raise ValueError(f"unrecognised JSON document kind {kind!r}")


def detect_format(path) -> str:
    ext = os.path.splitext(str(path))[1].lower()
    if ext == ".json":
        return "json"
    if ext == ".csv":
        return "csv"
    raise ValueError(f"cannot infer format from {path!r}; use .csv or .json")


def write(obj, path, fmt: str | None = None) -> None:
    fmt = fmt or detect_format(path)
    data = serialize(obj, fmt)
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def read(path, fmt: str | None = None, trajectory=None):
    fmt = fmt or detect_format(path)
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror}") from exc
    return parse(data, fmt, trajectory)


def serialize_point(res, traj, e_bar: float, t_bar: float, fmt: str = "csv") -> bytes:
    """Encode a single :class:`~udcoherence.qfield.CoherenceResult`."""
    if fmt == "csv":
        return _csv_text(["e_over_omega", "omega_t", "c_over_g", "err"],
                         [[format_number(e_bar), format_number(t_bar),
                           format_number(res.c_over_g), format_number(res.err_estimate)]]
                         ).encode("utf-8")
    if fmt == "json":
        rho = res.rho_coh_over_g
        doc = {"kind": "point", "trajectory": traj.tag, "e_bar": e_bar, "t_bar": t_bar,
               "c_over_g": res.c_over_g,
               "rho_coh_over_g": None if rho is None else [rho.real, rho.imag],
               "err": res.err_estimate, "method": res.method.value}
        return (json.dumps(doc, indent=1) + "\n").encode("utf-8")
    raise ValueError(f"unknown format {fmt!r}")


def write_point(res, traj, e_bar, t_bar, path, fmt: str | None = None) -> None:
    fmt = fmt or detect_format(path)
    try:
        with open(path, "wb") as fh:
            fh.write(serialize_point(res, traj, e_bar, t_bar, fmt))
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc
