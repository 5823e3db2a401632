"""JSON and CSV serialization for matrices, states, families and reports.

Complex matrices are stored as ``{"rows", "cols", "data"}`` with ``data`` a
row-major list of ``[re, im]`` pairs. Writers are deterministic: JSON keys
are sorted and floats use Python's shortest round-trip repr, so equal
inputs give byte-identical files.
"""
import csv
import io
import json

import numpy as np

from .errors import DimensionError, ValidationError
from .histories import History, HistoryFamily
from .operators import State

SCHEMA_VERSION = 1


def _num(x):
    # -0.0 and 0.0 must serialize identically
    x = float(x)
    return 0.0 if x == 0.0 else x


def matrix_to_json(m):
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {m.shape}")
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "data": [[_num(z.real), _num(z.imag)] for z in m.ravel()],
    }


def matrix_from_json(obj):
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed matrix object: {exc}") from None
    if len(data) != rows * cols:
        raise DimensionError(f"matrix data has {len(data)} entries, expected {rows}x{cols}")
    return np.array([complex(re, im) for re, im in data]).reshape(rows, cols)


def vector_to_json(v):
    return [[_num(z.real), _num(z.imag)] for z in np.asarray(v, dtype=complex).ravel()]


def vector_from_json(data):
    return np.array([complex(re, im) for re, im in data])


def state_to_json(state):
    if state.kind == "pure":
        return {"kind": "pure", "vector": vector_to_json(state.vector)}
    return {"kind": "density", "rho": matrix_to_json(state.rho)}


def state_from_json(obj):
    kind = obj.get("kind")
    if kind == "pure":
        return State.pure(vector_from_json(obj["vector"]))
    if kind == "density":
        return State.density(matrix_from_json(obj["rho"]))
    raise ValidationError(f"unknown state kind {kind!r}")


def family_to_json(family):
    return {
        "slots": [[matrix_to_json(p) for p in slot.outcomes] for slot in family.slots],
        "selected": list(family.selected),
    }


def family_from_json(obj):
    slots = [[matrix_from_json(m) for m in slot] for slot in obj["slots"]]
    return HistoryFamily(slots, obj.get("selected"))


def history_to_json(history):
    return {"events": [matrix_to_json(p) for p in history.events]}


def history_from_json(obj):
    return History([matrix_from_json(m) for m in obj["events"]])


def repair_report_to_json(report):
    return {
        "epsilon": report.epsilon,
        "original": history_to_json(report.original),
        "repaired": history_to_json(report.repaired),
        "per_step_distance": report.per_step_distance,
        "per_step_bound": report.per_step_bound,
        "commutator_residuals": report.commutator_residuals,
        "input_residuals": report.input_residuals,
        "bounds_satisfied": report.bounds_satisfied(),
    }


def facet_report_to_json(report):
    return {"facets": list(report.facets), "max_abs": report.max_abs, "classical": report.classical}


def dumps(obj):
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(path, obj):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(obj))


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def table_to_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(_num(x)) if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def table_to_json(header, rows):
    return dumps([dict(zip(header, row)) for row in rows])


def correlation_to_csv(gamma):
    g = np.asarray(gamma, dtype=float)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in g:
        w.writerow([repr(_num(x)) for x in row])
    return buf.getvalue()


def correlation_from_csv(text):
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    return np.array([[float(x) for x in r] for r in rows])


def distribution_rows(table):
    """``(k_1, ..., k_n, frequency)`` rows from :func:`frequency_distribution` output."""
    return [list(k) + [float(f)] for k, f in sorted(table.items())]


def distribution_header(n):
    return [f"k_{j}" for j in range(1, n + 1)] + ["frequency"]
