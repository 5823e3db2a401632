"""Default numerical tolerances and their ``HISTKIT_TOL`` overrides."""
import json
import os

from .errors import ValidationError

DEFAULT_TOLERANCES = {
    "chsh": 1e-9,
    "facet": 1e-12,
    "projection": 1e-12,
    "commutator": 1e-9,
    "interference": 1e-9,
    "no_signal": 1e-11,
    "sum_rule": 1e-9,
    "isospectral": 1e-10,
    "uncertainty": 1e-10,
    "dephasing": 1e-12,
}


def load_tolerances(environ=None):
    """Defaults merged with the JSON object in ``HISTKIT_TOL``, if set.

    Unknown keys and non-positive values are rejected.
    """
    environ = os.environ if environ is None else environ
    tol = dict(DEFAULT_TOLERANCES)
    raw = environ.get("HISTKIT_TOL")
    if not raw:
        return tol
    try:
        overrides = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"HISTKIT_TOL is not valid JSON: {exc}") from None
    if not isinstance(overrides, dict):
        raise ValidationError("HISTKIT_TOL must be a JSON object")
    for key, val in overrides.items():
        if key not in tol:
            raise ValidationError(f"unknown tolerance {key!r}; known: {', '.join(sorted(tol))}")
        if isinstance(val, bool) or not isinstance(val, (int, float)) or not val > 0:
            raise ValidationError(f"tolerance {key!r} must be a positive number, got {val!r}")
        tol[key] = float(val)
    return tol
