"""Frozen reference instances shipped with the package.

The files under ``golden/`` are produced by ``scripts/make_golden.py``;
each records the seed and generator settings it came from.
"""
import json
from importlib import resources

from .io import family_from_json, history_from_json, state_from_json


def load(name):
    """Parsed contents of ``golden/<name>.json``."""
    text = resources.files("histkit").joinpath(f"golden/{name}.json").read_text(encoding="utf-8")
    return json.loads(text)


def ambiguity_instance():
    """``(state, family, j, data)`` for the three-outcome conditional-probability witness."""
    data = load("ambiguity")
    return state_from_json(data["state"]), family_from_json(data["family"]), data["slot"], data


def zero_one_witness():
    """``(state, history, data)`` with a frequency strictly between 0.1 and 0.9."""
    data = load("zero_one_witness")
    return state_from_json(data["state"]), history_from_json(data["history"]), data
