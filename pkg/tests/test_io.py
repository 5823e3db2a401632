import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from histkit import io
from histkit.config import DEFAULT_TOLERANCES, load_tolerances
from histkit.errors import DimensionError, ValidationError
from histkit.histories import History, HistoryFamily
from histkit.operators import State
from histkit.repair import repair_history
from histkit.sampling import random_outcome_family, random_state

ROOT = Path(__file__).resolve().parents[1]


def test_matrix_format():
    m = np.array([[1, 2j], [3 - 1j, 0]])
    obj = io.matrix_to_json(m)
    assert obj == {"rows": 2, "cols": 2, "data": [[1.0, 0.0], [0.0, 2.0], [3.0, -1.0], [0.0, 0.0]]}
    np.testing.assert_array_equal(io.matrix_from_json(obj), m)


def test_matrix_errors():
    with pytest.raises(DimensionError):
        io.matrix_from_json({"rows": 2, "cols": 2, "data": [[1, 0]]})
    with pytest.raises(ValidationError):
        io.matrix_from_json({"rows": 2})


def test_negative_zero_normalized():
    assert io.dumps(io.matrix_to_json(np.array([[-0.0]]))) == io.dumps(io.matrix_to_json(np.array([[0.0]])))


def test_state_roundtrip(rng):
    for _ in range(10):
        s = random_state(rng, 3)
        back = io.state_from_json(json.loads(io.dumps(io.state_to_json(s))))
        assert back.kind == s.kind
        np.testing.assert_array_equal(back.density_matrix(), s.density_matrix())
    with pytest.raises(ValidationError):
        io.state_from_json({"kind": "mixed"})


def test_family_roundtrip(rng):
    fam = HistoryFamily([random_outcome_family(rng, 3) for _ in range(2)], selected=(1, 1))
    back = io.family_from_json(json.loads(io.dumps(io.family_to_json(fam))))
    assert back.selected == fam.selected
    for a, b in zip(back.slots, fam.slots):
        for p, q in zip(a.outcomes, b.outcomes):
            np.testing.assert_array_equal(p, q)


def test_repair_report_json():
    rep = repair_history([np.diag([1.0, 0.0]), np.diag([1.0, 0.0])], 0.1)
    obj = json.loads(io.dumps(io.repair_report_to_json(rep)))
    assert obj["bounds_satisfied"] is True
    assert len(obj["repaired"]["events"]) == 2
    np.testing.assert_array_equal(io.history_from_json(obj["repaired"]).events[0], np.diag([1, 0]))


def test_csv_tables():
    text = io.table_to_csv(["lambda", "min_evidence"], [[0.0, 0.5], [1.0, 1.0]])
    assert text == "lambda,min_evidence\n0.0,0.5\n1.0,1.0\n"
    g = np.array([[0.25, -1.0], [0.0, 0.5]])
    np.testing.assert_array_equal(io.correlation_from_csv(io.correlation_to_csv(g)), g)


def test_distribution_rows():
    table = {(2, 1): 0.25, (1, 1): 0.75}
    assert io.distribution_rows(table) == [[1, 1, 0.75], [2, 1, 0.25]]
    assert io.distribution_header(2) == ["k_1", "k_2", "frequency"]


def test_tolerance_overrides():
    assert load_tolerances({}) == DEFAULT_TOLERANCES
    tol = load_tolerances({"HISTKIT_TOL": '{"chsh": 1e-6}'})
    assert tol["chsh"] == 1e-6 and tol["facet"] == DEFAULT_TOLERANCES["facet"]
    for bad in ('{"nope": 1}', '{"chsh": -1}', "[1]", "not json", '{"chsh": true}'):
        with pytest.raises(ValidationError):
            load_tolerances({"HISTKIT_TOL": bad})


def test_golden_files_current():
    # regenerating the reference instances reproduces the shipped files byte for byte
    res = subprocess.run([sys.executable, str(ROOT / "scripts" / "make_golden.py"), "--check"],
                         capture_output=True, text=True)
    assert res.returncode == 0, res.stdout + res.stderr
