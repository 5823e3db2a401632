import itertools
import math

import numpy as np
import pytest

from histkit.errors import PreconditionError, ValidationError
from histkit.histories import History, HistoryFamily, interference
from histkit.operators import commutator, ket_projector, op_norm
from histkit.repair import (
    RepairReport,
    chain_projector,
    check_report,
    cn_constants,
    repair_history,
    repair_threshold,
    round_to_projection,
    rounding_bound,
)
from histkit.sampling import near_commuting_history, random_near_projection, random_state, rng_from


# -- constants ---------------------------------------------------------------

def test_cn_values():
    assert cn_constants(1) == [0.0]
    assert cn_constants(2) == [0.0, 6.0]
    assert cn_constants(3) == [0.0, 6.0, 150.0]
    # 6 (4 (0 + 6 + 150) + 1) = 3750
    assert cn_constants(4)[-1] == 3750.0


def test_cn_closed_form():
    # for m >= 3, C_m = 25 C_{m-1}, since C_m - C_{m-1} = 24 C_{m-1}
    cs = cn_constants(6)
    for m in range(3, 7):
        assert cs[m - 1] == 6.0 * 25.0 ** (m - 2)
    assert all(a < b for a, b in zip(cs[1:], cs[2:]))


def test_cn_rejects_zero():
    with pytest.raises(ValueError):
        cn_constants(0)


def test_threshold():
    assert repair_threshold(2) == 0.25
    assert repair_threshold(3) == pytest.approx(1 / 100)


# -- rounding -------------------------------------------------------------------

def test_round_exact_projection(rng):
    p = ket_projector(rng.normal(size=4))
    np.testing.assert_allclose(round_to_projection(p, 0.1), p, atol=1e-13)


def test_round_diagonal_example():
    p = np.diag([0.9, 0.05])
    out = round_to_projection(p, 0.1)
    np.testing.assert_allclose(out, np.diag([1, 0]), atol=1e-15)
    assert op_norm(out - p) == pytest.approx(0.1)
    assert rounding_bound(0.1) == pytest.approx(0.2 / (1 + math.sqrt(0.6)))
    assert op_norm(out - p) <= rounding_bound(0.1)


def test_round_half_identity_rejected():
    for eps in (0.1, 0.2, 0.2499):
        with pytest.raises(PreconditionError) as info:
            round_to_projection(0.5 * np.eye(2), eps)
        assert info.value.residual == pytest.approx(0.25)
    with pytest.raises(PreconditionError):
        round_to_projection(np.eye(2), 0.25)


def test_round_random_corpus(rng):
    for _ in range(300):
        n = int(rng.integers(1, 9))
        eps = float(rng.uniform(1e-4, 0.249))
        p = random_near_projection(rng, n, eps)
        out = round_to_projection(p, eps)
        assert op_norm(out @ out - out) <= 1e-12
        assert op_norm(out - out.conj().T) == 0.0
        assert op_norm(out - p) <= rounding_bound(eps) + 1e-13


def test_round_preserves_commutant(rng):
    for _ in range(50):
        p = random_near_projection(rng, 6, 0.2)
        a = 2.0 * p @ p - 3.0 * p + 0.5 * np.eye(6)
        assert op_norm(commutator(a, round_to_projection(p, 0.2))) <= 1e-10


# -- chain projector ----------------------------------------------------------------

def test_chain_projector_cases():
    p = [np.diag([1, 1, 0]), np.diag([0, 1, 1]), np.diag([1, 1, 0])]
    np.testing.assert_array_equal(chain_projector(p, 2), p[2])
    np.testing.assert_array_equal(chain_projector(p, 1), np.diag([0, 1, 0]))
    np.testing.assert_array_equal(chain_projector([np.eye(3)] * 3, 1), np.eye(3))
    with pytest.raises(IndexError):
        chain_projector(p, 3)


# -- repair ---------------------------------------------------------------

def test_repair_commuting_is_identity():
    p = [np.diag([1, 0, 1]), np.diag([1, 1, 0]), np.diag([0, 1, 1])]
    rep = repair_history(p, 0.005)
    assert rep.per_step_distance == [0.0, 0.0, 0.0]
    for a, b in zip(rep.repaired.events, p):
        np.testing.assert_array_equal(a, b)


@pytest.mark.parametrize("delta", [1e-3, 1e-2])
def test_repair_two_event_example(delta):
    # P_1 tilted out of the range of P_2; (1, δ, 0) would still commute with diag(1, 1, 0)
    p2 = np.diag([1.0, 1.0, 0.0])
    p1 = ket_projector([1.0, 0.0, delta])
    res = op_norm(commutator(p1, p2))
    assert res == pytest.approx(delta / (1 + delta**2), rel=1e-12)
    eps = 1.01 * res
    rep = repair_history([p1, p2], eps)
    assert rep.commutator_residuals[0] <= 1e-15
    assert rep.per_step_distance[0] <= 6 * eps
    np.testing.assert_array_equal(rep.repaired.events[1], p2)
    # the repaired event is the projection onto e_0
    np.testing.assert_allclose(rep.repaired.events[0], np.diag([1, 0, 0]), atol=1e-14)


def test_repair_rejects_large_commutator():
    p2 = np.diag([1.0, 1.0, 0.0])
    p1 = ket_projector([1.0, 0.0, 1.0])
    with pytest.raises(PreconditionError) as info:
        repair_history([p1, p2], 0.1)
    assert info.value.index == 1
    assert info.value.residual == pytest.approx(0.5)


def test_repair_rejects_epsilon_above_threshold():
    p = [np.diag([1, 0, 1]), np.diag([1, 1, 0]), np.diag([0, 1, 1])]
    with pytest.raises(PreconditionError) as info:
        repair_history(p, 0.02)
    assert info.value.threshold == pytest.approx(0.01)


@pytest.mark.parametrize("n,dim,seed", [(2, 4, 0), (2, 12, 1), (3, 8, 2), (3, 12, 3), (4, 6, 4)])
def test_repair_seeded(n, dim, seed):
    rng = rng_from(seed)
    events = near_commuting_history(rng, n, dim, 1e-6)
    h = History(events)
    measured = max(op_norm(commutator(h.events[j - 1], chain_projector(h, j))) for j in range(1, n))
    eps = 1.01 * measured
    rep = repair_history(h, eps)
    check_report(rep)
    assert rep.bounds_satisfied()
    assert max(rep.commutator_residuals) <= 1e-9
    for j in range(1, n):
        hj = chain_projector(rep.repaired, j)
        assert op_norm(hj @ hj - hj) <= 1e-10
    # completed with complements, the repaired family has no interference
    fam = HistoryFamily([[p, np.eye(dim) - p] for p in rep.repaired.events])
    state = random_state(rng, dim)
    for j in range(1, n):
        assert abs(interference(state, fam, j, 1, 2)) <= 1e-9
        assert abs(interference(state, fam, j, 2, 1)) <= 1e-9


def test_check_report_flags_violation():
    p = [np.diag([1.0, 0.0]), np.diag([1.0, 0.0])]
    h = History(p)
    bad = RepairReport(h, h, [1.0, 0.0], [0.5, 0.0], 0.1, [0.0])
    with pytest.raises(ValidationError, match="slot 1"):
        check_report(bad)
    assert bad.ratios() == [2.0, None]
