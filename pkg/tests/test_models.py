import math

import numpy as np
import pytest

from histkit.errors import DimensionError, ValidationError
from histkit.histories import HistoryFamily, evidence
from histkit.models import (
    DoubleSlitModel,
    LocalChannel,
    SingletSystem,
    central_bin,
    conditioned_right_spin,
    dephasing_gap,
    double_slit_frequencies,
    evidence_curve,
    gaussian_slit_amplitudes,
    golden_double_slit,
    marginal_isospectrality,
    marginal_shift,
    model_from_json,
    model_to_json,
    no_signaling_check,
    single_path_frequency,
    singlet_frequencies,
    spin_projectors,
)
from histkit.operators import State
from histkit.sampling import random_kraus, random_outcome_family, random_pure_state, random_state, random_unit_vector


# -- singlet ---------------------------------------------------------------------

@pytest.mark.parametrize("axis", [[0, 0, 1], [1, 0, 0]])
def test_singlet_frequencies_axes(axis):
    f = singlet_frequencies(np.array(axis, dtype=float))
    assert f.up_L == pytest.approx(0.5, abs=1e-12)
    assert f.down_L == pytest.approx(0.5, abs=1e-12)
    assert f.down_R_given_up_L == pytest.approx(1.0, abs=1e-12)
    assert f.up_R_and_up_L <= 1e-12


def test_singlet_isotropy(rng):
    ref = singlet_frequencies(np.array([0.0, 0.0, 1.0]))
    for _ in range(100):
        f = singlet_frequencies(random_unit_vector(rng))
        np.testing.assert_allclose(f, ref, atol=1e-10)


def test_singlet_system_validation():
    SingletSystem()
    with pytest.raises(ValidationError):
        SingletSystem(State.pure([1, 0, 0, 0]))


# -- no-signaling ---------------------------------------------------------------

def test_identity_channel():
    res = no_signaling_check(SingletSystem(), LocalChannel.identity())
    assert res.delta_norm == 0.0
    np.testing.assert_array_equal(res.pre_spin_R, res.post_spin_R)


def test_spin_filter_channel():
    up, down = spin_projectors([0, 0, 1])
    res = no_signaling_check(SingletSystem(), LocalChannel.projective([up, down]))
    assert res.delta_norm <= 1e-12
    np.testing.assert_allclose(res.pre_spin_R, 0, atol=1e-12)
    np.testing.assert_allclose(res.post_spin_R, 0, atol=1e-12)


def test_conditioned_spin():
    up, _ = spin_projectors([0, 0, 1])
    np.testing.assert_allclose(conditioned_right_spin(SingletSystem(), up), [0, 0, -1], atol=1e-14)
    upx, _ = spin_projectors([1, 0, 0])
    np.testing.assert_allclose(conditioned_right_spin(SingletSystem(), upx), [-1, 0, 0], atol=1e-14)


def test_channel_validation():
    with pytest.raises(ValidationError):
        LocalChannel([0.5 * np.eye(2)])
    with pytest.raises(DimensionError):
        LocalChannel([np.eye(3)], apparatus_dim=2)
    with pytest.raises(ValidationError):
        LocalChannel([])


def test_random_channels_no_signal(rng):
    for _ in range(200):
        d1, d2 = int(rng.integers(2, 4)), int(rng.integers(2, 4))
        rho = random_state(rng, d1 * d2).density_matrix()
        chan = LocalChannel(random_kraus(rng, d1, int(rng.integers(1, 4))))
        delta, before, after = marginal_shift(rho, (d1, d2), chan)
        assert delta <= 1e-11


def test_apparatus_channel_no_signal(rng):
    # a unitary coupling of a pointer qubit with the left spin, followed by the joint marginal
    u = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))[0]
    chan = LocalChannel([u], apparatus_dim=2)
    rho = random_state(rng, 4).density_matrix()
    delta, _, _ = marginal_shift(rho, (2, 2), chan)
    assert delta <= 1e-12


# -- double slit ----------------------------------------------------------------

@pytest.fixture(scope="module")
def model():
    return golden_double_slit()


def test_golden_matches_generator(model):
    np.testing.assert_allclose(model.amplitudes, gaussian_slit_amplitudes(), atol=1e-15)
    assert model.bins == 32 and model.lam == 0.0


def test_model_validation():
    with pytest.raises(ValidationError):
        DoubleSlitModel(np.ones((2, 4)) / 2, 0.0)
    with pytest.raises(ValidationError):
        DoubleSlitModel(np.eye(2), -1.0)
    with pytest.raises(DimensionError):
        DoubleSlitModel(np.ones((3, 4)))


def test_model_json_roundtrip(model):
    back = model_from_json(model_to_json(model.with_lambda(0.5)))
    np.testing.assert_array_equal(back.amplitudes, model.amplitudes)
    assert back.lam == 0.5


def test_interference_closed_form(model):
    # interference = exp(-λ) Re(conj(a_r) a_l) at every bin
    for lam in (0.0, 0.3, 2.0):
        m = model.with_lambda(lam)
        for b in range(0, 32, 5):
            f = double_slit_frequencies(m, b)
            ar, al = m.amplitudes[:, b]
            assert f.interference == pytest.approx(math.exp(-lam) * (np.conj(ar) * al).real, abs=1e-13)
            assert f.f_r == pytest.approx(abs(ar) ** 2 / 2, abs=1e-14)
            assert f.f_l == pytest.approx(abs(al) ** 2 / 2, abs=1e-14)


def test_interference_central_bin(model):
    f = double_slit_frequencies(model, central_bin(model))
    assert f.interference > 0.1


def test_decoupled_limit(model):
    m = model.with_lambda(50.0)
    for b in range(32):
        f = double_slit_frequencies(m, b)
        assert abs(f.interference) <= 1e-12
        assert f.f_both == pytest.approx(f.f_r + f.f_l, abs=1e-12)


def test_sum_rule(model, rng):
    for lam in rng.uniform(0, 10, size=5):
        m = model.with_lambda(lam)
        for b in range(32):
            f = double_slit_frequencies(m, b)
            assert f.f_r + f.f_l + f.interference == pytest.approx(f.f_both, abs=1e-12)


def test_visibility_decay(model):
    b = central_bin(model)
    i0 = double_slit_frequencies(model, b).interference
    for lam in (0.1, 1.0, 3.0, 7.5):
        assert double_slit_frequencies(model.with_lambda(lam), b).interference == pytest.approx(
            i0 * math.exp(-lam), abs=1e-10)


def test_screen_sums_to_one(model):
    assert sum(double_slit_frequencies(model, b).f_both for b in range(32)) == pytest.approx(1.0, abs=1e-12)


def test_blocked_slit(model):
    for b in (3, 16, 20):
        f = double_slit_frequencies(model, b)
        assert single_path_frequency(model, b, 0) == pytest.approx(f.f_r, abs=1e-14)
        assert single_path_frequency(model, b, 1) == pytest.approx(f.f_l, abs=1e-14)


def test_bin_range(model):
    with pytest.raises(IndexError):
        double_slit_frequencies(model, 32)


def test_evidence_curve(model):
    grid = [0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0]
    curve = evidence_curve(model, grid)
    vals = [e for _, e in curve]
    assert vals[0] < 1.0
    assert all(b >= a - 1e-10 for a, b in zip(vals, vals[1:]))
    assert all(e >= 0.999 for lam, e in curve if lam >= 10)
    assert vals[-1] >= 1 - 1e-10
    with pytest.raises(ValidationError):
        evidence_curve(model, [1.0, 0.0])


def test_dephasing_gap_examples(model):
    b = central_bin(model)
    assert dephasing_gap(model.state(), model.family(b), 1) > 0.05
    m50 = model.with_lambda(50.0)
    assert dephasing_gap(m50.state(), m50.family(b), 1) <= 1e-10
    diag = HistoryFamily([[np.diag([1, 0]), np.diag([0, 1])], [np.diag([1, 0]), np.diag([0, 1])]])
    assert dephasing_gap(State.normalized([1, 1]), diag, 1) == 0.0


def test_dephasing_gap_bounded_by_evidence(rng):
    for _ in range(50):
        fam = HistoryFamily([random_outcome_family(rng, 4) for _ in range(3)])
        state = random_state(rng, 4)
        for j in (1, 2):
            assert dephasing_gap(state, fam, j) <= 1 - evidence(state, fam, j) + 1e-12


# -- marginals -------------------------------------------------------------------

def test_product_marginals():
    res = marginal_isospectrality(State.pure(np.kron([1, 0], [0, 1])), (2, 2))
    assert res.spec1 == [1.0, 0.0] and res.pure_marginals


def test_singlet_marginals():
    res = marginal_isospectrality(SingletSystem().spin_state, (2, 2))
    np.testing.assert_allclose(res.spec1, [0.5, 0.5], atol=1e-15)
    assert not res.pure_marginals


def test_random_isospectral(rng):
    for _ in range(200):
        d1, d2 = int(rng.integers(1, 5)), int(rng.integers(1, 6))
        res = marginal_isospectrality(random_pure_state(rng, d1 * d2), (d1, d2))
        assert res.max_gap <= 1e-10
        assert len(res.spec1) == len(res.spec2) == max(d1, d2)


def test_marginals_reject_mixed():
    with pytest.raises(ValidationError):
        marginal_isospectrality(State.density(np.eye(4) / 4), (2, 2))
