"""Concrete physical instances: spin singlet, local channels, double slit, marginals.

All models are small enough to evaluate exactly with dense matrices; they
feed the generic history and correlation machinery rather than carrying
their own formulas.
"""
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import null_space

from .bell import singlet_state, spin_operator
from .errors import DimensionError, ValidationError
from .histories import (
    HistoryFamily,
    OutcomeFamily,
    conditional_probability_binary,
    cross_term,
    evidence,
    frequency,
)
from .operators import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    State,
    _frozen,
    eig_hermitian,
    partial_trace,
    trace_norm,
)

DEFAULT_BINS = 32
TP_TOL = 1e-10


# -- spin singlet -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SingletSystem:
    """Two spins in the singlet state, ordered left ⊗ right."""

    spin_state: State = None

    def __post_init__(self):
        if self.spin_state is None:
            object.__setattr__(self, "spin_state", singlet_state())
        ref = singlet_state().density_matrix()
        if np.max(np.abs(self.spin_state.density_matrix() - ref)) > 1e-12:
            raise ValidationError("state is not the spin singlet")


def spin_projectors(axis):
    """``(P_up, P_down) = ((1 ± S_n)/2)`` along a unit axis."""
    s = spin_operator(axis)
    eye = np.eye(2)
    return _frozen((eye + s) / 2), _frozen((eye - s) / 2)


def left(op):
    return np.kron(op, np.eye(2))


def right(op):
    return np.kron(np.eye(2), op)


class SingletFrequencies(NamedTuple):
    up_L: float
    down_L: float
    down_R_given_up_L: float
    up_R_and_up_L: float


def singlet_frequencies(axis):
    """Single-event frequencies and the perfect anticorrelation along ``axis``."""
    psi = singlet_state()
    up, down = spin_projectors(axis)
    up_l, down_l = left(up), left(down)
    down_r, up_r = right(down), right(up)
    family = HistoryFamily([[up_l, down_l], [down_r, up_r]], selected=(1, 1))
    cond = conditional_probability_binary(psi, family, 2)
    return SingletFrequencies(
        frequency(psi, [up_l]),
        frequency(psi, [down_l]),
        cond,
        frequency(psi, [up_l, up_r]),
    )


def right_spin(rho_right):
    """``(<σ_x>, <σ_y>, <σ_z>)`` of a single-qubit density matrix."""
    return np.array([np.trace(rho_right @ s).real for s in (SIGMA_X, SIGMA_Y, SIGMA_Z)])


# -- local channels and no-signaling -----------------------------------------

@dataclass(frozen=True, eq=False)
class LocalChannel:
    """Kraus operators acting on ``apparatus ⊗ left``.

    With ``apparatus_dim = 1`` the operators act on the left factor alone.
    An apparatus starts in its first basis state.
    """

    operator_sum: tuple
    apparatus_dim: int = 1

    def __post_init__(self):
        ops = tuple(np.array(k, dtype=complex) for k in self.operator_sum)
        if not ops:
            raise ValidationError("a channel needs at least one Kraus operator")
        d = ops[0].shape[0]
        if any(k.shape != (d, d) for k in ops):
            raise DimensionError("Kraus operators must be square and share a shape")
        if d % self.apparatus_dim:
            raise DimensionError(f"Kraus dimension {d} is not a multiple of apparatus dimension {self.apparatus_dim}")
        tp = sum(k.conj().T @ k for k in ops)
        dev = np.max(np.abs(tp - np.eye(d)))
        if dev > TP_TOL:
            raise ValidationError(f"channel is not trace preserving: max|Σ K†K - 1| = {dev:.3e}")
        for k in ops:
            k.flags.writeable = False
        object.__setattr__(self, "operator_sum", ops)

    @property
    def left_dim(self):
        return self.operator_sum[0].shape[0] // self.apparatus_dim

    @classmethod
    def identity(cls, dim=2):
        return cls([np.eye(dim)])

    @classmethod
    def projective(cls, projections):
        return cls(list(projections))


def apply_local_channel(rho, dims, channel):
    """Apply ``channel`` to the left factor of ``rho`` on ``C^dL ⊗ C^dR``.

    Returns the joint state on ``apparatus ⊗ left ⊗ right``.
    """
    d_l, d_r = dims
    if channel.left_dim != d_l:
        raise DimensionError(f"channel acts on dimension {channel.left_dim}, left factor has {d_l}")
    d_a = channel.apparatus_dim
    ready = np.zeros((d_a, d_a))
    ready[0, 0] = 1.0
    full = np.kron(ready, rho)
    out = np.zeros_like(full, dtype=complex)
    for k in channel.operator_sum:
        big = np.kron(k, np.eye(d_r))
        out += big @ full @ big.conj().T
    return out


class NoSignaling(NamedTuple):
    delta_norm: float
    pre_spin_R: np.ndarray
    post_spin_R: np.ndarray


def marginal_shift(rho, dims, channel):
    """Trace-norm change of the right marginal caused by a left-local channel."""
    rho = np.asarray(rho, dtype=complex)
    d_l, d_r = dims
    before = partial_trace(rho, (d_l, d_r), keep=2)
    after_joint = apply_local_channel(rho, dims, channel)
    after = partial_trace(after_joint, (channel.apparatus_dim * d_l, d_r), keep=2)
    return trace_norm(after - before), before, after


def no_signaling_check(system, channel):
    """Right-spin marginal of the singlet before and after a channel on the left spin."""
    rho = system.spin_state.density_matrix()
    delta, before, after = marginal_shift(rho, (2, 2), channel)
    return NoSignaling(delta, right_spin(before), right_spin(after))


def conditioned_right_spin(system, left_projection):
    """Right spin expectations conditioned on a left outcome (selective update)."""
    rho = system.spin_state.density_matrix()
    p = left(left_projection)
    post = p @ rho @ p
    prob = np.trace(post).real
    if prob <= 0:
        raise ValidationError("conditioning event has zero probability")
    return right_spin(partial_trace(post / prob, (2, 2), keep=2))


# -- double slit ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DoubleSlitModel:
    """Two slits, a screen of ``B`` bins, and which-path pointer states.

    ``amplitudes[0]`` / ``amplitudes[1]`` are the screen amplitudes of the
    right / left slit; they must be orthonormal so that propagation from
    the slits to the screen is an isometry. The environment pointer states
    for the two paths have overlap ``exp(-lam)``.
    """

    amplitudes: np.ndarray
    lam: float = 0.0

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex)
        if a.ndim != 2 or a.shape[0] != 2 or a.shape[1] < 2:
            raise DimensionError(f"amplitudes must have shape (2, B) with B >= 2, got {a.shape}")
        if self.lam < 0:
            raise ValidationError(f"coupling must be non-negative, got {self.lam}")
        gram = a.conj() @ a.T
        if np.max(np.abs(gram - np.eye(2))) > 1e-12:
            raise ValidationError("slit amplitude rows must be orthonormal")
        a.flags.writeable = False
        object.__setattr__(self, "amplitudes", a)

    @property
    def bins(self):
        return self.amplitudes.shape[1]

    def with_lambda(self, lam):
        return DoubleSlitModel(self.amplitudes, lam)

    @property
    def dim(self):
        return 2 * self.bins

    def pointer_states(self):
        """Environment states for the right and left path, overlap ``exp(-lam)``."""
        ov = math.exp(-self.lam)
        chi_r = np.array([1.0, 0.0])
        chi_l = np.array([ov, math.sqrt(max(0.0, 1.0 - ov * ov))])
        return chi_r, chi_l

    def propagator(self):
        """Unitary on the position register whose first two columns are the slit amplitudes."""
        cols = self.amplitudes.T
        return np.hstack([cols, null_space(cols.conj().T)])

    def state(self, slits=(0, 1)):
        """Initial state just after the slits: equal superposition over open slits.

        Register ordering is position ⊗ environment; position 0 is the right
        slit, position 1 the left one.
        """
        chi = self.pointer_states()
        psi = np.zeros(self.dim, dtype=complex)
        for s in slits:
            psi += np.kron(np.eye(self.bins)[s], chi[s])
        return State.normalized(psi)

    def slit_projections(self):
        pr = np.zeros((self.bins, self.bins))
        pr[0, 0] = 1.0
        p_r = np.kron(pr, np.eye(2))
        return _frozen(p_r), _frozen(np.eye(self.dim) - p_r)

    def screen_projection(self, bin):
        """Heisenberg-picture event 'electron lands in ``bin``'."""
        if not 0 <= bin < self.bins:
            raise IndexError(f"bin {bin} out of range 0..{self.bins - 1}")
        w = self.propagator()
        e = np.zeros((self.bins, self.bins))
        e[bin, bin] = 1.0
        return _frozen(np.kron(w.conj().T @ e @ w, np.eye(2)))

    def family(self, bin):
        p_r, p_l = self.slit_projections()
        p2 = self.screen_projection(bin)
        return HistoryFamily([[p_r, p_l], [p2, np.eye(self.dim) - p2]], selected=(1, 1))


class SlitFrequencies(NamedTuple):
    f_r: float
    f_l: float
    f_both: float
    interference: float


def double_slit_frequencies(model, bin):
    """Screen-bin frequencies with right slit, left slit, and no which-slit event."""
    psi = model.state()
    p_r, p_l = model.slit_projections()
    p2 = model.screen_projection(bin)
    f_r = frequency(psi, [p_r, p2])
    f_l = frequency(psi, [p_l, p2])
    f_both = frequency(psi, [p2])
    return SlitFrequencies(f_r, f_l, f_both, f_both - f_r - f_l)


def single_path_frequency(model, bin, slit):
    """Screen frequency of the branch through one slit (``slit`` 0 = right, 1 = left).

    The other branch's amplitude is zeroed and the remaining vector is
    *not* renormalized, so the result is directly comparable with the
    ``f_r`` / ``f_l`` entries of :func:`double_slit_frequencies`.
    """
    if slit not in (0, 1):
        raise ValueError(f"slit must be 0 or 1, got {slit!r}")
    psi = np.array(model.state().vector).reshape(model.bins, 2)
    psi[1 - slit] = 0.0
    v = model.screen_projection(bin) @ psi.ravel()
    return float(np.vdot(v, v).real)


def central_bin(model):
    return model.bins // 2


def evidence_curve(model, lambdas, bin=None):
    """Slit-slot evidence as a function of the pointer coupling.

    Returns a list of ``(lambda, min_evidence)`` pairs. With two slots the
    minimum runs over the slit slot only.
    """
    lambdas = [float(x) for x in lambdas]
    if any(b < a for a, b in zip(lambdas, lambdas[1:])):
        raise ValidationError("lambda grid must be ascending")
    bin = central_bin(model) if bin is None else bin
    out = []
    for lam in lambdas:
        m = model.with_lambda(lam)
        out.append((lam, evidence(m.state(), m.family(bin), 1)))
    return out


def dephasing_gap(state, family, j):
    """``|ρ(QQ*) - Σ_l ρ(P_j^l QQ* P_j^l)|`` with past events folded into ``ρ``.

    ``Q`` is the product of the selected later events. The gap equals the
    modulus of the summed slot-``j`` cross terms and so never exceeds
    ``1 - evidence``.
    """
    n = len(family)
    if not 1 <= j <= n - 1:
        raise IndexError(f"slot index {j} out of range 1..{n - 1}")
    kj = len(family.slots[j - 1])
    total = 0j
    for k in range(1, kj + 1):
        for l in range(1, kj + 1):
            if k != l:
                total += cross_term(state, family, j, k, l)
    return abs(total)


def gaussian_slit_amplitudes(bins=DEFAULT_BINS, width=1.5, wavenumber=1.0):
    """Gaussian envelope with opposite phase ramps, symmetrically orthonormalized.

    Centered on bin ``bins // 2``; both rows share the same envelope, so the
    central bin sees fully constructive interference.
    """
    x = np.arange(bins) - bins // 2
    env = np.exp(-x**2 / (4.0 * width**2))
    env = env / np.linalg.norm(env)
    a = np.vstack([env * np.exp(1j * wavenumber * x), env * np.exp(-1j * wavenumber * x)])
    gram = a.conj() @ a.T
    vals, vecs = np.linalg.eigh(gram)
    inv_sqrt = vecs @ np.diag(vals**-0.5) @ vecs.conj().T
    return inv_sqrt.T @ a


def golden_double_slit():
    """Frozen double-slit instance (see ``golden/double_slit.json``)."""
    from . import golden

    return model_from_json(golden.load("double_slit"))


def model_from_json(data):
    amps = np.array([[complex(re, im) for re, im in row] for row in data["amplitudes"]])
    return DoubleSlitModel(amps, float(data.get("lambda", 0.0)))


def model_to_json(model):
    return {
        "bins": model.bins,
        "lambda": model.lam,
        "amplitudes": [[[float(z.real), float(z.imag)] for z in row] for row in model.amplitudes],
    }


# -- marginals ---------------------------------------------------------------

class Isospectrality(NamedTuple):
    spec1: list
    spec2: list
    max_gap: float
    pure_marginals: bool


def marginal_isospectrality(psi, dims, tol=1e-10):
    """Compare the spectra of both marginals of a pure bipartite state."""
    if psi.kind != "pure":
        raise ValidationError("isospectrality of marginals is checked for pure states only")
    d1, d2 = dims
    rho = psi.density_matrix()
    s1 = np.sort(eig_hermitian(partial_trace(rho, (d1, d2), keep=1)).all_eigenvalues)[::-1]
    s2 = np.sort(eig_hermitian(partial_trace(rho, (d1, d2), keep=2)).all_eigenvalues)[::-1]
    n = max(d1, d2)
    s1 = np.concatenate([s1, np.zeros(n - d1)])
    s2 = np.concatenate([s2, np.zeros(n - d2)])
    gap = float(np.max(np.abs(s1 - s2)))
    return Isospectrality(s1.tolist(), s2.tolist(), gap, bool(s1[0] >= 1.0 - tol))
