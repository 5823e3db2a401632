"""Frequencies of histories of events and their interference structure.

A history ``{P_n, ..., P_1}`` is stored as a sequence of projections in
time order, earliest first. Its frequency in a state ``ω`` is

    F = ω(P_1 ... P_{n-1} P_n P_{n-1} ... P_1) = tr(C ρ C^†),  C = P_n ... P_1.

Slot indices ``j`` and outcome indices ``k`` are 1-based throughout, to
line up with the usual notation ``P_j^k``.
"""
import itertools
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import DimensionError, PreconditionError, ValidationError
from .operators import _frozen, projection

MAX_TUPLES = 10**6
UNDEFINED_DENOMINATOR = 1e-14


@dataclass(frozen=True, eq=False)
class History:
    """Time-ordered events; ``events[0]`` is ``P_1``, the earliest."""

    events: tuple

    def __init__(self, events, tol=1e-10):
        events = tuple(projection(p, tol=tol) for p in events)
        if not events:
            raise ValidationError("a history needs at least one event")
        dims = {p.shape[0] for p in events}
        if len(dims) != 1:
            raise DimensionError(f"events have mixed dimensions {sorted(dims)}")
        object.__setattr__(self, "events", events)

    def __len__(self):
        return len(self.events)

    @property
    def dim(self):
        return self.events[0].shape[0]


@dataclass(frozen=True, eq=False)
class OutcomeFamily:
    """Mutually orthogonal projections resolving the identity."""

    outcomes: tuple

    def __init__(self, outcomes, tol=1e-10):
        outcomes = tuple(projection(p, tol=tol) for p in outcomes)
        if not outcomes:
            raise ValidationError("an outcome family needs at least one outcome")
        d = outcomes[0].shape[0]
        if any(p.shape[0] != d for p in outcomes):
            raise DimensionError("outcomes have mixed dimensions")
        total = sum(outcomes)
        if np.max(np.abs(total - np.eye(d))) > tol:
            raise ValidationError("outcomes do not sum to the identity")
        for k, l in itertools.combinations(range(len(outcomes)), 2):
            if np.max(np.abs(outcomes[k] @ outcomes[l])) > tol:
                raise ValidationError(f"outcomes {k + 1} and {l + 1} are not orthogonal")
        object.__setattr__(self, "outcomes", outcomes)

    def __len__(self):
        return len(self.outcomes)

    def __getitem__(self, k):
        """1-based outcome access."""
        if not 1 <= k <= len(self.outcomes):
            raise IndexError(f"outcome index {k} out of range 1..{len(self.outcomes)}")
        return self.outcomes[k - 1]

    @classmethod
    def binary(cls, p):
        p = projection(p)
        return cls([p, np.eye(p.shape[0]) - p])

    @classmethod
    def trivial(cls, dim):
        return cls([np.eye(dim)])


@dataclass(frozen=True, eq=False)
class HistoryFamily:
    """One outcome family per time slot, plus the selected outcome in each."""

    slots: tuple
    selected: tuple

    def __init__(self, slots, selected=None):
        slots = tuple(s if isinstance(s, OutcomeFamily) else OutcomeFamily(s) for s in slots)
        if not slots:
            raise ValidationError("a history family needs at least one slot")
        dims = {s.outcomes[0].shape[0] for s in slots}
        if len(dims) != 1:
            raise DimensionError(f"slots have mixed dimensions {sorted(dims)}")
        selected = (1,) * len(slots) if selected is None else tuple(int(k) for k in selected)
        if len(selected) != len(slots):
            raise ValidationError(f"{len(selected)} selected indices for {len(slots)} slots")
        for j, (s, k) in enumerate(zip(slots, selected), start=1):
            if not 1 <= k <= len(s):
                raise ValidationError(f"selected index {k} invalid for slot {j} with {len(s)} outcomes")
        object.__setattr__(self, "slots", slots)
        object.__setattr__(self, "selected", selected)

    def __len__(self):
        return len(self.slots)

    @property
    def dim(self):
        return self.slots[0].outcomes[0].shape[0]

    def events(self, overrides=None):
        """Projections of the selected history, with optional ``{j: matrix}`` replacements."""
        overrides = overrides or {}
        out = []
        for j, (s, k) in enumerate(zip(self.slots, self.selected), start=1):
            out.append(overrides.get(j, s[k]))
        return out

    def history(self):
        return History(self.events())


def heisenberg_evolve(p, u):
    """``U^† P U``: an event at a later time given the propagator ``U``."""
    u = np.asarray(u, dtype=complex)
    return _frozen(u.conj().T @ np.asarray(p) @ u)


def _events(history):
    if isinstance(history, History):
        return history.events
    return tuple(np.asarray(p, dtype=complex) for p in history)


def _check_dim(state, dim):
    if state.dim != dim:
        raise DimensionError(f"state dimension {state.dim} does not match operator dimension {dim}")


def _apply(state, ops):
    """Propagate the state through ``ops`` in order: returns C ψ or C ρ C^†."""
    if state.kind == "pure":
        v = state.vector
        for p in ops:
            v = p @ v
        return v
    r = state.rho
    for p in ops:
        r = p @ r @ p.conj().T
    return r


def _weight(state, x):
    if state.kind == "pure":
        return float(np.vdot(x, x).real)
    return float(np.trace(x).real)


def raw_frequency(state, history):
    """Unclamped ``ω(P_1 ... P_n ... P_1)``; may carry ~1e-16 rounding noise."""
    ev = _events(history)
    _check_dim(state, ev[0].shape[0])
    return _weight(state, _apply(state, ev))


def frequency(state, history):
    """Frequency of a history, clamped to ``[0, 1]``."""
    return min(1.0, max(0.0, raw_frequency(state, history)))


def frequency_distribution(state, family, max_tuples=MAX_TUPLES):
    """Frequencies of every outcome tuple ``(k_1, ..., k_n)`` of a family.

    Tuples are 1-based and appear in lexicographic order. The propagated
    state is shared along common prefixes, so the cost is one matrix
    product per node of the outcome tree.
    """
    _check_dim(state, family.dim)
    sizes = [len(s) for s in family.slots]
    if int(np.prod(sizes, dtype=float)) > max_tuples:
        raise DimensionError(f"{int(np.prod(sizes, dtype=float))} outcome tuples exceed cap {max_tuples}")
    table = {}

    def walk(j, x, prefix):
        if j == len(sizes):
            table[prefix] = min(1.0, max(0.0, _weight(state, x)))
            return
        for k, p in enumerate(family.slots[j].outcomes, start=1):
            if state.kind == "pure":
                y = p @ x
            else:
                y = p @ x @ p.conj().T
            walk(j + 1, y, prefix + (k,))

    x0 = state.vector if state.kind == "pure" else state.rho
    walk(0, x0, ())
    return table


def _check_slot(family, j, allow_last=False):
    n = len(family)
    hi = n if allow_last else n - 1
    if not 1 <= j <= hi:
        if not allow_last and j == n:
            raise PreconditionError(f"slot j={j} is the last slot; interference needs later events (j < n={n})")
        raise IndexError(f"slot index {j} out of range 1..{hi}")


def cross_term(state, family, j, k, l):
    """Complex ``ω(P_1..P_{j-1} P_j^k P_{j+1}..P_n..P_{j+1} P_j^l P_{j-1}..P_1)``."""
    _check_dim(state, family.dim)
    ev = family.events()
    past = ev[: j - 1]
    future = ev[j:]
    pk = family.slots[j - 1][k]
    pl = family.slots[j - 1][l]
    if state.kind == "pure":
        v = _apply(state, past)
        left = _chain(future, pk @ v)
        right = _chain(future, pl @ v)
        return complex(np.vdot(left, right))
    r = _apply(state, past)
    b = _chain_op(future, family.dim)
    bk = b @ pk
    bl = b @ pl
    return complex(np.trace(bl @ r @ bk.conj().T))


def _chain(ops, v):
    for p in ops:
        v = p @ v
    return v


def _chain_op(ops, dim):
    out = np.eye(dim, dtype=complex)
    for p in ops:
        out = p @ out
    return out


def interference(state, family, j, k, l):
    """Real part of the slot-``j`` cross term between outcomes ``k`` and ``l``."""
    _check_slot(family, j)
    if k == l:
        raise ValidationError("interference needs two different outcomes (k != l)")
    return cross_term(state, family, j, k, l).real


def evidence(state, family, j):
    """``1 - Σ_{k≠l} |cross term|`` for slot ``j`` (1 <= j <= n-1)."""
    _check_slot(family, j)
    kj = len(family.slots[j - 1])
    total = 0.0
    for k, l in itertools.permutations(range(1, kj + 1), 2):
        total += abs(cross_term(state, family, j, k, l))
    return 1.0 - total


class Consistency(NamedTuple):
    consistent: bool
    min_evidence: float


def is_delta_consistent(state, family, delta):
    """Minimum evidence over slots ``1..n-1`` compared against ``delta``.

    A single-slot family has no interference and is reported with
    evidence 1.
    """
    if not 0.0 <= delta <= 1.0:
        raise ValidationError(f"delta must lie in [0, 1], got {delta}")
    vals = [evidence(state, family, j) for j in range(1, len(family))]
    m = min(vals) if vals else 1.0
    return Consistency(bool(m >= delta), float(m))


def _freq_with(state, family, j, replacement):
    ev = family.events()
    if replacement is None:
        del ev[j - 1]
    else:
        ev[j - 1] = replacement
    if not ev:
        return 1.0
    return raw_frequency(state, ev)


def conditional_probability_binary(state, family, j) -> Optional[float]:
    """``F{..P_j..} / (F{..P_j..} + F{..P_j^⊥..})`` for a two-outcome slot.

    Returns ``None`` when the denominator is below 1e-14.
    """
    if not 1 <= j <= len(family):
        raise IndexError(f"slot index {j} out of range 1..{len(family)}")
    slot = family.slots[j - 1]
    if len(slot) != 2:
        raise PreconditionError(
            f"slot {j} has {len(slot)} outcomes; the conditional probability of an event given "
            "its past and future is only unambiguous for binary slots (see conditional_ambiguity)"
        )
    k = family.selected[j - 1]
    f_sel = _freq_with(state, family, j, slot[k])
    f_perp = _freq_with(state, family, j, slot[3 - k])
    den = f_sel + f_perp
    if den < UNDEFINED_DENOMINATOR:
        return None
    return f_sel / den


class Ambiguity(NamedTuple):
    candidate_a: Optional[float]
    candidate_b: Optional[float]
    candidate_c: Optional[float]
    max_spread: float


def conditional_ambiguity(state, family, j):
    """Three competing conditional probabilities for a slot with >= 3 outcomes.

    ``a`` normalizes by ``F{P_j} + F{1 - P_j}``, ``b`` by the sum over all
    outcomes, ``c`` by the frequency with slot ``j`` left out. Without
    interference they coincide.
    """
    if not 1 <= j <= len(family):
        raise IndexError(f"slot index {j} out of range 1..{len(family)}")
    slot = family.slots[j - 1]
    if len(slot) < 3:
        raise PreconditionError(f"slot {j} has {len(slot)} outcomes; ambiguity needs at least 3")
    k = family.selected[j - 1]
    pj = slot[k]
    f_sel = _freq_with(state, family, j, pj)
    f_perp = _freq_with(state, family, j, np.eye(family.dim) - pj)
    f_sum = sum(_freq_with(state, family, j, p) for p in slot.outcomes)
    f_none = _freq_with(state, family, j, None)

    def ratio(den):
        return None if den < UNDEFINED_DENOMINATOR else f_sel / den

    cands = (ratio(f_sel + f_perp), ratio(f_sum), ratio(f_none))
    defined = [c for c in cands if c is not None]
    spread = max((abs(x - y) for x, y in itertools.combinations(defined, 2)), default=0.0)
    return Ambiguity(*cands, spread)
