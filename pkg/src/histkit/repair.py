"""Repairing near-consistent histories into exactly consistent ones.

Two constructive steps:

* :func:`round_to_projection` snaps a Hermitian near-projection
  (``||P^2 - P|| < ε``) to the spectral projection onto its eigenvalues
  near 1.
* :func:`repair_history` walks a history backwards from the last event,
  making each event commute with the chain projector of the (already
  repaired) later events.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError, ValidationError
from .histories import History
from .operators import _frozen, commutator, eig_hermitian, hermitian, op_norm

COMMUTATOR_TOL = 1e-10


def cn_constants(n):
    """Error constants ``[C_1, ..., C_n]``: ``C_1 = 0``, ``C_m = 6 (4 Σ_{k<m} C_k + 1)``."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    cs = [0.0]
    for _ in range(2, n + 1):
        cs.append(6.0 * (4.0 * sum(cs) + 1.0))
    return cs


def rounding_bound(epsilon):
    """Distance bound ``2ε / (1 + sqrt(1 - 4ε))`` for :func:`round_to_projection`."""
    return 2.0 * epsilon / (1.0 + math.sqrt(1.0 - 4.0 * epsilon))


def round_to_projection(p, epsilon):
    """Nearest-spectrum orthogonal projection to a Hermitian near-projection.

    Requires ``0 < ε < 1/4`` and ``||P^2 - P|| < ε``. The spectrum of ``P``
    then sits in two disjoint windows around 0 and 1; the result projects
    onto the eigenspaces in the window around 1. Being a spectral function
    of ``P``, it commutes with everything that commutes with ``P``.
    """
    if not 0.0 < epsilon < 0.25:
        raise PreconditionError(f"epsilon must satisfy 0 < epsilon < 1/4, got {epsilon}", threshold=0.25)
    h = hermitian(p)
    residual = op_norm(h @ h - h)
    if residual >= epsilon:
        raise PreconditionError(
            f"||P^2 - P|| = {residual:.3e} is not below epsilon = {epsilon:.3e}", residual=residual
        )
    dec = eig_hermitian(h, tol_cluster=0.0)
    v = dec.eigenvectors[:, dec.all_eigenvalues > 0.5]
    out = v @ v.conj().T
    return _frozen((out + out.conj().T) / 2)


def chain_projector(history, j):
    """``H_j = (P_{j+1} ... P_n)(P_n ... P_{j+1})`` for ``1 <= j <= n-1``."""
    ev = history.events if isinstance(history, History) else tuple(np.asarray(p) for p in history)
    n = len(ev)
    if not 1 <= j <= n - 1:
        raise IndexError(f"chain projector index {j} out of range 1..{n - 1}")
    return _frozen(_tail_chain(ev[j:], ev[0].shape[0]))


@dataclass(frozen=True, eq=False)
class RepairReport:
    """Outcome of :func:`repair_history`; lists are indexed by slot, earliest first."""

    original: History
    repaired: History
    per_step_distance: list
    per_step_bound: list
    epsilon: float
    commutator_residuals: list
    step_budgets: list = field(default_factory=list)
    input_residuals: list = field(default_factory=list)

    def bounds_satisfied(self):
        return all(d <= b for d, b in zip(self.per_step_distance, self.per_step_bound))

    def ratios(self):
        """Measured distance over bound, ``None`` where the bound is 0."""
        return [d / b if b > 0 else None for d, b in zip(self.per_step_distance, self.per_step_bound)]


def repair_threshold(n):
    """Largest admissible ε for an ``n``-event history: ``1 / (4 (4 Σ_{k<n} C_k + 1))``."""
    cs = cn_constants(n)
    return 1.0 / (4.0 * (4.0 * sum(cs[: n - 1]) + 1.0))


def repair_history(history, epsilon):
    """Replace a near-consistent history by a consistent one nearby.

    Preconditions: ``||[P_j, H_j]|| < ε`` for ``j = 1..n-1`` and ``ε`` below
    :func:`repair_threshold`. The last event is kept; each earlier event
    ``P_j`` is rebuilt from the two diagonal blocks of ``P_j`` with respect to
    the repaired chain projector ``H̃_j``, each block rounded to a projection.
    The result satisfies ``[P̃_j, H̃_j] = 0`` and
    ``||P̃_j - P_j|| < C_{n+1-j} ε``.
    """
    if not isinstance(history, History):
        history = History(history)
    ev = history.events
    n = len(ev)
    dim = ev[0].shape[0]

    residuals = [op_norm(commutator(ev[j - 1], chain_projector(history, j))) for j in range(1, n)]
    for j, r in enumerate(residuals, start=1):
        if r >= epsilon:
            raise PreconditionError(
                f"||[P_{j}, H_{j}]|| = {r:.3e} is not below epsilon = {epsilon:.3e}", residual=r, index=j
            )
    threshold = repair_threshold(n)
    if not 0.0 < epsilon < threshold:
        raise PreconditionError(
            f"epsilon = {epsilon:.3e} must lie in (0, {threshold:.3e}) for a history of length {n}",
            threshold=threshold,
        )

    cs = cn_constants(n)
    repaired = [None] * n
    repaired[n - 1] = ev[n - 1]
    budgets = [0.0] * n
    ident = np.eye(dim)
    for j in range(n - 1, 0, -1):
        h = _tail_chain(repaired[j:], dim)
        hp = ident - h
        p = ev[j - 1]
        # tail slots j+1..n carry constants C_{n-j}, ..., C_1
        budget = epsilon * (4.0 * sum(cs[: n - j]) + 1.0)
        if budget >= 0.25:
            raise PreconditionError(f"rounding budget {budget:.3e} at slot {j} reached 1/4", index=j, threshold=0.25)
        budgets[j - 1] = budget
        q = round_to_projection(hp @ p @ hp, budget)
        q2 = round_to_projection(h @ p @ h, budget)
        new = q @ hp + q2 @ h
        repaired[j - 1] = _frozen((new + new.conj().T) / 2)

    out = History(repaired)
    distances = [op_norm(a - b) for a, b in zip(out.events, ev)]
    bounds = [cs[n - j] * epsilon for j in range(1, n + 1)]
    comm = [op_norm(commutator(out.events[j - 1], chain_projector(out, j))) for j in range(1, n)]
    return RepairReport(history, out, distances, bounds, epsilon, comm, budgets, residuals)


def _tail_chain(tail, dim):
    left = np.eye(dim, dtype=complex)
    for p in tail:
        left = left @ p
    h = left @ left.conj().T
    return (h + h.conj().T) / 2


def check_report(report, commutator_tol=COMMUTATOR_TOL):
    """Raise ``ValidationError`` if a report breaks its distance or commutation guarantees."""
    for j, (d, b) in enumerate(zip(report.per_step_distance, report.per_step_bound), start=1):
        if d > b:
            raise ValidationError(f"slot {j}: distance {d:.3e} exceeds bound {b:.3e}")
    for j, r in enumerate(report.commutator_residuals, start=1):
        if r > commutator_tol:
            raise ValidationError(f"slot {j}: commutator residual {r:.3e} exceeds {commutator_tol:.1e}")
