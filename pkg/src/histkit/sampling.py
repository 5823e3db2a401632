"""Seeded random instances: states, operators, unitaries, channels.

Every function draws from an explicit ``numpy.random.Generator``.
"""
import math

import numpy as np
from scipy.linalg import expm

from .operators import State


def rng_from(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def ginibre(rng, rows, cols=None):
    cols = rows if cols is None else cols
    return rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))


def random_unitary(rng, n):
    """Haar-distributed unitary (QR of a Ginibre matrix with phase fix)."""
    q, r = np.linalg.qr(ginibre(rng, n))
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_hermitian(rng, n, scale=1.0):
    x = ginibre(rng, n)
    return scale * (x + x.conj().T) / 2


def random_pure_state(rng, n):
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return State.pure(v / np.linalg.norm(v))


def random_density_matrix(rng, n, rank=None):
    rank = n if rank is None else rank
    x = ginibre(rng, n, rank)
    rho = x @ x.conj().T
    rho = rho / np.trace(rho).real
    return State("density", rho=_freeze((rho + rho.conj().T) / 2))


def random_state(rng, n):
    """Pure or mixed with equal odds."""
    if rng.random() < 0.5:
        return random_pure_state(rng, n)
    return random_density_matrix(rng, n, rank=int(rng.integers(1, n + 1)))


def random_projection(rng, n, rank=None):
    rank = int(rng.integers(0, n + 1)) if rank is None else rank
    u = random_unitary(rng, n)[:, :rank]
    return u @ u.conj().T


def random_outcome_family(rng, n, k=None):
    """Projections onto a random partition of a random orthonormal basis."""
    k = int(rng.integers(1, n + 1)) if k is None else k
    u = random_unitary(rng, n)
    # every outcome gets at least one basis vector
    labels = np.concatenate([np.arange(k), rng.integers(0, k, size=n - k)])
    rng.shuffle(labels)
    outs = []
    for i in range(k):
        cols = u[:, labels == i]
        outs.append(cols @ cols.conj().T)
    return outs


def random_kraus(rng, dim_in, n_ops):
    """Kraus operators of a random CPTP map: blocks of a random isometry."""
    q, _ = np.linalg.qr(ginibre(rng, dim_in * n_ops, dim_in))
    return [q[i * dim_in:(i + 1) * dim_in, :] for i in range(n_ops)]


def random_unit_vector(rng, n=3):
    v = rng.normal(size=n)
    return v / np.linalg.norm(v)


def random_near_projection(rng, n, epsilon):
    """Hermitian ``P`` with ``||P^2 - P|| < epsilon`` (``0 < epsilon < 1/4``).

    Eigenvalues are drawn uniformly from the two windows where
    ``|λ^2 - λ| < epsilon``, then rotated by a Haar unitary.
    """
    lo = (1.0 - math.sqrt(1.0 + 4.0 * epsilon)) / 2.0
    hi = (1.0 - math.sqrt(1.0 - 4.0 * epsilon)) / 2.0
    # shrink slightly so the strict inequality survives rounding
    lo, hi = 0.999 * lo, 0.999 * hi
    lam = rng.uniform(lo, hi, size=n)
    ones = rng.random(n) < 0.5
    lam[ones] = 1.0 - lam[ones]
    u = random_unitary(rng, n)
    p = (u * lam) @ u.conj().T
    return (p + p.conj().T) / 2


def random_small_unitary(rng, n, eta):
    """``exp(i eta H)`` with ``H`` a random Hermitian of unit operator norm."""
    h = random_hermitian(rng, n)
    h = h / np.max(np.abs(np.linalg.eigvalsh(h)))
    return expm(1j * eta * h)


def near_commuting_history(rng, n, dim, eta):
    """``n`` projections, each a rotation by ``exp(i eta H)`` of a commuting family.

    The unperturbed events are diagonal in a shared random basis, so all
    chain commutators are of order ``eta``.
    """
    u = random_unitary(rng, dim)
    events = []
    for _ in range(n):
        rank = int(rng.integers(1, dim))
        mask = np.zeros(dim)
        mask[rng.choice(dim, size=rank, replace=False)] = 1.0
        w = random_small_unitary(rng, dim, eta) @ u
        p = (w * mask) @ w.conj().T
        events.append((p + p.conj().T) / 2)
    return events


def random_binary_observable(rng, n):
    """Hermitian unitary (spectrum in {-1, +1}) in a Haar-random basis."""
    signs = rng.choice([-1.0, 1.0], size=n)
    u = random_unitary(rng, n)
    a = (u * signs) @ u.conj().T
    return (a + a.conj().T) / 2


def random_quantum_correlation(rng, K=2, L=2, d=2):
    """``Γ_kl = tr(ρ A_k ⊗ B_l)`` for random ±1 observables and a random state on ``C^d ⊗ C^d``."""
    state = random_state(rng, d * d)
    rho = state.density_matrix()
    alice = [random_binary_observable(rng, d) for _ in range(K)]
    bob = [random_binary_observable(rng, d) for _ in range(L)]
    g = np.empty((K, L))
    for k, a in enumerate(alice):
        for l, b in enumerate(bob):
            g[k, l] = np.trace(rho @ np.kron(a, b)).real
    return g


def random_deterministic_correlation(rng, K=2, L=2):
    """``Γ_kl = a_k b_l`` for uniformly random sign assignments."""
    a = rng.choice([-1.0, 1.0], size=K)
    b = rng.choice([-1.0, 1.0], size=L)
    return np.outer(a, b)


def random_classical_correlation(rng, K=2, L=2, terms=None):
    """Convex mixture of random deterministic strategies with Dirichlet weights."""
    terms = int(rng.integers(2, 9)) if terms is None else terms
    w = rng.dirichlet(np.ones(terms))
    return sum(wi * random_deterministic_correlation(rng, K, L) for wi in w)


def _freeze(a):
    a = np.array(a)
    a.flags.writeable = False
    return a
