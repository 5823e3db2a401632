"""Classical and quantum correlation matrices, CHSH facets and Tsirelson rescaling.

A correlation matrix ``Γ`` is a real ``K x L`` array of expectations
``Γ_kl = <A_k B_l>`` of observables bounded by 1. Classical ones form the
convex polytope spanned by the sign matrices ``a_k b_l``; quantum ones are
Gram cross-blocks ``(x_k, y_l)`` of unit vectors.
"""
import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import linprog, minimize

from . import golden
from .errors import ConvergenceError, DimensionError, ValidationError
from .operators import SIGMA_X, SIGMA_Y, SIGMA_Z, State, hermitian, op_norm

SQRT2 = math.sqrt(2.0)
TSIRELSON = 2.0 * SQRT2
MAX_VERTEX_EXPONENT = 20
FACET_TOL = 1e-10
LP_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    gamma: np.ndarray

    def __init__(self, gamma, tol=1e-12):
        g = np.array(gamma, dtype=float)
        if g.ndim != 2 or 0 in g.shape:
            raise DimensionError(f"correlation matrix must be a non-empty 2-D array, got shape {g.shape}")
        if not np.all(np.isfinite(g)):
            raise ValidationError("correlation matrix has non-finite entries")
        if np.max(np.abs(g)) > 1.0 + tol:
            raise ValidationError(f"correlation entries must lie in [-1, 1], max |entry| = {np.max(np.abs(g))!r}")
        g.flags.writeable = False
        object.__setattr__(self, "gamma", g)

    @property
    def K(self):
        return self.gamma.shape[0]

    @property
    def L(self):
        return self.gamma.shape[1]

    def scaled(self, factor):
        return CorrelationMatrix(self.gamma * factor)


def _gamma(g):
    return g.gamma if isinstance(g, CorrelationMatrix) else np.asarray(g, dtype=float)


@dataclass(frozen=True, eq=False)
class UnitVectorFamily:
    """Unit vectors ``x_1..x_K`` and ``y_1..y_L`` (rows of ``xs`` / ``ys``)."""

    xs: np.ndarray
    ys: np.ndarray

    def __init__(self, xs, ys, tol=1e-12):
        xs = np.atleast_2d(np.array(xs, dtype=float))
        ys = np.atleast_2d(np.array(ys, dtype=float))
        if xs.shape[1] != ys.shape[1]:
            raise DimensionError(f"vector lengths differ: {xs.shape[1]} vs {ys.shape[1]}")
        for name, vs in (("x", xs), ("y", ys)):
            norms = np.linalg.norm(vs, axis=1)
            bad = np.flatnonzero(np.abs(norms - 1.0) > tol)
            if bad.size:
                raise ValidationError(f"{name}_{bad[0] + 1} has norm {norms[bad[0]]!r}, expected 1")
        xs.flags.writeable = False
        ys.flags.writeable = False
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)


@dataclass(frozen=True, eq=False)
class ObservablePair:
    """Observables ``A_k`` on the first factor, ``B_l`` on the second, and a joint state."""

    A_list: tuple
    B_list: tuple
    rho: State

    def __init__(self, A_list, B_list, rho, tol=1e-10):
        A_list = tuple(hermitian(a) for a in A_list)
        B_list = tuple(hermitian(b) for b in B_list)
        for name, ops in (("A", A_list), ("B", B_list)):
            for i, op in enumerate(ops, start=1):
                nrm = op_norm(op)
                if nrm > 1.0 + tol:
                    raise ValidationError(f"||{name}_{i}|| = {nrm!r} exceeds 1")
        da = {a.shape[0] for a in A_list}
        db = {b.shape[0] for b in B_list}
        if len(da) != 1 or len(db) != 1:
            raise DimensionError("observables on one side must share a dimension")
        if da.pop() * db.pop() != rho.dim:
            raise DimensionError("state dimension does not match the tensor product of observable spaces")
        object.__setattr__(self, "A_list", A_list)
        object.__setattr__(self, "B_list", B_list)
        object.__setattr__(self, "rho", rho)


def correlation_from_state(pair, tol=1e-12):
    """``Γ_kl = tr(ρ A_k ⊗ B_l)``."""
    g = np.empty((len(pair.A_list), len(pair.B_list)))
    for k, a in enumerate(pair.A_list):
        for l, b in enumerate(pair.B_list):
            val = pair.rho.expect(np.kron(a, b))
            if abs(val.imag) > tol:
                raise ValidationError(f"Γ_{k + 1}{l + 1} has imaginary part {val.imag:.3e}")
            g[k, l] = val.real
    return CorrelationMatrix(np.clip(g, -1.0, 1.0))


def correlation_from_vectors(family):
    """``Γ_kl = (x_k, y_l)``."""
    return CorrelationMatrix(np.clip(family.xs @ family.ys.T, -1.0, 1.0))


def _sign_vectors(n):
    return np.array(list(itertools.product((1.0, -1.0), repeat=n)))


def classical_extreme_points(K, L):
    """All distinct sign matrices ``a_k b_l`` with ``a, b ∈ {±1}``.

    ``(a, b)`` and ``(-a, -b)`` give the same matrix, so ``a_1 = +1`` is
    fixed, leaving ``2^(K+L-1)`` matrices.
    """
    if K < 1 or L < 1:
        raise DimensionError("K and L must be positive")
    if K + L > MAX_VERTEX_EXPONENT:
        raise DimensionError(f"2^{K + L} sign assignments exceed the cap 2^{MAX_VERTEX_EXPONENT}")
    a_all = _sign_vectors(K)
    a_all = a_all[a_all[:, 0] > 0]
    b_all = _sign_vectors(L)
    return [CorrelationMatrix(np.outer(a, b)) for a in a_all for b in b_all]


def chsh_facet_values(gamma):
    """``Γ_11 + Γ_12 + Γ_21 + Γ_22 - 2 Γ_kl`` for ``(k, l)`` = (1,1), (1,2), (2,1), (2,2)."""
    g = _gamma(gamma)
    if g.shape != (2, 2):
        raise DimensionError(f"CHSH facets need a 2x2 matrix, got shape {g.shape}")
    s = g.sum()
    return [float(s - 2.0 * g[k, l]) for k in range(2) for l in range(2)]


class FacetReport(NamedTuple):
    facets: list
    max_abs: float
    classical: bool

    def to_json(self):
        return {"facets": list(self.facets), "max_abs": self.max_abs, "classical": self.classical}


def facet_report(gamma, tol=FACET_TOL):
    vals = chsh_facet_values(gamma)
    m = max(abs(v) for v in vals)
    return FacetReport(vals, m, bool(m <= 2.0 + tol))


def is_classical_2x2(gamma, tol=FACET_TOL):
    """Membership in the 2x2 classical polytope via its four facet pairs."""
    return facet_report(gamma, tol).classical


def membership_residual(gamma):
    """Smallest ``max_kl |Σ_v w_v V_kl - Γ_kl|`` over convex weights ``w``.

    Solved as a linear program over the enumerated extreme points; zero
    exactly when ``Γ`` is classical.
    """
    g = _gamma(gamma)
    K, L = g.shape
    verts = np.array([v.gamma.ravel() for v in classical_extreme_points(K, L)]).T  # (KL, m)
    m = verts.shape[1]
    target = g.ravel()
    # variables: weights w (m) and slack s; minimize s
    c = np.zeros(m + 1)
    c[-1] = 1.0
    ones = np.ones((K * L, 1))
    a_ub = np.vstack([np.hstack([verts, -ones]), np.hstack([-verts, -ones])])
    b_ub = np.concatenate([target, -target])
    a_eq = np.hstack([np.ones((1, m)), np.zeros((1, 1))])
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=[1.0], bounds=[(0, None)] * (m + 1), method="highs")
    if res.status != 0:
        raise ConvergenceError(f"polytope membership LP failed: {res.message}", residual=float("nan"))
    w = np.clip(res.x[:m], 0.0, None)
    w = w / w.sum()
    # re-evaluate on the cleaned weights rather than trusting the solver's slack
    return float(np.max(np.abs(verts @ w - target)))


def is_classical_general(gamma, tol=LP_TOL):
    """Membership in the ``K x L`` classical polytope by convex-hull feasibility."""
    return membership_residual(gamma) <= tol


def spin_operator(u, tol=1e-12):
    """``S_u = u_x σ_x + u_y σ_y + u_z σ_z`` for a unit 3-vector ``u``."""
    u = np.asarray(u, dtype=float)
    if u.shape != (3,):
        raise DimensionError(f"axis must be a 3-vector, got shape {u.shape}")
    if abs(np.linalg.norm(u) - 1.0) > tol:
        raise ValidationError(f"axis must have unit length, got {np.linalg.norm(u)!r}")
    return hermitian(u[0] * SIGMA_X + u[1] * SIGMA_Y + u[2] * SIGMA_Z)


def chsh_operator(t, u, v, w):
    st, su, sv, sw = (spin_operator(x) for x in (t, u, v, w))
    return np.kron(st, sv) + np.kron(st, sw) + np.kron(su, sv) - np.kron(su, sw)


def chsh_quantum_value(psi, t, u, v, w, tol=1e-12):
    """``<ψ| S_t⊗S_v + S_t⊗S_w + S_u⊗S_v - S_u⊗S_w |ψ>`` on ``C^2 ⊗ C^2``."""
    if psi.dim != 4:
        raise DimensionError(f"CHSH needs a two-qubit state, got dimension {psi.dim}")
    val = psi.expect(chsh_operator(t, u, v, w))
    if abs(val.imag) > tol:
        raise ValidationError(f"CHSH expectation has imaginary part {val.imag:.3e}")
    return val.real


def axis_in_plane(theta):
    """Unit vector at angle ``theta`` from ``z`` towards ``x`` (the x-z plane)."""
    return np.array([math.sin(theta), 0.0, math.cos(theta)])


def singlet_state():
    """``(|↓↑> - |↑↓>)/√2`` with ``|↑> = e_0``, ``|↓> = e_1``."""
    psi = np.zeros(4, dtype=complex)
    psi[2] = 1.0
    psi[1] = -1.0
    return State.pure(psi / SQRT2)


class ChshOptimum(NamedTuple):
    angles: tuple
    axes: tuple
    value: float


def optimize_chsh_axes(psi=None, grid=24):
    """Maximize the CHSH value over coplanar axes (x-z plane).

    A full angular grid is scanned using the table of pairwise
    correlations, then the best grid point is polished with Nelder-Mead
    on the exact expectation.
    """
    psi = singlet_state() if psi is None else psi
    angles = 2.0 * math.pi * np.arange(grid) / grid
    corr = np.empty((grid, grid))
    for i, a in enumerate(angles):
        sa = spin_operator(axis_in_plane(a))
        for k, b in enumerate(angles):
            corr[i, k] = psi.expect(np.kron(sa, spin_operator(axis_in_plane(b)))).real
    # value[t, u, v, w] = E(t,v) + E(t,w) + E(u,v) - E(u,w)
    tv = corr[:, None, :, None]
    tw = corr[:, None, None, :]
    uv = corr[None, :, :, None]
    uw = corr[None, :, None, :]
    table = tv + tw + uv - uw
    idx = np.unravel_index(np.argmax(table), table.shape)
    start = np.array([angles[i] for i in idx])

    def neg(x):
        return -chsh_quantum_value(psi, *(axis_in_plane(a) for a in x))

    res = minimize(neg, start, method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 4000})
    best = res.x if -res.fun > table[idx] else start
    best = tuple(float(a % (2.0 * math.pi)) for a in best)
    axes = tuple(axis_in_plane(a) for a in best)
    return ChshOptimum(best, axes, chsh_quantum_value(psi, *axes))


def golden_chsh_axes():
    """Frozen optimal axes for the singlet (see ``golden/chsh_optimal_axes.json``)."""
    data = golden.load("chsh_optimal_axes")
    return tuple(np.array(data["axes"][name]) for name in ("t", "u", "v", "w"))


def singlet_correlation(alice_axes, bob_axes):
    """Correlation matrix of the singlet for spin measurements along the given axes."""
    psi = singlet_state()
    pair = ObservablePair([spin_operator(a) for a in alice_axes], [spin_operator(b) for b in bob_axes], psi)
    return correlation_from_state(pair)


def singlet_vector_family(alice_axes, bob_axes):
    """Unit vectors realizing the singlet correlations ``-a_k · b_l`` in ``R^(K+L)``."""
    K, L = len(alice_axes), len(bob_axes)
    n = max(K + L, 3)
    xs = np.zeros((K, n))
    ys = np.zeros((L, n))
    xs[:, :3] = np.asarray(alice_axes, dtype=float)
    ys[:, :3] = -np.asarray(bob_axes, dtype=float)
    return UnitVectorFamily(xs, ys)


def chsh_saturating_vectors(y1=None, y2=None):
    """``y_1 ⊥ y_2``, ``x_1 = (y_2 - y_1)/√2``, ``x_2 = (y_2 + y_1)/√2`` in ``R^4``."""
    y1 = np.array([1.0, 0.0, 0.0, 0.0]) if y1 is None else np.asarray(y1, dtype=float)
    y2 = np.array([0.0, 1.0, 0.0, 0.0]) if y2 is None else np.asarray(y2, dtype=float)
    x1 = (y2 - y1) / SQRT2
    x2 = (y2 + y1) / SQRT2
    return UnitVectorFamily([x1, x2], [y1, y2])


class RescaleResult(NamedTuple):
    scaled: CorrelationMatrix
    classical: bool


def tsirelson_rescale_check(gamma, tol=FACET_TOL):
    """Scale a 2x2 quantum correlation by ``1/√2`` and test classicality."""
    g = _gamma(gamma)
    if g.shape != (2, 2):
        raise DimensionError("the fixed constant √2 applies to 2x2 correlations; use tsirelson_rescale_check_general")
    scaled = CorrelationMatrix(g / SQRT2)
    return RescaleResult(scaled, is_classical_2x2(scaled, tol))


def tsirelson_rescale_check_general(gamma, scale, tol=LP_TOL):
    """Scale a ``K x L`` correlation by ``1/scale`` and test classicality by LP.

    ``scale`` is required: no Grothendieck-type constant beyond the 2x2
    value is assumed.
    """
    if scale <= 0:
        raise ValueError("scale must be positive")
    scaled = CorrelationMatrix(_gamma(gamma) / scale)
    return RescaleResult(scaled, is_classical_general(scaled, tol))


def zero_pad(gamma, K, L):
    """Embed ``Γ`` in the top-left corner of a ``K x L`` zero matrix."""
    g = _gamma(gamma)
    if K < g.shape[0] or L < g.shape[1]:
        raise DimensionError("padding target is smaller than the matrix")
    out = np.zeros((K, L))
    out[: g.shape[0], : g.shape[1]] = g
    return CorrelationMatrix(out)
