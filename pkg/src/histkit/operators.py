"""Dense operators on finite-dimensional Hilbert spaces.

Matrices are plain complex ``numpy`` arrays. Validating constructors
(:func:`hermitian`, :func:`projection`) return read-only copies so that
values can be shared freely once built.
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .errors import ConvergenceError, DimensionError, ValidationError

MAX_DIM = 64
TOL_CLUSTER = 1e-9
MAX_SWEEPS = 100

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
for _m in (SIGMA_X, SIGMA_Y, SIGMA_Z):
    _m.flags.writeable = False


def _frozen(a):
    a = np.array(a, dtype=complex)
    a.flags.writeable = False
    return a


def as_matrix(a):
    """Return ``a`` as a finite 2-D complex array (a fresh, read-only copy)."""
    m = np.array(a, dtype=complex)
    if m.ndim != 2 or 0 in m.shape:
        raise DimensionError(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError("matrix has non-finite entries")
    m.flags.writeable = False
    return m


def _square(a, what="matrix"):
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"{what} must be square, got shape {m.shape}")
    return m


def hermitian(a, tol=1e-12):
    """Validate ``a`` as Hermitian and return the symmetrized copy ``(A + A^†)/2``."""
    m = _square(a, "Hermitian operator")
    asym = np.max(np.abs(m - m.conj().T))
    if asym > tol:
        raise ValidationError(f"operator is not Hermitian: max|A - A^†| = {asym:.3e}")
    return _frozen((m + m.conj().T) / 2)


def projection(p, tol=1e-10):
    """Validate ``p`` as an orthogonal projection and return a symmetrized copy.

    Both ``||P - P^†||`` and ``||P^2 - P||`` must be at most ``tol`` in
    operator norm.
    """
    m = _square(p, "projection")
    for label, r in (("P - P^†", m - m.conj().T), ("P^2 - P", m @ m - m)):
        # Frobenius bounds the operator norm; only fall back to the eigensolver when it is inconclusive
        if np.linalg.norm(r) > tol:
            res = op_norm(r)
            if res > tol:
                raise ValidationError(f"not a projection: ||{label}|| = {res:.3e}")
    return _frozen((m + m.conj().T) / 2)


def identity(n):
    return _frozen(np.eye(n))


def zeros(n):
    return _frozen(np.zeros((n, n)))


def dagger(a):
    return np.asarray(a).conj().T


def commutator(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    return a @ b - b @ a


def complement(p):
    """``1 - P`` for a projection ``P``."""
    p = np.asarray(p)
    return _frozen(np.eye(p.shape[0]) - p)


def ket_projector(v):
    """Rank-one projection onto the span of ``v`` (normalized internally)."""
    v = np.asarray(v, dtype=complex).ravel()
    nrm = np.linalg.norm(v)
    if nrm == 0:
        raise ValidationError("cannot project onto the zero vector")
    v = v / nrm
    return _frozen(np.outer(v, v.conj()))


@dataclass(frozen=True, eq=False)
class State:
    """A normalized state: either a pure vector or a density matrix."""

    kind: str
    vector: np.ndarray = None
    rho: np.ndarray = None

    @classmethod
    def pure(cls, psi, tol=1e-12):
        v = np.array(psi, dtype=complex).ravel()
        if not np.all(np.isfinite(v)):
            raise ValidationError("state vector has non-finite entries")
        nrm = np.linalg.norm(v)
        if abs(nrm - 1.0) > tol:
            raise ValidationError(f"pure state must have unit norm, got {nrm!r}")
        v.flags.writeable = False
        return cls("pure", vector=v)

    @classmethod
    def density(cls, rho, tol=1e-12, psd_tol=1e-10):
        r = hermitian(rho, tol=tol)
        tr = np.trace(r).real
        if abs(tr - 1.0) > tol:
            raise ValidationError(f"density matrix must have unit trace, got {tr!r}")
        lo = eig_hermitian(r).all_eigenvalues[0]
        if lo < -psd_tol:
            raise ValidationError(f"density matrix has negative eigenvalue {lo:.3e}")
        return cls("density", rho=r)

    @classmethod
    def normalized(cls, psi):
        """Pure state from an unnormalized vector."""
        v = np.asarray(psi, dtype=complex).ravel()
        return cls.pure(v / np.linalg.norm(v))

    @property
    def dim(self):
        return self.vector.shape[0] if self.kind == "pure" else self.rho.shape[0]

    def density_matrix(self):
        if self.kind == "pure":
            return _frozen(np.outer(self.vector, self.vector.conj()))
        return self.rho

    def expect(self, op):
        """``ω(op)``: ``<ψ|op|ψ>`` or ``tr(ρ op)``, complex in general."""
        op = np.asarray(op)
        if op.shape != (self.dim, self.dim):
            raise DimensionError(f"operator shape {op.shape} does not match state dimension {self.dim}")
        if self.kind == "pure":
            return complex(np.vdot(self.vector, op @ self.vector))
        return complex(np.trace(self.rho @ op))


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigen-decomposition of a Hermitian operator, grouped into eigenvalue clusters.

    ``eigenvalues[k]`` is the mean of the ``k``-th cluster and
    ``eigenprojections[k]`` projects onto its eigenspace. The raw
    per-eigenvector data are kept in ``all_eigenvalues`` / ``eigenvectors``.
    """

    eigenvalues: np.ndarray
    eigenprojections: tuple
    multiplicities: tuple
    all_eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0

    def reconstruct(self):
        dim = self.all_eigenvalues.shape[0]
        out = np.zeros((dim, dim), dtype=complex)
        for lam, proj in zip(self.eigenvalues, self.eigenprojections):
            out += lam * proj
        return out


def eig_hermitian(a, tol_cluster=TOL_CLUSTER, max_dim=MAX_DIM, max_sweeps=MAX_SWEEPS):
    """Spectral decomposition of a Hermitian operator by cyclic Jacobi sweeps.

    Eigenvalues closer than ``tol_cluster`` to their neighbour are merged
    into one cluster with a single eigenprojection.

    Raises
    ------
    DimensionError
        Dimension exceeds ``max_dim``.
    ConvergenceError
        Off-diagonal residual still above threshold after ``max_sweeps``.
    """
    h = hermitian(a)
    n = h.shape[0]
    if n > max_dim:
        raise DimensionError(f"dimension {n} exceeds cap {max_dim}")
    w, v, sweeps, off = _kernels.jacobi_eigh(h, 1e-15, max_sweeps)
    if sweeps >= max_sweeps and off > 1e-15 * np.linalg.norm(h):
        raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps (off-diagonal norm {off:.3e})", off)
    order = np.argsort(w, kind="stable")
    w = w[order]
    v = v[:, order]

    values, projs, mults = [], [], []
    start = 0
    for i in range(1, n + 1):
        if i == n or w[i] - w[i - 1] > tol_cluster:
            block = v[:, start:i]
            values.append(float(np.mean(w[start:i])))
            projs.append(_frozen(block @ block.conj().T))
            mults.append(i - start)
            start = i
    w.flags.writeable = False
    v.flags.writeable = False
    vals = np.array(values)
    vals.flags.writeable = False
    return SpectralDecomposition(vals, tuple(projs), tuple(mults), w, v, int(sweeps))


def spectral_projection(a, interval, **kwargs):
    """Projection onto the eigenspaces of ``a`` with eigenvalue in the closed ``interval``."""
    lo, hi = interval
    if lo > hi:
        raise ValidationError(f"empty interval [{lo}, {hi}]")
    dec = eig_hermitian(a, **kwargs)
    out = np.zeros_like(dec.eigenprojections[0])
    for lam, proj in zip(dec.eigenvalues, dec.eigenprojections):
        if lo <= lam <= hi:
            out = out + proj
    return _frozen((out + out.conj().T) / 2)


def tensor(a, b, max_dim=MAX_DIM):
    """Kronecker product ``A ⊗ B``."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    rows = a.shape[0] * b.shape[0]
    cols = a.shape[1] * b.shape[1]
    if max(rows, cols) > max_dim:
        raise DimensionError(f"tensor product dimension {rows}x{cols} exceeds cap {max_dim}")
    return _frozen(np.kron(a, b))


def partial_trace(rho, dims, keep):
    """Reduce a bipartite operator on ``C^d1 ⊗ C^d2`` to factor ``keep`` (1 or 2)."""
    rho = np.asarray(rho, dtype=complex)
    d1, d2 = (int(d) for d in dims)
    if rho.shape != (d1 * d2, d1 * d2):
        raise DimensionError(f"dims {d1}x{d2} do not match operator shape {rho.shape}")
    t = rho.reshape(d1, d2, d1, d2)
    if keep == 1:
        out = np.einsum("ajbj->ab", t)
    elif keep == 2:
        out = np.einsum("iaib->ab", t)
    else:
        raise ValueError(f"keep must be 1 or 2, got {keep!r}")
    return _frozen(out)


def op_norm(a):
    """Largest singular value, via the eigenvalues of ``A^† A``."""
    a = np.asarray(a, dtype=complex)
    if a.size == 0:
        return 0.0
    g = a.conj().T @ a
    g = (g + g.conj().T) / 2
    top = eig_hermitian(g, tol_cluster=0.0).all_eigenvalues[-1]
    return float(np.sqrt(max(top, 0.0)))


def trace_norm(a):
    """Sum of absolute eigenvalues of a Hermitian operator."""
    return float(np.sum(np.abs(eig_hermitian(a, tol_cluster=0.0).all_eigenvalues)))


class UncertaintyResult(NamedTuple):
    lhs: float
    rhs: float
    holds: bool


def uncertainty_check(state, a, b, tol=1e-10):
    """Check ``ω(a²) ω(b²) ≥ ¼ |ω([a, b])|²`` for Hermitian ``a``, ``b``."""
    a = hermitian(a)
    b = hermitian(b)
    if a.shape != b.shape or a.shape[0] != state.dim:
        raise DimensionError(f"operator shapes {a.shape}, {b.shape} do not match state dimension {state.dim}")
    lhs = state.expect(a @ a).real * state.expect(b @ b).real
    rhs = 0.25 * abs(state.expect(commutator(a, b))) ** 2
    return UncertaintyResult(lhs, rhs, bool(lhs >= rhs - tol))
