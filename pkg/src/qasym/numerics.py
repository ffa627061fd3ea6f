"""Dense complex linear-algebra kernels shared by every other module.

Conventions used throughout the package:

* ``vec`` stacks columns, so ``vec(A @ X @ B) == kron(B.T, A) @ vec(X)``.
* Eigenvectors carry a deterministic phase: their largest-magnitude entry is
  real and positive.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg as la

from qasym.errors import (
    BranchCut,
    DimensionMismatch,
    NonConvergence,
    NotHermitian,
    NotPositiveDefinite,
    SingularChannel,
)


@dataclass(frozen=True)
class Tolerances:
    eig_residual: float = 1e-10
    peripheral_cut: float = 1e-8
    psd_cut: float = 1e-10
    recon: float = 1e-8
    degeneracy_gap: float = 1e-6

    def __post_init__(self):
        for name in ("eig_residual", "peripheral_cut", "psd_cut", "recon", "degeneracy_gap"):
            if not getattr(self, name) > 0:
                raise ValueError(f"tolerance {name} must be strictly positive")
        if not self.peripheral_cut > self.eig_residual:
            raise ValueError("peripheral_cut must exceed eig_residual")


DEFAULT_TOL = Tolerances()


# ---------------------------------------------------------------------------
# vectorization and small helpers
# ---------------------------------------------------------------------------

def vec(X):
    return np.asarray(X).reshape(-1, order="F")


def unvec(v, rows=None):
    v = np.asarray(v)
    if rows is None:
        rows = int(round(np.sqrt(v.size)))
    if v.size % rows:
        raise DimensionMismatch(f"cannot reshape vector of size {v.size} with {rows} rows")
    return v.reshape((rows, v.size // rows), order="F")


def dag(A):
    return np.conj(np.swapaxes(A, -1, -2))


def hermitize(A):
    return 0.5 * (A + dag(A))


def as_square(A, name="matrix"):
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} has non-finite entries")
    return A


def fix_phase(v):
    """Rotate ``v`` (vector or matrix columns) so the largest-magnitude entry is real positive."""
    v = np.array(v, dtype=complex)
    if v.ndim == 1:
        i = np.argmax(np.abs(v).round(12))
        if abs(v[i]) > 0:
            v = v * (abs(v[i]) / v[i])
        return v
    for j in range(v.shape[1]):
        v[:, j] = fix_phase(v[:, j])
    return v


def partial_trace(Y, dims, keep):
    """Partial trace of a bipartite matrix on ``C^dims[0] (x) C^dims[1]``.

    ``keep=0`` traces out the second factor, ``keep=1`` the first.
    """
    d1, d2 = dims
    T = np.asarray(Y).reshape(d1, d2, d1, d2)
    if keep == 0:
        return np.einsum("iaja->ij", T)
    return np.einsum("iaib->ab", T)


def orth(A, rtol=1e-10):
    """Orthonormal basis of the column span of ``A`` (rank cut relative to the top singular value)."""
    A = np.asarray(A)
    if A.size == 0:
        return np.zeros((A.shape[0], 0), dtype=complex)
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return np.zeros((A.shape[0], 0), dtype=complex)
    return U[:, s > rtol * s[0]]


def span_residual(Q, x, scale=None):
    """Distance of ``x`` from the span of orthonormal columns ``Q``, relative to ``scale`` (default ``|x|``)."""
    x = np.asarray(x)
    r = x - Q @ (dag(Q) @ x)
    scale = np.linalg.norm(x) if scale is None else scale
    return np.linalg.norm(r) / scale if scale > 0 else 0.0


def hermitian_basis(mats, rtol=1e-9):
    """HS-orthonormal Hermitian basis of the real span of Hermitian/anti-Hermitian parts of ``mats``.

    For a complex subspace closed under ``X -> X^dagger`` the returned list has
    the same length as the complex dimension.
    """
    mats = [np.asarray(m, dtype=complex) for m in mats]
    if not mats:
        return []
    n = mats[0].shape[0]
    parts = []
    for m in mats:
        parts.append(hermitize(m))
        parts.append((m - dag(m)) / 2j)
    R = np.array([np.concatenate([vec(p).real, vec(p).imag]) for p in parts]).T
    Q = orth(R, rtol)
    half = n * n
    out = []
    for j in range(Q.shape[1]):
        H = unvec(Q[:half, j] + 1j * Q[half:, j], n)
        out.append(hermitize(H))
    return out


def cluster_values(values, gap):
    """Group complex numbers whose single-linkage distance is at most ``gap``.

    Returns a list of index arrays, ordered by first appearance.
    """
    values = np.asarray(values)
    n = values.size
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(values[i] - values[j]) <= gap:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return [np.array(g) for g in sorted(groups.values(), key=lambda g: g[0])]


# ---------------------------------------------------------------------------
# eigendecompositions
# ---------------------------------------------------------------------------

class EigResult(NamedTuple):
    values: np.ndarray
    right: np.ndarray
    left: np.ndarray


def eig_general(A, tol=DEFAULT_TOL):
    """Eigenvalues with right and left eigenvectors of a square complex matrix.

    Left/right pairs are biorthogonalized inside each eigenvalue cluster
    (clusters use the absolute gap ``tol.degeneracy_gap``) so that
    ``left[:, i].conj() @ right[:, j] == delta_ij`` within a cluster. Clusters
    whose overlap matrix is ill-conditioned (defective eigenvalues) are left
    as returned by LAPACK; only their eigenvalues are reliable.
    """
    A = as_square(A)
    n = A.shape[0]
    try:
        w, vl, vr = la.eig(A, left=True, right=True)
    except la.LinAlgError as exc:
        raise NonConvergence(str(exc)) from exc
    vr = fix_phase(vr)
    scale = max(np.linalg.norm(A, 2), 1.0)
    res = np.linalg.norm(A @ vr - vr * w, axis=0)
    if n and res.max() > 1e3 * tol.eig_residual * scale:
        raise NonConvergence(f"eigen-residual {res.max():.3e} too large")
    for idx in cluster_values(w, tol.degeneracy_gap):
        R = vr[:, idx]
        L = vl[:, idx]
        G = dag(L) @ R
        if np.linalg.cond(G) < 1e6:
            vl[:, idx] = L @ dag(np.linalg.inv(G))
    return EigResult(w, vr, vl)


def eig_hermitian(A, tol=DEFAULT_TOL):
    """Ascending real eigenvalues and orthonormal eigenvectors with fixed phases."""
    A = as_square(A)
    scale = max(np.linalg.norm(A, 2), 1.0)
    if np.linalg.norm(A - dag(A), 2) > tol.eig_residual * scale:
        raise NotHermitian("matrix is not Hermitian within eig_residual")
    w, v = np.linalg.eigh(hermitize(A))
    return w, fix_phase(v)


def herm_power(sigma, z, tol=DEFAULT_TOL):
    """``sigma**z`` for a positive definite ``sigma`` by eigenbasis functional calculus."""
    w, v = eig_hermitian(sigma, tol)
    if w.size and w[0] <= tol.psd_cut:
        raise NotPositiveDefinite(f"minimum eigenvalue {w[0]:.3e} is not above psd_cut")
    f = np.exp(complex(z) * np.log(w))
    return (v * f) @ dag(v)


def herm_log(sigma, tol=DEFAULT_TOL):
    w, v = eig_hermitian(sigma, tol)
    if w.size and w[0] <= tol.psd_cut:
        raise NotPositiveDefinite(f"minimum eigenvalue {w[0]:.3e} is not above psd_cut")
    return (v * np.log(w)) @ dag(v)


def principal_log(A, tol=DEFAULT_TOL):
    """Principal matrix logarithm.

    Raises :class:`SingularChannel` for a (numerically) singular input and
    :class:`BranchCut` when an eigenvalue lies within ``degeneracy_gap`` of the
    negative real axis, where the principal branch is undefined or unstable.
    """
    A = as_square(A)
    w = la.eigvals(A)
    scale = max(np.linalg.norm(A, 2), 1.0)
    if np.min(np.abs(w)) <= tol.degeneracy_gap * scale:
        raise SingularChannel("matrix is singular; no logarithm exists")
    near_cut = (w.real < 0) & (np.abs(w.imag) <= tol.degeneracy_gap)
    if np.any(near_cut):
        raise BranchCut(f"eigenvalue {w[near_cut][0]:.6g} on the negative real axis")
    L = la.logm(A)
    if np.linalg.norm(la.expm(L) - A, 2) > 1e-8 * scale:
        raise NonConvergence("logm did not reproduce its input")
    return L
