"""Spectrum of a channel, its peripheral part and the associated projectors."""

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la

from qasym.numerics import (
    DEFAULT_TOL,
    cluster_values,
    dag,
    eig_general,
    fix_phase,
    hermitize,
    unvec,
    vec,
)


@dataclass(frozen=True)
class PeripheralCluster:
    """One peripheral eigenvalue with biorthogonal right/left eigenbases (``left^dag right = I``)."""

    value: complex
    right: np.ndarray
    left: np.ndarray
    gram_cond: float

    @property
    def multiplicity(self):
        return self.right.shape[1]

    @property
    def projector(self):
        return self.right @ dag(self.left)


@dataclass(frozen=True)
class SpectralData:
    dim: int
    eigenvalues: np.ndarray
    peripheral_indices: np.ndarray
    clusters: tuple
    asymptotic_projector: np.ndarray
    fixed_projector: np.ndarray
    diagnostics: list = field(default_factory=list)

    @property
    def peripheral_eigenvalues(self):
        return self.eigenvalues[self.peripheral_indices]

    @property
    def subperipheral_radius(self):
        mask = np.ones(self.eigenvalues.size, bool)
        mask[self.peripheral_indices] = False
        return float(np.abs(self.eigenvalues[mask]).max(initial=0.0))

    @property
    def attractor_dim(self):
        return int(self.peripheral_indices.size)


def _null_pair(A, k):
    """Orthonormal bases for the ``k``-dimensional right and left (approximate) kernels of ``A``."""
    U, _, Vh = np.linalg.svd(A)
    return dag(Vh[-k:, :]), U[:, -k:]


def _invariant_subspace(S, inside):
    _, Z, sdim = la.schur(S, output="complex", sort=inside)
    return Z[:, :sdim]


def spectrum(channel, tol=DEFAULT_TOL):
    """Eigenvalues, peripheral eigenspaces and the projectors onto Attr and Fix.

    The attractor projector is built from the ordered Schur forms of the
    superoperator and of its adjoint, so it is exact even if the transient
    part of the spectrum is defective. Peripheral eigenvalues are semisimple
    for CPTP maps, so each peripheral cluster gets biorthonormal eigenbases
    from the kernel of ``S - lambda``; an ill-conditioned pair is reported in
    ``diagnostics`` rather than silently accepted.
    """
    S = channel.superop
    n = S.shape[0]
    values = eig_general(S, tol).values
    peripheral = np.flatnonzero(np.abs(np.abs(values) - 1) <= tol.peripheral_cut)

    diagnostics = []
    clusters = []
    for idx in cluster_values(values[peripheral], tol.degeneracy_gap):
        members = peripheral[idx]
        lam = values[members].mean()
        R, L = _null_pair(S - lam * np.eye(n), members.size)
        G = dag(L) @ R
        cond = float(np.linalg.cond(G))
        if cond > 1e6:
            diagnostics.append(f"ill-conditioned biorthogonalization at {lam:.6g} (cond {cond:.2e})")
            warnings.warn(diagnostics[-1], RuntimeWarning, stacklevel=2)
        R = fix_phase(R)
        L = L @ dag(np.linalg.inv(dag(L) @ R))
        clusters.append(PeripheralCluster(complex(lam), R, L, cond))
    clusters.sort(key=lambda c: (round(np.angle(c.value) % (2 * np.pi), 9), -c.multiplicity))

    inside = lambda z: abs(z) > 1 - tol.peripheral_cut  # noqa: E731
    R = _invariant_subspace(S, inside)
    L = _invariant_subspace(dag(S), inside)
    if R.shape[1]:
        P_attr = R @ np.linalg.solve(dag(L) @ R, dag(L))
    else:
        P_attr = np.zeros_like(S)

    one = [c for c in clusters if abs(c.value - 1) <= tol.peripheral_cut]
    P_fix = sum((c.projector for c in one), np.zeros_like(S))
    return SpectralData(channel.dim, values, peripheral, tuple(clusters), P_attr, P_fix, diagnostics)


def attractor_basis(spec):
    """Unvectorized right eigenvectors of the peripheral eigenvalues, cluster by cluster."""
    d = spec.dim
    return [unvec(c.right[:, j], d) for c in spec.clusters for j in range(c.multiplicity)]


def attractor_eigenvalues(spec):
    return [c.value for c in spec.clusters for _ in range(c.multiplicity)]


def fixed_basis(spec, tol=DEFAULT_TOL):
    d = spec.dim
    return [unvec(c.right[:, j], d) for c in spec.clusters
            if abs(c.value - 1) <= tol.peripheral_cut for j in range(c.multiplicity)]


def gram_condition(mats):
    if not mats:
        return 1.0
    B = np.array([vec(m) for m in mats]).T
    return float(np.linalg.cond(dag(B) @ B))


def attractor_orthobasis(spec):
    """HS-orthonormal basis of Attr as columns of a ``d^2 x dim(Attr)`` matrix."""
    if spec.attractor_dim == 0:
        return np.zeros((spec.dim ** 2, 0), dtype=complex)
    B = np.hstack([c.right for c in spec.clusters])
    Q, _ = np.linalg.qr(B)
    return Q


def max_rank_fixed_point(spec):
    """``P(I)``, Hermitized. Its support carries every fixed point."""
    d = spec.dim
    return hermitize(unvec(spec.fixed_projector @ vec(np.eye(d)), d))


def cesaro_fixed_oracle(channel, N):
    """``(1/N) sum_{n=1..N} S^n`` by plain iteration; independent of any eigen-solver."""
    S = channel.superop
    acc = np.zeros_like(S)
    P = np.eye(S.shape[0], dtype=complex)
    for _ in range(N):
        P = P @ S
        acc += P
    return acc / N
