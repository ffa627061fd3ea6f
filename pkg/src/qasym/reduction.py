"""Restriction of a channel to the support of its maximum-rank fixed point."""

from dataclasses import dataclass

import numpy as np

from qasym.channel import Channel
from qasym.errors import DimensionMismatch, ZeroSupport
from qasym.numerics import DEFAULT_TOL, dag, fix_phase
from qasym.spectral import max_rank_fixed_point


@dataclass(frozen=True)
class Reduction:
    H0_dim: int
    V: np.ndarray
    Q: np.ndarray
    reduced: Channel
    faithful: bool

    @property
    def dim(self):
        return self.V.shape[0]


def reduce(channel, spec, tol=DEFAULT_TOL):
    """Faithful reduced channel ``X -> V^dag Phi(V X V^dag) V`` on ``B(H0)``.

    ``V`` has the eigenvectors of ``P(I)`` with eigenvalue above
    ``psd_cut * d`` as columns, in descending eigenvalue order.
    """
    d = channel.dim
    PI = max_rank_fixed_point(spec)
    w, v = np.linalg.eigh(PI)
    order = np.argsort(-w, kind="stable")
    w, v = w[order], v[:, order]
    keep = w > tol.psd_cut * d
    if not np.any(keep):
        raise ZeroSupport("P(I) vanishes numerically")
    V = fix_phase(v[:, keep])
    d0 = V.shape[1]
    if d0 == d:
        V = np.eye(d, dtype=complex)
        return Reduction(d, V, V.copy(), channel, True)
    Q = V @ dag(V)
    if channel._kraus is not None:
        reduced = Channel(d0, kraus=[dag(V) @ K @ V for K in channel._kraus])
    else:
        S = np.kron(V.T, dag(V)) @ channel.superop @ np.kron(V.conj(), V)
        reduced = Channel(d0, superop=S)
    return Reduction(d0, V, Q, reduced, False)


def embed(red, X0):
    X0 = np.asarray(X0)
    if X0.shape != (red.H0_dim, red.H0_dim):
        raise DimensionMismatch(f"expected a {red.H0_dim}x{red.H0_dim} operator, got {X0.shape}")
    return red.V @ X0 @ dag(red.V)


def compress(red, X):
    return dag(red.V) @ X @ red.V


def embed_superop(red, S0):
    """Lift a superoperator on ``B(H0)`` to ``B(H)``: ``X -> V S0(V^dag X V) V^dag``."""
    V = red.V
    return np.kron(V.conj(), V) @ S0 @ np.kron(V.T, dag(V))
