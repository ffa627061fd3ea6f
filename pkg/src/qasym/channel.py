"""Quantum channels: representations, conversions, validation and algebra.

A :class:`Channel` stores whichever of the Kraus, Choi or superoperator
representations it was built from and derives the others lazily. Choi matrices
are unnormalized, ``choi = sum_ij E_ij (x) Phi(E_ij)``, and superoperators act
on column-stacked vectors (see :mod:`qasym.numerics`).
"""

import threading
from dataclasses import dataclass

import numpy as np

from qasym.errors import DimensionMismatch
from qasym.numerics import DEFAULT_TOL, dag, hermitize, unvec, vec


# ---------------------------------------------------------------------------
# representation conversions
# ---------------------------------------------------------------------------

def kraus_to_superop(kraus):
    return sum(np.kron(K.conj(), K) for K in kraus)


def superop_to_choi(S):
    d = int(round(np.sqrt(S.shape[0])))
    T = S.reshape((d, d, d, d), order="F")  # T[a, b, i, j] = Phi(E_ij)[a, b]
    return T.transpose(2, 0, 3, 1).reshape(d * d, d * d)


def choi_to_superop(C):
    d = int(round(np.sqrt(C.shape[0])))
    T = C.reshape(d, d, d, d).transpose(1, 3, 0, 2)
    return T.reshape((d * d, d * d), order="F")


def choi_to_kraus(C, cut=1e-12):
    """Kraus operators from the eigendecomposition of a (PSD) Choi matrix."""
    d = int(round(np.sqrt(C.shape[0])))
    w, v = np.linalg.eigh(hermitize(C))
    keep = w > cut * max(1.0, w.max(initial=0.0))
    ops = [np.sqrt(wi) * vi.reshape(d, d).T for wi, vi in zip(w[keep][::-1], v[:, keep].T[::-1])]
    return ops or [np.zeros((d, d), dtype=complex)]


def superop_of_map(fn, d):
    """Superoperator matrix of an arbitrary linear map ``fn`` on d x d matrices."""
    S = np.zeros((d * d, d * d), dtype=complex)
    for c in range(d * d):
        E = np.zeros(d * d, dtype=complex)
        E[c] = 1.0
        S[:, c] = vec(fn(unvec(E, d)))
    return S


class Channel:
    """A linear map on ``B(C^d)`` held in one or more interconvertible forms.

    Construction does not validate; call :func:`validate` for that. Instances
    are treated as immutable: cached representations are filled once under a
    lock and never modified afterwards.
    """

    def __init__(self, dim, kraus=None, choi=None, superop=None):
        if kraus is None and choi is None and superop is None:
            raise ValueError("at least one representation is required")
        self.dim = int(dim)
        d = self.dim
        self._kraus = None if kraus is None else tuple(np.asarray(K, dtype=complex) for K in kraus)
        self._choi = None if choi is None else np.asarray(choi, dtype=complex)
        self._superop = None if superop is None else np.asarray(superop, dtype=complex)
        self._lock = threading.Lock()
        if self._kraus is not None and any(K.shape != (d, d) for K in self._kraus):
            raise DimensionMismatch("Kraus operators must be d x d")
        for M in (self._choi, self._superop):
            if M is not None and M.shape != (d * d, d * d):
                raise DimensionMismatch("Choi/superoperator matrices must be d^2 x d^2")

    @classmethod
    def from_kraus(cls, kraus):
        kraus = [np.asarray(K, dtype=complex) for K in kraus]
        if not kraus:
            raise ValueError("empty Kraus list")
        return cls(kraus[0].shape[0], kraus=kraus)

    @classmethod
    def from_choi(cls, choi):
        choi = np.asarray(choi, dtype=complex)
        return cls(int(round(np.sqrt(choi.shape[0]))), choi=choi)

    @classmethod
    def from_superop(cls, superop):
        superop = np.asarray(superop, dtype=complex)
        return cls(int(round(np.sqrt(superop.shape[0]))), superop=superop)

    @classmethod
    def identity(cls, d):
        return cls.from_kraus([np.eye(d)])

    @property
    def superop(self):
        if self._superop is None:
            with self._lock:
                if self._superop is None:
                    if self._kraus is not None:
                        self._superop = kraus_to_superop(self._kraus)
                    else:
                        self._superop = choi_to_superop(self._choi)
        return self._superop

    @property
    def choi(self):
        if self._choi is None:
            S = self.superop
            with self._lock:
                if self._choi is None:
                    self._choi = superop_to_choi(S)
        return self._choi

    @property
    def kraus(self):
        if self._kraus is None:
            C = self.choi
            with self._lock:
                if self._kraus is None:
                    self._kraus = tuple(choi_to_kraus(C))
        return list(self._kraus)

    def __call__(self, X):
        return apply(self, X)

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim})"


class AdjointChannel(Channel):
    """Heisenberg-picture map: completely positive and unital."""


@dataclass(frozen=True)
class ValidationReport:
    cp: bool
    tp: bool
    min_choi_eig: float
    tp_defect: float

    @property
    def ok(self):
        return self.cp and self.tp


def tp_defect(channel):
    d = channel.dim
    if channel._kraus is not None:
        M = sum(dag(K) @ K for K in channel._kraus)
    else:
        # sum_a Choi[(i,a),(j,a)] = (sum K^dag K)^T
        M = np.einsum("iaja->ij", channel.choi.reshape(d, d, d, d)).T
    return float(np.linalg.norm(M - np.eye(d), 2))


def validate(channel, tol=DEFAULT_TOL):
    d = channel.dim
    for name, M, shape in (("choi", channel._choi, (d * d, d * d)),
                           ("superop", channel._superop, (d * d, d * d))):
        if M is not None and M.shape != shape:
            raise DimensionMismatch(f"{name} has shape {M.shape}, expected {shape}")
    min_eig = float(np.linalg.eigvalsh(hermitize(channel.choi)).min())
    defect = tp_defect(channel)
    return ValidationReport(cp=min_eig >= -tol.psd_cut, tp=defect <= tol.psd_cut,
                            min_choi_eig=min_eig, tp_defect=defect)


def adjoint(channel):
    """Adjoint with respect to the Hilbert-Schmidt inner product."""
    cls = Channel if isinstance(channel, AdjointChannel) else AdjointChannel
    if channel._kraus is not None:
        return cls(channel.dim, kraus=[dag(K) for K in channel._kraus],
                   superop=dag(channel.superop))
    return cls(channel.dim, superop=dag(channel.superop))


def _check_same_dim(a, b):
    if a.dim != b.dim:
        raise DimensionMismatch(f"dimension mismatch: {a.dim} vs {b.dim}")


def compose(phi, psi):
    """``phi o psi`` (apply ``psi`` first)."""
    _check_same_dim(phi, psi)
    return Channel(phi.dim, superop=phi.superop @ psi.superop)


def power(channel, n):
    if n < 0:
        raise ValueError("power must be non-negative")
    d = channel.dim
    result = np.eye(d * d, dtype=complex)
    base = channel.superop
    while n:
        if n & 1:
            result = result @ base
        base = base @ base
        n >>= 1
    return Channel(d, superop=result)


def apply(channel, X):
    X = np.asarray(X, dtype=complex)
    if X.shape != (channel.dim, channel.dim):
        raise DimensionMismatch(f"operand shape {X.shape} does not match channel dim {channel.dim}")
    return unvec(channel.superop @ vec(X), channel.dim)


def channels_close(a, b, atol=1e-9):
    """Canonical comparison: superoperators agree entrywise within ``atol``."""
    return a.dim == b.dim and np.abs(a.superop - b.superop).max() <= atol


def random_channel(dim, kraus_rank, seed=None):
    """Random CPTP map from a Gaussian Stinespring isometry C^d -> C^(d r)."""
    if not 1 <= kraus_rank <= dim * dim:
        raise ValueError("kraus_rank must lie in [1, dim^2]")
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((dim * kraus_rank, dim)) + 1j * rng.standard_normal((dim * kraus_rank, dim))
    Q, R = np.linalg.qr(G)
    Q = Q * (np.diag(R) / np.abs(np.diag(R)))
    return Channel.from_kraus([Q[i * dim:(i + 1) * dim, :] for i in range(kraus_rank)])


def random_unitary(dim, rng):
    G = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    Q, R = np.linalg.qr(G)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_density(dim, rng, rank=None):
    rank = dim if rank is None else rank
    G = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = G @ dag(G)
    return rho / np.trace(rho).real


# ---------------------------------------------------------------------------
# standard channels used as fixtures and in demos
# ---------------------------------------------------------------------------

def unitary_channel(U):
    return Channel.from_kraus([np.asarray(U, dtype=complex)])


def depolarizing(p, d=2):
    """``X -> (1 - p) X + p tr(X) I/d``."""
    kraus = [np.sqrt(1 - p) * np.eye(d)] if p < 1 else []
    for a in range(d):
        for b in range(d):
            E = np.zeros((d, d))
            E[a, b] = np.sqrt(p / d)
            kraus.append(E)
    return Channel.from_kraus(kraus)


def dephasing(d=2):
    """Complete dephasing in the computational basis, ``X -> sum_i P_i X P_i``."""
    ops = []
    for i in range(d):
        P = np.zeros((d, d))
        P[i, i] = 1.0
        ops.append(P)
    return Channel.from_kraus(ops)


def amplitude_damping(gamma):
    K0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1 - gamma)]])
    K1 = np.array([[0.0, np.sqrt(gamma)], [0.0, 0.0]])
    return Channel.from_kraus([K0, K1])


def replacement(rho):
    """``X -> tr(X) rho``."""
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[0]
    w, v = np.linalg.eigh(hermitize(rho))
    ops = []
    for k in range(d):
        if w[k] <= 0:
            continue
        for j in range(d):
            ops.append(np.sqrt(w[k]) * np.outer(v[:, k], np.eye(d)[j]))
    return Channel.from_kraus(ops)


def classical_swap(d=2):
    """Cyclic shift of the computational basis that destroys coherences: ``|i><i| -> |i+1><i+1|``."""
    ops = []
    for i in range(d):
        E = np.zeros((d, d))
        E[(i + 1) % d, i] = 1.0
        ops.append(E)
    return Channel.from_kraus(ops)
