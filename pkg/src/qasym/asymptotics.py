"""Peripheral channel, unitarity of the asymptotic dynamics and channel synthesis."""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la

from qasym.channel import Channel, apply, superop_to_choi, validate
from qasym.errors import BranchCut, InvalidSpec, InvalidState, SingularChannel
from qasym.numerics import DEFAULT_TOL, dag, hermitize, orth, principal_log, unvec, vec
from qasym.spectral import attractor_orthobasis
from qasym.structure import (
    Block,
    BlockDecomposition,
    PeripheralAction,
    decomposition_attractor_basis,
    reconstruct_peripheral,
)


def peripheral_channel(channel, spec):
    """Superoperator of ``Phi_P = Phi o P_Attr``."""
    return channel.superop @ spec.asymptotic_projector


def is_idempotent(channel, tol=DEFAULT_TOL):
    S = channel.superop
    return bool(np.linalg.norm(S @ S - S, 2) <= tol.recon)


def hs_isometry_defect(channel, spec):
    """How far ``Phi`` is from preserving Hilbert-Schmidt norms on Attr (0 for an isometry)."""
    Q = attractor_orthobasis(spec)
    if Q.shape[1] == 0:
        return 0.0
    SQ = channel.superop @ Q
    return float(np.linalg.norm(dag(SQ) @ SQ - np.eye(Q.shape[1]), 2))


# ---------------------------------------------------------------------------
# unitarity certificate
# ---------------------------------------------------------------------------

@dataclass
class UnitarityCertificate:
    unitary: bool
    witness_U: np.ndarray = None
    violations: list = field(default_factory=list)
    residual: float = None


def _eig_desc(rho):
    w, v = np.linalg.eigh(hermitize(rho))
    return w[::-1], v[:, ::-1]


def certify_unitary(D, A, tol=DEFAULT_TOL, channel=None):
    """Decide whether the peripheral action is conjugation by a single unitary on ``H0``.

    That happens exactly when every ``rho_k`` is unitarily equivalent to
    ``rho_pi(k)``. A positive answer carries the witness
    ``U = sum_k W_k (U_k (x) V_k) W_pi(k)^dag``, checked on the attractor
    against ``channel`` if given and otherwise against the reconstructed
    peripheral map.
    """
    violations = []
    for k, j in enumerate(A.pi):
        bk, bj = D.blocks[k], D.blocks[j]
        if bk.m != bj.m:
            violations.append({"block": k, "reason": "multiplicity_mismatch",
                               "detail": f"m_{k + 1}={bk.m} but m_pi({k + 1})={bj.m}"})
            continue
        gap = float(np.abs(_eig_desc(bk.rho)[0] - _eig_desc(bj.rho)[0]).max())
        if gap > tol.degeneracy_gap:
            violations.append({"block": k, "reason": "spectrum_mismatch",
                               "detail": f"sorted spectra differ by {gap:.3e}"})
    if violations:
        return UnitarityCertificate(False, None, violations)

    U = np.zeros((D.dim, D.dim), dtype=complex)
    for k, j in enumerate(A.pi):
        bk, bj = D.blocks[k], D.blocks[j]
        Vk = _eig_desc(bk.rho)[1] @ dag(_eig_desc(bj.rho)[1])
        U += bk.W @ np.kron(A.U[k], Vk) @ dag(bj.W)

    S = channel.superop if channel is not None else reconstruct_peripheral(D, A)
    residual = 0.0
    for X in decomposition_attractor_basis(D):
        Y = unvec(S @ vec(X), D.dim)
        residual = max(residual, np.linalg.norm(Y - U @ X @ dag(U)) / np.linalg.norm(X))
    return UnitarityCertificate(residual <= tol.recon, U, [], float(residual))


def extend_witness(red, U0):
    """``I_0 (+) U0`` on the full space: identity on the complement of ``H0``."""
    V = red.V
    return V @ U0 @ dag(V) + (np.eye(V.shape[0]) - V @ dag(V))


# ---------------------------------------------------------------------------
# Markovianity (principal branch only)
# ---------------------------------------------------------------------------

def gkls_superop(H, jumps):
    """Superoperator of ``X -> -i[H, X] + sum_A (A X A^dag - {A^dag A, X}/2)``."""
    H = np.asarray(H, dtype=complex)
    d = H.shape[0]
    I = np.eye(d)
    L = -1j * (np.kron(I, H) - np.kron(H.T, I))
    for A in jumps:
        A = np.asarray(A, dtype=complex)
        AA = dag(A) @ A
        L = L + np.kron(A.conj(), A) - 0.5 * np.kron(I, AA) - 0.5 * np.kron(AA.T, I)
    return L


@dataclass
class MarkovResult:
    verdict: str
    generator: np.ndarray = None
    checks: dict = field(default_factory=dict)


def markov_principal_branch_test(channel, tol=DEFAULT_TOL):
    """Is the principal logarithm of the channel a GKLS generator?

    ``"markovian"`` is conclusive. ``"not_principal_branch"`` only says the
    principal branch fails; other branches of the logarithm are not tried.
    ``"inconclusive"`` covers singular channels and eigenvalues on the
    negative real axis.
    """
    d = channel.dim
    try:
        L = principal_log(channel.superop, tol)
    except (BranchCut, SingularChannel) as exc:
        return MarkovResult("inconclusive", None, {"reason": str(exc)})

    herm = 0.0
    for c in range(d * d):
        E = unvec(np.eye(d * d)[c], d)
        herm = max(herm, np.abs(unvec(L @ vec(dag(E)), d) - dag(unvec(L @ vec(E), d))).max())
    trace = float(np.abs(vec(np.eye(d)).conj() @ L).max())
    omega = vec(np.eye(d)) / np.sqrt(d)  # sum_i |i>|i>, same index order as the Choi matrix
    P = np.eye(d * d) - np.outer(omega, omega)
    ccp = float(np.linalg.eigvalsh(hermitize(P @ superop_to_choi(L) @ P)).min())
    checks = {"hermiticity_defect": float(herm), "trace_defect": trace, "min_projected_choi": ccp}
    scale = max(1.0, np.linalg.norm(L, 2))
    ok = herm <= tol.recon * scale and trace <= tol.recon * scale and ccp >= -tol.psd_cut * scale
    return MarkovResult("markovian" if ok else "not_principal_branch", L, checks)


# ---------------------------------------------------------------------------
# synthesis of a channel with a prescribed peripheral structure
# ---------------------------------------------------------------------------

def canonical_embedding(dims, mults, total_dim):
    """Block isometries placing block ``k`` on consecutive basis vectors of ``C^total_dim``."""
    out = []
    start = 0
    for d, m in zip(dims, mults):
        W = np.zeros((total_dim, d * m), dtype=complex)
        W[start:start + d * m, :] = np.eye(d * m)
        out.append(W)
        start += d * m
    return out


def _check_spec(D, A, total_dim, tol):
    if D.M == 0:
        raise InvalidSpec("at least one block is required")
    if sum(b.d * b.m for b in D.blocks) > total_dim:
        raise InvalidSpec("blocks do not fit into the requested dimension")
    if sorted(A.pi) != list(range(D.M)):
        raise InvalidSpec("pi is not a permutation of the block labels")
    if len(A.U) != D.M:
        raise InvalidSpec("one unitary per block is required")
    for k, b in enumerate(D.blocks):
        if b.W.shape != (total_dim, b.d * b.m):
            raise InvalidSpec(f"W_{k + 1} has shape {b.W.shape}")
        rho = np.asarray(b.rho)
        if rho.shape != (b.m, b.m) or np.abs(rho - dag(rho)).max() > tol.psd_cut:
            raise InvalidSpec(f"rho_{k + 1} must be a Hermitian {b.m}x{b.m} matrix")
        if np.linalg.eigvalsh(hermitize(rho))[0] <= tol.psd_cut or abs(np.trace(rho) - 1) > 1e-9:
            raise InvalidSpec(f"rho_{k + 1} must be positive definite with unit trace")
        if D.blocks[A.pi[k]].d != b.d:
            raise InvalidSpec(f"pi maps block {A.pi[k] + 1} onto block {k + 1} of different size")
        Uk = np.asarray(A.U[k])
        if Uk.shape != (b.d, b.d) or np.abs(dag(Uk) @ Uk - np.eye(b.d)).max() > 1e-9:
            raise InvalidSpec(f"U_{k + 1} must be a {b.d}x{b.d} unitary")
    W = np.hstack([b.W for b in D.blocks])
    if np.abs(dag(W) @ W - np.eye(W.shape[1])).max() > 1e-9:
        raise InvalidSpec("block isometries must be orthonormal and mutually orthogonal")


def synthesize_extension(D, A, total_dim, tol=DEFAULT_TOL):
    """A CPTP map on ``B(C^total_dim)`` whose attractor and peripheral action are ``(D, A)``.

    The channel is ``Phi_P o E`` where ``E`` compresses onto each block, traces
    out the multiplicity factor and re-prepares ``rho_k`` there, while weight
    outside the blocks is sent to the maximally mixed element of block 1.
    ``E`` fixes the prescribed attractor pointwise, so the composition has it
    as its full attractor (all other eigenvalues vanish).
    """
    _check_spec(D, A, total_dim, tol)
    kraus = []
    for k, j in enumerate(A.pi):
        bk, bj = D.blocks[k], D.blocks[j]
        r, e = np.linalg.eigh(hermitize(bk.rho))
        for a in range(bk.m):
            for b in range(bj.m):
                mid = np.kron(A.U[k], np.sqrt(r[a]) * np.outer(e[:, a], np.eye(bj.m)[b]))
                kraus.append(bk.W @ mid @ dag(bj.W))

    Wall = np.hstack([b.W for b in D.blocks])
    if Wall.shape[1] < total_dim:
        perp = orth(np.eye(total_dim) - Wall @ dag(Wall))
        k_in = A.pi.index(0)
        bk = D.blocks[k_in]
        tau = bk.W @ np.kron(np.eye(bk.d) / bk.d, bk.rho) @ dag(bk.W)
        t, g = np.linalg.eigh(hermitize(tau))
        for c in np.flatnonzero(t > 1e-14):
            for e in range(perp.shape[1]):
                kraus.append(np.sqrt(t[c]) * np.outer(g[:, c], perp[:, e].conj()))

    channel = Channel.from_kraus(kraus)
    report = validate(channel, tol)
    if not report.ok:
        raise InvalidSpec(f"synthesized map is not CPTP: {report}")
    R = reconstruct_peripheral(D, A)
    for X in decomposition_attractor_basis(D):
        err = np.linalg.norm(apply(channel, X) - unvec(R @ vec(X), total_dim))
        if err > tol.recon * np.linalg.norm(X):
            raise InvalidSpec(f"synthesized channel misses the prescribed action ({err:.2e})")
    return channel


def spec_from_arrays(dims, mults, rhos, pi, U, total_dim, W=None):
    """Convenience constructor for a synthesis spec with optional block isometries."""
    W = canonical_embedding(dims, mults, total_dim) if W is None else W
    blocks = tuple(Block(int(d), int(m), np.asarray(w, dtype=complex), np.asarray(r, dtype=complex))
                   for d, m, w, r in zip(dims, mults, W, rhos))
    return BlockDecomposition(blocks), PeripheralAction(tuple(int(p) for p in pi),
                                                         tuple(np.asarray(u, dtype=complex) for u in U))


def random_spec(rng, max_blocks=3, max_d=3, max_m=2, max_dim=10, rotate=True):
    """Random synthesis spec: block sizes, states, a size-compatible permutation and unitaries."""
    from qasym.channel import random_density, random_unitary

    while True:
        M = int(rng.integers(1, max_blocks + 1))
        dims = [int(rng.integers(1, max_d + 1)) for _ in range(M)]
        mults = [int(rng.integers(1, max_m + 1)) for _ in range(M)]
        used = sum(d * m for d, m in zip(dims, mults))
        if used <= max_dim:
            break
    total = int(rng.integers(used, max_dim + 1))
    pi = list(range(M))
    for size in set(dims):
        members = [k for k in range(M) if dims[k] == size]
        perm = rng.permutation(members)
        for k, j in zip(members, perm):
            pi[k] = int(j)
    rhos = [random_density(m, rng) for m in mults]
    U = [random_unitary(d, rng) for d in dims]
    W = canonical_embedding(dims, mults, total)
    if rotate:
        G = random_unitary(total, rng)
        W = [G @ w for w in W]
    return spec_from_arrays(dims, mults, rhos, pi, U, total, W), total


# ---------------------------------------------------------------------------
# trajectories
# ---------------------------------------------------------------------------

def _check_state(rho, tol, label):
    atol = 10 * tol.psd_cut
    if np.abs(rho - dag(rho)).max() > atol or abs(np.trace(rho) - 1) > atol:
        raise InvalidState(f"{label} is not a Hermitian unit-trace matrix")
    if np.linalg.eigvalsh(hermitize(rho))[0] < -atol:
        raise InvalidState(f"{label} is not positive semidefinite")


def trajectory(channel, rho0, n_max, tol=DEFAULT_TOL):
    """``[rho0, Phi(rho0), ..., Phi^n_max(rho0)]``, each checked to be a density matrix."""
    rho = np.asarray(rho0, dtype=complex)
    _check_state(rho, tol, "initial state")
    out = [rho]
    for n in range(1, n_max + 1):
        rho = apply(channel, rho)
        _check_state(rho, tol, f"state at step {n}")
        out.append(rho)
    return out


def trace_distance(a, b):
    return 0.5 * float(np.abs(np.linalg.eigvalsh(hermitize(a - b))).sum())


def expm_superop(L):
    return Channel.from_superop(la.expm(L))
