"""Fixed states built from the peripheral action and their modular theory.

For each cycle ``k_1 -> k_2 -> ... -> k_L`` of the block permutation the
holonomy ``V = U_{k_1} U_{k_2} ... U_{k_L}`` is diagonalized as
``sum_j exp(i theta_j) P_j``. A fixed state is obtained by putting a function
of ``V`` on block ``k_1`` and transporting it around the cycle. Its modular
flow at ``t = 1``, ``X -> sigma^{-i} X sigma^{i}``, reproduces the peripheral
map iterated ``M`` times, ``M`` being the lcm of the cycle lengths, provided
each cycle uses the weights ``exp(-theta_j)`` of ``V^(M/L)``.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la

from qasym.errors import NotFaithfulDecomposition
from qasym.numerics import DEFAULT_TOL, cluster_values, dag, herm_log, herm_power, hermitize, unvec, vec
from qasym.structure import decomposition_algebra_basis, decomposition_attractor_basis, permutation_cycles, reconstruct_peripheral


@dataclass(frozen=True)
class CycleData:
    blocks: tuple
    holonomy: np.ndarray
    exponent: int
    phases: np.ndarray
    weights: np.ndarray
    projectors: dict  # block label -> list of projectors, transported along the cycle


@dataclass(frozen=True)
class ModularData:
    sigma: np.ndarray
    Delta: np.ndarray
    H: np.ndarray
    M_lcm: int
    cycles: tuple = field(default=())


def unitary_phases(V, tol=DEFAULT_TOL):
    """Eigenphases in ``[0, 2 pi)`` and spectral projectors of a unitary.

    Phases closer than ``degeneracy_gap`` are merged. The global phase is
    discarded: the spectrum is rotated so that the largest circular gap
    ends at angle 0, which makes the result independent of the phase
    convention chosen for ``V``.
    """
    T, Z = la.schur(np.asarray(V, dtype=complex), output="complex")
    ev = np.diag(T)
    groups = cluster_values(ev, tol.degeneracy_gap)
    raw = np.array([np.angle(ev[g].mean()) % (2 * np.pi) for g in groups])
    order = np.argsort(raw)
    srt = raw[order]
    if srt.size > 1:
        gaps = np.diff(np.concatenate([srt, [srt[0] + 2 * np.pi]]))
        origin = srt[(np.argmax(gaps) + 1) % srt.size]
    else:
        origin = srt[0]
    phases = (raw - origin) % (2 * np.pi)
    phases[np.isclose(phases, 2 * np.pi, atol=1e-12)] = 0.0
    projectors = [Z[:, g] @ dag(Z[:, g]) for g in groups]
    idx = np.argsort(phases, kind="stable")
    return phases[idx], [projectors[i] for i in idx]


def build_fixed_state(D, A, tol=DEFAULT_TOL, channel=None):
    """Cycle data and modular data of the fixed state generated by the holonomies.

    If ``channel`` (the faithful reduced channel) is given, the state is
    checked to be fixed by it; otherwise by the reconstructed peripheral map.
    """
    if D.M == 0 or sum(b.d * b.m for b in D.blocks) != D.dim:
        raise NotFaithfulDecomposition("blocks must exhaust H0")
    cycles = permutation_cycles(A.pi)
    M_lcm = math.lcm(*(len(c) for c in cycles))
    comps = [None] * D.M
    data = []
    for cyc in cycles:
        hol = np.eye(D.blocks[cyc[0]].d, dtype=complex)
        for k in cyc:
            hol = hol @ A.U[k]
        p = M_lcm // len(cyc)
        phases, P1 = unitary_phases(np.linalg.matrix_power(hol, p), tol)
        weights = np.exp(-phases)
        first = sum(w * P for w, P in zip(weights, P1))
        T = np.eye(hol.shape[0], dtype=complex)
        projectors = {}
        for pos, k in enumerate(cyc):
            if pos:
                T = T @ A.U[cyc[pos - 1]]
            comps[k] = dag(T) @ first @ T
            projectors[k] = [dag(T) @ P @ T for P in P1]
        data.append(CycleData(tuple(cyc), hol, p, phases, weights, projectors))

    sigma = sum(b.W @ np.kron(s, b.rho) @ dag(b.W) for b, s in zip(D.blocks, comps))
    sigma = hermitize(sigma / np.trace(sigma).real)
    S = channel.superop if channel is not None else reconstruct_peripheral(D, A)
    err = np.linalg.norm(unvec(S @ vec(sigma), D.dim) - sigma)
    if err > tol.recon:
        raise NotFaithfulDecomposition(f"constructed state is not fixed (residual {err:.2e})")
    inv = np.linalg.inv(sigma)
    Delta = np.kron(inv.T, sigma)
    return tuple(data), ModularData(sigma, Delta, -herm_log(sigma, tol), M_lcm, tuple(data))


def sigma_inner_product(sigma, A, B):
    return complex(np.trace(sigma @ dag(A) @ B))


def modular_flow(md, t, X):
    """``sigma^{-it} X sigma^{it}``."""
    return herm_power(md.sigma, -1j * t) @ X @ herm_power(md.sigma, 1j * t)


def kms_state(md, beta):
    """``sigma^beta / tr(sigma^beta) = exp(-beta H)/Z``."""
    s = herm_power(md.sigma, beta)
    return hermitize(s / np.trace(s).real)


@dataclass
class ModularOperator:
    """Matrices in the coefficient space of an algebra basis.

    ``Delta`` and ``Delta_half`` are linear. ``S`` and ``J`` are antilinear:
    they act on a coefficient vector ``c`` as ``S @ c.conj()``.
    """

    gram: np.ndarray
    S: np.ndarray
    Delta: np.ndarray
    Delta_half: np.ndarray
    J: np.ndarray
    residuals: dict


def _sigma_norm(gh, gh_inv, M):
    return float(np.linalg.norm(gh @ M @ gh_inv, 2))


def modular_operator(md, basis, tol=DEFAULT_TOL):
    """Tomita operator ``S: A -> A^dag`` on an algebra and its polar decomposition ``S = J Delta^{1/2}``.

    Works in the geometry of ``<A|B>_sigma = tr(sigma A^dag B)``. The
    residuals dictionary records the polar-decomposition defect, the
    antiunitarity and involutivity of ``J``, its agreement with the closed
    form ``sigma^{1/2} A^dag sigma^{-1/2}``, and the agreement of ``Delta``
    with ``A -> sigma A sigma^{-1}``.
    """
    sigma = md.sigma
    Bv = np.array([vec(b) for b in basis]).T
    pinv = np.linalg.pinv(Bv)

    def coeffs(X):
        return pinv @ vec(X)

    def span_err(X):
        v = vec(X)
        return np.linalg.norm(v - Bv @ (pinv @ v)) / max(np.linalg.norm(v), 1e-300)

    n = len(basis)
    G = np.array([[sigma_inner_product(sigma, basis[i], basis[j]) for j in range(n)] for i in range(n)])
    G = hermitize(G)
    s = np.array([coeffs(dag(b)) for b in basis]).T
    Delta = np.linalg.solve(G, (dag(s) @ G @ s).T)

    gh = la.sqrtm(G)
    gh_inv = np.linalg.inv(gh)
    mu, Y = np.linalg.eigh(hermitize(gh @ Delta @ gh_inv))
    mu = np.clip(mu, 0.0, None)
    Dh = gh_inv @ (Y * np.sqrt(mu)) @ dag(Y) @ gh
    Dh_inv = gh_inv @ (Y / np.sqrt(mu)) @ dag(Y) @ gh
    J = s @ Dh_inv.conj()

    s_half = herm_power(sigma, 0.5, tol)
    s_mhalf = herm_power(sigma, -0.5, tol)
    inv = np.linalg.inv(sigma)
    J_closed = np.array([coeffs(s_half @ dag(b) @ s_mhalf) for b in basis]).T
    conj_cols = [sigma @ b @ inv for b in basis]
    Delta_closed = np.array([coeffs(x) for x in conj_cols]).T

    # antilinear maps c -> a conj(c) become x -> gh a conj(gh)^{-1} conj(x) in a sigma-orthonormal frame
    ghc_inv = np.linalg.inv(gh.conj())
    Jo = gh @ J @ ghc_inv
    residuals = {
        "polar": float(np.linalg.norm(gh @ (s - J @ Dh.conj()) @ ghc_inv, 2)),
        "J_antiunitary": float(np.linalg.norm(dag(Jo) @ Jo - np.eye(n), 2)),
        "J_involution": float(np.linalg.norm(Jo @ Jo.conj() - np.eye(n), 2)),
        "J_closed_form": float(np.linalg.norm(gh @ (J - J_closed) @ ghc_inv, 2)),
        "Delta_conjugation": _sigma_norm(gh, gh_inv, Delta - Delta_closed),
        "Delta_in_algebra": float(max(span_err(x) for x in conj_cols)),
        "Delta_selfadjoint": float(np.linalg.norm(G @ Delta - dag(G @ Delta), 2)),
        "Delta_min_eig": float(mu.min()),
    }
    return ModularOperator(G, s, Delta, Dh, J, residuals)


def algebra_basis(D):
    return decomposition_algebra_basis(D)


@dataclass
class CyclePowerReport:
    max_residual: float
    M_lcm: int
    matches: bool
    single_step_residual: float
    no_permutation: bool

    @property
    def consistent(self):
        """The flow equals ``Phi_P`` itself exactly when there is no permutation."""
        return (self.M_lcm == 1) == self.no_permutation


def verify_cycle_power(channel, D, A, md, tol=DEFAULT_TOL):
    """Compare ``Phi_P^M`` on the attractor with the modular flow at ``t = 1``."""
    S = channel.superop
    SM = np.linalg.matrix_power(S, md.M_lcm)
    res = single = 0.0
    for X in decomposition_attractor_basis(D):
        F = modular_flow(md, 1.0, X)
        nx = np.linalg.norm(X)
        res = max(res, np.linalg.norm(unvec(SM @ vec(X), D.dim) - F) / nx)
        single = max(single, np.linalg.norm(unvec(S @ vec(X), D.dim) - F) / nx)
    no_perm = all(k == j for k, j in enumerate(A.pi))
    return CyclePowerReport(float(res), md.M_lcm, bool(res <= tol.recon), float(single), no_perm)


def cross_block_mass(D, X):
    """Norm of the part of ``X`` that is not block diagonal in the decomposition."""
    inside = sum(b.W @ dag(b.W) @ X @ b.W @ dag(b.W) for b in D.blocks)
    return float(np.linalg.norm(X - inside))
