"""Block structure of the attractor of a faithful channel.

For a faithful channel the peripheral eigenspaces of the adjoint span a
unital *-algebra ``A = (+)_k M_{d_k} (x) I_{m_k}``. The attractor of the
channel itself is ``(+)_k M_{d_k} (x) rho_k`` in the same block coordinates,
and the channel acts there as ``x_k -> U_k x_{pi(k)} U_k^dag``.

Each block is described by an isometry ``W_k : C^{d_k} (x) C^{m_k} -> H0``
whose columns are ordered with the first tensor factor varying slowest.
Permutations are stored 0-based: ``pi[k] = j`` means block ``k`` receives
the content of block ``j``.
"""

from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg as la

from qasym.channel import adjoint, apply, superop_of_map, superop_to_choi
from qasym.errors import (
    AlgebraClosureViolation,
    DecompositionFailure,
    FactorizationResidual,
    NotInAttractor,
    PermutationAmbiguity,
)
from qasym.numerics import (
    DEFAULT_TOL,
    dag,
    fix_phase,
    hermitian_basis,
    hermitize,
    orth,
    partial_trace,
    span_residual,
    vec,
)
from qasym.spectral import attractor_basis, max_rank_fixed_point, spectrum


@dataclass(frozen=True)
class Block:
    d: int
    m: int
    W: np.ndarray
    rho: np.ndarray = None


@dataclass(frozen=True)
class BlockDecomposition:
    blocks: tuple

    @property
    def M(self):
        return len(self.blocks)

    @property
    def dim(self):
        return self.blocks[0].W.shape[0] if self.blocks else 0

    @property
    def dims(self):
        return [b.d for b in self.blocks]

    @property
    def mults(self):
        return [b.m for b in self.blocks]

    def __iter__(self):
        return iter(self.blocks)

    def __getitem__(self, k):
        return self.blocks[k]


@dataclass(frozen=True)
class PeripheralAction:
    pi: tuple
    U: tuple

    def cycles(self):
        return permutation_cycles(self.pi)


def permutation_cycles(pi):
    """Cycles of ``pi`` as lists ``[k, pi[k], pi[pi[k]], ...]`` starting at the smallest label."""
    seen = set()
    out = []
    for start in range(len(pi)):
        if start in seen:
            continue
        cyc = [start]
        seen.add(start)
        k = pi[start]
        while k != start:
            cyc.append(k)
            seen.add(k)
            k = pi[k]
        out.append(cyc)
    return out


def cycle_notation(pi):
    parts = ["(" + " ".join(str(k + 1) for k in c) + ")" for c in permutation_cycles(pi) if len(c) > 1]
    return "".join(parts) or "id"


# ---------------------------------------------------------------------------
# the adjoint attractor algebra
# ---------------------------------------------------------------------------

def adjoint_attractor_algebra(channel, tol=DEFAULT_TOL):
    """Basis of Attr(Phi^dag) for a faithful channel, checked to be a unital *-algebra."""
    basis = attractor_basis(spectrum(adjoint(channel), tol))
    Q = orth(np.array([vec(b) for b in basis]).T)
    limit = 100 * tol.recon
    d = channel.dim
    worst = span_residual(Q, vec(np.eye(d)))
    for A in basis:
        worst = max(worst, span_residual(Q, vec(dag(A))))
        for B in basis:
            scale = np.linalg.norm(A) * np.linalg.norm(B)
            worst = max(worst, span_residual(Q, vec(A @ B), scale))
    if worst > limit:
        raise AlgebraClosureViolation(f"closure residual {worst:.3e} exceeds {limit:.1e}")
    return basis


# ---------------------------------------------------------------------------
# Wedderburn-type decomposition of a finite-dimensional *-algebra
# ---------------------------------------------------------------------------

class _Ambiguous(Exception):
    pass


def _groups(w, tol):
    """Split ascending reals at gaps above ``degeneracy_gap``; refuse gaps in the grey zone."""
    scale = max(1.0, float(np.abs(w).max(initial=0.0)))
    groups = [[0]]
    for i, gap in enumerate(np.diff(w), start=1):
        if gap > tol.degeneracy_gap:
            groups.append([i])
        elif gap > tol.recon * scale:
            raise _Ambiguous
        else:
            groups[-1].append(i)
    return [np.array(g) for g in groups]


def _center(herm, tol):
    n = len(herm)
    if n == 1:
        return list(herm)
    cols = []
    for Hj in herm:
        cols.append(np.concatenate([vec(Hj @ Hi - Hi @ Hj) for Hi in herm]))
    A = np.array(cols).T
    _, s, Vh = np.linalg.svd(A, full_matrices=True)
    s = np.concatenate([s, np.zeros(n - s.size)])
    null = Vh[s <= tol.degeneracy_gap].conj()
    Z = [sum(c * Hj for c, Hj in zip(coef, herm)) for coef in null]
    return hermitian_basis(Z)


def _split_block(E, herm, rng, tol):
    nk = E.shape[1]
    comp = hermitian_basis([dag(E) @ H @ E for H in herm])
    dk = int(round(np.sqrt(len(comp))))
    if dk * dk != len(comp) or nk % dk:
        raise _Ambiguous
    mk = nk // dk
    if dk == 1:
        return dk, mk, E
    Hr = sum(g * H for g, H in zip(rng.standard_normal(len(comp)), comp))
    w, v = np.linalg.eigh(Hr)
    groups = _groups(w, tol)
    if len(groups) != dk or any(g.size != mk for g in groups):
        raise _Ambiguous
    F = [v[:, g] for g in groups]
    coef = rng.standard_normal(len(comp)) + 1j * rng.standard_normal(len(comp))
    Y = sum(c * H for c, H in zip(coef, comp))
    G = [F[0]]
    for Fi in F[1:]:
        T = dag(Fi) @ Y @ F[0]
        s = np.linalg.svd(T, compute_uv=False)
        if s[-1] < 1e-3 * max(1.0, np.linalg.norm(Y, 2)) or s[0] - s[-1] > 1e-6 * s[0]:
            raise _Ambiguous
        G.append(Fi @ la.polar(T)[0])
    return dk, mk, E @ np.hstack(G)


def _skeleton_residual(blocks, herm):
    """Worst deviation of compressed algebra elements from the ``b (x) I`` form, plus W orthogonality."""
    W = np.hstack([b.W for b in blocks])
    worst = np.abs(dag(W) @ W - np.eye(W.shape[1])).max()
    for H in herm:
        for b in blocks:
            Y = dag(b.W) @ H @ b.W
            x = partial_trace(Y, (b.d, b.m), keep=0) / b.m
            worst = max(worst, np.abs(Y - np.kron(x, np.eye(b.m))).max())
    return worst


def decompose_algebra(basis, seed=0, tol=DEFAULT_TOL, max_retries=8):
    """Block skeleton ``(W_k, d_k, m_k)`` of a unital *-algebra given by a spanning list.

    Minimal central projections come from the spectrum of a random Hermitian
    central element; inside each block, eigenprojections of a random element
    of the compressed algebra give the multiplicity spaces, and a random
    element connects them into matrix units. Randomness is seeded, and an
    ambiguous spectral gap triggers a retry with fresh samples.
    """
    herm = hermitian_basis(basis)
    d0 = herm[0].shape[0]
    center = _center(herm, tol)
    rng = np.random.default_rng(seed)
    for _ in range(max_retries + 1):
        try:
            C = sum(g * Z for g, Z in zip(rng.standard_normal(len(center)), center))
            w, v = np.linalg.eigh(C)
            groups = _groups(w, tol)
            if len(groups) != len(center):
                raise _Ambiguous
            blocks = []
            for g in groups:
                dk, mk, W = _split_block(v[:, g], herm, rng, tol)
                blocks.append(Block(dk, mk, W))
            if sum(b.d * b.m for b in blocks) != d0:
                raise _Ambiguous
            if _skeleton_residual(blocks, herm) > 100 * tol.recon:
                raise _Ambiguous
            return BlockDecomposition(tuple(blocks))
        except _Ambiguous:
            continue
    raise DecompositionFailure(f"no unambiguous decomposition after {max_retries} retries")


# ---------------------------------------------------------------------------
# block states, components and canonical ordering
# ---------------------------------------------------------------------------

def block_component(block, X, rho=None):
    """Least-squares ``x`` with ``W^dag X W ~ x (x) rho``."""
    rho = block.rho if rho is None else rho
    Y = (dag(block.W) @ X @ block.W).reshape(block.d, block.m, block.d, block.m)
    return np.einsum("iajb,ab->ij", Y, rho.conj()) / np.vdot(rho, rho).real


def assemble(D, comps):
    """``sum_k W_k (x_k (x) rho_k) W_k^dag``."""
    out = np.zeros((D.dim, D.dim), dtype=complex)
    for b, x in zip(D.blocks, comps):
        out += b.W @ np.kron(x, b.rho) @ dag(b.W)
    return out


def factorization_residual(D, X):
    comps = [block_component(b, X) for b in D.blocks]
    nx = np.linalg.norm(X)
    return np.linalg.norm(X - assemble(D, comps)) / nx if nx else 0.0


def _sort_key(b):
    top = float(np.linalg.eigvalsh(b.rho)[-1])
    fingerprint = tuple(np.round(np.real(np.diag(b.W @ dag(b.W))), 6))
    return (b.d, b.m, -round(top, 8), fingerprint)


def extract_rho(channel, skeleton, spec=None, tol=DEFAULT_TOL):
    """Fill in the block states ``rho_k`` from the full-rank fixed state and sort blocks canonically.

    Every attractor element must factorize as ``(+)_k x_k (x) rho_k``;
    the worst relative residual above ``recon`` raises
    :class:`FactorizationResidual`.
    """
    spec = spectrum(channel, tol) if spec is None else spec
    sigma = max_rank_fixed_point(spec)
    sigma = sigma / np.trace(sigma).real
    blocks = []
    for b in skeleton.blocks:
        r = hermitize(partial_trace(dag(b.W) @ sigma @ b.W, (b.d, b.m), keep=1))
        r = r / np.trace(r).real
        if np.linalg.eigvalsh(r)[0] <= tol.psd_cut:
            raise FactorizationResidual("block state is not positive definite")
        blocks.append(replace(b, rho=r))
    D = BlockDecomposition(tuple(sorted(blocks, key=_sort_key)))
    worst = max((factorization_residual(D, X) for X in attractor_basis(spec)), default=0.0)
    if worst > tol.recon:
        raise FactorizationResidual(f"attractor does not factorize: residual {worst:.3e}")
    return D


# ---------------------------------------------------------------------------
# the peripheral action
# ---------------------------------------------------------------------------

def _matrix_unit(d, i, j):
    E = np.zeros((d, d), dtype=complex)
    E[i, j] = 1.0
    return E


def extract_action(channel, D, tol=DEFAULT_TOL):
    """Permutation ``pi`` and block unitaries ``U_k`` of the channel on its attractor."""
    M = D.M
    pi = [None] * M
    for j, src in enumerate(D.blocks):
        X = src.W @ np.kron(_matrix_unit(src.d, 0, 0), src.rho) @ dag(src.W)
        Y = apply(channel, X)
        thresh = tol.recon * max(np.linalg.norm(Y), 1.0)
        hits = [k for k, b in enumerate(D.blocks) if np.linalg.norm(dag(b.W) @ Y @ b.W) > thresh]
        if len(hits) != 1 or pi[hits[0]] is not None:
            raise PermutationAmbiguity(f"block {j} maps into blocks {hits}")
        pi[hits[0]] = j
    for k, j in enumerate(pi):
        if D.blocks[k].d != D.blocks[j].d:
            raise PermutationAmbiguity(f"blocks {k} and {j} have different sizes")

    U = []
    for k, j in enumerate(pi):
        dst, src = D.blocks[k], D.blocks[j]

        def induced(x, dst=dst, src=src):
            Y = apply(channel, src.W @ np.kron(x, src.rho) @ dag(src.W))
            return partial_trace(dag(dst.W) @ Y @ dst.W, (dst.d, dst.m), keep=0)

        choi = superop_to_choi(superop_of_map(induced, dst.d))
        w, v = np.linalg.eigh(hermitize(choi))
        if w[:-1].size and abs(w[-2]) > tol.recon * dst.d:
            raise PermutationAmbiguity(f"induced map on block {k} is not unitary conjugation")
        Uk = np.sqrt(w[-1]) * v[:, -1].reshape(dst.d, dst.d).T
        Uk = fix_phase(Uk.reshape(-1)).reshape(dst.d, dst.d)
        if np.abs(dag(Uk) @ Uk - np.eye(dst.d)).max() > tol.recon:
            raise PermutationAmbiguity(f"block {k} unitary fails the unitarity check")
        U.append(la.polar(Uk)[0])
    return PeripheralAction(tuple(pi), tuple(U))


def reconstruct_peripheral(D, A):
    """Superoperator on ``B(H0)`` of ``X -> sum_k W_k (U_k x_pi(k) U_k^dag (x) rho_k) W_k^dag``."""

    def act(X):
        comps = [block_component(b, X) for b in D.blocks]
        return assemble(D, [A.U[k] @ comps[A.pi[k]] @ dag(A.U[k]) for k in range(D.M)])

    return superop_of_map(act, D.dim)


def decomposition_attractor_basis(D):
    """Matrix-unit basis ``W_k (E_ab (x) rho_k) W_k^dag`` of the attractor."""
    return [b.W @ np.kron(_matrix_unit(b.d, i, j), b.rho) @ dag(b.W)
            for b in D.blocks for i in range(b.d) for j in range(b.d)]


def decomposition_algebra_basis(D):
    """Matrix-unit basis ``W_k (E_ab (x) I) W_k^dag`` of the adjoint attractor algebra."""
    return [b.W @ np.kron(_matrix_unit(b.d, i, j), np.eye(b.m)) @ dag(b.W)
            for b in D.blocks for i in range(b.d) for j in range(b.d)]


def star_product(A, B, PI, attractor, tol=DEFAULT_TOL):
    """Distorted product ``A P(I)^+ B`` that turns the attractor into an algebra.

    ``attractor`` is an orthonormal basis (columns) of vectorized Attr; the
    pseudo-inverse of ``P(I)`` inverts only on its support.
    """
    for name, X in (("A", A), ("B", B)):
        if span_residual(attractor, vec(X)) > tol.recon:
            raise NotInAttractor(f"{name} is not in the attractor span")
    w, v = np.linalg.eigh(hermitize(PI))
    keep = w > tol.psd_cut * PI.shape[0]
    pinv = (v[:, keep] / w[keep]) @ dag(v[:, keep])
    return A @ pinv @ B
