import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qasym.channel import (
    Channel,
    adjoint,
    apply,
    channels_close,
    choi_to_kraus,
    compose,
    depolarizing,
    power,
    random_channel,
    replacement,
    unitary_channel,
    validate,
)
from qasym.errors import DimensionMismatch

X = np.array([[0, 1], [1, 0]], dtype=complex)


def test_validate_examples():
    assert validate(Channel.from_kraus([np.eye(2)])).ok
    full_damping = Channel.from_kraus([np.array([[1, 0], [0, 0]]), np.array([[0, 1], [0, 0]])])
    assert validate(full_damping).ok
    rep = validate(Channel.from_kraus([np.eye(2), X]))
    assert rep.cp and not rep.tp
    assert abs(rep.tp_defect - 1.0) < 1e-14


def test_validate_detects_non_cp():
    transpose = Channel.from_superop(np.eye(4)[[0, 2, 1, 3]])
    rep = validate(transpose)
    assert rep.tp and not rep.cp
    assert rep.min_choi_eig < -0.5


def test_adjoint_of_unitary():
    rng = np.random.default_rng(3)
    U = np.linalg.qr(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))[0]
    A = rng.standard_normal((3, 3))
    out = apply(adjoint(unitary_channel(U)), A)
    assert np.abs(out - U.conj().T @ A @ U).max() < 1e-13


def test_adjoint_of_replacement():
    rho = np.diag([0.7, 0.3]).astype(complex)
    rho[0, 1] = rho[1, 0] = 0.1
    phi = replacement(rho)
    phid = adjoint(phi)
    for i in range(2):
        for j in range(2):
            A = np.zeros((2, 2), dtype=complex)
            A[i, j] = 1
            assert np.abs(apply(phid, A) - np.trace(rho @ A) * np.eye(2)).max() < 1e-14
            for k in range(2):
                for l in range(2):
                    B = np.zeros((2, 2), dtype=complex)
                    B[k, l] = 1
                    lhs = np.vdot(A, apply(phi, B))
                    rhs = np.vdot(apply(phid, A), B)
                    assert abs(lhs - rhs) < 1e-14


def test_power_and_apply():
    phi = random_channel(3, 2, seed=4)
    assert channels_close(power(phi, 0), Channel.identity(3))
    assert channels_close(power(phi, 5), compose(phi, compose(phi, compose(phi, compose(phi, phi)))))
    rng = np.random.default_rng(5)
    G = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    rho = G @ G.conj().T
    rho /= np.trace(rho)
    assert np.abs(apply(depolarizing(1.0), rho) - np.eye(2) / 2).max() < 1e-15


def test_compose_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        compose(Channel.identity(2), Channel.identity(3))


def test_random_channel_examples():
    phi = random_channel(2, 1, seed=0)
    assert len(phi.kraus) == 1
    K = phi.kraus[0]
    assert np.abs(K.conj().T @ K - np.eye(2)).max() < 1e-13
    assert validate(random_channel(2, 4, seed=11)).ok
    a, b = random_channel(3, 5, seed=42), random_channel(3, 5, seed=42)
    assert all(np.array_equal(x, y) for x, y in zip(a.kraus, b.kraus))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 4), st.data())
def test_representation_round_trips(d, data):
    r = data.draw(st.integers(1, d * d))
    seed = data.draw(st.integers(0, 2 ** 31))
    phi = random_channel(d, r, seed=seed)
    via_choi = Channel.from_kraus(choi_to_kraus(phi.choi))
    assert np.abs(via_choi.superop - phi.superop).max() < 1e-9
    via_superop = Channel.from_superop(phi.superop)
    assert np.abs(via_superop.choi - phi.choi).max() < 1e-12
    assert validate(via_choi).ok


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_channel_preserves_states(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 5))
    phi = random_channel(d, int(rng.integers(1, d * d + 1)), seed=seed)
    G = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = G @ G.conj().T
    rho /= np.trace(rho)
    out = apply(phi, rho)
    assert abs(np.trace(out) - 1) < 1e-12
    assert np.abs(out - out.conj().T).max() < 1e-12
    assert np.linalg.eigvalsh(out).min() > -1e-12
