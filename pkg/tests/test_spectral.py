import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from _fixtures import U_DIAG, unitary_fixture
from qasym.channel import Channel, amplitude_damping, dephasing, depolarizing, random_channel, replacement
from qasym.numerics import vec
from qasym.spectral import (
    attractor_basis,
    cesaro_fixed_oracle,
    fixed_basis,
    max_rank_fixed_point,
    spectrum,
)


def span_distance(mats, target):
    """Largest distance of a target matrix from the span of ``mats`` (and vice versa)."""
    A = np.array([vec(m) for m in mats]).T
    B = np.array([vec(m) for m in target]).T
    QA = np.linalg.qr(A)[0]
    QB = np.linalg.qr(B)[0]
    return max(np.abs(B - QA @ (QA.conj().T @ B)).max(), np.abs(A - QB @ (QB.conj().T @ A)).max())


def test_unitary_spectrum():
    sp = spectrum(unitary_fixture())
    z = np.exp(1j * np.pi / 3)
    expected = np.sort_complex(np.array([1, 1, z, z.conjugate()]))
    assert np.abs(np.sort_complex(sp.peripheral_eigenvalues) - expected).max() < 1e-12
    assert np.abs(sp.asymptotic_projector - np.eye(4)).max() < 1e-12
    assert len(attractor_basis(sp)) == 4
    # fixed points of a diagonal unitary are the diagonal matrices
    assert span_distance(fixed_basis(sp), [np.diag([1, 0]), np.diag([0, 1])]) < 1e-12
    assert np.abs(U_DIAG @ U_DIAG.conj().T - np.eye(2)).max() < 1e-15


def test_depolarizing_spectrum():
    sp = spectrum(depolarizing(0.5))
    assert np.abs(sp.peripheral_eigenvalues - [1]).max() < 1e-12
    expected = np.outer(vec(np.eye(2) / 2), vec(np.eye(2)).conj())
    assert np.abs(sp.asymptotic_projector - expected).max() < 1e-12
    assert np.abs(sp.fixed_projector - expected).max() < 1e-12
    assert span_distance(attractor_basis(sp), [np.eye(2)]) < 1e-12
    assert abs(sp.subperipheral_radius - 0.5) < 1e-12


def test_amplitude_damping_spectrum():
    g = 0.5
    sp = spectrum(amplitude_damping(g))
    assert np.abs(sp.peripheral_eigenvalues - [1]).max() < 1e-12
    w = np.sort(np.abs(sp.eigenvalues))
    assert np.abs(w - np.sort([1, 1 - g, np.sqrt(1 - g), np.sqrt(1 - g)])).max() < 1e-12
    F = fixed_basis(sp)[0]
    F = F / np.trace(F)
    assert np.abs(F - np.diag([1, 0])).max() < 1e-12


def test_dephasing_attractor():
    sp = spectrum(dephasing(2))
    assert span_distance(attractor_basis(sp), [np.diag([1, 0]), np.diag([0, 1])]) < 1e-12


def test_max_rank_fixed_point_examples():
    assert np.abs(max_rank_fixed_point(spectrum(depolarizing(0.3))) - np.eye(2)).max() < 1e-12
    PI = max_rank_fixed_point(spectrum(amplitude_damping(0.5)))
    assert np.abs(PI / np.trace(PI) - np.diag([1, 0])).max() < 1e-12
    rho = np.diag([0.7, 0.3])
    PI = max_rank_fixed_point(spectrum(replacement(rho)))
    assert np.abs(PI - 2 * rho).max() < 1e-12
    # second route: Cesaro average of the identity
    C = cesaro_fixed_oracle(replacement(rho), 10)
    assert np.abs((C @ vec(np.eye(2))).reshape(2, 2, order="F") - PI).max() < 1e-12


def test_cesaro_examples():
    assert np.abs(cesaro_fixed_oracle(Channel.identity(3), 7) - np.eye(9)).max() < 1e-14
    dep = depolarizing(0.5)
    assert np.abs(cesaro_fixed_oracle(dep, 10 ** 4) - spectrum(dep).fixed_projector).max() < 1e-3
    deph = dephasing(2)
    diag_proj = np.diag([1.0, 0, 0, 1.0])
    assert np.abs(cesaro_fixed_oracle(deph, 10 ** 4) - diag_proj).max() < 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 4), st.data())
def test_projectors_are_idempotent_and_commute(d, data):
    r = data.draw(st.integers(1, d * d))
    phi = random_channel(d, r, seed=data.draw(st.integers(0, 2 ** 31)))
    sp = spectrum(phi)
    P, F, S = sp.asymptotic_projector, sp.fixed_projector, phi.superop
    assert np.abs(P @ P - P).max() < 1e-8
    assert np.abs(F @ F - F).max() < 1e-8
    assert np.abs(P @ S - S @ P).max() < 1e-8
    assert np.abs(S @ F - F).max() < 1e-8
    assert np.abs(F @ P - F).max() < 1e-8
    assert sp.attractor_dim >= 1
