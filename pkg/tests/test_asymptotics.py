import numpy as np
import pytest
import scipy.linalg as la

from _fixtures import (
    gkls_pool,
    nonunitary_two_cycle,
    nonunitary_two_cycle_spec,
    qubit_two_cycle,
    random_pool,
    random_state,
    unitary_fixture,
)
from qasym.asymptotics import (
    gkls_superop,
    hs_isometry_defect,
    is_idempotent,
    markov_principal_branch_test,
    peripheral_channel,
    spec_from_arrays,
    synthesize_extension,
    trace_distance,
    trajectory,
)
from qasym.channel import (
    Channel,
    amplitude_damping,
    apply,
    classical_swap,
    dephasing,
    depolarizing,
    power,
    replacement,
)
from qasym.errors import InvalidSpec, InvalidState
from qasym.numerics import vec
from qasym.pipeline import analyze, block_weights
from qasym.spectral import spectrum
from qasym.structure import decomposition_attractor_basis


def test_peripheral_channel_examples():
    phi = unitary_fixture()
    assert np.abs(peripheral_channel(phi, spectrum(phi)) - phi.superop).max() < 1e-12
    dep = depolarizing(0.5)
    want = np.outer(vec(np.eye(2) / 2), vec(np.eye(2)))
    assert np.abs(peripheral_channel(dep, spectrum(dep)) - want).max() < 1e-12
    ad = amplitude_damping(0.5)
    PP = peripheral_channel(ad, spectrum(ad))
    want = np.outer(vec(np.diag([1.0, 0])), vec(np.eye(2)))
    assert np.abs(PP - want).max() < 1e-12
    assert np.abs(power(ad, 60).superop - PP).max() < 1e-8


def test_certificate_identity_permutation():
    an = analyze(dephasing(3))
    cert = an.certificate
    assert cert.unitary and cert.residual < 1e-12
    D, A = an.decomposition, an.action
    want = sum(b.W @ np.kron(u, np.eye(b.m)) @ b.W.conj().T for b, u in zip(D.blocks, A.U))
    assert np.abs(cert.witness_U - want).max() < 1e-12


def test_certificate_two_cycles():
    for phi in (classical_swap(2), qubit_two_cycle()):
        an = analyze(phi)
        assert an.certificate.unitary
        U = an.certificate.witness_U
        for X in decomposition_attractor_basis(an.decomposition):
            assert np.abs(apply(phi, X) - U @ X @ U.conj().T).max() < 1e-8
    an = analyze(nonunitary_two_cycle())
    assert not an.certificate.unitary
    assert {v["reason"] for v in an.certificate.violations} == {"multiplicity_mismatch"}


def test_certificate_spectrum_mismatch():
    D, A = spec_from_arrays([1, 1], [2, 2], [np.diag([0.6, 0.4]), np.diag([0.9, 0.1])], [1, 0],
                            [np.eye(1), np.eye(1)], 4)
    an = analyze(synthesize_extension(D, A, 4))
    assert not an.certificate.unitary
    assert {v["reason"] for v in an.certificate.violations} == {"spectrum_mismatch"}
    # equal spectra in different bases are unitarily equivalent
    R = la.expm(1j * np.array([[0, 0.3], [0.3, 0]]))
    rho = np.diag([0.8, 0.2])
    D, A = spec_from_arrays([1, 1], [2, 2], [rho, R @ rho @ R.conj().T], [1, 0], [np.eye(1), np.eye(1)], 4)
    phi = synthesize_extension(D, A, 4)
    an = analyze(phi)
    assert an.certificate.unitary and an.certificate.residual < 1e-8


def test_is_idempotent_examples():
    assert is_idempotent(dephasing(3))
    assert not is_idempotent(depolarizing(0.5))
    assert is_idempotent(replacement(np.diag([0.7, 0.3])))


def test_markov_dephasing_generator():
    L0 = gkls_superop(np.zeros((2, 2)), [np.sqrt(0.3) * np.diag([1.0, -1.0]) / np.sqrt(2)])
    res = markov_principal_branch_test(Channel.from_superop(la.expm(L0)))
    assert res.verdict == "markovian"
    assert np.abs(res.generator - L0).max() < 1e-8


def test_markov_unitary_and_swap():
    assert markov_principal_branch_test(unitary_fixture()).verdict == "markovian"
    assert markov_principal_branch_test(classical_swap(2)).verdict in ("inconclusive", "not_principal_branch")
    # unitary swap: eigenvalue -1 sits on the branch cut
    X = np.array([[0, 1], [1, 0]])
    assert markov_principal_branch_test(Channel.from_kraus([X])).verdict == "inconclusive"


def test_markov_rejects_non_markovian():
    # Pauli channel with eigenvalues (0.6, 0.6, 0.3): positive spectrum, but 0.6 * 0.6 > 0.3
    # forces a negative rate in the principal logarithm
    paulis = [np.eye(2), np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.diag([1.0, -1.0])]
    probs = [0.625, 0.175, 0.175, 0.025]
    phi = Channel.from_kraus([np.sqrt(p) * s for p, s in zip(probs, paulis)])
    w = np.sort(np.linalg.eigvals(phi.superop).real)
    assert np.abs(w - [0.3, 0.6, 0.6, 1.0]).max() < 1e-12
    res = markov_principal_branch_test(phi)
    assert res.verdict == "not_principal_branch"
    assert res.checks["min_projected_choi"] < -1e-3
    # the transpose-depolarizing map has eigenvalue -1/3 on the branch cut
    def td(X):
        return (np.trace(X) * np.eye(2) + X.T) / 3

    from qasym.channel import superop_of_map

    assert markov_principal_branch_test(Channel.from_superop(superop_of_map(td, 2))).verdict == "inconclusive"


def test_markovian_implies_unitary_certificate():
    for H, jumps in gkls_pool(6, seed=5):
        phi = Channel.from_superop(la.expm(gkls_superop(H, jumps)))
        an = analyze(phi)
        assert an.markov.verdict == "markovian"
        assert an.certificate.unitary


def test_synthesize_replacement():
    rho = np.diag([0.7, 0.3])
    D, A = spec_from_arrays([1], [2], [rho], [0], [np.eye(1)], 2)
    assert np.abs(synthesize_extension(D, A, 2).superop - replacement(rho).superop).max() < 1e-12


def test_synthesize_round_trips_unitary():
    phi = unitary_fixture()
    an = analyze(phi)
    again = synthesize_extension(an.decomposition, an.action, 2)
    assert np.abs(again.superop - phi.superop).max() < 1e-10


def test_synthesize_nonunitary_two_cycle():
    phi = nonunitary_two_cycle()
    an = analyze(phi)
    assert an.validation.ok
    assert an.action.pi == (1, 0)
    assert not an.certificate.unitary
    # this fixture is not unital: it maps I to something else
    assert np.abs(apply(phi, np.eye(3)) - np.eye(3)).max() > 0.1


def test_synthesize_rejects_bad_specs():
    D, A = nonunitary_two_cycle_spec()
    with pytest.raises(InvalidSpec):
        synthesize_extension(D, A, 2)
    bad = spec_from_arrays([1, 2], [1, 1], [np.eye(1), np.eye(1)], [1, 0], [np.eye(1), np.eye(2)], 3)
    with pytest.raises(InvalidSpec):
        synthesize_extension(*bad, 3)
    bad = spec_from_arrays([1], [2], [np.diag([1.0, 0.0])], [0], [np.eye(1)], 2)
    with pytest.raises(InvalidSpec):
        synthesize_extension(*bad, 2)
    bad = spec_from_arrays([2], [1], [np.eye(1)], [0], [np.ones((2, 2))], 2)
    with pytest.raises(InvalidSpec):
        synthesize_extension(*bad, 2)


def test_hs_isometry_iff_equal_multiplicities():
    for mults, isometric in (([2, 2], True), ([1, 1], True), ([1, 2], False)):
        rhos = [np.eye(m) / m for m in mults]
        D, A = spec_from_arrays([1, 1], mults, rhos, [1, 0], [np.eye(1), np.eye(1)], sum(mults))
        phi = synthesize_extension(D, A, sum(mults))
        defect = hs_isometry_defect(phi, spectrum(phi))
        assert (defect < 1e-10) == isometric
        assert analyze(phi).certificate.unitary == isometric


def test_trajectory_examples():
    rho0 = np.diag([1.0, 0.0]).astype(complex)
    for rho in trajectory(Channel.identity(2), rho0, 5):
        assert np.abs(rho - rho0).max() == 0
    traj = trajectory(depolarizing(0.5), rho0, 20)
    for n, rho in enumerate(traj):
        assert np.abs(rho - (0.5 ** n * (rho0 - np.eye(2) / 2) + np.eye(2) / 2)).max() < 1e-14
    swap = classical_swap(2)
    an = analyze(swap)
    w = [block_weights(an, r) for r in trajectory(swap, rho0, 6)]
    for n in range(len(w) - 2):
        assert np.abs(np.subtract(w[n], w[n + 2])).max() < 1e-14
        assert np.abs(np.subtract(w[n], w[n + 1])).max() > 0.9


def test_trajectory_rejects_bad_state():
    with pytest.raises(InvalidState):
        trajectory(Channel.identity(2), np.diag([1.5, -0.5]), 3)


def test_convergence_to_periphery():
    for phi in random_pool(20, [2, 3, 4], seed=21):
        sp = spectrum(phi)
        S = phi.superop
        Sn = np.linalg.matrix_power(S, 200)
        err = np.linalg.norm(Sn - Sn @ sp.asymptotic_projector, 2)
        assert err <= sp.subperipheral_radius ** 200 * 1e3 + 1e-6


def test_trace_distance_to_asymptotic_orbit():
    rng = np.random.default_rng(4)
    phi = qubit_two_cycle()
    sp = spectrum(phi)
    rho0 = random_state(4, rng)
    orbit = (sp.asymptotic_projector @ vec(rho0)).reshape(4, 4, order="F")
    for rho in trajectory(phi, rho0, 4)[1:]:
        orbit = apply(phi, orbit)
        assert trace_distance(rho, orbit) < 1e-12
