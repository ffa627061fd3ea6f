"""Block decomposition of the attractor: blocks, states, permutation and unitaries."""

import numpy as np

from qasym import analyze, classical_swap, dephasing
from qasym.asymptotics import spec_from_arrays, synthesize_extension
from qasym.channel import amplitude_damping
from qasym.structure import cycle_notation

np.set_printoptions(precision=4, suppress=True)


def describe(name, phi):
    an = analyze(phi)
    D, A = an.decomposition, an.action
    print(f"{name}: d={phi.dim} d0={an.reduction.H0_dim} blocks="
          + ", ".join(f"(d={b.d}, m={b.m})" for b in D.blocks)
          + f" pi={cycle_notation(A.pi)}")
    return an


# dephasing: two one-dimensional blocks, left in place
describe("dephasing", dephasing(2))

# the classical swap |i><i| -> |i+1><i+1| permutes three blocks cyclically
describe("swap3", classical_swap(3))

# amplitude damping: the fixed point is not faithful, so analysis runs on its support
an = describe("amplitude damping", amplitude_damping(0.5))
print("  support isometry V =", an.reduction.V.ravel())

# a channel that swaps two qubit blocks while rotating them
H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
D, A = spec_from_arrays([2, 2], [1, 1], [np.eye(1), np.eye(1)], [1, 0], [np.diag([1, 1j]), H], 4)
an = describe("qubit two-cycle", synthesize_extension(D, A, 4))
for k, u in enumerate(an.action.U):
    print(f"  U_{k + 1} =\n", u)
# the two-step holonomy is basis independent up to conjugation and phase
V = an.action.U[0] @ an.action.U[1]
print("  holonomy eigenphases / pi:", np.sort(np.angle(np.linalg.eigvals(V) / np.linalg.eigvals(V)[0])) / np.pi)
