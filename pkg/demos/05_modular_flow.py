"""Fixed states built from the peripheral action and their modular flow."""

import numpy as np

from qasym import analyze, classical_swap, kms_state, modular_flow, unitary_channel
from qasym.asymptotics import spec_from_arrays, synthesize_extension

np.set_printoptions(precision=4, suppress=True)

# single block: the modular flow at t = 1 is the channel itself
U = np.diag([1, np.exp(1j * np.pi / 3)])
an = analyze(unitary_channel(U))
md = an.modular
print("sigma =\n", md.sigma)
X = np.array([[0.2, 1.0], [0.5j, -0.3]])
print("flow(1) vs U X U^dag:", np.abs(modular_flow(md, 1.0, X) - U @ X @ U.conj().T).max())
print("KMS state at beta = 1 is sigma:", np.abs(kms_state(md, 1.0) - md.sigma).max())

# with a permutation the flow only sees Phi_P^M, M the lcm of cycle lengths
for L in (2, 3):
    rep = analyze(classical_swap(L)).cycle_power
    print(f"swap on {L} levels: M={rep.M_lcm}, Phi_P^M residual {rep.max_residual:.1e},"
          f" Phi_P residual {rep.single_step_residual:.2f}")

# blocks of different sizes in a 2-cycle and a fixed point: M = 2
H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
D, A = spec_from_arrays([2, 2, 1], [1, 1, 2], [np.eye(1), np.eye(1), np.diag([0.7, 0.3])], [1, 0, 2],
                        [np.diag([1, 1j]), H, np.eye(1)], 6)
an = analyze(synthesize_extension(D, A, 6))
print("mixed example: M =", an.modular.M_lcm, " matches:", an.cycle_power.matches)
for k, v in an.modular_operator.residuals.items():
    print(f"  {k:18s} {v:.2e}")
