"""Iterating a channel: convergence to the attractor and oscillating block weights."""

import numpy as np

from qasym import analyze, classical_swap, depolarizing, trajectory
from qasym.asymptotics import trace_distance
from qasym.pipeline import block_weights

rho0 = np.diag([1.0, 0.0]).astype(complex)

dep = depolarizing(0.5)
states = trajectory(dep, rho0, 8)
print("depolarizing, distance to I/2:", [round(trace_distance(r, np.eye(2) / 2), 5) for r in states])

swap = classical_swap(2)
an = analyze(swap)
print("swap, block weights:")
for n, r in enumerate(trajectory(swap, rho0, 5)):
    print(" ", n, np.round(block_weights(an, r), 3))
