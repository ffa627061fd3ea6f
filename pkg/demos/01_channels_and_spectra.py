"""Channels, their representations and the peripheral spectrum."""

import numpy as np

from qasym import amplitude_damping, depolarizing, random_channel, spectrum, unitary_channel, validate
from qasym.spectral import cesaro_fixed_oracle

np.set_printoptions(precision=4, suppress=True)

# a random channel from a Stinespring isometry; same seed, same channel
phi = random_channel(3, 4, seed=0)
print("Kraus operators:", len(phi.kraus), " superoperator shape:", phi.superop.shape)
print("validation:", validate(phi))

# every channel has 1 in its spectrum and nothing outside the unit disc
sp = spectrum(phi)
print("eigenvalue moduli:", np.sort(np.abs(sp.eigenvalues))[::-1])
print("peripheral eigenvalues:", sp.peripheral_eigenvalues)

# a unitary channel lives entirely on the unit circle
U = np.diag([1, np.exp(1j * np.pi / 3)])
print("unitary channel, peripheral:", spectrum(unitary_channel(U)).peripheral_eigenvalues)

# depolarizing shrinks the Bloch sphere by p; its fixed point is I/2
dep = depolarizing(0.5)
sp = spectrum(dep)
print("depolarizing eigenvalues:", np.sort(sp.eigenvalues.real))
print("P(I) =\n", (sp.fixed_projector @ np.eye(2).reshape(-1)).reshape(2, 2))

# the spectral projector agrees with brute-force Cesaro averaging
gap = np.linalg.norm(cesaro_fixed_oracle(dep, 10 ** 4) - sp.fixed_projector, 2)
print("Cesaro vs spectral projector:", gap)

# amplitude damping has a unique, non-faithful fixed point |0><0|
sp = spectrum(amplitude_damping(0.5))
print("amplitude damping eigenvalues:", np.sort(np.abs(sp.eigenvalues)))
