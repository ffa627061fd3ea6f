"""Two sufficient conditions for unitary asymptotics: GKLS evolutions and idempotents."""

import numpy as np
import scipy.linalg as la

from qasym import Channel, analyze, classical_swap, dephasing, gkls_superop, is_idempotent

rng = np.random.default_rng(3)
H = np.diag([0.0, 0.4, 1.1])
jumps = [0.3 * (rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))]
L0 = gkls_superop(H, jumps)
phi = Channel.from_superop(la.expm(L0))
an = analyze(phi)
print("exp(GKLS): verdict", an.markov.verdict, " generator error", np.abs(an.markov.generator - L0).max(),
      " unitary asymptotics", an.certificate.unitary)

# a pure dephasing generator has a large attractor; still unitary
L1 = gkls_superop(np.diag([0.0, 0.5]), [0.4 * np.diag([1.0, -1.0])])
an = analyze(Channel.from_superop(la.expm(L1)))
print("dephasing semigroup: attractor dim", an.spectrum.attractor_dim, " unitary", an.certificate.unitary)

print("dephasing idempotent:", is_idempotent(dephasing(3)), " certified:", analyze(dephasing(3)).certificate.unitary)

# the principal-branch test is only sufficient: a swap has eigenvalue -1 and the test stays silent
print("swap:", analyze(classical_swap(2)).markov.verdict)
