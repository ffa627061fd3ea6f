"""When is the asymptotic dynamics a single unitary conjugation?"""

import numpy as np

from qasym import analyze
from qasym.asymptotics import hs_isometry_defect, spec_from_arrays, synthesize_extension
from qasym.spectral import spectrum


def two_cycle(mults, rhos):
    D, A = spec_from_arrays([1, 1], mults, rhos, [1, 0], [np.eye(1), np.eye(1)], sum(mults))
    return synthesize_extension(D, A, sum(mults))


cases = {
    "m = (2, 2), equal states": two_cycle([2, 2], [np.diag([0.8, 0.2]), np.diag([0.2, 0.8])]),
    "m = (2, 2), different spectra": two_cycle([2, 2], [np.diag([0.8, 0.2]), np.diag([0.6, 0.4])]),
    "m = (1, 2)": two_cycle([1, 2], [np.eye(1), np.eye(2) / 2]),
}
for name, phi in cases.items():
    an = analyze(phi)
    cert = an.certificate
    print(f"{name}: unitary={cert.unitary}",
          f"witness residual={cert.residual:.1e}" if cert.unitary else [v["reason"] for v in cert.violations],
          f"HS defect={hs_isometry_defect(phi, spectrum(phi)):.2f}")

# a positive certificate carries the unitary: check it directly
an = analyze(cases["m = (2, 2), equal states"])
U = an.certificate.witness_U
X = an.spectrum.clusters[0].right[:, 0].reshape(4, 4, order="F")
print("Phi(X) - U X U^dag:", np.abs(an.channel(X) - U @ X @ U.conj().T).max())
