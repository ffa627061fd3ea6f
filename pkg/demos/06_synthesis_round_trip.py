"""Build a channel with a prescribed peripheral structure and recover it."""

import numpy as np

from qasym import analyze, random_spec, synthesize_extension
from qasym.structure import cycle_notation

rng = np.random.default_rng(17)
for _ in range(5):
    (D, A), total = random_spec(rng)
    an = analyze(synthesize_extension(D, A, total))
    E, B = an.decomposition, an.action
    print(f"dim {total:2d}: prescribed", [(b.d, b.m) for b in D.blocks], cycle_notation(A.pi),
          "| recovered", [(b.d, b.m) for b in E.blocks], cycle_notation(B.pi))
    for b in E.blocks:
        print("    rho spectrum", np.round(np.linalg.eigvalsh(b.rho)[::-1], 6))
