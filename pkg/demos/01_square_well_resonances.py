"""Resonances of a square well from the Fredholm determinant.

The determinant D(k) is computed by Nystrom quadrature and its zeros in a
rectangle of the lower half plane are located by the argument principle.
The square well has a closed-form transfer matrix, so the same zeros can be
found independently and compared.

    python3 demos/01_square_well_resonances.py
"""

import numpy as np

from resonancelab.determinant import determinant
from resonancelab.jost import transfer_matrix_resonances
from resonancelab.potential import SquareWell
from resonancelab.rootfinder import find_zeros

well = SquareWell(depth=-2.0, half_width=1.0)
region = (0.0, 6.0, -3.0, -0.05)

# D at a few points; far above the real axis D tends to 1
for k in (3 - 1j, 3 + 2j, 10j, 40j):
    v = determinant(well, k, tol=1e-10)
    print(f"D({k}) = {v.D:.10f}  (grid {v.grid_size}, converged {v.converged})")

oracle = transfer_matrix_resonances(well, region)
fred = find_zeros(lambda k: determinant(well, k, tol=1e-12, n_max=512).D, region, 1e-10,
                  method="fredholm")

print(f"\n{len(fred)} zeros of D, {len(oracle)} transfer-matrix zeros")
for z in sorted(fred.locations, key=lambda z: z.real):
    d = np.min(np.abs(oracle.locations - z))
    print(f"  k = {z.real:+.10f} {z.imag:+.10f}i   distance to oracle {d:.1e}")
for note in fred.notes:
    print("note:", note)
