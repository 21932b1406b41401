"""Resonances of the unit Gaussian, their counting function and the Born curves.

For V(x) = exp(-x^2) the resonances sit near two rays in the lower half
plane. Deep in the plane they approach the zeros of the Born condition
4k^2 + Vhat(2k) Vhat(-2k) = 0. The script counts resonances by modulus,
fits n(r) ~ c r^2, pairs resonances with Born zeros and writes an SVG.

    python3 demos/02_gaussian_counting_and_born.py [radius] [out.svg]
"""

import math
import sys

from resonancelab.asymptotics import (born_zero_compare, counting_law_compare, resonance_search,
                                      scatter_svg)
from resonancelab.potential import Gaussian

radius = float(sys.argv[1]) if len(sys.argv) > 1 else 9.0
svg_path = sys.argv[2] if len(sys.argv) > 2 else "gaussian_resonances.svg"
gauss = Gaussian(1.0)

search = resonance_search(gauss, radius)  # the transfer-march D; a few minutes at radius 12
print(f"{len(search.zeros)} resonances with |k| <= {radius} ({search.evaluations} evaluations of D)")

radii = [radius / 2, 3 * radius / 4, radius]
rep = counting_law_compare(gauss, radii, rho=2.0, search=search)
print("n(r):", dict(zip(radii, rep.measured_n)))
print(f"fitted c in n ~ c r^2: {rep.fitted_constant:.3f}  (formula value {rep.predicted_constant:.3f}, "
      f"1/pi = {1 / math.pi:.3f}); log-log exponent {rep.fitted_exponent:.2f}")

zs = [z.location for z in search.zeros]
cmp = born_zero_compare(gauss, (-radius, radius, -radius, -1.0), resonances=zs)
print(f"mean distance to Born zeros: {cmp.band_mean(1, radius / 2):.4f} for |k| < {radius / 2}, "
      f"{cmp.band_mean(radius / 2, radius):.4f} beyond")

with open(svg_path, "w", encoding="utf-8") as fh:
    fh.write(scatter_svg(cmp.resonances, cmp.born_zeros))
print("scatter written to", svg_path)
