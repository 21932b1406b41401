"""Growth of D and the data that pin down a potential.

The indicator h_D(theta) measures how fast ln|D(r e^{i theta})| grows like
r^rho along a ray. For the Gaussian D grows like exp(2 r^2) straight down
and stays bounded elsewhere. The second part compares a potential with its
mirror image V(-x): both have the same resonances and the same D, so none
of the diagnostics can tell them apart, while a different potential is
separated at once.

    python3 demos/03_growth_and_uniqueness.py
"""

import numpy as np

from resonancelab.asymptotics import indicator_of_D, sigma_integral, uniqueness_compare
from resonancelab.potential import Gaussian, GaussianSum, hypothesis_check

gauss = Gaussian(1.0)
rep = hypothesis_check(gauss)
print(f"Vhat: order {rep.order_estimate:.4f}, type {rep.type_estimate:.4f}, flags {list(rep.flags)}")

est = indicator_of_D(gauss, rho=2.0, thetas=(-np.pi / 2, -np.pi / 4, 0.0, np.pi / 2))
for th, h, p in zip(est.theta_grid, est.h_values, est.predicted):
    print(f"  theta = {th:6.3f}: h_D = {h:+.4f}  predicted {p:+.4f}")

print("\nsigma(t) for the Gaussian:", [round(sigma_integral(gauss, t), 6) for t in (1, 2, 3)])

pair = GaussianSum((Gaussian(1.0, 1.0, -0.5), Gaussian(-0.6, 0.7, 0.8)))
for name, other in (("V(-x)", pair.reflected()), ("another sum", GaussianSum((Gaussian(1.0, 1.0, -0.5),
                                                                            Gaussian(-0.5, 0.7, 0.8))))):
    u = uniqueness_compare(pair, other)
    print(f"\nV vs {name}:")
    for key, val in u.differences().items():
        print(f"  {key:26s} {val:.3e}")
