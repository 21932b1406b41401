"""Resonances of one-dimensional Schroedinger operators.

The central object is the Fredholm determinant D(k) of the sandwiched free
resolvent; resonances are its zeros in the lower half plane. Submodules:

``potential``     potential families, Fourier transforms, growth diagnostics
``determinant``   D(k) by Nystrom discretisation (and the transfer march)
``jost``          Jost corrections, T-matrix, Born sums, square-well oracle
``rootfinder``    argument-principle zero location on rectangles and disks
``asymptotics``   indicator, counting law, Born curves, uniqueness checks
``cli``           batch command line front end
"""

__version__ = "0.1.0"

from .errors import (BoundaryZeroError, NumericalError, ResonanceLabError,  # noqa: E402
                     ValidationError)
from .potential import (Gaussian, GaussianSum, SquareWell, SuperGaussian,  # noqa: E402
                        Tabulated, load_spec, save_spec, spec_from_dict)

__all__ = [
    "__version__", "ResonanceLabError", "ValidationError", "NumericalError", "BoundaryZeroError",
    "Gaussian", "GaussianSum", "SquareWell", "SuperGaussian", "Tabulated",
    "load_spec", "save_spec", "spec_from_dict",
]
