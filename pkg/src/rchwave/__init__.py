"""Zero-mean periodic traveling waves of a regularized Camassa-Holm equation.

Constructs the even, zero-mean, 2*pi-periodic traveling-wave family on
c > omega/2, assembles the linearized operators around each wave,
counts their negative and zero eigenvalues through independent routes
(dense eigensolves, a Hill reduction, a Floquet constant), evaluates
the constrained stability indices, and corroborates the verdicts with
direct time integration.
"""

from .spectral import Grid, WaveProfile
from .waves import WavePoint, FamilyCurve, ConservedTriple

__version__ = "0.1.0"

__all__ = [
    "Grid",
    "WaveProfile",
    "WavePoint",
    "FamilyCurve",
    "ConservedTriple",
    "__version__",
]
