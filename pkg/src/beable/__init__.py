"""Numerics for a continuously monitored harmonic oscillator.

Submodules
----------
fock_algebra      truncated Fock-space operators and states
superoperators    master-equation generators, propagation, conservation audits
discrete_kernel   time-sliced kinetic kernel, determinants, positivity
path_oracle       closed-form and brute-force path-integral oracles
spectral          principal-value kernels, weight functions, bound chain
measurement_demo  object plus apparatus readout and the Born rule
cli               batch command-line front end
"""
from .errors import DomainError, NumericError, SingularityError, TruncationWarning

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "NumericError",
    "SingularityError",
    "TruncationWarning",
    "__version__",
]
