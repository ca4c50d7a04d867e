"""rrlab: radiation-reaction position shift of a charge crossing a potential ramp.

Classical Lorentz-Dirac routes, the one-photon quantum route and its corrected
surface-term form, WKB emission amplitudes, wave-packet bookkeeping and the
order-e^2 forward-scattering corrections, all in consistent units set by
:class:`PhysicalConstants`.
"""
from .constants import PhysicalConstants, natural_units
from .potential import PotentialSpec, Shape, SumPotential

__version__ = "0.1.0"
__all__ = ["PhysicalConstants", "natural_units", "PotentialSpec", "Shape", "SumPotential", "__version__"]
