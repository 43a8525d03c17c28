"""Teleportation fidelity and quadrature squeezing of heralded non-Gaussian states."""

__version__ = "0.1.0"

from .gaussian import GaussianState, make_tmst, make_tmsv, vacuum  # noqa: F401
from .nongauss import NGState, OperationSpec, build_ng_state, classify  # noqa: F401
from .analysis import SqueezingReport, covariance_of, random_passive, symmetric_moment  # noqa: F401
from .teleportation import FidelityRecord, classify_success, fidelity, output_char  # noqa: F401
from .charfn import PolyGaussian  # noqa: F401
