"""Quantum metrology with a Tavis-Cummings cavity coupled to an XY spin chain.

Free-fermion moments of the chain, full and dispersive Hamiltonians, spectral
dynamics, quantum Fisher information and an exact-diagonalization oracle.
"""

__version__ = "0.1.0"

from .errors import (
    BudgetError,
    ConfigurationError,
    DomainError,
    RegimePreconditionError,
    SingularDetuningError,
    StepSizeError,
    TcxyError,
    TruncationError,
    UnsupportedConfigurationError,
)
from .freefermion import XYParams, jz_moments, jz_moments_thermo, phase_classify
from .hamiltonians import SystemParams, build_eff, build_full, validity_report
from .metrology import qfi_analytic, qfi_numeric, qfi_regime, scaling_fit

__all__ = [
    "BudgetError",
    "ConfigurationError",
    "DomainError",
    "RegimePreconditionError",
    "SingularDetuningError",
    "StepSizeError",
    "SystemParams",
    "TcxyError",
    "TruncationError",
    "UnsupportedConfigurationError",
    "XYParams",
    "__version__",
    "build_eff",
    "build_full",
    "jz_moments",
    "jz_moments_thermo",
    "phase_classify",
    "qfi_analytic",
    "qfi_numeric",
    "qfi_regime",
    "scaling_fit",
    "validity_report",
]
