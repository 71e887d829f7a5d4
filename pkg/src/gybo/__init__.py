"""Generalized Yang-Baxter operators: construction, verification and entanglement analysis."""
from . import operator_zoo, search, slocc, spectral, tensor_core, ybe_verify
from .operator_zoo import CASES, GybeInstance, instantiate_case
from .slocc import classify3, ilo_unitarizability_test, three_tangle
from .ybe_verify import gybe_residual, verify_case

__version__ = "0.1.0"

__all__ = [
    "operator_zoo", "search", "slocc", "spectral", "tensor_core", "ybe_verify",
    "CASES", "GybeInstance", "instantiate_case", "classify3", "ilo_unitarizability_test",
    "three_tangle", "gybe_residual", "verify_case",
]
