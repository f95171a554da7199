"""Geometric group testing: points as items, axis-parallel boxes as tests."""
from .geometry import Box, Config, compress_to_grid, contains, corners, incidence_matrix, induce
from .setsystem import (
    AT_MOST,
    EXACTLY,
    BudgetExceeded,
    SetSystem,
    Verdict,
    decode_by_signature,
    decode_disjunct,
    run_tests,
    signature,
    verify_disjunct,
    verify_separable,
)

__all__ = [
    "AT_MOST", "EXACTLY", "Box", "BudgetExceeded", "Config", "SetSystem", "Verdict",
    "compress_to_grid", "contains", "corners", "decode_by_signature", "decode_disjunct",
    "incidence_matrix", "induce", "run_tests", "signature", "verify_disjunct", "verify_separable",
]
__version__ = "0.1.0"
