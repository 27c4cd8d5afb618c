"""Random ternary projections with l1 (ISTA) recovery, the comparison baseline."""
from .models import BP_METHOD_LABEL, BpConfig, IstaResult
from .bp import (
    DctBasis,
    ZeroOperatorError,
    bp_reconstruct,
    bp_reconstruct_batch,
    dct_basis,
    ista_solve,
    ista_solve_batch,
    random_ternary_projection,
    soft_threshold,
)

__all__ = [
    "BP_METHOD_LABEL",
    "BpConfig",
    "IstaResult",
    "DctBasis",
    "ZeroOperatorError",
    "bp_reconstruct",
    "bp_reconstruct_batch",
    "dct_basis",
    "ista_solve",
    "ista_solve_batch",
    "random_ternary_projection",
    "soft_threshold",
]
