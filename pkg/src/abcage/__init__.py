"""Non-Abelian Aharonov-Bohm caging on a rhombic lattice encoded in a single
trapped-ion qudit and its motional Fock ladder."""

from .gauge_algebra import (
    CagingPrediction,
    GaugeConfig,
    interference_matrix,
    is_abelian,
    loop_operator,
    nilpotency_index,
    predict_caging,
    validate_unitary,
)

__version__ = "0.1.0"
