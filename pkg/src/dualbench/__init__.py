"""dualbench: a desk-scale simulator of two-photon entanglement duality."""

from .core import (
    PSI_PLUS,
    DensityMatrix,
    Mode,
    ModeUnitary,
    TwoPhotonState,
    apply_unitary,
    coincidence_amplitude,
    reduce_to_qubits,
)

__version__ = "0.1.0"

__all__ = [
    "PSI_PLUS",
    "DensityMatrix",
    "Mode",
    "ModeUnitary",
    "TwoPhotonState",
    "apply_unitary",
    "coincidence_amplitude",
    "reduce_to_qubits",
    "__version__",
]
