"""Phase estimation with Gaussian inputs, homodyne detection and an external phase reference."""

from .gaussian_core import (
    Coherent,
    DisplacedSqueezed,
    DisplacedThermal,
    FiniteLO,
    GaussianState,
    IdealLO,
    ProtocolConfig,
    SqueezedThermal,
    SqueezedVacuum,
    Thermal,
    signal_amplitude,
)

__all__ = [
    "Coherent",
    "DisplacedSqueezed",
    "DisplacedThermal",
    "FiniteLO",
    "GaussianState",
    "IdealLO",
    "ProtocolConfig",
    "SqueezedThermal",
    "SqueezedVacuum",
    "Thermal",
    "signal_amplitude",
]
__version__ = "0.1.0"
