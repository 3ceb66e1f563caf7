"""Vacuum-fluctuation engines: qubit chains, measurement dynamics and oscillator networks."""

__version__ = "0.1.0"

from .errors import ConfigError, EngineError, RegimeWarning
from .metrics import EngineMetrics, GroundStateEnergies, metrics_from_energies

__all__ = [
    "ConfigError",
    "EngineError",
    "EngineMetrics",
    "GroundStateEnergies",
    "RegimeWarning",
    "__version__",
    "metrics_from_energies",
]
