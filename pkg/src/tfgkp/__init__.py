"""Time-frequency GKP states of cavity-SPDC photon pairs: phase space, combs, HOM and error correction."""

__version__ = "0.1.0"

from .gkp import CombParams  # noqa: E402
from .units import UnitSystem  # noqa: E402

__all__ = ["CombParams", "UnitSystem", "__version__"]
