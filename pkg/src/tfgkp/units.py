"""SI <-> normalized unit conversion.

In normalized units the free spectral range is ``2*pi`` so the cavity round
trip time is exactly 1.  Angular frequencies scale by ``1/f_fsr`` and times
by ``f_fsr`` (``f_fsr`` the FSR in Hz).
"""

from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi
SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class UnitSystem:
    fsr_hz: float

    def __post_init__(self):
        if not self.fsr_hz > 0:
            raise ValueError(f"fsr_hz must be positive, got {self.fsr_hz}")

    @property
    def round_trip_s(self) -> float:
        return 1.0 / self.fsr_hz

    def omega_to_norm(self, omega_rad_s):
        return np.asarray(omega_rad_s) / self.fsr_hz

    def omega_to_si(self, omega_norm):
        return np.asarray(omega_norm) * self.fsr_hz

    def hz_to_norm(self, f_hz):
        """Ordinary frequency in Hz -> normalized angular frequency."""
        return TWO_PI * np.asarray(f_hz) / self.fsr_hz

    def norm_to_hz(self, omega_norm):
        return np.asarray(omega_norm) * self.fsr_hz / TWO_PI

    def time_to_norm(self, t_s):
        return np.asarray(t_s) * self.fsr_hz

    def time_to_si(self, t_norm):
        return np.asarray(t_norm) / self.fsr_hz


def wavelength_band_to_hz(bandwidth_nm: float, center_nm: float) -> float:
    """Full spectral width in Hz of a band ``bandwidth_nm`` wide around ``center_nm``."""
    lam = center_nm * 1e-9
    return SPEED_OF_LIGHT * bandwidth_nm * 1e-9 / lam**2
