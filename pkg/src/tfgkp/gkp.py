"""Time-frequency GKP states.

Ideal code states are kept as explicit peak lists (position, weight).
Physical states are sampled spectra: Gaussian teeth of width ``tooth_width``
under a Gaussian envelope ``exp(-w^2 kappa^2 / 2)`` set by the time noise
``kappa``.

All quantities are in whatever unit system the :class:`CombParams` uses;
the normalized system (``fsr = 2 pi``) is the default.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np

from . import phase_space as ps
from .errors import BadPumpCenter, GridTooCoarse
from .units import UnitSystem

Label = Literal["0", "1", "+", "-"]
Basis = Literal["frequency", "time"]

LABELS = ("0", "1", "+", "-")
MIN_POINTS_PER_TOOTH = 8


@dataclass(frozen=True)
class CombParams:
    """Comb constants, all angular frequencies.

    ``fsr`` is the tooth spacing, ``tooth_width`` the Gaussian tooth width,
    ``pump_width`` / ``phasematch_width`` the widths of the energy-conservation
    and phase-matching envelopes, ``pump_center`` the pump frequency measured
    from twice the reference frequency, ``peak_count`` the half-range ``d`` of
    tooth indices kept by truncated models.
    """

    fsr: float = 2 * np.pi
    tooth_width: float = 2 * np.pi / 50
    pump_width: float = 0.0
    phasematch_width: float = 10.0
    pump_center: float = 0.0
    peak_count: int = 20

    def __post_init__(self):
        if self.fsr <= 0 or self.tooth_width <= 0:
            raise ValueError("fsr and tooth_width must be positive")
        if self.pump_width < 0 or self.phasematch_width <= 0:
            raise ValueError("envelope widths must be non-negative (phasematch > 0)")
        if self.peak_count < 1:
            raise ValueError("peak_count must be >= 1")

    @property
    def finesse_ratio(self) -> float:
        return self.fsr / self.tooth_width

    @property
    def high_finesse(self) -> bool:
        return self.finesse_ratio > 10

    @property
    def round_trip(self) -> float:
        return 2 * np.pi / self.fsr

    @property
    def pump_multiple(self) -> float:
        return self.pump_center / self.fsr

    def check_pump_center(self):
        k = self.pump_multiple
        if abs(k - round(k)) > 1e-9:
            raise BadPumpCenter(
                f"pump center must be a multiple of the FSR for a GKP qubit (got {k:.6f} FSR)")

    @classmethod
    def from_device(cls, fsr_hz: float, band_hz: float, tooth_width_hz: float,
                    pump_linewidth_hz: float = 100e3, peak_count: int | None = None):
        """Normalized comb from device numbers given as ordinary frequencies.

        ``band_hz`` is the full width of the two-photon spectrum at ``e^-2``
        of its peak intensity; it fixes the phase-matching width.
        Returns ``(params, units)``.
        """
        units = UnitSystem(fsr_hz)
        band = float(units.hz_to_norm(band_hz))
        d = peak_count if peak_count is not None else int(np.ceil(band / (2 * 2 * np.pi))) + 1
        params = cls(
            fsr=2 * np.pi,
            tooth_width=float(units.hz_to_norm(tooth_width_hz)),
            pump_width=float(units.hz_to_norm(pump_linewidth_hz)),
            phasematch_width=band / (2 * np.sqrt(2)),
            peak_count=d,
        )
        return params, units


def kappa_for_band(band: float) -> float:
    """Time-noise width whose envelope has full e^-2 intensity width ``band``."""
    return 2 * np.sqrt(2) / band


def airy_tooth_width(fsr: float, r: float) -> float:
    """Gaussian tooth width matching the Airy intensity FWHM for mirror amplitude ``r``."""
    big_r = r * r
    fwhm = (fsr / np.pi) * 2 * np.arcsin((1 - big_r) / (2 * np.sqrt(big_r)))
    return fwhm / (2 * np.sqrt(np.log(2)))


# --------------------------------------------------------------------------
# ideal states
# --------------------------------------------------------------------------

def _tooth_weight(label: str, k):
    k = np.asarray(k)
    if label == "0":
        return np.where(k % 2 == 0, 1.0, 0.0)
    if label == "1":
        return np.where(k % 2 == 1, 1.0, 0.0)
    if label == "+":
        return np.ones(k.shape)
    if label == "-":
        return np.where(k % 2 == 0, 1.0, -1.0)
    raise ValueError(f"unknown logical label {label!r}")


@dataclass(frozen=True)
class IdealGkpState:
    label: Label
    basis: Basis
    positions: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    teeth: np.ndarray = field(repr=False)
    comb: CombParams

    @property
    def spacing(self) -> float:
        """Lattice step in the state's own variable."""
        return self.comb.fsr if self.basis == "frequency" else self.comb.round_trip / 2


def ideal_gkp(label: Label, basis: Basis, comb: CombParams, d: int | None = None) -> IdealGkpState:
    """Truncated ideal code state; ``d`` defaults to ``comb.peak_count``.

    0/1 keep the ``2d+1`` lattice points ``2n`` / ``2n+1`` (n in [-d, d]);
    +/- keep teeth ``k`` in [-d, d] with weights 1 / (-1)^k.
    """
    comb.check_pump_center()
    d = comb.peak_count if d is None else d
    if d < 1:
        raise ValueError("d must be >= 1")
    n = np.arange(-d, d + 1)
    if label == "0":
        teeth = 2 * n
    elif label == "1":
        teeth = 2 * n + 1
    elif label in ("+", "-"):
        teeth = n
    else:
        raise ValueError(f"unknown logical label {label!r}")
    weights = _tooth_weight(label, teeth).astype(complex)
    if basis == "frequency":
        positions = comb.pump_center / 2 + teeth * comb.fsr
    elif basis == "time":
        step = comb.round_trip / 2
        positions = teeth * step
        weights = weights * np.exp(0.5j * comb.pump_center * positions)
    else:
        raise ValueError(f"unknown basis {basis!r}")
    weights /= np.sqrt(np.sum(np.abs(weights) ** 2))
    return IdealGkpState(label, basis, positions, weights, teeth, comb)


def ideal_overlap(a: IdealGkpState, b: IdealGkpState) -> complex:
    """<a|b> for ideal states in the same basis (Kronecker on peak positions)."""
    if a.basis != b.basis:
        raise ValueError("ideal overlaps need a common basis")
    tol = 1e-9 * a.spacing
    total = 0j
    for p, w in zip(a.positions, a.weights):
        hit = np.abs(b.positions - p) < tol
        if hit.any():
            total += np.conj(w) * b.weights[hit][0]
    return total


# --------------------------------------------------------------------------
# physical states
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PhysicalGkpState:
    spectrum: ps.SampledSpectrum
    kappa: float
    comb: CombParams
    label: str = "+"


def default_gkp_grid(comb: CombParams, kappa: float, points_per_tooth: int = 8,
                     span_sigmas: float = 6.0) -> ps.FrequencyGrid:
    """Grid through the pump-centred lattice, covering the envelope and teeth."""
    per_fsr = int(np.ceil(points_per_tooth * comb.fsr / comb.tooth_width))
    # keep half-lattice points on the grid for phase-space sampling
    per_fsr += per_fsr % 2
    dw = comb.fsr / per_fsr
    half = span_sigmas / kappa + span_sigmas * comb.tooth_width
    n_side = int(np.ceil(half / dw))
    return ps.FrequencyGrid.from_spacing(dw, n_side, n_side, center=comb.pump_center / 2)


def comb_amplitude(omega: np.ndarray, comb: CombParams, label: str = "+",
                   center: float | None = None) -> np.ndarray:
    """Sum over lattice teeth ``sign_k * T_k(w)`` for the teeth selected by ``label``.

    Only the teeth within 10 tooth widths of each sample are summed.
    """
    c = comb.pump_center / 2 if center is None else center
    x = (np.asarray(omega) - c) / comb.fsr
    k0 = np.rint(x).astype(np.int64)
    reach = int(np.ceil(10 * comb.tooth_width / comb.fsr)) + 1
    out = np.zeros(x.shape, dtype=float)
    for dk in range(-reach, reach + 1):
        k = k0 + dk
        out += _tooth_weight(label, k) * np.exp(-((x - k) * comb.fsr) ** 2
                                                / (2 * comb.tooth_width**2))
    return out


def physical_gkp(label: Label, comb: CombParams, kappa: float,
                 grid: ps.FrequencyGrid | None = None,
                 order: Literal["time_after_frequency", "frequency_after_time"]
                 = "time_after_frequency") -> PhysicalGkpState:
    """Noisy code state from Gaussian frequency (``tooth_width``) and time (``kappa``) noise.

    ``order="time_after_frequency"`` integrates the Kraus map with the time
    displacement applied last, so the envelope multiplies the sampled
    frequency.  The other order weights each tooth by the envelope at its
    centre instead.
    """
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    comb.check_pump_center()
    if grid is None:
        grid = default_gkp_grid(comb, kappa)
    if grid.spacing > comb.tooth_width / MIN_POINTS_PER_TOOTH:
        raise GridTooCoarse(
            f"grid spacing {grid.spacing:.3g} does not resolve tooth width "
            f"{comb.tooth_width:.3g} with {MIN_POINTS_PER_TOOTH} points")
    w = grid.omega
    c = comb.pump_center / 2
    if order == "time_after_frequency":
        amp = comb_amplitude(w, comb, label) * np.exp(-((w - c) ** 2) * kappa**2 / 2)
    elif order == "frequency_after_time":
        x = (w - c) / comb.fsr
        k0 = np.rint(x).astype(np.int64)
        reach = int(np.ceil(10 * comb.tooth_width / comb.fsr)) + 1
        amp = np.zeros(w.shape)
        for dk in range(-reach, reach + 1):
            k = k0 + dk
            center = k * comb.fsr
            amp += (_tooth_weight(label, k) * np.exp(-(center**2) * kappa**2 / 2)
                    * np.exp(-((x - k) * comb.fsr) ** 2 / (2 * comb.tooth_width**2)))
    else:
        raise ValueError(f"unknown order {order!r}")
    spec = ps.normalize(ps.SampledSpectrum(grid, amp))
    return PhysicalGkpState(spec, kappa, comb, label)


def count_teeth(spectrum: ps.SampledSpectrum, comb: CombParams,
                threshold: float = np.exp(-2)) -> int:
    """Number of lattice teeth whose peak intensity exceeds ``threshold`` x max."""
    w = spectrum.omega
    c = comb.pump_center / 2
    k = np.arange(np.ceil((w[0] - c) / comb.fsr), np.floor((w[-1] - c) / comb.fsr) + 1)
    centers = c + k * comb.fsr
    intens = np.interp(centers, w, spectrum.intensity())
    return int(np.count_nonzero(intens > threshold * intens.max()))


# --------------------------------------------------------------------------
# gates and measurements
# --------------------------------------------------------------------------

_Z_LABEL = {"0": "0", "1": "1", "+": "-", "-": "+"}
_Z_LABEL_TIME = {"0": "1", "1": "0", "+": "+", "-": "-"}


def z_gate(state):
    """Logical Z by a time displacement of minus half a round trip."""
    tau = -state.comb.round_trip / 2
    if isinstance(state, IdealGkpState):
        if state.basis == "frequency":
            weights = state.weights * np.exp(-1j * state.positions * tau)
            return replace(state, weights=weights, label=_Z_LABEL[state.label])
        # in the time basis D_t(tau) moves every peak by -tau, one lattice step
        return replace(state, positions=state.positions - tau, teeth=state.teeth + 1,
                       label=_Z_LABEL_TIME[state.label])
    spec = ps.displace(state.spectrum, ps.DisplacementSpec(0.0, tau))
    return replace(state, spectrum=spec, label=_Z_LABEL.get(state.label, state.label))


def stabilizer_expectation(state, which: Literal["frequency_stab", "time_stab"]) -> complex:
    """<psi|D(2 fsr)|psi> or <psi|D_t(round_trip)|psi>.

    Ideal states are evaluated on the infinite lattice their peak list
    represents, so code states give exactly 1.
    """
    comb = state.comb
    if isinstance(state, IdealGkpState):
        if state.basis == "frequency":
            if which == "frequency_stab":
                shifted = _tooth_weight(state.label, state.teeth - 2).astype(complex)
                base = _tooth_weight(state.label, state.teeth).astype(complex)
                return complex(np.vdot(base, shifted) / np.vdot(base, base))
            phases = np.exp(-1j * state.positions * comb.round_trip)
            return complex(np.sum(np.abs(state.weights) ** 2 * phases))
        if which == "frequency_stab":
            phases = np.exp(-1j * 2 * comb.fsr * state.positions)
            return complex(np.sum(np.abs(state.weights) ** 2 * phases))
        # time-basis lattice step is round_trip/2, so the stabilizer moves two peaks
        shifted = _tooth_weight(state.label, state.teeth + 2).astype(complex)
        base = _tooth_weight(state.label, state.teeth).astype(complex)
        phase = np.exp(0.5j * comb.pump_center * comb.round_trip)
        return complex(phase * np.vdot(base, shifted) / np.vdot(base, base))
    spec = state.spectrum
    if which == "frequency_stab":
        moved = ps.displace(spec, ps.DisplacementSpec(2 * comb.fsr, 0.0))
    elif which == "time_stab":
        moved = ps.displace(spec, ps.DisplacementSpec(0.0, comb.round_trip))
    else:
        raise ValueError(f"unknown stabilizer {which!r}")
    return ps.inner(spec, moved)


def _bin_parity(x: np.ndarray) -> np.ndarray:
    """Nearest-lattice-point parity of ``x`` (lattice units); edges go to even."""
    lo = np.ceil(x - 0.5)
    hi = np.floor(x + 0.5)
    k = np.where(lo % 2 == 0, lo, hi)
    return (k % 2).astype(int)


def logical_readout(state, basis: Basis) -> tuple[float, float]:
    """Probabilities of logical 0 and 1 from nearest-lattice-point binning."""
    comb = state.comb
    if isinstance(state, IdealGkpState):
        if state.basis == basis:
            x = (state.positions - (comb.pump_center / 2 if basis == "frequency" else 0.0))
            parity = _bin_parity(x / state.spacing)
            prob = np.abs(state.weights) ** 2
            p1 = float(prob[parity == 1].sum())
            return 1.0 - p1, p1
        # frequency-basis 0/1 are time-basis +/- and vice versa
        dual = {"0": "+", "1": "-", "+": "0", "-": "1"}[state.label]
        return {"0": (1.0, 0.0), "1": (0.0, 1.0)}.get(dual, (0.5, 0.5))
    spec = state.spectrum
    if basis == "frequency":
        x = (spec.omega - comb.pump_center / 2) / comb.fsr
        dens = spec.intensity()
        weights = np.full(dens.size, spec.grid.spacing)
        weights[[0, -1]] *= 0.5
        mass = dens * weights
    elif basis == "time":
        amp = ps.to_time_domain(spec)
        x = amp.t / (comb.round_trip / 2)
        mass = amp.intensity() * amp.dt
    else:
        raise ValueError(f"unknown basis {basis!r}")
    parity = _bin_parity(x)
    total = mass.sum()
    p1 = float(mass[parity == 1].sum() / total)
    return 1.0 - p1, p1
