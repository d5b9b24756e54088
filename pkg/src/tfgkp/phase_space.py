"""Single-photon spectral states and the chronocyclic phase space.

Conventions used throughout the package::

    S~(t)     = 1/sqrt(2 pi) * int S(w) exp(-i w t) dw
    D(mu)     : S(w) -> S(w - mu)                  (frequency displacement)
    D_t(tau)  : S(w) -> S(w) exp(-i w tau)         (time displacement)
    W(w, t)   = 1/pi * int dw' exp(2 i w' t) S(w - w') S*(w + w')

With these choices ``D(mu) D_t(tau) = exp(i mu tau) D_t(tau) D(mu)`` and both
marginals of ``W`` are exact probability densities.

The Wigner transform needs ``S`` at half-integer grid offsets.  They are
obtained by band-limited (FFT) upsampling, so the returned frequency axis has
spacing ``dw/2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .errors import GridTooCoarse, OffGridShift, ZeroState

Ordering = Literal["normal", "antinormal", "symmetric"]

TIME_WINDOW_LEAK = 1e-3
SHIFT_LOSS = 1e-6


@dataclass(frozen=True)
class FrequencyGrid:
    omega_min: float
    omega_max: float
    n_points: int
    unit_mode: Literal["normalized", "SI"] = "normalized"

    def __post_init__(self):
        if self.n_points < 2:
            raise ValueError("a frequency grid needs at least 2 points")
        if not self.omega_max > self.omega_min:
            raise ValueError("omega_max must exceed omega_min")

    @classmethod
    def centered(cls, half_width: float, n_points: int, center: float = 0.0, **kw):
        return cls(center - half_width, center + half_width, n_points, **kw)

    @classmethod
    def from_spacing(cls, spacing: float, n_below: int, n_above: int,
                     center: float = 0.0, **kw):
        """Grid containing ``center`` exactly, with ``n_below``/``n_above`` extra points."""
        return cls(center - n_below * spacing, center + n_above * spacing,
                   n_below + n_above + 1, **kw)

    @property
    def spacing(self) -> float:
        return (self.omega_max - self.omega_min) / (self.n_points - 1)

    @property
    def omega(self) -> np.ndarray:
        return np.linspace(self.omega_min, self.omega_max, self.n_points)

    def refined(self) -> "FrequencyGrid":
        """Grid with half the spacing over the same interval (2n-1 points)."""
        return FrequencyGrid(self.omega_min, self.omega_max, 2 * self.n_points - 1,
                             self.unit_mode)


def _readonly(a, dtype) -> np.ndarray:
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SampledSpectrum:
    grid: FrequencyGrid
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amp = _readonly(self.amplitudes, complex)
        if amp.shape != (self.grid.n_points,):
            raise ValueError(f"amplitudes shape {amp.shape} does not match grid "
                             f"({self.grid.n_points},)")
        object.__setattr__(self, "amplitudes", amp)

    @property
    def omega(self) -> np.ndarray:
        return self.grid.omega

    def intensity(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.sqrt(np.trapezoid(self.intensity(), dx=self.grid.spacing)))

    def with_amplitudes(self, amplitudes) -> "SampledSpectrum":
        return SampledSpectrum(self.grid, amplitudes)

    @classmethod
    def from_function(cls, grid: FrequencyGrid, func, normalized=True):
        spec = cls(grid, func(grid.omega))
        return normalize(spec) if normalized else spec


@dataclass(frozen=True)
class TemporalAmplitude:
    t: np.ndarray = field(repr=False)
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "t", _readonly(self.t, float))
        object.__setattr__(self, "amplitudes", _readonly(self.amplitudes, complex))

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])

    def intensity(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.intensity()) * self.dt))


@dataclass(frozen=True)
class WignerGrid:
    omega: np.ndarray = field(repr=False)
    t: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    max_imag: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "omega", _readonly(self.omega, float))
        object.__setattr__(self, "t", _readonly(self.t, float))
        object.__setattr__(self, "values", _readonly(self.values, float))

    @property
    def d_omega(self) -> float:
        return float(self.omega[1] - self.omega[0])

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0])

    def total(self) -> float:
        return float(self.values.sum() * self.d_omega * self.dt)


@dataclass(frozen=True)
class DisplacementSpec:
    mu: float = 0.0
    tau: float = 0.0
    ordering: Ordering = "normal"


# --------------------------------------------------------------------------
# basic state operations
# --------------------------------------------------------------------------

def inner(a: SampledSpectrum, b: SampledSpectrum) -> complex:
    """<a|b> by trapezoidal quadrature; both states must share a grid."""
    if a.grid != b.grid:
        raise ValueError("states live on different grids")
    return complex(np.trapezoid(np.conj(a.amplitudes) * b.amplitudes, dx=a.grid.spacing))


def normalize(spectrum: SampledSpectrum) -> SampledSpectrum:
    n = spectrum.norm()
    if n == 0.0:
        raise ZeroState("cannot normalize an all-zero spectrum")
    return spectrum.with_amplitudes(spectrum.amplitudes / n)


def natural_time_axis(grid: FrequencyGrid, n_time: int | None = None) -> np.ndarray:
    """Uniform time axis dual to ``grid`` under the DFT, centered on t = 0.

    Spans ``[-pi/dw, pi/dw)`` with ``n_time`` points (default ``n_points``).
    """
    m = grid.n_points if n_time is None else n_time
    dt = 2 * np.pi / (m * grid.spacing)
    return (np.arange(m) - m // 2) * dt


def to_time_domain(spectrum: SampledSpectrum, t: np.ndarray | None = None,
                   check_window: bool = True) -> TemporalAmplitude:
    grid = spectrum.grid
    dw = grid.spacing
    s = spectrum.amplitudes
    if t is None:
        m = grid.n_points
        t = natural_time_axis(grid)
        # sum_k s_k exp(-i k dw t_j) with t_j = (j - m//2) dt  ->  shifted FFT
        raw = np.fft.fft(s)
        raw = np.roll(raw, m // 2)
        amp = raw * np.exp(-1j * grid.omega_min * t) * dw / np.sqrt(2 * np.pi)
        if check_window:
            _check_time_window(np.abs(amp) ** 2, t)
    else:
        t = np.asarray(t, dtype=float)
        amp = np.empty(t.shape, dtype=complex)
        w = grid.omega
        for lo in range(0, t.size, 512):
            sl = slice(lo, lo + 512)
            amp[sl] = np.exp(-1j * np.outer(t[sl], w)) @ s
        amp *= dw / np.sqrt(2 * np.pi)
    return TemporalAmplitude(t, amp)


def _check_time_window(density: np.ndarray, t: np.ndarray):
    total = density.sum()
    if total == 0:
        return
    edge = max(1, t.size // 20)
    leak = (density[:edge].sum() + density[-edge:].sum()) / total
    if leak > TIME_WINDOW_LEAK:
        raise GridTooCoarse(
            f"{leak:.2e} of the temporal density sits at the edge of the time window; "
            "refine the frequency grid spacing")


def shift_frequency(amplitudes: np.ndarray, shift_points: float) -> np.ndarray:
    """Translate samples by ``shift_points`` grid steps (band-limited).

    Zero padding to twice the length keeps the translation from wrapping.
    Integer shifts reduce to an exact translation.
    """
    n = amplitudes.size
    if shift_points == 0:
        return amplitudes.copy()
    padded = np.zeros(2 * n, dtype=complex)
    padded[:n] = amplitudes
    f = np.fft.fftfreq(2 * n)
    shifted = np.fft.ifft(np.fft.fft(padded) * np.exp(-2j * np.pi * f * shift_points))
    kept = shifted[:n]
    total = np.sum(np.abs(amplitudes) ** 2)
    lost = np.sum(np.abs(shifted[n:]) ** 2)
    if total > 0 and lost / total > SHIFT_LOSS:
        raise OffGridShift(f"shift of {shift_points:.3f} grid steps moves "
                           f"{lost / total:.2e} of the energy off the grid")
    if float(shift_points).is_integer():
        # exact translation; scrub FFT round-off outside the support
        kept = np.zeros(n, dtype=complex)
        k = int(shift_points)
        if k > 0:
            kept[k:] = amplitudes[:n - k]
        else:
            kept[:n + k] = amplitudes[-k:]
    return kept


def displace(spectrum: SampledSpectrum, spec: DisplacementSpec) -> SampledSpectrum:
    grid = spectrum.grid
    w = grid.omega
    s = spectrum.amplitudes
    if spec.ordering not in ("normal", "antinormal", "symmetric"):
        raise ValueError(f"unknown ordering {spec.ordering!r}")
    if spec.ordering in ("normal", "symmetric"):
        # D(mu) D_t(tau): time phase first, then translate
        s = s * np.exp(-1j * w * spec.tau) if spec.tau else s
        s = shift_frequency(s, spec.mu / grid.spacing)
        if spec.ordering == "symmetric":
            s = s * np.exp(-0.5j * spec.tau * spec.mu)
    else:
        s = shift_frequency(s, spec.mu / grid.spacing)
        s = s * np.exp(-1j * w * spec.tau) if spec.tau else s
    return spectrum.with_amplitudes(s)


def characteristic_function(spectrum: SampledSpectrum, spec: DisplacementSpec) -> complex:
    """<psi| D^dagger(mu, tau) |psi> for the requested operator ordering."""
    return np.conj(inner(spectrum, displace(spectrum, spec)))


def parity_expectation(spectrum: SampledSpectrum) -> complex:
    """<psi|P|psi> with P|w> = |-w>; needs a grid symmetric about 0."""
    grid = spectrum.grid
    if not np.isclose(grid.omega_min, -grid.omega_max, atol=1e-12 * grid.spacing):
        raise ValueError("parity needs a grid symmetric about omega = 0")
    s = spectrum.amplitudes
    return complex(np.trapezoid(np.conj(s) * s[::-1], dx=grid.spacing))


# --------------------------------------------------------------------------
# Wigner transform
# --------------------------------------------------------------------------

def upsample2(amplitudes: np.ndarray) -> np.ndarray:
    """Band-limited interpolation onto the half-spacing grid (2n-1 samples).

    Even output indices reproduce the input exactly.
    """
    n = amplitudes.size
    spec = np.fft.fft(amplitudes)
    padded = np.zeros(2 * n, dtype=complex)
    half = n // 2
    if n % 2:
        padded[:half + 1] = spec[:half + 1]
        padded[-half:] = spec[-half:]
    else:
        padded[:half] = spec[:half]
        padded[-half + 1:] = spec[-half + 1:]
        padded[half] = padded[-half] = 0.5 * spec[half]
    fine = 2 * np.fft.ifft(padded)[:2 * n - 1]
    fine[::2] = amplitudes
    return fine


def _lag_matrix(fine: np.ndarray, rows: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """P[j, m] = f[j-m] conj(f[j+m]) for lags |m| <= L, zero off the grid."""
    n_f = fine.size
    lmax = (n_f - 1) // 2
    lags = np.arange(-lmax, lmax + 1)
    j = np.arange(n_f) if rows is None else np.asarray(rows)
    lo = j[:, None] - lags[None, :]
    hi = j[:, None] + lags[None, :]
    valid = (lo >= 0) & (lo < n_f) & (hi >= 0) & (hi < n_f)
    lo = np.where(valid, lo, 0)
    hi = np.where(valid, hi, 0)
    p = np.where(valid, fine[lo] * np.conj(fine[hi]), 0.0)
    return p, lags


def wigner(spectrum: SampledSpectrum, t: np.ndarray | None = None,
           n_time: int | None = None) -> WignerGrid:
    """Chronocyclic Wigner distribution on the half-spacing frequency grid.

    With ``t=None`` the time axis is the natural periodic one from
    :func:`wigner_time_axis` and the lag sum is done by FFT; both marginals
    are then exact up to interpolation error.  An explicit ``t`` array is
    evaluated by direct summation.
    """
    grid = spectrum.grid
    dw = grid.spacing
    fine = upsample2(spectrum.amplitudes)
    omega = grid.refined().omega
    p, lags = _lag_matrix(fine)
    if t is None:
        t = wigner_time_axis(grid, n_time)
        m = t.size
        buf = np.zeros((fine.size, m), dtype=complex)
        buf[:, lags % m] = p
        # sum_l P[l] exp(i l dw t_k) with t_k = (k - m//2) dt and dw dt = 2 pi / m
        vals = np.roll(np.fft.ifft(buf, axis=1) * m, m // 2, axis=1)
    else:
        t = np.asarray(t, dtype=float)
        vals = p @ np.exp(1j * np.outer(lags * dw, t))
    vals = vals * dw / (2 * np.pi)
    max_imag = float(np.max(np.abs(vals.imag))) if vals.size else 0.0
    return WignerGrid(omega, t, vals.real, max_imag)


def wigner_time_axis(grid: FrequencyGrid, n_time: int | None = None) -> np.ndarray:
    """Periodic time axis used by :func:`wigner`; period ``2 pi / dw``.

    ``n_time`` must exceed ``2 (n_points - 1)`` to avoid lag aliasing; the
    default is ``2 n_points``.
    """
    m = 2 * grid.n_points if n_time is None else int(n_time)
    if m < 2 * grid.n_points - 1:
        raise GridTooCoarse(f"n_time={m} aliases lags; need >= {2 * grid.n_points - 1}")
    dt = 2 * np.pi / (m * grid.spacing)
    return (np.arange(m) - m // 2) * dt


def wigner_point(spectrum: SampledSpectrum, omega: float, t: float) -> float:
    """W(omega, t) at a single phase-space point.

    ``omega`` is snapped to the half-spacing grid after a band-limited
    frequency translation of the state, so any in-band point is allowed.
    """
    return float(wigner_points(spectrum, [omega], [t])[0])


def wigner_points(spectrum: SampledSpectrum, omegas, ts) -> np.ndarray:
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    omegas, ts = np.broadcast_arrays(omegas, ts)
    grid = spectrum.grid
    dw = grid.spacing
    half = dw / 2
    out = np.empty(omegas.shape)
    fine_cache: dict[float, np.ndarray] = {}
    for idx, (w0, t0) in enumerate(zip(omegas.ravel(), ts.ravel())):
        pos = (w0 - grid.omega_min) / half
        j = int(np.rint(pos))
        frac = pos - j
        key = round(frac, 12)
        if key not in fine_cache:
            amp = spectrum.amplitudes
            if abs(frac) > 1e-9:
                # translating the state by -frac*half moves w0 onto the grid point j
                amp = shift_frequency(amp, -frac / 2)
            fine_cache[key] = upsample2(amp)
        fine = fine_cache[key]
        n_f = fine.size
        if not 0 <= j < n_f:
            out.flat[idx] = 0.0
            continue
        lmax = min(j, n_f - 1 - j)
        lags = np.arange(-lmax, lmax + 1)
        prod = fine[j - lags] * np.conj(fine[j + lags])
        val = np.sum(prod * np.exp(1j * lags * dw * t0)) * dw / (2 * np.pi)
        out.flat[idx] = val.real
    return out


def marginal(w: WignerGrid, over: Literal["time", "frequency"]) -> np.ndarray:
    """Integrate the Wigner grid over one axis.

    ``over="time"`` gives the spectral density on ``w.omega``;
    ``over="frequency"`` gives the arrival-time density on ``w.t``.
    """
    if over == "time":
        return w.values.sum(axis=1) * w.dt
    if over == "frequency":
        return w.values.sum(axis=0) * w.d_omega
    raise ValueError(f"over must be 'time' or 'frequency', got {over!r}")


def refined_spectrum(spectrum: SampledSpectrum) -> SampledSpectrum:
    """The same state sampled on the half-spacing grid (not renormalized)."""
    return SampledSpectrum(spectrum.grid.refined(), upsample2(spectrum.amplitudes))


def characteristic_from_wigner(w: WignerGrid, mu, tau) -> np.ndarray:
    """chi(mu, tau) = iint W(w, t) exp(i (tau w + mu t)) dw dt by quadrature."""
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    e_w = np.exp(1j * np.outer(tau, w.omega))           # (n_tau, n_w)
    e_t = np.exp(1j * np.outer(w.t, mu))                # (n_t, n_mu)
    return (e_w @ w.values @ e_t) * w.d_omega * w.dt    # (n_tau, n_mu)


def gaussian_spectrum(grid: FrequencyGrid, center: float = 0.0, width: float = 1.0,
                      delay: float = 0.0) -> SampledSpectrum:
    """Normalized Gaussian amplitude exp(-(w-w1)^2 / (2 width^2)) exp(i w delay)."""
    w = grid.omega
    amp = np.exp(-((w - center) ** 2) / (2 * width**2)) * np.exp(1j * w * delay)
    return normalize(SampledSpectrum(grid, amp))
