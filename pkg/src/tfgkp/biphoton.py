"""Cavity-SPDC biphoton states.

The joint spectral amplitude is the product of an energy-conservation
envelope ``f+(w+)``, a phase-matching envelope ``f-(w-)`` (``w+- = (ws +- wi)/2``)
and one cavity response per photon.  Two cavity models are available:

* ``gaussian_comb``: a sum of Gaussian teeth ``T_n(w) = exp(-(w - n fsr)^2 / (2 dw^2))``
* ``fabry_perot``: the Airy amplitude ``(1 - r^2) e^{i phi} / (1 - r^2 e^{2 i phi})``
  with single-pass phase

      phi(w) = pi * w_deg / fsr + pi * (w - w_deg) / fsr_x + beta2 * (w - w_deg)^2

  where ``fsr_x = fsr +- birefringence/2`` for the signal/idler polarization
  and ``w_deg = pump_center / 2``.  Dispersion and birefringence are a
  phenomenological model, not a device simulation.

With ``pump_width == 0`` the builder returns :class:`DegenerateJsa`, a 1-D
amplitude ``g(nu)`` over ``ws = w_deg + nu``, ``wi = w_deg - nu``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np
from scipy.signal import find_peaks
from scipy.special import erfc

from . import phase_space as ps
from .errors import BudgetExceeded, EnvelopeClipped, GridTooCoarse
from .gkp import CombParams, comb_amplitude

CLIP_THRESHOLD = 1e-3
WIGNER_BUDGET = 2**26


@dataclass(frozen=True)
class CavityModel:
    kind: Literal["gaussian_comb", "fabry_perot", "none"] = "gaussian_comb"
    reflectivity: float = 0.0
    beta2: float = 0.0
    birefringence: float = 0.0

    def __post_init__(self):
        if self.kind not in ("gaussian_comb", "fabry_perot", "none"):
            raise ValueError(f"unknown cavity kind {self.kind!r}")
        if not 0.0 <= self.reflectivity < 1.0:
            raise ValueError("reflectivity must lie in [0, 1)")

    def linewidth(self, comb: CombParams) -> float:
        """Characteristic tooth width used for grid-resolution checks."""
        if self.kind == "gaussian_comb":
            return comb.tooth_width
        if self.kind == "fabry_perot":
            # r = 0 still needs FSR resolution to keep delays of a round trip alias-free
            if self.reflectivity == 0:
                return comb.fsr
            return min(airy_fwhm(comb.fsr, self.reflectivity), comb.fsr)
        return np.inf


def airy_fwhm(fsr: float, r: float) -> float:
    """Intensity FWHM of the Airy response for mirror amplitude reflectivity ``r``.

    Returns ``fsr`` when the contrast is too low for a half-maximum to exist.
    """
    big_r = r * r
    arg = (1 - big_r) / (2 * np.sqrt(big_r)) if big_r > 0 else np.inf
    if arg >= 1:
        return fsr
    return (2 * fsr / np.pi) * np.arcsin(arg)


def single_pass_phase(model: CavityModel, comb: CombParams, omega,
                      photon: Literal["signal", "idler"] = "signal"):
    w_deg = comb.pump_center / 2
    sign = 1.0 if photon == "signal" else -1.0
    fsr_x = comb.fsr + sign * model.birefringence / 2
    x = np.asarray(omega, dtype=float) - w_deg
    return np.pi * w_deg / comb.fsr + np.pi * x / fsr_x + model.beta2 * x**2


def cavity_function(model: CavityModel, comb: CombParams, omega,
                    photon: Literal["signal", "idler"] = "signal"):
    """Complex cavity response at ``omega``."""
    omega = np.asarray(omega, dtype=float)
    if model.kind == "none":
        return np.ones(omega.shape, dtype=complex)
    if model.kind == "gaussian_comb":
        return comb_amplitude(omega, comb, "+", center=0.0).astype(complex)
    big_r = model.reflectivity**2
    phi = single_pass_phase(model, comb, omega, photon)
    return (1 - big_r) * np.exp(1j * phi) / (1 - big_r * np.exp(2j * phi))


def gaussian_comb_mismatch(comb: CombParams, r: float, n_points: int = 4001) -> float:
    """Absolute L2 distance over one FSR between the Airy intensity tooth and its
    area-matched unit-peak Gaussian.

    The distance shrinks as r -> 1 because the tooth narrows; the relative
    shape error saturates near the Lorentzian value (~0.28).
    """
    x = np.linspace(-comb.fsr / 2, comb.fsr / 2, n_points)
    fp = np.abs(cavity_function(CavityModel("fabry_perot", r), comb, x)) ** 2
    width = np.trapezoid(fp, x) / np.sqrt(2 * np.pi)
    gauss = np.exp(-(x**2) / (2 * width**2))
    return float(np.sqrt(np.trapezoid((fp - gauss) ** 2, x)))


def ellipticity(params: CombParams) -> float:
    """Ellipticity R of the JSI envelope; negative for anti-correlated pairs."""
    if params.pump_width <= 0 or params.phasematch_width <= 0:
        raise ValueError("ellipticity needs positive envelope widths")
    a = 1 / params.phasematch_width**2
    b = 1 / params.pump_width**2
    return (a - b) / (a + b)


# --------------------------------------------------------------------------
# state containers
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class JointSpectralAmplitude:
    omega_s: np.ndarray = field(repr=False)
    omega_i: np.ndarray = field(repr=False)
    amplitudes: np.ndarray = field(repr=False)
    params: CombParams
    cavity: CavityModel

    @property
    def d_s(self) -> float:
        return float(self.omega_s[1] - self.omega_s[0])

    @property
    def d_i(self) -> float:
        return float(self.omega_i[1] - self.omega_i[0])

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2) * self.d_s * self.d_i))


@dataclass(frozen=True)
class DegenerateJsa:
    """Narrow-pump limit: amplitude along the anti-diagonal only."""

    grid: ps.FrequencyGrid
    amplitudes: np.ndarray = field(repr=False)
    params: CombParams
    cavity: CavityModel

    @property
    def nu(self) -> np.ndarray:
        return self.grid.omega

    def omega_signal(self) -> np.ndarray:
        return self.params.pump_center / 2 + self.nu

    def omega_idler(self) -> np.ndarray:
        return self.params.pump_center / 2 - self.nu

    def as_spectrum(self) -> ps.SampledSpectrum:
        return ps.SampledSpectrum(self.grid, self.amplitudes)


@dataclass(frozen=True)
class JointIntensityGrid:
    axis_1: np.ndarray = field(repr=False)
    axis_2: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    kind: Literal["frequency", "time"] = "frequency"

    def total(self) -> float:
        d1 = self.axis_1[1] - self.axis_1[0]
        d2 = self.axis_2[1] - self.axis_2[0]
        return float(self.values.sum() * d1 * d2)


# --------------------------------------------------------------------------
# builders
# --------------------------------------------------------------------------

def default_nu_grid(params: CombParams, cavity: CavityModel, points_per_line: int = 16,
                    span_sigmas: float = 5.0) -> ps.FrequencyGrid:
    """Anti-diagonal grid through the degeneracy point."""
    line = cavity.linewidth(params)
    dw = min(line / points_per_line, params.phasematch_width / 8)
    # integer points per FSR keeps every tooth on the same sub-grid phase
    per_fsr = int(np.ceil(params.fsr / dw))
    dw = params.fsr / per_fsr
    n_side = int(np.ceil(span_sigmas * params.phasematch_width / dw))
    return ps.FrequencyGrid.from_spacing(dw, n_side, n_side)


def default_2d_grids(params: CombParams, cavity: CavityModel, points_per_line: int = 4,
                     span_sigmas: float = 5.0):
    widths = [params.phasematch_width, params.pump_width, cavity.linewidth(params)]
    dw = min(w for w in widths if w > 0) / points_per_line
    half = span_sigmas * max(params.phasematch_width, params.pump_width)
    n_side = int(np.ceil(half / dw))
    center = params.pump_center / 2
    g = ps.FrequencyGrid.from_spacing(dw, n_side, n_side, center=center)
    return g, g


def _envelope_clip_fraction(params: CombParams, omega_s, omega_i) -> float:
    """Upper bound on the envelope energy outside the rectangle (union bound on marginals)."""
    center = params.pump_center / 2
    # |f+ f-|^2 makes ws, wi Gaussian with variance (dp^2 + dm^2) / 2
    sigma = np.sqrt((params.pump_width**2 + params.phasematch_width**2) / 2)
    out = 0.0
    for axis in (omega_s, omega_i):
        lo = (center - axis[0]) / sigma
        hi = (axis[-1] - center) / sigma
        out += 0.5 * (erfc(lo / np.sqrt(2)) + erfc(hi / np.sqrt(2)))
    return float(out)


def build_jsa(params: CombParams, cavity: CavityModel | None = None,
              s_grid: ps.FrequencyGrid | None = None,
              i_grid: ps.FrequencyGrid | None = None,
              nu_grid: ps.FrequencyGrid | None = None):
    """Normalized product-form JSA.

    Returns :class:`DegenerateJsa` when ``params.pump_width == 0`` and a full
    :class:`JointSpectralAmplitude` otherwise.
    """
    cavity = CavityModel() if cavity is None else cavity
    if params.pump_width == 0:
        return _build_degenerate(params, cavity, nu_grid)
    if s_grid is None or i_grid is None:
        s_grid, i_grid = default_2d_grids(params, cavity)
    ws, wi = s_grid.omega, i_grid.omega
    res = min(w for w in (params.pump_width, params.phasematch_width,
                          cavity.linewidth(params)) if w > 0)
    if max(s_grid.spacing, i_grid.spacing) > res:
        raise GridTooCoarse(f"grid spacing must be <= {res:.3g} to resolve the JSA")
    clip = _envelope_clip_fraction(params, ws, wi)
    if clip > CLIP_THRESHOLD:
        raise EnvelopeClipped(f"{clip:.2e} of the envelope energy falls outside the grids")
    S, I = np.meshgrid(ws, wi, indexing="ij")
    wp = (S + I) / 2 - params.pump_center / 2
    wm = (S - I) / 2
    amp = (np.exp(-(wp**2) / (2 * params.pump_width**2))
           * np.exp(-(wm**2) / (2 * params.phasematch_width**2))).astype(complex)
    amp *= cavity_function(cavity, params, ws, "signal")[:, None]
    amp *= cavity_function(cavity, params, wi, "idler")[None, :]
    jsa = JointSpectralAmplitude(ws, wi, amp, params, cavity)
    return replace(jsa, amplitudes=amp / jsa.norm())


def _build_degenerate(params, cavity, nu_grid):
    grid = default_nu_grid(params, cavity) if nu_grid is None else nu_grid
    line = cavity.linewidth(params)
    if grid.spacing > line / 4:
        raise GridTooCoarse(f"nu spacing {grid.spacing:.3g} does not resolve linewidth {line:.3g}")
    nu = grid.omega
    lo = -nu[0] / params.phasematch_width
    hi = nu[-1] / params.phasematch_width
    clip = 0.5 * (erfc(lo) + erfc(hi))  # |f-|^2 is Gaussian with std dm/sqrt(2)
    if clip > CLIP_THRESHOLD:
        raise EnvelopeClipped(f"{clip:.2e} of the phase-matching envelope falls outside the grid")
    w_deg = params.pump_center / 2
    g = np.exp(-(nu**2) / (2 * params.phasematch_width**2)).astype(complex)
    g *= cavity_function(cavity, params, w_deg + nu, "signal")
    g *= cavity_function(cavity, params, w_deg - nu, "idler")
    spec = ps.normalize(ps.SampledSpectrum(grid, g))
    return DegenerateJsa(grid, spec.amplitudes, params, cavity)


def delay_signal(jsa: DegenerateJsa, tau: float) -> DegenerateJsa:
    """Delay the signal photon by ``tau`` (phase exp(-i ws tau))."""
    phase = np.exp(-1j * jsa.omega_signal() * tau)
    return replace(jsa, amplitudes=jsa.amplitudes * phase)


def apply_filter(jsa: DegenerateJsa, transmission_s, transmission_i=None) -> DegenerateJsa:
    """Multiply by amplitude filters sqrt(T) on each photon (not renormalized)."""
    ts = np.asarray(transmission_s(jsa.omega_signal()))
    ti = np.asarray((transmission_i or transmission_s)(jsa.omega_idler()))
    return replace(jsa, amplitudes=jsa.amplitudes * np.sqrt(ts * ti))


# --------------------------------------------------------------------------
# intensities
# --------------------------------------------------------------------------

def jsi(jsa) -> JointIntensityGrid:
    if isinstance(jsa, DegenerateJsa):
        raise TypeError("the degenerate JSA is a line; use jsa.as_spectrum().intensity()")
    vals = np.abs(jsa.amplitudes) ** 2
    vals = vals / (vals.sum() * jsa.d_s * jsa.d_i)
    return JointIntensityGrid(jsa.omega_s, jsa.omega_i, vals, "frequency")


def joint_temporal_amplitude(jsa: JointSpectralAmplitude, t_s=None, t_i=None):
    """JTA(ts, ti) = 1/(2 pi) iint JSA exp(-i(ws ts + wi ti)) on the natural or given axes."""
    if t_s is None:
        t_s = ps.natural_time_axis(ps.FrequencyGrid(jsa.omega_s[0], jsa.omega_s[-1],
                                                    jsa.omega_s.size))
    if t_i is None:
        t_i = ps.natural_time_axis(ps.FrequencyGrid(jsa.omega_i[0], jsa.omega_i[-1],
                                                    jsa.omega_i.size))
    es = np.exp(-1j * np.outer(t_s, jsa.omega_s))
    ei = np.exp(-1j * np.outer(jsa.omega_i, t_i))
    jta = es @ jsa.amplitudes @ ei * jsa.d_s * jsa.d_i / (2 * np.pi)
    return np.asarray(t_s), np.asarray(t_i), jta


def jti(jsa) -> JointIntensityGrid:
    """Joint temporal intensity; for a degenerate JSA the density of ``t_s - t_i``."""
    if isinstance(jsa, DegenerateJsa):
        amp = ps.to_time_domain(jsa.as_spectrum())
        dens = amp.intensity()
        dens = dens / (dens.sum() * amp.dt)
        return JointIntensityGrid(amp.t, np.zeros(1), dens[:, None], "time")
    n_s, n_i = jsa.amplitudes.shape
    # FFT version of joint_temporal_amplitude on the natural axes
    raw = np.fft.fft2(jsa.amplitudes)
    raw = np.roll(raw, (n_s // 2, n_i // 2), axis=(0, 1))
    t_s = ps.natural_time_axis(ps.FrequencyGrid(jsa.omega_s[0], jsa.omega_s[-1], n_s))
    t_i = ps.natural_time_axis(ps.FrequencyGrid(jsa.omega_i[0], jsa.omega_i[-1], n_i))
    raw *= np.exp(-1j * jsa.omega_s[0] * t_s)[:, None] * np.exp(-1j * jsa.omega_i[0] * t_i)[None, :]
    vals = np.abs(raw * jsa.d_s * jsa.d_i / (2 * np.pi)) ** 2
    dt_s, dt_i = t_s[1] - t_s[0], t_i[1] - t_i[0]
    vals = vals / (vals.sum() * dt_s * dt_i)
    return JointIntensityGrid(t_s, t_i, vals, "time")


def jti_period(jsa: DegenerateJsa, min_prominence: float = 1e-3) -> float:
    """Temporal period of the JTI along ``t_s - t_i``.

    Taken from the strongest non-zero-lag peak of the JTI autocorrelation,
    refined by parabolic interpolation.  This stays robust when dispersion
    splits each temporal echo into sub-peaks.
    """
    grid = jti(jsa)
    y = grid.values[:, 0]
    dt = grid.axis_1[1] - grid.axis_1[0]
    n = y.size
    ac = np.fft.irfft(np.abs(np.fft.rfft(y, 2 * n)) ** 2)[:n]
    peaks, _ = find_peaks(ac, prominence=min_prominence * ac[0])
    peaks = peaks[(peaks > 0) & (peaks < n - 1)]
    if peaks.size == 0:
        raise GridTooCoarse("no periodic structure resolved in the JTI")
    k = int(peaks[np.argmax(ac[peaks])])
    y0, y1, y2 = ac[k - 1:k + 2]
    denom = y0 - 2 * y1 + y2
    frac = 0.5 * (y0 - y2) / denom if denom != 0 else 0.0
    return float((k + frac) * dt)


def periodic_contrast(t: np.ndarray, y: np.ndarray, period: float) -> float:
    """|Fourier component at 1/period| relative to the mean of ``y``."""
    dt = t[1] - t[0]
    c1 = np.sum(y * np.exp(-2j * np.pi * t / period)) * dt
    c0 = np.sum(y) * dt
    return float(2 * abs(c1) / abs(c0))


def count_jsa_teeth(jsa: DegenerateJsa, threshold: float = np.exp(-2)) -> int:
    """Resolved teeth of the signal comb whose peak intensity exceeds ``threshold`` x max.

    Teeth are located as local maxima rather than sampled at nominal centers,
    since dispersion pulls the resonances off the ``k fsr`` grid far from degeneracy.
    """
    y = np.abs(jsa.amplitudes) ** 2
    peaks, _ = find_peaks(y, height=threshold * y.max(),
                          distance=max(1, int(0.5 * jsa.params.fsr / jsa.grid.spacing)))
    return int(peaks.size)


# --------------------------------------------------------------------------
# two-photon Wigner function
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TwoPhotonWigner:
    omega_s: np.ndarray = field(repr=False)
    omega_i: np.ndarray = field(repr=False)
    t_s: np.ndarray = field(repr=False)
    t_i: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)  # (ws, wi, ts, ti)
    max_imag: float = 0.0

    @property
    def steps(self):
        return tuple(float(a[1] - a[0]) for a in (self.omega_s, self.omega_i, self.t_s, self.t_i))

    def jsi_marginal(self) -> np.ndarray:
        _, _, dts, dti = self.steps
        return self.values.sum(axis=(2, 3)) * dts * dti

    def jti_marginal(self) -> np.ndarray:
        dws, dwi, _, _ = self.steps
        return self.values.sum(axis=(0, 1)) * dws * dwi

    def crossed_marginal(self, which: Literal["ts_wi", "ws_ti"]) -> np.ndarray:
        dws, dwi, dts, dti = self.steps
        if which == "ts_wi":
            return self.values.sum(axis=(0, 3)).T * dws * dti  # (ts, wi)
        if which == "ws_ti":
            return self.values.sum(axis=(1, 2)) * dwi * dts    # (ws, ti)
        raise ValueError(f"unknown crossed marginal {which!r}")


def upsample2_2d(a: np.ndarray) -> np.ndarray:
    rows = np.stack([ps.upsample2(r) for r in a])
    return np.stack([ps.upsample2(c) for c in rows.T]).T


def two_photon_wigner(jsa: JointSpectralAmplitude, budget: int = WIGNER_BUDGET) -> TwoPhotonWigner:
    """Full 4-D Wigner function on the half-spacing frequency grids (coarse grids only).

    W = 1/pi^2 iint dw' dw'' e^{2i(w' ts + w'' ti)} JSA(ws - w', wi - w'') JSA*(ws + w', wi + w'')
    """
    n_s, n_i = jsa.amplitudes.shape
    m_s, m_i = 2 * n_s, 2 * n_i
    size = (2 * n_s - 1) * (2 * n_i - 1) * m_s * m_i
    if size > budget:
        raise BudgetExceeded(f"4-D Wigner needs {size} samples (budget {budget})")
    fine = upsample2_2d(jsa.amplitudes)
    fs, fi = fine.shape
    ls = np.arange(-(n_s - 1), n_s)
    li = np.arange(-(n_i - 1), n_i)
    vals = np.empty((fs, fi, m_s, m_i))
    max_imag = 0.0
    for js in range(fs):
        lo_s, hi_s = js - ls, js + ls
        ok_s = (lo_s >= 0) & (lo_s < fs) & (hi_s >= 0) & (hi_s < fs)
        for ji in range(fi):
            lo_i, hi_i = ji - li, ji + li
            ok_i = (lo_i >= 0) & (lo_i < fi) & (hi_i >= 0) & (hi_i < fi)
            buf = np.zeros((m_s, m_i), dtype=complex)
            a = fine[np.ix_(lo_s[ok_s], lo_i[ok_i])]
            b = fine[np.ix_(hi_s[ok_s], hi_i[ok_i])]
            buf[np.ix_(ls[ok_s] % m_s, li[ok_i] % m_i)] = a * np.conj(b)
            w = np.fft.ifft2(buf) * (m_s * m_i)
            w = np.roll(w, (m_s // 2, m_i // 2), axis=(0, 1))
            max_imag = max(max_imag, float(np.abs(w.imag).max()))
            vals[js, ji] = w.real
    scale = jsa.d_s * jsa.d_i / (2 * np.pi) ** 2
    grid_s = ps.FrequencyGrid(jsa.omega_s[0], jsa.omega_s[-1], n_s)
    grid_i = ps.FrequencyGrid(jsa.omega_i[0], jsa.omega_i[-1], n_i)
    return TwoPhotonWigner(grid_s.refined().omega, grid_i.refined().omega,
                           ps.wigner_time_axis(grid_s), ps.wigner_time_axis(grid_i),
                           vals * scale, max_imag * scale)


@dataclass(frozen=True)
class SliceSpec:
    """Which 2-D cut of the two-photon Wigner function to return.

    ``fix_frequencies``: W(ws, wi, ., .) at fixed frequencies.
    ``fix_times``: W(., ., ts, ti) at fixed times.
    ``crossed_ts_wi`` / ``crossed_ws_ti``: crossed marginals.
    ``minus_cut``: chronocyclic Wigner function of the anti-diagonal
    amplitude (degenerate JSA only); its ``mu = 0`` row is the HOM cut.
    """

    kind: Literal["fix_frequencies", "fix_times", "crossed_ts_wi", "crossed_ws_ti",
                  "minus_cut"] = "fix_frequencies"
    a: float = 0.0
    b: float = 0.0


def two_photon_wigner_slices(jsa, slice_spec: SliceSpec, budget: int = WIGNER_BUDGET):
    if slice_spec.kind == "minus_cut":
        if not isinstance(jsa, DegenerateJsa):
            raise TypeError("minus_cut needs a degenerate JSA")
        n = jsa.grid.n_points
        if (2 * n - 1) * 2 * n > budget:
            raise BudgetExceeded("minus_cut Wigner exceeds the sample budget")
        return ps.wigner(jsa.as_spectrum())
    if isinstance(jsa, DegenerateJsa):
        raise TypeError(f"{slice_spec.kind} needs a full 2-D JSA")
    w4 = two_photon_wigner(jsa, budget)
    if slice_spec.kind == "fix_frequencies":
        js = int(np.argmin(np.abs(w4.omega_s - slice_spec.a)))
        ji = int(np.argmin(np.abs(w4.omega_i - slice_spec.b)))
        return w4.values[js, ji]
    if slice_spec.kind == "fix_times":
        ks = int(np.argmin(np.abs(w4.t_s - slice_spec.a)))
        ki = int(np.argmin(np.abs(w4.t_i - slice_spec.b)))
        return w4.values[:, :, ks, ki]
    if slice_spec.kind in ("crossed_ts_wi", "crossed_ws_ti"):
        return w4.crossed_marginal(slice_spec.kind.removeprefix("crossed_"))
    raise ValueError(f"unknown slice kind {slice_spec.kind!r}")


def hom_cut_from_wigner(w: ps.WignerGrid) -> tuple[np.ndarray, np.ndarray]:
    """Coincidence probability 1/2 [1 - pi W(0, tau)] from the minus-cut Wigner grid.

    ``pi W(0, tau)`` is the exchange overlap of the normalized anti-diagonal
    amplitude, so no further normalization is needed.
    """
    j0 = int(np.argmin(np.abs(w.omega)))
    return w.t, 0.5 * (1 - np.pi * w.values[j0])


def hom_cut(jsa: DegenerateJsa, tau) -> np.ndarray:
    """Same cut evaluated pointwise at arbitrary delays (no full Wigner grid)."""
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    w0 = ps.wigner_points(jsa.as_spectrum(), np.zeros_like(tau), tau)
    return 0.5 * (1 - np.pi * w0)
