"""Hong-Ou-Mandel coincidence scans.

Delaying the signal by ``tau`` and recombining both photons on a balanced
beam splitter gives the coincidence probability

    I(tau) = 1/2 [1 - Re X(tau) / N],
    X(tau) = iint phi(w1, w2) phi*(w2, w1) T(w1) T(w2) exp(-i (w1 - w2) tau),
    N      = iint |phi(w1, w2)|^2 T(w1) T(w2),

with ``T`` the intensity transmission of an optional filter.  For a
degenerate JSA ``g(nu)`` the exchange term reduces to
``2 int g(nu) g*(-nu) exp(-2 i nu tau)``.  When the two photons see the same
cavity this is the familiar ``|f_cav f_cav|^2 f-(nu) f-*(-nu)`` integrand;
with birefringence the exchange overlap drops below ``N`` and the central dip
loses visibility.

Replica dips sit at multiples of ``pi / fsr`` (half a round trip) for a pump
on an even comb tooth; the first one is the Z-gate delay.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np
from scipy.signal import czt

from . import biphoton as bp
from .errors import GridTooCoarse, NoDipFound, RegimeViolation
from .gkp import CombParams

MIN_POINTS_PER_LINE = 16
# a dip shallower than this is indistinguishable from quadrature noise on the baseline
DIP_TOLERANCE = 1e-9
# Calibrated so that the device comb (19.2 GHz FSR, 10.9 THz band) at r = 0.3
# gives a first-replica visibility of about 0.15.  Normalized units (fsr = 2 pi).
DEVICE_BETA2 = 2.6e-7
DEVICE_BIREFRINGENCE = 3.0e-3


@dataclass(frozen=True)
class FilterSpec:
    """Band-pass filter applied to both photons before the beam splitter.

    ``bandwidth`` is the full width (rect) or the intensity FWHM (gaussian).
    """

    center: float = 0.0
    bandwidth: float = 1.0
    shape: Literal["rect", "gaussian"] = "rect"

    def __post_init__(self):
        if not self.bandwidth > 0:
            raise ValueError("filter bandwidth must be positive")
        if self.shape not in ("rect", "gaussian"):
            raise ValueError(f"unknown filter shape {self.shape!r}")

    def transmission(self, omega):
        x = np.asarray(omega, dtype=float) - self.center
        if self.shape == "rect":
            return (np.abs(x) <= self.bandwidth / 2).astype(float)
        return np.exp(-4 * np.log(2) * x**2 / self.bandwidth**2)

    @property
    def label(self) -> str:
        return f"{self.shape}:{self.bandwidth:.6g}"


@dataclass(frozen=True)
class HomScan:
    tau: np.ndarray = field(repr=False)
    coincidence: np.ndarray = field(repr=False)
    params: CombParams
    cavity: bp.CavityModel
    filter: FilterSpec | None = None

    def at(self, tau: float) -> float:
        return float(np.interp(tau, self.tau, self.coincidence))


def _dtft(weights: np.ndarray, x0: float, dx: float, tau: np.ndarray) -> np.ndarray:
    """sum_j w_j exp(-i (x0 + j dx) tau_k), via a chirp-z transform for uniform tau."""
    tau = np.asarray(tau, dtype=float)
    if tau.size > 2 and np.allclose(np.diff(tau), tau[1] - tau[0], rtol=1e-9, atol=0):
        d_tau = tau[1] - tau[0]
        a = np.exp(1j * dx * tau[0])
        w = np.exp(-1j * dx * d_tau)
        out = czt(weights, m=tau.size, w=w, a=a)
    else:
        j = np.arange(weights.size)
        out = np.empty(tau.size, dtype=complex)
        for s in range(0, tau.size, 64):
            block = tau[s:s + 64]
            out[s:s + 64] = np.exp(-1j * dx * np.outer(block, j)) @ weights
    return out * np.exp(-1j * x0 * tau)


def _check_resolution(spacing: float, source) -> None:
    line = source.cavity.linewidth(source.params)
    if np.isfinite(line) and spacing > line / MIN_POINTS_PER_LINE * (1 + 1e-9):
        raise GridTooCoarse(
            f"frequency step {spacing:.3g} gives fewer than {MIN_POINTS_PER_LINE} points "
            f"per linewidth {line:.3g}")


def _check_alias(tau: np.ndarray, step: float) -> None:
    # the exchange sum is periodic in tau with period 2 pi / step
    if tau.size and np.max(np.abs(tau)) >= np.pi / step:
        raise GridTooCoarse(f"delays beyond {np.pi / step:.3g} alias; refine the frequency grid")


def coincidence_scan(source, tau, filt: FilterSpec | None = None) -> HomScan:
    """Numerical coincidence probability for a degenerate or full 2-D JSA."""
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    if isinstance(source, bp.DegenerateJsa):
        grid = source.grid
        _check_resolution(grid.spacing, source)
        _check_alias(tau, 2 * grid.spacing)
        if abs(grid.omega_min + grid.omega_max) > 1e-9 * grid.spacing * grid.n_points:
            raise ValueError("degenerate scan needs a grid symmetric about nu = 0")
        g = source.amplitudes
        if filt is not None:
            g = g * np.sqrt(filt.transmission(source.omega_signal())
                            * filt.transmission(source.omega_idler()))
        weights = g * np.conj(g[::-1])
        norm = np.sum(np.abs(g) ** 2)
        x = _dtft(weights, 2 * grid.omega_min, 2 * grid.spacing, tau)
    elif isinstance(source, bp.JointSpectralAmplitude):
        ws, wi = source.omega_s, source.omega_i
        if ws.size != wi.size or not np.allclose(ws, wi):
            raise ValueError("2-D scan needs identical signal and idler grids")
        _check_resolution(source.d_s, source)
        _check_alias(tau, source.d_s)
        a = source.amplitudes
        if filt is not None:
            t = np.sqrt(filt.transmission(ws))
            a = a * t[:, None] * t[None, :]
        n = ws.size
        m = a * np.conj(a.T)
        # reduce over w+ : sum each diagonal w1 - w2 = k * step
        rows, cols = np.indices(m.shape)
        h = np.bincount((rows - cols + n - 1).ravel(), weights=m.real.ravel(),
                        minlength=2 * n - 1) \
            + 1j * np.bincount((rows - cols + n - 1).ravel(), weights=m.imag.ravel(),
                               minlength=2 * n - 1)
        norm = np.sum(np.abs(a) ** 2)
        x = _dtft(h, -(n - 1) * source.d_s, source.d_s, tau)
    else:
        raise TypeError(f"unsupported source {type(source).__name__}")
    if norm == 0:
        raise ValueError("filter removes the whole two-photon spectrum")
    coinc = 0.5 * (1 - x.real / norm)
    return HomScan(tau, coinc, source.params, source.cavity, filt)


def coincidence_analytic(comb: CombParams, tau, peak_count: int | None = None):
    """Closed-form scan for an ideal Gaussian-tooth comb (no birefringence/dispersion).

    Each tooth ``nu_n = n fsr - pump_center/2`` of the anti-diagonal contributes
    a Gaussian integral of ``f-(nu) f-(-nu) exp(-2 (nu - nu_n)^2 / dw^2 - 2 i nu tau)``;
    in the limit ``phasematch_width >> tooth_width`` this becomes

        I(tau) = 1/2 [1 - exp(-tau^2 dw^2 / 2) sum_n a_n cos(2 nu_n tau) / sum_n a_n].

    Teeth ``|n - n_c| <= d`` are summed, ``n_c`` the tooth nearest degeneracy.
    """
    if not comb.high_finesse:
        raise RegimeViolation(
            f"closed form needs fsr/tooth_width > 10 (got {comb.finesse_ratio:.3g})")
    d = comb.peak_count if peak_count is None else int(peak_count)
    tau = np.asarray(tau, dtype=float)
    half = comb.pump_center / 2
    n_c = int(np.round(half / comb.fsr))
    nu_n = np.arange(n_c - d, n_c + d + 1) * comb.fsr - half
    a = 1 / comb.phasematch_width**2 + 2 / comb.tooth_width**2
    c = 2 * nu_n**2 / comb.tooth_width**2

    def exchange(t):
        b = 4 * nu_n / comb.tooth_width**2 - 2j * t
        return np.sum(np.exp(b**2 / (4 * a) - c))

    norm = exchange(0.0).real
    vals = np.array([exchange(t) for t in np.ravel(tau)]).reshape(tau.shape)
    return 0.5 * (1 - vals.real / norm)


def dip_visibility(scan: HomScan, center: float, window: float) -> float:
    """V = (1/2 - I_min) / (1/2) for the dip inside ``center +- window/2``."""
    sel = np.abs(scan.tau - center) <= window / 2
    y = scan.coincidence[sel]
    if y.size < 3:
        raise NoDipFound("window holds fewer than three scan points")
    k = int(np.argmin(y))
    if k == 0 or k == y.size - 1 or not y[k] < 0.5 - DIP_TOLERANCE:
        raise NoDipFound(f"no interior minimum below 1/2 near tau = {center:.6g}")
    return float(np.clip((0.5 - y[k]) / 0.5, 0.0, 1.0))


def replica_visibility(scan: HomScan, order: int = 1, window: float | None = None) -> float:
    """Visibility of the ``order``-th replica at ``order * pi / fsr``; 0 if there is no dip."""
    center = order * np.pi / scan.params.fsr
    window = 0.25 * np.pi / scan.params.fsr if window is None else window
    try:
        return dip_visibility(scan, center, window)
    except NoDipFound:
        return 0.0


def replica_axis(params: CombParams, order: int, half_width: float, n_points: int = 801):
    center = order * np.pi / params.fsr
    return np.linspace(center - half_width, center + half_width, n_points)


def dip_half_width(params: CombParams) -> float:
    """Scan half-range around a dip: a tenth of a round trip.

    Wide enough for dips broadened by spectral narrowing or displaced by the
    birefringent group delay, narrow enough to exclude the neighbouring replica.
    """
    return params.round_trip / 10


def scan_visibilities(jsa: bp.DegenerateJsa, filt: FilterSpec | None = None,
                      n_points: int = 4001) -> tuple[float, float]:
    """(central, first-replica) visibilities from two local scans."""
    half = dip_half_width(jsa.params)
    out = []
    for order in (0, 1):
        tau = replica_axis(jsa.params, order, half, n_points)
        scan = coincidence_scan(jsa, tau, filt)
        if order == 0:
            out.append(float(np.clip((0.5 - scan.coincidence.min()) / 0.5, 0, 1)))
        else:
            out.append(replica_visibility(scan, 1, 2 * half))
    return out[0], out[1]


def device_cavity(r: float, beta2: float = DEVICE_BETA2,
                  birefringence: float = DEVICE_BIREFRINGENCE) -> bp.CavityModel:
    return bp.CavityModel("fabry_perot", reflectivity=r, beta2=beta2, birefringence=birefringence)


def visibility_vs_reflectivity(params: CombParams, r_grid, filters=(None,),
                               beta2: float = DEVICE_BETA2,
                               birefringence: float = DEVICE_BIREFRINGENCE,
                               workers: int = 1) -> list[dict]:
    """One row per (r, filter) with central and first-replica visibility."""
    params = replace(params, pump_width=0.0)
    r_grid = [float(r) for r in r_grid]
    if any(not 0.0 <= r <= 0.99 for r in r_grid):
        raise ValueError("reflectivities must lie in [0, 0.99]")
    jobs = [(r, f) for f in filters for r in r_grid]

    def run(job):
        r, f = job
        jsa = bp.build_jsa(params, device_cavity(r, beta2, birefringence))
        central, secondary = scan_visibilities(jsa, f)
        return {"reflectivity": r, "filter": "none" if f is None else f.label,
                "central_visibility": central, "secondary_visibility": secondary}

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(run, jobs))
    return [run(j) for j in jobs]
