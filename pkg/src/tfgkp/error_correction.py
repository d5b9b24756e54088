"""Measurement-based correction of time shifts with an entangled photon pair.

Model.  Each photon starts on an ideal time lattice and picks up a time
shift: ``t`` on the signal (std ``time_width_signal``) and ``t'`` on the
idler (std ``time_width_idler``), plus frequency shifts ``w, w'``.  The
symmetric CNOT-like gate C' maps the wavefunction as
``psi(ts, ti) -> psi(ts + ti, ts - ti)``, which conjugates the shifts into

    signal: s = (t + t') / 2,     idler: u = (t - t') / 2.

The idler is detected at ``tau = m * spacing + u``.  Nearest-peak decoding
recovers ``m`` when ``|u| < spacing / 2``; with the default spacing
``pi / (2 fsr)`` this is the window ``|t - t'| < pi / (2 fsr)``.  Given the
decoded offset ``y = 2 (tau - m spacing)`` (an estimate of ``t - t'``) the
signal shift ``t`` has a Gaussian posterior with

    variance  a^2 b^2 / (a^2 + b^2),   mean  a^2 / (a^2 + b^2) * y,

``a, b`` the signal and idler time widths.  The corrected data residual is
``s - E[s | y]`` which has the same variance.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Literal

import numpy as np

from .errors import ModelMismatch
from .gkp import CombParams


def default_spacing(comb: CombParams) -> float:
    """Decoding lattice step; half of it is the correctable time window."""
    return np.pi / (2 * comb.fsr)


@dataclass(frozen=True)
class NoiseModel:
    """Time/frequency noise.

    ``gaussian``: zero-mean normal shifts with the given standard deviations
    (time widths are 1/dw_minus and 1/dw_pump in the source picture).
    ``dirac``: fixed ``offsets = (t, t', w, w')``; with ``uniform_window`` set,
    ``t' ~ U(-window, window)`` and ``t - t' ~ U(-window, window)`` where
    ``window = uniform_window * spacing / 2`` instead.
    """

    kind: Literal["dirac", "gaussian"] = "gaussian"
    time_width_signal: float = 0.0
    time_width_idler: float = 0.0
    freq_width: float = 0.0
    offsets: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    uniform_window: float | None = None

    def __post_init__(self):
        if self.kind not in ("dirac", "gaussian"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.kind == "gaussian" and not (self.time_width_signal > 0
                                            and self.time_width_idler > 0):
            raise ValueError("gaussian noise needs positive time widths")
        if self.freq_width < 0:
            raise ValueError("freq_width must be non-negative")

    @classmethod
    def from_envelopes(cls, phasematch_width: float, pump_width: float, freq_width: float = 0.0):
        return cls("gaussian", 1 / phasematch_width, 1 / pump_width, freq_width)

    def posterior_weight(self) -> float:
        a2, b2 = self.time_width_signal**2, self.time_width_idler**2
        return a2 / (a2 + b2)

    def posterior_variance(self) -> float:
        a2, b2 = self.time_width_signal**2, self.time_width_idler**2
        return a2 * b2 / (a2 + b2)


@dataclass(frozen=True)
class Posterior:
    mean: float
    std: float
    peak_index: int
    click_time: float


@dataclass(frozen=True)
class EcTrialRecord:
    t: float
    t_prime: float
    omega: float
    omega_prime: float
    true_index: int
    click_time: float
    decoded_index: int
    posterior: Posterior | None
    data_shift: float
    residual_error: float
    success: bool


def c_prime_on_times(ts, ti):
    """Time-argument map of the entangling gate: (ts, ti) -> (ts + ti, ts - ti)."""
    return ts + ti, ts - ti


def conjugated_shifts(t: float, t_prime: float) -> tuple[float, float]:
    """Shifts after C' D_s(t) D_i(t') C'^-1 = D_s((t+t')/2) D_i((t-t')/2)."""
    return (t + t_prime) / 2, (t - t_prime) / 2


@dataclass(frozen=True)
class TwoPhotonTemporal:
    """Two-photon temporal amplitude kept as a callable; operations compose lazily."""

    func: Callable[[np.ndarray, np.ndarray], np.ndarray]

    def __call__(self, ts, ti):
        return self.func(np.asarray(ts, dtype=float), np.asarray(ti, dtype=float))

    def c_prime(self) -> "TwoPhotonTemporal":
        f = self.func
        # sqrt(2) keeps the map unitary (Jacobian of (ts, ti) -> (ts+ti, ts-ti) is 2)
        return TwoPhotonTemporal(lambda ts, ti: np.sqrt(2) * f(*c_prime_on_times(ts, ti)))

    def displace(self, t_s: float, t_i: float) -> "TwoPhotonTemporal":
        f = self.func
        return TwoPhotonTemporal(lambda ts, ti: f(ts - t_s, ti - t_i))


def gaussian_mixture_amplitude(rng: np.random.Generator, n_terms: int = 4) -> TwoPhotonTemporal:
    """Random smooth complex test amplitude."""
    c = rng.normal(size=(n_terms, 2))
    w = rng.uniform(0.5, 2.0, size=(n_terms, 2))
    k = rng.normal(size=(n_terms, 2))
    amp = rng.normal(size=n_terms) + 1j * rng.normal(size=n_terms)

    def f(ts, ti):
        out = np.zeros(np.broadcast(ts, ti).shape, dtype=complex)
        for j in range(n_terms):
            out += amp[j] * np.exp(-((ts - c[j, 0]) / w[j, 0]) ** 2 - ((ti - c[j, 1]) / w[j, 1]) ** 2
                                   + 1j * (k[j, 0] * ts + k[j, 1] * ti))
        return out

    return TwoPhotonTemporal(f)


def conjugation_error(state: TwoPhotonTemporal, t: float, t_prime: float, ts, ti) -> float:
    """max |C' D(t, t') psi - D((t+t')/2, (t-t')/2) C' psi| on the sample points."""
    lhs = state.displace(t, t_prime).c_prime()
    s, u = conjugated_shifts(t, t_prime)
    rhs = state.c_prime().displace(s, u)
    return float(np.max(np.abs(lhs(ts, ti) - rhs(ts, ti))))


def posterior_after_click(noise: NoiseModel, tau: float, m: int, spacing: float) -> Posterior:
    """Posterior of the signal time shift given an idler click at ``tau`` assigned to peak ``m``."""
    if noise.kind != "gaussian":
        raise ModelMismatch("the posterior update needs the gaussian noise model")
    y = 2 * (tau - m * spacing)
    return Posterior(noise.posterior_weight() * y, float(np.sqrt(noise.posterior_variance())),
                     int(m), float(tau))


def decode_peak(tau: float, spacing: float) -> int:
    """Nearest lattice index; exact half-way ties go to the lower index."""
    x = tau / spacing
    m = int(np.floor(x))
    return m + 1 if x - m > 0.5 else m


def _sample_noise(noise: NoiseModel, rng: np.random.Generator, spacing: float):
    if noise.kind == "gaussian":
        t = rng.normal(0.0, noise.time_width_signal)
        tp = rng.normal(0.0, noise.time_width_idler)
        w, wp = rng.normal(0.0, noise.freq_width, size=2) if noise.freq_width > 0 else (0.0, 0.0)
        return float(t), float(tp), float(w), float(wp)
    if noise.uniform_window is not None:
        h = noise.uniform_window * spacing / 2
        tp = rng.uniform(-h, h)
        diff = rng.uniform(-h, h)
        return float(tp + diff), float(tp), 0.0, 0.0
    return tuple(float(v) for v in noise.offsets)


def run_trial(comb: CombParams, noise: NoiseModel, rng_seed, spacing: float | None = None,
              envelope_peaks: float = 10.0) -> EcTrialRecord:
    """One protocol round: noise, entangling gate, idler click, decoding, correction.

    ``rng_seed`` is anything accepted by ``numpy.random.default_rng``.  The
    true idler peak is drawn from a Gaussian envelope ``envelope_peaks``
    lattice steps wide; the click is that peak plus the idler shift.
    """
    spacing = default_spacing(comb) if spacing is None else spacing
    rng = np.random.default_rng(rng_seed)
    t, tp, w, wp = _sample_noise(noise, rng, spacing)
    s, u = conjugated_shifts(t, tp)
    kmax = int(np.ceil(4 * envelope_peaks))
    ks = np.arange(-kmax, kmax + 1)
    weights = np.exp(-(ks / envelope_peaks) ** 2 / 2)
    m_true = int(rng.choice(ks, p=weights / weights.sum()))
    tau = m_true * spacing + u
    m_hat = decode_peak(tau, spacing)
    if noise.kind == "gaussian":
        post = posterior_after_click(noise, tau, m_hat, spacing)
        y = 2 * (tau - m_hat * spacing)
        # E[s | y] = E[t | y] - y / 2
        s_hat = post.mean - y / 2
    else:
        post, s_hat = None, 0.0
    return EcTrialRecord(t, tp, w, wp, m_true, float(tau), m_hat, post, s, s - s_hat,
                         m_hat == m_true)


@dataclass(frozen=True)
class EcStatistics:
    n_trials: int
    success_rate: float
    residual_mean: float
    residual_var: float
    success_residual_mean: float
    success_residual_var: float
    predicted_var: float
    posterior_consistency: float  # success-conditioned variance / predicted variance
    records: tuple = field(default=(), repr=False)

    def summary(self) -> dict:
        d = asdict(self)
        d.pop("records")
        return d


def trial_seed(master_seed: int, index: int) -> np.random.SeedSequence:
    """Counter-based seed: depends only on (master_seed, index)."""
    return np.random.SeedSequence([int(master_seed), int(index)])


def ec_monte_carlo(comb: CombParams, noise: NoiseModel, n_trials: int, master_seed: int = 0,
                   workers: int = 1, spacing: float | None = None,
                   keep_records: bool = False) -> EcStatistics:
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")

    def chunk(bounds):
        lo, hi = bounds
        return [run_trial(comb, noise, trial_seed(master_seed, i), spacing) for i in range(lo, hi)]

    step = max(1, -(-n_trials // max(1, workers)))
    bounds = [(lo, min(lo + step, n_trials)) for lo in range(0, n_trials, step)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(chunk, bounds))
    else:
        parts = [chunk(b) for b in bounds]
    records = [r for part in parts for r in part]
    res = np.array([r.residual_error for r in records])
    ok = np.array([r.success for r in records])
    pred = noise.posterior_variance() if noise.kind == "gaussian" else 0.0
    succ = res[ok]
    s_var = float(succ.var()) if succ.size > 1 else 0.0
    return EcStatistics(
        n_trials=n_trials,
        success_rate=float(ok.mean()),
        residual_mean=float(res.mean()),
        residual_var=float(res.var()) if res.size > 1 else 0.0,
        success_residual_mean=float(succ.mean()) if succ.size else float("nan"),
        success_residual_var=s_var,
        predicted_var=pred,
        posterior_consistency=s_var / pred if pred > 0 else float("nan"),
        records=tuple(records) if keep_records else (),
    )
