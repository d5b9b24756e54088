import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tfgkp import error_correction as ec
from tfgkp.errors import ModelMismatch
from tfgkp.gkp import CombParams

COMB = CombParams()
LAM = ec.default_spacing(COMB)


def quadrature_posterior(a, b, y):
    # p(t | y) ~ N(t; 0, a^2) N(t - y; 0, b^2), evaluated by brute-force quadrature
    s = np.sqrt(a * a * b * b / (a * a + b * b))
    t = np.linspace(-12 * max(a, b) + y, 12 * max(a, b) + y, 400001)
    logp = -(t**2) / (2 * a * a) - (t - y) ** 2 / (2 * b * b)
    p = np.exp(logp - logp.max())
    z = np.trapezoid(p, t)
    mean = np.trapezoid(t * p, t) / z
    var = np.trapezoid((t - mean) ** 2 * p, t) / z
    return mean, var, s


def test_default_spacing():
    assert LAM == pytest.approx(np.pi / (2 * COMB.fsr))


def test_c_prime_map():
    assert ec.c_prime_on_times(1.0, 0.25) == (1.25, 0.75)
    assert ec.conjugated_shifts(0.3, 0.1) == pytest.approx((0.2, 0.1))


@settings(max_examples=30, deadline=None)
@given(t=st.floats(-2, 2), tp=st.floats(-2, 2), seed=st.integers(0, 2**32 - 1))
def test_conjugation_identity(t, tp, seed):
    rng = np.random.default_rng(seed)
    state = ec.gaussian_mixture_amplitude(rng)
    pts = rng.uniform(-3, 3, size=(2, 200))
    assert ec.conjugation_error(state, t, tp, *pts) < 1e-9


def test_c_prime_preserves_norm():
    state = ec.gaussian_mixture_amplitude(np.random.default_rng(3))
    x = np.linspace(-8, 8, 801)
    S, I = np.meshgrid(x, x, indexing="ij")
    dx = x[1] - x[0]
    n0 = np.sum(np.abs(state(S, I)) ** 2) * dx * dx
    n1 = np.sum(np.abs(state.c_prime()(S, I)) ** 2) * dx * dx
    assert n1 == pytest.approx(n0, rel=1e-6)


@pytest.mark.parametrize("a,b,y", [(0.06, 0.09, 0.05), (0.1, 0.02, -0.03), (0.03, 0.3, 0.2)])
def test_posterior_matches_quadrature(a, b, y):
    noise = ec.NoiseModel("gaussian", a, b)
    mean, var, _ = quadrature_posterior(a, b, y)
    post = ec.posterior_after_click(noise, y / 2 + 3 * LAM, 3, LAM)
    assert post.mean == pytest.approx(mean, abs=1e-12)
    assert post.std**2 == pytest.approx(var, rel=1e-9)
    assert post.peak_index == 3


def test_posterior_limits():
    sharp_idler = ec.NoiseModel("gaussian", 0.1, 1e-6)
    assert sharp_idler.posterior_weight() == pytest.approx(1.0)
    assert sharp_idler.posterior_variance() == pytest.approx(1e-12, rel=1e-6)
    broad_idler = ec.NoiseModel("gaussian", 0.1, 1e3)
    assert broad_idler.posterior_weight() == pytest.approx(0.0, abs=1e-7)
    assert broad_idler.posterior_variance() == pytest.approx(0.01, rel=1e-6)


def test_from_envelopes():
    n = ec.NoiseModel.from_envelopes(20.0, 5.0)
    assert (n.time_width_signal, n.time_width_idler) == (0.05, 0.2)


def test_model_mismatch():
    with pytest.raises(ModelMismatch):
        ec.posterior_after_click(ec.NoiseModel("dirac"), 0.0, 0, LAM)


def test_noise_validation():
    with pytest.raises(ValueError):
        ec.NoiseModel("gaussian", 0.0, 0.1)
    with pytest.raises(ValueError):
        ec.NoiseModel("lorentzian")


def test_decoder_ties_go_low():
    assert ec.decode_peak(0.5 * LAM, LAM) == 0
    assert ec.decode_peak(-0.5 * LAM, LAM) == -1
    assert ec.decode_peak(0.51 * LAM, LAM) == 1
    assert ec.decode_peak(2.49 * LAM, LAM) == 2


def test_dirac_no_noise_is_exact():
    noise = ec.NoiseModel("dirac")
    rec = ec.run_trial(COMB, noise, 1)
    assert rec.success and rec.residual_error == 0.0


def test_dirac_uniform_window_always_decodes():
    noise = ec.NoiseModel("dirac", uniform_window=1.0)
    stats = ec.ec_monte_carlo(COMB, noise, 2000, master_seed=5)
    assert stats.success_rate == 1.0


def test_dirac_offset_of_one_spacing_fails():
    # t = pi / fsr puts the idler shift (t - t')/2 on the next lattice site
    noise = ec.NoiseModel("dirac", offsets=(np.pi / COMB.fsr, 0.0, 0.0, 0.0))
    stats = ec.ec_monte_carlo(COMB, noise, 200, master_seed=1)
    assert stats.success_rate == 0.0


def test_monte_carlo_matches_posterior_variance():
    noise = ec.NoiseModel("gaussian", 0.06, 0.09)
    stats = ec.ec_monte_carlo(COMB, noise, 20000, master_seed=11)
    assert stats.success_rate > 0.95
    assert stats.posterior_consistency == pytest.approx(1.0, abs=0.05)
    assert abs(stats.success_residual_mean) < 5 * np.sqrt(stats.predicted_var / 20000)


def test_monte_carlo_deterministic_across_workers():
    noise = ec.NoiseModel("gaussian", 0.06, 0.09)
    a = ec.ec_monte_carlo(COMB, noise, 500, master_seed=7, workers=1, keep_records=True)
    b = ec.ec_monte_carlo(COMB, noise, 500, master_seed=7, workers=4, keep_records=True)
    assert a.records == b.records
    c = ec.ec_monte_carlo(COMB, noise, 500, master_seed=8, keep_records=True)
    assert c.records != a.records


def test_trial_seed_counter_based():
    s1 = ec.trial_seed(3, 10).generate_state(4)
    s2 = ec.trial_seed(3, 10).generate_state(4)
    s3 = ec.trial_seed(3, 11).generate_state(4)
    np.testing.assert_array_equal(s1, s2)
    assert not np.array_equal(s1, s3)


def test_bad_trial_count():
    with pytest.raises(ValueError):
        ec.ec_monte_carlo(COMB, ec.NoiseModel("dirac"), 0)
