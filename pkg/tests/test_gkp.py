import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tfgkp import gkp
from tfgkp import phase_space as ps
from tfgkp.errors import BadPumpCenter, GridTooCoarse

FINE = gkp.CombParams(tooth_width=0.01 * 2 * np.pi)
KAPPA = 0.05


@pytest.fixture(scope="module")
def plus():
    return gkp.physical_gkp("+", FINE, KAPPA)


def test_comb_params_flags():
    c = gkp.CombParams(tooth_width=2 * np.pi / 20)
    assert c.finesse_ratio == pytest.approx(20)
    assert c.high_finesse
    assert not gkp.CombParams(tooth_width=2 * np.pi / 5).high_finesse
    assert c.round_trip == pytest.approx(1.0)


def test_bad_pump_center():
    with pytest.raises(BadPumpCenter):
        gkp.ideal_gkp("0", "frequency", gkp.CombParams(pump_center=0.5 * 2 * np.pi))


def test_from_device_units():
    params, units = gkp.CombParams.from_device(19.2e9, 10.9e12, 1e9)
    assert params.fsr == pytest.approx(2 * np.pi)
    # band 10.9 THz = 567.7 FSR in e^-2 full width
    assert params.phasematch_width * 2 * np.sqrt(2) == pytest.approx(2 * np.pi * 10.9e12 / 19.2e9)
    assert units.round_trip_s == pytest.approx(1 / 19.2e9)


@pytest.mark.parametrize("label,teeth", [("0", [-4, -2, 0, 2, 4]), ("1", [-3, -1, 1, 3, 5])])
def test_ideal_peak_lists(label, teeth):
    s = gkp.ideal_gkp(label, "frequency", gkp.CombParams(), d=2)
    np.testing.assert_array_equal(s.teeth, teeth)
    np.testing.assert_allclose(s.positions, np.array(teeth) * 2 * np.pi)


def test_minus_alternates():
    s = gkp.ideal_gkp("-", "frequency", gkp.CombParams(), d=3)
    signs = np.sign(s.weights.real)
    np.testing.assert_array_equal(signs, [(-1) ** abs(k) for k in s.teeth])


@pytest.mark.parametrize("label", gkp.LABELS)
@pytest.mark.parametrize("basis", ["frequency", "time"])
@pytest.mark.parametrize("which", ["frequency_stab", "time_stab"])
def test_ideal_stabilizers_exactly_one(label, basis, which):
    s = gkp.ideal_gkp(label, basis, gkp.CombParams(), d=5)
    assert gkp.stabilizer_expectation(s, which) == pytest.approx(1.0, abs=1e-12)


def test_ideal_z_gate_frequency():
    plus = gkp.ideal_gkp("+", "frequency", gkp.CombParams(), d=6)
    minus = gkp.ideal_gkp("-", "frequency", gkp.CombParams(), d=6)
    out = gkp.z_gate(plus)
    assert out.label == "-"
    assert abs(gkp.ideal_overlap(out, minus)) == pytest.approx(1.0, abs=1e-12)
    # even teeth keep their phase, odd teeth flip sign
    ratio = out.weights / plus.weights
    np.testing.assert_allclose(ratio, [(-1) ** abs(k) for k in plus.teeth], atol=1e-9)


def test_ideal_z_gate_leaves_zero():
    zero = gkp.ideal_gkp("0", "frequency", gkp.CombParams(), d=4)
    out = gkp.z_gate(zero)
    assert abs(gkp.ideal_overlap(out, zero)) == pytest.approx(1.0, abs=1e-12)


def test_ideal_readout():
    c = gkp.CombParams()
    assert gkp.logical_readout(gkp.ideal_gkp("0", "frequency", c), "frequency") == (1.0, 0.0)
    assert gkp.logical_readout(gkp.ideal_gkp("1", "frequency", c), "frequency") == (0.0, 1.0)
    assert gkp.logical_readout(gkp.ideal_gkp("+", "frequency", c), "time") == (1.0, 0.0)


def test_physical_grid_too_coarse():
    g = ps.FrequencyGrid.centered(100.0, 1001)
    with pytest.raises(GridTooCoarse):
        gkp.physical_gkp("+", FINE, KAPPA, grid=g)


def test_physical_z_gate_overlap(plus):
    minus = gkp.physical_gkp("-", FINE, KAPPA, grid=plus.spectrum.grid)
    out = gkp.z_gate(plus)
    assert abs(ps.inner(out.spectrum, minus.spectrum)) >= 0.999


def test_physical_stabilizers_match_noise(plus):
    # frequency stabilizer D(2 fsr) sees only the envelope: exp(-(2 fsr kappa)^2 / 4)
    fs = gkp.stabilizer_expectation(plus, "frequency_stab")
    assert fs.real == pytest.approx(np.exp(-((2 * FINE.fsr * KAPPA) ** 2) / 4), rel=2e-3)
    # time stabilizer D_t(round trip) sees only the tooth width
    ts = gkp.stabilizer_expectation(plus, "time_stab")
    assert ts.real == pytest.approx(np.exp(-(FINE.tooth_width * FINE.round_trip) ** 2 / 4),
                                    rel=2e-3)


def test_physical_readout(plus):
    p0, p1 = gkp.logical_readout(plus, "time")
    assert p0 > 0.99
    f0, f1 = gkp.logical_readout(plus, "frequency")
    assert f0 == pytest.approx(0.5, abs=0.02)


def test_wigner_sign_pattern(plus):
    half = np.pi / FINE.fsr   # lattice in time is round_trip / 2
    n = np.arange(-4, 5)
    W, T = np.meshgrid(n * FINE.fsr / 2, n * half, indexing="ij")
    vals = ps.wigner_points(plus.spectrum, W.ravel(), T.ravel()).reshape(W.shape)
    expected = (-1.0) ** np.outer(n, n)
    assert np.all(np.sign(vals) == expected)


def test_tooth_count_envelope_limited():
    kappa = gkp.kappa_for_band(20 * 2 * np.pi)   # e^-2 full width of 20 teeth
    state = gkp.physical_gkp("+", gkp.CombParams(tooth_width=2 * np.pi / 20), kappa)
    predicted = 2 * (np.sqrt(2) / kappa) / (2 * np.pi)
    assert abs(gkp.count_teeth(state.spectrum, state.comb) - predicted) <= 1


def test_composition_order_differs():
    c = gkp.CombParams(tooth_width=2 * np.pi / 20)
    a = gkp.physical_gkp("+", c, 0.1)
    b = gkp.physical_gkp("+", c, 0.1, grid=a.spectrum.grid, order="frequency_after_time")
    overlap = ps.inner(a.spectrum, b.spectrum)
    assert abs(overlap) < 1 - 1e-6
    assert abs(overlap) > 0.9


def test_time_domain_support_on_half_round_trip():
    state = gkp.physical_gkp("0", gkp.CombParams(tooth_width=2 * np.pi / 40), 0.05)
    amp = ps.to_time_domain(state.spectrum)
    x = amp.t / 0.5
    near = np.abs(x - np.round(x)) < 0.25   # inner half of each cell
    assert (amp.intensity() * amp.dt)[near].sum() > 0.99


@settings(max_examples=20, deadline=None)
@given(label=st.sampled_from(gkp.LABELS), d=st.integers(1, 12))
def test_ideal_states_normalized(label, d):
    s = gkp.ideal_gkp(label, "frequency", gkp.CombParams(), d=d)
    assert np.sum(np.abs(s.weights) ** 2) == pytest.approx(1.0)
    assert abs(gkp.ideal_overlap(s, s)) == pytest.approx(1.0)
