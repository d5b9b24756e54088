"""Command-line front end.

    python -m tfgkp <subcommand> [--config scenario.json] [overrides]

Exit codes: 0 success, 1 configuration error, 2 numerical-regime error.
The default worker count may be taken from ``TFGKP_THREADS``; results do
not depend on it.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import biphoton as bp
from . import error_correction as ec
from . import gkp
from . import hom
from . import phase_space as ps
from .config import KINDS, ScenarioConfig, load_config, with_overrides
from .errors import ConfigError, TfGkpError
from .io import ResultTable, emit, provenance


def _degenerate_source(cfg: ScenarioConfig):
    params = replace(cfg.comb_params(), pump_width=0.0)
    cavity = cfg.cavity_model()
    grid = bp.default_nu_grid(params, cavity, points_per_line=cfg.scan.points_per_line)
    return bp.build_jsa(params, cavity, nu_grid=grid)


def _tau_axis(cfg: ScenarioConfig) -> np.ndarray:
    u = cfg.units
    lo, hi = (float(u.time_to_norm(x)) for x in (cfg.scan.tau_min_s, cfg.scan.tau_max_s))
    return np.linspace(lo, hi, cfg.scan.n_tau)


def _write(cfg, table: ResultTable, path=None) -> Path:
    return emit(table, path or cfg.output, cfg.format)


def _sibling(path: str, suffix: str, fmt: str) -> Path:
    p = Path(path)
    return p.with_name(f"{p.stem}_{suffix}.{fmt}")


# --------------------------------------------------------------------------
# scenarios
# --------------------------------------------------------------------------

def run_hom_scan(cfg: ScenarioConfig, prov: dict) -> str:
    jsa = _degenerate_source(cfg)
    filt = (cfg.filter_specs() or [None])[0]
    tau = _tau_axis(cfg)
    scan = hom.coincidence_scan(jsa, tau, filt)
    central, secondary = hom.scan_visibilities(jsa, filt)
    _write(cfg, ResultTable.from_columns(
        {"tau_s": cfg.units.time_to_si(tau), "tau_norm": tau, "coincidence": scan.coincidence},
        prov))
    summary = ResultTable.from_columns(
        {"reflectivity": [cfg.cavity.reflectivity], "central_visibility": [central],
         "secondary_visibility": [secondary]}, prov)
    _write(cfg, summary, _sibling(cfg.output, "summary", cfg.format))
    return f"hom-scan: {tau.size} delays, central V={central:.4f}, secondary V={secondary:.4f}"


def run_visibility_sweep(cfg: ScenarioConfig, prov: dict) -> str:
    cav = cfg.cavity_model()
    filters = [None] + cfg.filter_specs()
    rows = hom.visibility_vs_reflectivity(cfg.comb_params(), cfg.scan.reflectivities, filters,
                                          cav.beta2, cav.birefringence, workers=cfg.workers)
    table = ResultTable(["reflectivity", "filter", "central_visibility", "secondary_visibility"],
                        [[r["reflectivity"], r["filter"], r["central_visibility"],
                          r["secondary_visibility"]] for r in rows], prov)
    _write(cfg, table)
    return f"visibility-sweep: {len(rows)} rows"


def run_jsa(cfg: ScenarioConfig, prov: dict) -> str:
    params = cfg.comb_params()
    if params.pump_width == 0:
        jsa = _degenerate_source(cfg)
        u = cfg.units
        a = jsa.amplitudes
        table = ResultTable.from_columns({
            "nu_norm": jsa.nu, "omega_signal_hz": u.norm_to_hz(jsa.omega_signal()),
            "re": a.real, "im": a.imag, "intensity": np.abs(a) ** 2}, prov)
        _write(cfg, table)
        return f"jsa: degenerate line with {a.size} points"
    jsa = _two_d_source(cfg)
    S, I = np.meshgrid(jsa.omega_s, jsa.omega_i, indexing="ij")
    a = jsa.amplitudes
    _write(cfg, ResultTable.from_columns({"omega_s_norm": S, "omega_i_norm": I, "re": a.real,
                                          "im": a.imag, "intensity": np.abs(a) ** 2}, prov))
    return f"jsa: {a.shape[0]}x{a.shape[1]} grid"


def _two_d_source(cfg: ScenarioConfig):
    params = cfg.comb_params()
    cavity = cfg.cavity_model()
    n = cfg.scan.grid_points
    half = 5 * max(params.phasematch_width, params.pump_width)
    g = ps.FrequencyGrid.centered(half, n, center=params.pump_center / 2)
    return bp.build_jsa(params, cavity, g, g)


def run_jti(cfg: ScenarioConfig, prov: dict) -> str:
    params = cfg.comb_params()
    u = cfg.units
    if params.pump_width == 0:
        jsa = _degenerate_source(cfg)
        grid = bp.jti(jsa)
        period = bp.jti_period(jsa)
        _write(cfg, ResultTable.from_columns(
            {"t_minus_s": u.time_to_si(grid.axis_1), "density": grid.values[:, 0]}, prov))
        return f"jti: period {float(u.time_to_si(period)) * 1e12:.3f} ps"
    grid = bp.jti(_two_d_source(cfg))
    T_s, T_i = np.meshgrid(grid.axis_1, grid.axis_2, indexing="ij")
    _write(cfg, ResultTable.from_columns(
        {"t_s_norm": T_s, "t_i_norm": T_i, "value": grid.values}, prov))
    return f"jti: {grid.values.shape[0]}x{grid.values.shape[1]} grid"


def _gkp_state(cfg: ScenarioConfig):
    u = cfg.units
    comb = gkp.CombParams(tooth_width=float(u.hz_to_norm(cfg.gkp.tooth_width_hz)))
    kappa = gkp.kappa_for_band(float(u.hz_to_norm(cfg.gkp.envelope_band_hz)))
    return gkp.physical_gkp(cfg.gkp.label, comb, kappa, order=cfg.gkp.order)


def run_gkp_state(cfg: ScenarioConfig, prov: dict) -> str:
    state = _gkp_state(cfg)
    s = state.spectrum
    _write(cfg, ResultTable.from_columns(
        {"omega_norm": s.omega, "re": s.amplitudes.real, "im": s.amplitudes.imag}, prov))
    fs = gkp.stabilizer_expectation(state, "frequency_stab")
    ts = gkp.stabilizer_expectation(state, "time_stab")
    teeth = gkp.count_teeth(s, state.comb)
    return (f"gkp-state |{state.label}>: {teeth} teeth, <S_w>={fs.real:.4f}, "
            f"<S_t>={ts.real:.4f}")


def run_wigner(cfg: ScenarioConfig, prov: dict) -> str:
    state = _gkp_state(cfg)
    n = cfg.scan.grid_points
    wmax = 2.0 / state.kappa
    tmax = 1.5 * state.comb.round_trip
    om = np.linspace(-wmax, wmax, n)
    tt = np.linspace(-tmax, tmax, n)
    O, T = np.meshgrid(om, tt, indexing="ij")
    vals = ps.wigner_points(state.spectrum, O.ravel(), T.ravel()).reshape(O.shape)
    _write(cfg, ResultTable.from_columns({"omega_norm": O, "t_norm": T, "wigner": vals}, prov))
    return f"wigner: {n}x{n} points, min W={vals.min():.4f}"


def run_ec_mc(cfg: ScenarioConfig, prov: dict) -> str:
    u = cfg.units
    n = cfg.noise
    if n.kind == "gaussian":
        noise = ec.NoiseModel("gaussian", float(u.time_to_norm(n.time_width_signal_s)),
                              float(u.time_to_norm(n.time_width_idler_s)),
                              float(u.hz_to_norm(n.freq_width_hz)))
    else:
        t, tp, w, wp = n.offsets
        noise = ec.NoiseModel("dirac", offsets=(float(u.time_to_norm(t)), float(u.time_to_norm(tp)),
                                                float(u.hz_to_norm(w)), float(u.hz_to_norm(wp))),
                              uniform_window=n.uniform_window)
    stats = ec.ec_monte_carlo(gkp.CombParams(), noise, cfg.trials, cfg.master_seed,
                              workers=cfg.workers)
    summary = stats.summary()
    _write(cfg, ResultTable(list(summary), [list(summary.values())], prov))
    return (f"ec-mc: {cfg.trials} trials, success {stats.success_rate:.4f}, "
            f"variance ratio {stats.posterior_consistency:.4f}")


def selftest_checks() -> list[tuple[str, bool]]:
    out = []
    grid = ps.FrequencyGrid.centered(12.0, 481)
    spec = ps.gaussian_spectrum(grid, center=0.3, width=1.0)
    mu, tau = 8 * grid.spacing, 0.7
    a = ps.displace(spec, ps.DisplacementSpec(mu, tau, "normal")).amplitudes
    b = ps.displace(spec, ps.DisplacementSpec(mu, tau, "antinormal")).amplitudes
    mask = np.abs(b) > 1e-8
    out.append(("weyl phase", bool(np.allclose(a[mask] / b[mask], np.exp(1j * mu * tau),
                                               atol=1e-9))))
    w = ps.wigner(spec)
    out.append(("wigner normalization", abs(w.total() - 1) < 1e-6))
    marg = ps.marginal(w, "time")
    ref = ps.refined_spectrum(spec).intensity()
    out.append(("frequency marginal", np.linalg.norm(marg - ref) / np.linalg.norm(ref) < 1e-6))
    comb = gkp.CombParams(tooth_width=2 * np.pi / 20, phasematch_width=5 * 2 * np.pi)
    jsa = bp.build_jsa(comb, bp.CavityModel("gaussian_comb"))
    taus = np.linspace(-2, 2, 801)
    num = hom.coincidence_scan(jsa, taus).coincidence
    ana = hom.coincidence_analytic(comb, taus)
    out.append(("hom numeric vs analytic", float(np.abs(num - ana).max()) < 1e-3))
    noise = ec.NoiseModel("gaussian", 0.06, 0.09)
    stats = ec.ec_monte_carlo(gkp.CombParams(), noise, 20000, 1)
    out.append(("posterior variance", abs(stats.posterior_consistency - 1) < 0.05))
    return out


def run_selftest(cfg: ScenarioConfig, prov: dict) -> str:
    checks = selftest_checks()
    for name, ok in checks:
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
    n_ok = sum(ok for _, ok in checks)
    msg = f"selftest: {n_ok}/{len(checks)} passed"
    if n_ok != len(checks):
        raise SelftestFailed(msg)
    return msg


class SelftestFailed(TfGkpError):
    pass


RUNNERS = {
    "wigner": run_wigner, "gkp-state": run_gkp_state, "jsa": run_jsa, "jti": run_jti,
    "hom-scan": run_hom_scan, "visibility-sweep": run_visibility_sweep, "ec-mc": run_ec_mc,
    "selftest": run_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tfgkp", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=KINDS)
    p.add_argument("--config", help="scenario JSON file")
    p.add_argument("--output", "-o")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--seed", type=int, dest="master_seed")
    p.add_argument("--trials", type=int)
    p.add_argument("--workers", type=int,
                   default=int(os.environ["TFGKP_THREADS"]) if "TFGKP_THREADS" in os.environ else None)
    p.add_argument("--reflectivity", type=float)
    p.add_argument("--fsr-hz", type=float)
    p.add_argument("--band-hz", type=float)
    return p


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    where = args.config or "<defaults>"
    try:
        cfg = load_config(args.config) if args.config else ScenarioConfig()
        cfg = with_overrides(cfg, {
            "kind": args.command, "output": args.output, "format": args.format,
            "master_seed": args.master_seed, "trials": args.trials, "workers": args.workers,
            "cavity.reflectivity": args.reflectivity, "comb.fsr_hz": args.fsr_hz,
            "comb.band_hz": args.band_hz,
        })
        if args.output is None and args.config is None:
            cfg = replace(cfg, output=f"{args.command}.{cfg.format}")
        prov = provenance(cfg.result_json(), cfg.kind)
        print(RUNNERS[cfg.kind](cfg, prov))
    except ConfigError as exc:
        print(f"config error ({where}): {exc}", file=sys.stderr)
        return 1
    except TfGkpError as exc:
        print(f"numerical error ({where}): {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(run())
