#!/usr/bin/env python3
"""Device-scale comb summary: tooth count, JTI period and Airy linewidth.

    python3 scripts/device_comb.py [--fsr-hz 19.2e9] [--band-hz 10.9e12] [--reflectivity 0.3]
"""

import argparse

from tfgkp import biphoton as bp
from tfgkp.config import ScenarioConfig, with_overrides


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--fsr-hz", type=float)
    p.add_argument("--band-hz", type=float)
    p.add_argument("--reflectivity", type=float)
    args = p.parse_args()

    cfg = with_overrides(ScenarioConfig(), {"comb.fsr_hz": args.fsr_hz,
                                            "comb.band_hz": args.band_hz,
                                            "cavity.reflectivity": args.reflectivity})
    params, units = cfg.comb_params(), cfg.units
    r = cfg.cavity.reflectivity
    ideal = bp.build_jsa(params, bp.CavityModel("fabry_perot", r))
    device = bp.build_jsa(params, cfg.cavity_model())
    period = float(units.time_to_si(bp.jti_period(device)))
    fwhm = float(units.norm_to_hz(bp.airy_fwhm(params.fsr, r)))

    print(f"fsr                  {cfg.comb.fsr_hz / 1e9:.3f} GHz")
    print(f"band (e^-2)          {cfg.comb.band_hz / 1e12:.3f} THz")
    print(f"teeth under envelope {bp.count_jsa_teeth(ideal)}")
    print(f"teeth with walk-off  {bp.count_jsa_teeth(device)}")
    print(f"JTI period           {period * 1e12:.3f} ps")
    print(f"Airy FWHM (r={r:g})   {fwhm / 1e9:.3f} GHz")


if __name__ == "__main__":
    main()
