#!/usr/bin/env python3
"""Render the point-target ladder B-mode and report localization error.

Produces a PGM of the compounded image and prints, for each wire target,
the true grid cell, the detected peak cell, and the offset in cells.

Example:
    python3 scripts/point_spread_figure.py --out ladder.pgm
"""

import argparse
import sys

import numpy as np

from pwbeam import (aberration, beamform, compound, config, dataio,
                    postproc, rfsim)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--pw", type=int, default=31)
    ap.add_argument("--span", type=float, default=15.0)
    ap.add_argument("--elements", type=int, default=49)
    ap.add_argument("--sigma", type=float, default=0.0)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--dr", type=float, default=60.0)
    ap.add_argument("--out", default="ladder.pgm")
    args = ap.parse_args(argv)

    probe = config.ProbeConfig(num_elements=args.elements,
                               num_planewaves=args.pw)
    imaging = config.ImagingConfig(depth_start=5e-3, depth_end=55e-3,
                                   num_depth_samples=251,
                                   num_scanlines=args.elements,
                                   dynamic_range=args.dr)
    angles = config.make_angle_set(args.pw, args.span, args.pw)
    phantom = rfsim.make_cyst_phantom("point_targets", args.seed)
    cube = rfsim.simulate(phantom, probe, angles,
                          duration=1.25 * 2 * 55e-3 / phantom.true_sos)
    profile = aberration.sample_profile(imaging.assumed_sos, args.sigma,
                                        imaging.num_scanlines, args.pw,
                                        args.seed)
    tensor = beamform.das_all(cube, profile, beamform.ApodizationSpec(),
                              imaging, probe, angles)
    bm = postproc.bmode(compound.cpc(tensor, range(args.pw)), args.dr)
    dataio.write_pgm(args.out, bm)

    depths, laterals = config.pixel_grid(imaging, probe)
    dz = depths[1] - depths[0]
    print("target_z_mm  true_cell  peak_cell  offset")
    for sc in phantom.scatterers:
        a_true = int(round((sc.z - imaging.depth_start) / dz))
        l_true = int(np.argmin(np.abs(laterals - sc.x)))
        window = bm.db[max(a_true - 12, 0):a_true + 13, :]
        ai, li = np.unravel_index(np.argmax(window), window.shape)
        ai += max(a_true - 12, 0)
        print(f"{sc.z * 1e3:>10.1f}  ({a_true:3d},{l_true:3d})  "
              f"({ai:3d},{li:3d})  ({ai - a_true:+d},{li - l_true:+d})")
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
