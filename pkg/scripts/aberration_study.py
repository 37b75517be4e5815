#!/usr/bin/env python3
"""Sweep sound-speed jitter levels and compare CPC against the SVD compounder.

Simulates hypoechoic cyst scenes, beamforms each one under every jitter
level, and writes per-seed CNR/GCNR rows plus a mean summary to CSV.

Example:
    python3 scripts/aberration_study.py --seeds 10 --pw 31 --span 15 \
        --out study.csv
"""

import argparse
import csv
import sys
import time

import numpy as np

from pwbeam import (aberration, beamform, compound, config, metrics,
                    postproc, rfsim, svdbf)


def build_scene(seed, probe, angles, args):
    phantom = rfsim.make_cyst_phantom(
        "hypoechoic", seed,
        depth_range=(args.depth_start - 1e-3, args.depth_end + 1e-3),
        lateral_halfwidth=args.lateral_halfwidth,
        density_per_cell=args.density, wavelength=probe.wavelength,
        cyst_radius=args.cyst_radius, cyst_center_depth=args.cyst_depth,
    )
    duration = 1.25 * 2 * (args.depth_end + 1e-3) / phantom.true_sos
    return rfsim.simulate(phantom, probe, angles, duration=duration)


def rois(imaging, probe, args):
    depths, laterals = config.pixel_grid(imaging, probe)
    dz = depths[1] - depths[0]
    a_c = int(round((args.cyst_depth - imaging.depth_start) / dz))
    r_pix = min(int(args.cyst_radius / (laterals[1] - laterals[0])) - 3,
                int(args.cyst_radius / dz) - 3)
    ra = metrics.RoiSpec(kind="circle", center=(a_c, len(laterals) // 2),
                         radius=max(r_pix, 3))
    w = len(laterals) - (len(laterals) // 2 + 2 * r_pix + 2)
    rb = metrics.RoiSpec(kind="rect",
                         origin=(a_c - 2 * r_pix, len(laterals) - w),
                         extent=(4 * r_pix, w))
    return ra, rb


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--pw", type=int, default=31)
    ap.add_argument("--span", type=float, default=15.0)
    ap.add_argument("--elements", type=int, default=48)
    ap.add_argument("--depth-start", type=float, default=14e-3)
    ap.add_argument("--depth-end", type=float, default=26e-3)
    ap.add_argument("--depth-samples", type=int, default=160)
    ap.add_argument("--cyst-radius", type=float, default=2e-3)
    ap.add_argument("--cyst-depth", type=float, default=20e-3)
    ap.add_argument("--lateral-halfwidth", type=float, default=4.5e-3)
    ap.add_argument("--density", type=float, default=2.0)
    ap.add_argument("--gcnr-bins", type=int, default=48)
    ap.add_argument("--out", default="aberration_study.csv")
    args = ap.parse_args(argv)

    probe = config.ProbeConfig(num_elements=args.elements,
                               num_planewaves=args.pw)
    imaging = config.ImagingConfig(depth_start=args.depth_start,
                                   depth_end=args.depth_end,
                                   num_depth_samples=args.depth_samples,
                                   num_scanlines=args.elements)
    angles = config.make_angle_set(args.pw, args.span, args.pw)
    apod = beamform.ApodizationSpec()
    ra, rb = rois(imaging, probe, args)

    rows = []
    t0 = time.time()
    for seed in range(args.seeds):
        cube = build_scene(seed, probe, angles, args)
        for sigma in aberration.sigma_levels():
            profile = aberration.sample_profile(
                imaging.assumed_sos, sigma, imaging.num_scanlines,
                args.pw, seed)
            tensor = beamform.das_all(cube, profile, apod, imaging, probe,
                                      angles)
            cpc_db = postproc.bmode(compound.cpc(tensor, range(args.pw)),
                                    imaging.dynamic_range).db
            svd_db = postproc.log_compress(
                svdbf.svd_beamform(tensor).magnitude, imaging.dynamic_range).db
            for method, db in (("cpc", cpc_db), ("svd", svd_db)):
                rows.append(dict(
                    seed=seed, sigma=sigma, method=method,
                    cr_db=metrics.cr(db, ra, rb),
                    cnr=metrics.cnr(db, ra, rb),
                    gcnr=metrics.gcnr(db, ra, rb, bins=args.gcnr_bins),
                ))
        print(f"seed {seed} done ({time.time() - t0:.1f} s)", file=sys.stderr)

    with open(args.out, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)

    print(f"wrote {len(rows)} rows to {args.out}")
    for method in ("cpc", "svd"):
        for sigma in aberration.sigma_levels():
            sel = [r for r in rows
                   if r["method"] == method and r["sigma"] == sigma]
            print(f"{method} sigma={sigma:>5}: "
                  f"CNR {np.mean([r['cnr'] for r in sel]):.3f}  "
                  f"GCNR {np.mean([r['gcnr'] for r in sel]):.3f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
