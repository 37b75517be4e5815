"""Command-line front end chaining the plane-wave pipeline stages."""

from __future__ import annotations

import argparse
import contextlib
import csv
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import aberration, beamform, compound, config, dataio, metrics, postproc, rfsim, svdbf


@dataclass(frozen=True)
class BenchReport:
    method: str
    K: int
    wall_ms: float
    A: int
    L: int

    def row(self):
        return [self.method, self.K, f"{self.wall_ms:.3f}", self.A, self.L]


def _load_cfg(args):
    if getattr(args, "config", None):
        if not os.path.exists(args.config):
            raise FileNotFoundError(args.config)
        return config.load_config_file(args.config)
    return config.default_probe(), config.ImagingConfig()


def _angles(probe, args):
    return config.make_angle_set(probe.num_planewaves, args.span, probe.num_planewaves)


def _apod(args):
    return beamform.ApodizationSpec(window=args.window, f_number=args.fnum)


def _require(path):
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    return path


def cmd_simulate(args):
    probe, imaging = _load_cfg(args)
    angles = _angles(probe, args)
    phantom = rfsim.make_cyst_phantom(
        args.phantom, args.seed,
        depth_range=(imaging.depth_start, imaging.depth_end),
        lateral_halfwidth=(probe.num_elements - 1) * probe.pitch / 2.0,
        density_per_cell=args.density,
        wavelength=probe.wavelength,
        cyst_radius=args.cyst_radius,
        cyst_center_depth=args.cyst_depth,
    )
    zmax = max(max(s.z for s in phantom.scatterers), imaging.depth_end)
    duration = args.duration or 1.3 * 2.0 * zmax / phantom.true_sos
    cube = rfsim.simulate(phantom, probe, angles, duration)
    dataio.write_blob(args.out, cube.samples)
    return 0


def cmd_beamform(args):
    probe, imaging = _load_cfg(args)
    angles = _angles(probe, args)
    samples = dataio.read_blob(_require(args.infile))
    cube = rfsim.RfCube(samples=samples, fs=probe.sampling_frequency, t0=0.0)
    profile = aberration.sample_profile(
        imaging.assumed_sos, args.sigma, imaging.num_scanlines, len(angles), args.seed)
    tensor = beamform.das_all(cube, profile, _apod(args), imaging, probe, angles)
    dataio.write_blob(args.out, tensor.z)
    return 0


def cmd_compound(args):
    z = dataio.read_blob(_require(args.infile))
    tensor = beamform.DasTensor(z=z)
    sel = compound.select_subset(z.shape[2], args.pw)
    img = compound.cpc(tensor, sel)
    dataio.write_blob(args.out, img.v)
    return 0


def cmd_svdbf(args):
    z = dataio.read_blob(_require(args.infile))
    ar, lr = (int(s) for s in args.patch.split("x"))
    t_start = time.perf_counter()
    result = svdbf.svd_beamform(beamform.DasTensor(z=z), (ar, lr))
    wall_ms = 1e3 * (time.perf_counter() - t_start)
    dataio.write_blob(args.out, result.magnitude)
    print(f"svdbf wall_ms={wall_ms:.3f} fallback_patches={result.fallback_patches}",
          file=sys.stderr)
    return 0


def cmd_bmode(args):
    v = dataio.read_blob(_require(args.infile))
    if args.envelope_input:
        bm = postproc.log_compress(v, args.dr)
    else:
        bm = postproc.bmode(compound.CompoundImage(v=v), args.dr)
    dataio.write_pgm(args.out, bm)
    return 0


def _parse_roi(text) -> metrics.RoiSpec:
    kind, _, rest = text.partition(":")
    vals = [float(x) for x in rest.split(",")]
    if kind == "circle":
        a, l, r = vals
        return metrics.RoiSpec(kind="circle", center=(a, l), radius=r)
    if kind == "rect":
        a0, l0, h, w = (int(v) for v in vals)
        return metrics.RoiSpec(kind="rect", origin=(a0, l0), extent=(h, w))
    raise ValueError(f"bad ROI spec {text!r} (want circle:a,l,r or rect:a0,l0,h,w)")


def cmd_metrics(args):
    db = dataio.read_pgm(_require(args.infile), dynamic_range=args.dr)
    ra, rb = _parse_roi(args.roi_a), _parse_roi(args.roi_b)
    rep = metrics.report(db, ra, rb, bins=args.bins)
    out = args.out and open(args.out, "w", newline="") or sys.stdout
    try:
        w = csv.writer(out)
        w.writerow(["cr_db", "cnr", "gcnr"])
        w.writerow([f"{rep.cr_db:.6f}", f"{rep.cnr:.6f}", f"{rep.gcnr:.6f}"])
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_dataset(args):
    probe, imaging = _load_cfg(args)
    k_list = tuple(int(k) for k in args.k_list.split(","))
    ecfg = dataio.EmissionConfig(
        probe=probe, imaging=imaging, apod=_apod(args), span_deg=args.span,
        k_list=k_list, phantom_kind=args.phantom,
        phantom_depth_range=(imaging.depth_start, imaging.depth_end),
        phantom_lateral_halfwidth=(probe.num_elements - 1) * probe.pitch / 2.0,
        density_per_cell=args.density,
        cyst_radius=args.cyst_radius, cyst_center_depth=args.cyst_depth,
    )
    seeds = range(args.seed_base, args.seed_base + args.scenes)
    dataio.emit_dataset(args.scenes, args.out, seeds, ecfg)
    return 0


def _median_wall_ms(fn, repeats):
    walls = []
    for _ in range(repeats):
        t = time.perf_counter()
        fn()
        walls.append(1e3 * (time.perf_counter() - t))
    return float(np.median(walls))


def cmd_bench(args):
    a, l = (int(s) for s in args.grid.split("x"))
    rng = np.random.Generator(np.random.Philox(key=args.seed))
    tensor = beamform.DasTensor(z=rng.standard_normal((a, l, args.pw)))
    sel = list(range(args.pw))
    reports = [
        BenchReport("cpc", args.pw, _median_wall_ms(lambda: compound.cpc(tensor, sel),
                                                    args.repeats), a, l),
        BenchReport("svd", args.pw, _median_wall_ms(lambda: svdbf.svd_beamform(tensor),
                                                    args.repeats), a, l),
    ]
    w = csv.writer(sys.stdout)
    w.writerow(["method", "K", "wall_ms", "A", "L"])
    for rep in reports:
        w.writerow(rep.row())
    return 0


def cmd_pipeline(args):
    out = args.out_dir
    os.makedirs(out, exist_ok=True)
    path = lambda name: os.path.join(out, name)
    geom = ["--span", str(args.span), "--fnum", str(args.fnum), "--window", args.window]
    stages = [
        ["simulate", "--phantom", args.phantom, "--seed", str(args.seed),
         "--cyst-radius", str(args.cyst_radius), "--cyst-depth", str(args.cyst_depth),
         "--out", path("cube.utb")] + geom,
        ["beamform", "--in", path("cube.utb"), "--sigma", str(args.sigma),
         "--seed", str(args.seed), "--out", path("das.utb")] + geom,
        ["compound", "--in", path("das.utb"), "--pw", str(args.pw),
         "--out", path("cpc.utb")],
        ["svdbf", "--in", path("das.utb"), "--patch", args.patch,
         "--out", path("svd.utb")],
        ["bmode", "--in", path("cpc.utb"), "--dr", str(args.dr),
         "--out", path("cpc.pgm")],
        ["bmode", "--in", path("svd.utb"), "--dr", str(args.dr),
         "--envelope-input", "--out", path("svd.pgm")],
    ]
    passthrough = []
    if args.config:
        passthrough += ["--config", args.config]
    for stage in stages:
        code = main(stage + passthrough if stage[0] in
                    ("simulate", "beamform", "dataset") else stage)
        if code != 0:
            return code
    # score both methods against the cyst geometry on the reconstruction grid
    probe, imaging = _load_cfg(args)
    if args.phantom in ("hypoechoic", "hyperechoic"):
        ra, rb = _default_rois(imaging, probe, args.cyst_radius, args.cyst_depth)
        rows = []
        for method, pgm in (("cpc", "cpc.pgm"), ("svd", "svd.pgm")):
            db = dataio.read_pgm(path(pgm), dynamic_range=args.dr)
            rep = metrics.report(db, ra, rb)
            rows.append([method, f"{rep.cr_db:.6f}", f"{rep.cnr:.6f}", f"{rep.gcnr:.6f}"])
        with open(path("metrics.csv"), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["method", "cr_db", "cnr", "gcnr"])
            w.writerows(rows)
    return 0


def _default_rois(imaging, probe, cyst_radius, cyst_depth):
    """Cyst-interior circle vs same-depth background rectangle, in grid indices."""
    depths, laterals = config.pixel_grid(imaging, probe)
    na, nl = len(depths), len(laterals)
    dz = depths[1] - depths[0] if na > 1 else 1.0
    dx = probe.pitch
    r_pix = max(2, int(0.7 * cyst_radius / max(dz, dx)))
    r_pix = min(r_pix, (min(na, nl) - 1) // 4)
    a_c = int(np.clip(round((cyst_depth - imaging.depth_start) / dz), r_pix, na - 1 - r_pix))
    l_c = nl // 2
    ra = metrics.RoiSpec(kind="circle", center=(a_c, l_c), radius=r_pix)
    # background strip at the same depth, on whichever side has more room
    l_edge = max(r_pix + 2, int(round(1.5 * cyst_radius / dx)))
    right = nl - (l_c + l_edge)
    left = l_c - l_edge
    width = max(2, max(right, left))
    h = min(na, max(max(4, 2 * r_pix + 1), -(-metrics.MIN_ROI_PIXELS // width) + 2))
    a0 = int(np.clip(a_c - h // 2, 0, na - h))
    if right >= left:
        rb = metrics.RoiSpec(kind="rect", origin=(a0, min(l_c + l_edge, nl - width)),
                             extent=(h, width))
    else:
        rb = metrics.RoiSpec(kind="rect", origin=(a0, 0), extent=(h, width))
    return ra, rb


def build_parser():
    p = argparse.ArgumentParser(prog="pwbeam",
                                description="Plane-wave ultrasound beamforming pipeline")
    p.add_argument("--threads", type=int, default=0,
                   help="cap BLAS/OpenMP worker threads (0 = library default)")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, cfg=True, geom=False):
        if cfg:
            sp.add_argument("--config", default=None, help="key=value config file")
        if geom:
            sp.add_argument("--span", type=float, default=15.0, help="angle span, degrees")
            sp.add_argument("--fnum", type=float, default=1.0)
            sp.add_argument("--window", default="hann", choices=["hann", "rectangular"])

    sp = sub.add_parser("simulate", help="synthesize RF channel data from a phantom")
    common(sp, geom=True)
    sp.add_argument("--phantom", required=True,
                    choices=["hypoechoic", "hyperechoic", "point_targets"])
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--density", type=float, default=4.0)
    sp.add_argument("--cyst-radius", type=float, default=3e-3)
    sp.add_argument("--cyst-depth", type=float, default=20e-3)
    sp.add_argument("--duration", type=float, default=None)
    sp.add_argument("--out", required=True)
    sp.set_defaults(fn=cmd_simulate)

    sp = sub.add_parser("beamform", help="DAS-beamform an RF cube with SoS perturbation")
    common(sp, geom=True)
    sp.add_argument("--in", dest="infile", required=True)
    sp.add_argument("--sigma", type=float, default=0.0)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)
    sp.set_defaults(fn=cmd_beamform)

    sp = sub.add_parser("compound", help="coherent planewave compounding")
    sp.add_argument("--in", dest="infile", required=True)
    sp.add_argument("--pw", type=int, required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(fn=cmd_compound)

    sp = sub.add_parser("svdbf", help="patch-based SVD compounding")
    sp.add_argument("--in", dest="infile", required=True)
    sp.add_argument("--patch", default="32x32")
    sp.add_argument("--out", required=True)
    sp.set_defaults(fn=cmd_svdbf)

    sp = sub.add_parser("bmode", help="envelope + log compression to PGM")
    sp.add_argument("--in", dest="infile", required=True)
    sp.add_argument("--dr", type=float, default=60.0)
    sp.add_argument("--envelope-input", action="store_true",
                    help="input blob is already an envelope (e.g. svdbf magnitude)")
    sp.add_argument("--out", required=True)
    sp.set_defaults(fn=cmd_bmode)

    sp = sub.add_parser("metrics", help="CR/CNR/GCNR over two ROIs of a PGM image")
    sp.add_argument("--in", dest="infile", required=True)
    sp.add_argument("--roi-a", required=True)
    sp.add_argument("--roi-b", required=True)
    sp.add_argument("--dr", type=float, default=60.0)
    sp.add_argument("--bins", type=int, default=256)
    sp.add_argument("--out", default=None)
    sp.set_defaults(fn=cmd_metrics)

    sp = sub.add_parser("dataset", help="emit the self-supervised training corpus")
    common(sp, geom=True)
    sp.add_argument("--scenes", type=int, required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--seed-base", type=int, default=0)
    sp.add_argument("--phantom", default="hypoechoic",
                    choices=["hypoechoic", "hyperechoic"])
    sp.add_argument("--density", type=float, default=4.0)
    sp.add_argument("--cyst-radius", type=float, default=3e-3)
    sp.add_argument("--cyst-depth", type=float, default=20e-3)
    sp.add_argument("--k-list", default="31,25,15")
    sp.set_defaults(fn=cmd_dataset)

    sp = sub.add_parser("bench", help="relative timing of cpc vs svdbf")
    sp.add_argument("--pw", type=int, default=31)
    sp.add_argument("--grid", default="1024x192")
    sp.add_argument("--repeats", type=int, default=3)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(fn=cmd_bench)

    sp = sub.add_parser("pipeline", help="simulate -> beamform -> compound/svd -> metrics")
    common(sp, geom=True)
    sp.add_argument("--phantom", default="hypoechoic",
                    choices=["hypoechoic", "hyperechoic", "point_targets"])
    sp.add_argument("--sigma", type=float, default=0.0)
    sp.add_argument("--pw", type=int, default=31)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--patch", default="32x32")
    sp.add_argument("--dr", type=float, default=60.0)
    sp.add_argument("--cyst-radius", type=float, default=3e-3)
    sp.add_argument("--cyst-depth", type=float, default=20e-3)
    sp.add_argument("--out-dir", default=".")
    sp.set_defaults(fn=cmd_pipeline)
    return p


def _thread_limit(n):
    if n and n > 0:
        try:
            from threadpoolctl import threadpool_limits
            return threadpool_limits(limits=n)
        except ImportError:
            pass
    return contextlib.nullcontext()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with _thread_limit(args.threads):
            return args.fn(args)
    except FileNotFoundError as exc:
        print(f"pwbeam: missing input file: {exc}", file=sys.stderr)
        return 1
    except (ValueError, dataio.BlobError) as exc:
        print(f"pwbeam: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
