"""Acceptance criteria for the learned compounder.

The fast contract checks cover the architecture and the training
schedule; the slow robustness check drives the full external pipeline:
the beamforming package's CLI emits the datasets and scores the images,
this package only ever touches blob and manifest files. Each test emits
one pass/fail line, replayed in the terminal summary by conftest.py.
"""

import csv
import subprocess
import time
from pathlib import Path

import numpy as np
import pytest
import torch

from pwtrainer import blobs, infer, model, train
from test_train import make_dataset

# depth grid at 25 um spacing so the beamformed tensor resolves the RF
# carrier (two-way axial period ~91 um); a coarser grid aliases it and the
# network has nothing learnable to regress. The cyst sits at 12 mm where
# the worst jitter level leaves partial phase coherence across slabs.
DESK_CFG = """\
num_elements=32
num_scanlines=32
num_planewaves=15
depth_start=0.010
depth_end=0.014
num_depth_samples=160
"""
ROI_A = "rect:40,13,80,7"
ROI_B = "rect:40,25,80,6"


REPORT_LINES = []


def _report(name, desc, ok, elapsed, budget):
    status = "PASS" if ok and elapsed < budget else "FAIL"
    line = f"[{status}] {name} - {desc} ({elapsed:.1f} s, budget {budget:.0f} s)"
    REPORT_LINES.append(line)
    print(line)
    assert ok, f"{name}: {desc}"
    assert elapsed < budget, f"{name}: took {elapsed:.1f} s, budget {budget} s"


def test_a9_architecture_contract():
    t_start = time.time()
    ok = True
    for k in (31, 25, 15):
        net = model.build_model(64, 64, k)
        with torch.no_grad():
            out = net(1e4 * torch.randn(2, 64, 64, k))
        ok &= out.shape == (2, 64, 64)
        ok &= float(out.abs().max()) <= 1.0
        ok &= tuple(net.block1.conv.weight.shape) == (64, 1, 15, 3, k)
        ok &= net.block1.conv.stride == (1, 1, k)
        for blk in (net.block2, net.block3):
            ok &= tuple(blk.conv.weight.shape) == (64, 1, 15, 3, 64)
            ok &= blk.conv.stride == (1, 1, 64)
        ok &= net.block3.norm is None and net.block2.norm is not None
        ok &= tuple(net.head.weight.shape) == (1, 64, 1, 1)
    _report("A9", "A x L x K -> A x L for K in {31,25,15}, tanh-bounded, "
            "J=64 / 15x3xM / stride (1,1,M) layer shapes", ok,
            time.time() - t_start, 60.0)


def test_a10_overfit_and_lr_schedule(tmp_path):
    t_start = time.time()
    mpath = make_dataset(tmp_path, 1)
    cfg = train.TrainConfig(max_epochs=50, patience=50, val_fraction=0.0)
    hist = train.train(mpath, 5, tmp_path / "w.pt", cfg=cfg)
    drop = hist[0]["train_mse"] / min(r["train_mse"] for r in hist)
    lr_ok = all(abs(r["lr"] - cfg.lr_at(r["epoch"])) <= 1e-12 * cfg.lr_at(r["epoch"])
                for r in hist)
    ok = drop >= 10.0 and lr_ok
    _report("A10", f"single-sample MSE drop {drop:.1f}x >= 10x; realized lr "
            "matches 1e-4*exp(-1e-3*epoch) within 1e-12", ok,
            time.time() - t_start, 120.0)


def _pwbeam(*argv):
    return subprocess.run(["pwbeam", *argv], check=True,
                          capture_output=True, text=True)


def _score(pgm):
    res = _pwbeam("metrics", "--in", str(pgm), "--roi-a", ROI_A,
                  "--roi-b", ROI_B, "--bins", "40")
    rows = list(csv.DictReader(res.stdout.splitlines()))
    return float(rows[0]["cnr"]), float(rows[0]["gcnr"])


@pytest.mark.slow
def test_a11_robustness_gain(tmp_path):
    t_start = time.time()
    cfg_path = tmp_path / "desk.cfg"
    cfg_path.write_text(DESK_CFG)
    common = ["--config", str(cfg_path), "--span", "15", "--k-list", "15",
              "--density", "2.0", "--cyst-radius", "0.0015",
              "--cyst-depth", "0.012"]
    _pwbeam("dataset", "--scenes", "100", "--seed-base", "0",
            "--out", str(tmp_path / "ds_train"), *common)
    _pwbeam("dataset", "--scenes", "12", "--seed-base", "1000",
            "--out", str(tmp_path / "ds_eval"), *common)

    weights = tmp_path / "w15.pt"
    train.train(tmp_path / "ds_train" / "manifest.jsonl", 15, weights,
                cfg=train.TrainConfig(max_epochs=40))

    held_out = [e for e in blobs.load_manifest(tmp_path / "ds_eval" / "manifest.jsonl")
                if e.sigma == 3.85 and e.K == 15]
    assert len(held_out) >= 10
    gaps_cnr, g_model, g_cpc = [], [], []
    for e in held_out:
        inp = tmp_path / "ds_eval" / e.input_path
        infer.infer(weights, inp, tmp_path / "vm.utb", e.scale)
        _pwbeam("compound", "--in", str(inp), "--pw", "15",
                "--out", str(tmp_path / "vc.utb"))
        _pwbeam("bmode", "--in", str(tmp_path / "vm.utb"), "--dr", "60",
                "--out", str(tmp_path / "vm.pgm"))
        _pwbeam("bmode", "--in", str(tmp_path / "vc.utb"), "--dr", "60",
                "--out", str(tmp_path / "vc.pgm"))
        cnr_m, gcnr_m = _score(tmp_path / "vm.pgm")
        cnr_c, gcnr_c = _score(tmp_path / "vc.pgm")
        gaps_cnr.append(cnr_m - cnr_c)
        g_model.append(gcnr_m)
        g_cpc.append(gcnr_c)
    mean_gap = float(np.mean(gaps_cnr))
    ok = np.mean(g_model) > np.mean(g_cpc) and mean_gap > 0
    desc = (f"held-out sigma=3.85 K=15 over {len(held_out)} scenes: mean GCNR "
            f"model {np.mean(g_model):.3f} > cpc {np.mean(g_cpc):.3f}; mean "
            f"CNR gap {mean_gap:+.3f} > 0 (scored via the pwbeam CLI)")
    _report("A11", desc, ok, time.time() - t_start, 7200.0)
