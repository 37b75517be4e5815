import numpy as np
import pytest

from pwbeam import beamform, compound, config, dataio, postproc


class TestBlob:
    def test_header_arithmetic_1x1_f32(self, tmp_path):
        p = tmp_path / "t.utb"
        dataio.write_blob(p, np.array([[3.5]], dtype=np.float32)[0])
        assert p.stat().st_size == 4 + 1 + 1 + 4 + 4
        assert dataio.read_blob(p) == np.array([3.5], dtype=np.float32)

    @pytest.mark.parametrize("dtype", [np.float32, np.float64, np.complex64])
    def test_roundtrip_bitwise(self, tmp_path, dtype):
        rng = np.random.default_rng(0)
        x = rng.standard_normal((31, 64, 19))
        if dtype == np.complex64:
            x = (x + 1j * rng.standard_normal(x.shape))
        x = x.astype(dtype)
        p = tmp_path / "t.utb"
        dataio.write_blob(p, x)
        back = dataio.read_blob(p)
        assert back.dtype == np.dtype(dtype).newbyteorder("<")
        assert back.tobytes() == x.tobytes()

    def test_corrupt_magic(self, tmp_path):
        p = tmp_path / "t.utb"
        dataio.write_blob(p, np.ones(3, dtype=np.float32))
        data = bytearray(p.read_bytes())
        data[0] = ord(b"X")
        p.write_bytes(bytes(data))
        with pytest.raises(dataio.BadMagicError):
            dataio.read_blob(p)

    def test_truncated_payload(self, tmp_path):
        p = tmp_path / "t.utb"
        dataio.write_blob(p, np.ones(8, dtype=np.float64))
        p.write_bytes(p.read_bytes()[:-4])
        with pytest.raises(dataio.TruncatedBlobError):
            dataio.read_blob(p)

    def test_unsupported_dtype(self, tmp_path):
        with pytest.raises(dataio.UnsupportedDtypeError):
            dataio.write_blob(tmp_path / "t.utb", np.ones(3, dtype=np.int32))


class TestPgm:
    def test_roundtrip_quantized(self, tmp_path):
        db = np.random.default_rng(1).uniform(-60, 0, (20, 30))
        bm = postproc.BmodeImage(db=db, dynamic_range=60.0)
        p = tmp_path / "i.pgm"
        dataio.write_pgm(p, bm)
        back = dataio.read_pgm(p, 60.0)
        assert back.shape == (20, 30)
        assert np.max(np.abs(back - db)) <= 60.0 / 255.0 / 2 + 1e-9


def _tiny_emission():
    probe = config.ProbeConfig(num_elements=8, num_planewaves=5)
    imaging = config.ImagingConfig(depth_start=2e-3, depth_end=5e-3,
                                   num_depth_samples=24, num_scanlines=8)
    return dataio.EmissionConfig(
        probe=probe, imaging=imaging, span_deg=5.0, k_list=(5, 3, 1),
        phantom_depth_range=(1.5e-3, 5.5e-3), phantom_lateral_halfwidth=0.6e-3,
        density_per_cell=0.3, cyst_radius=0.8e-3, cyst_center_depth=3.5e-3,
    )


class TestEmitDataset:
    def test_file_and_record_counts(self, tmp_path):
        m = dataio.emit_dataset(1, tmp_path, [7], _tiny_emission())
        assert len(m.records) == 9  # 3 sigma x 3 K
        inputs = {r.input_path for r in m.records}
        targets = {r.target_path for r in m.records}
        assert len(inputs) == 9 and len(targets) == 1
        for r in m.records:
            assert (tmp_path / r.input_path).exists()
            assert (tmp_path / r.target_path).exists()

    def test_clean_full_input_compounds_to_target(self, tmp_path):
        ecfg = _tiny_emission()
        m = dataio.emit_dataset(1, tmp_path, [3], ecfg)
        rec = next(r for r in m.records if r.sigma == 0.0 and r.K == 5)
        zin = dataio.read_blob(tmp_path / rec.input_path)
        target = dataio.read_blob(tmp_path / rec.target_path)
        v = compound.cpc(beamform.DasTensor(z=zin), range(5)).v
        assert np.max(np.abs(v - target)) < 1e-9 * max(np.abs(target).max(), 1e-30)

    def test_scale_normalizes_to_unit_max(self, tmp_path):
        m = dataio.emit_dataset(1, tmp_path, [3], _tiny_emission())
        for rec in m.records:
            zin = dataio.read_blob(tmp_path / rec.input_path)
            tgt = dataio.read_blob(tmp_path / rec.target_path)
            peak = max(np.abs(zin).max(), np.abs(tgt).max())
            assert peak / rec.scale == 1.0

    def test_manifest_roundtrip(self, tmp_path):
        m = dataio.emit_dataset(1, tmp_path, [3], _tiny_emission())
        back = dataio.DatasetManifest.read(tmp_path / "manifest.jsonl")
        assert back == m

    def test_byte_identical_across_runs(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        dataio.emit_dataset(1, a, [5], _tiny_emission())
        dataio.emit_dataset(1, b, [5], _tiny_emission())
        for f in sorted(p.name for p in a.iterdir()):
            assert (a / f).read_bytes() == (b / f).read_bytes()

    def test_needs_enough_seeds(self, tmp_path):
        with pytest.raises(ValueError):
            dataio.emit_dataset(2, tmp_path, [1], _tiny_emission())
