import math

import numpy as np
import pytest

from pwbeam import config, rfsim


@pytest.fixture
def probe():
    return config.ProbeConfig(num_elements=16, num_planewaves=3)


@pytest.fixture
def angles():
    return config.make_angle_set(3, 5.0, 3)


class TestGaussPulse:
    def test_peak_at_zero(self):
        assert rfsim.gauss_pulse(0.0, 8.48e6) == pytest.approx(1.0)

    def test_decay_beyond_seven_sigma(self):
        st = rfsim.pulse_sigma_t(8.48e6, 0.6)
        t = np.linspace(7 * st, 20 * st, 100)
        assert np.max(np.abs(rfsim.gauss_pulse(t, 8.48e6))) < 1e-9

    def test_even_symmetry(self):
        t = np.linspace(0, 1e-6, 257)
        assert np.allclose(rfsim.gauss_pulse(t, 5e6), rfsim.gauss_pulse(-t, 5e6))

    def test_rejects_bad_args(self):
        with pytest.raises(ValueError):
            rfsim.gauss_pulse(0.0, -1.0)
        with pytest.raises(ValueError):
            rfsim.gauss_pulse(0.0, 5e6, frac_bw=2.5)


class TestSimulate:
    def test_normal_incidence_arrival_time(self, probe, angles):
        z = 5e-3
        ph = rfsim.Phantom((rfsim.Scatterer(probe.element_positions()[8], z, 1.0),), 1540.0)
        cube = rfsim.simulate(ph, probe, angles, duration=1e-5)
        # center planewave, element directly above the scatterer
        trace = cube.samples[:, 8, 1]
        expect = round(probe.sampling_frequency * 2 * z / 1540.0)
        assert abs(int(np.argmax(np.abs(trace))) - expect) <= 1

    def test_zero_amplitude_gives_zero_cube(self, probe, angles):
        ph = rfsim.Phantom((rfsim.Scatterer(0.0, 5e-3, 0.0),), 1540.0)
        cube = rfsim.simulate(ph, probe, angles, duration=1e-5)
        assert not np.any(cube.samples)

    def test_linearity(self, probe, angles):
        s1 = rfsim.Scatterer(0.5e-3, 4e-3, 0.7)
        s2 = rfsim.Scatterer(-0.8e-3, 6e-3, -0.4)
        both = rfsim.simulate(rfsim.Phantom((s1, s2)), probe, angles, 1e-5)
        one = rfsim.simulate(rfsim.Phantom((s1,)), probe, angles, 1e-5)
        two = rfsim.simulate(rfsim.Phantom((s2,)), probe, angles, 1e-5)
        ref = np.abs(both.samples).max()
        assert np.max(np.abs(both.samples - one.samples - two.samples)) < 1e-12 * ref

    def test_transmit_angle_shift_at_positive_x(self, probe, angles):
        # transmit leg changes by z(cos(theta)-1) + x sin(theta) relative to
        # normal incidence, measured on the same element
        x = 1.2e-3
        z = 6e-3
        ph = rfsim.Phantom((rfsim.Scatterer(x, z, 1.0),), 1540.0)
        cube = rfsim.simulate(ph, probe, angles, duration=1e-5)
        elem = int(np.argmin(np.abs(probe.element_positions() - x)))
        t_zero = np.argmax(np.abs(cube.samples[:, elem, 1]))
        for k in (0, 2):
            theta = angles.as_array()[k]
            t_k = np.argmax(np.abs(cube.samples[:, elem, k]))
            predicted = (z * (math.cos(theta) - 1) + x * math.sin(theta)) / 1540.0
            shift = (t_k - t_zero) / probe.sampling_frequency
            assert shift == pytest.approx(predicted, abs=1.5 / probe.sampling_frequency)

    def test_rejects_out_of_aperture_scatterer(self, probe, angles):
        half = (probe.num_elements - 1) * probe.pitch / 2
        ph = rfsim.Phantom((rfsim.Scatterer(1.6 * half, 5e-3, 1.0),), 1540.0)
        with pytest.raises(ValueError, match="aperture"):
            rfsim.simulate(ph, probe, angles, duration=1e-5)

    def test_rejects_short_duration(self, probe, angles):
        ph = rfsim.Phantom((rfsim.Scatterer(0.0, 10e-3, 1.0),), 1540.0)
        with pytest.raises(ValueError, match="duration"):
            rfsim.simulate(ph, probe, angles, duration=1e-5)


class TestCystPhantom:
    def test_deterministic(self):
        a = rfsim.make_cyst_phantom("hypoechoic", 7, density_per_cell=0.2)
        b = rfsim.make_cyst_phantom("hypoechoic", 7, density_per_cell=0.2)
        assert a == b

    def test_hypoechoic_amplitude_ratio(self):
        ph = rfsim.make_cyst_phantom("hypoechoic", 3, density_per_cell=0.5)
        inside, outside = [], []
        for s in ph.scatterers:
            r2 = s.x ** 2 + (s.z - 20e-3) ** 2
            (inside if r2 < (3e-3) ** 2 else outside).append(abs(s.amplitude))
        # amplitudes are uniform draws scaled by exactly 10^(-30/20) inside
        assert max(inside) <= 10 ** (-30 / 20) + 1e-12
        assert max(outside) > 10 ** (-30 / 20)

    def test_point_targets_ladder(self):
        ph = rfsim.make_cyst_phantom("point_targets", 0)
        assert len(ph.scatterers) == 5
        assert [s.z for s in ph.scatterers] == [10e-3, 20e-3, 30e-3, 40e-3, 50e-3]
        assert all(s.x == 0.0 and s.amplitude == 1.0 for s in ph.scatterers)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            rfsim.make_cyst_phantom("anechoic", 0)
