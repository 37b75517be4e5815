import numpy as np
import pytest

from pwbeam import aberration


def test_sigma_levels_exact():
    assert aberration.sigma_levels() == [0.0, 1.54, 3.85]


def test_sigma_levels_relative_to_1540():
    ratios = [s / 1540.0 for s in aberration.sigma_levels()]
    assert ratios == pytest.approx([0.0, 0.001, 0.0025])


def test_sigma_levels_ascending():
    levels = aberration.sigma_levels()
    assert levels == sorted(levels)


def test_sigma_zero_is_constant():
    p = aberration.sample_profile(1540.0, 0.0, 8, 5, seed=3)
    assert np.all(p.sos == 1540.0)


def test_bounds_at_highest_level():
    p = aberration.sample_profile(1540.0, 3.85, 64, 31, seed=11)
    assert p.sos.min() >= 1540.0 - 3.85
    assert p.sos.max() <= 1540.0 + 3.85


def test_moments_against_uniform_law():
    # U(-s, s): mean 0, variance s^2/3; Monte-Carlo estimate over 10^4 cells
    s = 1.54
    p = aberration.sample_profile(1540.0, s, 100, 100, seed=21)
    assert p.sos.mean() == pytest.approx(1540.0, abs=0.05)
    assert p.sos.var() == pytest.approx(s * s / 3.0, rel=0.10)


def test_bitwise_reproducibility():
    a = aberration.sample_profile(1540.0, 3.85, 40, 31, seed=9)
    b = aberration.sample_profile(1540.0, 3.85, 40, 31, seed=9)
    assert a.sos.tobytes() == b.sos.tobytes()
    c = aberration.sample_profile(1540.0, 3.85, 40, 31, seed=10)
    assert a.sos.tobytes() != c.sos.tobytes()


def test_lag1_autocorrelation_small():
    p = aberration.sample_profile(1540.0, 3.85, 100, 100, seed=5)
    x = p.sos - p.sos.mean()
    var = (x * x).mean()
    rho_rows = (x[:-1, :] * x[1:, :]).mean() / var
    rho_cols = (x[:, :-1] * x[:, 1:]).mean() / var
    assert abs(rho_rows) < 0.05
    assert abs(rho_cols) < 0.05


def test_rejects_bad_args():
    with pytest.raises(ValueError):
        aberration.sample_profile(1540.0, -1.0, 4, 4, 0)
    with pytest.raises(ValueError):
        aberration.sample_profile(1540.0, 1.0, 0, 4, 0)
