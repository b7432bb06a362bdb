import numpy as np
import pytest

from hjconvex.noise import NoiseSpec, apply_noise, reference_draws


def test_zero_noise_is_identity():
    f = np.linspace(-2, 3, 17)
    g = np.linspace(1, 2, 5)
    fd, gd = apply_noise(f, g, NoiseSpec(0.0, 9))
    np.testing.assert_array_equal(fd, f)
    np.testing.assert_array_equal(gd, g)


def test_zero_data_stays_zero():
    fd, gd = apply_noise(np.zeros(50), None, NoiseSpec(0.3, 1))
    assert np.all(fd == 0) and gd is None


def test_law_of_large_numbers():
    fd, _ = apply_noise(np.ones(100_000), None, NoiseSpec(0.05, 123))
    assert abs(fd.mean() - 1.0) <= 1e-3
    assert fd.min() >= 0.95 and fd.max() <= 1.05


def test_support_bound():
    r = np.random.default_rng(0)
    f = r.standard_normal(1000) * 3
    g = r.standard_normal(30)
    fd, gd = apply_noise(f, g, NoiseSpec(0.1, 77))
    assert np.all(np.abs(fd - f) <= 0.1 * np.abs(f))
    assert np.all(np.abs(gd - g) <= 0.1 * np.abs(g))


def test_reproducible_and_independent_streams():
    f = np.arange(1.0, 21.0)
    a = apply_noise(f, np.ones(7), NoiseSpec(0.1, 5))
    b = apply_noise(f, np.ones(7), NoiseSpec(0.1, 5))
    np.testing.assert_array_equal(a[0], b[0])
    np.testing.assert_array_equal(a[1], b[1])
    c = apply_noise(f, 5.0 * np.ones(12), NoiseSpec(0.1, 5))
    np.testing.assert_array_equal(a[0], c[0])
    d = apply_noise(f, None, NoiseSpec(0.1, 5))
    np.testing.assert_array_equal(a[0], d[0])


def test_reference_vectors():
    f, g = reference_draws(42)
    np.testing.assert_array_equal(f, [0.8334883151098169, 0.8219733352686465, 0.7531850092196914])
    np.testing.assert_array_equal(g, [-0.06501844009631519, -0.9071022071026253, 0.19102001919227418])


def test_negative_noise_rejected():
    with pytest.raises(ValueError):
        NoiseSpec(-0.1, 0)
