import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from alphamod.errors import ConfigError, GridOverflowError
from alphamod.grid import (Grid, GridFunction, apply_multiplier, band_energy_fraction, bump_spectrum,
                           convolve, lebesgue_norm, load_csv, load_raw, save_csv, save_raw, smooth_step,
                           synthesize)

SMALL = Grid(32.0, 1 << 12)


def gaussian(grid=SMALL, **kw):
    return synthesize(grid, {"kind": "gaussian", **kw})


def test_grid_rejects_bad_sizes():
    with pytest.raises(ConfigError):
        Grid(1.0, 1000)
    with pytest.raises(ConfigError):
        Grid(-1.0, 1024)


def test_grid_geometry():
    g = Grid(8.0, 256)
    assert g.dx == pytest.approx(1 / 16)
    assert g.nyquist == pytest.approx(8.0)
    assert g.x[0] == -8.0 and g.xi[1] == pytest.approx(1 / 16)
    assert Grid.for_band(8.0, 100.0).nyquist >= 100.0


def test_gaussian_is_self_dual():
    f = GridFunction.from_values(SMALL, np.exp(-np.pi * SMALL.x ** 2))
    assert np.abs(f.spectrum - np.exp(-np.pi * SMALL.xi ** 2)).max() <= 1e-10


def test_impulse_has_flat_spectrum():
    values = np.zeros(SMALL.samples)
    values[SMALL.samples // 2] = 1.0 / SMALL.dx  # x = 0
    f = GridFunction.from_values(SMALL, values)
    assert np.abs(f.spectrum - 1.0).max() <= 1e-10


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 31 - 1))
def test_round_trip(seed):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(SMALL.samples) + 1j * rng.standard_normal(SMALL.samples)
    back = GridFunction.from_spectrum(SMALL, GridFunction.from_values(SMALL, v).spectrum).values
    assert np.abs(back - v).max() <= 1e-12 * np.abs(v).max()


def test_lebesgue_norms_of_gaussian():
    f = gaussian()
    assert lebesgue_norm(f, 2) == pytest.approx(2 ** -0.25, abs=1e-6)
    assert lebesgue_norm(f, "inf") == pytest.approx(1.0, abs=1e-12)
    assert lebesgue_norm(f, "1/2") == pytest.approx(2.0, abs=1e-5)


def test_multiplier_identity_and_zero():
    f = gaussian()
    assert np.allclose(apply_multiplier(f, np.ones(SMALL.samples)).values, f.values, atol=1e-15)
    assert np.abs(apply_multiplier(f, lambda xi: 0 * xi).values).max() == 0


def test_disjoint_multipliers_compose_to_zero():
    f = gaussian(width=0.2)
    m1 = bump_spectrum(SMALL.xi, 1.0, 0.2, 0.5)
    m2 = bump_spectrum(SMALL.xi, 3.0, 0.2, 0.5)
    out = apply_multiplier(apply_multiplier(f, m1), m2)
    assert np.abs(out.values).max() <= 1e-12


def test_modulation_moves_spectral_peak():
    f = synthesize(SMALL, {"kind": "modulated", "frequency": 4.0, "base": {"kind": "gaussian"}})
    peak = SMALL.xi[np.argmax(np.abs(f.spectrum))]
    assert abs(peak - 4.0) <= SMALL.dxi


def test_dilation_preserves_mass():
    base = gaussian()
    f = synthesize(SMALL, {"kind": "dilated", "factor": 0.25, "base": {"kind": "gaussian"}})
    assert lebesgue_norm(f, 1) == pytest.approx(lebesgue_norm(base, 1), abs=1e-8)


def test_band_energy_fraction_examples():
    bump = synthesize(SMALL, {"kind": "smooth_bump", "domain": "frequency", "radius": 2.0})
    assert band_energy_fraction(bump, 4.0) <= 1e-12
    assert band_energy_fraction(gaussian(), 6.0) <= 1e-12
    values = np.exp(2j * np.pi * 8.0 * SMALL.x)
    assert band_energy_fraction(GridFunction.from_values(SMALL, values), 4.0) == pytest.approx(1.0, abs=1e-10)


def test_synthesize_guards():
    with pytest.raises(GridOverflowError):
        synthesize(Grid(4.0, 1024), {"kind": "gaussian", "center": 10.0})
    with pytest.raises(GridOverflowError):
        synthesize(SMALL, {"kind": "smooth_bump", "domain": "frequency", "center": 100.0})
    with pytest.raises(ConfigError):
        synthesize(SMALL, {"kind": "nonsense"})


def test_translation_matches_spatial_shift():
    f = synthesize(SMALL, {"kind": "translated", "shift": 3.0, "base": {"kind": "gaussian"}})
    assert np.abs(f.values - np.exp(-np.pi * (SMALL.x - 3.0) ** 2)).max() <= 1e-10


def test_convolution_of_gaussians():
    # e^{-pi x^2} * e^{-pi x^2} = 2^{-1/2} e^{-pi x^2 / 2}
    f = gaussian()
    g = convolve(f, f)
    assert np.abs(g.values - 2 ** -0.5 * np.exp(-np.pi * SMALL.x ** 2 / 2)).max() <= 1e-10


def test_smooth_step_properties():
    t = np.linspace(-1, 2, 301)
    s = smooth_step(t)
    assert s[t <= 0].max() == 0 and s[t >= 1].min() == 1
    assert np.all(np.diff(s) >= 0)
    # symmetric: step(t) + step(1 - t) = 1
    assert np.allclose(s + smooth_step(1 - t), 1.0, atol=1e-15)


@settings(max_examples=25, deadline=None)
@given(st.floats(min_value=0.05, max_value=20), st.floats(min_value=-3, max_value=3),
       st.sampled_from([0.5, 1.0, 2.0, math.inf]))
def test_norm_homogeneity(c, phase, p):
    f = gaussian(width=0.7)
    factor = c * np.exp(1j * phase)
    assert lebesgue_norm(f.scale(factor), p) == pytest.approx(c * lebesgue_norm(f, p), rel=1e-10)


def test_io_round_trip(tmp_path):
    f = gaussian(width=0.3)
    save_csv(f, tmp_path / "f.csv")
    g = load_csv(tmp_path / "f.csv")
    assert g.grid == f.grid and np.abs(g.values - f.values).max() <= 1e-15
    sidecar = save_raw(f, tmp_path / "f.bin")
    assert sidecar.exists()
    h = load_raw(tmp_path / "f.bin")
    assert np.array_equal(h.values, f.values)


def test_grid_functions_are_immutable():
    f = gaussian()
    with pytest.raises(AttributeError):
        f.values = None
    with pytest.raises(ValueError):
        f.values[0] = 1.0
