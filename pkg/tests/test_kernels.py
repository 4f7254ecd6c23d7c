import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from alphamod import kernels
from alphamod.decomposition import build_alpha_covering

PY = kernels.backend_module("python")
try:
    CY = kernels.backend_module("cython")
except ImportError:  # extension not built
    CY = None

needs_cython = pytest.mark.skipif(CY is None, reason="compiled kernels not available")


def test_backend_is_named():
    assert kernels.BACKEND in ("python", "cython")
    with pytest.raises(ValueError):
        kernels.backend_module("fortran")


def window_params(alpha, kmax=24):
    cov = build_alpha_covering(alpha, kmax=kmax)
    return cov, tuple(np.ascontiguousarray(a) for a in cov.window_params())


@needs_cython
@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(min_value=-2, max_value=3), min_size=1, max_size=200))
def test_smooth_step_backends_agree(values):
    tau = np.array(values)
    assert np.allclose(CY.smooth_step(tau), PY.smooth_step(tau), rtol=0, atol=1e-14)


@needs_cython
@pytest.mark.parametrize("alpha", ["0", "1/2", "2/3"])
def test_interval_windows_backends_agree(alpha):
    cov, (rc, rh, fc, fh) = window_params(alpha)
    xi = np.linspace(-cov.covered_band, cov.covered_band, 3001)
    assert np.abs(CY.interval_windows(xi, rc, rh, fc, fh) - PY.interval_windows(xi, rc, rh, fc, fh)).max() <= 1e-14


@needs_cython
@settings(max_examples=15, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32 - 1), st.sampled_from(["0", "1/4", "1/2"]),
       st.integers(min_value=0, max_value=7))
def test_gather_blocks_backends_agree(seed, alpha, shift):
    rng = np.random.default_rng(seed)
    cov, (rc, rh, fc, fh) = window_params(alpha)
    n = 1 << 12
    dxi = 2.2 * cov.covered_band / n
    spectrum = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    lo, hi = cov.supports()
    starts = np.floor(lo / dxi).astype(np.int64)
    lengths = (np.floor(hi / dxi) - starts + 1).astype(np.int64)
    width = int(1 << int(np.ceil(np.log2(lengths.max()))))
    offsets = np.full_like(starts, shift)
    args = (spectrum, dxi, starts, lengths, rc, rh, fc, fh, width, offsets)
    assert np.abs(CY.gather_blocks(*args) - PY.gather_blocks(*args)).max() <= 1e-13


@needs_cython
@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32 - 1), st.integers(min_value=1, max_value=40),
       st.integers(min_value=1, max_value=300))
def test_row_power_sums_backends_agree(seed, count, length):
    rng = np.random.default_rng(seed)
    rows = rng.standard_normal((count, length)) + 1j * rng.standard_normal((count, length))
    exps = np.array([0.5, 2.0 / 3.0, 1.0, 2.0, np.inf])
    assert np.allclose(CY.row_power_sums(rows, exps), PY.row_power_sums(rows, exps), rtol=1e-12, atol=0)


def test_row_power_sums_oracle():
    rows = np.array([[3 + 4j, 0], [1, -1]])
    out = PY.row_power_sums(rows, np.array([1.0, 2.0, np.inf, 0.5]))
    assert np.allclose(out, [[5, 25, 5, 5 ** 0.5], [2, 2, 1, 2]])
    if CY is not None:
        assert np.allclose(CY.row_power_sums(rows, np.array([1.0, 2.0, np.inf, 0.5])), out)
