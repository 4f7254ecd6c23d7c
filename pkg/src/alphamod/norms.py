"""Function-space (quasi-)norms of sampled functions.

Block norms are the workhorse: for each window the windowed spectral
segment is moved to baseband and inverse transformed on a short grid.
Moving a segment only multiplies the block by a unimodular phase, so the
modulus, and hence every ``L^p`` norm of the block, is unchanged.  With
``oversample=None`` the short grid has the full length ``N`` and the result
is identical to filtering on the original grid; a finite ``oversample``
trades exactness of the rectangle rule for speed (``L^2`` stays exact).
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, Iterable, Optional, Sequence

import numpy as np
import scipy.fft as sfft

from . import kernels
from .decomposition import AlphaCovering, DyadicPartition, bracket
from .errors import InsufficientCovering, KernelMeanZero
from .grid import (GridFunction, as_float_exponent, band_energy_fraction, fft_workers,
                   lebesgue_norm, lp_quadrature)

__all__ = [
    "BAND_TOLERANCE",
    "check_band",
    "block_lp_norms",
    "combine_blocks",
    "alpha_modulation_norm",
    "dyadic_block_norms",
    "besov_norm",
    "triebel_norm",
    "local_hardy_norm",
    "maximal_hardy_norm",
    "default_t_grid",
    "lebesgue_norm",
]

BAND_TOLERANCE = 1e-10
# upper bound on complex entries held by one batch of short transforms
BATCH_ENTRIES = 1 << 22


def check_band(f: GridFunction, radius: float, tol: float = BAND_TOLERANCE) -> float:
    """Raise :class:`InsufficientCovering` when energy leaks outside ``radius``."""
    if radius >= f.grid.nyquist:
        return 0.0
    frac = band_energy_fraction(f, radius)
    if frac > tol:
        raise InsufficientCovering(
            f"spectral energy fraction {frac:.3e} lies outside the covered band |xi| <= {radius:.6g}")
    return frac


def _real(value) -> float:
    """Smoothness as a float; accepts rational literals such as ``"-1/2"``."""
    if isinstance(value, str):
        return float(Fraction(value))
    return float(value)


def _next_pow2(n: int) -> int:
    return 1 << max(0, int(math.ceil(math.log2(max(n, 1)))))


def block_lp_norms(f: GridFunction, cov: AlphaCovering, exponents: Iterable,
                   profile: str = "canonical", oversample: Optional[float] = None,
                   guard: bool = True) -> Dict[float, np.ndarray]:
    """``||box_k f||_{L^p}`` for every window and every requested exponent.

    Parameters
    ----------
    f : GridFunction
    cov : AlphaCovering
    exponents : iterable
        Exponents in ``(0, inf]`` (floats, Fractions, literals or Exponents).
    profile : {"canonical", "rough"}
    oversample : float, optional
        Short-grid length as a multiple of the segment length; ``None`` keeps
        the full grid length.
    guard : bool
        Check that no spectral energy lies outside the covered band.

    Returns
    -------
    dict
        Maps each float exponent to an array over ``k = -kmax .. kmax``.
    """
    exps = [as_float_exponent(p) for p in exponents]
    grid = f.grid
    if guard:
        check_band(f, cov.covered_band)
    start, length = cov.segments(grid, profile)
    rc, rh, fc, fh = cov.window_params(profile)
    sums = np.zeros((cov.indices.size, len(exps)))
    active = np.nonzero(length > 0)[0]
    if active.size == 0:
        return {p: np.zeros(cov.indices.size) for p in exps}
    n = grid.samples
    if oversample is None:
        widths = np.full(active.size, n, dtype=np.int64)
    else:
        widths = np.array([min(n, _next_pow2(int(math.ceil(oversample * ln)))) for ln in length[active]],
                          dtype=np.int64)
    exps_arr = np.array(exps, dtype=float)
    spectrum = f.spectrum
    for width in np.unique(widths):
        group = active[widths == width]
        per_batch = max(1, BATCH_ENTRIES // int(width))
        for lo in range(0, group.size, per_batch):
            sel = group[lo: lo + per_batch]
            if width == n:
                # keep blocks at their true frequencies
                offsets = start[sel]
            else:
                offsets = -(length[sel] // 2)
            rows = kernels.gather_blocks(spectrum, grid.dxi, start[sel], length[sel],
                                         rc[sel], rh[sel], fc[sel], fh[sel], int(width), offsets)
            rows = sfft.ifft(rows, axis=1, workers=fft_workers(), overwrite_x=True)
            # inverse transform on a width-point grid of step 2L/width; the
            # (-1)^m factor only shifts samples circularly and is dropped
            rows *= width / (2.0 * grid.half_width)
            sums[sel] = kernels.row_power_sums(rows, exps_arr)
    out = {}
    for j, p in enumerate(exps):
        if math.isinf(p):
            out[p] = sums[:, j]
        else:
            # the quadrature step is 2L/width, row by row
            step = np.zeros(cov.indices.size)
            step[active] = 2.0 * grid.half_width / widths
            out[p] = (sums[:, j] * step) ** (1.0 / p)
    return out


def combine_blocks(block_norms: np.ndarray, weights_log: np.ndarray, q) -> float:
    """``(sum_k exp(q * log_w_k) * b_k^q)^{1/q}`` computed stably; sup for ``q = inf``."""
    qf = as_float_exponent(q)
    b = np.asarray(block_norms, dtype=float)
    mask = b > 0
    if not mask.any():
        return 0.0
    logs = np.log(b[mask]) + np.asarray(weights_log, dtype=float)[mask]
    if math.isinf(qf):
        return float(np.exp(logs.max()))
    scaled = qf * logs
    top = scaled.max()
    return float(np.exp((top + np.log(np.exp(scaled - top).sum())) / qf))


def alpha_weights_log(cov: AlphaCovering, s: float) -> np.ndarray:
    """Logarithm of ``<k>^{s/(1-alpha)}`` over the covering's indices."""
    return (_real(s) / (1.0 - cov.alpha)) * np.log(bracket(cov.indices))


def alpha_modulation_norm(f: GridFunction, p, q, s, cov: AlphaCovering,
                          oversample: Optional[float] = None, blocks=None) -> float:
    """Alpha-modulation (quasi-)norm ``(sum_k <k>^{sq/(1-alpha)} ||box_k f||_p^q)^{1/q}``.

    ``blocks`` may carry precomputed block norms for exponent ``p``.

    Raises
    ------
    InsufficientCovering
        If ``f`` has spectral energy outside the covered band.
    """
    pf = as_float_exponent(p)
    if blocks is None:
        blocks = block_lp_norms(f, cov, [pf], oversample=oversample)[pf]
    return combine_blocks(blocks, alpha_weights_log(cov, s), q)


def dyadic_block_norms(f: GridFunction, dp: DyadicPartition, exponents: Iterable,
                       guard: bool = True) -> Dict[float, np.ndarray]:
    """``||Delta_j f||_{L^p}`` for ``j = 0 .. jmax`` and each exponent."""
    exps = [as_float_exponent(p) for p in exponents]
    if guard:
        check_band(f, dp.covered_band)
    out = {p: np.zeros(dp.jmax + 1) for p in exps}
    for j in range(dp.jmax + 1):
        block = GridFunction.from_spectrum(f.grid, f.spectrum * dp.window_array(j))
        for p in exps:
            out[p][j] = lebesgue_norm(block, p)
    return out


def besov_norm(f: GridFunction, p, q, s, dp: DyadicPartition, blocks=None) -> float:
    """Besov (quasi-)norm ``(sum_j 2^{jsq} ||Delta_j f||_p^q)^{1/q}``."""
    pf = as_float_exponent(p)
    if blocks is None:
        blocks = dyadic_block_norms(f, dp, [pf])[pf]
    weights = _real(s) * math.log(2.0) * np.arange(dp.jmax + 1)
    return combine_blocks(blocks, weights, q)


def triebel_norm(f: GridFunction, p, q, s, dp: DyadicPartition) -> float:
    """Triebel-Lizorkin (quasi-)norm ``|| (sum_j 2^{jsq} |Delta_j f|^q)^{1/q} ||_p``."""
    pf, qf = as_float_exponent(p), as_float_exponent(q)
    if math.isinf(pf):
        raise ValueError("the Triebel-Lizorkin scale needs a finite integrability exponent")
    check_band(f, dp.covered_band)
    acc = np.zeros(f.grid.samples)
    for j in range(dp.jmax + 1):
        block = GridFunction.from_spectrum(f.grid, f.spectrum * dp.window_array(j))
        mod = np.abs(block.values) * 2.0 ** (j * _real(s))
        if math.isinf(qf):
            np.maximum(acc, mod, out=acc)
        else:
            acc += mod ** qf
    if not math.isinf(qf):
        acc **= 1.0 / qf
    return lp_quadrature(acc, f.grid.dx, pf)


def local_hardy_norm(f: GridFunction, p, dp: DyadicPartition) -> float:
    """Local Hardy (quasi-)norm computed as the Triebel-Lizorkin norm with ``q = 2, s = 0``."""
    return triebel_norm(f, p, 2, 0, dp)


def default_t_grid(f: GridFunction, points: int = 16) -> np.ndarray:
    """Geometric grid from about one quarter of the finest resolvable scale up to ``t = 1``.

    ``t -> psi_t * f`` is continuous, so the supremum over ``(0, 1)`` equals
    the one over ``(0, 1]``; keeping the endpoint makes coarse grids agree
    with fine ones for functions whose maximal function peaks at large ``t``.
    """
    t_min = min(0.5, 1.0 / (4.0 * f.grid.nyquist))
    return np.geomspace(t_min, 1.0, points)


def gaussian_kernel_spectrum(xi):
    """Spectrum of ``exp(-pi x^2)``; integral one."""
    return np.exp(-np.pi * np.asarray(xi) ** 2)


def maximal_hardy_norm(f: GridFunction, p, kernel=gaussian_kernel_spectrum,
                       t_grid: Optional[Sequence[float]] = None) -> float:
    """Truncated maximal-function norm ``|| max_t |psi_t * f| ||_p`` over a finite ``t`` grid.

    ``kernel`` is the spectrum of ``psi`` as a callable; ``psi_t`` has
    spectrum ``kernel(t xi)``.  A finite grid yields a lower bound for the
    supremum over ``0 < t < 1`` that increases as the grid is refined.

    Raises
    ------
    KernelMeanZero
        If ``kernel(0) = 0``.
    """
    mean = complex(kernel(np.zeros(1))[0])
    if abs(mean) < 1e-12:
        raise KernelMeanZero("the kernel must have nonzero integral")
    if t_grid is None:
        t_grid = default_t_grid(f)
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.size == 0 or np.any(t_grid <= 0) or np.any(t_grid > 1):
        raise ValueError("t grid must be a nonempty subset of (0, 1]")
    best = np.zeros(f.grid.samples)
    for t in t_grid:
        smoothed = GridFunction.from_spectrum(f.grid, f.spectrum * kernel(t * f.grid.xi))
        np.maximum(best, np.abs(smoothed.values), out=best)
    return lp_quadrature(best, f.grid.dx, p)
