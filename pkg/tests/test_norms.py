import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from alphamod.decomposition import bracket, build_alpha_covering, build_dyadic
from alphamod.errors import InsufficientCovering, KernelMeanZero
from alphamod.experiments import fit_scaling_exponent
from alphamod.families import annulus_spectrum, make_family
from alphamod.grid import Grid, GridFunction, lebesgue_norm, synthesize
from alphamod.norms import (alpha_modulation_norm, besov_norm, block_lp_norms, combine_blocks,
                            default_t_grid, local_hardy_norm, maximal_hardy_norm, triebel_norm)

GRID = Grid(64.0, 1 << 14)
DP = build_dyadic(None, GRID)

STOCK = [
    {"kind": "gaussian"},
    {"kind": "gaussian", "width": 0.2},
    {"kind": "modulated", "frequency": 7.3, "base": {"kind": "gaussian", "width": 2.0}},
    {"kind": "smooth_bump", "domain": "frequency", "center": 3.5, "radius": 1.0},
]


@pytest.fixture(scope="module")
def cov_half():
    return build_alpha_covering("1/2", kmax=64, band=0.9 * GRID.nyquist)


def dyadic_bump(j, grid=GRID):
    return GridFunction.from_spectrum(grid, annulus_spectrum(grid.xi / 2.0 ** j))


@pytest.mark.xfail(strict=True, reason="the windows sum to one but their squares do not; "
                   "broad spectra lose up to about 2% of their energy in the transitions")
@pytest.mark.parametrize("alpha", ["0", "1/2"])
def test_plancherel_within_one_percent(alpha):
    cov = build_alpha_covering(alpha, kmax=64, band=min(64.4, 0.9 * GRID.nyquist))
    for d in STOCK:
        f = synthesize(GRID, d)
        if d.get("kind") == "gaussian" and alpha == "0" and d.get("width", 1.0) < 1:
            continue  # wider than the uniform covering's band
        assert alpha_modulation_norm(f, 2, 2, 0, cov) / lebesgue_norm(f, 2) == pytest.approx(1.0, abs=0.01)


def test_plancherel_constant_is_stable(cov_half):
    ratios = [alpha_modulation_norm(f, 2, 2, 0, cov_half) / lebesgue_norm(f, 2)
              for f in (synthesize(GRID, d) for d in STOCK)]
    assert 0.95 <= min(ratios) <= max(ratios) <= 1.0 + 1e-9


@pytest.mark.parametrize("k", [0, 3, -5, 7])
def test_single_alpha_bump_picks_one_block(cov_half, k):
    f = make_family({"kind": "alpha_bump", "k": k}, GRID, cov_half)
    for p, s in ((1, "1/2"), (2, 0), ("2/3", -1)):
        expected = float(bracket(k)) ** (float(Fraction(s)) / 0.5) * lebesgue_norm(f, p)
        for q in (1, 2, "inf"):
            assert alpha_modulation_norm(f, p, q, s, cov_half) == pytest.approx(expected, rel=1e-9)


def test_sup_over_two_blocks(cov_half):
    f1 = make_family({"kind": "alpha_bump", "k": 2}, GRID, cov_half)
    f2 = make_family({"kind": "alpha_bump", "k": -6}, GRID, cov_half)
    f = f1.scale(1 / lebesgue_norm(f1, 1)) + f2.scale(2 / lebesgue_norm(f2, 1))
    assert alpha_modulation_norm(f, 1, "inf", 0, cov_half) == pytest.approx(2.0, rel=1e-9)


def test_band_guard():
    f = synthesize(GRID, {"kind": "gaussian", "width": 0.1})
    with pytest.raises(InsufficientCovering):
        alpha_modulation_norm(f, 2, 2, 0, build_alpha_covering(0, kmax=16))


def test_oversampled_blocks_agree(cov_half):
    f = synthesize(GRID, {"kind": "modulated", "frequency": 11.0, "base": {"kind": "gaussian", "width": 0.6}})
    full = block_lp_norms(f, cov_half, [1, 2, "inf"])
    fast = block_lp_norms(f, cov_half, [1, 2, "inf"], oversample=8)
    for p in full:
        big = full[p] > 1e-8 * full[p].max()
        assert np.allclose(fast[p][big], full[p][big], rtol=1e-3)


def test_combine_blocks_limits():
    b = np.array([1.0, 2.0, 0.0])
    assert combine_blocks(b, np.zeros(3), "inf") == 2.0
    assert combine_blocks(b, np.zeros(3), 1) == pytest.approx(3.0)
    assert combine_blocks(b, np.log([1.0, 0.5, 7.0]), 2) == pytest.approx(math.sqrt(2.0))


# -- dyadic scales ------------------------------------------------------------------


@pytest.mark.parametrize("j", [1, 3, 5])
def test_besov_single_bump(j):
    g = dyadic_bump(j)
    for p, s in ((1, 0.5), (2, -1.0), (0.5, 2.0)):
        assert besov_norm(g, p, 2, s, DP) == pytest.approx(2 ** (j * s) * lebesgue_norm(g, p), rel=1e-9)
        assert triebel_norm(g, p, 2, 0, DP) == pytest.approx(lebesgue_norm(g, p), rel=1e-9)
        assert triebel_norm(g, p, 2, 0, DP) == pytest.approx(besov_norm(g, p, 2, 0, DP), rel=1e-9)


def test_besov_and_hardy_plancherel():
    for d in STOCK:
        f = synthesize(GRID, d)
        assert besov_norm(f, 2, 2, 0, DP) == pytest.approx(lebesgue_norm(f, 2), rel=0.02)
        assert local_hardy_norm(f, 2, DP) == pytest.approx(lebesgue_norm(f, 2), rel=0.02)


@pytest.mark.parametrize("p,s", [(1, 0.0), (2, 0.25), (0.5, -0.5)])
def test_besov_scaling_slope(p, s):
    grid = Grid(256.0, 1 << 18)
    dp = build_dyadic(None, grid)
    js = list(range(1, 8))
    vals = [besov_norm(dyadic_bump(j, grid), p, 2, s, dp) for j in js]
    fit = fit_scaling_exponent([2.0 ** j for j in js], vals)
    assert fit.slope == pytest.approx(s + (1 - 1 / p), abs=0.05)


def test_triebel_rejects_infinite_p():
    with pytest.raises(ValueError):
        triebel_norm(dyadic_bump(2), "inf", 2, 0, DP)


# -- maximal function -----------------------------------------------------------------


def test_maximal_hardy_basics():
    zero = GridFunction.zeros(GRID)
    assert maximal_hardy_norm(zero, 1) == 0.0
    with pytest.raises(KernelMeanZero):
        maximal_hardy_norm(dyadic_bump(2), 1, kernel=lambda xi: np.asarray(xi) * 0.0)


def test_maximal_hardy_refinement():
    f = synthesize(GRID, {"kind": "gaussian", "width": 0.5})
    coarse = maximal_hardy_norm(f, 1, t_grid=default_t_grid(f, 8))
    fine = maximal_hardy_norm(f, 1, t_grid=default_t_grid(f, 32))
    assert fine >= coarse * (1 - 1e-12)
    assert abs(fine - coarse) <= 0.01 * fine


def test_maximal_vs_square_function_comparable():
    ratios = []
    for w in (0.25, 0.5, 1.0, 2.0):
        f = synthesize(GRID, {"kind": "gaussian", "width": w})
        ratios.append(maximal_hardy_norm(f, 1) / local_hardy_norm(f, 1, DP))
    assert max(ratios) / min(ratios) <= 4


# -- homogeneity --------------------------------------------------------------------------


@settings(max_examples=15, deadline=None)
@given(st.floats(min_value=0.01, max_value=100), st.floats(min_value=-math.pi, max_value=math.pi),
       st.sampled_from([0.5, 1.0, 2.0]), st.sampled_from([1.0, 2.0, math.inf]))
def test_norms_are_homogeneous(c, phase, p, q):
    cov = build_alpha_covering("1/2", kmax=64, band=0.9 * GRID.nyquist)
    f = synthesize(GRID, {"kind": "modulated", "frequency": 5.0, "base": {"kind": "gaussian", "width": 0.7}})
    g = f.scale(c * np.exp(1j * phase))
    pairs = [
        (alpha_modulation_norm(g, p, q, 0.3, cov), alpha_modulation_norm(f, p, q, 0.3, cov)),
        (besov_norm(g, p, q, -0.2, DP), besov_norm(f, p, q, -0.2, DP)),
        (triebel_norm(g, p, q, 0.1, DP), triebel_norm(f, p, q, 0.1, DP)),
        (maximal_hardy_norm(g, p, t_grid=[0.1, 0.5]), maximal_hardy_norm(f, p, t_grid=[0.1, 0.5])),
    ]
    # for p < 1 roundoff in the far tails is raised to the power p and floors the agreement
    rel = 1e-9 if p >= 1 else 1e-6
    for scaled, base in pairs:
        assert scaled == pytest.approx(c * base, rel=rel)
