import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from alphamod.decomposition import alpha_block, bracket, build_alpha_covering
from alphamod.errors import ConfigError, CoveringMismatch, DomainError, GridOverflowError
from alphamod.families import (Atom, atom_tail_profile, comb_interference, make_atom,
                               make_family, moment_order, validate_atom)
from alphamod.grid import Grid, GridFunction, lebesgue_norm

GRID = Grid(64.0, 1 << 14)


@pytest.fixture(scope="module")
def cov_half():
    return build_alpha_covering("1/2", kmax=32)


def moment(atom, order):
    x = atom.function.grid.x
    return abs(np.sum(x ** order * atom.function.values.real) * atom.function.grid.dx)


# -- atoms ------------------------------------------------------------------------


def test_moment_order():
    assert moment_order(1) == 0 and moment_order("2/3") == 0 and moment_order("1/2") == 1
    assert moment_order("1/3") == 2


def test_atom_p1_small():
    a = make_atom(1, 0.25, seed=3)
    assert a.kind == "I" and a.moments == 0
    assert moment(a, 0) <= 1e-8
    assert np.abs(a.function.values).max() <= 4.0
    assert validate_atom(a).passed


def test_atom_kind_two_size():
    a = make_atom("1/2", 2.0, seed=1)
    assert a.kind == "II"
    assert np.abs(a.function.values).max() <= 2.0 ** -2
    assert validate_atom(a).passed


def test_atom_two_moments_vanish():
    a = make_atom("1/2", 0.125, seed=5)
    assert a.kind == "I" and a.moments == 1
    assert moment(a, 0) <= 1e-8 and moment(a, 1) <= 1e-8


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["1", "2/3", "1/2"]), st.floats(min_value=2.0 ** -6, max_value=4.0),
       st.integers(min_value=0, max_value=10 ** 6), st.floats(min_value=-4, max_value=4))
def test_random_atoms_pass_validator(p, side, seed, center):
    a = make_atom(p, side, seed=seed, center=center)
    check = validate_atom(a)
    assert check.passed, check.to_dict()
    assert check.details["sup_over_bound"] <= 1.0


def test_atoms_are_deterministic():
    a, b = make_atom("2/3", 0.3, seed=11), make_atom("2/3", 0.3, seed=11)
    assert np.array_equal(a.function.values, b.function.values)
    c = make_atom("2/3", 0.3, seed=12)
    assert not np.array_equal(a.function.values, c.function.values)


def test_atom_argument_errors():
    with pytest.raises(DomainError):
        make_atom(2, 0.5)
    with pytest.raises(DomainError):
        make_atom(1, 0.5, kind="II")
    with pytest.raises(GridOverflowError):
        make_atom(1, 0.5, center=100.0)


def test_unresolved_atom_is_rejected():
    grid = Grid(32.0, 1 << 10)  # dx = 1/16
    a = make_atom(1, 3 * grid.dx, grid=grid)
    check = validate_atom(a)
    assert not check.passed and not check.checks["resolution"]


# -- families ----------------------------------------------------------------------------


def test_alpha_bump_occupies_one_window(cov_half):
    for k in (0, 2, -4, 6):
        f = make_family({"kind": "alpha_bump", "k": k}, GRID, cov_half)
        assert np.abs(alpha_block(f, k, cov_half).values - f.values).max() <= 1e-12
        for l in (k - 1, k + 1, k + 2):
            assert np.abs(alpha_block(f, l, cov_half).values).max() <= 1e-12


def test_alpha_bump_mismatch_detected(cov_half):
    # a much wider transition after window 2 eats into the plateau of window 3
    broken = cov_half.corrupted(2, factor=8.0)
    with pytest.raises(CoveringMismatch):
        make_family({"kind": "alpha_bump", "k": 3}, GRID, broken)


def test_flat_family_has_constant_mass():
    grid = Grid(32.0, 1 << 16)
    masses = [lebesgue_norm(make_family({"kind": "flat", "J": j}, grid), 1) for j in range(2, 7)]
    assert max(masses) / min(masses) <= 1.02


def test_linf_comb_value_at_origin(cov_half):
    coeffs = {k: 1.0 / (1 + k) for k in range(1, 7)}
    f = make_family({"kind": "linf_comb", "coefficients": coeffs}, GRID, cov_half)
    at_zero = f.values[GRID.samples // 2].real
    expected = sum(b * float(bracket(k)) for k, b in coeffs.items())
    assert at_zero == pytest.approx(expected, abs=1e-6)


def test_dilated_family_band_guard():
    with pytest.raises(GridOverflowError):
        make_family({"kind": "dilated", "factor": 100.0}, GRID)


def test_comb_interference_shrinks_with_separation():
    grid = Grid(1024.0, 1 << 17)
    coeffs = {j: 1.0 for j in range(0, 5)}
    values = []
    for h in (25, 50, 100):
        origin = 2.5 * h
        _, members = make_family({"kind": "comb_G", "coefficients": coeffs, "separation": h, "origin": origin},
                                 grid, return_members=True)
        values.append(comb_interference(members))
    assert values[0] > values[1] > values[2]
    assert values[2] <= 1e-6


def test_comb_descriptors_need_coefficients(cov_half):
    with pytest.raises(ConfigError):
        make_family({"kind": "comb_G"}, GRID)
    with pytest.raises(ConfigError):
        make_family({"kind": "comb_F", "coefficients": {1: 1.0}}, GRID)
    with pytest.raises(ConfigError):
        make_family({"kind": "mystery"}, GRID)


def test_comb_members_sum_to_comb(cov_half):
    desc = {"kind": "comb_F", "coefficients": [[1, 2.0], [3, 0.5]], "separation": 20.0}
    f, members = make_family(desc, GRID, cov_half, return_members=True)
    total = members[0] + members[1]
    assert np.abs(total.values - f.values).max() <= 1e-12


# -- pointwise tails ---------------------------------------------------------------------------


@pytest.mark.parametrize("alpha", ["0", "1/2"])
def test_tail_of_large_atom_is_bounded(alpha):
    cov = build_alpha_covering(alpha, kmax=64)
    a = make_atom(1, 2.0, seed=1)
    ratios = [atom_tail_profile(a, k, cov).max_ratio_plain for k in (2, 4, 8, 16)]
    assert max(ratios) <= 1.0


@pytest.mark.parametrize("alpha,p,side", [("0", "1", 0.25), ("0", "1/2", 0.125), ("1/2", "1/2", 0.125)])
def test_tail_of_small_atom_gains_moment_factor(alpha, p, side):
    cov = build_alpha_covering(alpha, kmax=64)
    a = make_atom(p, side, seed=1)
    for k in (2, 4, 8, 16):
        rep = atom_tail_profile(a, k, cov)
        if rep.moment_factor < 1:
            assert rep.max_ratio_moment <= 10.0


def test_zero_atom_has_zero_tail():
    cov = build_alpha_covering("1/2", kmax=16)
    base = make_atom(1, 0.5, seed=0)
    zero = Atom(base.p, base.center, base.side, base.kind, base.moments,
                GridFunction.zeros(base.function.grid))
    rep = atom_tail_profile(zero, 4, cov)
    assert rep.max_tail == 0.0 and rep.max_ratio_plain == 0.0
    assert rep.to_dict()["points"] > 0
