import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from alphamod.errors import DomainError
from alphamod.index_calculus import (Exponent, IndexQuery, SpaceParams, WeightedSequence,
                                     classify_region, embeds_alpha_modulation, embeds_sequence,
                                     index_A, index_B, parse_rational, region_piece, seq_norm,
                                     sequence_from_arrays, verdict_endpoint, verdict_hardy_alpha)


def oracle_A(u, v, n=1):
    return min(F(0), n * (1 - u - v), n * (u - v))


def oracle_B(u, v, n=1):
    return max(F(0), n * (1 - u - v), n * (u - v))


rationals = st.fractions(min_value=0, max_value=3, max_denominator=60)
dims = st.integers(min_value=1, max_value=4)


# -- parsing ------------------------------------------------------------------


@pytest.mark.parametrize("text,value", [("1/2", F(1, 2)), ("3", F(3)), ("-2/3", F(-2, 3)), (F(5, 7), F(5, 7))])
def test_parse_rational(text, value):
    assert parse_rational(text) == value


def test_exponent_literals():
    assert Exponent.of("inf").is_infinite
    assert Exponent.of("2/3").recip == F(3, 2)
    assert Exponent.of(2).value == 2
    assert math.isinf(Exponent.of(math.inf).value)


@pytest.mark.parametrize("bad", [0.5, "0", "-1", 0])
def test_exponent_rejects(bad):
    with pytest.raises(DomainError):
        Exponent.of(bad)


def test_space_params_alpha_range():
    with pytest.raises(DomainError):
        SpaceParams("2", "2", 0, 1)


# -- index functions ------------------------------------------------------------


@pytest.mark.parametrize("u,v,expected", [(F(1, 2), F(1, 4), 0), (F(1, 2), F(1, 2), 0), (F(1), F(1), -1)])
def test_index_A_examples(u, v, expected):
    assert index_A(IndexQuery(u, v, 1)) == expected


# (1/4, 1/4) lies in the second upper region, where the value is 1 - 2u
@pytest.mark.parametrize("u,v,expected", [(F(1, 4), F(1, 4), F(1, 2)), (F(1, 4), F(3, 4), 0), (F(1), F(0), 1)])
def test_index_B_examples(u, v, expected):
    assert index_B(IndexQuery(u, v, 1)) == expected


@given(rationals, dims)
def test_index_B_on_diagonal(u, n):
    q = IndexQuery(u, u, n)
    assert index_B(q) == max(F(0), n * (1 - 2 * u))


@given(rationals, rationals, dims)
def test_indices_match_oracle(u, v, n):
    q = IndexQuery(u, v, n)
    assert index_A(q) == oracle_A(u, v, n)
    assert index_B(q) == oracle_B(u, v, n)
    assert index_A(q) <= 0 <= index_B(q)


@given(rationals, rationals, dims)
def test_region_pieces_agree(u, v, n):
    q = IndexQuery(u, v, n)
    for which, fn in (("A", index_A), ("B", index_B)):
        labels = classify_region(q, which)
        assert labels, "every point lies in some closed region"
        for label in labels:
            assert region_piece(label, q) == fn(q)


def test_region_examples():
    assert classify_region(IndexQuery(F(1, 2), F(1, 2)), "A") == {"A1", "A2", "A3"}
    assert classify_region(IndexQuery(F(1), F(1, 4)), "A") == {"A2"}
    assert classify_region(IndexQuery(F(1), F(1, 4)), "B") == {"B3"}


def test_upper_third_piece_is_difference():
    # the third upper piece is n(u - v)
    q = IndexQuery(F(1), F(1, 4), 2)
    assert region_piece("B3", q) == 2 * (F(1) - F(1, 4))


# -- verdicts -----------------------------------------------------------------------


def test_hardy_to_mod_equality_case():
    v = verdict_hardy_alpha("hardy_to_mod", "2", SpaceParams("2", "2", 0, "1/2"))
    assert v.holds and not v.strict_required and v.threshold == 0


def test_hardy_to_mod_alpha_shift():
    sp = SpaceParams("2", "inf", "-1/4", "1/2")
    v = verdict_hardy_alpha("hardy_to_mod", "1", sp)
    assert v.threshold == F(-1, 4) and v.holds
    assert not verdict_hardy_alpha("hardy_to_mod", "1", sp.with_smoothness(0)).holds


def test_hardy_order_condition():
    # h^2 cannot sit inside a space with smaller integrability exponent
    v = verdict_hardy_alpha("hardy_to_mod", "2", SpaceParams("1", "1", "-10", 0))
    assert not v.holds


def test_infinite_hardy_exponent_rejected():
    with pytest.raises(DomainError):
        verdict_hardy_alpha("hardy_to_mod", "inf", SpaceParams("2", "2", 0, 0))


@given(rationals.filter(lambda u: u > 0), rationals, st.fractions(min_value=-3, max_value=3, max_denominator=20))
def test_alpha_zero_verdicts_match_classical(u, v, s):
    p = Exponent(u)
    sp = SpaceParams(p, Exponent(v), s, 0, 1)
    a, b = oracle_A(u, v), oracle_B(u, v)
    into = verdict_hardy_alpha("hardy_to_mod", p, sp).holds
    assert into == ((s < a) if v > u else (s <= a))
    out = verdict_hardy_alpha("mod_to_hardy", p, sp).holds
    assert out == ((s > b) if u > v else (s >= b))


@given(st.fractions(min_value=-2, max_value=2, max_denominator=30), rationals.filter(lambda u: u > 0),
       rationals, st.sampled_from(["0", "1/4", "1/2", "2/3"]))
def test_verdict_monotone_in_smoothness(s, u, v, alpha):
    # lowering the target smoothness never breaks an embedding into M
    p = Exponent(u)
    sp = SpaceParams(p, Exponent(v), s, alpha)
    if verdict_hardy_alpha("hardy_to_mod", p, sp).holds:
        assert verdict_hardy_alpha("hardy_to_mod", p, sp.with_smoothness(s - F(1, 7))).holds
    if verdict_hardy_alpha("mod_to_hardy", p, sp).holds:
        assert verdict_hardy_alpha("mod_to_hardy", p, sp.with_smoothness(s + F(1, 7))).holds


def test_endpoint_examples():
    for alpha in ("0", "1/2", "2/3"):
        assert verdict_endpoint("Linf_to_mod", SpaceParams("inf", "inf", 0, alpha)).holds
    v = verdict_endpoint("Linf_to_mod", SpaceParams("inf", "2", "-1/2", 0))
    assert v.threshold == F(-1, 2) and v.strict_required and not v.holds
    v = verdict_endpoint("mod_to_Linf", SpaceParams("2", "2", "1/2", "1/2"))
    assert v.threshold == F(1, 2) and v.strict_required and not v.holds
    assert verdict_endpoint("mod_to_Linf", SpaceParams("2", "2", "3/5", "1/2")).holds


def test_endpoint_unknown_case():
    with pytest.raises(DomainError):
        verdict_endpoint("L2_to_mod", SpaceParams("2", "2", 0, 0))


def test_verdict_to_dict():
    d = verdict_endpoint("mod_to_Linf", SpaceParams("2", "2", "1/2", "1/2")).to_dict()
    assert d["threshold"] == "1/2" and d["holds"] is False


# -- embeddings between alpha-modulation and sequence spaces ---------------------------


def test_alpha_embedding_examples():
    sp = SpaceParams("2", "3", "1/5", "1/2")
    assert embeds_alpha_modulation(sp, sp)
    assert embeds_alpha_modulation(SpaceParams("1", "1", 0, 0), SpaceParams("2", "2", 0, 0))
    assert not embeds_alpha_modulation(SpaceParams("2", "2", 0, 0), SpaceParams("2", "1", "-1/2", 0))
    assert embeds_alpha_modulation(SpaceParams("2", "2", 0, 0), SpaceParams("2", "1", "-3/5", 0))


def test_sequence_embedding_examples():
    assert embeds_sequence(Exponent.of(1), 0, Exponent.of("inf"), 0, 0)
    assert not embeds_sequence(Exponent.of("inf"), 0, Exponent.of(1), 0, 0, 1)
    assert embeds_sequence(Exponent.of("inf"), 0, Exponent.of(1), F(-11, 10), 0, 1)


@given(st.sampled_from(["1/2", "1", "2", "inf"]), st.sampled_from(["1/2", "1", "2", "inf"]),
       st.fractions(min_value=-2, max_value=2, max_denominator=10), st.sampled_from(["0", "1/3", "1/2"]))
def test_sequence_embedding_reflexive_and_downward(q1, q2, s, alpha):
    a, b = Exponent.of(q1), Exponent.of(q2)
    assert embeds_sequence(a, s, a, s, alpha)
    if embeds_sequence(a, s, b, s, alpha):
        assert embeds_sequence(a, s, b, s - 1, alpha)


# -- sequence norms -----------------------------------------------------------------


def test_seq_norm_examples():
    delta = WeightedSequence((0,), (1.0,))
    for p in ("1/2", "1", "inf"):
        assert seq_norm(delta, p, "3/2", "1/2") == pytest.approx(1.0)
    dyadic = sequence_from_arrays([0, 1], [1.0, 1.0])
    assert seq_norm(dyadic, 1, 2, 1) == pytest.approx(5.0)
    assert seq_norm(WeightedSequence((1,), (1.0,)), 2, 1, "1/2") == pytest.approx(2.0)


@given(st.lists(st.floats(min_value=0, max_value=1e3), min_size=1, max_size=12),
       st.floats(min_value=0.01, max_value=100), st.sampled_from(["1/2", "1", "2", "inf"]))
def test_seq_norm_homogeneous(values, c, p):
    seq = sequence_from_arrays(range(len(values)), values)
    scaled = sequence_from_arrays(range(len(values)), [c * v for v in values])
    assert seq_norm(scaled, p, "1/2", "1/2") == pytest.approx(c * seq_norm(seq, p, "1/2", "1/2"), rel=1e-9)


def test_weighted_sequence_rejects_negative():
    with pytest.raises(DomainError):
        WeightedSequence((0,), (-1.0,))


@settings(max_examples=50)
@given(st.integers(min_value=-50, max_value=50))
def test_seq_norm_of_delta_is_weight(k):
    seq = WeightedSequence((k,), (1.0,))
    assert seq_norm(seq, 2, 1, "1/2") == pytest.approx(1.0 + k * k)
