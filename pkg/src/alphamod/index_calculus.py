"""Exact index calculus for embeddings between local Hardy and alpha-modulation spaces.

Every quantity here is an exact rational.  Exponents are stored through
their reciprocals so that ``p = inf`` is simply a zero reciprocal and no
floating-point infinity ever enters a comparison.

The two index functions are the three-term minimum and maximum

    index_A = min(0, dim*(1 - u - v), dim*(u - v))
    index_B = max(0, dim*(1 - u - v), dim*(u - v))

with ``u = 1/p`` and ``v = 1/q``.  All embedding thresholds combine an
``alpha``-weighted integrability shift with ``(1 - alpha)`` times one of
these indices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import DomainError

__all__ = [
    "Exponent",
    "IndexQuery",
    "SpaceParams",
    "EmbeddingVerdict",
    "WeightedSequence",
    "parse_rational",
    "parse_exponent",
    "index_A",
    "index_B",
    "classify_region",
    "verdict_hardy_alpha",
    "verdict_endpoint",
    "embeds_alpha_modulation",
    "embeds_sequence",
    "seq_norm",
    "A_REGIONS",
    "B_REGIONS",
]

RationalLike = Union[int, str, Fraction]
A_REGIONS = ("A1", "A2", "A3")
B_REGIONS = ("B1", "B2", "B3")
HALF = Fraction(1, 2)


def parse_rational(value: RationalLike) -> Fraction:
    """Parse an exact rational from an int, a Fraction or a literal such as ``"-3/4"``.

    Floats are rejected on purpose: they would silently break exactness.
    """
    if isinstance(value, bool):
        raise DomainError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"not a rational literal: {value!r}") from exc
    raise DomainError(f"exact rational expected, got {type(value).__name__}")


@dataclass(frozen=True)
class Exponent:
    """Integrability or summability exponent in ``(0, inf]``, stored as ``1/p``.

    Parameters
    ----------
    recip : Fraction
        The reciprocal ``1/p``; zero encodes ``p = inf``.
    """

    recip: Fraction

    def __post_init__(self):
        value = parse_rational(self.recip)
        if value < 0:
            raise DomainError(f"reciprocal exponent must be >= 0, got {value}")
        object.__setattr__(self, "recip", value)

    @classmethod
    def of(cls, value: Union["Exponent", RationalLike, float]) -> "Exponent":
        """Build from an exponent value ``p`` (not its reciprocal).

        Accepts ``"inf"``, ``math.inf``, integers, Fractions and ``"a/b"``
        literals.
        """
        if isinstance(value, Exponent):
            return value
        if isinstance(value, float):
            if math.isinf(value) and value > 0:
                return cls(Fraction(0))
            raise DomainError("finite exponents must be given exactly, not as floats")
        if isinstance(value, str) and value.strip().lower() in ("inf", "infinity", "oo"):
            return cls(Fraction(0))
        p = parse_rational(value)
        if p <= 0:
            raise DomainError(f"exponent must be positive, got {p}")
        return cls(1 / p)

    @classmethod
    def from_recip(cls, recip: RationalLike) -> "Exponent":
        return cls(parse_rational(recip))

    @property
    def is_infinite(self) -> bool:
        return self.recip == 0

    @property
    def value(self):
        """``p`` itself: a Fraction, or ``math.inf``."""
        return math.inf if self.recip == 0 else 1 / self.recip

    def __float__(self) -> float:
        return float(self.value)

    def __str__(self) -> str:
        return "inf" if self.recip == 0 else str(1 / self.recip)


def parse_exponent(text: Union[str, Exponent, RationalLike, float]) -> Exponent:
    """Parse ``"inf"``, ``"2"`` or ``"2/3"`` into an :class:`Exponent`."""
    return Exponent.of(text)


def _check_dim(dim: int) -> int:
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise DomainError(f"dimension must be a positive integer, got {dim!r}")
    return dim


@dataclass(frozen=True)
class IndexQuery:
    """A point ``(1/p, 1/q)`` of the index plane together with the dimension."""

    inv_p: Fraction
    inv_q: Fraction
    dim: int = 1

    def __post_init__(self):
        object.__setattr__(self, "inv_p", Exponent.from_recip(self.inv_p).recip)
        object.__setattr__(self, "inv_q", Exponent.from_recip(self.inv_q).recip)
        _check_dim(self.dim)

    @classmethod
    def from_exponents(cls, p, q, dim: int = 1) -> "IndexQuery":
        return cls(Exponent.of(p).recip, Exponent.of(q).recip, dim)


@dataclass(frozen=True)
class SpaceParams:
    """Parameters of ``M^{smoothness, alpha}_{lebesgue, summability}`` on ``R^dim``."""

    lebesgue: Exponent
    summability: Exponent
    smoothness: Fraction = Fraction(0)
    alpha: Fraction = Fraction(0)
    dim: int = 1

    def __post_init__(self):
        object.__setattr__(self, "lebesgue", Exponent.of(self.lebesgue))
        object.__setattr__(self, "summability", Exponent.of(self.summability))
        object.__setattr__(self, "smoothness", parse_rational(self.smoothness))
        alpha = parse_rational(self.alpha)
        if not 0 <= alpha < 1:
            raise DomainError(f"alpha must lie in [0, 1), got {alpha}")
        object.__setattr__(self, "alpha", alpha)
        _check_dim(self.dim)

    def with_smoothness(self, smoothness: RationalLike) -> "SpaceParams":
        return SpaceParams(self.lebesgue, self.summability, parse_rational(smoothness),
                           self.alpha, self.dim)


@dataclass(frozen=True)
class EmbeddingVerdict:
    """Outcome of an exact embedding query.

    ``threshold`` is the critical smoothness on the right-hand side of the
    condition; ``strict_required`` tells whether equality is excluded.
    """

    holds: bool
    threshold: Fraction
    strict_required: bool
    region: frozenset = field(default_factory=frozenset)
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "holds": self.holds,
            "threshold": str(self.threshold),
            "strict_required": self.strict_required,
            "region": sorted(self.region),
            "detail": self.detail,
        }


@dataclass(frozen=True)
class WeightedSequence:
    """Finitely supported nonnegative sequence.

    ``support`` holds integer indices (or integer tuples for ``dim > 1``).
    """

    support: tuple
    values: tuple

    def __post_init__(self):
        support = tuple(self.support)
        values = tuple(float(x) for x in self.values)
        if len(support) != len(values):
            raise DomainError("support and values differ in length")
        if any(x < 0 or math.isnan(x) for x in values):
            raise DomainError("sequence values must be nonnegative")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_mapping(cls, mapping) -> "WeightedSequence":
        keys = sorted(mapping)
        return cls(tuple(keys), tuple(mapping[k] for k in keys))


# ---------------------------------------------------------------------------
# index functions and regions


def _terms(query: IndexQuery):
    u, v, dim = query.inv_p, query.inv_q, query.dim
    return Fraction(0), dim * (1 - u - v), dim * (u - v)


def index_A(query: IndexQuery) -> Fraction:
    """Lower index ``min(0, dim(1-u-v), dim(u-v))``; never positive."""
    return min(_terms(query))


def index_B(query: IndexQuery) -> Fraction:
    """Upper index ``max(0, dim(1-u-v), dim(u-v))``; never negative."""
    return max(_terms(query))


def classify_region(query: IndexQuery, which: str) -> frozenset:
    """Return every closed region containing ``(1/p, 1/q)``.

    Parameters
    ----------
    query : IndexQuery
    which : {"A", "B"}
        Selects the three regions of the lower or the upper index.

    Returns
    -------
    frozenset of str
        Boundary points carry all the labels whose inequalities hold.
    """
    u, v = query.inv_p, query.inv_q
    labels = set()
    if which == "A":
        if v <= min(1 - u, u):
            labels.add("A1")
        if u >= max(1 - v, HALF):
            labels.add("A2")
        if u <= min(v, HALF):
            labels.add("A3")
    elif which == "B":
        if v >= max(1 - u, u):
            labels.add("B1")
        if u <= min(1 - v, HALF):
            labels.add("B2")
        if u >= max(v, HALF):
            labels.add("B3")
    else:
        raise DomainError(f"which must be 'A' or 'B', got {which!r}")
    return frozenset(labels)


def region_piece(label: str, query: IndexQuery) -> Fraction:
    """Closed-form value of the index on a single region.

    The third upper piece is ``dim(u - v)``, the form consistent with the
    maximum.
    """
    u, v, dim = query.inv_p, query.inv_q, query.dim
    pieces = {
        "A1": Fraction(0),
        "A2": dim * (1 - u - v),
        "A3": dim * (u - v),
        "B1": Fraction(0),
        "B2": dim * (1 - u - v),
        "B3": dim * (u - v),
    }
    return pieces[label]


# ---------------------------------------------------------------------------
# embedding verdicts


def _decide(smoothness: Fraction, threshold: Fraction, strict: bool, upward: bool) -> bool:
    # upward: the embedding needs smoothness above the threshold
    if upward:
        return smoothness > threshold if strict else smoothness >= threshold
    return smoothness < threshold if strict else smoothness <= threshold


def verdict_hardy_alpha(direction: str, p_hardy, sp: SpaceParams) -> EmbeddingVerdict:
    """Decide an embedding between ``h^{p_hardy}`` and an alpha-modulation space.

    Parameters
    ----------
    direction : {"hardy_to_mod", "mod_to_hardy"}
        ``hardy_to_mod`` asks for ``h^{p_hardy} into M``; ``mod_to_hardy``
        asks for ``M into h^{p_hardy}``.
    p_hardy : Exponent or literal
        The local Hardy exponent; must be finite.
    sp : SpaceParams
        The alpha-modulation side, including the queried smoothness.

    Returns
    -------
    EmbeddingVerdict

    Raises
    ------
    DomainError
        If ``p_hardy`` is infinite.
    """
    hardy = Exponent.of(p_hardy)
    if hardy.is_infinite:
        raise DomainError("the local Hardy exponent must be finite")
    alpha, dim = sp.alpha, sp.dim
    u_h = hardy.recip
    u_m = sp.lebesgue.recip
    v_m = sp.summability.recip
    if direction == "hardy_to_mod":
        order_ok = u_m <= u_h
        query = IndexQuery(u_h, v_m, dim)
        threshold = dim * alpha * (u_m - u_h) + (1 - alpha) * index_A(query)
        strict = v_m > u_h
        region = classify_region(query, "A")
        upward = False
    elif direction == "mod_to_hardy":
        # here the modulation side is the source, so its exponent plays p1
        order_ok = u_h <= u_m
        query = IndexQuery(u_h, v_m, dim)
        threshold = dim * alpha * (u_m - u_h) + (1 - alpha) * index_B(query)
        strict = u_h > v_m
        region = classify_region(query, "B")
        upward = True
    else:
        raise DomainError(f"unknown direction {direction!r}")
    holds = order_ok and _decide(sp.smoothness, threshold, strict, upward)
    if not order_ok:
        detail = "integrability order violated"
    else:
        relation = (">" if strict else ">=") if upward else ("<" if strict else "<=")
        detail = f"need s {relation} {threshold}"
    return EmbeddingVerdict(holds, threshold, strict, region, detail)


ENDPOINT_CASES = ("L1_to_mod", "mod_to_L1", "Linf_to_mod", "mod_to_Linf")


def verdict_endpoint(case: str, sp: SpaceParams) -> EmbeddingVerdict:
    """Decide an embedding between ``L^1`` or ``L^inf`` and an alpha-modulation space.

    Thresholds carry the dimension only inside the indices, with a single
    ``(1 - alpha)`` factor in front.
    """
    alpha, dim = sp.alpha, sp.dim
    u, v = sp.lebesgue.recip, sp.summability.recip
    if case == "L1_to_mod":
        query = IndexQuery(Fraction(1), v, dim)
        order_ok = u <= 1
        threshold = dim * alpha * (u - 1) + (1 - alpha) * index_A(query)
        strict, upward, which = v > 0, False, "A"
    elif case == "mod_to_L1":
        query = IndexQuery(Fraction(1), v, dim)
        order_ok = u >= 1
        threshold = dim * alpha * (u - 1) + (1 - alpha) * index_B(query)
        strict, upward, which = v < 1, True, "B"
    elif case == "Linf_to_mod":
        query = IndexQuery(Fraction(0), v, dim)
        order_ok = u == 0
        threshold = (1 - alpha) * index_A(query)
        strict, upward, which = v > 0, False, "A"
    elif case == "mod_to_Linf":
        query = IndexQuery(Fraction(0), v, dim)
        order_ok = True
        threshold = dim * alpha * u + (1 - alpha) * index_B(query)
        strict, upward, which = v < 1, True, "B"
    else:
        raise DomainError(f"unknown endpoint case {case!r}")
    holds = order_ok and _decide(sp.smoothness, threshold, strict, upward)
    detail = "integrability condition violated" if not order_ok else f"threshold {threshold}"
    return EmbeddingVerdict(holds, threshold, strict, classify_region(query, which), detail)


def embeds_alpha_modulation(sp1: SpaceParams, sp2: SpaceParams) -> bool:
    """Whether ``M^{s1,alpha}_{p1,q1}`` embeds into ``M^{s2,alpha}_{p2,q2}``."""
    if sp1.alpha != sp2.alpha or sp1.dim != sp2.dim:
        raise DomainError("both spaces must share alpha and dimension")
    alpha, dim = sp1.alpha, sp1.dim
    u1, v1, s1 = sp1.lebesgue.recip, sp1.summability.recip, sp1.smoothness
    u2, v2, s2 = sp2.lebesgue.recip, sp2.summability.recip, sp2.smoothness
    if u2 > u1:
        return False
    lhs = s2 / dim - alpha * u2
    rhs = s1 / dim - alpha * u1
    if v2 <= v1:
        return lhs <= rhs
    return lhs + (1 - alpha) * v2 < rhs + (1 - alpha) * v1


def embeds_sequence(q1, s1, q2, s2, alpha, dim: int = 1) -> bool:
    """Whether the weighted sequence space with ``(q1, s1)`` embeds into ``(q2, s2)``.

    ``alpha = 1`` selects the dyadic weights.
    """
    v1, v2 = Exponent.of(q1).recip, Exponent.of(q2).recip
    s1, s2 = parse_rational(s1), parse_rational(s2)
    alpha = parse_rational(alpha)
    _check_dim(dim)
    if not 0 <= alpha <= 1:
        raise DomainError("alpha must lie in [0, 1]")
    if (1 - alpha) * v2 + s2 / dim < (1 - alpha) * v1 + s1 / dim:
        return True
    return s2 == s1 and v2 <= v1


def _bracket(index) -> float:
    if isinstance(index, (tuple, list)):
        return math.sqrt(1.0 + sum(float(c) ** 2 for c in index))
    return math.sqrt(1.0 + float(index) ** 2)


def seq_norm(seq: WeightedSequence, p, s, alpha, dim: int = 1) -> float:
    """Weighted (quasi-)norm of a finitely supported sequence.

    For ``alpha < 1`` the weight of index ``k`` is ``<k>^{s/(1-alpha)}``; for
    ``alpha = 1`` it is ``2^{j s}`` on natural indices.  ``p = inf`` gives the
    weighted supremum.
    """
    exp = Exponent.of(p)
    s = float(parse_rational(s)) if not isinstance(s, float) else s
    alpha = parse_rational(alpha)
    _check_dim(dim)
    if not 0 <= alpha <= 1:
        raise DomainError("alpha must lie in [0, 1]")
    if alpha == 1:
        if any(isinstance(j, (tuple, list)) or j < 0 for j in seq.support):
            raise DomainError("dyadic sequences live on natural indices")
        logw = [j * s * math.log(2.0) for j in seq.support]
    else:
        scale = s / float(1 - alpha)
        logw = [scale * math.log(_bracket(k)) for k in seq.support]
    pairs = [(a, w) for a, w in zip(seq.values, logw) if a > 0]
    if not pairs:
        return 0.0
    if exp.is_infinite:
        return max(a * math.exp(w) for a, w in pairs)
    pf = float(exp.value)
    # factor out the largest term so huge weights do not overflow
    logs = [pf * (math.log(a) + w) for a, w in pairs]
    top = max(logs)
    total = math.fsum(math.exp(x - top) for x in logs)
    return math.exp((top + math.log(total)) / pf)


def sequence_from_arrays(indices: Sequence[int], values: Iterable[float]) -> WeightedSequence:
    return WeightedSequence(tuple(int(k) for k in indices), tuple(values))
