"""Unit tests for gplab.core.cbset module."""

from fractions import Fraction

import pytest

from gplab.core.cbset import (
    EMPTY,
    INFINITE,
    AccumFamily,
    ConstantPiece,
    Direction,
    Finite,
    RankResult,
    Transport,
    accumulation_points,
    clip,
    derive,
    derived_cardinalities,
    enumerate_points,
    finite,
    image,
    is_cluster_point,
    is_empty,
    nth_derived_cardinality,
    rank,
    set_from_json,
    set_to_json,
    union,
    union_with_image,
    validate,
)
from gplab.core.exceptions import MalformedExprError, ParseError
from gplab.core.plcore import IDENTITY, Interval, mather_h, mather_r

_H = mather_h(Fraction(5, 16), Fraction(3, 4))
_R = mather_r()

# Points h⁻ᵐ(23/32) accumulating at 1/2 from above.
_AT_HALF = AccumFamily(
    limit=Fraction(1, 2),
    direction=Direction.FROM_ABOVE,
    transport=Transport(outer=_H),
    core_hull=Interval(Fraction(11, 16), Fraction(3, 4)),
    pieces=ConstantPiece(finite([Fraction(23, 32)])),
    cofinal_nonempty=True,
)

# Copies x/2ᵐ of _AT_HALF accumulating at 0.
_AT_ZERO = AccumFamily(
    limit=Fraction(0),
    direction=Direction.FROM_ABOVE,
    transport=Transport(outer=_R),
    core_hull=Interval(Fraction(1, 2), Fraction(3, 4)),
    pieces=ConstantPiece(_AT_HALF),
    cofinal_nonempty=True,
)


def test_rank_of_empty_set() -> None:
    assert rank(EMPTY) == RankResult(rank=0, final_cardinality=0)


def test_rank_of_finite_set() -> None:
    x = finite([Fraction(1, 4), Fraction(1, 2), Fraction(1, 4)])
    assert x == Finite((Fraction(1, 4), Fraction(1, 2)))
    assert rank(x) == RankResult(rank=0, final_cardinality=2)
    assert derive(x) == EMPTY


def test_rank_one_family() -> None:
    validate(_AT_HALF)
    assert rank(_AT_HALF) == RankResult(rank=1, final_cardinality=1)
    assert derive(_AT_HALF) == Finite((Fraction(1, 2),))


def test_rank_two_family() -> None:
    validate(_AT_ZERO)
    assert rank(_AT_ZERO) == RankResult(rank=2, final_cardinality=1)
    assert derived_cardinalities(_AT_ZERO) == [INFINITE, INFINITE, 1]
    assert nth_derived_cardinality(_AT_ZERO, 3) == 0


def test_rank_of_union_takes_maximum() -> None:
    x = union(_AT_HALF, finite([Fraction(1, 8)]), _AT_ZERO)
    assert rank(x).rank == 2
    assert derive(derive(x)) == Finite((Fraction(0),))


def test_rank_is_invariant_under_images() -> None:
    g = _R
    assert rank(image(g, _AT_ZERO)) == rank(_AT_ZERO)
    assert derive(image(g, _AT_HALF)) == Finite((Fraction(4, 5),))


def test_union_with_image_rank() -> None:
    x = union_with_image(_AT_HALF, _R, _AT_HALF)
    assert rank(x) == RankResult(rank=1, final_cardinality=2)


def test_image_under_identity_is_unchanged() -> None:
    assert image(IDENTITY, _AT_HALF) is _AT_HALF


def test_union_normalizes() -> None:
    assert union(EMPTY, EMPTY) == EMPTY
    assert union(finite([Fraction(1, 2)]), finite([Fraction(1, 4)])) == Finite((
        Fraction(1, 4),
        Fraction(1, 2),
    ))
    assert union(_AT_HALF, _AT_HALF) == _AT_HALF


def test_empty_family() -> None:
    family = AccumFamily(
        limit=Fraction(1, 2),
        direction=Direction.FROM_ABOVE,
        transport=Transport(outer=_H),
        core_hull=Interval(Fraction(11, 16), Fraction(3, 4)),
        pieces=ConstantPiece(EMPTY),
        cofinal_nonempty=False,
    )
    assert is_empty(family)
    assert rank(family) == RankResult(rank=0, final_cardinality=0)


def test_validate_rejects_unordered_hulls() -> None:
    family = AccumFamily(
        limit=Fraction(1, 2),
        direction=Direction.FROM_ABOVE,
        transport=Transport(outer=IDENTITY),
        core_hull=Interval(Fraction(11, 16), Fraction(3, 4)),
        pieces=ConstantPiece(finite([Fraction(23, 32)])),
        cofinal_nonempty=True,
    )
    with pytest.raises(MalformedExprError):
        validate(family)


def test_validate_rejects_false_cofinality() -> None:
    family = AccumFamily(
        limit=Fraction(1, 2),
        direction=Direction.FROM_ABOVE,
        transport=Transport(outer=_H),
        core_hull=Interval(Fraction(11, 16), Fraction(3, 4)),
        pieces=ConstantPiece(EMPTY),
        cofinal_nonempty=True,
    )
    with pytest.raises(MalformedExprError):
        validate(family)


@pytest.mark.parametrize(
    ("lo", "hi", "expected"),
    [
        (Fraction(1, 2), Fraction(1), _AT_HALF),
        (Fraction(0), Fraction(1, 2), EMPTY),
        (Fraction(3, 4), Fraction(1), EMPTY),
    ],
)
def test_clip_family(lo: Fraction, hi: Fraction, expected: object) -> None:
    assert clip(_AT_HALF, lo, hi) == expected


def test_clip_rejects_straddling_family() -> None:
    with pytest.raises(MalformedExprError):
        clip(_AT_HALF, Fraction(0), Fraction(9, 16))


def test_clip_is_half_open() -> None:
    x = finite([Fraction(1, 4), Fraction(1, 2)])
    assert clip(x, Fraction(1, 4), Fraction(1, 2)) == Finite((Fraction(1, 4),))


def test_accumulation_oracle_agrees_with_limit() -> None:
    sample = [Fraction(1, 2**k) for k in range(1, 12)]
    assert is_cluster_point(Fraction(0), sample, Fraction(1, 64))
    assert Fraction(1, 2) not in accumulation_points(sample, Fraction(1, 64))


def test_set_json_document() -> None:
    doc = set_to_json(_AT_ZERO)
    assert doc["kind"] == "family"
    assert doc["direction"] == "above"
    assert doc["pieces"]["core"]["kind"] == "family"
    assert set_from_json(doc) == _AT_ZERO


def test_set_from_json_rejects_unknown_kind() -> None:
    with pytest.raises(ParseError):
        set_from_json({"kind": "cantor"})


def test_enumerate_points() -> None:
    assert enumerate_points(finite([Fraction(1, 2), Fraction(1, 4)]), 1) == [
        Fraction(1, 4),
        Fraction(1, 2),
    ]
    points = enumerate_points(_AT_HALF, 3)
    assert len(points) >= 3
    assert points == sorted(points)
    assert all(Fraction(1, 2) < p <= Fraction(23, 32) for p in points)
    assert enumerate_points(EMPTY, 3) == []
    assert enumerate_points(finite([Fraction(1, 2)]), 0) == []
    assert enumerate_points(_AT_HALF, 0) == []
