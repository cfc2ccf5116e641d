"""Unit tests for gplab.core.gpl module."""

import random
from fractions import Fraction
from itertools import pairwise

import pytest

from gplab.core.cbset import INFINITE
from gplab.core.constructions import build_f1, perturbation, sample_rationals
from gplab.core.exceptions import (
    NotPiecewiseLinearHereError,
    NotRepresentableError,
    UnboundGeneratorError,
)
from gplab.core.gpl import (
    GPLMap,
    Word,
    breakset,
    check_length_axioms,
    conjugate,
    gpl_evaluate,
    gpl_evaluate_inverse,
    gpl_from_json,
    gpl_invert,
    gpl_power,
    gpl_rank,
    gpl_support_hull,
    gpl_to_json,
    join,
    length_n,
    lift,
    pl_windows,
    precompose,
    restrict_pl,
    slope_norm_truncated,
    to_pl,
    truncate,
    validate_map,
    word_commutator,
    word_evaluate,
    word_from_json,
    word_to_json,
    word_to_pl,
)
from gplab.core.plcore import (
    IDENTITY,
    Interval,
    bump,
    commutator,
    compose,
    evaluate,
    invert,
    make_pl,
    mather_r,
)

_I = Interval(Fraction(1, 4), Fraction(3, 4))
_F = make_pl([(Fraction(1, 4), Fraction(1, 8)), (Fraction(1, 2), Fraction(3, 4))])
_G = mather_r()


@pytest.mark.parametrize("n", [0, 1, 2])
def test_perturbation_has_rank_n(n: int) -> None:
    f = perturbation(n, _I)
    assert gpl_rank(f) == n
    assert length_n(f, n) == (3 if n == 0 else 1)
    assert length_n(f, n + 1) == 0


def test_perturbation_is_supported_in_interval() -> None:
    f = perturbation(2, _I)
    hull = gpl_support_hull(f)
    assert hull is not None
    assert _I.contains_interval(hull)
    validate_map(f)


@pytest.mark.parametrize("n", [1, 2])
def test_evaluate_inverse_undoes_evaluate(n: int) -> None:
    f = perturbation(n, _I)
    for x in sample_rationals(_I, 16, seed=3):
        y = gpl_evaluate(f, x)
        assert y >= x
        assert gpl_evaluate_inverse(f, y) == x
        assert gpl_evaluate(gpl_invert(f), y) == x


def test_restrict_pl_rejects_accumulation() -> None:
    f = perturbation(1, _I)
    with pytest.raises(NotPiecewiseLinearHereError):
        restrict_pl(f, Interval(Fraction(1, 2), Fraction(3, 4)))


def test_restrict_pl_on_windows() -> None:
    f = perturbation(1, _I)
    windows = pl_windows(f, 3)
    assert len(windows) == 3
    for window in windows:
        segment = restrict_pl(f, window)
        assert segment.evaluate(window.lo) == window.lo
        assert segment.evaluate(window.hi) == window.hi
        assert not segment.is_identity


def test_restrict_pl_off_support_is_identity() -> None:
    f = perturbation(1, _I)
    assert restrict_pl(f, Interval(Fraction(0), Fraction(1, 4))).is_identity


def test_breakset_of_pl_map() -> None:
    assert length_n(_F, 0) == 2
    assert gpl_rank(_F) == 0
    assert length_n(IDENTITY, 0) == 0


def test_lift_and_to_pl() -> None:
    assert lift(_F) == GPLMap(scaffold=_F)
    assert to_pl(lift(_F)) == _F
    with pytest.raises(NotRepresentableError):
        to_pl(perturbation(1, _I))


def test_conjugate_pl_maps() -> None:
    assert to_pl(conjugate(_F, _G)) == compose(_G, compose(_F, invert(_G)))


def test_conjugate_rejects_breakpoint_inside_hull() -> None:
    g = make_pl([(Fraction(19, 32), Fraction(1, 2))])
    with pytest.raises(NotRepresentableError):
        conjugate(perturbation(1, _I), g)


def test_conjugate_keeps_rank() -> None:
    g = bump(
        Fraction(1, 8),
        Fraction(1, 4),
        Fraction(3, 4),
        Fraction(15, 16),
        Fraction(1, 16),
    )
    f = conjugate(perturbation(1, _I), g)
    assert length_n(f, 1) == 1
    x = Fraction(19, 32)
    expected = evaluate(g, gpl_evaluate(perturbation(1, _I), x))
    assert gpl_evaluate(f, evaluate(g, x)) == expected


def test_precompose_pl_maps() -> None:
    assert to_pl(precompose(_F, _G)) == compose(_F, _G)


def test_join_disjoint_supports() -> None:
    left = lift(
        bump(
            Fraction(1, 32),
            Fraction(1, 16),
            Fraction(1, 8),
            Fraction(7, 32),
            Fraction(1, 32),
        )
    )
    f = join(left, perturbation(1, _I))
    assert length_n(f, 1) == 1
    assert length_n(f, 0) == INFINITE
    x = Fraction(1, 10)
    assert gpl_evaluate(f, x) == gpl_evaluate(left, x)


def test_join_rejects_overlap() -> None:
    with pytest.raises(NotRepresentableError):
        join(perturbation(1, _I), perturbation(0, _I))


def test_power_rejects_overlapping_families() -> None:
    with pytest.raises(NotRepresentableError):
        gpl_power(perturbation(1, _I), 2)


def test_power_of_pl_map() -> None:
    assert to_pl(gpl_power(_F, -2)) == compose(invert(_F), invert(_F))
    assert gpl_power(_F, 0) == GPLMap()


def test_length_axioms_hold() -> None:
    report = check_length_axioms(perturbation(1, _I), _G, 1)
    assert report.forward == 1
    assert report.pl_factor == 0
    assert report.holds


def test_truncate_agrees_on_first_hulls() -> None:
    f = perturbation(1, _I)
    truncated = truncate(f, 3)
    for window in pl_windows(f, 3):
        mid = (window.lo + window.hi) / 2
        assert evaluate(truncated, mid) == gpl_evaluate(f, mid)
    assert slope_norm_truncated(f, 3) > 1


def test_word_reduction() -> None:
    a = Word.generator("a", _F)
    b = Word.generator("b", _G)
    assert (a * a.inverse()).letters == ()
    assert (a * b * b.inverse() * a).letters == (("a", 1), ("a", 1))
    assert (a**-2).letters == (("a", -1), ("a", -1))
    assert word_commutator(a, b).letter_count == 4
    assert word_commutator(a, a).letter_count == 0


def test_word_rejects_double_binding() -> None:
    with pytest.raises(NotRepresentableError):
        Word.generator("a", _F) * Word.generator("a", _G)


def test_word_evaluate_and_multiply_out() -> None:
    a = Word.generator("a", _F)
    b = Word.generator("b", _G)
    w = word_commutator(a, b)
    assert word_to_pl(w) == commutator(_F, _G)
    x = Fraction(1, 3)
    assert word_evaluate(w, x) == evaluate(commutator(_F, _G), x)
    segment = restrict_pl(w, Interval(Fraction(0), Fraction(1)))
    assert segment.evaluate(x) == evaluate(commutator(_F, _G), x)


def test_word_unbound_generator() -> None:
    with pytest.raises(UnboundGeneratorError):
        word_evaluate(Word((("x", 1),)), Fraction(1, 2))


def test_breakset_families_round_trip_through_json() -> None:
    f = perturbation(2, _I)
    decoded = gpl_from_json(gpl_to_json(f))
    assert decoded == f
    assert breakset(decoded) == breakset(f)


def test_word_json_document() -> None:
    w = word_commutator(Word.generator("a", _F), Word.generator("b", _G))
    doc = word_to_json(w)
    assert doc["letters"] == [["a", 1], ["b", 1], ["a", -1], ["b", -1]]
    assert word_from_json(doc) == w


def test_word_reduction_keeps_the_value() -> None:
    env = {"a": _F, "p": perturbation(1, _I)}
    rng = random.Random(7)  # noqa: S311
    letters = [(rng.choice("ap"), rng.choice((1, -1))) for _ in range(16)]
    word = Word(tuple(letters), env)
    assert word.letter_count <= len(letters)
    assert all(
        not (left[0] == right[0] and left[1] == -right[1])
        for left, right in pairwise(word.letters)
    )
    for x in sample_rationals(Interval(Fraction(0), Fraction(1)), 200, seed=7):
        y = x
        for name, exponent in reversed(letters):
            if exponent > 0:
                y = gpl_evaluate(env[name], y)
            else:
                y = gpl_evaluate_inverse(env[name], y)
        assert word_evaluate(word, x) == y


def test_baumslag_solitar_conjugation() -> None:
    f = Word.generator(
        "f",
        bump(
            Fraction(1, 256),
            Fraction(1, 128),
            Fraction(1, 32),
            Fraction(1, 16),
            Fraction(1, 64),
        ),
    )
    g = Word.generator("g", mather_r())
    w = g**2 * f * g**-2
    assert w.letter_count == 5
    assert word_evaluate(w, Fraction(1, 16)) == Fraction(1, 16) + 4 * Fraction(1, 64)


def test_slope_norm_truncated_is_monotone_in_depth() -> None:
    assert slope_norm_truncated(GPLMap(), 3) == 1
    norms = [slope_norm_truncated(perturbation(1, _I), depth) for depth in range(21)]
    assert norms == [1] + [2] * 20


def test_first_factor_is_glued_at_the_limits() -> None:
    f = build_f1(1, _I)
    xs = sorted(set(sample_rationals(Interval(Fraction(0), Fraction(1)), 64, seed=5)))
    values = [gpl_evaluate(f, x) for x in xs]
    assert all(left < right for left, right in pairwise(values))
    assert f.active_families
    for family in f.active_families:
        assert gpl_evaluate(f, family.limit) == evaluate(f.scaffold, family.limit)
