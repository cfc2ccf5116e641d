"""Unit tests for gplab.core.grouplab module."""

from fractions import Fraction

import pytest
from pytest_mock import MockerFixture

from gplab.core.constants import GROUP_H5_GAMMA1
from gplab.core.exceptions import (
    BudgetExceededError,
    GroupLabError,
    ParseError,
    SubadditivityViolationError,
)
from gplab.core.grouplab import (
    DyadicAffine,
    GroupElement,
    NotFound,
    UniTriMatrix,
    bfs_ball,
    bs_generators,
    bs_realization,
    bs_report,
    builtin_group,
    canonical_key,
    distortion_function,
    distortion_table,
    element_commutator,
    element_from_json,
    element_to_json,
    elementary,
    fekete_estimate,
    gamma_generators,
    genset_comparison,
    growth_exponent,
    h5_generators,
    h5_report,
    l1_length,
    length_axioms_report,
    make_genset,
    multiply,
    naive_lengths,
    power_lengths,
    random_elements,
    verify_h5_identities,
    word_length,
)
from gplab.core.plcore import mather_r


def test_elementary_commutator() -> None:
    assert element_commutator(elementary(3, 4), elementary(4, 5)) == elementary(3, 5)
    assert element_commutator(elementary(3, 4), elementary(2, 5)) == UniTriMatrix()


def test_unitri_inverse_and_power() -> None:
    a = elementary(1, 2) * elementary(2, 3) * elementary(1, 5) ** 3
    assert a * a.inverse() == UniTriMatrix()
    assert (a**-2) * (a**2) == UniTriMatrix()
    assert (elementary(2, 5) ** 7).entry(2, 5) == 7
    assert a.entry(3, 1) == 0


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_verify_h5_identities(n: int) -> None:
    row = verify_h5_identities(n)
    assert row.e25_bound == 8 * n + 2
    assert row.l1_e25 == n
    assert row.l2_e15 == n


def test_h5_report(mocker: MockerFixture) -> None:
    logger = mocker.MagicMock()
    report = h5_report(4, logger=logger)
    assert [row.n for row in report.rows] == [1, 2, 3, 4]
    assert report.l1_stable == 1
    assert report.l2_stable == 1
    logger.info.assert_called_once()


def test_bs_report() -> None:
    rows = bs_report(4)
    assert [row.translation for row in rows] == [2, 4, 8, 16]
    assert [row.word_bound for row in rows] == [3, 5, 7, 9]


def test_dyadic_affine_rejects_non_dyadic() -> None:
    with pytest.raises(ParseError):
        DyadicAffine(0, Fraction(1, 3))


def test_dyadic_affine_composition() -> None:
    f, g = bs_realization()
    assert (g * f)(Fraction(1, 2)) == 3
    assert (g**-1)(Fraction(3)) == Fraction(3, 2)
    assert f * f.inverse() == DyadicAffine()


def test_make_genset_adds_inverses() -> None:
    generators = bs_generators()
    assert generators.names == ("f", "f^-1", "g", "g^-1")
    f, _ = bs_realization()
    assert generators.lookup("f^-1") == f.inverse()


def test_make_genset_drops_duplicates() -> None:
    f, _ = bs_realization()
    generators = make_genset({"f": f, "h": f})
    assert generators.names == ("f", "f^-1")


def test_bfs_ball_on_cyclic_group() -> None:
    f, _ = bs_realization()
    ball = bfs_ball(make_genset({"f": f}), 3)
    assert ball.sphere_sizes == [1, 2, 2, 2]
    assert len(ball) == 7
    assert ball.length_of(f**3) == 3
    assert ball.length_of(f**4) is None


def test_bfs_ball_matches_naive_enumeration() -> None:
    generators = bs_generators()
    ball = bfs_ball(generators, 4, threads=2)
    naive = naive_lengths(generators, 4)
    assert len(naive) == len(ball)
    for key, length in naive.items():
        assert ball.entries[key].length == length


def test_bfs_ball_budget() -> None:
    with pytest.raises(BudgetExceededError) as excinfo:
        bfs_ball(h5_generators(), 3, budget=50)
    assert excinfo.value.budget == 50


def test_word_length_not_found() -> None:
    f, _ = bs_realization()
    assert word_length(f**2, bs_generators(), 3) == 2
    assert word_length(f**20, bs_generators(), 2) == NotFound(2)


def test_power_lengths_rejects_torsion() -> None:
    ball = bfs_ball(bs_generators(), 1)
    with pytest.raises(GroupLabError):
        power_lengths(DyadicAffine(), ball, 3)


def test_distortion_of_baumslag_solitar() -> None:
    f, _ = bs_realization()
    table = distortion_table(f, bs_generators(), 5, power_limit=16)
    assert table[0] == (0, 0)
    assert table[1] == (1, 1)
    assert table[3][1] >= 3
    assert table[5][1] >= 6


def test_distortion_function_reads_last_row() -> None:
    f, _ = bs_realization()
    table = distortion_table(f, bs_generators(), 3)
    assert distortion_function(f, bs_generators(), 3) == table[-1][1]


def test_fekete_estimate() -> None:
    assert fekete_estimate(lambda m: 2 * m + 1, 6) == Fraction(13, 6)
    with pytest.raises(SubadditivityViolationError):
        fekete_estimate(lambda m: m * m, 4)


def test_growth_exponent() -> None:
    assert growth_exponent([(1, 1), (2, 4), (4, 16)]) == pytest.approx(2.0)
    assert growth_exponent([(0, 0), (1, 1)]) is None


def test_gamma1_length_axioms() -> None:
    sample = random_elements(gamma_generators(GROUP_H5_GAMMA1), 20, 6, seed=1)
    report = length_axioms_report(l1_length, sample)
    assert report.pairs == 400
    assert report.holds


def test_genset_comparison_with_itself() -> None:
    comparison = genset_comparison(bs_generators(), bs_generators(), 2)
    assert comparison.constant == 1
    assert comparison.holds


def test_builtin_group() -> None:
    assert builtin_group("bs") == bs_generators()
    assert "e25" in builtin_group(GROUP_H5_GAMMA1).names
    with pytest.raises(ParseError):
        builtin_group("free")


def test_multiply_rejects_mixed_variants() -> None:
    with pytest.raises(TypeError):
        multiply(DyadicAffine(), UniTriMatrix())


def test_canonical_keys_are_tagged() -> None:
    assert canonical_key(DyadicAffine())[0] == "dyadic"
    assert canonical_key(UniTriMatrix())[0] == "unitri"
    assert canonical_key(mather_r())[0] == "pl"


@pytest.mark.parametrize(
    "element",
    [DyadicAffine(-2, Fraction(3, 4)), elementary(1, 5) ** 4, mather_r()],
)
def test_element_json_document(element: GroupElement) -> None:
    assert element_from_json(element_to_json(element)) == element


def test_element_from_json_rejects_bad_multiplier() -> None:
    with pytest.raises(ParseError):
        element_from_json({"kind": "dyadic", "p": "3^1", "q": "0/1"})
