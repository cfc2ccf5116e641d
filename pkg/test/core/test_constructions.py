"""Unit tests for gplab.core.constructions module."""

from fractions import Fraction
from itertools import pairwise

import pytest
from pytest_mock import MockerFixture

from gplab.core.constants import DIAGONAL_J
from gplab.core.constructions import (
    DiagonalEntry,
    MatherParams,
    bilipschitz_report,
    build_f1,
    certificate_undistorted,
    construction_map,
    diagonal_h,
    diagonal_trick,
    distortion_report,
    element_setup,
    first_factor_layout,
    mather_bound,
    mather_closed_form,
    mather_commutators,
    mather_setup,
    mather_word,
    minimal_m0,
    normalizing_map,
    ratio_table,
    sample_rationals,
    standard_mather,
    tent,
)
from gplab.core.exceptions import (
    CertificateFailedError,
    InvalidBumpError,
    ParseError,
)
from gplab.core.gpl import (
    GPLMap,
    gpl_evaluate,
    gpl_rank,
    gpl_support_hull,
    length_n,
    sequence_from_json,
)
from gplab.core.plcore import (
    Interval,
    eta,
    evaluate,
    evaluate_inverse,
    is_affine_on,
    power,
    support_hull,
)

_J = Interval(*DIAGONAL_J)
_I = Interval(Fraction(1, 4), Fraction(1, 2))


def test_tent_has_three_breakpoints() -> None:
    f = tent(_I)
    assert len(f.breakpoints) == 3
    assert support_hull(f) == Interval(Fraction(5, 16), Fraction(7, 16))
    assert evaluate(f, Fraction(3, 8)) == Fraction(3, 8) + Fraction(1, 32)


@pytest.mark.parametrize("n", [0, 1, 2])
def test_build_f1(n: int) -> None:
    f1 = build_f1(n, _I)
    layout = first_factor_layout(_I)
    assert gpl_evaluate(f1, layout.x0) == layout.x1
    assert gpl_rank(f1) == n
    assert gpl_support_hull(f1) == _I


def test_diagonal_h_translates_cells() -> None:
    h = diagonal_h()
    assert eta(h).in_kernel
    assert evaluate(h, Fraction(25, 64)) == Fraction(26, 64)
    assert evaluate(h, Fraction(38, 64)) == Fraction(39, 64)
    assert not _J.meets(_J.image(lambda x: evaluate(h, x)))


def test_normalizing_map() -> None:
    g = normalizing_map(Fraction(1, 4), Fraction(3, 4))
    assert evaluate(g, Fraction(1, 4)) == Fraction(3, 8)
    assert evaluate(g, Fraction(3, 4)) == Fraction(5, 8)
    assert is_affine_on(g, Interval(Fraction(1, 4), Fraction(3, 4)))


def test_sample_rationals_are_seeded() -> None:
    first = sample_rationals(_I, 8, seed=5)
    assert first == sample_rationals(_I, 8, seed=5)
    assert all(_I.contains(x) for x in first)


@pytest.mark.parametrize("n", [0, 1])
def test_element_setup(n: int, mocker: MockerFixture) -> None:
    logger = mocker.MagicMock()
    setup = element_setup(n, sample_count=20, logger=logger)
    assert setup.window == _J
    assert setup.layout.c == _J.lo + _J.length / 16
    assert setup.layout.d == _J.lo + 3 * _J.length / 16
    hull = gpl_support_hull(setup.f)
    assert hull is not None
    assert _J.contains_interval(hull)
    assert length_n(setup.f, n) == 2 * length_n(setup.f1, n)
    logger.info.assert_called_once()


def test_certificate_rank_zero() -> None:
    setup = element_setup(0, sample_count=10)
    report = certificate_undistorted(setup.f1, 0, k_max=4, layout=setup.layout)
    assert report.base == 4
    assert [row.localized for row in report.rows] == [4, 8, 12, 16]
    assert report.rows[0].total == 7
    assert report.rows[1].total == 11
    totals = [row.total for row in report.rows]
    assert all(right - left == 4 for left, right in pairwise(totals))
    assert report.stable_length == 4


def test_certificate_rank_one() -> None:
    setup = element_setup(1, sample_count=10)
    report = certificate_undistorted(setup.f1, 1, k_max=3, layout=setup.layout)
    assert report.base == 1
    assert [row.localized for row in report.rows] == [1, 2, 3]
    assert [row.total for row in report.rows] == [1, 2, 3]
    assert report.stable_length == 1


def test_certificate_rejects_identity() -> None:
    with pytest.raises(CertificateFailedError):
        certificate_undistorted(GPLMap(), 0)


@pytest.mark.parametrize("m", [0, 1, 2])
def test_diagonal_trick_rank_zero_is_exact(m: int, mocker: MockerFixture) -> None:
    logger = mocker.MagicMock()
    report = diagonal_trick(element_setup(0, sample_count=10), m, logger=logger)
    assert report.m == m
    assert report.exact
    logger.info.assert_called_once()


def test_diagonal_trick_rank_one() -> None:
    setup = element_setup(1, sample_count=10)
    report = diagonal_trick(setup, 1, sample_count=10)
    assert not report.exact
    assert report.windows_checked > 0
    assert report.samples_checked == 10


@pytest.mark.parametrize("m", [13, 16])
def test_diagonal_trick_beyond_the_translated_cells(m: int) -> None:
    setup = element_setup(0, sample_count=10)
    report = diagonal_trick(setup, m)
    assert report.m == m
    assert report.exact
    assert all(is_affine_on(power(setup.h, j), _J) for j in range(-m - 1, m + 2))


@pytest.mark.parametrize("m", [4, 5, 6])
def test_mather_generator_past_the_first_indices(m: int) -> None:
    data = mather_setup(
        MatherParams(), DiagonalEntry(0, "a"), DiagonalEntry(0, "b"), m_max=2
    )
    layout = element_setup(0, sample_count=10).layout
    h = diagonal_h()
    c_m = data.big_f.families[0].conjugator(m)
    x = evaluate(c_m, evaluate_inverse(h, layout.x0))
    hull = data.t_prime(m)
    mid = (hull.lo + hull.hi) / 2
    assert hull.contains(gpl_evaluate(data.big_f, mid))
    assert hull.contains(x)
    assert gpl_evaluate(data.big_f, x) == evaluate(c_m, evaluate_inverse(h, layout.x1))


def test_diagonal_entry_sequence() -> None:
    entry = DiagonalEntry(0, "d")
    assert entry.top_rank == 0
    assert DiagonalEntry(2, "a").top_rank == 2
    assert sequence_from_json(entry.to_json()) == entry
    hull = gpl_support_hull(entry.at(1))
    assert hull is not None
    assert MatherParams().core.contains_interval(hull)


def test_minimal_m0_of_default_layout() -> None:
    assert minimal_m0(Fraction(1, 16), Fraction(1, 4)) == 3
    assert MatherParams().m0 == 3
    assert mather_bound(1, 3) == 48


def test_mather_params_check() -> None:
    MatherParams().check()
    with pytest.raises(InvalidBumpError):
        MatherParams(alpha=Fraction(1, 2)).check()
    with pytest.raises(InvalidBumpError):
        MatherParams(a=Fraction(9, 16)).check()


def test_mather_bookkeeping() -> None:
    data = standard_mather(0, m_max=100)
    assert len(data.bookkeeping) == 100
    first = data.bookkeeping[0]
    assert first.t.lo == Fraction(13, 64)
    assert first.t.lo == mather_closed_form(Fraction(5, 16), 1)
    for row in data.bookkeeping[:5]:
        assert row.t.contains_interval(row.t_prime)
        assert not row.t_prime.meets(row.moved)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_mather_commutators_rank_zero(m: int) -> None:
    data = standard_mather(0, m_max=10)
    word, row = mather_commutators(data, m)
    assert row.letter_count == 24 * m + 20
    assert row.raw_count == 28 * m + 20
    assert row.bound == 28 * m + 20
    assert row.verified
    assert row.windows_checked == 1
    assert word.letter_count == row.letter_count


def test_mather_commutators_rank_one() -> None:
    data = standard_mather(1, m_max=10)
    _, row = mather_commutators(data, 1, sample_count=20)
    assert row.windows_checked > 0
    assert row.samples_checked == 20


def test_mather_word_without_verification() -> None:
    data = standard_mather(0, m_max=10)
    word, raw = mather_word(data, 30)
    assert word.letter_count == 24 * 30 + 20
    assert raw == mather_bound(30, 3)
    _, row = mather_commutators(data, 30, verify=False)
    assert not row.verified


def test_ratio_table() -> None:
    rows = ratio_table(12, 3)
    assert rows[4].ratio == Fraction(320, 26)
    assert rows[11].ratio == Fraction(712, 145)
    tail = [row.ratio for row in rows[4:]]
    assert tail == sorted(tail, reverse=True)
    assert rows[11].ratio < rows[4].ratio / 2


def test_distortion_report_rank_zero(mocker: MockerFixture) -> None:
    logger = mocker.MagicMock()
    report = distortion_report(0, verify_m_max=1, sample_count=10, logger=logger)
    assert report.m0 == 3
    assert report.certificate.base == 4
    assert len(report.ratios) == 12
    (row,) = report.verified
    assert row.index == 1
    assert row.diagonal.exact
    assert row.letter_count == 2 * (24 + 20)


def test_bilipschitz_report() -> None:
    report = bilipschitz_report(element_setup(0, sample_count=10), k_max=3, depth_max=2)
    assert report.fixed_point_slope == 2
    assert [norm for _, norm in report.element_norms] == [2, 4, 8]
    assert report.generator_norms == ((1, 4), (2, 32))
    assert report.grows


@pytest.mark.parametrize(
    ("name", "n", "rank"),
    [
        ("perturbation", 2, 2),
        ("first-factor", 1, 1),
        ("element", 1, 1),
        ("mather-f", 0, 1),
        ("mather-g", 0, 1),
    ],
)
def test_construction_map(name: str, n: int, rank: int) -> None:
    assert gpl_rank(construction_map(name, n)) == rank


def test_construction_map_unknown() -> None:
    with pytest.raises(ParseError):
        construction_map("cantor", 0)
