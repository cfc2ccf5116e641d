"""Element that is undistorted at one rank level and distorted at the next.

The pipeline builds the first factor f₁ and the commutator f = [f₁, t], the
diagonal-trick factorization of f^{m+1} into two commutators, and Mather's
argument, which writes sequences of commutators as words of linear length over
five fixed generators. Every identity, inclusion and disjointness statement the
argument uses is re-checked with exact rationals.
"""

import random
from collections.abc import Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache, reduce
from itertools import pairwise
from typing import Any

from aws_lambda_powertools import Logger

from .cbset import Direction, Infinite, Transport, clip, nth_derived_cardinality
from .constants import (
    BILIPSCHITZ_DEPTH_MAX,
    BILIPSCHITZ_K_MAX,
    CERTIFICATE_K_MAX,
    DEFAULT_RATIO_M_MAX,
    DEFAULT_SAMPLE_COUNT,
    DEFAULT_SEED,
    DEFAULT_VERIFY_M_MAX,
    DIAGONAL_H_ALPHA,
    DIAGONAL_H_CORE_RIGHT,
    DIAGONAL_H_CORE_LEFT,
    DIAGONAL_H_OUTER,
    DIAGONAL_INDEX_POWER,
    DIAGONAL_J,
    ERROR_BOUND_EXCEEDED,
    ERROR_CERTIFICATE_FAILED,
    ERROR_DISJOINTNESS_FAILED,
    ERROR_IDENTITY_FAILED,
    ERROR_INVALID_BUMP,
    ERROR_PARSE,
    INSPECTION_DEPTH,
    MATHER_A,
    MATHER_A_PRIME,
    MATHER_ALPHA,
    MATHER_B,
    MATHER_B_PRIME,
    MATHER_BOOKKEEPING_BOUND,
    RATIO_DECREASING_FROM,
    SAMPLE_DENOMINATOR,
    THREADS,
    WINDOWS_PER_FAMILY,
)
from .exceptions import (
    BoundExceededError,
    CertificateFailedError,
    DisjointnessFailedError,
    FuelExhaustedError,
    IdentityFailedError,
    InvalidBumpError,
    NotPiecewiseLinearHereError,
    ParseError,
)
from .gpl import (
    ConstantMap,
    CyclicMaps,
    GPLMap,
    Homeo,
    MapFamily,
    MapSequence,
    Word,
    breakset,
    conjugate,
    gpl_evaluate,
    gpl_evaluate_inverse,
    gpl_fixed_point_slope,
    gpl_invert,
    gpl_power,
    gpl_support_hull,
    join,
    length_n,
    lift,
    pl_windows,
    register_sequence_decoder,
    restrict_pl,
    slope_norm_truncated,
    to_pl,
    word_commutator,
    word_evaluate,
)
from .grouplab import fekete_estimate
from .plcore import (
    HALF,
    ONE,
    ZERO,
    Interval,
    PLMap,
    affine_embedding,
    bump,
    commutator,
    compose,
    eta,
    evaluate,
    evaluate_inverse,
    invert,
    make_pl,
    mather_h,
    mather_r,
    power,
    restrict,
    support_hull,
)

# Building blocks


def tent(interval: Interval) -> PLMap:
    """PL map through (u, u), (mid, mid + w/8) and (v, v) with w = |I|.

    Here u and v are the quarter points of the interval, so the support is
    [u, v] and the map has exactly three breakpoints.

    Returns:
        PLMap: The tent, which dominates the identity.

    """
    width = interval.length
    u = interval.lo + width / 4
    v = interval.hi - width / 4
    mid = (interval.lo + interval.hi) / 2
    return make_pl([(u, u), (mid, mid + width / 8), (v, v)])


@lru_cache(maxsize=256)
def perturbation(n: int, interval: Interval) -> GPLMap:
    """Map supported inside the interval whose break set has rank exactly n.

    For n ≥ 1 the pieces are rank n−1 perturbations of the core hull
    [p + 5δ/4, p + 7δ/4], transported by powers of σ⁻¹ = p + (x − p)/2 and
    accumulating at the midpoint p from above, with δ = |I|/4.

    Args:
        n (int): The rank.
        interval (Interval): The interval holding the support.

    Returns:
        GPLMap: The perturbation, which dominates the identity.

    """
    if n == 0:
        return lift(tent(interval))
    p = (interval.lo + interval.hi) / 2
    delta = interval.length / 4
    sigma = make_pl([(p - delta, interval.lo), (p + delta, interval.hi)])
    core = Interval(p + 5 * delta / 4, p + 7 * delta / 4)
    family = MapFamily(
        limit=p,
        direction=Direction.FROM_ABOVE,
        transport=Transport(outer=sigma),
        core_hull=core,
        pieces=ConstantMap(perturbation(n - 1, core)),
    )
    return GPLMap(families=(family,))


@dataclass(frozen=True)
class FirstFactorLayout:
    """Points of the first factor: I = [c, d] and f₁(x₀) = x₁."""

    c: Fraction
    d: Fraction
    x0: Fraction
    x1: Fraction

    @property
    def interval(self) -> Interval:
        """The support interval I."""
        return Interval(self.c, self.d)

    @property
    def fundamental_domain(self) -> Interval:
        """The interval [x₀, x₁]; its half-open version is a fundamental domain."""
        return Interval(self.x0, self.x1)


def first_factor_layout(interval: Interval) -> FirstFactorLayout:
    """Place x₀ and x₁ at the first quarter and the midpoint of I.

    Returns:
        FirstFactorLayout: The layout.

    """
    width = interval.length
    return FirstFactorLayout(
        c=interval.lo,
        d=interval.hi,
        x0=interval.lo + width / 4,
        x1=interval.lo + width / 2,
    )


def build_f1(n: int, interval: Interval) -> GPLMap:
    """First factor of rank n supported in the interval.

    The scaffold s is affine on [c, x₀], [x₀, x₁] and [x₁, d], translates
    [x₀, x₁] by x₁ − x₀ and is the identity off I; the map is s∘φ with φ a rank
    n perturbation of [x₀, x₁].

    Args:
        n (int): The rank level.
        interval (Interval): The support interval I ⊂ (0, 1).

    Returns:
        GPLMap: f₁ with f₁(x₀) = x₁ and f₁ ≥ id.

    """
    layout = first_factor_layout(interval)
    c, d, x0, x1 = layout.c, layout.d, layout.x0, layout.x1
    scaffold = make_pl([(c, c), (x0, x1), (x1, 2 * x1 - x0), (d, d)])
    phi = perturbation(n, layout.fundamental_domain)
    if n == 0:
        return lift(compose(scaffold, to_pl(phi)))
    return GPLMap(scaffold=scaffold, families=phi.families)


def diagonal_h() -> PLMap:
    """Kernel element translating [25/64, 38/64] by 1/64 inside [3/8, 5/8].

    Returns:
        PLMap: The map h of the diagonal trick.

    """
    outer_lo, outer_hi = DIAGONAL_H_OUTER
    return bump(
        outer_lo,
        DIAGONAL_H_CORE_LEFT,
        DIAGONAL_H_CORE_RIGHT,
        outer_hi,
        DIAGONAL_H_ALPHA,
    )


def normalizing_map(a: Fraction, b: Fraction) -> PLMap:
    """PL conjugator sending [a, b] affinely onto [3/8, 5/8].

    Returns:
        PLMap: The map, after which 1/2 ∈ (a, b) and b − a < 1/2.

    """
    return affine_embedding(Interval(a, b), Interval(MATHER_A, MATHER_B))


def sample_rationals(
    interval: Interval, count: int, seed: int = DEFAULT_SEED
) -> list[Fraction]:
    """Seeded exact sample points of an interval.

    Returns:
        list[Fraction]: `count` rationals in the closed interval.

    """
    rng = random.Random(seed)  # noqa: S311
    return [
        interval.lo
        + interval.length
        * Fraction(rng.randrange(SAMPLE_DENOMINATOR + 1), SAMPLE_DENOMINATOR)
        for _ in range(count)
    ]


def _dominates_identity(f: PLMap) -> bool:
    return all(y >= x for x, y in f.graph)


def _fail(label: str, witnesses: Any = None) -> IdentityFailedError:
    return IdentityFailedError(ERROR_IDENTITY_FAILED.format(label), witnesses=witnesses)


def _require_disjoint(left: Interval, right: Interval, m: int | None = None) -> None:
    if left.meets(right):
        error_message = ERROR_DISJOINTNESS_FAILED.format(m, f"{left} meets {right}")
        raise DisjointnessFailedError(error_message, m=m)


def _require_inside(inner: Interval | None, outer: Interval, label: str) -> None:
    if inner is not None and not outer.contains_interval(inner):
        raise _fail(f"{label}: {inner} ⊄ {outer}", (inner, outer))


# The undistorted element


@dataclass(frozen=True)
class ElementSetup:
    """The element f = [f₁, t] and the map h used to factor its powers."""

    n: int
    window: Interval
    layout: FirstFactorLayout
    f1: GPLMap
    t: PLMap
    f: GPLMap
    word: Word = field(hash=False, compare=False)
    h: PLMap = field(default_factory=diagonal_h)


@lru_cache(maxsize=16)
def _element_setup(n: int, window: Interval) -> ElementSetup:
    width = window.length
    interval = Interval(window.lo + width / 16, window.lo + 3 * width / 16)
    layout = first_factor_layout(interval)
    f1 = build_f1(n, interval)
    t = bump(window.lo, interval.lo, interval.hi, window.hi, width / 4)
    f2_inverse = conjugate(gpl_invert(f1), t)
    _require_disjoint(interval, interval.image(t))
    f1_hull, f2_hull = gpl_support_hull(f1), gpl_support_hull(f2_inverse)
    if f1_hull is not None and f2_hull is not None:
        _require_disjoint(f1_hull, f2_hull)
    word = word_commutator(Word.generator("f1", f1), Word.generator("t", t))
    return ElementSetup(
        n=n,
        window=window,
        layout=layout,
        f1=f1,
        t=t,
        f=join(f1, f2_inverse),
        word=word,
    )


def element_setup(
    n: int,
    window: Interval | None = None,
    sample_count: int = DEFAULT_SAMPLE_COUNT,
    seed: int = DEFAULT_SEED,
    logger: Logger | None = None,
) -> ElementSetup:
    """Build f₁, t and f = [f₁, t] inside the window J and check them.

    Args:
        n (int): The rank level.
        window (Interval | None): The interval J; defaults to a lattice cell
            of h so that every power of h is affine on it.
        sample_count (int): Points used for the pointwise checks.
        seed (int): Sampling seed.
        logger (Logger | None): Optional logger.

    Returns:
        ElementSetup: The checked setup.

    Raises:
        IdentityFailedError: If a defining property of f₁, t or h fails.
        DisjointnessFailedError: If t(I) meets I or h(J) meets J.

    """
    setup = _element_setup(n, window or Interval(*DIAGONAL_J))
    layout, f1, t, h = setup.layout, setup.f1, setup.t, setup.h
    _require_inside(gpl_support_hull(f1), layout.interval, "supp(f1)")
    if gpl_evaluate(f1, layout.x0) != layout.x1:
        raise _fail("f1(x0) = x1", (layout.x0, gpl_evaluate(f1, layout.x0)))
    for label, g in (("t", t), ("h", h)):
        if not eta(g).in_kernel or not _dominates_identity(g):
            raise _fail(f"{label} is a kernel element above the identity", g)
    _require_disjoint(setup.window, setup.window.image(h))
    _require_inside(gpl_support_hull(setup.f), setup.window, "supp(f)")
    for x in sample_rationals(layout.interval, sample_count, seed):
        if gpl_evaluate(f1, x) < x:
            raise _fail("f1 >= id", x)
        if word_evaluate(setup.word, x) != gpl_evaluate(setup.f, x):
            raise _fail("[f1, t] matches its representation", x)
    if logger is not None:
        logger.info(
            "Element setup checked", extra={"n": n, "window": str(setup.window)}
        )
    return setup


@dataclass(frozen=True)
class CertificateRow:
    """Break-set counts of one power f₁ᵏ."""

    k: int
    localized: int
    total: int | str


@dataclass(frozen=True)
class CertificateReport:
    """Linear growth of Lₙ along the powers of f₁."""

    n: int
    base: int
    rows: tuple[CertificateRow, ...]
    stable_length: Fraction


def _localized_length(
    f1: GPLMap, power_map: GPLMap, k: int, n: int, layout: FirstFactorLayout
) -> int:
    lo = layout.x0
    for _ in range(k - 1):
        lo = gpl_evaluate_inverse(f1, lo)
    count = nth_derived_cardinality(clip(breakset(power_map), lo, layout.x1), n)
    if isinstance(count, Infinite):
        error_message = ERROR_CERTIFICATE_FAILED.format(n, k, count, k, "?")
        raise CertificateFailedError(error_message, k=k)
    return count


def certificate_undistorted(
    f1: GPLMap,
    n: int,
    k_max: int = CERTIFICATE_K_MAX,
    layout: FirstFactorLayout | None = None,
    logger: Logger | None = None,
) -> CertificateReport:
    """Check Lₙ(f₁ᵏ) = k·Lₙ(f₁) for every k ≤ k_max.

    The n-th derived break set of f₁ᵏ is counted on the window
    [f₁^{-(k-1)}(x₀), x₁), a union of k disjoint translates of the fundamental
    domain. For n ≥ 1 the global count Lₙ(f₁ᵏ) must agree. For n = 0 the global
    count also holds the ends of the support of f₁, so it must grow by exactly
    L₀(f₁) from one power to the next.

    Args:
        f1 (GPLMap): The first factor.
        n (int): The rank level.
        k_max (int): Largest power checked.
        layout (FirstFactorLayout | None): Where x₀ and x₁ lie; derived from
            the support hull of f₁ when omitted.
        logger (Logger | None): Optional logger.

    Returns:
        CertificateReport: The counts and the stabilized length.

    Raises:
        CertificateFailedError: With the first k violating linear growth.

    """
    hull = gpl_support_hull(f1)
    if layout is None and hull is not None:
        layout = first_factor_layout(hull)
    if layout is None:
        error_message = ERROR_CERTIFICATE_FAILED.format(n, 1, 0, 1, 0)
        raise CertificateFailedError(error_message, k=1)
    rows: list[CertificateRow] = []
    base = 0
    previous_total = 0
    for k in range(1, k_max + 1):
        power_map = gpl_power(f1, k)
        localized = _localized_length(f1, power_map, k, n, layout)
        total = length_n(power_map, n)
        if k == 1:
            base = localized
        failed = base == 0 or localized != k * base
        if n >= 1 and total != k * base:
            failed = True
        if n == 0 and isinstance(total, int):
            if k >= 2 and total != previous_total + base:
                failed = True
            previous_total = total
        if failed:
            error_message = ERROR_CERTIFICATE_FAILED.format(n, k, localized, k, base)
            raise CertificateFailedError(error_message, k=k)
        shown = str(total) if isinstance(total, Infinite) else total
        rows.append(CertificateRow(k=k, localized=localized, total=shown))
    localized_by_k = {row.k: row.localized for row in rows}
    stable = fekete_estimate(lambda k: localized_by_k[k], k_max)
    if logger is not None:
        logger.info("Certificate holds: L_%s(f1) = %s", n, base)
    return CertificateReport(n=n, base=base, rows=tuple(rows), stable_length=stable)


# Diagonal trick


def delta(g: Homeo, h: PLMap, m: int) -> GPLMap:
    """The product Δₘ(g) = ∏_{i=0}^{m} hⁱ g h⁻ⁱ of disjointly supported copies.

    Returns:
        GPLMap: Δₘ(g).

    """
    return reduce(join, (conjugate(g, power(h, i)) for i in range(m + 1)))


@dataclass(frozen=True)
class DiagonalEntries:
    """Maps of the factorization f^{m+1} = [a, b]·[c, d]."""

    m: int
    a: GPLMap
    b: GPLMap
    c: PLMap
    d: GPLMap
    delta_f: GPLMap
    f_prime: GPLMap
    f_power: GPLMap


@lru_cache(maxsize=64)
def diagonal_entries(setup: ElementSetup, m: int) -> DiagonalEntries:
    """Build the entries a, b, c, d of the two-commutator factorization.

    a = h^{-(m+1)}Δₘ(f₁)h^{m+1}, b = h^{-(m+1)}Δₘ(t)h^{m+1}, c = h and
    d = h^{-(m+1)}f′h^{m+1} with f′ = ∏ hⁱ f^{i+1} h⁻ⁱ.

    Returns:
        DiagonalEntries: The entries and the intermediate products.

    """
    h = setup.h
    down = power(h, -(m + 1))
    f_prime = reduce(
        join, (conjugate(gpl_power(setup.f, i + 1), power(h, i)) for i in range(m + 1))
    )
    return DiagonalEntries(
        m=m,
        a=conjugate(delta(setup.f1, h, m), down),
        b=conjugate(delta(setup.t, h, m), down),
        c=h,
        d=conjugate(f_prime, down),
        delta_f=delta(setup.f, h, m),
        f_prime=f_prime,
        f_power=gpl_power(setup.f, m + 1),
    )


@dataclass(frozen=True)
class DiagonalReport:
    """Outcome of the diagonal-trick checks at one m."""

    m: int
    exact: bool
    windows_checked: int
    samples_checked: int


def _evaluate_any(f: Homeo | Word, x: Fraction) -> Fraction:
    return word_evaluate(f, x) if isinstance(f, Word) else gpl_evaluate(f, x)


def _compare_on_windows(
    lhs: Homeo | Word, rhs: Homeo | Word, windows: Iterable[Interval], label: str
) -> int:
    checked = 0
    for window in windows:
        try:
            left, right = restrict_pl(lhs, window), restrict_pl(rhs, window)
        except (NotPiecewiseLinearHereError, FuelExhaustedError):
            continue
        if left != right:
            raise _fail(f"{label} on {window}", (left, right))
        checked += 1
    if checked == 0:
        raise _fail(f"{label}: no window could be restricted")
    return checked


def _compare_on_samples(
    lhs: Homeo | Word, rhs: Homeo | Word, points: Sequence[Fraction], label: str
) -> int:
    for x in points:
        left, right = _evaluate_any(lhs, x), _evaluate_any(rhs, x)
        if left != right:
            raise _fail(f"{label} at {x}", (x, left, right))
    return len(points)


def diagonal_trick(
    setup: ElementSetup,
    m: int,
    sample_count: int = DEFAULT_SAMPLE_COUNT,
    seed: int = DEFAULT_SEED,
    logger: Logger | None = None,
) -> DiagonalReport:
    """Verify [f′, h] = Δₘ(f)h^{m+1}f^{-(m+1)}h^{-(m+1)} and f^{m+1} = [a, b][c, d].

    PL instances are compared as exact maps. Otherwise both sides are compared
    on restricted pieces and at seeded exact sample points.

    Args:
        setup (ElementSetup): The element and h.
        m (int): The index of the factorization.
        sample_count (int): Sample points for non-PL instances.
        seed (int): Sampling seed.
        logger (Logger | None): Optional logger.

    Returns:
        DiagonalReport: What was checked.

    Raises:
        DisjointnessFailedError: If h(J) meets J.
        IdentityFailedError: If an identity or a support inclusion fails.

    """
    h, window = setup.h, setup.window
    _require_disjoint(window, window.image(h), m)
    _require_inside(gpl_support_hull(setup.f), window, "supp(f)")
    entries = diagonal_entries(setup, m)
    h_support = support_hull(h)
    if h_support is None:
        raise _fail("h is not the identity", h)
    for label in ("a", "b", "c", "d"):
        _require_inside(
            gpl_support_hull(getattr(entries, label)), h_support, f"supp({label})"
        )
    up, down = power(h, m + 1), power(h, -(m + 1))
    parts = (entries.a, entries.b, entries.d, entries.delta_f, entries.f_prime)
    if all(g.is_pl for g in parts):
        f_power = to_pl(entries.f_power)
        bracket = commutator(to_pl(entries.f_prime), h)
        expected = compose(
            to_pl(entries.delta_f), compose(up, compose(invert(f_power), down))
        )
        if bracket != expected:
            raise _fail(f"[f', h] = Delta_{m}(f) h^{m + 1} f^-{m + 1} h^-{m + 1}")
        product = compose(
            commutator(to_pl(entries.a), to_pl(entries.b)),
            commutator(h, to_pl(entries.d)),
        )
        if product != f_power:
            raise _fail(f"f^{m + 1} = [a, b][c, d]", (product, f_power))
        report = DiagonalReport(m=m, exact=True, windows_checked=0, samples_checked=0)
    else:
        a, b = Word.generator("a", entries.a), Word.generator("b", entries.b)
        c, d = Word.generator("c", h), Word.generator("d", entries.d)
        factored = word_commutator(a, b) * word_commutator(c, d)
        h_word = Word.generator("h", h)
        bracket_word = word_commutator(Word.generator("f'", entries.f_prime), h_word)
        expected_word = (
            Word.generator("delta", entries.delta_f)
            * h_word ** (m + 1)
            * Word.generator("f", setup.f) ** -(m + 1)
            * h_word ** -(m + 1)
        )
        windows = _compare_on_windows(
            entries.f_power,
            factored,
            pl_windows(entries.f_power, WINDOWS_PER_FAMILY),
            f"f^{m + 1} = [a, b][c, d]",
        )
        points = [
            *sample_rationals(window, sample_count // 2, seed),
            *sample_rationals(h_support, sample_count - sample_count // 2, seed + 1),
        ]
        _compare_on_samples(
            entries.f_power, factored, points, f"f^{m + 1} = [a, b][c, d]"
        )
        _compare_on_samples(bracket_word, expected_word, points, "[f', h]")
        report = DiagonalReport(
            m=m, exact=False, windows_checked=windows, samples_checked=len(points)
        )
    if logger is not None:
        logger.info("Diagonal trick verified at m = %s", m)
    return report


@dataclass(frozen=True)
class DiagonalEntry:
    """Map sequence m ↦ one entry of the factorization at index m^index_power."""

    n: int
    entry: str
    index_power: int = DIAGONAL_INDEX_POWER

    def at(self, m: int) -> GPLMap:
        """Entry at index i = m^index_power.

        Returns:
            GPLMap: The entry of the factorization of f^{i+1}.

        """
        setup = _element_setup(self.n, Interval(*DIAGONAL_J))
        entries = diagonal_entries(setup, m**self.index_power)
        return lift(getattr(entries, self.entry))

    @property
    def top_rank(self) -> int:
        """Rank of the entries: b and c are PL, a and d have the rank of f."""
        return 0 if self.entry in {"b", "c"} else self.n

    def to_json(self) -> dict[str, Any]:
        """Serialize the sequence.

        Returns:
            dict[str, Any]: The tagged parameters.

        """
        return {
            "kind": "diagonal",
            "n": self.n,
            "entry": self.entry,
            "index_power": self.index_power,
        }


register_sequence_decoder(
    "diagonal",
    lambda doc: DiagonalEntry(
        int(doc["n"]),
        str(doc["entry"]),
        int(doc.get("index_power", DIAGONAL_INDEX_POWER)),
    ),
)


# Mather's argument


def minimal_m0(alpha: Fraction, width: Fraction) -> int:
    """Smallest m₀ with 2^{m₀}·α > width.

    Returns:
        int: m₀.

    >>> minimal_m0(Fraction(1, 16), Fraction(1, 4))
    3
    """
    m0 = 0
    while 2**m0 * alpha <= width:
        m0 += 1
    return m0


def mather_closed_form(x: Fraction, m: int) -> Fraction:
    """Value of r⁻ᵐh⁻ᵐ at a point x of [a′, b′].

    Returns:
        Fraction: x/4ᵐ + 1/2^{m+1} − 1/2^{2m+1}.

    """
    return x / 4**m + Fraction(1, 2 ** (m + 1)) - Fraction(1, 2 ** (2 * m + 1))


def mather_bound(m: int, m0: int) -> int:
    """Length bound kₘ = 28m + 2m₀ + 14.

    Returns:
        int: kₘ.

    """
    return 28 * m + 2 * m0 + 14


@dataclass(frozen=True)
class MatherParams:
    """Intervals a′ < a < b < b′ and the translation length α of f̃."""

    a_prime: Fraction = MATHER_A_PRIME
    a: Fraction = MATHER_A
    b: Fraction = MATHER_B
    b_prime: Fraction = MATHER_B_PRIME
    alpha: Fraction = MATHER_ALPHA

    @property
    def m0(self) -> int:
        """Smallest m₀ with 2^{m₀}α > b − a."""
        return minimal_m0(self.alpha, self.b - self.a)

    @property
    def core(self) -> Interval:
        """The interval [a, b] holding the piece supports."""
        return Interval(self.a, self.b)

    def check(self) -> None:
        """Validate the normalized layout.

        Raises:
            InvalidBumpError: Unless 0 < a′ < a < 1/2 < b < b′ < 1,
                b′ − a′ < 1/2 and α + b < 1.

        """
        nested = ZERO < self.a_prime < self.a < HALF < self.b < self.b_prime < ONE
        narrow = self.b_prime - self.a_prime < HALF and self.alpha + self.b < ONE
        if not (nested and narrow):
            error_message = ERROR_INVALID_BUMP.format(
                (self.a_prime, self.a, self.b, self.b_prime, self.alpha)
            )
            raise InvalidBumpError(error_message)


@dataclass(frozen=True)
class BookkeepingRow:
    """Intervals Tₘ, T′ₘ and Fₘ(T′ₘ) at one m."""

    m: int
    t: Interval
    t_prime: Interval
    moved: Interval


@dataclass(frozen=True)
class MatherData:
    """The generators F̃, G̃, h, r, f̃ and the checked interval bookkeeping."""

    params: MatherParams
    h: PLMap
    r: PLMap
    f_tilde: PLMap
    big_f: GPLMap
    big_g: GPLMap
    f_seq: MapSequence
    g_seq: MapSequence
    suffix: str = ""
    bookkeeping: tuple[BookkeepingRow, ...] = ()

    @property
    def m0(self) -> int:
        """The offset m₀."""
        return self.params.m0

    @property
    def generators(self) -> dict[str, Homeo]:
        """The generating set 𝒢 by name."""
        return {
            self.name("F"): self.big_f,
            self.name("G"): self.big_g,
            self.name("h"): self.h,
            self.name("r"): self.r,
            self.name("f"): self.f_tilde,
        }

    def name(self, base: str) -> str:
        """Generator name carrying this instance's suffix.

        Returns:
            str: The name.

        """
        return f"{base}{self.suffix}"

    def pull(self, x: Fraction, m: int, offset: int = 0) -> Fraction:
        """Apply h^{-(offset+m)} and then r⁻ᵐ.

        Returns:
            Fraction: r⁻ᵐh^{-(offset+m)}(x).

        """
        for _ in range(offset + m):
            x = evaluate_inverse(self.h, x)
        for _ in range(m):
            x = evaluate_inverse(self.r, x)
        return x

    def f_m_at(self, m: int, x: Fraction) -> Fraction:
        """Evaluate Fₘ = r⁻ᵐh⁻ᵐ f̃ hᵐrᵐ at a point.

        Returns:
            Fraction: Fₘ(x).

        """
        for _ in range(m):
            x = evaluate(self.r, x)
        for _ in range(m):
            x = evaluate(self.h, x)
        return self.pull(evaluate(self.f_tilde, x), m)

    def f_m(self, m: int) -> PLMap:
        """Fₘ as a PL map.

        Returns:
            PLMap: r⁻ᵐh⁻ᵐ f̃ hᵐrᵐ.

        """
        c_m = compose(power(self.r, -m), power(self.h, -m))
        return compose(c_m, compose(self.f_tilde, invert(c_m)))

    def t(self, m: int) -> Interval:
        """Tₘ = [r⁻ᵐh⁻ᵐ(a′), r⁻ᵐh⁻ᵐ(b′)].

        Returns:
            Interval: Tₘ.

        """
        return Interval(
            self.pull(self.params.a_prime, m), self.pull(self.params.b_prime, m)
        )

    def t_prime(self, m: int) -> Interval:
        """T′ₘ = [r⁻ᵐh^{-m₀-m}(a), r⁻ᵐh^{-m₀-m}(b)].

        Returns:
            Interval: T′ₘ.

        """
        return Interval(
            self.pull(self.params.a, m, self.m0), self.pull(self.params.b, m, self.m0)
        )


def _accumulating_map(
    params: MatherParams, r: PLMap, h: PLMap, pieces: MapSequence
) -> GPLMap:
    family = MapFamily(
        limit=ZERO,
        direction=Direction.FROM_ABOVE,
        transport=Transport(outer=r, inner=h, offset=params.m0),
        core_hull=params.core,
        pieces=pieces,
    )
    return GPLMap(families=(family,))


def check_bookkeeping(data: MatherData, m_max: int) -> tuple[BookkeepingRow, ...]:
    """Check the closed form of Tₘ and both disjointness claims for m ≤ m_max.

    Returns:
        tuple[BookkeepingRow, ...]: One row per m.

    Raises:
        IdentityFailedError: If Tₘ differs from its closed form or T′ₘ ⊄ Tₘ.
        DisjointnessFailedError: If Tₘ₊₁ meets Tₘ or T′ₘ meets Fₘ(T′ₘ).

    """
    a_prime, b_prime = data.params.a_prime, data.params.b_prime
    rows: list[BookkeepingRow] = []
    current = data.t(1)
    for m in range(1, m_max + 1):
        closed = Interval(
            mather_closed_form(a_prime, m), mather_closed_form(b_prime, m)
        )
        if current != closed:
            raise _fail(f"closed form of T_{m}", (current, closed))
        following = data.t(m + 1)
        _require_disjoint(following, current, m)
        t_prime = data.t_prime(m)
        _require_inside(t_prime, current, f"T'_{m} in T_{m}")
        moved = Interval(data.f_m_at(m, t_prime.lo), data.f_m_at(m, t_prime.hi))
        _require_disjoint(t_prime, moved, m)
        rows.append(BookkeepingRow(m=m, t=current, t_prime=t_prime, moved=moved))
        current = following
    return tuple(rows)


def mather_setup(
    params: MatherParams,
    f_seq: MapSequence,
    g_seq: MapSequence,
    m_max: int = MATHER_BOOKKEEPING_BOUND,
    suffix: str = "",
    logger: Logger | None = None,
) -> MatherData:
    """Build F̃ and G̃ from two piece sequences supported in [a, b].

    F̃ restricted to T′ₘ is r⁻ᵐh^{-m₀-m} fₘ h^{m₀+m}rᵐ and F̃ is the identity
    elsewhere; G̃ is built the same way from gₘ.

    Args:
        params (MatherParams): The interval layout and α.
        f_seq (MapSequence): The pieces fₘ.
        g_seq (MapSequence): The pieces gₘ.
        m_max (int): Bound for the interval bookkeeping.
        suffix (str): Suffix distinguishing generator names between instances.
        logger (Logger | None): Optional logger.

    Returns:
        MatherData: The generators and the checked bookkeeping.

    Raises:
        InvalidBumpError: If the layout is not normalized.

    """
    params.check()
    h = mather_h(params.a_prime, params.b_prime)
    r = mather_r()
    data = MatherData(
        params=params,
        h=h,
        r=r,
        f_tilde=bump(params.a_prime, params.a, params.b, params.b_prime, params.alpha),
        big_f=_accumulating_map(params, r, h, f_seq),
        big_g=_accumulating_map(params, r, h, g_seq),
        f_seq=f_seq,
        g_seq=g_seq,
        suffix=suffix,
    )
    data = replace(data, bookkeeping=check_bookkeeping(data, m_max))
    if logger is not None:
        logger.info("Mather bookkeeping holds", extra={"m0": data.m0, "m_max": m_max})
    return data


def rank_n_pieces(n: int, core: Interval) -> tuple[MapSequence, MapSequence]:
    """Overlapping rank n piece sequences supported in the core.

    Returns:
        tuple[MapSequence, MapSequence]: (fₘ) cycling through two maps and a
            constant (gₘ).

    """
    width = core.length
    first = perturbation(n, Interval(core.lo, core.lo + width / 2))
    third = perturbation(n, Interval(core.lo + width / 2, core.hi))
    second = perturbation(n, Interval(core.lo, core.lo + 5 * width / 8))
    return CyclicMaps((first, third)), ConstantMap(second)


def standard_mather(n: int, m_max: int = MATHER_BOOKKEEPING_BOUND) -> MatherData:
    """Mather data with the default layout and rank n pieces.

    Returns:
        MatherData: The checked data.

    """
    params = MatherParams()
    f_seq, g_seq = rank_n_pieces(n, params.core)
    return mather_setup(params, f_seq, g_seq, m_max)


@dataclass(frozen=True)
class CommutatorRow:
    """Word Hₘ = [fₘ, gₘ] over the five generators."""

    m: int
    letter_count: int
    raw_count: int
    bound: int
    verified: bool
    windows_checked: int
    samples_checked: int


def mather_word(data: MatherData, m: int) -> tuple[Word, int]:
    """Word Hₘ = h^{m₀+m}rᵐ AₘBₘCₘ r⁻ᵐh^{-m₀-m}.

    Here Fₘ = r⁻ᵐh⁻ᵐ f̃ hᵐrᵐ, Aₘ = [F̃, Fₘ], Bₘ = [G̃, Fₘ] and
    Cₘ = [F̃⁻¹G̃⁻¹, Fₘ].

    Returns:
        tuple[Word, int]: The freely reduced word and the letter count before
            reduction across the factors.

    """
    gens = {base: Word.generator(data.name(base), target) for base, target in zip(
        ("F", "G", "h", "r", "f"), data.generators.values(), strict=True
    )}
    big_f, big_g, h, r = gens["F"], gens["G"], gens["h"], gens["r"]
    f_m = r**-m * h**-m * gens["f"] * h**m * r**m
    a_m = word_commutator(big_f, f_m)
    b_m = word_commutator(big_g, f_m)
    c_m = word_commutator(big_f.inverse() * big_g.inverse(), f_m)
    outer = h ** (data.m0 + m) * r**m
    raw = 2 * outer.letter_count + sum(w.letter_count for w in (a_m, b_m, c_m))
    return outer * a_m * b_m * c_m * outer.inverse(), raw


def _verify_commutator(
    data: MatherData, word: Word, m: int, sample_count: int, seed: int
) -> tuple[int, int]:
    f_m, g_m = data.f_seq.at(m), data.g_seq.at(m)
    core = data.params.core
    label = f"H_{m} = [f_{m}, g_{m}]"
    if f_m.is_pl and g_m.is_pl:
        expected = commutator(to_pl(f_m), to_pl(g_m))
        actual = restrict_pl(word, core)
        if actual != restrict(expected, core):
            raise _fail(label, (actual, expected))
        return 1, 0
    expected_word = word_commutator(
        Word.generator("f_m", f_m), Word.generator("g_m", g_m)
    )
    windows = sorted(
        {*pl_windows(f_m, WINDOWS_PER_FAMILY), *pl_windows(g_m, WINDOWS_PER_FAMILY)},
        key=lambda w: (w.lo, w.hi),
    )
    checked = _compare_on_windows(word, expected_word, windows, label)
    samples = _compare_on_samples(
        word, expected_word, sample_rationals(core, sample_count, seed), label
    )
    return checked, samples


def mather_commutators(
    data: MatherData,
    m: int,
    verify: bool = True,
    sample_count: int = DEFAULT_SAMPLE_COUNT,
    seed: int = DEFAULT_SEED,
) -> tuple[Word, CommutatorRow]:
    """Build Hₘ, audit its letter count and check Hₘ = [fₘ, gₘ].

    Args:
        data (MatherData): The generators.
        m (int): The index, at least 1.
        verify (bool): Whether to check the identity on [a, b].
        sample_count (int): Sample points for non-PL pieces.
        seed (int): Sampling seed.

    Returns:
        tuple[Word, CommutatorRow]: The word and its audit row.

    Raises:
        BoundExceededError: If the reduced word is longer than kₘ.
        IdentityFailedError: If Hₘ differs from [fₘ, gₘ].

    """
    word, raw = mather_word(data, m)
    bound = mather_bound(m, data.m0)
    if word.letter_count > bound:
        error_message = ERROR_BOUND_EXCEEDED.format(word.letter_count, bound, m)
        raise BoundExceededError(error_message, count=word.letter_count, m=m)
    windows, samples = (
        _verify_commutator(data, word, m, sample_count, seed) if verify else (0, 0)
    )
    return word, CommutatorRow(
        m=m,
        letter_count=word.letter_count,
        raw_count=raw,
        bound=bound,
        verified=verify,
        windows_checked=windows,
        samples_checked=samples,
    )


# Distortion report


@dataclass(frozen=True)
class RatioRow:
    """The ratio 2kₘ/(iₘ+1) bounding the word length of f^{iₘ+1} per power."""

    m: int
    bound: int
    power: int
    ratio: Fraction


@dataclass(frozen=True)
class VerificationRow:
    """All checks behind the bound at one m."""

    m: int
    index: int
    diagonal: DiagonalReport
    first: CommutatorRow
    second: CommutatorRow
    letter_count: int


@dataclass(frozen=True)
class DistortionReport:
    """Undistortion at level n and the distortion bound at level n + 1."""

    n: int
    m0: int
    certificate: CertificateReport
    ratios: tuple[RatioRow, ...]
    verified: tuple[VerificationRow, ...]


def ratio_table(
    m_max: int, m0: int, index_power: int = DIAGONAL_INDEX_POWER
) -> tuple[RatioRow, ...]:
    """Rows (m, kₘ, iₘ+1, 2kₘ/(iₘ+1)) with iₘ = m^index_power.

    Returns:
        tuple[RatioRow, ...]: The table for 1 ≤ m ≤ m_max.

    """
    return tuple(
        RatioRow(
            m=m,
            bound=mather_bound(m, m0),
            power=m**index_power + 1,
            ratio=Fraction(2 * mather_bound(m, m0), m**index_power + 1),
        )
        for m in range(1, m_max + 1)
    )


def _check_ratio_tail(rows: Sequence[RatioRow]) -> None:
    tail = [row for row in rows if row.m >= RATIO_DECREASING_FROM]
    for left, right in zip(tail, tail[1:], strict=False):
        if not right.ratio < left.ratio:
            raise _fail(f"ratio decreasing at m = {right.m}", (left, right))
    if len(tail) > 1 and not tail[-1].ratio < tail[0].ratio / 2:
        raise _fail("ratio halves along the table", (tail[0], tail[-1]))


def distortion_report(
    n: int,
    ratio_m_max: int = DEFAULT_RATIO_M_MAX,
    verify_m_max: int = DEFAULT_VERIFY_M_MAX,
    index_power: int = DIAGONAL_INDEX_POWER,
    sample_count: int = DEFAULT_SAMPLE_COUNT,
    seed: int = DEFAULT_SEED,
    threads: int = THREADS,
    logger: Logger | None = None,
) -> DistortionReport:
    """Run the full pipeline for f = [f₁, t] at rank level n.

    The entries [a, b] and [c, d] of the factorization of f^{iₘ+1} feed two
    Mather instances. For every m ≤ verify_m_max the factorization, both
    commutator words and the total letter count ≤ 2kₘ are checked; the ratio
    table runs to ratio_m_max.

    Args:
        n (int): The rank level.
        ratio_m_max (int): Rows of the ratio table.
        verify_m_max (int): Indices checked through the whole pipeline.
        index_power (int): iₘ = m^index_power.
        sample_count (int): Sample points for non-PL checks.
        seed (int): Sampling seed.
        threads (int): Worker bound for the per-m checks.
        logger (Logger | None): Optional logger.

    Returns:
        DistortionReport: The certificate, the ratio table and the checks.

    Raises:
        BoundExceededError: If the words are longer than 2kₘ.

    """
    setup = element_setup(n, sample_count=sample_count, seed=seed, logger=logger)
    certificate = certificate_undistorted(
        setup.f1, n, CERTIFICATE_K_MAX, setup.layout, logger
    )
    params = MatherParams()
    first = mather_setup(
        params,
        DiagonalEntry(n, "a", index_power),
        DiagonalEntry(n, "b", index_power),
        m_max=verify_m_max,
    )
    second = mather_setup(
        params,
        DiagonalEntry(n, "c", index_power),
        DiagonalEntry(n, "d", index_power),
        m_max=verify_m_max,
        suffix="_2",
    )

    def verify(m: int) -> VerificationRow:
        index = m**index_power
        diagonal = diagonal_trick(setup, index, sample_count, seed)
        word_ab, row_ab = mather_commutators(first, m, True, sample_count, seed)
        word_cd, row_cd = mather_commutators(second, m, True, sample_count, seed)
        total = (word_ab * word_cd).letter_count
        limit = 2 * mather_bound(m, params.m0)
        if total > limit:
            error_message = ERROR_BOUND_EXCEEDED.format(total, limit, m)
            raise BoundExceededError(error_message, count=total, m=m)
        return VerificationRow(
            m=m,
            index=index,
            diagonal=diagonal,
            first=row_ab,
            second=row_cd,
            letter_count=total,
        )

    with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        verified = tuple(executor.map(verify, range(1, verify_m_max + 1)))
    ratios = ratio_table(ratio_m_max, params.m0, index_power)
    _check_ratio_tail(ratios)
    if logger is not None:
        logger.info("Distortion report complete", extra={"n": n, "m0": params.m0})
    return DistortionReport(
        n=n, m0=params.m0, certificate=certificate, ratios=ratios, verified=verified
    )


@dataclass(frozen=True)
class BilipschitzReport:
    """Slope norms along powers of f and along truncations of the generator G̃."""

    fixed_point_slope: Fraction
    element_norms: tuple[tuple[int, Fraction], ...]
    generator_norms: tuple[tuple[int, Fraction], ...]
    grows: bool


def bilipschitz_report(
    setup: ElementSetup,
    k_max: int = BILIPSCHITZ_K_MAX,
    depth_max: int = BILIPSCHITZ_DEPTH_MAX,
    depth: int = INSPECTION_DEPTH,
) -> BilipschitzReport:
    """Track the Lipschitz length function on f^k and on G̃ built from the dᵢ.

    Near a fixed point on a segment of slope s, f^k has slope s^k, so the slope
    norm of f^k is checked against the k-th power of the fixed-point slope of
    f. The second table truncates the generator G̃ of the Mather instance fed
    with the entries d at growing depth M; `grows` records whether its slope
    norm increases strictly with M.

    Args:
        setup (ElementSetup): The element f.
        k_max (int): Largest power of f.
        depth_max (int): Largest truncation depth of G̃.
        depth (int): Truncation depth for the powers of f.

    Returns:
        BilipschitzReport: Both tables.

    Raises:
        IdentityFailedError: If the norm of f^k is below the fixed-point bound.

    """
    base = gpl_fixed_point_slope(setup.f)
    element_norms: list[tuple[int, Fraction]] = []
    for k in range(1, k_max + 1):
        norm = slope_norm_truncated(gpl_power(setup.f, k), depth)
        if norm < base**k:
            raise _fail(f"Lip(f^{k}) >= s^{k} at a fixed point", (norm, base**k))
        element_norms.append((k, norm))
    data = mather_setup(
        MatherParams(),
        DiagonalEntry(setup.n, "c"),
        DiagonalEntry(setup.n, "d"),
        m_max=depth_max,
        suffix="_2",
    )
    generator_norms = tuple(
        (m, slope_norm_truncated(data.big_g, m)) for m in range(1, depth_max + 1)
    )
    grows = all(left[1] < right[1] for left, right in pairwise(generator_norms))
    return BilipschitzReport(
        fixed_point_slope=base,
        element_norms=tuple(element_norms),
        generator_norms=generator_norms,
        grows=grows,
    )


CONSTRUCTIONS = ("mather-f", "mather-g", "first-factor", "element", "perturbation")


def construction_map(name: str, n: int) -> GPLMap:
    """A named map of the pipeline at rank level n.

    Returns:
        GPLMap: The map.

    Raises:
        ParseError: If the name is unknown.

    """
    match name:
        case "mather-f":
            return standard_mather(n, m_max=INSPECTION_DEPTH).big_f
        case "mather-g":
            return standard_mather(n, m_max=INSPECTION_DEPTH).big_g
        case "first-factor":
            return _element_setup(n, Interval(*DIAGONAL_J)).f1
        case "element":
            return _element_setup(n, Interval(*DIAGONAL_J)).f
        case "perturbation":
            return perturbation(n, Interval(MATHER_A, MATHER_B))
        case _:
            error_message = ERROR_PARSE.format("construction", name)
            raise ParseError(error_message)
