"""Exact canonical-form algebra for piecewise-linear homeomorphisms of [0, 1].

A `PLMap` is stored as its interior breakpoints and their images; the graph
points (0, 0) and (1, 1) are implicit. Canonical form (no three collinear
consecutive graph points) makes equality structural, so dataclass equality
and hashing are the group's equality and hashing.

>>> r = mather_r()
>>> evaluate(r, Fraction(1, 4))
Fraction(1, 2)
>>> slope_norm(r)
Fraction(5, 2)
"""

from bisect import bisect_left, bisect_right
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Any

from .constants import (
    ERROR_INVALID_BUMP,
    ERROR_NOT_MONOTONE,
    ERROR_OUT_OF_RANGE,
    ERROR_PARSE,
    MATHER_R_KNEE,
)
from .exceptions import (
    InvalidBumpError,
    NotMonotoneError,
    OutOfRangeError,
    ParseError,
)

type Rational = Fraction
type RationalLike = Fraction | int | str
type Point = tuple[Fraction, Fraction]

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)


def to_rational(value: RationalLike) -> Fraction:
    """Coerce an int, Fraction or "p/q" string to a Fraction.

    Args:
        value (RationalLike): The value to coerce.

    Returns:
        Fraction: The exact rational.

    Raises:
        ParseError: If a string does not parse as a rational.

    """
    if isinstance(value, str):
        return parse_rational(value)
    return Fraction(value)


def parse_rational(text: str) -> Fraction:
    """Parse a rational serialized as "p/q" (or a bare integer "p").

    Args:
        text (str): The serialized rational.

    Returns:
        Fraction: The parsed value.

    Raises:
        ParseError: If the text is not a rational or not in lowest terms.

    >>> parse_rational("3/8")
    Fraction(3, 8)
    """
    numerator, _, denominator = text.strip().partition("/")
    try:
        value = Fraction(int(numerator), int(denominator or "1"))
    except (ValueError, ZeroDivisionError) as e:
        error_message = ERROR_PARSE.format(repr(text), e)
        raise ParseError(error_message) from e
    if denominator and (
        value.numerator != int(numerator) or value.denominator != int(denominator)
    ):
        error_message = ERROR_PARSE.format(repr(text), "not in lowest terms")
        raise ParseError(error_message)
    return value


def format_rational(value: Fraction) -> str:
    """Serialize a rational as "p/q" in lowest terms.

    Returns:
        str: The serialized value.

    >>> format_rational(Fraction(6, 16))
    '3/8'
    """
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class Interval:
    """A closed interval [lo, hi] with exact endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        """Validate the endpoint order.

        Raises:
            NotMonotoneError: If lo > hi.

        """
        if self.lo > self.hi:
            error_message = ERROR_NOT_MONOTONE.format((self.lo, self.hi))
            raise NotMonotoneError(error_message)

    @property
    def length(self) -> Fraction:
        """Length of the interval."""
        return self.hi - self.lo

    def contains(self, x: Fraction) -> bool:
        """Check whether x lies in the closed interval.

        Returns:
            bool: True if lo <= x <= hi.

        """
        return self.lo <= x <= self.hi

    def contains_interval(self, other: "Interval") -> bool:
        """Check whether other is a subset of this interval.

        Returns:
            bool: True if other is contained in self.

        """
        return self.lo <= other.lo and other.hi <= self.hi

    def meets(self, other: "Interval") -> bool:
        """Check whether two closed intervals intersect.

        Returns:
            bool: True if the intersection is nonempty.

        """
        return self.lo <= other.hi and other.lo <= self.hi

    def interior_meets(self, other: "Interval") -> bool:
        """Check whether two intervals overlap in more than an endpoint.

        Returns:
            bool: True if the open interiors intersect.

        """
        return self.lo < other.hi and other.lo < self.hi

    def image(self, f: Callable[[Fraction], Fraction]) -> "Interval":
        """Image under an increasing map.

        Returns:
            Interval: [f(lo), f(hi)].

        """
        return Interval(f(self.lo), f(self.hi))

    def to_json(self) -> list[str]:
        """Serialize as a pair of "p/q" strings.

        Returns:
            list[str]: The endpoints.

        """
        return [format_rational(self.lo), format_rational(self.hi)]

    @classmethod
    def from_json(cls, doc: Sequence[str]) -> "Interval":
        """Decode a pair of "p/q" strings.

        Returns:
            Interval: The decoded interval.

        """
        return cls(parse_rational(doc[0]), parse_rational(doc[1]))


@dataclass(frozen=True)
class EndpointData:
    """Slopes at 0+ and 1-; the endpoint homomorphism stored multiplicatively."""

    slope_at_zero: Fraction
    slope_at_one: Fraction

    @property
    def in_kernel(self) -> bool:
        """Whether both endpoint slopes are 1."""
        return self.slope_at_zero == ONE and self.slope_at_one == ONE


def _is_collinear(p: Point, q: Point, s: Point) -> bool:
    return (q[1] - p[1]) * (s[0] - q[0]) == (s[1] - q[1]) * (q[0] - p[0])


def _prune_collinear(points: Iterable[Point]) -> list[Point]:
    kept: list[Point] = []
    for point in points:
        while len(kept) > 1 and _is_collinear(kept[-2], kept[-1], point):
            kept.pop()
        kept.append(point)
    return kept


def _check_increasing(points: Sequence[Point]) -> None:
    for (x0, y0), (x1, y1) in zip(points, points[1:], strict=False):
        if not (x0 < x1 and y0 < y1):
            error_message = ERROR_NOT_MONOTONE.format(((x0, y0), (x1, y1)))
            raise NotMonotoneError(error_message)


def _segment_value(
    xs: Sequence[Fraction], ys: Sequence[Fraction], x: Fraction
) -> Fraction:
    i = min(max(bisect_right(xs, x) - 1, 0), len(xs) - 2)
    x0, x1, y0, y1 = xs[i], xs[i + 1], ys[i], ys[i + 1]
    return y0 + (x - x0) * (y1 - y0) / (x1 - x0)


@dataclass(frozen=True)
class PLMap:
    """Canonical piecewise-linear homeomorphism of [0, 1]."""

    breakpoints: tuple[Fraction, ...] = ()
    values: tuple[Fraction, ...] = ()

    def __post_init__(self) -> None:
        """Validate canonical form.

        Raises:
            NotMonotoneError: If the graph is not strictly increasing or not
                canonical.

        """
        points = self.graph
        _check_increasing(points)
        if len(_prune_collinear(points)) != len(points):
            error_message = ERROR_NOT_MONOTONE.format("collinear breakpoints")
            raise NotMonotoneError(error_message)

    @cached_property
    def xs(self) -> tuple[Fraction, ...]:
        """Abscissae of the graph points including 0 and 1."""
        return (ZERO, *self.breakpoints, ONE)

    @cached_property
    def ys(self) -> tuple[Fraction, ...]:
        """Ordinates of the graph points including 0 and 1."""
        return (ZERO, *self.values, ONE)

    @property
    def graph(self) -> list[Point]:
        """Graph points from (0, 0) to (1, 1)."""
        return list(zip(self.xs, self.ys, strict=True))

    @cached_property
    def slopes(self) -> tuple[Fraction, ...]:
        """Slope of each segment, left to right."""
        return tuple(
            (self.ys[i + 1] - self.ys[i]) / (self.xs[i + 1] - self.xs[i])
            for i in range(len(self.xs) - 1)
        )

    @property
    def is_identity(self) -> bool:
        """Whether this is the identity map."""
        return not self.breakpoints

    def __call__(self, x: Fraction) -> Fraction:
        """Evaluate the map at x.

        Returns:
            Fraction: f(x).

        """
        return evaluate(self, x)


IDENTITY = PLMap()


def _from_graph(points: Iterable[Point]) -> PLMap:
    pruned = _prune_collinear(points)
    interior = pruned[1:-1]
    return PLMap(
        breakpoints=tuple(x for x, _ in interior),
        values=tuple(y for _, y in interior),
    )


def make_pl(points: Iterable[tuple[RationalLike, RationalLike]]) -> PLMap:
    """Build the canonical PL homeomorphism through the given graph points.

    Args:
        points (Iterable[tuple[RationalLike, RationalLike]]): Graph points in
            increasing order; (0, 0) and (1, 1) are added when missing.

    Returns:
        PLMap: The canonical map with collinear interior points removed.

    Raises:
        OutOfRangeError: If a coordinate leaves [0, 1].

    >>> make_pl([(Fraction(1, 4), Fraction(1, 4))]).is_identity
    True
    >>> make_pl([(Fraction(1, 2), Fraction(1, 4))]).slopes
    (Fraction(1, 2), Fraction(3, 2))
    """
    graph = [(to_rational(x), to_rational(y)) for x, y in points]
    for coordinate in (c for point in graph for c in point):
        if not ZERO <= coordinate <= ONE:
            error_message = ERROR_OUT_OF_RANGE.format(coordinate)
            raise OutOfRangeError(error_message)
    if not graph or graph[0] != (ZERO, ZERO):
        graph.insert(0, (ZERO, ZERO))
    if graph[-1] != (ONE, ONE):
        graph.append((ONE, ONE))
    _check_increasing(graph)
    return _from_graph(graph)


def _check_unit(x: Fraction) -> None:
    if not ZERO <= x <= ONE:
        error_message = ERROR_OUT_OF_RANGE.format(x)
        raise OutOfRangeError(error_message)


def evaluate(f: PLMap, x: Fraction) -> Fraction:
    """Evaluate f at x by affine interpolation.

    Args:
        f (PLMap): The map.
        x (Fraction): A point of [0, 1].

    Returns:
        Fraction: The exact value f(x).

    """
    _check_unit(x)
    return _segment_value(f.xs, f.ys, x)


def evaluate_inverse(f: PLMap, y: Fraction) -> Fraction:
    """Evaluate the inverse of f at y without building the inverse.

    Returns:
        Fraction: The unique x with f(x) = y.

    """
    _check_unit(y)
    return _segment_value(f.ys, f.xs, y)


def compose(f: PLMap, g: PLMap) -> PLMap:
    """Compose two maps.

    Args:
        f (PLMap): The outer map.
        g (PLMap): The inner map.

    Returns:
        PLMap: The canonical form of f∘g.

    """
    if g.is_identity:
        return f
    if f.is_identity:
        return g
    xs = sorted({*g.breakpoints, *(evaluate_inverse(g, p) for p in f.breakpoints)})
    return _from_graph([
        (ZERO, ZERO),
        *((x, evaluate(f, evaluate(g, x))) for x in xs),
        (ONE, ONE),
    ])


def invert(f: PLMap) -> PLMap:
    """Invert a map by reflecting its graph.

    Returns:
        PLMap: The canonical inverse.

    """
    return PLMap(breakpoints=f.values, values=f.breakpoints)


def equals(f: PLMap, g: PLMap) -> bool:
    """Check equality of two maps.

    Returns:
        bool: True if f and g are the same homeomorphism.

    """
    return f == g


def commutator(f: PLMap, g: PLMap) -> PLMap:
    """Compute [f, g] = f g f⁻¹ g⁻¹.

    Returns:
        PLMap: The canonical commutator.

    """
    return compose(compose(f, g), compose(invert(f), invert(g)))


@lru_cache(maxsize=4096)
def power(f: PLMap, k: int) -> PLMap:
    """Compute f**k for any integer k by repeated squaring.

    Returns:
        PLMap: The k-th power of f.

    """
    if k < 0:
        return power(invert(f), -k)
    if k == 0 or f.is_identity:
        return IDENTITY
    if k == 1:
        return f
    half = power(f, k // 2)
    squared = compose(half, half)
    return compose(f, squared) if k % 2 else squared


def support_hull(f: PLMap) -> Interval | None:
    """Smallest closed interval containing every point moved by f.

    Returns:
        Interval | None: The hull, or None for the identity.

    """
    moved = [
        i
        for i in range(len(f.xs) - 1)
        if f.ys[i] != f.xs[i] or f.ys[i + 1] != f.xs[i + 1]
    ]
    if not moved:
        return None
    return Interval(f.xs[moved[0]], f.xs[moved[-1] + 1])


def eta(f: PLMap) -> EndpointData:
    """Endpoint slopes of f, the multiplicative form of the endpoint map.

    Returns:
        EndpointData: Slopes at 0+ and at 1-.

    """
    return EndpointData(slope_at_zero=f.slopes[0], slope_at_one=f.slopes[-1])


def slope_norm(f: PLMap) -> Fraction:
    """Largest of every slope and every inverse slope of f.

    The slope length function is the logarithm of this value; comparisons are
    made on the rational itself.

    Returns:
        Fraction: A rational >= 1.

    """
    return max(max(s, 1 / s) for s in f.slopes)


def fixed_point_slope(f: PLMap, avoid: Iterable[Interval] = ()) -> Fraction:
    """Largest slope or inverse slope on a segment holding a fixed point.

    A segment from (x₀, y₀) to (x₁, y₁) holds a fixed point when
    (y₀ − x₀)(y₁ − x₁) ≤ 0. Near that point fᵏ has slope sᵏ, so the value
    raised to the k-th power bounds slope_norm(fᵏ) from below.

    Args:
        f (PLMap): The map.
        avoid (Iterable[Interval]): Segments whose interior meets one of these
            intervals are skipped.

    Returns:
        Fraction: A rational >= 1; 1 when no segment qualifies.

    """
    skipped = tuple(avoid)
    best = ONE
    graph = f.graph
    for (x0, y0), (x1, y1), s in zip(graph, graph[1:], f.slopes, strict=False):
        if (y0 - x0) * (y1 - x1) > 0:
            continue
        if any(Interval(x0, x1).interior_meets(part) for part in skipped):
            continue
        best = max(best, s, 1 / s)
    return best


def is_affine_on(f: PLMap, interval: Interval) -> bool:
    """Check that f has no breakpoint inside the open interval.

    Returns:
        bool: True if f is affine on the interval.

    """
    i = bisect_right(f.breakpoints, interval.lo)
    return i == len(f.breakpoints) or f.breakpoints[i] >= interval.hi


def bump(
    a_prime: Fraction,
    a: Fraction,
    b: Fraction,
    b_prime: Fraction,
    alpha: Fraction,
) -> PLMap:
    """Build the kernel element that translates [a, b] by alpha.

    Args:
        a_prime (Fraction): Left end of the support.
        a (Fraction): Left end of the translated core.
        b (Fraction): Right end of the translated core.
        b_prime (Fraction): Right end of the support.
        alpha (Fraction): The translation length.

    Returns:
        PLMap: The map through (a′, a′), (a, a+α), (b, b+α), (b′, b′).

    Raises:
        InvalidBumpError: If 0 < a′ < a < b < b+α < b′ < 1 fails.

    """
    if not ZERO < a_prime < a < b < b + alpha < b_prime < ONE:
        error_message = ERROR_INVALID_BUMP.format((a_prime, a, b, b_prime, alpha))
        raise InvalidBumpError(error_message)
    return make_pl([
        (a_prime, a_prime),
        (a, a + alpha),
        (b, b + alpha),
        (b_prime, b_prime),
    ])


def mather_h(a_prime: Fraction, b_prime: Fraction) -> PLMap:
    """Build h whose inverse is x/2 + 1/4 on [a′, b′] and affine elsewhere.

    Returns:
        PLMap: The map h.

    Raises:
        OutOfRangeError: If 0 < a′ < b′ < 1 fails.

    """
    if not ZERO < a_prime < b_prime < ONE:
        error_message = ERROR_OUT_OF_RANGE.format((a_prime, b_prime))
        raise OutOfRangeError(error_message)
    quarter = Fraction(1, 4)
    h_inverse = make_pl([
        (a_prime, a_prime / 2 + quarter),
        (b_prime, b_prime / 2 + quarter),
    ])
    return invert(h_inverse)


def mather_r() -> PLMap:
    """Build r, equal to 2x on [0, 3/8] and affine on [3/8, 1].

    Returns:
        PLMap: The map r.

    """
    return make_pl([(MATHER_R_KNEE, 2 * MATHER_R_KNEE)])


def affine_embedding(source: Interval, target: Interval) -> PLMap:
    """Build a PL homeomorphism mapping source affinely onto target.

    Both intervals must lie in the open unit interval.

    Returns:
        PLMap: The map through (source.lo, target.lo) and (source.hi, target.hi).

    """
    return make_pl([(source.lo, target.lo), (source.hi, target.hi)])


@dataclass(frozen=True)
class PLSegment:
    """Increasing piecewise-linear map from a closed interval onto another."""

    xs: tuple[Fraction, ...]
    ys: tuple[Fraction, ...]

    @property
    def domain(self) -> Interval:
        """The interval the map is defined on."""
        return Interval(self.xs[0], self.xs[-1])

    @property
    def codomain(self) -> Interval:
        """The image interval."""
        return Interval(self.ys[0], self.ys[-1])

    def evaluate(self, x: Fraction) -> Fraction:
        """Evaluate at a point of the domain.

        Returns:
            Fraction: The image of x.

        Raises:
            OutOfRangeError: If x is outside the domain.

        """
        if not self.domain.contains(x):
            error_message = ERROR_OUT_OF_RANGE.format(x)
            raise OutOfRangeError(error_message)
        if len(self.xs) == 1:
            return self.ys[0]
        return _segment_value(self.xs, self.ys, x)

    def evaluate_inverse(self, y: Fraction) -> Fraction:
        """Evaluate the inverse at a point of the codomain.

        Returns:
            Fraction: The preimage of y.

        """
        return self.inverse().evaluate(y)

    def inverse(self) -> "PLSegment":
        """Reflect the graph.

        Returns:
            PLSegment: The inverse map from the codomain onto the domain.

        """
        return PLSegment(xs=self.ys, ys=self.xs)

    def then(self, outer: "PLSegment") -> "PLSegment":
        """Compose outer∘self; outer's domain must equal self's codomain.

        Returns:
            PLSegment: The composite map.

        Raises:
            OutOfRangeError: If the domains do not match.

        """
        if outer.domain != self.codomain:
            error_message = ERROR_OUT_OF_RANGE.format((outer.domain, self.codomain))
            raise OutOfRangeError(error_message)
        cuts = {*self.xs, *(self.evaluate_inverse(y) for y in outer.xs)}
        return make_segment((x, outer.evaluate(self.evaluate(x))) for x in sorted(cuts))

    def is_identity(self) -> bool:
        """Whether the map is x ↦ x on its domain.

        Returns:
            bool: True for an identity segment.

        """
        return self.xs == self.ys


def make_segment(points: Iterable[Point]) -> PLSegment:
    """Build a canonical segment map from increasing graph points.

    Returns:
        PLSegment: The map with collinear interior points removed.

    """
    graph = list(points)
    _check_increasing(graph)
    pruned = _prune_collinear(graph)
    return PLSegment(
        xs=tuple(x for x, _ in pruned), ys=tuple(y for _, y in pruned)
    )


def identity_segment(interval: Interval) -> PLSegment:
    """Identity map on an interval.

    Returns:
        PLSegment: x ↦ x on the interval.

    """
    if interval.lo == interval.hi:
        return PLSegment(xs=(interval.lo,), ys=(interval.lo,))
    return PLSegment(xs=(interval.lo, interval.hi), ys=(interval.lo, interval.hi))


def restrict(f: PLMap, interval: Interval) -> PLSegment:
    """Restrict f to a closed interval.

    Returns:
        PLSegment: The graph of f over the interval.

    """
    if interval.lo == interval.hi:
        y = evaluate(f, interval.lo)
        return PLSegment(xs=(interval.lo,), ys=(y,))
    lo_index = bisect_right(f.breakpoints, interval.lo)
    hi_index = bisect_left(f.breakpoints, interval.hi)
    xs = (interval.lo, *f.breakpoints[lo_index:hi_index], interval.hi)
    return make_segment((x, evaluate(f, x)) for x in xs)


def glue_segments(parts: Sequence[PLSegment]) -> PLSegment:
    """Concatenate segment maps whose domains and images abut.

    Returns:
        PLSegment: The glued map.

    Raises:
        NotMonotoneError: If consecutive parts do not abut.

    """
    points: list[Point] = []
    for part in parts:
        for point in zip(part.xs, part.ys, strict=True):
            if points and points[-1] == point:
                continue
            points.append(point)
    return make_segment(points)


def pl_to_json(f: PLMap) -> dict[str, Any]:
    """Serialize a map as its interior graph points.

    Returns:
        dict[str, Any]: {"points": [["p/q", "p/q"], ...]}.

    """
    return {
        "points": [
            [format_rational(x), format_rational(y)]
            for x, y in zip(f.breakpoints, f.values, strict=True)
        ]
    }


def pl_from_json(doc: dict[str, Any]) -> PLMap:
    """Decode and re-canonicalize a serialized map.

    Returns:
        PLMap: The decoded map.

    """
    return make_pl(
        (parse_rational(x), parse_rational(y)) for x, y in doc.get("points", [])
    )
