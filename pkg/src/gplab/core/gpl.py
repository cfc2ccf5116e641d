"""Generalized piecewise-linear homeomorphisms and words over them.

A `GPLMap` is F = scaffold∘φ where the scaffold is a PL map and φ is glued
from accumulating families: on the m-th hull of a family, φ is the family's
m-th piece conjugated by the transport map c_m, and φ is the identity off
every hull. Pieces are themselves `GPLMap`s of lower rank, which gives maps
whose break sets have any finite Cantor–Bendixson rank.

Products of arbitrary maps are kept as freely reduced `Word`s and compared
on restricted intervals and at exact sample points.
"""

from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from itertools import count, pairwise
from typing import Any, Protocol, runtime_checkable

from .cbset import (
    AccumFamily,
    Cardinality,
    Direction,
    Infinite,
    SetExpr,
    Transport,
    finite,
    is_empty,
    iterated_derive,
    nth_derived_cardinality,
    rank,
    register_piece_decoder,
    union,
)
from .cbset import validate as validate_set
from .constants import (
    DEFAULT_FUEL,
    ERROR_FUEL_EXHAUSTED,
    ERROR_MALFORMED_EXPR,
    ERROR_NOT_PL_HERE,
    ERROR_NOT_REPRESENTABLE,
    ERROR_OUT_OF_RANGE,
    ERROR_PARSE,
    ERROR_UNBOUND_GENERATOR,
    INSPECTION_DEPTH,
)
from .exceptions import (
    FuelExhaustedError,
    MalformedExprError,
    NotPiecewiseLinearHereError,
    NotRepresentableError,
    OutOfRangeError,
    ParseError,
    UnboundGeneratorError,
)
from .plcore import (
    IDENTITY,
    ONE,
    ZERO,
    Interval,
    PLMap,
    PLSegment,
    compose,
    evaluate,
    evaluate_inverse,
    fixed_point_slope,
    format_rational,
    glue_segments,
    identity_segment,
    invert,
    is_affine_on,
    parse_rational,
    pl_from_json,
    pl_to_json,
    power,
    restrict,
    slope_norm,
    support_hull,
)


@runtime_checkable
class MapSequence(Protocol):
    """Catalog entry producing the m-th piece of a map family."""

    def at(self, m: int) -> "GPLMap":
        """Piece m in core coordinates."""
        ...

    @property
    def top_rank(self) -> int:
        """Rank of the break sets of cofinally many pieces, -1 if trivial."""
        ...

    def to_json(self) -> dict[str, Any]:
        """Serialize the sequence."""
        ...


@dataclass(frozen=True)
class MapFamily:
    """Pieces c_m∘p_m∘c_m⁻¹ on hulls c_m(core_hull) converging to a limit."""

    limit: Fraction
    direction: Direction
    transport: Transport
    core_hull: Interval
    pieces: MapSequence
    start: int = 1

    @property
    def is_active(self) -> bool:
        """Whether cofinally many pieces differ from the identity."""
        return self.pieces.top_rank >= 0

    def conjugator(self, m: int) -> PLMap:
        """Transport map of piece m.

        Returns:
            PLMap: c_m.

        """
        return self.transport.at(m)

    def hull(self, m: int) -> Interval:
        """Hull of piece m.

        Returns:
            Interval: c_m(core_hull).

        """
        c_m = self.conjugator(m)
        return self.core_hull.image(lambda x: evaluate(c_m, x))

    @property
    def extent(self) -> Interval:
        """Smallest interval containing every hull and the limit."""
        first = self.hull(self.start)
        return Interval(min(first.lo, self.limit), max(first.hi, self.limit))

    def accumulates_in(self, interval: Interval) -> bool:
        """Check whether infinitely many hulls meet the interval.

        Returns:
            bool: True if the limit is approached from inside the interval.

        """
        if self.direction == Direction.FROM_ABOVE:
            return interval.lo <= self.limit < interval.hi
        return interval.lo < self.limit <= interval.hi

    def locate(self, x: Fraction, fuel: int = DEFAULT_FUEL) -> int | None:
        """Index of the hull containing x.

        Returns:
            int | None: The index, or None if x lies in no hull.

        Raises:
            FuelExhaustedError: If more than `fuel` hulls are inspected.

        """
        above = self.direction == Direction.FROM_ABOVE
        if (x <= self.limit) if above else (x >= self.limit):
            return None
        for m in count(self.start):
            if m - self.start >= fuel:
                error_message = ERROR_FUEL_EXHAUSTED.format(fuel, x)
                raise FuelExhaustedError(error_message)
            hull = self.hull(m)
            if hull.contains(x):
                return m
            if (hull.hi < x) if above else (hull.lo > x):
                return None
        return None

    def hulls_meeting(self, interval: Interval, fuel: int = DEFAULT_FUEL) -> list[int]:
        """Indices of the hulls whose interior meets the interval.

        Returns:
            list[int]: The indices in increasing order.

        Raises:
            NotPiecewiseLinearHereError: If the limit is approached inside the
                interval.
            FuelExhaustedError: If more than `fuel` hulls are inspected.

        """
        if self.accumulates_in(interval):
            error_message = ERROR_NOT_PL_HERE.format(interval, self.limit)
            raise NotPiecewiseLinearHereError(error_message)
        above = self.direction == Direction.FROM_ABOVE
        if (self.limit >= interval.hi) if above else (self.limit <= interval.lo):
            return []
        found: list[int] = []
        for m in count(self.start):
            if m - self.start >= fuel:
                error_message = ERROR_FUEL_EXHAUSTED.format(fuel, interval)
                raise FuelExhaustedError(error_message)
            hull = self.hull(m)
            if (hull.hi <= interval.lo) if above else (hull.lo >= interval.hi):
                break
            if hull.interior_meets(interval):
                found.append(m)
        return found

    def transported(self, g: PLMap) -> "MapFamily":
        """Conjugate every piece by g.

        Returns:
            MapFamily: The family with limit g(limit) and transport g∘c_m.

        """
        return replace(
            self, limit=evaluate(g, self.limit), transport=self.transport.after(g)
        )

    def to_json(self) -> dict[str, Any]:
        """Serialize the family.

        Returns:
            dict[str, Any]: The JSON document.

        """
        return {
            "limit": format_rational(self.limit),
            "direction": str(self.direction),
            "transport": self.transport.to_json(),
            "core_hull": self.core_hull.to_json(),
            "pieces": self.pieces.to_json(),
            "start": self.start,
        }


@dataclass(frozen=True)
class GPLMap:
    """The homeomorphism scaffold∘φ, with φ glued from the families."""

    scaffold: PLMap = IDENTITY
    families: tuple[MapFamily, ...] = ()

    @property
    def active_families(self) -> tuple[MapFamily, ...]:
        """Families with cofinally nontrivial pieces."""
        return tuple(f for f in self.families if f.is_active)

    @property
    def is_pl(self) -> bool:
        """Whether the map is a finite PL map."""
        return not self.active_families


type Homeo = PLMap | GPLMap


def lift(f: Homeo) -> GPLMap:
    """View a PL map as a generalized one.

    Returns:
        GPLMap: The map with f as scaffold and no families.

    """
    return f if isinstance(f, GPLMap) else GPLMap(scaffold=f)


def to_pl(f: Homeo) -> PLMap:
    """Return the PL map underlying a map without active families.

    Returns:
        PLMap: The scaffold.

    Raises:
        NotRepresentableError: If some family is active.

    """
    if isinstance(f, PLMap):
        return f
    if not f.is_pl:
        error_message = ERROR_NOT_REPRESENTABLE.format("map has accumulating pieces")
        raise NotRepresentableError(error_message)
    return f.scaffold


def _map_rank(f: "GPLMap") -> int:
    breaks = breakset(f)
    return -1 if is_empty(breaks) else rank(breaks).rank


@dataclass(frozen=True)
class ConstantMap:
    """Every piece is the same map."""

    core: GPLMap

    def at(self, m: int) -> GPLMap:  # noqa: ARG002
        """Piece m.

        Returns:
            GPLMap: The constant core.

        """
        return self.core

    @property
    def top_rank(self) -> int:
        """Rank of the core's break set."""
        return _map_rank(self.core)

    def to_json(self) -> dict[str, Any]:
        """Serialize the sequence.

        Returns:
            dict[str, Any]: The tagged core.

        """
        return {"kind": "constant", "core": gpl_to_json(self.core)}


@dataclass(frozen=True)
class CyclicMaps:
    """Pieces cycle through a fixed tuple of maps."""

    maps: tuple[GPLMap, ...]

    def at(self, m: int) -> GPLMap:
        """Piece m.

        Returns:
            GPLMap: maps[m mod len(maps)].

        """
        return self.maps[m % len(self.maps)]

    @property
    def top_rank(self) -> int:
        """Largest rank among the cycled maps."""
        return max(_map_rank(f) for f in self.maps)

    def to_json(self) -> dict[str, Any]:
        """Serialize the sequence.

        Returns:
            dict[str, Any]: The tagged maps.

        """
        return {"kind": "cyclic", "maps": [gpl_to_json(f) for f in self.maps]}


@dataclass(frozen=True)
class InvertedMaps:
    """Pointwise inverses of another sequence."""

    inner: MapSequence

    def at(self, m: int) -> GPLMap:
        """Piece m.

        Returns:
            GPLMap: The inverse of the inner piece.

        """
        return gpl_invert(self.inner.at(m))

    @property
    def top_rank(self) -> int:
        """Same as the inner sequence."""
        return self.inner.top_rank

    def to_json(self) -> dict[str, Any]:
        """Serialize the sequence.

        Returns:
            dict[str, Any]: The tagged inner sequence.

        """
        return {"kind": "inverted", "inner": self.inner.to_json()}


@dataclass(frozen=True)
class BreaksetPieces:
    """Piece scheme of the derived break sets of a map sequence."""

    maps: MapSequence
    depth: int = 0

    def at(self, m: int) -> SetExpr:
        """Core set of piece m.

        Returns:
            SetExpr: The depth-th derived set of the m-th piece's break set.

        """
        return _breakset_piece(self.maps, self.depth, m)

    def derived(self) -> "BreaksetPieces":
        """Scheme one derivation deeper.

        Returns:
            BreaksetPieces: The derived scheme.

        """
        return BreaksetPieces(self.maps, self.depth + 1)

    @property
    def cofinally_nonempty(self) -> bool:
        """Whether cofinally many derived break sets are nonempty."""
        return self.maps.top_rank >= self.depth

    def to_json(self) -> dict[str, Any]:
        """Serialize the scheme.

        Returns:
            dict[str, Any]: The tagged sequence and depth.

        """
        return {"kind": "breakset", "maps": self.maps.to_json(), "depth": self.depth}


@lru_cache(maxsize=8192)
def _breakset_piece(maps: MapSequence, depth: int, m: int) -> SetExpr:
    return iterated_derive(breakset(maps.at(m)), depth)


_SEQUENCE_DECODERS: dict[str, Callable[[dict[str, Any]], MapSequence]] = {
    "constant": lambda doc: ConstantMap(gpl_from_json(doc["core"])),
    "cyclic": lambda doc: CyclicMaps(tuple(gpl_from_json(d) for d in doc["maps"])),
    "inverted": lambda doc: InvertedMaps(sequence_from_json(doc["inner"])),
}


def register_sequence_decoder(
    kind: str, decoder: Callable[[dict[str, Any]], MapSequence]
) -> None:
    """Register the JSON decoder of a map sequence kind."""
    _SEQUENCE_DECODERS[kind] = decoder


def sequence_from_json(doc: dict[str, Any]) -> MapSequence:
    """Decode a serialized map sequence.

    Returns:
        MapSequence: The decoded sequence.

    Raises:
        ParseError: If the kind tag is unknown.

    """
    decoder = _SEQUENCE_DECODERS.get(doc.get("kind", ""))
    if decoder is None:
        error_message = ERROR_PARSE.format("map sequence", doc.get("kind"))
        raise ParseError(error_message)
    return decoder(doc)


register_piece_decoder(
    "breakset",
    lambda doc: BreaksetPieces(sequence_from_json(doc["maps"]), int(doc["depth"])),
)


def _check_unit(x: Fraction) -> None:
    if not ZERO <= x <= ONE:
        error_message = ERROR_OUT_OF_RANGE.format(x)
        raise OutOfRangeError(error_message)


def _phi(f: GPLMap, x: Fraction, fuel: int) -> Fraction:
    for family in f.active_families:
        m = family.locate(x, fuel)
        if m is not None:
            c_m = family.conjugator(m)
            inner = gpl_evaluate(family.pieces.at(m), evaluate_inverse(c_m, x), fuel)
            return evaluate(c_m, inner)
    return x


def _phi_inverse(f: GPLMap, y: Fraction, fuel: int) -> Fraction:
    for family in f.active_families:
        m = family.locate(y, fuel)
        if m is not None:
            c_m = family.conjugator(m)
            inner = gpl_evaluate_inverse(
                family.pieces.at(m), evaluate_inverse(c_m, y), fuel
            )
            return evaluate(c_m, inner)
    return y


def gpl_evaluate(f: Homeo, x: Fraction, fuel: int = DEFAULT_FUEL) -> Fraction:
    """Evaluate a generalized PL map exactly.

    Args:
        f (Homeo): The map.
        x (Fraction): A point of [0, 1].
        fuel (int): Hull search bound per family.

    Returns:
        Fraction: f(x).

    Raises:
        OutOfRangeError: If x is outside [0, 1].

    """
    if isinstance(f, PLMap):
        return evaluate(f, x)
    _check_unit(x)
    return evaluate(f.scaffold, _phi(f, x, fuel))


def gpl_evaluate_inverse(f: Homeo, y: Fraction, fuel: int = DEFAULT_FUEL) -> Fraction:
    """Evaluate the inverse of a generalized PL map exactly.

    Returns:
        Fraction: The unique x with f(x) = y.

    """
    if isinstance(f, PLMap):
        return evaluate_inverse(f, y)
    return _phi_inverse(f, evaluate_inverse(f.scaffold, y), fuel)


def _fill_gaps(interval: Interval, parts: Iterable[PLSegment]) -> PLSegment:
    segments: list[PLSegment] = []
    cursor = interval.lo
    for part in sorted(parts, key=lambda s: s.xs[0]):
        if part.xs[0] > cursor:
            segments.append(identity_segment(Interval(cursor, part.xs[0])))
        segments.append(part)
        cursor = part.xs[-1]
    if cursor < interval.hi:
        segments.append(identity_segment(Interval(cursor, interval.hi)))
    return glue_segments(segments)


def _restrict_gpl(f: GPLMap, interval: Interval, fuel: int) -> PLSegment:
    if interval.lo == interval.hi:
        y = gpl_evaluate(f, interval.lo, fuel)
        return PLSegment(xs=(interval.lo,), ys=(y,))
    parts: list[PLSegment] = []
    for family in f.active_families:
        for m in family.hulls_meeting(interval, fuel):
            hull = family.hull(m)
            sub = Interval(max(hull.lo, interval.lo), min(hull.hi, interval.hi))
            c_m = family.conjugator(m)
            into_core = restrict(invert(c_m), sub)
            piece = restrict_pl(family.pieces.at(m), into_core.codomain, fuel)
            parts.append(into_core.then(piece).then(restrict(c_m, piece.codomain)))
    phi = _fill_gaps(interval, parts)
    return phi.then(restrict(f.scaffold, phi.codomain))


def _restrict_word(w: "Word", interval: Interval, fuel: int) -> PLSegment:
    segment = identity_segment(interval)
    for name, exponent in reversed(w.letters):
        target = w.lookup(name)
        running = segment.codomain
        if exponent > 0:
            step = restrict_pl(target, running, fuel)
        else:
            preimage = running.image(
                lambda y, t=target: gpl_evaluate_inverse(t, y, fuel)
            )
            step = restrict_pl(target, preimage, fuel).inverse()
        segment = segment.then(step)
    return segment


def restrict_pl(
    f: "Homeo | Word", interval: Interval, fuel: int = DEFAULT_FUEL
) -> PLSegment:
    """Restrict a map or a word to an interval on which it is PL.

    Words are pushed right to left: each factor is restricted to the image of
    the interval under the factors already applied.

    Args:
        f (Homeo | Word): The map or word.
        interval (Interval): A closed interval of [0, 1].
        fuel (int): Hull search bound per family.

    Returns:
        PLSegment: The graph of f over the interval.

    Raises:
        NotPiecewiseLinearHereError: If the interval contains a limit that
            active pieces accumulate at.
        FuelExhaustedError: If more than `fuel` hulls are inspected.

    """
    match f:
        case PLMap():
            return restrict(f, interval)
        case GPLMap():
            return _restrict_gpl(f, interval, fuel)
        case Word():
            return _restrict_word(f, interval, fuel)


def breakset(f: Homeo) -> SetExpr:
    """Symbolic break set of a map.

    Returns:
        SetExpr: The scaffold's breakpoints pulled back through φ, together
            with one family of piece break sets per active family.

    """
    if isinstance(f, PLMap):
        return finite(f.breakpoints)
    scaffold_breaks = finite(
        _phi_inverse(f, b, DEFAULT_FUEL) for b in f.scaffold.breakpoints
    )
    families = (
        AccumFamily(
            limit=family.limit,
            direction=family.direction,
            transport=family.transport,
            core_hull=family.core_hull,
            pieces=BreaksetPieces(family.pieces),
            cofinal_nonempty=True,
            start=family.start,
        )
        for family in f.active_families
    )
    return union(scaffold_breaks, *families)


def gpl_rank(f: Homeo) -> int:
    """Cantor–Bendixson rank of the break set.

    Returns:
        int: The rank; PL maps have rank 0.

    """
    return rank(breakset(f)).rank


def length_n(f: Homeo, n: int) -> Cardinality:
    """The length function Lₙ(f) = |BP(f)⁽ⁿ⁾|.

    Returns:
        Cardinality: The size of the n-th derived break set.

    >>> length_n(IDENTITY, 0)
    0
    """
    return nth_derived_cardinality(breakset(f), n)


def _check_transportable(g: PLMap, families: Iterable[MapFamily]) -> None:
    for family in families:
        if not family.is_active:
            continue
        for b in g.breakpoints:
            m = family.locate(b)
            if m is not None and family.hull(m).lo < b < family.hull(m).hi:
                error_message = ERROR_NOT_REPRESENTABLE.format(
                    f"breakpoint {b} lies inside hull {family.hull(m)}"
                )
                raise NotRepresentableError(error_message)


def conjugate(f: Homeo, g: PLMap) -> GPLMap:
    """Conjugate a map by a PL map.

    Returns:
        GPLMap: g∘f∘g⁻¹.

    Raises:
        NotRepresentableError: If g breaks inside a hull of f.

    """
    f = lift(f)
    _check_transportable(g, f.families)
    return GPLMap(
        scaffold=compose(g, compose(f.scaffold, invert(g))),
        families=tuple(family.transported(g) for family in f.families),
    )


def precompose(f: Homeo, g: PLMap) -> GPLMap:
    """Compose a map with a PL map on the right.

    Returns:
        GPLMap: f∘g.

    Raises:
        NotRepresentableError: If g⁻¹ breaks inside a hull of f.

    """
    f = lift(f)
    g_inverse = invert(g)
    _check_transportable(g_inverse, f.families)
    return GPLMap(
        scaffold=compose(f.scaffold, g),
        families=tuple(family.transported(g_inverse) for family in f.families),
    )


def gpl_invert(f: Homeo) -> GPLMap:
    """Invert a map.

    Returns:
        GPLMap: f⁻¹ = scaffold⁻¹∘(scaffold∘φ⁻¹∘scaffold⁻¹).

    Raises:
        NotRepresentableError: If the scaffold breaks inside a hull.

    """
    f = lift(f)
    _check_transportable(f.scaffold, f.families)
    return GPLMap(
        scaffold=invert(f.scaffold),
        families=tuple(
            replace(family, pieces=InvertedMaps(family.pieces)).transported(f.scaffold)
            for family in f.families
        ),
    )


def gpl_support_hull(f: Homeo) -> Interval | None:
    """Interval containing every point moved by the map.

    Returns:
        Interval | None: The hull, or None for the identity.

    """
    f = lift(f)
    parts = [support_hull(f.scaffold), *(fam.extent for fam in f.active_families)]
    present = [p for p in parts if p is not None]
    if not present:
        return None
    return Interval(min(p.lo for p in present), max(p.hi for p in present))


def _check_disjoint_families(families: Iterable[MapFamily]) -> None:
    extents = sorted(
        (fam.extent for fam in families if fam.is_active), key=lambda e: e.lo
    )
    for left, right in pairwise(extents):
        if left.interior_meets(right):
            error_message = ERROR_NOT_REPRESENTABLE.format(
                f"family extents {left} and {right} overlap"
            )
            raise NotRepresentableError(error_message)


def join(f: Homeo, g: Homeo) -> GPLMap:
    """Product of two maps with disjoint supports.

    Returns:
        GPLMap: f∘g, which equals g∘f.

    Raises:
        NotRepresentableError: If the support hulls overlap.

    """
    f, g = lift(f), lift(g)
    f_hull, g_hull = gpl_support_hull(f), gpl_support_hull(g)
    if f_hull is not None and g_hull is not None and f_hull.interior_meets(g_hull):
        error_message = ERROR_NOT_REPRESENTABLE.format(
            f"supports {f_hull} and {g_hull} overlap"
        )
        raise NotRepresentableError(error_message)
    return GPLMap(
        scaffold=compose(f.scaffold, g.scaffold), families=f.families + g.families
    )


def gpl_power(f: Homeo, k: int) -> GPLMap:
    """Integer power of a map.

    Uses F^k = s^k ∘ ∏ⱼ s⁻ʲφsʲ, which is representable when the transported
    families have disjoint extents.

    Returns:
        GPLMap: F^k.

    Raises:
        NotRepresentableError: If transported families overlap.

    """
    f = lift(f)
    if k < 0:
        return gpl_power(gpl_invert(f), -k)
    if f.is_pl or k == 0:
        return GPLMap(scaffold=power(f.scaffold, k))
    families: list[MapFamily] = []
    for j in range(k):
        backward = power(f.scaffold, -j)
        _check_transportable(backward, f.families)
        families.extend(fam.transported(backward) for fam in f.active_families)
    _check_disjoint_families(families)
    return GPLMap(scaffold=power(f.scaffold, k), families=tuple(families))


def truncate(f: Homeo, depth: int) -> PLMap:
    """PL map agreeing with f on the first `depth` hulls of every family.

    Nested pieces are truncated with the same depth.

    Returns:
        PLMap: The scaffold composed with the truncated pieces.

    """
    f = lift(f)
    phi = IDENTITY
    for family in f.active_families:
        for m in range(family.start, family.start + depth):
            c_m = family.conjugator(m)
            piece = truncate(family.pieces.at(m), depth)
            local = compose(c_m, compose(piece, invert(c_m)))
            phi = compose(phi, local)
    return compose(f.scaffold, phi)


def slope_norm_truncated(f: Homeo, depth: int) -> Fraction:
    """Slope norm of a truncation, a lower bound for the Lipschitz norm.

    Returns:
        Fraction: slope_norm(truncate(f, depth)).

    """
    return slope_norm(truncate(f, depth))


def gpl_fixed_point_slope(f: Homeo) -> Fraction:
    """Fixed-point slope of the scaffold away from every active family.

    Off the family extents the map equals its scaffold, so the bound on the
    slope norm of powers carries over.

    Returns:
        Fraction: fixed_point_slope of the scaffold, skipping family extents.

    """
    f = lift(f)
    return fixed_point_slope(f.scaffold, (fam.extent for fam in f.active_families))


def pl_windows(f: Homeo, per_family: int) -> list[Interval]:
    """Intervals inside hulls on which the map is PL.

    Descends through nested families, taking the first `per_family` hulls of
    each family.

    Returns:
        list[Interval]: The windows, sorted.

    """
    f = lift(f)
    windows: list[Interval] = []
    for family in f.active_families:
        for m in range(family.start, family.start + per_family):
            piece = family.pieces.at(m)
            inner = (
                [family.core_hull] if piece.is_pl else pl_windows(piece, per_family)
            )
            c_m = family.conjugator(m)
            windows.extend(w.image(lambda x, c=c_m: evaluate(c, x)) for w in inner)
    return sorted(windows, key=lambda w: w.lo)


def validate_map(f: Homeo, depth: int = INSPECTION_DEPTH) -> None:
    """Check the gluing invariants of a map on the first `depth` pieces.

    Raises:
        MalformedExprError: If a transport is not affine on the core hull, a
            piece leaves its core hull, or family extents overlap.

    """
    f = lift(f)
    for family in f.active_families:
        for m in range(family.start, family.start + depth):
            if not is_affine_on(family.conjugator(m), family.core_hull):
                error_message = ERROR_MALFORMED_EXPR.format(
                    f"transport {m} is not affine on {family.core_hull}"
                )
                raise MalformedExprError(error_message)
            piece = family.pieces.at(m)
            hull = gpl_support_hull(piece)
            if hull is not None and not family.core_hull.contains_interval(hull):
                error_message = ERROR_MALFORMED_EXPR.format(
                    f"piece {m} moves points outside {family.core_hull}"
                )
                raise MalformedExprError(error_message)
            validate_map(piece, depth)
    try:
        _check_disjoint_families(f.families)
    except NotRepresentableError as e:
        raise MalformedExprError(str(e)) from e
    validate_set(breakset(f), depth)


type Letter = tuple[str, int]


def _reduce(letters: Iterable[Letter]) -> tuple[Letter, ...]:
    stack: list[Letter] = []
    for name, exponent in letters:
        if stack and stack[-1] == (name, -exponent):
            stack.pop()
        else:
            stack.append((name, exponent))
    return tuple(stack)


@dataclass(frozen=True)
class Word:
    """Freely reduced product of generators, applied right to left."""

    letters: tuple[Letter, ...] = ()
    env: Mapping[str, Homeo] = field(default_factory=dict, hash=False)

    def __post_init__(self) -> None:
        """Freely reduce the letters."""
        object.__setattr__(self, "letters", _reduce(self.letters))

    @classmethod
    def generator(cls, name: str, target: Homeo) -> "Word":
        """Single-letter word bound to a map.

        Returns:
            Word: The word `name`.

        """
        return cls(((name, 1),), {name: target})

    @property
    def letter_count(self) -> int:
        """Number of letters, inverses counted as generators."""
        return len(self.letters)

    def lookup(self, name: str) -> Homeo:
        """Map bound to a generator.

        Returns:
            Homeo: The bound map.

        Raises:
            UnboundGeneratorError: If the name is not bound.

        """
        if name not in self.env:
            error_message = ERROR_UNBOUND_GENERATOR.format(name)
            raise UnboundGeneratorError(error_message)
        return self.env[name]

    def inverse(self) -> "Word":
        """Formal inverse.

        Returns:
            Word: The reversed word with negated exponents.

        """
        return Word(tuple((n, -e) for n, e in reversed(self.letters)), self.env)

    def __mul__(self, other: "Word") -> "Word":
        """Concatenate, so that (u * v)(x) = u(v(x)).

        Returns:
            Word: The reduced product.

        Raises:
            NotRepresentableError: If a name is bound to two different maps.

        """
        for name in self.env.keys() & other.env.keys():
            if self.env[name] != other.env[name]:
                error_message = ERROR_NOT_REPRESENTABLE.format(
                    f"generator '{name}' is bound twice"
                )
                raise NotRepresentableError(error_message)
        return Word(self.letters + other.letters, {**self.env, **other.env})

    def __pow__(self, k: int) -> "Word":
        """Integer power.

        Returns:
            Word: The reduced k-th power.

        """
        base = self if k >= 0 else self.inverse()
        return Word(base.letters * abs(k), self.env)


def word_commutator(u: Word, v: Word) -> Word:
    """Commutator word [u, v] = u v u⁻¹ v⁻¹.

    Returns:
        Word: The reduced commutator.

    """
    return u * v * u.inverse() * v.inverse()


def word_evaluate(w: Word, x: Fraction, fuel: int = DEFAULT_FUEL) -> Fraction:
    """Evaluate a word exactly, rightmost letter first.

    Returns:
        Fraction: w(x).

    Raises:
        UnboundGeneratorError: If a letter is not bound.

    """
    for name, exponent in reversed(w.letters):
        target = w.lookup(name)
        if exponent > 0:
            x = gpl_evaluate(target, x, fuel)
        else:
            x = gpl_evaluate_inverse(target, x, fuel)
    return x


def word_to_pl(w: Word) -> PLMap:
    """Multiply out a word whose letters are all PL.

    Returns:
        PLMap: The product.

    Raises:
        NotRepresentableError: If a letter has accumulating pieces.

    """
    result = IDENTITY
    for name, exponent in w.letters:
        result = compose(result, power(to_pl(w.lookup(name)), exponent))
    return result


@dataclass(frozen=True)
class LengthAxiomReport:
    """Values of Lₙ checked against the length-function axioms."""

    n: int
    identity: Cardinality
    forward: Cardinality
    inverse: Cardinality
    pl_factor: Cardinality
    product: Cardinality

    @property
    def subadditive(self) -> bool:
        """Whether Lₙ(F∘G) ≤ Lₙ(F) + Lₙ(G)."""
        if isinstance(self.forward, Infinite) or isinstance(self.pl_factor, Infinite):
            return True
        if isinstance(self.product, Infinite):
            return False
        return self.product <= self.forward + self.pl_factor

    @property
    def holds(self) -> bool:
        """Whether Lₙ(id)=0, Lₙ(F⁻¹)=Lₙ(F) and Lₙ(F∘G) ≤ Lₙ(F)+Lₙ(G)."""
        return self.identity == 0 and self.inverse == self.forward and self.subadditive


def check_length_axioms(f: Homeo, g: PLMap, n: int) -> LengthAxiomReport:
    """Evaluate the length-function axioms of Lₙ on f and a PL map g.

    Returns:
        LengthAxiomReport: The five values involved.

    """
    return LengthAxiomReport(
        n=n,
        identity=length_n(IDENTITY, n),
        forward=length_n(f, n),
        inverse=length_n(gpl_invert(f), n),
        pl_factor=length_n(g, n),
        product=length_n(precompose(f, g), n),
    )


def homeo_to_json(f: Homeo) -> dict[str, Any]:
    """Serialize a PL or generalized map.

    Returns:
        dict[str, Any]: {"points": ...} or {"scaffold": ..., "families": ...}.

    """
    return pl_to_json(f) if isinstance(f, PLMap) else gpl_to_json(f)


def homeo_from_json(doc: dict[str, Any]) -> Homeo:
    """Decode a serialized PL or generalized map.

    Returns:
        Homeo: The decoded map.

    """
    return gpl_from_json(doc) if "scaffold" in doc else pl_from_json(doc)


def gpl_to_json(f: GPLMap) -> dict[str, Any]:
    """Serialize a generalized map.

    Returns:
        dict[str, Any]: The scaffold and the families.

    """
    return {
        "scaffold": pl_to_json(f.scaffold),
        "families": [family.to_json() for family in f.families],
    }


def gpl_from_json(doc: dict[str, Any]) -> GPLMap:
    """Decode a serialized generalized map.

    Returns:
        GPLMap: The decoded map.

    """
    return GPLMap(
        scaffold=pl_from_json(doc["scaffold"]),
        families=tuple(
            MapFamily(
                limit=parse_rational(fam["limit"]),
                direction=Direction(fam["direction"]),
                transport=Transport.from_json(fam["transport"]),
                core_hull=Interval.from_json(fam["core_hull"]),
                pieces=sequence_from_json(fam["pieces"]),
                start=int(fam.get("start", 1)),
            )
            for fam in doc.get("families", [])
        ),
    )


def word_to_json(w: Word) -> dict[str, Any]:
    """Serialize a word with its environment.

    Returns:
        dict[str, Any]: The letters and the named maps.

    """
    return {
        "letters": [[name, exponent] for name, exponent in w.letters],
        "env": {name: homeo_to_json(target) for name, target in w.env.items()},
    }


def word_from_json(doc: dict[str, Any]) -> Word:
    """Decode a serialized word.

    Returns:
        Word: The decoded word.

    """
    return Word(
        tuple((str(name), int(exponent)) for name, exponent in doc["letters"]),
        {name: homeo_from_json(target) for name, target in doc.get("env", {}).items()},
    )
