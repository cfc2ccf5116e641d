"""Symbolic countable closed subsets of [0, 1] and their Cantor–Bendixson rank.

Sets are finite expression trees. Accumulating families are indexed by the
transport maps m ↦ c_m = post∘outer⁻ᵐ∘inner⁻⁽ᵒᶠᶠˢᵉᵗ⁺ᵐ⁾: the m-th piece is the
image of a core set under c_m and lives in the hull c_m(core_hull). Deriving
a family derives its core and adds the limit point, so rank computation is
pure rewriting and terminates at the construction depth.

>>> rank(Finite((Fraction(1, 2),)))
RankResult(rank=0, final_cardinality=1)
"""

from collections.abc import Callable, Iterable
from dataclasses import dataclass, replace
from enum import Enum, StrEnum
from fractions import Fraction
from functools import lru_cache
from typing import Any, Protocol, runtime_checkable

from .constants import (
    ERROR_MALFORMED_EXPR,
    ERROR_PARSE,
    INSPECTION_DEPTH,
    MAX_FAMILY_SCAN,
)
from .exceptions import MalformedExprError, ParseError
from .plcore import (
    IDENTITY,
    Interval,
    PLMap,
    compose,
    evaluate,
    evaluate_inverse,
    format_rational,
    parse_rational,
    pl_from_json,
    pl_to_json,
    power,
)


class Direction(StrEnum):
    """Side from which the hulls of a family approach its limit."""

    FROM_ABOVE = "above"
    FROM_BELOW = "below"


class Infinite(Enum):
    """Marker for an infinite cardinality."""

    INFINITE = "infinite"

    def __repr__(self) -> str:
        """Return the marker name.

        Returns:
            str: "Infinite".

        """
        return "Infinite"


INFINITE = Infinite.INFINITE
type Cardinality = int | Infinite


@dataclass(frozen=True)
class Transport:
    """The indexed maps c_m = post∘outer⁻ᵐ∘inner⁻⁽ᵒᶠᶠˢᵉᵗ⁺ᵐ⁾."""

    outer: PLMap
    inner: PLMap = IDENTITY
    offset: int = 0
    post: PLMap = IDENTITY

    def at(self, m: int) -> PLMap:
        """The m-th transport map.

        Returns:
            PLMap: c_m.

        """
        return _transport_map(self, m)

    def after(self, g: PLMap) -> "Transport":
        """Post-compose every transport map with g.

        Returns:
            Transport: The transport m ↦ g∘c_m.

        """
        return replace(self, post=compose(g, self.post))

    def to_json(self) -> dict[str, Any]:
        """Serialize the transport.

        Returns:
            dict[str, Any]: The two maps, the offset and the post map.

        """
        return {
            "outer": pl_to_json(self.outer),
            "inner": pl_to_json(self.inner),
            "offset": self.offset,
            "post": pl_to_json(self.post),
        }

    @classmethod
    def from_json(cls, doc: dict[str, Any]) -> "Transport":
        """Decode a serialized transport.

        Returns:
            Transport: The decoded transport.

        """
        return cls(
            outer=pl_from_json(doc["outer"]),
            inner=pl_from_json(doc.get("inner", {})),
            offset=int(doc.get("offset", 0)),
            post=pl_from_json(doc.get("post", {})),
        )


@lru_cache(maxsize=16384)
def _transport_map(transport: Transport, m: int) -> PLMap:
    return compose(
        transport.post,
        compose(
            power(transport.outer, -m),
            power(transport.inner, -(transport.offset + m)),
        ),
    )


@dataclass(frozen=True)
class Finite:
    """A finite set of points, sorted and distinct."""

    points: tuple[Fraction, ...] = ()


EMPTY = Finite()


@runtime_checkable
class PieceScheme(Protocol):
    """Catalog entry producing the core set of the m-th piece of a family."""

    def at(self, m: int) -> "SetExpr":
        """Core set of piece m, before transport."""
        ...

    def derived(self) -> "PieceScheme":
        """Scheme of the derived cores."""
        ...

    @property
    def cofinally_nonempty(self) -> bool:
        """Whether infinitely many cores are nonempty."""
        ...

    def to_json(self) -> dict[str, Any]:
        """Serialize the scheme."""
        ...


@dataclass(frozen=True)
class ConstantPiece:
    """Every piece is the same core set."""

    core: "SetExpr"

    def at(self, m: int) -> "SetExpr":  # noqa: ARG002
        """Core set of piece m.

        Returns:
            SetExpr: The constant core.

        """
        return self.core

    def derived(self) -> "ConstantPiece":
        """Derive the core.

        Returns:
            ConstantPiece: The scheme with derived core.

        """
        return ConstantPiece(derive(self.core))

    @property
    def cofinally_nonempty(self) -> bool:
        """Whether the core is nonempty."""
        return not is_empty(self.core)

    def to_json(self) -> dict[str, Any]:
        """Serialize the scheme.

        Returns:
            dict[str, Any]: The tagged core.

        """
        return {"kind": "constant", "core": set_to_json(self.core)}


@dataclass(frozen=True)
class AccumFamily:
    """Disjoint pieces in hulls converging monotonically to a limit point.

    The set is the union of every piece together with the limit.
    """

    limit: Fraction
    direction: Direction
    transport: Transport
    core_hull: Interval
    pieces: PieceScheme
    cofinal_nonempty: bool
    start: int = 1

    def hull(self, m: int) -> Interval:
        """Hull of piece m.

        Returns:
            Interval: c_m(core_hull).

        """
        c_m = self.transport.at(m)
        return self.core_hull.image(lambda x: evaluate(c_m, x))

    def piece(self, m: int) -> "SetExpr":
        """Piece m in place.

        Returns:
            SetExpr: c_m applied to the core set of piece m.

        """
        return image(self.transport.at(m), self.pieces.at(m))

    @property
    def extent(self) -> Interval:
        """Smallest interval containing every hull and the limit."""
        first = self.hull(self.start)
        return Interval(min(first.lo, self.limit), max(first.hi, self.limit))


@dataclass(frozen=True)
class Union:
    """Union of finitely many sets."""

    parts: tuple["SetExpr", ...]


@dataclass(frozen=True)
class Image:
    """Image of a set under a PL homeomorphism."""

    g: PLMap
    inner: "SetExpr"


type SetExpr = Finite | AccumFamily | Union | Image


@dataclass(frozen=True)
class RankResult:
    """Cantor–Bendixson rank and the size of the last nonempty derived set."""

    rank: int
    final_cardinality: int


def finite(points: Iterable[Fraction]) -> Finite:
    """Build a finite set from any iterable of points.

    Returns:
        Finite: The sorted distinct points.

    """
    return Finite(tuple(sorted(set(points))))


def image(g: PLMap, inner: SetExpr) -> SetExpr:
    """Image of a set under g, simplified where it stays finite.

    Returns:
        SetExpr: g(inner).

    """
    match inner:
        case _ if g.is_identity:
            return inner
        case Finite(points):
            return finite(evaluate(g, x) for x in points)
        case Union(parts):
            return union(*(image(g, part) for part in parts))
        case Image(g_inner, core):
            return image(compose(g, g_inner), core)
        case _:
            return Image(g, inner) if not is_empty(inner) else EMPTY


def union(*parts: SetExpr) -> SetExpr:
    """Normalized union: flattened, empty parts dropped, finite parts merged.

    Returns:
        SetExpr: The union.

    """
    flat: list[SetExpr] = []
    points: set[Fraction] = set()
    for part in parts:
        match part:
            case Union(inner_parts):
                normalized = union(*inner_parts)
                nested = (
                    normalized.parts
                    if isinstance(normalized, Union)
                    else (normalized,)
                )
            case _:
                nested = (part,)
        for item in nested:
            if isinstance(item, Finite):
                points.update(item.points)
            elif not is_empty(item) and item not in flat:
                flat.append(item)
    if points:
        flat.insert(0, finite(points))
    if not flat:
        return EMPTY
    return flat[0] if len(flat) == 1 else Union(tuple(flat))


def is_empty(x: SetExpr) -> bool:
    """Decide emptiness symbolically.

    Returns:
        bool: True if the set is empty.

    """
    match x:
        case Finite(points):
            return not points
        case Union(parts):
            return all(is_empty(part) for part in parts)
        case Image(_, inner):
            return is_empty(inner)
        case AccumFamily():
            return not x.cofinal_nonempty


def _malformed(detail: str) -> MalformedExprError:
    return MalformedExprError(ERROR_MALFORMED_EXPR.format(detail))


@lru_cache(maxsize=4096)
def _validate_family(family: AccumFamily, depth: int) -> None:
    previous: Interval | None = None
    emptiness: list[bool] = []
    for m in range(family.start, family.start + depth):
        hull = family.hull(m)
        if family.direction == Direction.FROM_ABOVE:
            on_side = hull.lo > family.limit
            ordered = previous is None or hull.hi < previous.lo
        else:
            on_side = hull.hi < family.limit
            ordered = previous is None or hull.lo > previous.hi
        if not (on_side and ordered):
            error_message = f"hull {m} = {hull} breaks monotone convergence"
            raise _malformed(error_message)
        piece = family.piece(m)
        if any(not hull.contains(x) for x in enumerate_points(piece, 4)):
            error_message = f"piece {m} leaves its hull {hull}"
            raise _malformed(error_message)
        emptiness.append(is_empty(piece))
        previous = hull
    if family.cofinal_nonempty and all(emptiness):
        error_message = f"declared cofinal but {depth} consecutive pieces are empty"
        raise _malformed(error_message)
    if not family.cofinal_nonempty and not all(emptiness):
        raise _malformed("declared empty but an inspected piece is nonempty")


def validate(x: SetExpr, depth: int = INSPECTION_DEPTH) -> None:
    """Check every family of an expression on its first `depth` pieces.

    Raises:
        MalformedExprError: If an invariant fails on the truncation.

    """
    match x:
        case Union(parts):
            for part in parts:
                validate(part, depth)
        case Image(_, inner):
            validate(inner, depth)
        case AccumFamily() if x.cofinal_nonempty:
            _validate_family(x, depth)
        case _:
            pass


@lru_cache(maxsize=8192)
def derive(x: SetExpr) -> SetExpr:
    """Derived set (the accumulation points) by symbolic rewriting.

    Args:
        x (SetExpr): A well-formed expression.

    Returns:
        SetExpr: The normalized derived set.

    >>> derive(Finite((Fraction(1, 2), Fraction(3, 4))))
    Finite(points=())
    """
    match x:
        case Finite():
            return EMPTY
        case Union(parts):
            return union(*(derive(part) for part in parts))
        case Image(g, inner):
            return image(g, derive(inner))
        case AccumFamily() if not x.cofinal_nonempty:
            return EMPTY
        case AccumFamily():
            _validate_family(x, INSPECTION_DEPTH)
            pieces = x.pieces.derived()
            family = replace(
                x, pieces=pieces, cofinal_nonempty=pieces.cofinally_nonempty
            )
            return union(family, Finite((x.limit,)))


def finite_points(x: SetExpr) -> frozenset[Fraction] | None:
    """Points of a finite expression.

    Returns:
        frozenset[Fraction] | None: The points, or None if the set is infinite.

    """
    match x:
        case Finite(points):
            return frozenset(points)
        case Image(g, inner):
            inner_points = finite_points(inner)
            if inner_points is None:
                return None
            return frozenset(evaluate(g, p) for p in inner_points)
        case Union(parts):
            collected: set[Fraction] = set()
            for part in parts:
                part_points = finite_points(part)
                if part_points is None:
                    return None
                collected |= part_points
            return frozenset(collected)
        case AccumFamily():
            return None if x.cofinal_nonempty else frozenset()


def iterated_derive(x: SetExpr, n: int) -> SetExpr:
    """Apply derive n times, stopping early at the empty set.

    Returns:
        SetExpr: The n-th derived set.

    """
    for _ in range(n):
        if is_empty(x):
            return EMPTY
        x = derive(x)
    return x


def rank(x: SetExpr) -> RankResult:
    """Cantor–Bendixson rank; finite nonempty sets have rank 0.

    The empty set is assigned rank 0 and final cardinality 0.

    Returns:
        RankResult: The rank and |X⁽ʳᵃⁿᵏ⁾|.

    """
    if is_empty(x):
        return RankResult(rank=0, final_cardinality=0)
    level = 0
    while not is_empty(following := derive(x)):
        x = following
        level += 1
    points = finite_points(x)
    if points is None:
        raise _malformed("last nonempty derived set is infinite")
    return RankResult(rank=level, final_cardinality=len(points))


def nth_derived_cardinality(x: SetExpr, n: int) -> Cardinality:
    """Cardinality of the n-th derived set.

    Returns:
        Cardinality: |X⁽ⁿ⁾| when finite, otherwise INFINITE.

    """
    points = finite_points(iterated_derive(x, n))
    return INFINITE if points is None else len(points)


def derived_cardinalities(x: SetExpr) -> list[Cardinality]:
    """Cardinality of every derived set up to the rank.

    Returns:
        list[Cardinality]: |X⁽ᵏ⁾| for k = 0, ..., rank(X).

    """
    return [nth_derived_cardinality(x, k) for k in range(rank(x).rank + 1)]


def enumerate_points(x: SetExpr, k: int) -> list[Fraction]:
    """List at least min(k, |X|) points of X in increasing order.

    Families contribute their pieces in index order until k points are
    collected; the limit point itself is not listed. Nothing is listed for
    k ≤ 0.

    Returns:
        list[Fraction]: Exact points of X.

    """
    if k <= 0:
        return []
    match x:
        case Finite(points):
            return list(points)
        case Image(g, inner):
            return [evaluate(g, p) for p in enumerate_points(inner, k)]
        case Union(parts):
            return sorted({p for part in parts for p in enumerate_points(part, k)})
        case AccumFamily() if x.cofinal_nonempty:
            collected: set[Fraction] = set()
            for m in range(x.start, x.start + MAX_FAMILY_SCAN):
                collected.update(enumerate_points(x.piece(m), k - len(collected)))
                if len(collected) >= k:
                    break
            return sorted(collected)
        case _:
            return []


def union_with_image(x: SetExpr, g: PLMap, y: SetExpr) -> SetExpr:
    """Build X ∪ g(Y).

    Returns:
        SetExpr: The union, whose rank is at most max(rank X, rank Y).

    """
    return union(x, image(g, y))


def clip(x: SetExpr, lo: Fraction, hi: Fraction) -> SetExpr:
    """Intersect X with the half-open interval [lo, hi).

    Returns:
        SetExpr: X ∩ [lo, hi).

    Raises:
        MalformedExprError: If a family straddles lo or hi.

    """
    match x:
        case Finite(points):
            return Finite(tuple(p for p in points if lo <= p < hi))
        case Union(parts):
            return union(*(clip(part, lo, hi) for part in parts))
        case Image(g, inner):
            inner_lo = evaluate_inverse(g, lo)
            inner_hi = evaluate_inverse(g, hi)
            return image(g, clip(inner, inner_lo, inner_hi))
        case AccumFamily() if not x.cofinal_nonempty:
            return EMPTY
        case AccumFamily():
            extent = x.extent
            if lo <= extent.lo and extent.hi < hi:
                return x
            if extent.hi < lo or extent.lo >= hi:
                return EMPTY
            error_message = f"family {extent} straddles [{lo}, {hi})"
            raise _malformed(error_message)


def accumulation_points(
    points: Iterable[Fraction], eps: Fraction, min_neighbors: int = 3
) -> list[Fraction]:
    """Brute-force ε-cluster oracle on a finite truncation.

    Args:
        points (Iterable[Fraction]): A finite sample of a set.
        eps (Fraction): The cluster radius.
        min_neighbors (int): Neighbors required within eps.

    Returns:
        list[Fraction]: Sample points with at least `min_neighbors` other sample
            points within distance eps.

    """
    sample = sorted(set(points))
    return [
        p
        for p in sample
        if sum(1 for q in sample if q != p and abs(q - p) <= eps) >= min_neighbors
    ]


def is_cluster_point(
    candidate: Fraction,
    points: Iterable[Fraction],
    eps: Fraction,
    min_neighbors: int = 3,
) -> bool:
    """Check whether a candidate has enough sample points within eps.

    Returns:
        bool: True if at least `min_neighbors` points other than the candidate
            lie within eps of it.

    """
    near = [p for p in points if p != candidate and abs(p - candidate) <= eps]
    return len(near) >= min_neighbors


_PIECE_DECODERS: dict[str, Callable[[dict[str, Any]], PieceScheme]] = {}


def register_piece_decoder(
    kind: str, decoder: Callable[[dict[str, Any]], PieceScheme]
) -> None:
    """Register the JSON decoder of a piece scheme kind."""
    _PIECE_DECODERS[kind] = decoder


register_piece_decoder(
    "constant", lambda doc: ConstantPiece(set_from_json(doc["core"]))
)


def set_to_json(x: SetExpr) -> dict[str, Any]:
    """Serialize a set expression with a "kind" tag per variant.

    Returns:
        dict[str, Any]: The JSON document.

    """
    match x:
        case Finite(points):
            return {"kind": "finite", "points": [format_rational(p) for p in points]}
        case Union(parts):
            return {"kind": "union", "parts": [set_to_json(part) for part in parts]}
        case Image(g, inner):
            return {"kind": "image", "map": pl_to_json(g), "inner": set_to_json(inner)}
        case AccumFamily():
            return {
                "kind": "family",
                "limit": format_rational(x.limit),
                "direction": str(x.direction),
                "transport": x.transport.to_json(),
                "core_hull": x.core_hull.to_json(),
                "pieces": x.pieces.to_json(),
                "cofinal_nonempty": x.cofinal_nonempty,
                "start": x.start,
            }


def set_from_json(doc: dict[str, Any]) -> SetExpr:
    """Decode a serialized set expression.

    Returns:
        SetExpr: The decoded expression.

    Raises:
        ParseError: If the kind tag is unknown.

    """
    match doc.get("kind"):
        case "finite":
            return finite(parse_rational(p) for p in doc["points"])
        case "union":
            return Union(tuple(set_from_json(part) for part in doc["parts"]))
        case "image":
            return Image(pl_from_json(doc["map"]), set_from_json(doc["inner"]))
        case "family":
            pieces_doc = doc["pieces"]
            kind = pieces_doc.get("kind")
            decoder = _PIECE_DECODERS.get(kind)
            if decoder is None:
                error_message = ERROR_PARSE.format("piece scheme", kind)
                raise ParseError(error_message)
            return AccumFamily(
                limit=parse_rational(doc["limit"]),
                direction=Direction(doc["direction"]),
                transport=Transport.from_json(doc["transport"]),
                core_hull=Interval.from_json(doc["core_hull"]),
                pieces=decoder(pieces_doc),
                cofinal_nonempty=bool(doc["cofinal_nonempty"]),
                start=int(doc.get("start", 1)),
            )
        case kind:
            error_message = ERROR_PARSE.format("set expression", kind)
            raise ParseError(error_message)
