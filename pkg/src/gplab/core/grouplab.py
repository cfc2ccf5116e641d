"""Word lengths, Cayley balls and distortion over exactly comparable elements.

Elements are PL maps, 5×5 upper unitriangular integer matrices, or dyadic
affine maps of the line. Products follow composition order: the word
s₁s₂…sₙ is the element s₁∘s₂∘…∘sₙ.
"""

import math
import random
import statistics
from collections.abc import Callable, Iterable, Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Any

from aws_lambda_powertools import Logger
from flint import fmpz_mat

from .constants import (
    BS_N_MAX,
    DEFAULT_BFS_BUDGET,
    DEFAULT_SEED,
    ERROR_BUDGET_EXCEEDED,
    ERROR_GENERATOR_UNREACHABLE,
    ERROR_IDENTITY_FAILED,
    ERROR_NOT_DYADIC,
    ERROR_PARSE,
    ERROR_SUBADDITIVITY,
    ERROR_TORSION,
    GROUP_BS,
    GROUP_H5_FULL,
    GROUP_H5_GAMMA1,
    GROUP_H5_GAMMA2,
    H5_N_MAX,
    H5_SIZE,
    THREADS,
)
from .exceptions import (
    BudgetExceededError,
    GeneratorUnreachableError,
    GroupLabError,
    IdentityFailedError,
    ParseError,
    SubadditivityViolationError,
)
from .plcore import (
    IDENTITY,
    PLMap,
    compose,
    format_rational,
    invert,
    parse_rational,
    pl_from_json,
    pl_to_json,
)

_UPPER = tuple((i, j) for i in range(H5_SIZE) for j in range(i + 1, H5_SIZE))


@dataclass(frozen=True)
class UniTriMatrix:
    """Upper unitriangular 5×5 integer matrix, stored by its free entries.

    `entries` lists a_{i,j} for i < j in row-major order.
    """

    entries: tuple[int, ...] = (0,) * len(_UPPER)

    @classmethod
    def from_fmpz(cls, matrix: fmpz_mat) -> "UniTriMatrix":
        """Read the free entries of a flint matrix.

        Returns:
            UniTriMatrix: The matrix.

        """
        return cls(tuple(int(matrix[i, j]) for i, j in _UPPER))

    @cached_property
    def fmpz(self) -> fmpz_mat:
        """The flint matrix."""
        values = [1 if i == j else 0 for i in range(H5_SIZE) for j in range(H5_SIZE)]
        for (i, j), a in zip(_UPPER, self.entries, strict=True):
            values[i * H5_SIZE + j] = a
        return fmpz_mat(H5_SIZE, H5_SIZE, values)

    def entry(self, i: int, j: int) -> int:
        """Entry a_{i,j} with 1-based indices.

        Returns:
            int: The entry.

        """
        if i == j:
            return 1
        if i > j:
            return 0
        return self.entries[_UPPER.index((i - 1, j - 1))]

    def __mul__(self, other: "UniTriMatrix") -> "UniTriMatrix":
        """Matrix product.

        Returns:
            UniTriMatrix: self · other.

        """
        return UniTriMatrix.from_fmpz(self.fmpz * other.fmpz)

    def inverse(self) -> "UniTriMatrix":
        """Exact inverse I − N + N² − N³ + N⁴ with N = M − I nilpotent.

        Returns:
            UniTriMatrix: The inverse.

        """
        unit = UniTriMatrix().fmpz
        nilpotent = self.fmpz - unit
        total = unit
        term = unit
        for k in range(1, H5_SIZE):
            term = term * nilpotent
            total = total + term if k % 2 == 0 else total - term
        return UniTriMatrix.from_fmpz(total)

    def __pow__(self, k: int) -> "UniTriMatrix":
        """Integer power.

        Returns:
            UniTriMatrix: self**k.

        """
        base = self if k >= 0 else self.inverse()
        return UniTriMatrix.from_fmpz(base.fmpz ** abs(k))


def elementary(i: int, j: int) -> UniTriMatrix:
    """The matrix E_{i,j} = Id + e_{i,j} with 1-based indices.

    Returns:
        UniTriMatrix: The elementary matrix.

    """
    entries = [0] * len(_UPPER)
    entries[_UPPER.index((i - 1, j - 1))] = 1
    return UniTriMatrix(tuple(entries))


@dataclass(frozen=True)
class DyadicAffine:
    """The map x ↦ 2^log_p · x + q of the real line, q dyadic."""

    log_p: int = 0
    q: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        """Validate that q is dyadic.

        Raises:
            ParseError: If the denominator of q is not a power of 2.

        """
        denominator = self.q.denominator
        if denominator & (denominator - 1):
            error_message = ERROR_NOT_DYADIC.format(self.q)
            raise ParseError(error_message)

    @property
    def p(self) -> Fraction:
        """The multiplier."""
        return Fraction(2) ** self.log_p

    def __call__(self, x: Fraction) -> Fraction:
        """Apply the map.

        Returns:
            Fraction: p·x + q.

        """
        return self.p * x + self.q

    def __mul__(self, other: "DyadicAffine") -> "DyadicAffine":
        """Composition self∘other.

        Returns:
            DyadicAffine: The composite.

        """
        return DyadicAffine(self.log_p + other.log_p, self.p * other.q + self.q)

    def inverse(self) -> "DyadicAffine":
        """Inverse map.

        Returns:
            DyadicAffine: x ↦ (x − q)/p.

        """
        return DyadicAffine(-self.log_p, -self.q / self.p)

    def __pow__(self, k: int) -> "DyadicAffine":
        """Integer power.

        Returns:
            DyadicAffine: self**k.

        """
        base = self if k >= 0 else self.inverse()
        result = DyadicAffine()
        for _ in range(abs(k)):
            result = result * base
        return result


type GroupElement = PLMap | UniTriMatrix | DyadicAffine


def multiply(a: GroupElement, b: GroupElement) -> GroupElement:
    """Group product a·b, composition order for maps.

    Returns:
        GroupElement: The product.

    """
    match a, b:
        case PLMap(), PLMap():
            return compose(a, b)
        case UniTriMatrix(), UniTriMatrix():
            return a * b
        case DyadicAffine(), DyadicAffine():
            return a * b
        case _:
            error_message = f"cannot multiply {type(a).__name__} by {type(b).__name__}"
            raise TypeError(error_message)


def inverse_of(a: GroupElement) -> GroupElement:
    """Group inverse.

    Returns:
        GroupElement: a⁻¹.

    """
    return invert(a) if isinstance(a, PLMap) else a.inverse()


def identity_like(a: GroupElement) -> GroupElement:
    """Identity of the variant of a.

    Returns:
        GroupElement: The identity element.

    """
    match a:
        case PLMap():
            return IDENTITY
        case UniTriMatrix():
            return UniTriMatrix()
        case DyadicAffine():
            return DyadicAffine()


def element_power(a: GroupElement, k: int) -> GroupElement:
    """Integer power of any element.

    Returns:
        GroupElement: a**k.

    """
    if isinstance(a, PLMap):
        result = IDENTITY
        base = a if k >= 0 else invert(a)
        for _ in range(abs(k)):
            result = compose(result, base)
        return result
    return a**k


def element_commutator(a: GroupElement, b: GroupElement) -> GroupElement:
    """Commutator [a, b] = a b a⁻¹ b⁻¹.

    Returns:
        GroupElement: The commutator.

    """
    return multiply(multiply(a, b), multiply(inverse_of(a), inverse_of(b)))


def canonical_key(a: GroupElement) -> tuple[Any, ...]:
    """Collision-safe hashable key.

    Returns:
        tuple[Any, ...]: The variant tag followed by the canonical data.

    """
    match a:
        case PLMap():
            return ("pl", a.breakpoints, a.values)
        case UniTriMatrix():
            return ("unitri", a.entries)
        case DyadicAffine():
            return ("dyadic", a.log_p, a.q)


@dataclass(frozen=True)
class GenSet:
    """Symmetric named generating set."""

    names: tuple[str, ...]
    elements: tuple[GroupElement, ...]

    def __iter__(self) -> Iterable[tuple[str, GroupElement]]:
        """Iterate over (name, element) pairs.

        Returns:
            Iterable[tuple[str, GroupElement]]: The generators in order.

        """
        return iter(zip(self.names, self.elements, strict=True))

    @property
    def identity(self) -> GroupElement:
        """Identity of the generated group."""
        return identity_like(self.elements[0])

    def lookup(self, name: str) -> GroupElement:
        """Element of a generator name.

        Returns:
            GroupElement: The element.

        """
        return self.elements[self.names.index(name)]


def inverse_name(name: str) -> str:
    """Formal inverse of a generator name.

    Returns:
        str: "x^-1" for "x" and "x" for "x^-1".

    """
    return name.removesuffix("^-1") if name.endswith("^-1") else f"{name}^-1"


def make_genset(generators: Mapping[str, GroupElement]) -> GenSet:
    """Close named generators under formal inversion, dropping duplicates.

    Returns:
        GenSet: The symmetric generating set.

    """
    names: list[str] = []
    elements: list[GroupElement] = []
    seen: set[tuple[Any, ...]] = set()
    for name, element in generators.items():
        pair = ((name, element), (inverse_name(name), inverse_of(element)))
        for label, candidate in pair:
            key = canonical_key(candidate)
            if key not in seen:
                seen.add(key)
                names.append(label)
                elements.append(candidate)
    return GenSet(tuple(names), tuple(elements))


@dataclass(frozen=True)
class BallEntry:
    """Element of a ball with its word length and a witness word."""

    element: GroupElement
    length: int
    witness: tuple[str, ...]


@dataclass
class BallTable:
    """Exact word lengths of every element within a radius."""

    radius: int
    entries: dict[tuple[Any, ...], BallEntry] = field(default_factory=dict)
    sphere_sizes: list[int] = field(default_factory=list)

    def __len__(self) -> int:
        """Number of elements in the ball.

        Returns:
            int: The ball size.

        """
        return len(self.entries)

    def length_of(self, element: GroupElement) -> int | None:
        """Word length of an element.

        Returns:
            int | None: The length, or None if outside the ball.

        """
        entry = self.entries.get(canonical_key(element))
        return None if entry is None else entry.length


@dataclass(frozen=True)
class NotFound:
    """The word length exceeds the inspected radius."""

    radius: int


def _expand(
    chunk: Sequence[BallEntry], generators: GenSet
) -> list[tuple[GroupElement, tuple[str, ...]]]:
    return [
        (multiply(entry.element, s), (*entry.witness, name))
        for entry in chunk
        for name, s in generators
    ]


def _chunks(items: Sequence[BallEntry], size: int) -> list[Sequence[BallEntry]]:
    return [items[i : i + size] for i in range(0, len(items), size)]


def bfs_ball(
    generators: GenSet,
    radius: int,
    budget: int = DEFAULT_BFS_BUDGET,
    threads: int = THREADS,
    logger: Logger | None = None,
) -> BallTable:
    """Breadth-first Cayley ball with deduplication on canonical keys.

    Frontier products may be computed in parallel; they are merged in frontier
    order, so lengths and witnesses are deterministic.

    Args:
        generators (GenSet): Symmetric generating set.
        radius (int): Largest word length to explore.
        budget (int): Largest number of elements allowed in the ball.
        threads (int): Worker bound for frontier expansion.
        logger (Logger | None): Optional logger for sphere sizes.

    Returns:
        BallTable: Every element of length at most `radius`.

    Raises:
        BudgetExceededError: If the ball grows past the budget.

    """
    identity = generators.identity
    table = BallTable(radius=radius)
    table.entries[canonical_key(identity)] = BallEntry(identity, 0, ())
    table.sphere_sizes.append(1)
    frontier = list(table.entries.values())
    with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        for r in range(1, radius + 1):
            size = max(1, math.ceil(len(frontier) / max(1, threads)))
            expanded = executor.map(
                lambda chunk: _expand(chunk, generators), _chunks(frontier, size)
            )
            sphere: list[BallEntry] = []
            for batch in expanded:
                for element, witness in batch:
                    key = canonical_key(element)
                    if key not in table.entries:
                        entry = BallEntry(element, r, witness)
                        table.entries[key] = entry
                        sphere.append(entry)
                if len(table.entries) > budget:
                    error_message = ERROR_BUDGET_EXCEEDED.format(budget, r)
                    raise BudgetExceededError(error_message, budget=budget, radius=r)
            table.sphere_sizes.append(len(sphere))
            if logger is not None:
                logger.debug("Sphere %s has %s elements", r, len(sphere))
            frontier = sphere
    return table


def word_length(
    element: GroupElement,
    generators: GenSet,
    radius: int,
    budget: int = DEFAULT_BFS_BUDGET,
) -> int | NotFound:
    """Exact word length if it is at most the radius.

    Returns:
        int | NotFound: The length, or NotFound(radius).

    """
    length = bfs_ball(generators, radius, budget).length_of(element)
    return NotFound(radius) if length is None else length


def evaluate_witness(witness: Iterable[str], generators: GenSet) -> GroupElement:
    """Multiply out a witness word.

    Returns:
        GroupElement: The product of the named generators.

    """
    result = generators.identity
    for name in witness:
        result = multiply(result, generators.lookup(name))
    return result


def power_lengths(
    element: GroupElement, ball: BallTable, power_limit: int | None = None
) -> dict[int, int]:
    """Word lengths of the powers of an element found in a ball.

    Powers k = 1..power_limit are matched against the ball; the default limit
    is the ball size.

    Returns:
        dict[int, int]: k ↦ l(f^k) for every power inside the ball.

    Raises:
        GroupLabError: If a power of the element is the identity.

    """
    limit = len(ball) if power_limit is None else power_limit
    identity_key = canonical_key(identity_like(element))
    lengths: dict[int, int] = {}
    current = identity_like(element)
    for k in range(1, limit + 1):
        current = multiply(current, element)
        if canonical_key(current) == identity_key:
            error_message = ERROR_TORSION.format(k)
            raise GroupLabError(error_message)
        length = ball.length_of(current)
        if length is not None:
            lengths[k] = length
    return lengths


def distortion_table(
    element: GroupElement,
    generators: GenSet,
    radius: int,
    budget: int = DEFAULT_BFS_BUDGET,
    power_limit: int | None = None,
    logger: Logger | None = None,
) -> list[tuple[int, int]]:
    """Distortion function D(n) = max{k : l(f^k) ≤ n} for n = 0..radius.

    Returns:
        list[tuple[int, int]]: Pairs (n, D(n)).

    """
    ball = bfs_ball(generators, radius, budget, logger=logger)
    lengths = power_lengths(element, ball, power_limit)
    return [
        (n, max((k for k, length in lengths.items() if length <= n), default=0))
        for n in range(radius + 1)
    ]


def distortion_function(
    element: GroupElement,
    generators: GenSet,
    n: int,
    budget: int = DEFAULT_BFS_BUDGET,
) -> int:
    """Distortion function at a single radius.

    Returns:
        int: max{k : l(f^k) ≤ n}.

    """
    return distortion_table(element, generators, n, budget)[-1][1]


def fekete_estimate(lengths: Callable[[int], int], m_max: int) -> Fraction:
    """Upper bound min lengths(m)/m for the stabilized length.

    Args:
        lengths (Callable[[int], int]): The sequence m ↦ lengths(m).
        m_max (int): Largest index inspected.

    Returns:
        Fraction: min over 1 ≤ m ≤ m_max of lengths(m)/m.

    Raises:
        SubadditivityViolationError: If lengths(a+b) > lengths(a) + lengths(b)
            for some a + b ≤ m_max.

    >>> fekete_estimate(lambda m: m, 5)
    Fraction(1, 1)
    """
    values = {m: lengths(m) for m in range(1, m_max + 1)}
    for a in range(1, m_max + 1):
        for b in range(a, m_max + 1 - a):
            if values[a + b] > values[a] + values[b]:
                error_message = ERROR_SUBADDITIVITY.format(
                    a + b, values[a + b], a, b, values[a] + values[b]
                )
                raise SubadditivityViolationError(error_message)
    return min(Fraction(values[m], m) for m in range(1, m_max + 1))


def naive_lengths(generators: GenSet, radius: int) -> dict[tuple[Any, ...], int]:
    """All-words enumeration oracle for word lengths.

    Returns:
        dict[tuple[Any, ...], int]: Canonical key ↦ shortest word length.

    """
    lengths = {canonical_key(generators.identity): 0}
    for length in range(1, radius + 1):
        for word in product(generators.names, repeat=length):
            key = canonical_key(evaluate_witness(word, generators))
            lengths.setdefault(key, length)
    return lengths


def growth_exponent(table: Sequence[tuple[int, int]]) -> float | None:
    """Log-log slope of a distortion table, for reports only.

    Returns:
        float | None: The least-squares slope of log D(n) against log n, or
            None when fewer than two usable rows exist.

    """
    rows = [(math.log(n), math.log(d)) for n, d in table if n >= 1 and d >= 1]
    if len({x for x, _ in rows}) < 2:  # noqa: PLR2004
        return None
    slope, _ = statistics.linear_regression(
        [x for x, _ in rows], [y for _, y in rows]
    )
    return slope


# Unitriangular examples

_GAMMA_ENTRIES = {
    GROUP_H5_GAMMA1: ((2, 5), (3, 4), (3, 5), (4, 5)),
    GROUP_H5_GAMMA2: ((2, 3), (2, 4), (2, 5), (3, 4), (3, 5), (4, 5)),
    GROUP_H5_FULL: tuple((i + 1, j + 1) for i, j in _UPPER),
}


def gamma_generators(group: str = GROUP_H5_FULL) -> GenSet:
    """The generators E_{i,j} lying in a subgroup of H₅.

    Args:
        group (str): One of "h5-gamma1", "h5-gamma2" or "h5-full".

    Returns:
        GenSet: S₁, S₂ or S with inverses.

    """
    return make_genset({
        f"e{i}{j}": elementary(i, j) for i, j in _GAMMA_ENTRIES[group]
    })


def h5_generators() -> GenSet:
    """The full generating set S of H₅.

    Returns:
        GenSet: Every E_{i,j} with inverses.

    """
    return gamma_generators(GROUP_H5_FULL)


def l1_length(a: UniTriMatrix) -> int:
    """Length function |a_{2,5}| on Γ₁.

    Returns:
        int: The absolute entry.

    """
    return abs(a.entry(2, 5))


def l2_length(a: UniTriMatrix) -> int:
    """Length function |a_{1,5}| on Γ₂.

    Returns:
        int: The absolute entry.

    """
    return abs(a.entry(1, 5))


@dataclass(frozen=True)
class H5Row:
    """Identities and bounds of the H₅ example at one n."""

    n: int
    e35_bound: int
    e25_bound: int
    e15_bound: int
    l1_e25: int
    l2_e15: int


def _require(condition: bool, label: str, witnesses: Any) -> None:  # noqa: FBT001
    if not condition:
        error_message = ERROR_IDENTITY_FAILED.format(label)
        raise IdentityFailedError(error_message, witnesses=witnesses)


def verify_h5_identities(n: int) -> H5Row:
    """Check the commutator identities of H₅ at n exactly.

    Checks E₃₅^{n²} = [E₃₄ⁿ, E₄₅ⁿ], E₂₅^{n²} = [E₂₃, [E₃₄ⁿ, E₄₅ⁿ]],
    E₁₅^{n⁴} = [E₁₃^{n²}, E₃₅^{n²}] and E₁₅^{n⁴} = [[E₁₂ⁿ, E₂₃ⁿ], [E₃₄ⁿ, E₄₅ⁿ]].

    Returns:
        H5Row: The implied length bounds and the length-function values.

    Raises:
        IdentityFailedError: If an identity fails.

    """
    e = {(i, j): elementary(i, j) for i, j in _GAMMA_ENTRIES[GROUP_H5_FULL]}
    inner = element_commutator(e[3, 4] ** n, e[4, 5] ** n)
    e35 = e[3, 5] ** (n * n)
    _require(e35 == inner, f"E35^{n * n} = [E34^{n}, E45^{n}]", (e35, inner))
    e25 = e[2, 5] ** (n * n)
    nested = element_commutator(e[2, 3], inner)
    _require(e25 == nested, f"E25^{n * n} = [E23, [E34^{n}, E45^{n}]]", (e25, nested))
    e15 = e[1, 5] ** (n**4)
    middle = element_commutator(e[1, 3] ** (n * n), e35)
    _require(e15 == middle, f"E15^{n**4} = [E13^{n * n}, E35^{n * n}]", (e15, middle))
    outer = element_commutator(element_commutator(e[1, 2] ** n, e[2, 3] ** n), inner)
    _require(e15 == outer, f"E15^{n**4} = [[E12^{n}, E23^{n}], inner]", (e15, outer))
    return H5Row(
        n=n,
        e35_bound=4 * n,
        e25_bound=8 * n + 2,
        e15_bound=16 * n,
        l1_e25=l1_length(e[2, 5] ** n),
        l2_e15=l2_length(e[1, 5] ** n),
    )


@dataclass(frozen=True)
class H5Report:
    """H₅ identities for 1 ≤ n ≤ n_max with the stabilized length limits."""

    rows: tuple[H5Row, ...]
    l1_stable: Fraction
    l2_stable: Fraction


def h5_report(n_max: int = H5_N_MAX, logger: Logger | None = None) -> H5Report:
    """Verify the H₅ identities for every n up to n_max.

    Returns:
        H5Report: One row per n and the limits L₁(E₂₅ⁿ)/n, L₂(E₁₅ⁿ)/n at n_max.

    """
    rows = tuple(verify_h5_identities(n) for n in range(1, n_max + 1))
    if logger is not None:
        logger.info("H5 identities hold", extra={"n_max": n_max})
    last = rows[-1]
    return H5Report(
        rows=rows,
        l1_stable=Fraction(last.l1_e25, n_max),
        l2_stable=Fraction(last.l2_e15, n_max),
    )


@dataclass(frozen=True)
class LengthAxiomsReport:
    """Length-function axioms checked on a seeded sample."""

    identity_zero: bool
    symmetric: bool
    subadditive: bool
    pairs: int

    @property
    def holds(self) -> bool:
        """Whether all three axioms held."""
        return self.identity_zero and self.symmetric and self.subadditive


def random_elements(
    generators: GenSet, count: int, max_length: int, seed: int = DEFAULT_SEED
) -> list[GroupElement]:
    """Products of random generator words.

    Returns:
        list[GroupElement]: Seeded random elements of the generated group.

    """
    rng = random.Random(seed)  # noqa: S311
    return [
        evaluate_witness(
            rng.choices(generators.names, k=rng.randint(0, max_length)), generators
        )
        for _ in range(count)
    ]


def length_axioms_report(
    length: Callable[[Any], int],
    sample: Sequence[GroupElement],
) -> LengthAxiomsReport:
    """Check L(Id)=0, L(A)=L(A⁻¹) and L(AB) ≤ L(A)+L(B) on all ordered pairs.

    Returns:
        LengthAxiomsReport: Which axioms held.

    """
    pairs = list(product(sample, repeat=2))
    return LengthAxiomsReport(
        identity_zero=length(identity_like(sample[0])) == 0,
        symmetric=all(length(a) == length(inverse_of(a)) for a in sample),
        subadditive=all(
            length(multiply(a, b)) <= length(a) + length(b) for a, b in pairs
        ),
        pairs=len(pairs),
    )


# Baumslag–Solitar realization


def bs_realization() -> tuple[DyadicAffine, DyadicAffine]:
    """The pair f(x) = x + 1 and g(x) = 2x.

    Returns:
        tuple[DyadicAffine, DyadicAffine]: (f, g).

    """
    return DyadicAffine(0, Fraction(1)), DyadicAffine(1, Fraction(0))


def bs_generators() -> GenSet:
    """Generating set {f, g} with inverses.

    Returns:
        GenSet: The symmetric set.

    """
    f, g = bs_realization()
    return make_genset({"f": f, "g": g})


@dataclass(frozen=True)
class BSRow:
    """The identity gⁿfg⁻ⁿ = f^{2ⁿ} and its word bound at one n."""

    n: int
    translation: Fraction
    word_bound: int


def verify_bs_identity(n: int) -> BSRow:
    """Check gⁿfg⁻ⁿ = f^{2ⁿ} exactly.

    Returns:
        BSRow: The translation length 2ⁿ and the bound 2n+1.

    Raises:
        IdentityFailedError: If the identity fails.

    """
    f, g = bs_realization()
    conjugated = g**n * f * g ** (-n)
    expected = DyadicAffine(0, Fraction(2**n))
    _require(
        conjugated == expected, f"g^{n} f g^-{n} = f^{2**n}", (conjugated, expected)
    )
    return BSRow(n=n, translation=conjugated(Fraction(0)), word_bound=2 * n + 1)


def bs_report(n_max: int = BS_N_MAX) -> list[BSRow]:
    """Verify the Baumslag–Solitar identity for 1 ≤ n ≤ n_max.

    Returns:
        list[BSRow]: One row per n.

    """
    return [verify_bs_identity(n) for n in range(1, n_max + 1)]


@dataclass(frozen=True)
class GensetComparison:
    """Comparison constant between two generating sets on a ball."""

    constant: Fraction
    checked: int
    holds: bool


def genset_comparison(
    source: GenSet,
    target: GenSet,
    radius: int,
    budget: int = DEFAULT_BFS_BUDGET,
) -> GensetComparison:
    """Find C = max l_T(s) over s ∈ S and check l_T ≤ C·l_S on the S-ball.

    Returns:
        GensetComparison: C, the number of elements checked and the verdict.

    Raises:
        GeneratorUnreachableError: If a source generator is outside the
            target ball of the given radius.

    """
    target_ball = bfs_ball(target, radius, budget)
    constant = 0
    for name, element in source:
        length = target_ball.length_of(element)
        if length is None:
            error_message = ERROR_GENERATOR_UNREACHABLE.format(name, radius)
            raise GeneratorUnreachableError(error_message)
        constant = max(constant, length)
    source_ball = bfs_ball(source, radius, budget)
    wide_ball = bfs_ball(target, constant * radius, budget)
    holds = True
    for entry in source_ball.entries.values():
        length = wide_ball.length_of(entry.element)
        if length is None or length > constant * entry.length:
            holds = False
            break
    return GensetComparison(
        constant=Fraction(constant), checked=len(source_ball), holds=holds
    )


def builtin_group(name: str) -> GenSet:
    """Generating set of a named built-in group.

    Returns:
        GenSet: The generators.

    Raises:
        ParseError: If the name is unknown.

    """
    if name == GROUP_BS:
        return bs_generators()
    if name in _GAMMA_ENTRIES:
        return gamma_generators(name)
    error_message = ERROR_PARSE.format("group", name)
    raise ParseError(error_message)


def element_to_json(a: GroupElement) -> dict[str, Any]:
    """Serialize a group element.

    Returns:
        dict[str, Any]: Matrices as 10 entries, dyadic maps as {"p", "q"}.

    """
    match a:
        case PLMap():
            return {"kind": "pl", **pl_to_json(a)}
        case UniTriMatrix():
            return {"kind": "unitri", "entries": list(a.entries)}
        case DyadicAffine():
            return {"kind": "dyadic", "p": f"2^{a.log_p}", "q": format_rational(a.q)}


def element_from_json(doc: dict[str, Any]) -> GroupElement:
    """Decode a serialized group element.

    Returns:
        GroupElement: The element.

    Raises:
        ParseError: If the document is malformed.

    """
    match doc.get("kind"):
        case "pl":
            return pl_from_json(doc)
        case "unitri":
            return UniTriMatrix(tuple(int(a) for a in doc["entries"]))
        case "dyadic":
            base, _, exponent = str(doc["p"]).partition("^")
            if base != "2" or not exponent.lstrip("-").isdigit():
                error_message = ERROR_PARSE.format("dyadic multiplier", doc["p"])
                raise ParseError(error_message)
            return DyadicAffine(int(exponent), parse_rational(doc["q"]))
        case kind:
            error_message = ERROR_PARSE.format("group element", kind)
            raise ParseError(error_message)
