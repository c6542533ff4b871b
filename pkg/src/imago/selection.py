"""Selection functions ``f: A × at(A) → A`` and their frame properties.

A selection function is stored as a dense, immutable table of ``2**n * n``
events; cell ``(a, alpha)`` lives at index ``a * n + alpha``.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass
from enum import Enum
from itertools import islice, product
from math import comb, prod
from typing import Callable, Iterable, Iterator

from .algebra import Algebra, atoms_of, cardinality, subevents
from .errors import (
    BudgetExceededError,
    RetryCapExceededError,
    UnsatisfiableConstraintsError,
)

DEFAULT_BUDGET = 65_536
DEFAULT_MAX_RETRIES = 10_000


class FrameProperty(str, Enum):
    EMPTINESS = "emptiness"
    NORMALITY = "normality"
    IDENTITY = "identity"
    CENTERING_1 = "centering-1"
    CENTERING_2 = "centering-2"
    CENTERING = "centering"
    UNIQUENESS_WEAK = "uniqueness-weak"
    UNIQUENESS_STRICT = "uniqueness-strict"
    WELL_ORDER = "well-order"
    NESTING = "nesting"

    @classmethod
    def parse(cls, text: str) -> "FrameProperty":
        key = text.strip().lower().replace("_", "-")
        aliases = {
            "emptyness": "emptiness",
            "centering1": "centering-1",
            "centering2": "centering-2",
            "uniqueness": "uniqueness-weak",
            "weak": "uniqueness-weak",
            "strict": "uniqueness-strict",
            "wellorder": "well-order",
            "well-ordering": "well-order",
        }
        return cls(aliases.get(key, key))


class ConditionalClass(str, Enum):
    VARIABLY_STRICT = "variably-strict"
    COUNTERFACTUAL = "counterfactual"
    STALNAKER = "stalnaker"
    UNCLASSIFIED = "unclassified"


GLOBAL_PROPERTIES = frozenset({FrameProperty.WELL_ORDER, FrameProperty.NESTING})
# Properties that constrain one cell at a time.
LOCAL_PROPERTIES = frozenset(FrameProperty) - GLOBAL_PROPERTIES


@dataclass(frozen=True)
class SelectionFunction:
    algebra: Algebra
    table: tuple[int, ...]

    def __post_init__(self):
        n = self.algebra.atom_count
        table = tuple(self.table)
        if len(table) != self.algebra.size * n:
            raise ValueError(
                f"selection table needs {self.algebra.size * n} cells, got {len(table)}"
            )
        if table and (min(table) < 0 or max(table) > self.algebra.top):
            raise ValueError("selection table holds an event outside the algebra")
        object.__setattr__(self, "table", table)

    @classmethod
    def from_callable(
        cls, algebra: Algebra, fn: Callable[[int, int], int]
    ) -> "SelectionFunction":
        n = algebra.atom_count
        return cls(algebra, tuple(fn(a, alpha) for a in algebra.events() for alpha in range(n)))

    def __call__(self, a: int, alpha: int) -> int:
        return self.table[a * self.algebra.atom_count + alpha]

    def row(self, a: int) -> tuple[int, ...]:
        n = self.algebra.atom_count
        return self.table[a * n : (a + 1) * n]

    def with_cell(self, a: int, alpha: int, value: int) -> "SelectionFunction":
        table = list(self.table)
        table[a * self.algebra.atom_count + alpha] = self.algebra.check(value)
        return SelectionFunction(self.algebra, tuple(table))

    def is_normal(self) -> bool:
        return _normality(self)


# -- frame properties -------------------------------------------------------


def _cells(f: SelectionFunction) -> Iterator[tuple[int, int, int]]:
    n = f.algebra.atom_count
    for i, image in enumerate(f.table):
        yield i // n, i % n, image


def _emptiness(f):
    return not any(f.row(0))


def _normality(f):
    return all(f.table[f.algebra.atom_count :])


def _identity(f):
    return all(image & ~a == 0 for a, _, image in _cells(f))


def _centering_1(f):
    return all(not a >> alpha & 1 or image >> alpha & 1 for a, alpha, image in _cells(f))


def _centering_2(f):
    return all(
        not a >> alpha & 1 or image & ~(1 << alpha) == 0 for a, alpha, image in _cells(f)
    )


def _centering(f):
    return all(not a >> alpha & 1 or image == 1 << alpha for a, alpha, image in _cells(f))


def _uniqueness_weak(f):
    return all(image & (image - 1) == 0 for image in f.table)


def _uniqueness_strict(f):
    # Quantified over a ≠ ⊥ only; the ⊥ row is unconstrained.
    return all(image and image & (image - 1) == 0 for image in f.table[f.algebra.atom_count :])


def _well_order(f):
    n = f.algebra.atom_count
    events = f.algebra.events()
    table = f.table
    for alpha in range(n):
        col = table[alpha::n]
        for a in events:
            fa = col[a]
            for b in events:
                fb = col[b]
                if fa & ~b == 0 and fb & ~a == 0 and fa != fb:
                    return False
    return True


def _nesting(f):
    n = f.algebra.atom_count
    events = f.algebra.events()
    table = f.table
    for alpha in range(n):
        col = table[alpha::n]
        for a in events:
            fa = col[a]
            for b in events:
                fab = col[a | b]
                if fab & ~a and fab & ~b and fab != fa | col[b]:
                    return False
    return True


_CHECKS = {
    FrameProperty.EMPTINESS: _emptiness,
    FrameProperty.NORMALITY: _normality,
    FrameProperty.IDENTITY: _identity,
    FrameProperty.CENTERING_1: _centering_1,
    FrameProperty.CENTERING_2: _centering_2,
    FrameProperty.CENTERING: _centering,
    FrameProperty.UNIQUENESS_WEAK: _uniqueness_weak,
    FrameProperty.UNIQUENESS_STRICT: _uniqueness_strict,
    FrameProperty.WELL_ORDER: _well_order,
    FrameProperty.NESTING: _nesting,
}


def check_property(f: SelectionFunction, prop: FrameProperty) -> bool:
    """Decide a frame property by brute-force quantification over the table.

    ``UNIQUENESS_WEAK`` is ``|f(a, α)| <= 1`` everywhere.
    ``UNIQUENESS_STRICT`` is ``|f(a, α)| == 1`` for every ``a != ⊥``.
    """
    return _CHECKS[FrameProperty(prop)](f)


def properties_of(f: SelectionFunction) -> frozenset[FrameProperty]:
    return frozenset(p for p in FrameProperty if _CHECKS[p](f))


@dataclass(frozen=True)
class Classification:
    properties: frozenset[FrameProperty]
    classes: frozenset[ConditionalClass]

    @property
    def strongest(self) -> ConditionalClass:
        for c in (
            ConditionalClass.STALNAKER,
            ConditionalClass.COUNTERFACTUAL,
            ConditionalClass.VARIABLY_STRICT,
        ):
            if c in self.classes:
                return c
        return ConditionalClass.UNCLASSIFIED


def classify(f: SelectionFunction) -> Classification:
    props = properties_of(f)
    classes = set()
    if {FrameProperty.IDENTITY, FrameProperty.WELL_ORDER, FrameProperty.NESTING} <= props:
        classes.add(ConditionalClass.VARIABLY_STRICT)
        if FrameProperty.CENTERING in props:
            classes.add(ConditionalClass.COUNTERFACTUAL)
            if FrameProperty.UNIQUENESS_WEAK in props:
                classes.add(ConditionalClass.STALNAKER)
    else:
        classes.add(ConditionalClass.UNCLASSIFIED)
    return Classification(props, frozenset(classes))


# -- per-cell constraint bounds ----------------------------------------------


def _cell_bounds(a: int, alpha: int, top: int, constraints: frozenset) -> tuple[int, int, int, int]:
    """Describe the events allowed in cell ``(a, alpha)`` by local properties.

    Returns ``(upper, lower, min_card, max_card)``: allowed events ``x`` satisfy
    ``lower ⊆ x ⊆ upper`` and ``min_card <= |x| <= max_card``.
    """
    P = FrameProperty
    upper, lower, lo, hi = top, 0, 0, top.bit_length()
    point = 1 << alpha
    inside = a & point
    if P.EMPTINESS in constraints and a == 0:
        upper = 0
    if P.NORMALITY in constraints and a:
        lo = max(lo, 1)
    if P.IDENTITY in constraints:
        upper &= a
    if inside and (P.CENTERING_1 in constraints or P.CENTERING in constraints):
        lower |= point
    if inside and (P.CENTERING_2 in constraints or P.CENTERING in constraints):
        upper &= point
    if P.UNIQUENESS_WEAK in constraints:
        hi = min(hi, 1)
    if P.UNIQUENESS_STRICT in constraints and a:
        lo, hi = max(lo, 1), min(hi, 1)
    return upper, lower, lo, hi


def _count(bounds) -> int:
    upper, lower, lo, hi = bounds
    if lower & ~upper:
        return 0
    forced = cardinality(lower)
    free = cardinality(upper & ~lower)
    return sum(comb(free, s - forced) for s in range(max(lo, forced), min(hi, forced + free) + 1))


def _allowed(bounds) -> list[int]:
    upper, lower, lo, hi = bounds
    if lower & ~upper:
        return []
    return [x for x in subevents(upper) if x & lower == lower and lo <= cardinality(x) <= hi]


def _all_bounds(algebra: Algebra, constraints: frozenset):
    n, top = algebra.atom_count, algebra.top
    return [_cell_bounds(a, alpha, top, constraints) for a in algebra.events() for alpha in range(n)]


# -- exhaustive enumeration ---------------------------------------------------


def default_budget() -> int:
    raw = os.environ.get("IMAGO_BUDGET")
    return int(raw) if raw else DEFAULT_BUDGET


def _codomains(algebra: Algebra, constraints: frozenset) -> list[list[int]]:
    codomains = [_allowed(b) for b in _all_bounds(algebra, constraints)]
    for i, options in enumerate(codomains):
        if not options:
            a, alpha = divmod(i, algebra.atom_count)
            raise UnsatisfiableConstraintsError(
                f"no event satisfies {sorted(c.value for c in constraints)} "
                f"at cell ({algebra.format(a)}, {algebra.atom_names[alpha]})"
            )
    return codomains


def enumeration_bound(algebra: Algebra, constraints: Iterable[FrameProperty] = ()) -> int:
    """Number of candidate tables before global-property filtering.

    Unconstrained this is ``(2**n) ** (2**n * n)``; local properties shrink
    each cell's codomain.
    """
    constraints = frozenset(map(FrameProperty, constraints))
    if not constraints & LOCAL_PROPERTIES:
        return algebra.size ** (algebra.size * algebra.atom_count)
    return prod(_count(b) for b in _all_bounds(algebra, constraints))


def enumerate_indexed(
    algebra: Algebra,
    constraints: Iterable[FrameProperty] = (),
    *,
    budget: int | None = None,
    start: int = 0,
    stop: int | None = None,
) -> Iterator[tuple[int, SelectionFunction]]:
    """Yield ``(candidate_index, f)`` in lexicographic table order.

    ``start``/``stop`` slice the candidate stream (before global filtering), so
    disjoint ranges partition the output.
    """
    constraints = frozenset(map(FrameProperty, constraints))
    budget = default_budget() if budget is None else budget
    bound = enumeration_bound(algebra, constraints)
    if bound > budget:
        raise BudgetExceededError(bound, budget)
    codomains = _codomains(algebra, constraints)
    globals_ = [_CHECKS[p] for p in constraints & GLOBAL_PROPERTIES]
    for index, table in enumerate(islice(product(*codomains), start, stop), start):
        f = SelectionFunction(algebra, table)
        if all(check(f) for check in globals_):
            yield index, f


def enumerate_selection_functions(
    algebra: Algebra,
    constraints: Iterable[FrameProperty] = (),
    *,
    budget: int | None = None,
) -> Iterator[SelectionFunction]:
    """Every selection function satisfying ``constraints``, each exactly once."""
    for _, f in enumerate_indexed(algebra, constraints, budget=budget):
        yield f


# -- seeded sampling -----------------------------------------------------------


def _sample_cell(rng: random.Random, bounds) -> int | None:
    upper, lower, lo, hi = bounds
    if lower & ~upper:
        return None
    free = atoms_of(upper & ~lower)
    forced = cardinality(lower)
    sizes = range(max(lo, forced), min(hi, forced + len(free)) + 1)
    weights = [comb(len(free), s - forced) for s in sizes]
    total = sum(weights)
    if not total:
        return None
    r = rng.randrange(total)
    for size, w in zip(sizes, weights):
        if r < w:
            break
        r -= w
    x = lower
    for i in rng.sample(free, size - forced):
        x |= 1 << i
    return x


def _sample_local(rng, algebra, all_bounds) -> SelectionFunction:
    table = []
    for i, bounds in enumerate(all_bounds):
        x = _sample_cell(rng, bounds)
        if x is None:
            a, alpha = divmod(i, algebra.atom_count)
            raise UnsatisfiableConstraintsError(
                f"no event is allowed at cell ({algebra.format(a)}, {algebra.atom_names[alpha]})"
            )
        table.append(x)
    return SelectionFunction(algebra, tuple(table))


def _sample_ranked(rng, algebra, constraints) -> SelectionFunction:
    """Minimal ``a``-worlds under a random preorder attached to each world."""
    P = FrameProperty
    n = algebra.atom_count
    total_order = bool(constraints & {P.UNIQUENESS_WEAK, P.UNIQUENESS_STRICT})
    centered = bool(constraints & {P.CENTERING_1, P.CENTERING_2, P.CENTERING})
    columns = []
    for alpha in range(n):
        if total_order:
            ranks = list(range(n))
            rng.shuffle(ranks)
        else:
            ranks = [rng.randrange(n) for _ in range(n)]
        if centered:
            ranks[alpha] = -1
        best_rank = [n] * algebra.size
        best_set = [0] * algebra.size
        for x in range(1, algebra.size):
            low = x & -x
            rest = x ^ low
            r = ranks[low.bit_length() - 1]
            if not rest or r < best_rank[rest]:
                best_rank[x], best_set[x] = r, low
            elif r == best_rank[rest]:
                best_rank[x], best_set[x] = r, best_set[rest] | low
            else:
                best_rank[x], best_set[x] = best_rank[rest], best_set[rest]
        columns.append(best_set)
    table = tuple(columns[alpha][a] for a in algebra.events() for alpha in range(n))
    return SelectionFunction(algebra, table)


def sample_selection_function(
    algebra: Algebra,
    constraints: Iterable[FrameProperty] = (),
    seed: int = 0,
    *,
    max_retries: int = DEFAULT_MAX_RETRIES,
) -> SelectionFunction:
    """Draw a selection function satisfying ``constraints``, deterministically per seed.

    Local properties are enforced cell by cell (uniform over each cell's
    allowed events).  Well-order and nesting are enforced by rejection, except
    when identity is also requested: then ``f(a, α)`` is taken as the minimal
    ``a``-worlds of a random per-world ranking, which satisfies both by
    construction.
    """
    constraints = frozenset(map(FrameProperty, constraints))
    rng = random.Random(seed)
    all_bounds = _all_bounds(algebra, constraints)
    global_ = constraints & GLOBAL_PROPERTIES
    if not global_:
        return _sample_local(rng, algebra, all_bounds)
    if FrameProperty.IDENTITY in constraints:
        f = _sample_ranked(rng, algebra, constraints)
        missing = [p.value for p in constraints if not _CHECKS[p](f)]
        if missing:
            raise UnsatisfiableConstraintsError(f"ranked sample violates {missing}")
        return f
    for _ in range(max_retries):
        f = _sample_local(rng, algebra, all_bounds)
        if all(_CHECKS[p](f) for p in global_):
            return f
    raise RetryCapExceededError(
        f"no sample satisfied {sorted(p.value for p in global_)} after {max_retries} retries"
    )
