"""Probabilities of conditionals as imaged belief functions.

All arithmetic is exact.  Hot paths work on integer numerators over the
distribution's common denominator; public results are ``Fraction``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from math import lcm
from typing import Iterable, Mapping, Sequence

import numpy as np

from .algebra import Algebra, BOTTOM, leq
from .conditional import box_equals_diamond, conditional, is_functional
from .errors import PreconditionError
from .selection import SelectionFunction


def to_fraction(value) -> Fraction:
    """Exact rational from ``int``, ``Fraction`` or a ``"p/q"`` string; floats are refused."""
    if isinstance(value, bool) or isinstance(value, float):
        raise TypeError(f"refusing inexact value {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot read {value!r} as a rational")


@dataclass(frozen=True)
class ProbabilityDist:
    """A positive probability distribution on the atoms of ``algebra``."""

    algebra: Algebra
    weights: tuple[Fraction, ...]

    def __post_init__(self):
        weights = tuple(to_fraction(w) for w in self.weights)
        if len(weights) != self.algebra.atom_count:
            raise ValueError(
                f"expected {self.algebra.atom_count} weights, got {len(weights)}"
            )
        if any(w <= 0 for w in weights):
            raise ValueError("probability weights must be strictly positive")
        if sum(weights) != 1:
            raise ValueError(f"probability not normalized: weights sum to {sum(weights)}")
        object.__setattr__(self, "weights", weights)

    @classmethod
    def from_integers(cls, algebra: Algebra, counts: Sequence[int]) -> "ProbabilityDist":
        total = sum(counts)
        return cls(algebra, tuple(Fraction(c, total) for c in counts))

    @classmethod
    def uniform(cls, algebra: Algebra) -> "ProbabilityDist":
        return cls.from_integers(algebra, [1] * algebra.atom_count)

    @cached_property
    def denominator(self) -> int:
        return lcm(*(w.denominator for w in self.weights))

    @cached_property
    def numerators(self) -> tuple[int, ...]:
        d = self.denominator
        return tuple(w.numerator * (d // w.denominator) for w in self.weights)

    @cached_property
    def event_numerators(self) -> tuple[int, ...]:
        """``prob(x) * denominator`` for every event ``x``."""
        return tuple(subset_sums(self.numerators))


def sample_probability(algebra: Algebra, rng: random.Random, max_weight: int = 1000) -> ProbabilityDist:
    """Integer weights in ``[1, max_weight]`` per atom, normalized exactly."""
    return ProbabilityDist.from_integers(
        algebra, [rng.randint(1, max_weight) for _ in algebra.atoms()]
    )


def subset_sums(values: Sequence) -> list:
    """``out[x]`` is the sum of ``values[i]`` over the atoms ``i`` of ``x``."""
    out = [values[0] * 0] if values else [0]
    for i, v in enumerate(values):
        out.extend(s + v for s in out[: 1 << i])
    return out


def prob(P: ProbabilityDist, x: int) -> Fraction:
    P.algebra.check(x)
    return sum((w for i, w in enumerate(P.weights) if x >> i & 1), Fraction(0))


def prob_conditional(P: ProbabilityDist, f: SelectionFunction, a: int, b: int) -> Fraction:
    """``P(a ▷_f b)``: the probability of the atoms where the conditional holds."""
    return prob(P, conditional(f, a, b))


def conditional_numerators(P: ProbabilityDist, f: SelectionFunction, a: int) -> list[int]:
    """``P(a ▷_f b) * P.denominator`` for every ``b``."""
    masses = P.event_numerators
    row = f.row(f.algebra.check(a))
    out = []
    for b in f.algebra.events():
        outside = ~b
        x = 0
        for alpha, image in enumerate(row):
            if not image & outside:
                x |= 1 << alpha
        out.append(masses[x])
    return out


# -- mass and belief ------------------------------------------------------------


@dataclass(frozen=True)
class MassDistribution:
    """Mass ``m_a`` on events; events with zero mass are omitted."""

    antecedent: int
    entries: Mapping[int, Fraction] = field(default_factory=dict)

    def total(self) -> Fraction:
        return sum(self.entries.values(), Fraction(0))

    def belief(self, b: int) -> Fraction:
        """``Bel_a(b)``: the mass sitting on events below ``b``."""
        return sum((m for c, m in self.entries.items() if leq(c, b)), Fraction(0))


def _mass_numerators(P: ProbabilityDist, f: SelectionFunction, a: int) -> dict[int, int]:
    grouped: dict[int, int] = {}
    for num, image in zip(P.numerators, f.row(f.algebra.check(a))):
        grouped[image] = grouped.get(image, 0) + num
    return grouped


def imaged_mass(P: ProbabilityDist, f: SelectionFunction, a: int) -> MassDistribution:
    """``m_a(b)``: total prior mass of the atoms whose selected event is ``b``."""
    d = P.denominator
    grouped = _mass_numerators(P, f, a)
    return MassDistribution(a, {c: Fraction(m, d) for c, m in sorted(grouped.items())})


def imaged_belief(P: ProbabilityDist, f: SelectionFunction, a: int, b: int) -> Fraction:
    P.algebra.check(b)
    return imaged_mass(P, f, a).belief(b)


def belief_numerators(P: ProbabilityDist, f: SelectionFunction, a: int) -> list[int]:
    """``Bel_a(b) * P.denominator`` for every ``b``, summed from the mass entries."""
    grouped = list(_mass_numerators(P, f, a).items())
    return [sum(m for c, m in grouped if c & ~b == 0) for b in f.algebra.events()]


# -- pairwise laws over event tables ---------------------------------------------


# Below this many atoms plain loops beat numpy's per-call overhead.
_NUMPY_FROM = 4


@lru_cache(maxsize=None)
def _pairs(n: int, comparable: bool) -> tuple[tuple[int, int, int, int], ...]:
    """``(x, y, x ∨ y, x ∧ y)`` in ``x``-major order.

    ``comparable=False`` keeps the pairs where neither event is below the
    other (the modular law holds trivially on the rest); ``comparable=True``
    keeps the strictly increasing pairs ``x ⊂ y``.
    """
    size = 1 << n
    out = []
    for x in range(size):
        for y in range(size):
            meet = x & y
            if comparable == (meet == x and x != y) and (comparable or meet not in (x, y)):
                out.append((x, y, x | y, meet))
    return tuple(out)


@lru_cache(maxsize=None)
def _grid(n: int, comparable: bool):
    return tuple(np.array(col, dtype=np.int64) for col in zip(*_pairs(n, comparable))) or (
        np.zeros(0, dtype=np.int64),
    ) * 4


def _as_array(values) -> np.ndarray:
    if all(isinstance(v, int) for v in values) and max(map(abs, values), default=0) < 2**61:
        return np.asarray(values, dtype=np.int64)
    return np.asarray(values, dtype=object)


def _first_numpy(values, n, comparable, violated):
    v = _as_array(values)
    x, y, join, meet = _grid(n, comparable)
    hits = np.flatnonzero(violated(v[x], v[y], v[join], v[meet]))
    if not len(hits):
        return None
    return int(x[hits[0]]), int(y[hits[0]])


def _first(values, n, comparable, violated):
    if n >= _NUMPY_FROM:
        return _first_numpy(values, n, comparable, violated)
    for x, y, join, meet in _pairs(n, comparable):
        if violated(values[x], values[y], values[join], values[meet]):
            return x, y
    return None


def modular_violation(values, n: int) -> tuple[int, int] | None:
    """Least ``(x, y)`` with ``v(x ∨ y) + v(x ∧ y) != v(x) + v(y)``, if any."""
    return _first(values, n, False, lambda vx, vy, vj, vm: vj + vm != vx + vy)


def superadditivity_violation(values, n: int) -> tuple[int, int] | None:
    """Least ``(x, y)`` with ``v(x ∨ y) < v(x) + v(y) - v(x ∧ y)``, if any."""
    return _first(values, n, False, lambda vx, vy, vj, vm: vj + vm < vx + vy)


def monotonicity_violation(values, n: int) -> tuple[int, int] | None:
    """Least ``(x, y)`` with ``x ⊆ y`` but ``v(x) > v(y)``, if any."""
    return _first(values, n, True, lambda vx, vy, vj, vm: vx > vy)


# -- conditional-probability flags ----------------------------------------------------------------


@dataclass(frozen=True)
class Prop1Report:
    additive: bool
    unique: bool
    functional: bool
    box_eq_diamond: bool
    witness: tuple[int, int] | None
    bottom_belief: Fraction

    @property
    def agree(self) -> bool:
        return len({self.additive, self.unique, self.functional, self.box_eq_diamond}) == 1


def proposition1_report(P: ProbabilityDist, f: SelectionFunction, a: int) -> Prop1Report:
    """Evaluate the four equivalent conditions at antecedent ``a``.

    ``additive`` asks whether ``P(a ▷ ·)`` is a probability: zero at bottom,
    one at top, and the modular law on every pair.  ``witness`` is the least
    violating pair, or ``(⊥, ⊥)`` when only the bottom condition fails.
    """
    alg = P.algebra
    if f.algebra != alg:
        raise PreconditionError("probability and selection function live on different algebras")
    values = conditional_numerators(P, f, a)
    witness = modular_violation(values, alg.atom_count)
    bottom_ok = values[BOTTOM] == 0
    top_ok = values[alg.top] == P.denominator
    if witness is None and not (bottom_ok and top_ok):
        witness = (BOTTOM, BOTTOM)
    return Prop1Report(
        additive=witness is None,
        unique=all(image and image & (image - 1) == 0 for image in f.row(a)),
        functional=is_functional(f, a),
        box_eq_diamond=box_equals_diamond(f, a),
        witness=witness,
        bottom_belief=Fraction(values[BOTTOM], P.denominator),
    )


def is_probability(values: Iterable[Fraction], algebra: Algebra) -> bool:
    """Full axiom check on a table indexed by event: range, endpoints, additivity."""
    values = list(values)
    if any(v < 0 or v > 1 for v in values):
        return False
    if values[BOTTOM] != 0 or values[algebra.top] != 1:
        return False
    n = algebra.atom_count
    for x in algebra.events():
        for y in algebra.events():
            if x & y == 0 and values[x | y] != values[x] + values[y]:
                return False
    return modular_violation(values, n) is None
