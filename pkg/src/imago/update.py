"""Generalized imaging: redistributing prior mass through ``f`` and ``λ``.

A distribution function ``λ`` assigns, to every cell ``(a, α)`` with
``a != ⊥``, a probability distribution over the selected atoms ``f(a, α)``.
Only the selected atoms are stored; every other weight is zero.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import lcm
from typing import Mapping

from .algebra import atoms_of, cardinality
from .belief import ProbabilityDist, conditional_numerators, subset_sums
from .errors import PreconditionError
from .selection import FrameProperty, SelectionFunction, check_property

Cell = tuple[int, int]


class DomainError(PreconditionError):
    """The λ-update is undefined at the bottom antecedent."""


@dataclass(frozen=True, eq=False)
class DistributionFunction:
    selection: SelectionFunction
    cells: Mapping[Cell, Mapping[int, Fraction]]

    def weight(self, a: int, alpha: int, beta: int) -> Fraction:
        return self.cells.get((a, alpha), {}).get(beta, Fraction(0))

    def cell(self, a: int, alpha: int) -> Mapping[int, Fraction]:
        return self.cells.get((a, alpha), {})

    def __eq__(self, other):
        if not isinstance(other, DistributionFunction):
            return NotImplemented
        return self.selection == other.selection and _canonical(self) == _canonical(other)


def _canonical(lam: DistributionFunction):
    return {
        cell: {beta: w for beta, w in weights.items() if w}
        for cell, weights in lam.cells.items()
        if cell[0]
    }


class LambdaKind(str, Enum):
    UNIFORM = "uniform"
    LEWIS = "lewis"
    BAYES = "bayes"


@dataclass(frozen=True)
class Violation:
    cell: Cell | None
    constraint: str
    message: str


def validate_lambda(lam: DistributionFunction) -> tuple[bool, list[Violation]]:
    """Check both λ constraints on every cell with ``a != ⊥``.

    ``support``: the weight is zero exactly off ``f(a, α)``.
    ``normalization``: the weights of a cell sum to one.
    ``structure``: ``f(a, α)`` is empty (no distribution can live on it) or the
    cell is missing.  ``range``: a weight lies outside ``[0, 1]``.
    """
    f = lam.selection
    alg = f.algebra
    violations = []
    for a in range(1, alg.size):
        for alpha in alg.atoms():
            image = f(a, alpha)
            cell = (a, alpha)
            if not image:
                violations.append(
                    Violation(cell, "structure", "f is not normal here: empty selected set")
                )
                continue
            if cell not in lam.cells:
                violations.append(Violation(cell, "structure", "missing cell"))
                continue
            weights = lam.cells[cell]
            for beta, w in weights.items():
                if not 0 <= w <= 1:
                    violations.append(Violation(cell, "range", f"weight {w} on atom {beta}"))
                if w and not image >> beta & 1:
                    violations.append(
                        Violation(cell, "support", f"nonzero weight on unselected atom {beta}")
                    )
            for beta in atoms_of(image):
                if not weights.get(beta):
                    violations.append(
                        Violation(cell, "support", f"zero weight on selected atom {beta}")
                    )
            total = sum(weights.values(), Fraction(0))
            if total != 1:
                violations.append(Violation(cell, "normalization", f"weights sum to {total}"))
    return not violations, violations


def _require_valid(lam: DistributionFunction):
    ok, violations = validate_lambda(lam)
    if not ok:
        v = violations[0]
        raise PreconditionError(f"invalid λ at cell {v.cell}: {v.constraint}: {v.message}")


def _require_normal(f: SelectionFunction):
    if not f.is_normal():
        raise PreconditionError("selection function is not normal")


# -- the update -------------------------------------------------------------------


def _integer_rows(lam: DistributionFunction, a: int) -> tuple[int, list[list[tuple[int, int]]]]:
    """λ's row at ``a`` as integer weights over one denominator, memoized on ``lam``."""
    memo = lam.__dict__.setdefault("_integer_rows", {})
    if a not in memo:
        cells = [lam.cell(a, alpha) for alpha in range(lam.selection.algebra.atom_count)]
        den = lcm(*(w.denominator for cell in cells for w in cell.values()))
        memo[a] = den, [
            [(beta, w.numerator * (den // w.denominator)) for beta, w in cell.items() if w]
            for cell in cells
        ]
    return memo[a]


def updated_numerators(P: ProbabilityDist, lam: DistributionFunction, a: int) -> tuple[list[int], int]:
    """``P_a^λ(b)`` for every ``b`` as integer numerators over a shared denominator."""
    if P.algebra.check(a) == 0:
        raise DomainError("the λ-update is only defined for a non-bottom antecedent")
    scale, rows = _integer_rows(lam, a)
    out = [0] * P.algebra.atom_count
    for num, row in zip(P.numerators, rows):
        for beta, w in row:
            out[beta] += w * num
    return subset_sums(out), P.denominator * scale


def updated_distribution(
    P: ProbabilityDist, lam: DistributionFunction, a: int
) -> tuple[Fraction, ...]:
    """``P_a^λ(β)`` for every atom: each ``α`` hands its mass to ``f(a, α)`` in proportion ``λ(a, α)``."""
    sums, den = updated_numerators(P, lam, a)
    return tuple(Fraction(sums[1 << beta], den) for beta in range(P.algebra.atom_count))


def updated_prob(P: ProbabilityDist, lam: DistributionFunction, a: int, b: int) -> Fraction:
    P.algebra.check(b)
    sums, den = updated_numerators(P, lam, a)
    return Fraction(sums[b], den)


# -- canonical λ builders -----------------------------------------------------------


def build_lambda(kind: LambdaKind, P: ProbabilityDist, f: SelectionFunction) -> DistributionFunction:
    """Distribution functions for the standard updates.

    ``uniform`` spreads mass evenly over the selected atoms (general imaging),
    ``lewis`` sends it to the single selected atom (imaging), and ``bayes``,
    given ``f(a, α) = a``, splits it in proportion to the prior
    (conditionalization).
    """
    kind = LambdaKind(kind)
    alg = f.algebra
    cells = {}
    if kind is LambdaKind.BAYES:
        for a in range(1, alg.size):
            if any(image != a for image in f.row(a)):
                raise PreconditionError("bayes λ requires the selection f(a, α) = a for every a ≠ ⊥")
        for a in range(1, alg.size):
            pa = sum(P.weights[beta] for beta in atoms_of(a))
            weights = {beta: P.weights[beta] / pa for beta in atoms_of(a)}
            for alpha in alg.atoms():
                cells[a, alpha] = weights
        return DistributionFunction(f, cells)

    if kind is LambdaKind.LEWIS and not check_property(f, FrameProperty.UNIQUENESS_STRICT):
        raise PreconditionError("lewis λ requires every cell with a ≠ ⊥ to select exactly one atom")
    _require_normal(f)
    for a in range(1, alg.size):
        for alpha, image in enumerate(f.row(a)):
            share = Fraction(1, cardinality(image))
            cells[a, alpha] = {beta: share for beta in atoms_of(image)}
    return DistributionFunction(f, cells)


def random_lambda(f: SelectionFunction, rng: random.Random, max_weight: int = 1000) -> DistributionFunction:
    """Positive integer weights on each selected set, normalized exactly."""
    _require_normal(f)
    cells = {}
    for a in range(1, f.algebra.size):
        for alpha, image in enumerate(f.row(a)):
            support = atoms_of(image)
            raw = [rng.randint(1, max_weight) for _ in support]
            total = sum(raw)
            cells[a, alpha] = {beta: Fraction(r, total) for beta, r in zip(support, raw)}
    return DistributionFunction(f, cells)


def total_selection(algebra) -> SelectionFunction:
    """``f(a, α) = a``: every ``a``-world is equally close to every world."""
    return SelectionFunction.from_callable(algebra, lambda a, alpha: a)


# -- dominance and the equality criterion -----------------------------------------------------------


def _comparisons(P: ProbabilityDist, f: SelectionFunction, lam: DistributionFunction):
    """Yield ``(a, b, P(a ▷ b), P_a^λ(b))`` as numerator pairs plus denominator."""
    if lam.selection != f:
        raise PreconditionError("λ was built for a different selection function")
    _require_normal(f)
    _require_valid(lam)
    for a in range(1, f.algebra.size):
        cond = conditional_numerators(P, f, a)
        upd, den = updated_numerators(P, lam, a)
        scale = den // P.denominator
        yield a, [c * scale for c in cond], upd, den


@dataclass(frozen=True)
class Fact7Result:
    holds: bool
    worst_gap: Fraction
    witness: tuple[int, int] | None


def fact7_check(P: ProbabilityDist, f: SelectionFunction, lam: DistributionFunction) -> Fact7Result:
    """Check ``P(a ▷ b) <= P_a^λ(b)`` on every ``a != ⊥`` and ``b``.

    ``worst_gap`` is the largest ``P_a^λ(b) - P(a ▷ b)`` and ``witness`` the
    least ``(a, b)`` attaining it.
    """
    holds = True
    worst, witness = None, None
    for a, cond, upd, den in _comparisons(P, f, lam):
        for b, (c, u) in enumerate(zip(cond, upd)):
            if c > u:
                holds = False
            gap = Fraction(u - c, den)
            if worst is None or gap > worst:
                worst, witness = gap, (a, b)
    return Fact7Result(holds, worst, witness)


@dataclass(frozen=True)
class Theorem1Result:
    equality_forall: bool
    uniqueness: bool
    witness: tuple[int, int] | None

    @property
    def agree(self) -> bool:
        return self.equality_forall == self.uniqueness


def theorem1_check(P: ProbabilityDist, f: SelectionFunction, lam: DistributionFunction) -> Theorem1Result:
    """Compare ``∀ a≠⊥, b: P(a ▷ b) = P_a^λ(b)`` against strict uniqueness of ``f``.

    ``witness`` is the least ``(a, b)`` where the two sides differ.
    """
    witness = None
    for a, cond, upd, _ in _comparisons(P, f, lam):
        for b, (c, u) in enumerate(zip(cond, upd)):
            if c != u:
                witness = (a, b)
                break
        if witness:
            break
    return Theorem1Result(
        equality_forall=witness is None,
        uniqueness=check_property(f, FrameProperty.UNIQUENESS_STRICT),
        witness=witness,
    )
