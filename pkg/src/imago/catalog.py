"""Concrete selection functions and models used by the demo and the tests."""

from __future__ import annotations

from fractions import Fraction

from .algebra import Algebra
from .belief import ProbabilityDist
from .modelfile import Model
from .selection import SelectionFunction
from .update import LambdaKind, build_lambda

# The three-atom worked example: antecedent {a2, a3}, consequent {a2}.
EXAMPLE_ANTECEDENT = 0b110
EXAMPLE_CONSEQUENT = 0b010


def centered_least_atom(algebra: Algebra) -> SelectionFunction:
    """``f(a, α) = {α}`` if ``α ∈ a``, else the lowest-index atom of ``a``.

    Each world ranks itself first and the rest by index, so this is a
    Stalnaker selection function.
    """
    return SelectionFunction.from_callable(
        algebra, lambda a, alpha: (1 << alpha) if a >> alpha & 1 else a & -a
    )


def worked_algebra() -> Algebra:
    return Algebra(3, ("a1", "a2", "a3"))


def worked_selection(lewis: bool = False) -> SelectionFunction:
    """The worked example's ``f``: world ``a1`` selects both ``{a2, a3}``-worlds.

    Only three cells are fixed by the example; the rest follow
    :func:`centered_least_atom`, so ``({a2, a3}, a1)`` is the one cell with
    more than one selected world.  ``lewis=True`` shrinks that cell to ``{a2}``.
    """
    base = centered_least_atom(worked_algebra())
    if lewis:
        return base
    return base.with_cell(EXAMPLE_ANTECEDENT, 0, EXAMPLE_ANTECEDENT)


def worked_probability() -> ProbabilityDist:
    return ProbabilityDist(worked_algebra(), (Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)))


def worked_model(lewis: bool = False) -> Model:
    f = worked_selection(lewis)
    P = worked_probability()
    return Model(f, P, build_lambda(LambdaKind.UNIFORM, P, f))


def stalnaker_model() -> Model:
    f = centered_least_atom(worked_algebra())
    P = worked_probability()
    return Model(f, P, build_lambda(LambdaKind.LEWIS, P, f))
