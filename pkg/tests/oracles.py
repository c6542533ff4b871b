"""Brute-force reference implementations used as test oracles.

Everything here works on ``frozenset`` events and plain dictionaries and
shares no code with the package, so agreement is evidence rather than
tautology.  Selection functions are read through ``f(a, alpha)`` with
bitmask arguments and converted on the spot.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations


def to_set(x: int) -> frozenset[int]:
    return frozenset(i for i in range(x.bit_length()) if x >> i & 1)


def to_mask(s) -> int:
    return sum(1 << i for i in s)


def all_events(n: int) -> list[frozenset[int]]:
    atoms = range(n)
    return [frozenset(c) for k in range(n + 1) for c in combinations(atoms, k)]


def image(f, a: frozenset, alpha: int) -> frozenset:
    return to_set(f(to_mask(a), alpha))


def conditional(f, n: int, a: frozenset, b: frozenset) -> frozenset:
    """Worlds whose selected ``a``-worlds all satisfy ``b``."""
    return frozenset(alpha for alpha in range(n) if image(f, a, alpha) <= b)


def box(f, n: int, a: frozenset, b: frozenset) -> frozenset:
    """Necessity over ``alpha R beta`` iff ``beta`` is selected from ``alpha``."""
    relation = {(alpha, beta) for alpha in range(n) for beta in image(f, a, alpha)}
    return frozenset(
        alpha for alpha in range(n)
        if all(beta in b for (x, beta) in relation if x == alpha)
    )


def diamond(f, n: int, a: frozenset, b: frozenset) -> frozenset:
    relation = {(alpha, beta) for alpha in range(n) for beta in image(f, a, alpha)}
    return frozenset(
        alpha for alpha in range(n)
        if any(beta in b for (x, beta) in relation if x == alpha)
    )


def prob(weights, s) -> Fraction:
    return sum((Fraction(weights[i]) for i in s), Fraction(0))


def mass(f, weights, a: frozenset) -> dict[frozenset, Fraction]:
    out: dict[frozenset, Fraction] = {}
    for alpha, w in enumerate(weights):
        c = image(f, a, alpha)
        out[c] = out.get(c, Fraction(0)) + Fraction(w)
    return out


def belief(f, weights, a: frozenset, b: frozenset) -> Fraction:
    return sum((m for c, m in mass(f, weights, a).items() if c <= b), Fraction(0))


def updated(weights, lam_weight, n: int, a: frozenset, beta: int) -> Fraction:
    """``sum_alpha lam(a, alpha)(beta) * P(alpha)`` with ``lam_weight(a_mask, alpha, beta)``."""
    return sum(
        (Fraction(lam_weight(to_mask(a), alpha, beta)) * Fraction(weights[alpha]) for alpha in range(n)),
        Fraction(0),
    )


def updated_event(weights, lam_weight, n: int, a: frozenset, b: frozenset) -> Fraction:
    return sum((updated(weights, lam_weight, n, a, beta) for beta in b), Fraction(0))


def is_probability(values: dict[frozenset, Fraction], n: int) -> bool:
    """Finite additivity over disjoint pairs plus range and endpoint conditions."""
    events = all_events(n)
    if values[frozenset()] != 0 or values[frozenset(range(n))] != 1:
        return False
    if any(not 0 <= values[e] <= 1 for e in events):
        return False
    return all(values[x | y] == values[x] + values[y] for x in events for y in events if not x & y)


# Frame properties written straight from their set-theoretic definitions.


def frame_properties(f, n: int) -> dict[str, bool]:
    events = all_events(n)
    nonempty = [e for e in events if e]
    cells = [(a, alpha, image(f, a, alpha)) for a in events for alpha in range(n)]
    return {
        "emptiness": all(image(f, frozenset(), alpha) == frozenset() for alpha in range(n)),
        "normality": all(image(f, a, alpha) for a in nonempty for alpha in range(n)),
        "identity": all(s <= a for a, _, s in cells),
        "centering-1": all(alpha in s for a, alpha, s in cells if alpha in a),
        "centering-2": all(s <= {alpha} for a, alpha, s in cells if alpha in a),
        "centering": all(s == {alpha} for a, alpha, s in cells if alpha in a),
        "uniqueness-weak": all(len(s) <= 1 for _, _, s in cells),
        "uniqueness-strict": all(len(s) == 1 for a, _, s in cells if a),
        "well-order": all(
            image(f, a, alpha) == image(f, b, alpha)
            for a in events for b in events for alpha in range(n)
            if image(f, a, alpha) <= b and image(f, b, alpha) <= a
        ),
        "nesting": all(
            image(f, a | b, alpha) <= a
            or image(f, a | b, alpha) <= b
            or image(f, a | b, alpha) == image(f, a, alpha) | image(f, b, alpha)
            for a in events for b in events for alpha in range(n)
        ),
    }
