"""The selection-function conditional and the indexed modal operators.

``conditional`` reads the selection table directly (``α ∈ a ▷ b`` iff
``f(a, α) ⊆ b``).  ``box`` and ``diamond`` go through the accessibility
relation ``α R_a β`` iff ``β ∈ f(a, α)``, treated as a Kripke frame on the
atoms.  Keeping the two routes separate is what gives the equality checks
in the verifier teeth.
"""

from __future__ import annotations

from .algebra import atoms_of, leq
from .selection import FrameProperty, SelectionFunction, check_property


def conditional(f: SelectionFunction, a: int, b: int) -> int:
    """``a ▷_f b``: the atoms whose selected ``a``-worlds all lie in ``b``."""
    f.algebra.check(a)
    f.algebra.check(b)
    out = 0
    outside = ~b
    for alpha, image in enumerate(f.row(a)):
        if not image & outside:
            out |= 1 << alpha
    return out


def conditional_table(f: SelectionFunction) -> list[list[int]]:
    """``T[a][b] == conditional(f, a, b)`` for every pair of events."""
    events = f.algebra.events()
    n = f.algebra.atom_count
    table = []
    for a in events:
        row = f.table[a * n : (a + 1) * n]
        cells = []
        for b in events:
            outside = ~b
            out = 0
            for alpha in range(n):
                if not row[alpha] & outside:
                    out |= 1 << alpha
            cells.append(out)
        table.append(cells)
    return table


def successors(f: SelectionFunction, a: int) -> tuple[tuple[int, ...], ...]:
    """``R_a^f`` as successor lists: entry ``α`` holds every ``β`` with ``α R β``."""
    return tuple(tuple(atoms_of(image)) for image in f.row(f.algebra.check(a)))


def accessibility(f: SelectionFunction, a: int) -> frozenset[tuple[int, int]]:
    return frozenset(
        (alpha, beta) for alpha, succ in enumerate(successors(f, a)) for beta in succ
    )


def _box(succ, b: int) -> int:
    out = 0
    for alpha, betas in enumerate(succ):
        for beta in betas:
            if not b >> beta & 1:
                break
        else:
            out |= 1 << alpha
    return out


def _diamond(succ, b: int) -> int:
    out = 0
    for alpha, betas in enumerate(succ):
        for beta in betas:
            if b >> beta & 1:
                out |= 1 << alpha
                break
    return out


def box(f: SelectionFunction, a: int, b: int) -> int:
    return _box(successors(f, a), f.algebra.check(b))


def diamond(f: SelectionFunction, a: int, b: int) -> int:
    return _diamond(successors(f, a), f.algebra.check(b))


def box_table(f: SelectionFunction, a: int) -> list[int]:
    """``box(f, a, b)`` for every ``b``, sharing one successor computation."""
    succ = successors(f, a)
    return [_box(succ, b) for b in f.algebra.events()]


def diamond_table(f: SelectionFunction, a: int) -> list[int]:
    succ = successors(f, a)
    return [_diamond(succ, b) for b in f.algebra.events()]


def is_functional(f: SelectionFunction, a: int) -> bool:
    """Whether ``R_a^f`` is a total function on the atoms."""
    return all(len(betas) == 1 for betas in successors(f, a))


def box_equals_diamond(f: SelectionFunction, a: int) -> bool:
    succ = successors(f, a)
    for x in f.algebra.events():
        if _box(succ, x) != _diamond(succ, x):
            return False
    return True


# -- frame properties as algebraic identities ------------------------


def _row_identities(f: SelectionFunction, T: list[list[int]]):
    """Map each frame property to a thunk evaluating its algebraic identity."""
    alg = f.algebra
    top = alg.top
    events = alg.events()
    nonzero = range(1, alg.size)

    def neg(x):
        return top & ~x

    def emptiness():
        return all(T[0][b] == top for b in events)

    def normality():
        # T[d][b] ≤ ¬T[d][¬b], i.e. the two sets are disjoint
        return all(T[d][b] & T[d][neg(b)] == 0 for d in nonzero for b in events)

    def identity():
        return all(T[a][a] == top for a in events)

    def centering_1():
        return all(leq(T[a][b], neg(a) | b) for a in events for b in events)

    def centering_2():
        return all(leq(a & b, T[a][b]) for a in events for b in events)

    def centering():
        return all(
            leq(a & b, T[a][b]) and leq(T[a][b], neg(a) | b) for a in events for b in events
        )

    def uniqueness_weak():
        return all(T[a][neg(b)] | T[a][b] == top for a in events for b in events)

    def uniqueness_strict():
        return all(T[d][neg(b)] == neg(T[d][b]) for d in nonzero for b in events)

    def well_order():
        for a in events:
            Ta = T[a]
            for b in events:
                Tb = T[b]
                # (a ▷ b) ∧ (b ▷ a) ≤ (a ▷ c) ↔ (b ▷ c): the meet must miss
                # every atom where the two sides disagree.
                both = Ta[b] & Tb[a]
                if both:
                    for c in events:
                        if both & (Ta[c] ^ Tb[c]):
                            return False
        return True

    def nesting():
        for a in events:
            Ta = T[a]
            for b in events:
                Tb = T[b]
                Tab = T[a | b]
                open_ = top & ~(Tab[a] | Tab[b])
                if open_:
                    for c in events:
                        if open_ & (Tab[c] ^ (Ta[c] & Tb[c])):
                            return False
        return True

    P = FrameProperty
    return {
        P.EMPTINESS: emptiness,
        P.NORMALITY: normality,
        P.IDENTITY: identity,
        P.CENTERING_1: centering_1,
        P.CENTERING_2: centering_2,
        P.CENTERING: centering,
        P.UNIQUENESS_WEAK: uniqueness_weak,
        P.UNIQUENESS_STRICT: uniqueness_strict,
        P.WELL_ORDER: well_order,
        P.NESTING: nesting,
    }


def check_fact1(f: SelectionFunction, rows=None) -> dict[FrameProperty, tuple[bool, bool]]:
    """``(identity side, frame-property side)`` for each requested row.

    The identity side quantifies over all events; the nesting row reads its
    third disjunct pointwise, as the biconditional element
    ``((a ∨ b) ▷ c) ↔ ((a ▷ c) ∧ (b ▷ c))``.
    """
    rows = list(FrameProperty) if rows is None else [FrameProperty(r) for r in rows]
    identities = _row_identities(f, conditional_table(f))
    return {row: (identities[row](), check_property(f, row)) for row in rows}


def check_fact1_row(f: SelectionFunction, row: FrameProperty) -> tuple[bool, bool]:
    return check_fact1(f, [row])[FrameProperty(row)]
