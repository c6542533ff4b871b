"""Finite Boolean algebras as powersets of atom indices.

An event is a plain ``int`` whose bit ``i`` is set iff atom ``i`` lies below
it (little-endian: bit 0 is the first atom).  ``0`` is bottom and
``2**n - 1`` is top.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import InvalidEventError

MAX_ATOMS = 16

BOTTOM = 0


@dataclass(frozen=True)
class Algebra:
    """The Boolean algebra of all subsets of ``atom_count`` atoms."""

    atom_count: int
    atom_names: tuple[str, ...] = ()

    def __post_init__(self):
        n = self.atom_count
        if not isinstance(n, int) or not 1 <= n <= MAX_ATOMS:
            raise ValueError(f"atom_count must be in [1, {MAX_ATOMS}], got {n!r}")
        names = tuple(self.atom_names) or tuple(f"a{i + 1}" for i in range(n))
        if len(names) != n:
            raise ValueError(f"expected {n} atom names, got {len(names)}")
        if any(not isinstance(s, str) or not s for s in names):
            raise ValueError("atom names must be non-empty strings")
        if len(set(names)) != n:
            raise ValueError(f"atom names must be distinct: {names}")
        object.__setattr__(self, "atom_names", names)

    @property
    def top(self) -> int:
        return (1 << self.atom_count) - 1

    @property
    def size(self) -> int:
        """Number of events, ``2**n``."""
        return 1 << self.atom_count

    def events(self) -> range:
        return range(self.size)

    def atoms(self) -> range:
        return range(self.atom_count)

    def check(self, x: int) -> int:
        if type(x) is not int or not 0 <= x < 1 << self.atom_count:
            raise InvalidEventError(
                f"event {x!r} is not a subset of {self.atom_count} atoms"
            )
        return x

    def complement(self, x: int) -> int:
        return self.top & ~self.check(x)

    def implies(self, x: int, y: int) -> int:
        return self.complement(x) | self.check(y)

    def iff(self, x: int, y: int) -> int:
        return self.top & ~(self.check(x) ^ self.check(y))

    def atom(self, i: int) -> int:
        if not 0 <= i < self.atom_count:
            raise InvalidEventError(f"atom index {i} out of range")
        return 1 << i

    def event(self, names: Sequence[str]) -> int:
        """Build an event from atom names."""
        bits = 0
        for name in names:
            try:
                bits |= 1 << self.atom_names.index(name)
            except ValueError:
                raise InvalidEventError(f"unknown atom {name!r}") from None
        return bits

    def names_of(self, x: int) -> list[str]:
        return [self.atom_names[i] for i in atoms_of(self.check(x))]

    def format(self, x: int) -> str:
        return "{" + ", ".join(self.names_of(x)) + "}"


def connectives(algebra: Algebra, x: int, y: int) -> tuple[int, int, int, int]:
    """Return ``(x ∧ y, x ∨ y, ¬x, x → y)``."""
    algebra.check(x)
    algebra.check(y)
    return x & y, x | y, algebra.complement(x), algebra.implies(x, y)


def leq(x: int, y: int) -> bool:
    return x & y == x


def atoms_of(x: int) -> list[int]:
    """Ascending indices of the atoms below ``x``."""
    out = []
    i = 0
    while x:
        if x & 1:
            out.append(i)
        x >>= 1
        i += 1
    return out


def cardinality(x: int) -> int:
    return bin(x).count("1")


def subevents(x: int) -> Iterator[int]:
    """All events below ``x``, in ascending bitmask order."""
    sub = 0
    while True:
        yield sub
        if sub == x:
            return
        sub = (sub - x) & x
