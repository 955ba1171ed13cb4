"""Finite unions of intervals inside the half-line (0, inf).

Isolated points are stored as degenerate closed intervals ``[a, a]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Tuple

__all__ = ["Interval", "IntervalSet", "FULL", "EMPTY"]


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    lo_closed: bool = False
    hi_closed: bool = False

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        # infinite or zero ends are never members of the universe
        if lo <= 0:
            object.__setattr__(self, "lo", 0.0)
            object.__setattr__(self, "lo_closed", False)
        if math.isinf(hi):
            object.__setattr__(self, "hi_closed", False)

    @classmethod
    def point(cls, a: float) -> "Interval":
        return cls(a, a, True, True)

    @property
    def empty(self) -> bool:
        if self.lo < self.hi:
            return False
        return not (self.lo == self.hi and self.lo_closed and self.hi_closed)

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi and not self.empty

    def contains(self, t: float) -> bool:
        if t < self.lo or t > self.hi:
            return False
        if t == self.lo and not self.lo_closed:
            return False
        if t == self.hi and not self.hi_closed:
            return False
        return True

    def __repr__(self):
        if self.is_point:
            return f"{{{self.lo:g}}}"
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{self.lo:g}, {self.hi:g}{right}"


def _touch(a: Interval, b: Interval) -> bool:
    """True when a (starting first) overlaps or abuts b without a gap."""
    if b.lo < a.hi:
        return True
    if b.lo == a.hi:
        return a.hi_closed or b.lo_closed
    return False


class IntervalSet:
    """An immutable, normalized finite union of disjoint intervals."""

    __slots__ = ("_parts",)

    def __init__(self, parts: Iterable[Interval] = ()):
        items = sorted((p for p in parts if not p.empty),
                       key=lambda p: (p.lo, not p.lo_closed))
        merged = []
        for cur in items:
            if merged and _touch(merged[-1], cur):
                last = merged[-1]
                if cur.hi > last.hi or (cur.hi == last.hi and cur.hi_closed):
                    hi, hic = cur.hi, cur.hi_closed or (cur.hi == last.hi and last.hi_closed)
                else:
                    hi, hic = last.hi, last.hi_closed
                merged[-1] = Interval(last.lo, hi, last.lo_closed, hic)
            else:
                merged.append(cur)
        self._parts: Tuple[Interval, ...] = tuple(merged)

    @property
    def parts(self) -> Tuple[Interval, ...]:
        return self._parts

    @property
    def empty(self) -> bool:
        return not self._parts

    @property
    def is_full(self) -> bool:
        return self == FULL

    def contains(self, t: float) -> bool:
        return any(p.contains(t) for p in self._parts)

    __contains__ = contains

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet(self._parts + other._parts)

    __or__ = union

    def complement(self) -> "IntervalSet":
        """Complement within (0, inf)."""
        out = []
        lo, lo_closed = 0.0, False
        for p in self._parts:
            out.append(Interval(lo, p.lo, lo_closed, not p.lo_closed))
            lo, lo_closed = p.hi, not p.hi_closed
        if not math.isinf(lo):
            out.append(Interval(lo, math.inf, lo_closed, False))
        return IntervalSet(out)

    def intersection(self, other: "IntervalSet") -> "IntervalSet":
        return self.complement().union(other.complement()).complement()

    __and__ = intersection

    def issubset(self, other: "IntervalSet") -> bool:
        return (self & other.complement()).empty

    def __eq__(self, other):
        return isinstance(other, IntervalSet) and self._parts == other._parts

    def __hash__(self):
        return hash(self._parts)

    def __iter__(self):
        return iter(self._parts)

    def __len__(self):
        return len(self._parts)

    def __repr__(self):
        if not self._parts:
            return "{}"
        return " U ".join(repr(p) for p in self._parts)


FULL = IntervalSet([Interval(0.0, math.inf)])
EMPTY = IntervalSet()
