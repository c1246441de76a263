"""Decidable predicates for the hypotheses and inequalities about set families.

Pair predicates range over unordered pairs *including* the pair (A, A): a
member larger than ``s`` breaks the s-union property on its own, and a member
smaller than ``t`` breaks t-intersection.  Violations come with the least
violating pair in canonical member order.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Iterator

from .core import Family, GroundSetError, ParameterError, SetBits, full_mask


class PropertyError(ValueError):
    """Raised when a checker's precondition does not hold."""


@dataclass(frozen=True)
class PropertyReport:
    name: str
    holds: bool
    witness: tuple[SetBits, ...] | None = None

    def __post_init__(self) -> None:
        if not self.holds and self.witness is None:
            raise ValueError("a failing report needs a witness")

    def __bool__(self) -> bool:
        return self.holds

    def to_dict(self) -> dict:
        return {
            "property": self.name,
            "holds": self.holds,
            "witness": None if self.witness is None else [list(w.elements()) for w in self.witness],
        }


def _pairs_by_layer(f: Family, needs_check) -> Iterator[tuple[int, int]]:
    """Yield (A, B) with A <= B in canonical order, skipping layer pairs
    ``needs_check(i, j)`` rules out.  Order of yield is lexicographic in
    (index of A, index of B), so the first hit is the least violating pair."""
    sizes = [(i, f.layer_bits(i)) for i in range(f.n + 1)]
    sizes = [(i, layer) for i, layer in sizes if layer]
    for ai, (i, layer_a) in enumerate(sizes):
        checked_layers = [(j, layer_b) for j, layer_b in sizes[ai:] if needs_check(i, j)]
        if not checked_layers:
            continue
        for pos, A in enumerate(layer_a):
            for j, layer_b in checked_layers:
                start = pos if j == i else 0
                for B in layer_b[start:]:
                    yield A, B


def is_t_intersecting(f: Family, t: int) -> PropertyReport:
    if t < 0:
        raise ParameterError(f"t must be >= 0 (got {t})")
    n = f.n
    for A, B in _pairs_by_layer(f, lambda i, j: i + j - n < t):
        if (A & B).bit_count() < t:
            return PropertyReport("t_intersecting", False, (SetBits(n, A), SetBits(n, B)))
    return PropertyReport("t_intersecting", True)


def is_s_union(f: Family, s: int) -> PropertyReport:
    if s < 0:
        raise ParameterError(f"s must be >= 0 (got {s})")
    for A, B in _pairs_by_layer(f, lambda i, j: i + j > s):
        if (A | B).bit_count() > s:
            return PropertyReport("s_union", False, (SetBits(f.n, A), SetBits(f.n, B)))
    return PropertyReport("s_union", True)


def is_uniform(f: Family, k: int) -> PropertyReport:
    for A in f.bits:
        if A.bit_count() != k:
            return PropertyReport("uniform", False, (SetBits(f.n, A),))
    return PropertyReport("uniform", True)


def is_cross_intersecting(a: Family, b: Family) -> PropertyReport:
    if a.n != b.n:
        raise GroundSetError(f"ground sets differ: n={a.n} vs n={b.n}")
    for A in a.bits:
        for B in b.bits:
            if not A & B:
                return PropertyReport("cross_intersecting", False, (SetBits(a.n, A), SetBits(a.n, B)))
    return PropertyReport("cross_intersecting", True)


def is_hereditary(f: Family) -> PropertyReport:
    present = f.as_set()
    for F in f.bits:
        missing = []
        x = F
        while x:
            low = x & -x
            if F & ~low not in present:
                missing.append(F & ~low)
            x ^= low
        if missing:
            least = min(missing, key=lambda m: (m.bit_count(), m))
            return PropertyReport("hereditary", False, (SetBits(f.n, F), SetBits(f.n, least)))
    return PropertyReport("hereditary", True)


def _subsets_of_size(bits: int, u: int) -> Iterator[int]:
    elems = [1 << b for b in range(bits.bit_length()) if bits >> b & 1]
    if u > len(elems):
        return

    def rec(start: int, left: int, acc: int) -> Iterator[int]:
        if left == 0:
            yield acc
            return
        for idx in range(start, len(elems) - left + 1):
            yield from rec(idx + 1, left - 1, acc | elems[idx])

    yield from rec(0, u, 0)


def shadow(f: Family, u: int) -> Family:
    """All u-sets contained in some member.  On a non-uniform family this is
    the union of the members' shadows."""
    if u < 0:
        raise ParameterError(f"shadow size must be >= 0 (got {u})")
    if f.bits and u > min(F.bit_count() for F in f.bits):
        raise ParameterError(f"shadow size {u} exceeds the smallest member size")
    out: set[int] = set()
    for F in f.bits:
        out.update(_subsets_of_size(F, u))
    return Family(f.n, out)


@dataclass(frozen=True)
class KatonaRow:
    i: int
    lhs: int
    rhs: int
    tight: bool
    # for n >= s + 2 a tight row forces layer i full and layer s+1-i empty
    equality_condition: bool | None

    def to_dict(self) -> dict:
        return {
            "i": self.i,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "tight": self.tight,
            "equality_condition": self.equality_condition,
        }


def katona_layer_check(f: Family, s: int) -> list[KatonaRow]:
    """Per i in [0, s/2]: |F_i| + |F_{s+1-i}| against C(n, i).

    Needs s < n: for s >= n every family is s-union and the power set of [n]
    already breaks the bound (n + 1 > C(n, 1) at i = 1 when s = n = 3)."""
    if s >= f.n:
        raise PropertyError(f"the layer inequality needs s < n (got s={s}, n={f.n})")
    report = is_s_union(f, s)
    if not report.holds:
        raise PropertyError(f"family is not {s}-union: witness {report.witness}")
    n = f.n
    sizes = f.layer_sizes()

    def layer_size(i: int) -> int:
        return sizes[i] if 0 <= i <= n else 0

    rows = []
    for i in range(0, s // 2 + 1):
        lhs = layer_size(i) + layer_size(s + 1 - i)
        rhs = comb(n, i)
        tight = lhs == rhs
        cond = None
        if tight and n >= s + 2:
            cond = layer_size(i) == rhs and layer_size(s + 1 - i) == 0
        rows.append(KatonaRow(i, lhs, rhs, tight, cond))
    return rows


def katona_violations(rows: list[KatonaRow]) -> list[KatonaRow]:
    return [r for r in rows if r.lhs > r.rhs or r.equality_condition is False]


def diameter(f: Family) -> int:
    if not f.bits:
        raise PropertyError("diameter of the empty family is undefined")
    best = 0
    members = f.bits
    for idx, A in enumerate(members):
        for B in members[idx + 1 :]:
            dist = (A ^ B).bit_count()
            if dist > best:
                best = dist
    return best


def has_diameter_at_most(f: Family, s: int) -> PropertyReport:
    members = f.bits
    for idx, A in enumerate(members):
        for B in members[idx + 1 :]:
            if (A ^ B).bit_count() > s:
                return PropertyReport("diameter", False, (SetBits(f.n, A), SetBits(f.n, B)))
    return PropertyReport("diameter", True)


def dual_family_check(f: Family, t: int) -> bool:
    """is_t_intersecting(f, t) and is_s_union(complement, n - t) agree."""
    from .core import complement_family

    return bool(is_t_intersecting(f, t)) == bool(is_s_union(complement_family(f), f.n - t))


def hilton_disjoint(a: Family, b: Family, a_size: int) -> bool:
    """A and the a-shadow of the complements of B are disjoint."""
    full = full_mask(b.n)
    comps = Family(b.n, (full & ~B for B in b.bits))
    if not comps.bits:
        return True
    return not (a.as_set() & shadow(comps, a_size).as_set())


CHECKERS = {
    "t_intersecting": lambda f, p: is_t_intersecting(f, p),
    "s_union": lambda f, p: is_s_union(f, p),
    "hereditary": lambda f, p: is_hereditary(f),
    "uniform": lambda f, p: is_uniform(f, p),
    "diameter": lambda f, p: has_diameter_at_most(f, p),
}
