"""The (i, j)-shift, left-shifted families, lexicographic order and L(n, k, m)."""

from __future__ import annotations

from math import comb
from typing import Iterator, NamedTuple

from .core import Family, GroundSetError, ParameterError, SetBits, elements_of, k_subsets, mask_of
from .properties import PropertyReport


class OrderError(ValueError):
    """Raised when the lexicographic order is asked to compare sets of different sizes."""


class ShiftIndex(NamedTuple):
    i: int
    j: int

    def check(self, n: int) -> None:
        if not 1 <= self.i < self.j <= n:
            raise ParameterError(f"shift index needs 1 <= i < j <= n (got i={self.i}, j={self.j}, n={n})")


def _shift_bits(members: tuple[int, ...], i: int, j: int) -> tuple[int, ...]:
    bi, bj = 1 << (i - 1), 1 << (j - 1)
    present = set(members)
    out = []
    for F in members:
        if F & bj and not F & bi:
            G = (F & ~bj) | bi
            if G not in present:
                out.append(G)
                continue
        out.append(F)
    return tuple(out)


def shift(f: Family, ix: ShiftIndex | tuple[int, int]) -> Family:
    ix = ShiftIndex(*ix)
    ix.check(f.n)
    return Family(f.n, _shift_bits(f.bits, ix.i, ix.j))


def sweep_order(n: int) -> list[ShiftIndex]:
    """All (i, j) pairs, ordered by (j - i, i).  The fixpoint loop uses this order."""
    return [ShiftIndex(i, i + gap) for gap in range(1, n) for i in range(1, n - gap + 1)]


def left_shift_fixpoint(f: Family) -> Family:
    members = f.bits
    order = sweep_order(f.n)
    while True:
        changed = False
        for i, j in order:
            shifted = _shift_bits(members, i, j)
            if set(shifted) != set(members):
                members = shifted
                changed = True
        if not changed:
            return Family(f.n, members)


def shift_pair(a: Family, b: Family, ix: ShiftIndex | tuple[int, int]) -> tuple[Family, Family]:
    return shift(a, ix), shift(b, ix)


def left_shift_pair(a: Family, b: Family) -> tuple[Family, Family, int]:
    """Shift ``a`` and ``b`` in lockstep with the same sequence of S_{i,j} until
    both are left-shifted.  Returns the pair and the number of effective shifts."""
    if a.n != b.n:
        raise GroundSetError(f"ground sets differ: n={a.n} vs n={b.n}")
    am, bm = a.bits, b.bits
    order = sweep_order(a.n)
    steps = 0
    while True:
        changed = False
        for i, j in order:
            sa, sb = _shift_bits(am, i, j), _shift_bits(bm, i, j)
            if set(sa) != set(am) or set(sb) != set(bm):
                am, bm = sa, sb
                changed = True
                steps += 1
        if not changed:
            return Family(a.n, am), Family(b.n, bm), steps


def shift_potential(f: Family) -> int:
    """Sum of all elements over all members; every effective shift lowers it."""
    return sum(sum(elements_of(F)) for F in f.bits)


def _stable_under_all_shifts(f: Family) -> tuple[int, int, int] | None:
    present = f.as_set()
    for i, j in sweep_order(f.n):
        bi, bj = 1 << (i - 1), 1 << (j - 1)
        for F in f.bits:
            if F & bj and not F & bi and ((F & ~bj) | bi) not in present:
                return F, i, j
    return None


def _dominated(bits: int, n: int) -> Iterator[int]:
    """All sets A with |A| = |B| and a_r <= b_r for every r (B = ``bits``)."""
    b = elements_of(bits)
    for cand in k_subsets(n, len(b)):
        a = elements_of(cand)
        if all(x <= y for x, y in zip(a, b)):
            yield cand


def _dominance_closed(f: Family) -> tuple[int, int] | None:
    present = f.as_set()
    for B in f.bits:
        for A in _dominated(B, f.n):
            if A not in present:
                return B, A
    return None


def is_left_shifted(f: Family) -> PropertyReport:
    """Checks stability under every S_{i,j} and the componentwise dominance
    condition separately; the two must agree."""
    by_shift = _stable_under_all_shifts(f)
    by_dominance = _dominance_closed(f)
    if (by_shift is None) != (by_dominance is None):
        raise AssertionError(f"shift stability and dominance closure disagree on {f!r}")
    if by_shift is None:
        return PropertyReport("left_shifted", True)
    B, A = by_dominance
    return PropertyReport("left_shifted", False, (SetBits(f.n, B), SetBits(f.n, A)))


def lex_compare(a: SetBits, b: SetBits) -> int:
    """-1 if a precedes b, 0 if equal, 1 otherwise; only for equal sizes."""
    if a.n != b.n:
        raise GroundSetError(f"ground sets differ: n={a.n} vs n={b.n}")
    if a.size != b.size:
        raise OrderError(f"lexicographic order is defined only for equal sizes ({a.size} vs {b.size})")
    diff = a.bits ^ b.bits
    if not diff:
        return 0
    return -1 if a.bits & diff & -diff else 1


def lex_key(bits: int) -> tuple[int, ...]:
    return elements_of(bits)


def lex_rank(n: int, bits: int) -> int:
    """Position of a k-set among all k-subsets of [n] in lexicographic order."""
    elems = elements_of(bits)
    k = len(elems)
    rank, prev = 0, 0
    for pos, e in enumerate(elems):
        for smaller in range(prev + 1, e):
            rank += comb(n - smaller, k - pos - 1)
        prev = e
    return rank


def lex_unrank(n: int, k: int, rank: int) -> int:
    if not 0 <= rank < comb(n, k):
        raise ParameterError(f"rank {rank} outside [0, C({n},{k}))")
    elems = []
    x = 1
    for pos in range(k):
        while True:
            block = comb(n - x, k - pos - 1)
            if rank < block:
                break
            rank -= block
            x += 1
        elems.append(x)
        x += 1
    return mask_of(elems)


def _lex_successor(elems: list[int], n: int) -> bool:
    k = len(elems)
    r = k - 1
    while r >= 0 and elems[r] == n - k + r + 1:
        r -= 1
    if r < 0:
        return False
    elems[r] += 1
    for q in range(r + 1, k):
        elems[q] = elems[q - 1] + 1
    return True


def lex_initial(n: int, k: int, m: int) -> Family:
    """The m lexicographically smallest k-subsets of [n]."""
    if not 0 <= k <= n:
        raise ParameterError(f"k={k} outside [0, n={n}]")
    total = comb(n, k)
    if not 0 <= m <= total:
        raise ParameterError(f"m={m} outside [0, C({n},{k})={total}]")
    out: list[int] = []
    if m == 0:
        return Family(n, out)
    elems = list(range(1, k + 1))
    for _ in range(m):
        out.append(mask_of(elems))
        if not _lex_successor(elems, n):
            break
    return Family(n, out)
