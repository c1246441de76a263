"""Subsets of [n] as bit-vectors and families of such subsets.

Element ``i`` of ``[n] = {1, ..., n}`` lives at bit ``i - 1``.  Every value in
this module is immutable.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Iterable, Iterator

MAX_N = 32


class GroundSetError(ValueError):
    """Raised when sets or families over different ground sets are mixed."""


class ParameterError(ValueError):
    """Raised when parameters violate a construction's side conditions."""


class FormatError(ValueError):
    """Raised on malformed family text."""


def _check_n(n: int) -> None:
    if not 0 <= n <= MAX_N:
        raise GroundSetError(f"ground set size must be in [0, {MAX_N}], got {n}")


def full_mask(n: int) -> int:
    return (1 << n) - 1


def mask_of(elements: Iterable[int]) -> int:
    m = 0
    for e in elements:
        m |= 1 << (e - 1)
    return m


def elements_of(bits: int) -> tuple[int, ...]:
    out = []
    i = 1
    while bits:
        if bits & 1:
            out.append(i)
        bits >>= 1
        i += 1
    return tuple(out)


def sort_key(bits: int) -> tuple[int, int]:
    """Canonical member order: by size, then by numeric value."""
    return (bits.bit_count(), bits)


@dataclass(frozen=True, order=False)
class SetBits:
    n: int
    bits: int

    def __post_init__(self) -> None:
        _check_n(self.n)
        if self.bits < 0 or self.bits >> self.n:
            raise GroundSetError(f"bits {self.bits:#x} out of range for n={self.n}")

    @classmethod
    def of(cls, n: int, elements: Iterable[int]) -> "SetBits":
        elements = list(elements)
        for e in elements:
            if not 1 <= e <= n:
                raise GroundSetError(f"element {e} not in [1, {n}]")
        return cls(n, mask_of(elements))

    @property
    def size(self) -> int:
        return self.bits.bit_count()

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __iter__(self) -> Iterator[int]:
        return iter(elements_of(self.bits))

    def __contains__(self, element: object) -> bool:
        return isinstance(element, int) and 1 <= element <= self.n and bool(self.bits >> (element - 1) & 1)

    def complement(self) -> "SetBits":
        return SetBits(self.n, full_mask(self.n) & ~self.bits)

    def elements(self) -> tuple[int, ...]:
        return elements_of(self.bits)

    def __repr__(self) -> str:
        return "{" + ",".join(map(str, self.elements())) + "}"


def _same_n(a: SetBits, b: SetBits) -> None:
    if a.n != b.n:
        raise GroundSetError(f"ground sets differ: n={a.n} vs n={b.n}")


def union_size(a: SetBits, b: SetBits) -> int:
    _same_n(a, b)
    return a.bits.bit_count() + b.bits.bit_count() - (a.bits & b.bits).bit_count()


def intersection_size(a: SetBits, b: SetBits) -> int:
    _same_n(a, b)
    return (a.bits & b.bits).bit_count()


class Family:
    """A duplicate-free family of subsets of [n] in canonical (size, bits) order.

    Members are held as a tuple of ints in ``bits``; ``members`` wraps them as
    :class:`SetBits`.  Two families compare equal iff they have the same ``n``
    and the same member tuple.
    """

    __slots__ = ("n", "bits", "_layer_starts")

    def __init__(self, n: int, members: Iterable[int | SetBits] = ()) -> None:
        _check_n(n)
        raw = set()
        limit = 1 << n
        for m in members:
            if isinstance(m, SetBits):
                if m.n != n:
                    raise GroundSetError(f"member over n={m.n} in family over n={n}")
                m = m.bits
            if not 0 <= m < limit:
                raise GroundSetError(f"member {m:#x} out of range for n={n}")
            raw.add(m)
        self.n = n
        self.bits: tuple[int, ...] = tuple(sorted(raw, key=sort_key))
        starts = [0] * (n + 2)
        for b in self.bits:
            starts[b.bit_count() + 1] += 1
        for i in range(1, n + 2):
            starts[i] += starts[i - 1]
        self._layer_starts = tuple(starts)

    @classmethod
    def from_sets(cls, n: int, sets: Iterable[Iterable[int]]) -> "Family":
        return cls(n, (SetBits.of(n, s).bits for s in sets))

    @property
    def members(self) -> tuple[SetBits, ...]:
        return tuple(SetBits(self.n, b) for b in self.bits)

    def __len__(self) -> int:
        return len(self.bits)

    def __iter__(self) -> Iterator[SetBits]:
        return iter(self.members)

    def __contains__(self, item: object) -> bool:
        if isinstance(item, SetBits):
            return item.n == self.n and item.bits in self.as_set()
        if isinstance(item, int):
            return item in self.as_set()
        return False

    def as_set(self) -> frozenset[int]:
        return frozenset(self.bits)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Family):
            return NotImplemented
        return self.n == other.n and self.bits == other.bits

    def __hash__(self) -> int:
        return hash((self.n, self.bits))

    def __repr__(self) -> str:
        body = ", ".join(repr(SetBits(self.n, b)) for b in self.bits[:8])
        more = f", ... ({len(self.bits)} sets)" if len(self.bits) > 8 else ""
        return f"Family(n={self.n}, [{body}{more}])"

    def layer_bits(self, i: int) -> tuple[int, ...]:
        if not 0 <= i <= self.n:
            return ()
        return self.bits[self._layer_starts[i] : self._layer_starts[i + 1]]

    def layer_sizes(self) -> tuple[int, ...]:
        s = self._layer_starts
        return tuple(s[i + 1] - s[i] for i in range(self.n + 1))

    def union(self, other: "Family") -> "Family":
        _family_same_n(self, other)
        return Family(self.n, self.bits + other.bits)

    def issubset(self, other: "Family") -> bool:
        """Literal containment, no relabeling."""
        _family_same_n(self, other)
        return self.as_set() <= other.as_set()

    def max_size(self) -> int:
        return self.bits[-1].bit_count() if self.bits else -1


def _family_same_n(f: Family, g: Family) -> None:
    if f.n != g.n:
        raise GroundSetError(f"ground sets differ: n={f.n} vs n={g.n}")


def complement_family(f: Family) -> Family:
    full = full_mask(f.n)
    return Family(f.n, (full & ~b for b in f.bits))


def submasks(bits: int) -> Iterator[int]:
    """All subsets of ``bits``, including the empty set and ``bits`` itself."""
    sub = bits
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & bits


def down_closure(f: Family) -> Family:
    seen: set[int] = set()
    # largest first so big antichains are expanded once
    for b in reversed(f.bits):
        if b in seen:
            continue
        seen.update(submasks(b))
    return Family(f.n, seen)


def layer(f: Family, i: int) -> Family:
    if not 0 <= i <= f.n:
        raise ParameterError(f"layer index {i} outside [0, {f.n}]")
    return Family(f.n, f.layer_bits(i))


def k_subsets(n: int, k: int) -> list[int]:
    """All k-subsets of [n] as masks, in increasing numeric order."""
    if k < 0 or k > n:
        return []
    out = []
    if k == 0:
        return [0]
    x = (1 << k) - 1
    limit = 1 << n
    while x < limit:
        out.append(x)
        # Gosper's hack
        c = x & -x
        r = x + c
        x = (((r ^ x) >> 2) // c) | r
    return out


def power_set(n: int) -> Family:
    return Family(n, range(1 << n))


def up_to_layer(n: int, k: int) -> list[int]:
    """All subsets of [n] with at most k elements."""
    out: list[int] = []
    for i in range(0, min(k, n) + 1):
        out.extend(k_subsets(n, i))
    return out


def binom_sum(n: int, k: int) -> int:
    return sum(comb(n, i) for i in range(0, k + 1))


@dataclass(frozen=True)
class Params:
    """Parameter bundle shared by constructions and searches.

    ``d`` is derived from ``s`` (``d = s // 2``) and ``t`` from the duality
    ``t = n - s`` whenever they are not given explicitly.
    """

    n: int
    s: int | None = None
    k: int | None = None
    t: int | None = None

    def __post_init__(self) -> None:
        _check_n(self.n)
        if self.s is not None and not 0 <= self.s <= self.n:
            raise ParameterError(f"s={self.s} outside [0, n={self.n}]")
        if self.s is not None and self.t is not None and self.t != self.n - self.s:
            raise ParameterError(f"t={self.t} is not n - s = {self.n - self.s}")

    @property
    def d(self) -> int:
        if self.s is None:
            raise ParameterError("d needs s")
        return self.s // 2

    @property
    def dual_t(self) -> int:
        if self.t is not None:
            return self.t
        if self.s is None:
            raise ParameterError("t needs s or an explicit value")
        return self.n - self.s


# ---------------------------------------------------------------------------
# text formats


def dumps_family(f: Family, form: str = "text") -> str:
    lines = [f"n={f.n}" if form == "text" else f"n={f.n} hex"]
    if form == "text":
        for b in f.bits:
            lines.append(",".join(map(str, elements_of(b))) if b else "{}")
    elif form == "hex":
        lines.extend(format(b, "x") for b in f.bits)
    else:
        raise FormatError(f"unknown family format {form!r}")
    return "\n".join(lines) + "\n"


def loads_family(text: str, form: str | None = None) -> Family:
    """Parse either family format.  ``form=None`` sniffs hex by an ``x`` marker
    on the header line (``n=<n> hex``) and otherwise assumes text."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].startswith("n="):
        raise FormatError("line 1: expected header 'n=<n>'")
    head = lines[0][2:].split()
    try:
        n = int(head[0])
    except (ValueError, IndexError):
        raise FormatError(f"line 1: bad header {lines[0]!r}") from None
    if form is None:
        form = "hex" if len(head) > 1 and head[1] == "hex" else "text"
    members = []
    for lineno, ln in enumerate(lines[1:], start=2):
        try:
            if form == "hex":
                members.append(int(ln, 16))
            elif ln == "{}":
                members.append(0)
            else:
                members.append(SetBits.of(n, (int(tok) for tok in ln.split(","))).bits)
        except (ValueError, GroundSetError) as exc:
            raise FormatError(f"line {lineno}: {exc}") from None
    try:
        return Family(n, members)
    except GroundSetError as exc:
        raise FormatError(str(exc)) from None
