"""Isomorphism of families under relabeling of [n].

Canonical forms come from an individualization-refinement search: elements
are split into ordered cells by an isomorphism-invariant signature, a
non-singleton cell is individualized, and the leaves of the resulting tree are
the candidate labelings.  The canonical family is the least encoding over all
leaves.  Automorphisms found along the way prune branches that would repeat a
leaf encoding.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

from .core import Family, GroundSetError, full_mask

MAX_CANON_N = 12


class ScaleError(ValueError):
    """Raised when a ground set is too large for the exponential routines here."""


@dataclass(frozen=True)
class CanonicalForm:
    family: Family
    # certificate[x - 1] is the new label of element x
    certificate: tuple[int, ...]

    def key(self) -> tuple[int, tuple[int, ...]]:
        return (self.family.n, self.family.bits)


def relabel_bits(bits: int, perm: tuple[int, ...]) -> int:
    out = 0
    x = 0
    while bits:
        if bits & 1:
            out |= 1 << (perm[x] - 1)
        bits >>= 1
        x += 1
    return out


def relabel(f: Family, perm: tuple[int, ...]) -> Family:
    """Apply the permutation ``x -> perm[x - 1]`` to every member."""
    if sorted(perm) != list(range(1, f.n + 1)):
        raise ValueError(f"not a permutation of [1, {f.n}]: {perm}")
    return Family(f.n, (relabel_bits(b, perm) for b in f.bits))


def _encode(members: tuple[int, ...], order: list[int], colors: tuple[int, ...] | None = None) -> tuple:
    # order[p] is the element (0-based) that gets label p + 1
    lab = [0] * len(order)
    for p, x in enumerate(order):
        lab[x] = 1 << p
    out = []
    for idx, F in enumerate(members):
        m = 0
        x = 0
        while F:
            if F & 1:
                m |= lab[x]
            F >>= 1
            x += 1
        out.append(m if colors is None else (colors[idx], m))
    if colors is None:
        out.sort(key=lambda b: (b.bit_count(), b))
    else:
        out.sort(key=lambda cb: (cb[0], cb[1].bit_count(), cb[1]))
    return tuple(out)


def _refine(
    cells: list[list[int]],
    incidence: list[list[int]],
    members: tuple[int, ...],
    colors: tuple[int, ...] | None = None,
) -> list[list[int]]:
    """Split cells by how each element sits inside the members relative to the
    current cells, until nothing splits."""
    n_cells = -1
    while len(cells) != n_cells:
        n_cells = len(cells)
        cell_masks = []
        for c in cells:
            m = 0
            for x in c:
                m |= 1 << x
            cell_masks.append(m)
        profile = {}
        for idx, F in enumerate(members):
            head = (F.bit_count(),) if colors is None else (colors[idx], F.bit_count())
            profile[idx] = head + tuple((F & cm).bit_count() for cm in cell_masks)
        new_cells: list[list[int]] = []
        for c in cells:
            if len(c) == 1:
                new_cells.append(c)
                continue
            sig = {x: tuple(sorted(profile[i] for i in incidence[x])) for x in c}
            groups: dict[tuple, list[int]] = {}
            for x in c:
                groups.setdefault(sig[x], []).append(x)
            for key in sorted(groups):
                new_cells.append(groups[key])
        cells = new_cells
    return cells


def _canonical_order(n: int, members: tuple[int, ...], colors: tuple[int, ...] | None) -> tuple[tuple, list[int]]:
    incidence: list[list[int]] = [[] for _ in range(n)]
    for idx, F in enumerate(members):
        for x in range(n):
            if F >> x & 1:
                incidence[x].append(idx)

    best: list = [None, None]  # encoding, order
    first: list = [None, None]
    autos: list[list[int]] = []

    def leaf(order: list[int]) -> None:
        enc = _encode(members, order, colors)
        for ref_enc, ref_order in (first, best):
            if ref_enc is not None and enc == ref_enc:
                # ref_order[p] and order[p] play the same role
                a = [0] * n
                for p in range(n):
                    a[ref_order[p]] = order[p]
                if any(a[x] != x for x in range(n)):
                    autos.append(a)
                return
        if first[0] is None:
            first[0], first[1] = enc, order
        if best[0] is None or enc < best[0]:
            best[0], best[1] = enc, order

    def search(cells: list[list[int]], prefix: list[int]) -> None:
        cells = _refine(cells, incidence, members, colors)
        target = next((i for i, c in enumerate(cells) if len(c) > 1), None)
        if target is None:
            leaf([c[0] for c in cells])
            return
        cell = cells[target]
        done: list[int] = []
        for v in cell:
            # an automorphism fixing the prefix maps an explored branch onto this one
            if done and any(_same_orbit(v, w, autos, prefix) for w in done):
                continue
            rest = [x for x in cell if x != v]
            search(cells[:target] + [[v], rest] + cells[target + 1 :], prefix + [v])
            done.append(v)

    search([list(range(n))] if n else [], [])
    return best[0], best[1]


def _certificate(order: list[int]) -> tuple[int, ...]:
    cert = [0] * len(order)
    for p, x in enumerate(order):
        cert[x] = p + 1
    return tuple(cert)


def canonicalize(f: Family) -> CanonicalForm:
    n = f.n
    if n > MAX_CANON_N:
        raise ScaleError(f"canonical forms are limited to n <= {MAX_CANON_N} (got {n})")
    enc, order = _canonical_order(n, f.bits, None)
    return CanonicalForm(Family(n, enc), _certificate(order))


@dataclass(frozen=True)
class CanonicalPair:
    first: Family
    second: Family
    certificate: tuple[int, ...]

    def key(self) -> tuple:
        return (self.first.n, self.first.bits, self.second.bits)


def canonicalize_pair(a: Family, b: Family) -> CanonicalPair:
    """Canonical form of an ordered pair of families under one common relabeling."""
    _same_n(a, b)
    n = a.n
    if n > MAX_CANON_N:
        raise ScaleError(f"canonical forms are limited to n <= {MAX_CANON_N} (got {n})")
    members = a.bits + b.bits
    colors = (0,) * len(a.bits) + (1,) * len(b.bits)
    enc, order = _canonical_order(n, members, colors)
    first = Family(n, (m for c, m in enc if c == 0))
    second = Family(n, (m for c, m in enc if c == 1))
    return CanonicalPair(first, second, _certificate(order))


def is_isomorphic_pair(a: tuple[Family, Family], b: tuple[Family, Family]) -> bool:
    return canonicalize_pair(*a).key() == canonicalize_pair(*b).key()


def _same_orbit(v: int, w: int, autos: list[list[int]], prefix: list[int]) -> bool:
    gens = [a for a in autos if all(a[u] == u for u in prefix)]
    if not gens:
        return False
    seen = {w}
    stack = [w]
    while stack:
        x = stack.pop()
        for a in gens:
            y = a[x]
            if y not in seen:
                if y == v:
                    return True
                seen.add(y)
                stack.append(y)
    return v in seen


def canonicalize_bruteforce(f: Family) -> Family:
    """Least encoding over all of S_n.  Only for small n; used as an oracle."""
    if f.n > 8:
        raise ScaleError(f"brute-force canonical form is limited to n <= 8 (got {f.n})")
    best = None
    for order in permutations(range(f.n)):
        enc = _encode(f.bits, list(order))
        if best is None or enc < best:
            best = enc
    return Family(f.n, best if best is not None else ())


def _same_n(f: Family, g: Family) -> None:
    if f.n != g.n:
        raise GroundSetError(f"ground sets differ: n={f.n} vs n={g.n}")


def is_isomorphic(f: Family, g: Family) -> bool:
    _same_n(f, g)
    if len(f) != len(g) or f.layer_sizes() != g.layer_sizes():
        return False
    return canonicalize(f).family == canonicalize(g).family


def _degrees(f: Family) -> list[tuple[int, ...]]:
    """Per element, the number of members of each size containing it."""
    deg = [[0] * (f.n + 1) for _ in range(f.n)]
    for F in f.bits:
        k = F.bit_count()
        x = 0
        while F:
            if F & 1:
                deg[x][k] += 1
            F >>= 1
            x += 1
    return [tuple(d) for d in deg]


def is_subfamily_up_to_iso(g: Family, h: Family, prune: bool = True) -> bool:
    """Whether some relabeling maps every member of ``g`` into ``h``.

    The relation is directional: the permutation acts on ``g``.  With
    ``prune=False`` only completed members are checked, which is slow but
    serves as a reference.
    """
    _same_n(g, h)
    n = g.n
    if len(g) > len(h):
        return False
    gs, hs = g.layer_sizes(), h.layer_sizes()
    if any(a > b for a, b in zip(gs, hs)):
        return False
    if not g.bits:
        return True
    h_set = h.as_set()

    gdeg, hdeg = _degrees(g), _degrees(h)
    # elements of g by decreasing degree so members complete early
    order = sorted(range(n), key=lambda x: (-sum(gdeg[x]), x))
    pos = {x: r for r, x in enumerate(order)}
    completes: list[list[int]] = [[] for _ in range(n)]
    touches: list[list[int]] = [[] for _ in range(n)]
    for F in g.bits:
        xs = [x for x in range(n) if F >> x & 1]
        if not xs:
            if 0 not in h_set:
                return False
            continue
        last = max(pos[x] for x in xs)
        completes[last].append(F)
        for x in xs:
            touches[pos[x]].append(F)

    if prune:
        candidates = []
        for x in order:
            cands = 0
            for y in range(n):
                if all(a <= b for a, b in zip(gdeg[x], hdeg[y])):
                    cands |= 1 << y
            if not cands:
                return False
            candidates.append(cands)
        # partial images must sit inside some member of h of the right size
        sub_ok: dict[int, set[int]] = {}
        for k in range(n + 1):
            if gs[k]:
                acc: set[int] = set()
                for H in h.layer_bits(k):
                    sub = H
                    while True:
                        acc.add(sub)
                        if sub == 0:
                            break
                        sub = (sub - 1) & H
                sub_ok[k] = acc
    else:
        candidates = [full_mask(n)] * n
        sub_ok = {}

    img = [-1] * n

    def image(F: int) -> int:
        m = 0
        x = 0
        while F:
            if F & 1 and img[x] >= 0:
                m |= 1 << img[x]
            F >>= 1
            x += 1
        return m

    def rec(r: int, used: int) -> bool:
        if r == n:
            return True
        x = order[r]
        free = candidates[r] & ~used
        while free:
            low = free & -free
            free ^= low
            img[x] = low.bit_length() - 1
            ok = all(image(F) in h_set for F in completes[r])
            if ok and prune:
                ok = all(image(F) in sub_ok[F.bit_count()] for F in touches[r])
            if ok and rec(r + 1, used | low):
                return True
        img[x] = -1
        return False

    return rec(0, 0)
