"""Exact maximization by branch and bound.

Every problem is reduced to the same shape.  There is a list of *upper*
vertices that the search chooses freely (in a fixed order) and a list of
*small* vertices that are included automatically whenever they are compatible
with everything chosen.  A family is then the chosen upper vertices plus the
surviving small ones, and the value of a node is known exactly.

* s-union: upper = sets of size d+1..s, small = sets of size <= d (d = s//2).
  Two sets of size <= d never conflict, so a maximal hereditary family is its
  upper part plus every small set compatible with it.
* cross pairs: upper = the a-sets of A, small = the b-sets of B.  Given A the
  best B is all b-sets meeting every member of A.
* intersecting k-uniform, t = 1: fix a covering pair or an element of maximum
  degree and split the family around it (see ``max_uniform_intersecting``).
* t >= 2 and diameter problems use the plain conflict graph with no small part.

Symmetry is broken with an ordered partition of the ground set into cells
of consecutive elements.  Before anything is chosen the whole ground set is one
cell and a set may only be chosen if it meets every cell in an initial
segment; each chosen set then splits the cells it cuts.  This keeps at least
one labeling of every family.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from math import comb
from typing import Callable, Iterable

from .constructions import (
    S_UNION_KINDS,
    UNIFORM_KINDS,
    NamedFamily,
    build,
    cross_pair_bound,
    ekr_bound,
    frankl_bound,
    han_kohayakawa_bound,
    hilton_milner_bound,
    katona_bound,
    kleitman_bound,
    main_bound,
)
from .core import Family, ParameterError, dumps_family, elements_of, k_subsets
from .iso import canonicalize, canonicalize_pair, is_subfamily_up_to_iso

S_UNION_MAX = "S_UNION_MAX"
UNIFORM_INTERSECTING_MAX = "UNIFORM_INTERSECTING_MAX"
CROSS_PAIR_MAX = "CROSS_PAIR_MAX"
DIAMETER_MAX = "DIAMETER_MAX"
SEARCH_KINDS = (S_UNION_MAX, UNIFORM_INTERSECTING_MAX, CROSS_PAIR_MAX, DIAMETER_MAX)
MODES = ("full", "shifted")

# ground sets beyond these sizes are far outside what the exact engines can finish
MAX_SEARCH_N = {S_UNION_MAX: 10, UNIFORM_INTERSECTING_MAX: 12, CROSS_PAIR_MAX: 12, DIAMETER_MAX: 8}


def min_shadow(m: int, k: int, j: int) -> int:
    """Least possible size of the j-shadow of m distinct k-sets (Kruskal-Katona)."""
    if m <= 0:
        return 0
    if j > k or j < 0:
        return 0
    if j == k:
        return m
    total = 0
    kk = k
    while m > 0 and kk >= 1:
        a = kk
        while comb(a + 1, kk) <= m:
            a += 1
        m -= comb(a, kk)
        if kk - (k - j) >= 0:
            total += comb(a, kk - (k - j))
        kk -= 1
    return total


# -- problems and results -----------------------------------------------------


@dataclass(frozen=True)
class SearchProblem:
    kind: str
    n: int
    s: int | None = None
    k: int | None = None
    t: int = 1
    a: int | None = None
    b: int | None = None
    # cross pairs: members of A pairwise meet in >= a_t elements (0 = no constraint)
    a_t: int = 0
    min_a: int = 1
    nonempty_b: bool = False
    exclusions: tuple[NamedFamily, ...] = ()
    mode: str = "full"
    pruning: bool = True
    symmetry: bool = True
    budget: float | None = None
    shard: tuple[int, int] = (0, 1)

    def __post_init__(self) -> None:
        object.__setattr__(self, "exclusions", tuple(self.exclusions))
        object.__setattr__(self, "shard", tuple(self.shard))
        self.validate()

    @classmethod
    def s_union(cls, n: int, s: int, exclude: Iterable[str] = (), **kw) -> "SearchProblem":
        excl = tuple(NamedFamily.make(e, n, s=s) for e in exclude)
        return cls(S_UNION_MAX, n, s=s, exclusions=excl, **kw)

    @classmethod
    def uniform(cls, n: int, k: int, t: int = 1, exclude: Iterable[NamedFamily | str] = (), **kw) -> "SearchProblem":
        excl = tuple(e if isinstance(e, NamedFamily) else NamedFamily.make(e, n, k=k) for e in exclude)
        return cls(UNIFORM_INTERSECTING_MAX, n, k=k, t=t, exclusions=excl, **kw)

    @classmethod
    def cross(cls, n: int, a: int, b: int, **kw) -> "SearchProblem":
        return cls(CROSS_PAIR_MAX, n, a=a, b=b, **kw)

    @classmethod
    def diameter(cls, n: int, s: int, **kw) -> "SearchProblem":
        return cls(DIAMETER_MAX, n, s=s, **kw)

    def validate(self) -> None:
        if self.kind not in SEARCH_KINDS:
            raise ParameterError(f"unknown search kind {self.kind!r}")
        n = self.n
        if not 0 <= n <= MAX_SEARCH_N[self.kind]:
            raise ParameterError(f"{self.kind} needs 0 <= n <= {MAX_SEARCH_N[self.kind]} (got {n})")
        if self.mode not in MODES:
            raise ParameterError(f"mode must be one of {MODES} (got {self.mode!r})")
        if self.mode == "shifted" and self.exclusions:
            raise ParameterError("shifted mode cannot be combined with exclusions")
        idx, count = self.shard
        if count < 1 or not 0 <= idx < count:
            raise ParameterError(f"bad shard {self.shard}")
        if self.budget is not None and self.budget <= 0:
            raise ParameterError("budget must be positive")
        if self.kind in (S_UNION_MAX, DIAMETER_MAX):
            if self.s is None or not 0 <= self.s <= n:
                raise ParameterError(f"{self.kind} needs 0 <= s <= n (got s={self.s}, n={n})")
        if self.kind == UNIFORM_INTERSECTING_MAX:
            if self.k is None or not 1 <= self.k <= n:
                raise ParameterError(f"uniform search needs 1 <= k <= n (got k={self.k}, n={n})")
            if not 1 <= self.t <= self.k:
                raise ParameterError(f"uniform search needs 1 <= t <= k (got t={self.t})")
        if self.kind == CROSS_PAIR_MAX:
            if self.a is None or self.b is None or not (1 <= self.a <= n and 1 <= self.b <= n):
                raise ParameterError(f"cross search needs 1 <= a, b <= n (got a={self.a}, b={self.b})")
            if self.a_t < 0 or self.min_a < 0:
                raise ParameterError("a_t and min_a must be >= 0")
        if self.exclusions and self.kind in (CROSS_PAIR_MAX, DIAMETER_MAX):
            raise ParameterError(f"{self.kind} takes no exclusions")
        for nf in self.exclusions:
            if nf.n != n:
                raise ParameterError(f"exclusion {nf.label} lives on n={nf.n}, not {n}")
            if self.kind == S_UNION_MAX and (nf.kind not in S_UNION_KINDS or nf.s != self.s):
                raise ParameterError(f"exclusion {nf.label} is not an s-union family for s={self.s}")
            if self.kind == UNIFORM_INTERSECTING_MAX and (nf.kind not in UNIFORM_KINDS or nf.k != self.k):
                raise ParameterError(f"exclusion {nf.label} is not a {self.k}-uniform family")

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "n": self.n}
        for name in ("s", "k", "a", "b"):
            v = getattr(self, name)
            if v is not None:
                out[name] = v
        if self.kind == UNIFORM_INTERSECTING_MAX:
            out["t"] = self.t
        if self.kind == CROSS_PAIR_MAX:
            out.update(a_t=self.a_t, min_a=self.min_a, nonempty_b=self.nonempty_b)
        out["exclusions"] = [nf.label for nf in self.exclusions]
        out["mode"] = self.mode
        if not self.pruning:
            out["pruning"] = False
        if not self.symmetry:
            out["symmetry"] = False
        if self.shard != (0, 1):
            out["shard"] = list(self.shard)
        return out


@dataclass
class SearchStats:
    nodes: int = 0
    prunes: dict[str, int] = field(default_factory=dict)
    wall_time: float = 0.0
    complete: bool = True
    shards: int = 1

    def bump(self, key: str) -> None:
        self.prunes[key] = self.prunes.get(key, 0) + 1

    def absorb(self, other: "SearchStats") -> None:
        self.nodes += other.nodes
        for key, v in other.prunes.items():
            self.prunes[key] = self.prunes.get(key, 0) + v
        self.complete = self.complete and other.complete

    def to_dict(self, timing: bool = True) -> dict:
        out = {
            "nodes": self.nodes,
            "prunes": dict(sorted(self.prunes.items())),
            "complete": self.complete,
            "shards": self.shards,
        }
        if timing:
            out["wall_time"] = round(self.wall_time, 3)
        return out


Witness = Family | tuple[Family, Family]


@dataclass
class SearchResult:
    problem: SearchProblem
    maximum: int | None
    witnesses: tuple[Witness, ...]
    closed_form_expected: int | None
    stats: SearchStats

    @property
    def status(self) -> str:
        return "complete" if self.stats.complete else "over-budget"

    def witness_texts(self) -> list:
        out = []
        for w in self.witnesses:
            if isinstance(w, tuple):
                out.append({"A": dumps_family(w[0]), "B": dumps_family(w[1])})
            else:
                out.append(dumps_family(w))
        return out

    def to_dict(self, timing: bool = True) -> dict:
        return {
            "problem": self.problem.to_dict(),
            "maximum": self.maximum,
            "closed_form_expected": self.closed_form_expected,
            "witnesses": self.witness_texts(),
            "status": self.status,
            "stats": self.stats.to_dict(timing),
        }


def expected_maximum(p: SearchProblem) -> int | None:
    """The known closed-form maximum for ``p``, when there is one."""
    n = p.n
    names = {nf.kind for nf in p.exclusions}
    if p.kind == S_UNION_MAX:
        s = p.s
        if s >= n:
            return 2**n if not names else None
        if not names:
            return katona_bound(n, s)
        if names == {"K"}:
            return frankl_bound(n, s) if s >= 4 else None
        extra = {4: {"Hstar4"}, 5: {"T5"}}.get(s, set())
        if names == {"K", "H"} | extra and s >= 4:
            return main_bound(n, s)
        return None
    if p.kind == UNIFORM_INTERSECTING_MAX:
        k, t = p.k, p.t
        if t >= 2:
            if not names and n >= (t + 1) * (k - t + 1):
                return comb(n - t, k - t)
            return None
        if 2 * k > n:
            return comb(n, k) if not names else None
        if not names:
            return ekr_bound(n, k)
        if names == {"EKR"} and n > 2 * k:
            return hilton_milner_bound(n, k)
        third = {"EKR", "HM", "G"} if k == 3 else {"EKR", "HM"}
        if names == third and n > 2 * k:
            return han_kohayakawa_bound(n, k)
        return None
    if p.kind == CROSS_PAIR_MAX:
        a, b = p.a, p.b
        if a == b + 1 and p.a_t == 2 and p.min_a == 2 and not p.nonempty_b:
            d = b
            if n == 2 * d + 1:
                return comb(n, d)
            if d == 2 and n >= 6:
                return comb(n, 2) - comb(n - 3, 2) + 1
            if d >= 3 and n >= 2 * d + 2:
                return cross_pair_bound(n, d)
            return None
        if p.a_t == 0 and p.min_a == 1 and p.nonempty_b and a <= b and n >= a + b:
            return comb(n, b) - comb(n - a, b) + 1
        return None
    if p.kind == DIAMETER_MAX:
        return 2**n if p.s >= n else kleitman_bound(n, p.s)
    return None


# -- the engine ---------------------------------------------------------------


class _OverBudget(Exception):
    pass


@dataclass
class _Space:
    ground: int
    upper: list[int]
    conf_up: list[int]
    small: list[int] = field(default_factory=list)
    conf_small: list[int] | None = None
    # forced[a]: upper vertices that must join once a is chosen
    forced: list[int] | None = None
    # preds[a]: upper vertices that must already be chosen (shifted mode)
    preds: list[int] | None = None
    # cap(M): most small vertices that can survive M chosen upper vertices, None if M is impossible
    cap: Callable[[int], int | None] | None = None
    katona: tuple | None = None
    degree: tuple | None = None
    accept: Callable[[int, int], bool] | None = None


def _conflicts(xs: list[int], ys: list[int], pred) -> list[int]:
    out = []
    for A in xs:
        m = 0
        for j, B in enumerate(ys):
            if pred(A, B):
                m |= 1 << j
        out.append(m)
    return out


def _shift_preds(upper: list[int]) -> list[int]:
    """Immediate same-size left shifts of each vertex, as a mask over ``upper``."""
    index = {X: i for i, X in enumerate(upper)}
    out = []
    for X in upper:
        m = 0
        x = X
        while x:
            low = x & -x
            x ^= low
            prev = low >> 1
            if prev and not X & prev:
                m |= 1 << index[(X ^ low) | prev]
        out.append(m)
    return out


def _run(
    sp: _Space,
    *,
    pruning: bool,
    symmetry: bool,
    incumbent: int,
    deadline: float | None,
    shard: tuple[int, int],
    stats: SearchStats,
) -> tuple[int, list[tuple[int, int]]]:
    upper, conf_up = sp.upper, sp.conf_up
    U = len(upper)
    small = sp.small
    conf_small = sp.conf_small if sp.conf_small is not None else [0] * U
    forced = sp.forced
    preds = sp.preds
    cap = sp.cap
    accept = sp.accept
    full_small = (1 << len(small)) - 1
    best: list = [incumbent, []]
    prunes = stats.prunes

    def bump(key: str) -> None:
        prunes[key] = prunes.get(key, 0) + 1

    if sp.degree is not None:
        dk, dnk, smallstar = sp.degree
        m_ground = len(smallstar)
    if sp.katona is not None:
        k_pairs, k_single = sp.katona

    def bound(inmask: int, nin: int, avail_up: int, avail_small: int, maxdeg: int) -> int:
        # greedy matching in the conflict graph on the remaining vertices
        used_s = used_u = 0
        mt = mu = 0
        x = avail_up
        while x:
            low = x & -x
            a = low.bit_length() - 1
            x ^= low
            if used_u & low:
                continue
            c = conf_small[a] & avail_small & ~used_s
            if c:
                used_s |= c & -c
                mt += 1
                continue
            c = conf_up[a] & x & ~used_u
            if c:
                used_u |= c & -c
                mt += 1
                mu += 1
        nsmall = avail_small.bit_count()
        b = nin + avail_up.bit_count() + nsmall - mt
        if cap is not None:
            top = nin + avail_up.bit_count() - mu
            cb = -1
            for M in range(nin, top + 1):
                c = cap(M)
                if c is None:
                    continue
                B = min(nsmall, c)
                if sp.degree is not None and (B < maxdeg or dk * M > dnk * B):
                    continue
                if M + B > cb:
                    cb = M + B
            if cb < b:
                b = cb
        if sp.katona is not None:
            live = inmask | avail_up
            kb = 0
            for size_cap, smask, umask in k_pairs:
                kb += min(size_cap, (avail_small & smask).bit_count() + (live & umask).bit_count())
            for umask in k_single:
                kb += (live & umask).bit_count()
            if kb < b:
                b = kb
        return b

    def canonical(X: int, cells: list) -> bool:
        for lo, c in cells:
            y = (X & c) >> lo
            if y & (y + 1):
                return False
        return True

    def refine(cells: list, X: int) -> list:
        out = []
        for lo, c in cells:
            y = X & c
            if y and y != c:
                out.append((lo, y))
                rest = c & ~y
                out.append(((rest & -rest).bit_length() - 1, rest))
            else:
                out.append((lo, c))
        return out

    def rec(inmask, nin, cells, avail_up, avail_small, pend, skipped, deg, top) -> None:
        stats.nodes += 1
        if deadline is not None and not stats.nodes & 1023 and time.monotonic() > deadline:
            raise _OverBudget
        if not pend and (not top or shard[0] == 0):
            val = nin + avail_small.bit_count()
            if val >= best[0] and (accept is None or accept(inmask, avail_small)):
                if val > best[0]:
                    best[0] = val
                    best[1] = []
                best[1].append((inmask, avail_small))
        maxdeg = 0
        if sp.degree is not None:
            maxdeg = max(deg) if deg else 0
            if pruning:
                for e in range(m_ground):
                    if deg[e] > (avail_small & ~smallstar[e]).bit_count():
                        bump("degree")
                        return
        if pruning:
            if bound(inmask, nin, avail_up, avail_small, maxdeg) < best[0]:
                bump("bound")
                return
            # a skipped vertex that nothing left can block makes every completion non-maximal
            y = skipped
            while y:
                low = y & -y
                y ^= low
                v = low.bit_length() - 1
                if not conf_up[v] & avail_up and not conf_small[v] & avail_small:
                    bump("maximality")
                    return
        cand = avail_up
        if pend:
            lowp = pend & -pend
            cand &= (lowp << 1) - 1
        child = 0
        x = cand
        while x:
            low = x & -x
            a = low.bit_length() - 1
            x ^= low
            X = upper[a]
            if preds is not None and preds[a] & ~inmask:
                bump("shifted")
                continue
            if symmetry and not canonical(X, cells):
                continue
            if top:
                child += 1
                if (child - 1) % shard[1] != shard[0]:
                    continue
            below = avail_up & (low - 1)
            new_deg = deg
            if sp.degree is not None:
                new_deg = tuple(deg[e] + (X >> e & 1) for e in range(m_ground))
            new_pend = pend & ~low
            if forced is not None:
                new_pend |= forced[a]
            rec(
                inmask | low,
                nin + 1,
                refine(cells, X) if symmetry else cells,
                avail_up & ~((low << 1) - 1) & ~conf_up[a],
                avail_small & ~conf_small[a],
                new_pend,
                (skipped | below) & ~conf_up[a],
                new_deg,
                False,
            )

    g = sp.ground
    cells0 = [(0, (1 << g) - 1)] if g else []
    deg0 = tuple([0] * m_ground) if sp.degree is not None else ()
    try:
        rec(0, 0, cells0, (1 << U) - 1, full_small, 0, 0, deg0, True)
    except _OverBudget:
        stats.complete = False
    return best[0], best[1]


# -- problem encodings --------------------------------------------------------


def _lex_sets(n: int, k: int) -> list[int]:
    return sorted(k_subsets(n, k), key=elements_of)


def _excluded(families: list[Family]) -> Callable[[Family], bool]:
    def check(F: Family) -> bool:
        return any(is_subfamily_up_to_iso(F, E) for E in families)

    return check


class _Solver:
    """Runs one problem (or one shard of it) and collects raw witnesses."""

    def __init__(self, p: SearchProblem) -> None:
        self.p = p
        self.stats = SearchStats(shards=p.shard[1])
        self.deadline = None if p.budget is None else time.monotonic() + p.budget
        self.excluded = _excluded([build(nf) for nf in p.exclusions])

    def run(self, sp: _Space, incumbent: int = -1) -> tuple[int, list[tuple[int, int]]]:
        return _run(
            sp,
            pruning=self.p.pruning,
            symmetry=self.p.symmetry and self.p.mode == "full",
            incumbent=incumbent,
            deadline=self.deadline,
            shard=self.p.shard,
            stats=self.stats,
        )

    def first_shard(self) -> bool:
        return self.p.shard[0] == 0


def _pick(sets: list[int], mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(sets[low.bit_length() - 1])
        mask ^= low
    return out


def _s_union(solver: _Solver) -> tuple[int, list[Witness]]:
    p = solver.p
    n, s = p.n, p.s
    d = s // 2
    small = [X for size in range(d + 1) for X in _lex_sets(n, size)]
    upper = [X for size in range(s, d, -1) for X in _lex_sets(n, size)]
    index = {X: i for i, X in enumerate(upper)}
    conf_up = _conflicts(upper, upper, lambda A, B: (A | B).bit_count() > s)
    conf_small = _conflicts(upper, small, lambda A, B: (A | B).bit_count() > s)
    forced = []
    for X in upper:
        m = 0
        if X.bit_count() > d + 1:
            for e in elements_of(X):
                m |= 1 << index[X & ~(1 << (e - 1))]
        forced.append(m)

    def layer_mask(sets: list[int], size: int) -> int:
        return sum(1 << i for i, X in enumerate(sets) if X.bit_count() == size)

    pairs, paired = [], set()
    for i in range(d + 1):
        j = s + 1 - i
        umask = layer_mask(upper, j) if d < j <= s else 0
        if umask:
            paired.add(j)
        pairs.append((comb(n, i), layer_mask(small, i), umask))
    singles = [layer_mask(upper, j) for j in range(d + 1, s + 1) if j not in paired]

    def family(inmask: int, smask: int) -> Family:
        return Family(n, _pick(upper, inmask) + _pick(small, smask))

    accept = None
    if p.exclusions:
        accept = lambda i, sm: not solver.excluded(family(i, sm))  # noqa: E731
    sp = _Space(
        ground=n,
        upper=upper,
        conf_up=conf_up,
        small=small,
        conf_small=conf_small,
        forced=forced,
        preds=_shift_preds(upper) if p.mode == "shifted" else None,
        # the layer inequality only holds for s < n
        katona=(pairs, singles) if s < n else None,
        accept=accept,
    )
    value, hits = solver.run(sp)
    return value, [family(i, sm) for i, sm in hits]


def _diameter(solver: _Solver) -> tuple[int, list[Witness]]:
    p = solver.p
    n, s = p.n, p.s
    upper = [X for size in range(n, -1, -1) for X in _lex_sets(n, size)]
    conf_up = _conflicts(upper, upper, lambda A, B: (A ^ B).bit_count() > s)
    sp = _Space(
        ground=n,
        upper=upper,
        conf_up=conf_up,
        preds=_shift_preds(upper) if p.mode == "shifted" else None,
    )
    value, hits = solver.run(sp)
    return value, [Family(n, _pick(upper, i)) for i, _ in hits]


def _cross(solver: _Solver) -> tuple[int, list[Witness]]:
    p = solver.p
    n, a, b = p.n, p.a, p.b
    upper = _lex_sets(n, a)
    small = _lex_sets(n, b)
    if p.a_t:
        conf_up = _conflicts(upper, upper, lambda A, B: (A & B).bit_count() < p.a_t)
    else:
        conf_up = [0] * len(upper)
    conf_small = _conflicts(upper, small, lambda A, B: not A & B)
    total = comb(n, b)

    def cap(M: int) -> int:
        return total - min_shadow(M, n - a, b)

    def accept(inmask: int, smask: int) -> bool:
        return inmask.bit_count() >= p.min_a and (smask or not p.nonempty_b)

    sp = _Space(
        ground=n,
        upper=upper,
        conf_up=conf_up,
        small=small,
        conf_small=conf_small,
        preds=_shift_preds(upper) if p.mode == "shifted" else None,
        cap=cap,
        accept=accept,
    )
    value, hits = solver.run(sp)
    return value, [(Family(n, _pick(upper, i)), Family(n, _pick(small, sm))) for i, sm in hits]


def _uniform_plain(solver: _Solver) -> tuple[int, list[Witness]]:
    """Direct search over k-sets; used for t >= 2 and for shifted mode."""
    p = solver.p
    n, k, t = p.n, p.k, p.t
    upper = _lex_sets(n, k)
    conf_up = _conflicts(upper, upper, lambda A, B: (A & B).bit_count() < t)

    def family(inmask: int) -> Family:
        return Family(n, _pick(upper, inmask))

    accept = None
    if p.exclusions:
        accept = lambda i, sm: not solver.excluded(family(i))  # noqa: E731
    sp = _Space(
        ground=n,
        upper=upper,
        conf_up=conf_up,
        preds=_shift_preds(upper) if p.mode == "shifted" else None,
        accept=accept,
    )
    value, hits = solver.run(sp)
    return value, [family(i) for i, _ in hits]


def _degree_cap(m: int, k: int) -> int:
    """Largest degree an element y can have in C once x0 has maximum degree.

    Members of C through y have complements avoiding y; their (k-1)-shadow is
    lost from B, and deg(y) <= |B minus the sets through y|."""
    avoid = comb(m - 1, k - 1)
    return max(u for u in range(comb(m - 1, k - 1) + 1) if u <= avoid - min_shadow(u, m - k, k - 1))


def _cover3_caps(m: int, k: int) -> dict[int, int]:
    """For families with cover number >= 3: the most (k-1)-sets B can hold when
    C (the members avoiding x0) has M members, keyed by feasible M.

    Each y has some member of C avoiding it, so deg_C(y) <= M - 1, and
    deg_C(y) <= _degree_cap.  Writing delta_y = M - deg_C(y) for the number of
    complements through y, the lost (k-1)-sets are the shadow S of the
    complements, and two double counts hold:
        (k-1) |S| >= sum_y KK(delta_y, m-k-1 -> k-2)
        (m-k+1) |S| >= sum_y max(delta_y, KK(M - delta_y, m-k -> k-1))
    A dynamic program over y minimizes the larger of the two jointly."""
    dcap = _degree_cap(m, k)
    total = comb(m, k - 1)
    out: dict[int, int] = {}
    if m - k - 1 < 0:
        return out
    link_cap = comb(m - 1, m - k - 1)
    for M in range(1, comb(m, k) + 1):
        lo = max(0, M - min(M - 1, dcap))
        hi = min(M, link_cap)
        target = (m - k) * M
        if lo > hi:
            continue
        g1 = [min_shadow(dl, m - k - 1, k - 2) for dl in range(hi + 1)]
        g2 = [max(min_shadow(dl, m - k - 1, k - 1), min_shadow(M - dl, m - k, k - 1)) for dl in range(hi + 1)]
        states: dict[tuple[int, int], int] = {(0, 0): 0}
        for _ in range(m):
            nxt: dict[tuple[int, int], int] = {}
            for (sm, c1), c2 in states.items():
                for dl in range(lo, hi + 1):
                    t = sm + dl
                    if t > target:
                        break
                    key = (t, c1 + g1[dl])
                    w = c2 + g2[dl]
                    if nxt.get(key, w + 1) > w:
                        nxt[key] = w
            states = nxt
        lost = None
        for (sm, c1), c2 in states.items():
            if sm != target:
                continue
            v = max(min_shadow(M, m - k, k - 1), -(-c1 // (k - 1)) if k > 1 else 0, -(-c2 // (m - k + 1)))
            lost = v if lost is None else min(lost, v)
        if lost is not None:
            out[M] = total - lost
    return out


def _uniform_split(solver: _Solver, caps: dict[int, int] | None, incumbent: int) -> tuple[int, list[Witness]]:
    """x0 = element 1 of maximum degree.  F = {1} x B  +  C with C the k-sets
    avoiding 1 and B the (k-1)-sets meeting every member of C.  ``caps`` (from
    _cover3_caps) restricts to families of cover number >= 3."""
    p = solver.p
    n, k = p.n, p.k
    m = n - 1
    upper = _lex_sets(m, k)
    small = _lex_sets(m, k - 1)
    conf_up = _conflicts(upper, upper, lambda A, B: not A & B)
    conf_small = _conflicts(upper, small, lambda A, B: not A & B)
    total = comb(m, k - 1)
    if caps is None:

        def cap(M: int) -> int | None:
            return total - min_shadow(M, m - k, k - 1)

    else:

        def cap(M: int) -> int | None:
            return caps.get(M)

    smallstar = [sum(1 << j for j, S in enumerate(small) if S >> e & 1) for e in range(m)]

    def family(inmask: int, smask: int) -> Family:
        return Family(n, [X << 1 for X in _pick(upper, inmask)] + [(S << 1) | 1 for S in _pick(small, smask)])

    accept = None
    if p.exclusions:
        accept = lambda i, sm: not solver.excluded(family(i, sm))  # noqa: E731
    sp = _Space(
        ground=m,
        upper=upper,
        conf_up=conf_up,
        small=small,
        conf_small=conf_small,
        cap=cap,
        degree=(k, n - k, smallstar),
        accept=accept,
    )
    value, hits = solver.run(sp, incumbent)
    return value, [family(i, sm) for i, sm in hits]


def _uniform_cover_two(solver: _Solver, incumbent: int) -> tuple[int, list[Witness]]:
    """Families covered by {1, 2} but by no single element: every k-set through
    both, plus {1} x X and {2} x Y with X, Y nonempty cross-intersecting
    (k-1)-uniform families on the other n - 2 points."""
    p = solver.p
    n, k = p.n, p.k
    m = n - 2
    core = [G for G in k_subsets(n, k) if G & 3 == 3]
    upper = _lex_sets(m, k - 1)
    small = upper
    conf_small = _conflicts(upper, small, lambda A, B: not A & B)
    total = comb(m, k - 1)

    def cap(M: int) -> int:
        return total - min_shadow(M, m - k + 1, k - 1)

    def family(inmask: int, smask: int) -> Family:
        return Family(n, core + [(X << 2) | 1 for X in _pick(upper, inmask)] + [(Y << 2) | 2 for Y in _pick(small, smask)])

    def accept(inmask: int, smask: int) -> bool:
        return bool(inmask) and bool(smask) and not (p.exclusions and solver.excluded(family(inmask, smask)))

    sp = _Space(ground=m, upper=upper, conf_up=[0] * len(upper), small=small, conf_small=conf_small, cap=cap, accept=accept)
    value, hits = solver.run(sp, incumbent - len(core))
    return value + len(core), [family(i, sm) for i, sm in hits]


def _uniform_by_cover(solver: _Solver) -> tuple[int, list[Witness]]:
    """Split by cover number: 1 (stars), 2 (a covering pair) and >= 3."""
    p = solver.p
    n, k = p.n, p.k
    best, found = -1, []
    if solver.first_shard():
        star = Family(n, [G for G in k_subsets(n, k) if G & 1])
        if not (p.exclusions and solver.excluded(star)):
            best, found = len(star), [star]
    if n >= 2 and k >= 2:
        v, ws = _uniform_cover_two(solver, best)
        if v > best:
            best, found = v, ws
        elif v == best:
            found += ws
    if k >= 3:
        v, ws = _uniform_split(solver, _cover3_caps(n - 1, k), best)
        if v > best:
            best, found = v, ws
        elif v == best:
            found += ws
    return best, found


def _uniform(solver: _Solver, strategy: str) -> tuple[int, list[Witness]]:
    p = solver.p
    if p.t >= 2 or p.mode == "shifted" or p.k == 1:
        return _uniform_plain(solver)
    if strategy == "cover":
        return _uniform_by_cover(solver)
    if strategy == "split":
        return _uniform_split(solver, None, -1)
    if strategy == "plain":
        return _uniform_plain(solver)
    raise ParameterError(f"unknown uniform strategy {strategy!r}")


# -- witnesses, sharding and entry points -------------------------------------


def _witness_key(w: Witness) -> tuple:
    if isinstance(w, tuple):
        return canonicalize_pair(*w).key()
    return canonicalize(w).key()


def _canonical_witness(w: Witness) -> Witness:
    if isinstance(w, tuple):
        c = canonicalize_pair(*w)
        return (c.first, c.second)
    return canonicalize(w).family


def _dedupe(ws: Iterable[Witness]) -> tuple[Witness, ...]:
    seen: dict[tuple, Witness] = {}
    for w in ws:
        key = _witness_key(w)
        if key not in seen:
            seen[key] = _canonical_witness(w)
    return tuple(seen[key] for key in sorted(seen))


def _witness_value(w: Witness) -> int:
    return len(w[0]) + len(w[1]) if isinstance(w, tuple) else len(w)


def _solve_one(p: SearchProblem, strategy: str = "cover") -> SearchResult:
    start = time.monotonic()
    solver = _Solver(p)
    if p.kind == S_UNION_MAX:
        value, ws = _s_union(solver)
    elif p.kind == UNIFORM_INTERSECTING_MAX:
        value, ws = _uniform(solver, strategy)
    elif p.kind == CROSS_PAIR_MAX:
        value, ws = _cross(solver)
    else:
        value, ws = _diameter(solver)
    ws = [w for w in ws if _witness_value(w) == value]
    solver.stats.wall_time = time.monotonic() - start
    maximum = value if ws else None
    return SearchResult(p, maximum, _dedupe(ws), expected_maximum(p), solver.stats)


def merge_results(parts: list[SearchResult]) -> SearchResult:
    """Combine shard results: the maximum over shards and the union of the
    witnesses that attain it."""
    if not parts:
        raise ValueError("nothing to merge")
    base = replace(parts[0].problem, shard=(0, 1))
    values = [r.maximum for r in parts if r.maximum is not None]
    maximum = max(values) if values else None
    ws: list[Witness] = []
    stats = SearchStats(nodes=0, shards=len(parts))
    for r in parts:
        stats.absorb(r.stats)
        stats.wall_time = max(stats.wall_time, r.stats.wall_time)
        if r.maximum == maximum:
            ws.extend(r.witnesses)
    return SearchResult(base, maximum, _dedupe(ws), expected_maximum(base), stats)


def solve(p: SearchProblem, *, shards: int = 1, workers: int = 1, strategy: str = "cover") -> SearchResult:
    """Run ``p``; with ``shards > 1`` the top level of the tree is split
    round-robin and the pieces are merged (optionally in worker processes)."""
    if shards <= 1:
        return _solve_one(p, strategy)
    problems = [replace(p, shard=(i, shards)) for i in range(shards)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_solve_one, problems, [strategy] * shards))
    else:
        parts = [_solve_one(q, strategy) for q in problems]
    return merge_results(parts)


def _check_kind(p: SearchProblem, kind: str) -> None:
    if p.kind != kind:
        raise ParameterError(f"expected a {kind} problem (got {p.kind})")


def max_s_union(p: SearchProblem, **kw) -> SearchResult:
    _check_kind(p, S_UNION_MAX)
    return solve(p, **kw)


def max_uniform_intersecting(p: SearchProblem, **kw) -> SearchResult:
    """t = 1 uses the cover-number split by default; ``strategy="split"``
    searches the maximum-degree decomposition directly and ``"plain"`` the raw
    conflict graph.  All three must agree."""
    _check_kind(p, UNIFORM_INTERSECTING_MAX)
    return solve(p, **kw)


def max_cross_pair(p: SearchProblem, **kw) -> SearchResult:
    _check_kind(p, CROSS_PAIR_MAX)
    return solve(p, **kw)


def max_diameter(p: SearchProblem, **kw) -> SearchResult:
    _check_kind(p, DIAMETER_MAX)
    return solve(p, **kw)
