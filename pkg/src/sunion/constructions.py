"""Named extremal families and their closed-form sizes.

Every family is built from literal set conditions with default anchors that
are the lexicographically least legal choice.  ``closed_form_size`` evaluates
the corresponding bound or counting formula independently of ``build``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Iterable

from .core import Family, ParameterError, binom_sum, k_subsets, mask_of, up_to_layer

KINDS = (
    "K",
    "H",
    "Hstar4",
    "T5",
    "T3",
    "W_even",
    "W_odd",
    "Wstar6",
    "Wstarstar6",
    "Wstar7",
    "Wstarstar7",
    "EKR",
    "HM",
    "J",
    "G",
    "Lex",
    "KatonaIntersecting",
)

# s-union kinds take ``s``; uniform kinds take ``k``
S_UNION_KINDS = frozenset(
    {"K", "H", "Hstar4", "T5", "W_even", "W_odd", "Wstar6", "Wstarstar6", "Wstar7", "Wstarstar7"}
)
UNIFORM_KINDS = frozenset({"T3", "EKR", "HM", "J", "G", "Lex"})


@dataclass(frozen=True)
class NamedFamily:
    """A construction identifier with parameters and optional anchors.

    Anchors are given as tuples of elements of [n]: ``y``/``x0`` are single
    elements, ``D``, ``D1``, ``D2``, ``E``, ``J`` are sets.
    """

    kind: str
    n: int
    s: int | None = None
    k: int | None = None
    t: int | None = None
    i: int | None = None
    m: int | None = None
    anchors: tuple[tuple[str, tuple[int, ...]], ...] = field(default=())

    @classmethod
    def make(cls, kind: str, n: int, **kw) -> "NamedFamily":
        """Build with anchors passed as keyword sets, e.g. ``D=(2, 3, 4)``."""
        anchor_names = ("y", "x0", "D", "D1", "D2", "E", "J")
        anchors = []
        for name in anchor_names:
            if name in kw and kw[name] is not None:
                v = kw.pop(name)
                v = (v,) if isinstance(v, int) else tuple(sorted(v))
                anchors.append((name, v))
        kind = resolve_kind(kind, s=kw.get("s"), k=kw.get("k"))
        return cls(kind, n, anchors=tuple(anchors), **kw)

    def anchor(self, name: str) -> tuple[int, ...] | None:
        for key, value in self.anchors:
            if key == name:
                return value
        return None

    @property
    def label(self) -> str:
        if self.kind in S_UNION_KINDS:
            core = f"{self.kind}({self.n},{self.s})"
        elif self.kind in ("J", "G"):
            core = f"{self.kind}_{self.i}({self.n},{self.k})"
        elif self.kind == "Lex":
            core = f"L({self.n},{self.k},{self.m})"
        elif self.kind == "KatonaIntersecting":
            core = f"KatonaIntersecting({self.n},{self.t})"
        else:
            core = f"{self.kind}({self.n},{self.k})"
        if self.anchors:
            core += "[" + ";".join(f"{k}={','.join(map(str, v))}" for k, v in self.anchors) + "]"
        return core

    def notes(self) -> list[str]:
        if self.kind == "W_even" and self.s == 4:
            return ["W(n,4) applies the d >= 3 formula at d = 2"]
        return []


def resolve_kind(kind: str, s: int | None = None, k: int | None = None) -> str:
    if kind in KINDS:
        return kind
    if kind == "W" and s is not None:
        return "W_even" if s % 2 == 0 else "W_odd"
    if kind == "Wstar" and s in (6, 7):
        return f"Wstar{s}"
    if kind == "Wstarstar" and s in (6, 7):
        return f"Wstarstar{s}"
    if kind == "Hstar" and s == 4:
        return "Hstar4"
    if kind == "T":
        if s == 5:
            return "T5"
        if k == 3:
            return "T3"
    raise ParameterError(f"unknown family kind {kind!r}")


# ---------------------------------------------------------------------------
# validation helpers


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ParameterError(message)


def _need(nf: NamedFamily, name: str) -> int:
    value = getattr(nf, name)
    _require(value is not None, f"{nf.kind} needs parameter {name}")
    return value


def _elements_ok(nf: NamedFamily, values: Iterable[int], name: str) -> None:
    for v in values:
        _require(1 <= v <= nf.n, f"anchor {name} element {v} is not in [1, {nf.n}]")


def _set_anchor(nf: NamedFamily, name: str, default: Iterable[int]) -> int:
    value = nf.anchor(name)
    value = tuple(default) if value is None else value
    _elements_ok(nf, value, name)
    return mask_of(value)


def _point_anchor(nf: NamedFamily, name: str, default: int) -> int:
    value = nf.anchor(name)
    if value is None:
        value = (default,)
    _require(len(value) == 1, f"anchor {name} must be a single element")
    _elements_ok(nf, value, name)
    return 1 << (value[0] - 1)


def _s_union_range(nf: NamedFamily) -> tuple[int, int]:
    n, s = nf.n, _need(nf, "s")
    _require(2 <= s <= n - 2, f"{nf.kind} needs 2 <= s <= n - 2 (got n={n}, s={s})")
    return s, s // 2


def _uniform_range(nf: NamedFamily, kmin: int, strict: bool) -> int:
    n, k = nf.n, _need(nf, "k")
    _require(k >= kmin, f"{nf.kind} needs k >= {kmin} (got k={k})")
    if strict:
        _require(n > 2 * k, f"{nf.kind} needs n > 2k (got n={n}, k={k})")
    else:
        _require(n >= 2 * k, f"{nf.kind} needs n >= 2k (got n={n}, k={k})")
    return k


def _popcount(x: int) -> int:
    return x.bit_count()


# ---------------------------------------------------------------------------
# builders


def _build_K(nf: NamedFamily) -> list[int]:
    s, d = _s_union_range(nf)
    out = up_to_layer(nf.n, d)
    if s % 2:
        y = _point_anchor(nf, "y", 1)
        out += [F for F in k_subsets(nf.n, d + 1) if F & y]
    return out


def _build_H(nf: NamedFamily) -> list[int]:
    s, d = _s_union_range(nf)
    n = nf.n
    if s % 2 == 0:
        D = _set_anchor(nf, "D", range(1, d + 2))
        _require(_popcount(D) == d + 1, "H(n,2d) needs D in C([n], d+1), i.e. |D| = d+1")
        return up_to_layer(n, d - 1) + [D] + [H for H in k_subsets(n, d) if H & D]
    y = _point_anchor(nf, "y", 1)
    D = _set_anchor(nf, "D", range(2, d + 3))
    _require(_popcount(D) == d + 1, "H(n,2d+1) needs |D| = d+1")
    _require(not D & y, "H(n,2d+1) needs D a subset of [n] minus {y}")
    return up_to_layer(n, d) + [D] + [H for H in k_subsets(n, d + 1) if H & y and H & D]


def _build_Hstar4(nf: NamedFamily) -> list[int]:
    s, _ = _s_union_range(nf)
    _require(s == 4, "H*(n,4) is defined only for s = 4")
    n = nf.n
    pair = 0b11
    return (
        up_to_layer(n, 1)
        + [H for H in k_subsets(n, 2) if H & pair]
        + [pair | 1 << (i - 1) for i in range(3, n + 1)]
    )


def _three_of(n: int, k: int, base: int, need: int) -> list[int]:
    return [F for F in k_subsets(n, k) if _popcount(F & base) >= need]


def _build_T5(nf: NamedFamily) -> list[int]:
    s, _ = _s_union_range(nf)
    _require(s == 5, "T(n,5) is defined only for s = 5")
    return up_to_layer(nf.n, 2) + _three_of(nf.n, 3, 0b111, 2)


def _build_T3(nf: NamedFamily) -> list[int]:
    k = _uniform_range(nf, 3, strict=False)
    _require(k == 3, "T(n,3) is defined only for k = 3")
    return _three_of(nf.n, 3, 0b111, 2)


def _w_even_anchors(nf: NamedFamily, d: int) -> tuple[int, int]:
    D1 = _set_anchor(nf, "D1", range(1, d + 2))
    D2 = _set_anchor(nf, "D2", list(range(1, d + 1)) + [d + 2])
    _require(
        _popcount(D1) == d + 1 and _popcount(D2) == d + 1,
        "W(n,2d) needs |D1| = |D2| = d+1",
    )
    _require(_popcount(D1 & D2) == d, "W(n,2d) needs |D1 and D2| = d")
    return D1, D2


def _build_W_even(nf: NamedFamily) -> list[int]:
    s, d = _s_union_range(nf)
    _require(s % 2 == 0 and d >= 2, "W(n,2d) needs s = 2d with d >= 2")
    D1, D2 = _w_even_anchors(nf, d)
    return up_to_layer(nf.n, d - 1) + [D1, D2] + [H for H in k_subsets(nf.n, d) if H & D1 and H & D2]


def _build_W_odd(nf: NamedFamily) -> list[int]:
    s, d = _s_union_range(nf)
    _require(s % 2 == 1 and d >= 2, "W(n,2d+1) needs s = 2d+1 with d >= 2")
    j = NamedFamily("J", nf.n, k=d + 1, i=2, anchors=nf.anchors)
    return up_to_layer(nf.n, d) + _build_J(j)


def _build_Wstar6(nf: NamedFamily) -> list[int]:
    s, _ = _s_union_range(nf)
    _require(s == 6, "W*(n,6) is defined only for s = 6")
    n = nf.n
    return (
        up_to_layer(n, 2)
        + [F for F in k_subsets(n, 3) if F & 0b111]
        + [H for H in k_subsets(n, 4) if H & 0b111 == 0b111]
    )


def _build_Wstarstar6(nf: NamedFamily) -> list[int]:
    s, _ = _s_union_range(nf)
    _require(s == 6, "W**(n,6) is defined only for s = 6")
    n = nf.n
    return (
        up_to_layer(n, 2)
        + [F for F in k_subsets(n, 3) if F & 0b11]
        + [H for H in k_subsets(n, 4) if H & 0b11 == 0b11]
    )


def _build_Wstar7(nf: NamedFamily, core: int) -> list[int]:
    s, _ = _s_union_range(nf)
    _require(s == 7, f"{nf.kind} is defined only for s = 7")
    n = nf.n
    return (
        up_to_layer(n, 3)
        + [H for H in k_subsets(n, 4) if H & core == core]
        + [H for H in k_subsets(n, 4) if H & 1 and H & core]
    )


def _build_EKR(nf: NamedFamily) -> list[int]:
    k = _uniform_range(nf, 1, strict=False)
    y = _point_anchor(nf, "y", 1)
    return [F for F in k_subsets(nf.n, k) if F & y]


def _build_HM(nf: NamedFamily) -> list[int]:
    k = _uniform_range(nf, 2, strict=False)
    base = mask_of(range(2, k + 2))
    return [G for G in k_subsets(nf.n, k) if G & 1 and G & base] + [base]


def _j_anchors(nf: NamedFamily) -> tuple[int, int, int, int]:
    k, i = nf.k, nf.i
    x0 = _point_anchor(nf, "x0", 1)
    x0_elem = x0.bit_length()
    J = _set_anchor(nf, "J", range(1, i + 2))
    E = _set_anchor(nf, "E", range(i + 2, i + k + 1))
    _require(_popcount(E) == k - 1, "J_i(n,k) needs a (k-1)-element set E")
    _require(_popcount(J) == i + 1, "J_i(n,k) needs an (i+1)-element set J")
    _require(not E & J, "J_i(n,k) needs J a subset of [n] minus E")
    _require(bool(J & x0), f"J_i(n,k) needs x_0 in J (x_0={x0_elem})")
    return x0, J, E, J & ~x0


def _build_J(nf: NamedFamily) -> list[int]:
    k = _uniform_range(nf, 3, strict=True)
    i = _need(nf, "i")
    _require(1 <= i <= k - 1, "J_i(n,k) needs 1 <= i <= k-1")
    x0, _, E, Ji = _j_anchors(nf)
    js = [1 << b for b in range(nf.n) if Ji >> b & 1]
    fam = [G for G in k_subsets(nf.n, k) if G & x0 and all(G & (E | j) for j in js)]
    return fam + [E | j for j in js]


def _build_G(nf: NamedFamily) -> list[int]:
    k = _uniform_range(nf, 3, strict=True)
    i = _need(nf, "i")
    _require(2 <= i <= k, "G_i(n,k) needs i in [2, k]")
    x0 = _point_anchor(nf, "x0", 1)
    E = _set_anchor(nf, "E", range(2, i + 2))
    _require(_popcount(E) == i, "G_i(n,k) needs an i-element set E")
    _require(not E & x0, "G_i(n,k) needs E a subset of [n] minus {x_0}")
    return [G for G in k_subsets(nf.n, k) if G & E == E or (G & x0 and G & E)]


def _build_Lex(nf: NamedFamily) -> list[int]:
    from .shiftlex import lex_initial

    k, m = _need(nf, "k"), _need(nf, "m")
    return list(lex_initial(nf.n, k, m).bits)


def _katona_a(n: int, t: int) -> tuple[int, bool]:
    return (n + t) // 2, (n + t) % 2 == 1


def _build_KatonaIntersecting(nf: NamedFamily) -> list[int]:
    return list(build_katona_intersecting(nf.n, _need(nf, "t")).bits)


_BUILDERS = {
    "K": _build_K,
    "H": _build_H,
    "Hstar4": _build_Hstar4,
    "T5": _build_T5,
    "T3": _build_T3,
    "W_even": _build_W_even,
    "W_odd": _build_W_odd,
    "Wstar6": _build_Wstar6,
    "Wstarstar6": _build_Wstarstar6,
    "Wstar7": lambda nf: _build_Wstar7(nf, 0b110),
    "Wstarstar7": lambda nf: _build_Wstar7(nf, 0b1110),
    "EKR": _build_EKR,
    "HM": _build_HM,
    "J": _build_J,
    "G": _build_G,
    "Lex": _build_Lex,
    "KatonaIntersecting": _build_KatonaIntersecting,
}


def build(nf: NamedFamily) -> Family:
    if nf.kind not in _BUILDERS:
        raise ParameterError(f"unknown family kind {nf.kind!r}")
    return Family(nf.n, _BUILDERS[nf.kind](nf))


def build_katona_intersecting(n: int, t: int) -> Family:
    """The extremal non-uniform t-intersecting family on [n]."""
    if not 2 <= t <= n:
        raise ParameterError(f"t-intersecting Katona family needs 2 <= t <= n (got n={n}, t={t})")
    a, odd = _katona_a(n, t)
    big = a + 1 if odd else a
    members = [F for F in range(1 << n) if F.bit_count() >= big]
    if odd:
        members += k_subsets(n - 1, a)
    return Family(n, members)


# ---------------------------------------------------------------------------
# closed forms


def _katona_bound(n: int, s: int) -> int:
    d = s // 2
    return binom_sum(n, d) + (comb(n - 1, d) if s % 2 else 0)


def _frankl_bound(n: int, s: int) -> int:
    d = s // 2
    if s % 2 == 0:
        return binom_sum(n, d) - comb(n - d - 1, d) + 1
    return binom_sum(n, d) + comb(n - 1, d) - comb(n - d - 2, d) + 1


def _main_bound(n: int, s: int) -> int:
    d = s // 2
    if s % 2 == 0:
        return binom_sum(n, d) - comb(n - d - 1, d) - comb(n - d - 2, d - 1) + 2
    return binom_sum(n, d) + comb(n - 1, d) - comb(n - d - 2, d) - comb(n - d - 3, d - 1) + 2


def katona_bound(n: int, s: int) -> int:
    """Maximum size of an s-union family on [n]."""
    return _katona_bound(n, s)


def frankl_bound(n: int, s: int) -> int:
    """Maximum size of an s-union family not contained in K(n, s)."""
    return _frankl_bound(n, s)


def main_bound(n: int, s: int) -> int:
    """Maximum size of an s-union family contained in neither K(n, s) nor H(n, s)
    (nor H*(n,4) when s = 4, nor T(n,5) when s = 5)."""
    return _main_bound(n, s)


def ekr_bound(n: int, k: int) -> int:
    return comb(n - 1, k - 1)


def hilton_milner_bound(n: int, k: int) -> int:
    return comb(n - 1, k - 1) - comb(n - k - 1, k - 1) + 1


def han_kohayakawa_bound(n: int, k: int) -> int:
    return comb(n - 1, k - 1) - comb(n - k - 1, k - 1) - comb(n - k - 2, k - 2) + 2


def kleitman_bound(n: int, s: int) -> int:
    """Maximum size of a family of diameter at most s (same value as Katona's)."""
    return _katona_bound(n, s)


def cross_pair_bound(n: int, d: int) -> int:
    """Upper bound on |A| + |B| for cross-intersecting A in C([n], d+1) 2-intersecting
    with |A| >= 2, B in C([n], d); valid for d >= 3."""
    return comb(n, d) - comb(n - d - 1, d) - comb(n - d - 2, d - 1) + 2


def closed_form_size(nf: NamedFamily) -> int:
    kind, n = nf.kind, nf.n
    if kind in S_UNION_KINDS:
        s, d = _s_union_range(nf)
        if kind == "K":
            return _katona_bound(n, s)
        if kind in ("H", "Hstar4", "T5"):
            return _frankl_bound(n, s)
        return _main_bound(n, s)
    if kind == "EKR":
        return ekr_bound(n, _need(nf, "k"))
    if kind in ("HM", "T3"):
        return hilton_milner_bound(n, _need(nf, "k"))
    if kind == "J":
        k, i = _need(nf, "k"), _need(nf, "i")
        return comb(n - 1, k - 1) - comb(n - k, k - 1) + comb(n - k - i, k - 1 - i) + i
    if kind == "G":
        k, i = _need(nf, "k"), _need(nf, "i")
        # members through x0 that contain all of E only exist when i < k
        both = comb(n - i - 1, k - i - 1) if i < k else 0
        return comb(n - i, k - i) + comb(n - 1, k - 1) - comb(n - 1 - i, k - 1) - both
    if kind == "Lex":
        return _need(nf, "m")
    if kind == "KatonaIntersecting":
        t = _need(nf, "t")
        a, odd = _katona_a(n, t)
        if odd:
            return comb(n - 1, a) + sum(comb(n, j) for j in range(a + 1, n + 1))
        return sum(comb(n, j) for j in range(a, n + 1))
    raise ParameterError(f"unknown family kind {kind!r}")


def defining_property(nf: NamedFamily) -> tuple[str, int]:
    """(predicate name, parameter) each built family must satisfy."""
    if nf.kind in S_UNION_KINDS:
        return "s_union", nf.s
    if nf.kind == "KatonaIntersecting":
        return "t_intersecting", nf.t
    if nf.kind == "Lex":
        return "uniform", nf.k
    return "t_intersecting", 1


# -- extremal cross-intersecting pairs ----------------------------------------


def _meeting(n: int, b: int, cond) -> Family:
    return Family(n, [B for B in k_subsets(n, b) if cond(B)])


def cross_pair_shapes(n: int, d: int) -> list[tuple[Family, Family]]:
    """Extremal pairs (A, B), A (d+1)-uniform 2-intersecting with |A| >= 2 and
    B d-uniform, for n >= 2d + 2.  d = 2 has a single shape with |A| = n - 2."""
    if d < 2 or n < 2 * d + 2:
        raise ParameterError(f"extremal cross pairs need d >= 2 and n >= 2d+2 (got d={d}, n={n})")
    if d == 2:
        a = Family(n, [0b11 | 1 << (i - 1) for i in range(3, n + 1)])
        return [(a, _meeting(n, 2, lambda B: B & 0b11))]
    base = mask_of(range(1, d + 1))
    pairs = [
        (
            Family(n, [base | 1 << d, base | 1 << (d + 1)]),
            _meeting(n, d, lambda B: B & base or (B >> d) & 0b11 == 0b11),
        )
    ]
    if d == 3:
        for core in (0b111, 0b11):
            a = Family(n, [A for A in k_subsets(n, 4) if A & core == core])
            pairs.append((a, _meeting(n, 3, lambda B, c=core: B & c)))
    return pairs


def nonempty_cross_shapes(n: int, a: int, b: int) -> list[tuple[Family, Family]]:
    """Extremal nonempty cross-intersecting pairs for a <= b and n > a + b: one
    a-set against every b-set meeting it, and for a = b = 2 also two equal stars."""
    if n <= a + b or a > b:
        raise ParameterError(f"needs a <= b and n > a + b (got n={n}, a={a}, b={b})")
    A = mask_of(range(1, a + 1))
    pairs = [(Family(n, [A]), _meeting(n, b, lambda B: B & A))]
    if a == b:
        pairs.append((pairs[0][1], pairs[0][0]))
    if (a, b) == (2, 2):
        star = _meeting(n, 2, lambda B: B & 1)
        pairs.append((star, star))
    return pairs
