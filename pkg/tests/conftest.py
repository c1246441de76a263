"""Shared strategies and settings for the test suite."""

from __future__ import annotations

import random
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from sunion.core import Family, k_subsets

# every property suite runs at least this many cases from a fixed seed
PROPERTY_CASES = 1000

settings.register_profile(
    "sunion",
    max_examples=PROPERTY_CASES,
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
    database=None,
)
settings.load_profile("sunion")


@st.composite
def families(draw, min_n: int = 1, max_n: int = 6, max_size: int = 24) -> Family:
    n = draw(st.integers(min_n, max_n))
    members = draw(st.lists(st.integers(0, (1 << n) - 1), max_size=max_size, unique=True))
    return Family(n, members)


@st.composite
def uniform_families(draw, n: int, k: int, min_size: int = 0) -> Family:
    layer = k_subsets(n, k)
    picked = draw(st.lists(st.sampled_from(layer), min_size=min_size, max_size=len(layer), unique=True))
    return Family(n, picked)


@st.composite
def permutations_of(draw, n: int) -> tuple[int, ...]:
    return tuple(draw(st.permutations(range(1, n + 1))))


def random_perm(rng: random.Random, n: int) -> tuple[int, ...]:
    perm = list(range(1, n + 1))
    rng.shuffle(perm)
    return tuple(perm)


def brute_max(candidates: list[int], ok_pair, accept=None) -> tuple[int, list[tuple[int, ...]]]:
    """Largest subfamilies of ``candidates`` with every pair (and every member
    with itself) accepted by ``ok_pair`` and the whole family by ``accept``.
    Plain include/exclude recursion with only a counting bound; tiny inputs
    only.  Returns the size and all optimal subfamilies."""
    good = [c for c in candidates if ok_pair(c, c)]
    m = len(good)
    compat = [0] * m
    for i in range(m):
        for j in range(m):
            if i != j and ok_pair(good[i], good[j]):
                compat[i] |= 1 << j
    best = [0, []]

    def rec(i: int, chosen: int, allowed: int) -> None:
        if i == m:
            size = chosen.bit_count()
            if size < best[0] or (accept and not accept(tuple(good[j] for j in range(m) if chosen >> j & 1))):
                return
            if size > best[0]:
                best[0], best[1] = size, [chosen]
            elif size == best[0]:
                best[1].append(chosen)
            return
        if chosen.bit_count() + (allowed >> i).bit_count() < best[0]:
            return
        if allowed >> i & 1:
            rec(i + 1, chosen | 1 << i, allowed & compat[i])
        rec(i + 1, chosen, allowed)

    rec(0, 0, (1 << m) - 1)
    sols = [tuple(good[i] for i in range(m) if c >> i & 1) for c in best[1]]
    return best[0], sols


def construction_grid(max_n: int = 12):
    """Every named family with legal parameters for n <= max_n.  Lex families
    take a few representative m per (n, k)."""
    from math import comb

    from sunion.constructions import NamedFamily

    for n in range(1, max_n + 1):
        for s in range(2, n - 1):
            yield NamedFamily.make("K", n, s=s)
            yield NamedFamily.make("H", n, s=s)
            if s >= 4:
                yield NamedFamily.make("W", n, s=s)
            if s == 4:
                yield NamedFamily.make("Hstar4", n, s=s)
            if s == 5:
                yield NamedFamily.make("T5", n, s=s)
            if s in (6, 7):
                yield NamedFamily.make("Wstar", n, s=s)
                yield NamedFamily.make("Wstarstar", n, s=s)
        for k in range(1, n // 2 + 1):
            yield NamedFamily.make("EKR", n, k=k)
            if k >= 2:
                yield NamedFamily.make("HM", n, k=k)
            if k == 3:
                yield NamedFamily.make("T3", n, k=k)
            if k >= 3 and n > 2 * k:
                for i in range(1, k):
                    yield NamedFamily.make("J", n, k=k, i=i)
                for i in range(2, k + 1):
                    yield NamedFamily.make("G", n, k=k, i=i)
        for k in range(0, n + 1):
            total = comb(n, k)
            for m in sorted({0, 1, total // 2, total}):
                if m <= total:
                    yield NamedFamily.make("Lex", n, k=k, m=m)
        for t in range(2, n + 1):
            yield NamedFamily.make("KatonaIntersecting", n, t=t)
