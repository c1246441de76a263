from itertools import combinations
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import brute_max
from sunion.constructions import NamedFamily, build, cross_pair_shapes, nonempty_cross_shapes
from sunion.core import Family, ParameterError, k_subsets
from sunion.iso import canonicalize, canonicalize_pair, is_subfamily_up_to_iso
from sunion.properties import (
    has_diameter_at_most,
    is_cross_intersecting,
    is_s_union,
    is_t_intersecting,
    katona_layer_check,
    katona_violations,
)
from sunion.search import (
    SearchProblem,
    expected_maximum,
    max_cross_pair,
    max_diameter,
    max_s_union,
    max_uniform_intersecting,
    min_shadow,
    solve,
)


def keys(witnesses):
    out = set()
    for w in witnesses:
        out.add(canonicalize_pair(*w).key() if isinstance(w, tuple) else canonicalize(w).key())
    return out


def brute_keys(n, sols):
    return {canonicalize(Family(n, s)).key() for s in sols}


def named_keys(n, specs, **kw):
    return {canonicalize(build(NamedFamily.make(kind, n, **kw, **extra))).key() for kind, extra in specs}


def excluding(n, names, **kw):
    fams = [build(NamedFamily.make(x, n, **kw)) for x in names]
    return lambda sets: not any(is_subfamily_up_to_iso(Family(n, sets), e) for e in fams)


# -- Kruskal-Katona cascade -----------------------------------------------------


def shadow_size(sets, j):
    out = set()
    for F in sets:
        elems = [1 << b for b in range(F.bit_length()) if F >> b & 1]
        for c in combinations(elems, j):
            out.add(sum(c))
    return len(out)


@pytest.mark.parametrize("n, k", [(4, 2), (5, 2), (5, 3), (6, 2), (6, 4)])
def test_min_shadow_matches_exhaustive(n, k):
    layer = k_subsets(n, k)
    best = {}
    for code in range(1 << len(layer)):
        sets = [layer[i] for i in range(len(layer)) if code >> i & 1]
        m = len(sets)
        for j in range(0, k + 1):
            v = shadow_size(sets, j)
            if v < best.get((m, j), 1 << 30):
                best[(m, j)] = v
    for (m, j), v in best.items():
        assert min_shadow(m, k, j) == v, (m, k, j)


# -- exhaustive oracles ---------------------------------------------------------


@pytest.mark.parametrize("n, s", [(n, s) for n in range(1, 6) for s in range(0, n + 1)] + [(6, 3), (6, 4), (7, 3)])
def test_s_union_matches_brute_force(n, s):
    value, sols = brute_max(list(range(1 << n)), lambda a, b: (a | b).bit_count() <= s)
    res = max_s_union(SearchProblem.s_union(n, s))
    assert res.maximum == value
    assert keys(res.witnesses) == brute_keys(n, sols)


@pytest.mark.parametrize("names, value", [(["K"], 20), (["K", "H", "Hstar4"], 19)])
def test_s_union_exclusions_match_brute_force(names, value):
    n, s = 6, 4
    v, sols = brute_max(list(range(1 << n)), lambda a, b: (a | b).bit_count() <= s, excluding(n, names, s=s))
    res = max_s_union(SearchProblem.s_union(n, s, exclude=names))
    assert res.maximum == v == value == res.closed_form_expected
    assert keys(res.witnesses) == brute_keys(n, sols)


@pytest.mark.parametrize("n, k, t", [(4, 2, 1), (5, 2, 1), (6, 2, 1), (6, 3, 1), (7, 3, 1), (6, 3, 2), (7, 3, 2), (6, 2, 2)])
def test_uniform_matches_brute_force(n, k, t):
    value, sols = brute_max(k_subsets(n, k), lambda a, b: (a & b).bit_count() >= t)
    for strategy in ("cover", "split", "plain"):
        res = solve(SearchProblem.uniform(n, k, t), strategy=strategy)
        assert res.maximum == value
        assert keys(res.witnesses) == brute_keys(n, sols), strategy


def test_uniform_exclusion_matches_brute_force():
    n, k = 7, 3
    v, sols = brute_max(k_subsets(n, k), lambda a, b: bool(a & b), excluding(n, ["EKR"], k=k))
    for strategy in ("cover", "split", "plain"):
        res = solve(SearchProblem.uniform(n, k, exclude=["EKR"]), strategy=strategy)
        assert res.maximum == v == 13
        assert keys(res.witnesses) == brute_keys(n, sols)


@pytest.mark.parametrize("n, s", [(n, s) for n in range(1, 5) for s in range(0, n - 1)] + [(5, 2), (5, 3), (6, 2), (6, 3)])
def test_diameter_matches_brute_force(n, s):
    value, sols = brute_max(list(range(1 << n)), lambda a, b: (a ^ b).bit_count() <= s)
    res = max_diameter(SearchProblem.diameter(n, s))
    assert res.maximum == value
    assert keys(res.witnesses) == brute_keys(n, sols)


def brute_cross(n, a, b, a_t=0, min_a=1, nonempty_b=False):
    """Enumerate every A; the best B is all b-sets meeting each member of A."""
    ups, lows = k_subsets(n, a), k_subsets(n, b)
    best, found = -1, []
    for code in range(1 << len(ups)):
        A = [ups[i] for i in range(len(ups)) if code >> i & 1]
        if len(A) < min_a or any((x & y).bit_count() < a_t for x, y in combinations(A, 2)):
            continue
        B = [y for y in lows if all(x & y for x in A)]
        if nonempty_b and not B:
            continue
        v = len(A) + len(B)
        if v > best:
            best, found = v, [(A, B)]
        elif v == best:
            found.append((A, B))
    return best, {canonicalize_pair(Family(n, A), Family(n, B)).key() for A, B in found}


@pytest.mark.parametrize(
    "n, a, b, kw",
    [
        (5, 3, 2, {"a_t": 2, "min_a": 2}),
        (5, 2, 2, {"nonempty_b": True}),
        (6, 2, 2, {"nonempty_b": True}),
        (6, 2, 3, {"nonempty_b": True}),
        (5, 2, 1, {}),
    ],
)
def test_cross_matches_brute_force(n, a, b, kw):
    value, bkeys = brute_cross(n, a, b, **kw)
    res = max_cross_pair(SearchProblem.cross(n, a, b, **kw))
    assert res.maximum == value
    assert keys(res.witnesses) == bkeys
    for A, B in res.witnesses:
        assert is_cross_intersecting(A, B)


# -- closed forms and named witnesses -------------------------------------------


def test_s_union_examples():
    res = max_s_union(SearchProblem.s_union(6, 4))
    assert res.maximum == 22 == res.closed_form_expected
    assert keys(res.witnesses) == named_keys(6, [("K", {})], s=4)
    res = max_s_union(SearchProblem.s_union(7, 4, exclude=["K"]))
    assert res.maximum == 24
    assert keys(res.witnesses) == named_keys(7, [("H", {}), ("Hstar4", {})], s=4)
    res = max_s_union(SearchProblem.s_union(7, 4, exclude=["K", "H", "Hstar4"]))
    assert res.maximum == 22
    assert keys(res.witnesses) == named_keys(7, [("W", {})], s=4)
    res = max_s_union(SearchProblem.s_union(7, 5, exclude=["K"]))
    assert res.maximum == 42
    assert keys(res.witnesses) == named_keys(7, [("H", {}), ("T5", {})], s=5)


def test_uniform_examples():
    assert max_uniform_intersecting(SearchProblem.uniform(7, 3)).maximum == 15
    res = max_uniform_intersecting(SearchProblem.uniform(9, 3, t=2))
    assert res.maximum == 7 == comb(7, 1)
    star2 = Family(9, [F for F in k_subsets(9, 3) if F & 0b11 == 0b11])
    assert keys(res.witnesses) == {canonicalize(star2).key()}


def test_cross_examples():
    res = max_cross_pair(SearchProblem.cross(6, 3, 2, a_t=2, min_a=2))
    assert res.maximum == 13
    assert keys(res.witnesses) == {canonicalize_pair(*p).key() for p in cross_pair_shapes(6, 2)}
    res = max_cross_pair(SearchProblem.cross(5, 2, 2, nonempty_b=True))
    assert res.maximum == 8
    assert keys(res.witnesses) == {canonicalize_pair(*p).key() for p in nonempty_cross_shapes(5, 2, 2)}


def test_diameter_examples():
    assert max_diameter(SearchProblem.diameter(6, 4)).maximum == 22
    assert max_diameter(SearchProblem.diameter(5, 3)).maximum == 10
    for n in range(1, 5):
        res = max_diameter(SearchProblem.diameter(n, n))
        assert res.maximum == 2**n == res.closed_form_expected


def test_expected_maximum_table():
    assert expected_maximum(SearchProblem.s_union(7, 5)) == 44
    assert expected_maximum(SearchProblem.s_union(8, 6, exclude=["K", "H"])) == 88
    assert expected_maximum(SearchProblem.s_union(7, 4, exclude=["K", "H"])) is None
    assert expected_maximum(SearchProblem.uniform(9, 4, exclude=["EKR", "HM", NamedFamily.make("G", 9, k=4, i=2)])) is None
    assert expected_maximum(SearchProblem.uniform(9, 4, exclude=["EKR", "HM"])) == 51
    assert expected_maximum(SearchProblem.cross(8, 4, 3, a_t=2, min_a=2)) == 51
    assert expected_maximum(SearchProblem.cross(5, 3, 2, a_t=2, min_a=2)) == 10


# -- soundness of the engine switches ------------------------------------------


SMALL = [
    SearchProblem.s_union(5, 3),
    SearchProblem.s_union(6, 3),
    SearchProblem.s_union(6, 4),
    SearchProblem.s_union(6, 4, exclude=["K"]),
    SearchProblem.s_union(6, 4, exclude=["K", "H", "Hstar4"]),
    SearchProblem.uniform(6, 3),
    SearchProblem.uniform(6, 2, t=1),
    SearchProblem.uniform(6, 3, t=2),
    SearchProblem.cross(5, 3, 2, a_t=2, min_a=2),
    SearchProblem.cross(6, 3, 2, a_t=2, min_a=2),
    SearchProblem.cross(5, 2, 2, nonempty_b=True),
    SearchProblem.diameter(5, 3),
    SearchProblem.diameter(6, 2),
]


def summary(res):
    return res.maximum, sorted(keys(res.witnesses))


@pytest.mark.parametrize("p", SMALL, ids=lambda p: str(p.to_dict()))
def test_switches_do_not_change_answers(p):
    from dataclasses import replace

    base = summary(solve(p))
    assert summary(solve(replace(p, pruning=False))) == base
    assert summary(solve(replace(p, symmetry=False))) == base
    assert summary(solve(replace(p, pruning=False, symmetry=False))) == base
    assert summary(solve(p, shards=3)) == base


@pytest.mark.parametrize("p", [q for q in SMALL if not q.exclusions], ids=lambda p: str(p.to_dict()))
def test_shifted_mode_agrees_on_maximum(p):
    from dataclasses import replace

    assert solve(replace(p, mode="shifted")).maximum == solve(p).maximum


def test_shifted_mode_rejects_exclusions():
    with pytest.raises(ParameterError, match="shifted"):
        SearchProblem.s_union(7, 4, exclude=["K"], mode="shifted")


def test_results_are_deterministic():
    p = SearchProblem.s_union(7, 4, exclude=["K"])
    one = solve(p).to_dict(timing=False)
    assert solve(p).to_dict(timing=False) == one
    sharded = solve(p, shards=4, workers=1).to_dict(timing=False)
    parallel = solve(p, shards=4, workers=2).to_dict(timing=False)
    assert sharded == parallel
    assert (sharded["maximum"], sharded["witnesses"]) == (one["maximum"], one["witnesses"])


def test_budget_marks_over_budget():
    res = solve(SearchProblem.s_union(8, 6, exclude=["K", "H"], budget=0.01))
    assert res.status == "over-budget"
    assert not res.stats.complete


@pytest.mark.parametrize(
    "make",
    [
        lambda: SearchProblem.s_union(11, 4),
        lambda: SearchProblem.s_union(6, 7),
        lambda: SearchProblem.uniform(7, 3, t=4),
        lambda: SearchProblem.cross(6, 0, 2),
        lambda: SearchProblem.diameter(5, 2, exclusions=(NamedFamily.make("K", 5, s=2),)),
        lambda: SearchProblem("NOPE", 5),
        lambda: SearchProblem.s_union(6, 4, shard=(3, 2)),
        lambda: SearchProblem("S_UNION_MAX", 7, s=4, exclusions=(NamedFamily.make("EKR", 7, k=3),)),
    ],
)
def test_problem_validation(make):
    with pytest.raises(ParameterError):
        make()


# -- witnesses pass every constraint ------------------------------------------


def test_witnesses_satisfy_constraints():
    for n, s, names in [(7, 4, ["K"]), (7, 5, ["K"]), (7, 4, ["K", "H", "Hstar4"]), (7, 5, ["K", "H", "T5"])]:
        res = max_s_union(SearchProblem.s_union(n, s, exclude=names))
        excluded = [build(NamedFamily.make(x, n, s=s)) for x in names]
        for w in res.witnesses:
            assert len(w) == res.maximum and is_s_union(w, s)
            assert not any(is_subfamily_up_to_iso(w, e) for e in excluded)
    res = max_uniform_intersecting(SearchProblem.uniform(7, 3, exclude=["EKR", "HM", NamedFamily.make("G", 7, k=3, i=2)]))
    for w in res.witnesses:
        assert len(w) == res.maximum and is_t_intersecting(w, 1)
    res = max_diameter(SearchProblem.diameter(6, 3))
    assert all(has_diameter_at_most(w, 3) and len(w) == res.maximum for w in res.witnesses)


@given(st.integers(2, 6).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n - 1))), st.sampled_from(["full", "shifted"]), st.booleans())
def test_katona_inequality_on_searched_families(case, mode, pruning):
    n, s = case
    res = max_s_union(SearchProblem.s_union(n, s, mode=mode, pruning=pruning))
    assert res.maximum == res.closed_form_expected
    for w in res.witnesses:
        assert is_s_union(w, s)
        assert not katona_violations(katona_layer_check(w, s))
