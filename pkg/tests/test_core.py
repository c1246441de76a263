import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import families
from sunion.constructions import NamedFamily, build
from sunion.core import (
    Family,
    FormatError,
    GroundSetError,
    ParameterError,
    Params,
    SetBits,
    complement_family,
    down_closure,
    dumps_family,
    intersection_size,
    k_subsets,
    layer,
    loads_family,
    power_set,
    union_size,
)
from sunion.properties import is_hereditary


def S(n, *xs):
    return SetBits.of(n, xs)


def test_setbits_encoding():
    a = S(5, 1, 3, 5)
    assert a.bits == 0b10101
    assert a.size == 3
    assert list(a) == [1, 3, 5]
    assert 3 in a and 2 not in a
    assert a.complement().elements() == (2, 4)
    with pytest.raises(GroundSetError):
        SetBits(3, 0b1000)
    with pytest.raises(GroundSetError):
        S(3, 4)
    with pytest.raises(GroundSetError):
        SetBits(33, 0)


def test_union_size_examples():
    assert union_size(S(4, 1, 2), S(4, 2, 3)) == 3
    a = S(6, 1, 4, 6)
    assert union_size(a, a) == 3
    assert union_size(S(5, 1, 2, 3), S(5, 4, 5)) == 5
    with pytest.raises(GroundSetError):
        union_size(S(4, 1), S(5, 1))


def test_intersection_size_examples():
    assert intersection_size(S(4, 1, 2, 3), S(4, 1, 2, 4)) == 2
    a = S(6, 2, 5)
    assert intersection_size(a, a.complement()) == 0
    assert intersection_size(a, SetBits(6, 0b111111)) == 2
    with pytest.raises(GroundSetError):
        intersection_size(S(4, 1), S(5, 1))


@given(st.integers(1, 10).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, (1 << n) - 1), st.integers(0, (1 << n) - 1))))
def test_inclusion_exclusion(case):
    n, x, y = case
    a, b = SetBits(n, x), SetBits(n, y)
    assert union_size(a, b) + intersection_size(a, b) == a.size + b.size


@given(families())
def test_canonical_order_is_insertion_independent(f):
    members = list(f.bits)
    random.Random(len(members)).shuffle(members)
    g = Family(f.n, members + members[:3])
    assert g == f and g.bits == f.bits
    assert list(g.bits) == sorted(g.bits, key=lambda b: (b.bit_count(), b))


def test_complement_family_examples():
    f = Family.from_sets(3, [{1, 2}, {1, 3}])
    assert complement_family(f) == Family.from_sets(3, [{3}, {2}])
    assert complement_family(Family(4)) == Family(4)


@given(families())
def test_complement_is_involution(f):
    c = complement_family(f)
    assert len(c) == len(f)
    assert complement_family(c) == f


def test_down_closure_examples():
    f = Family.from_sets(3, [{1, 2}])
    assert down_closure(f) == Family.from_sets(3, [set(), {1}, {2}, {1, 2}])
    assert len(down_closure(Family.from_sets(4, [{1, 2, 3, 4}]))) == 16
    h = down_closure(Family.from_sets(5, [{1, 2, 3}, {3, 4}]))
    assert down_closure(h) == h


@given(families(max_n=5, max_size=10), st.data())
def test_down_closure_is_hereditary_idempotent_monotone(f, data):
    c = down_closure(f)
    assert is_hereditary(c)
    assert f.issubset(c)
    assert down_closure(c) == c
    sub = data.draw(st.lists(st.sampled_from(f.bits), unique=True) if f.bits else st.just([]))
    assert down_closure(Family(f.n, sub)).issubset(c)


def test_layer_examples():
    assert layer(power_set(3), 2) == Family.from_sets(3, [{1, 2}, {1, 3}, {2, 3}])
    assert layer(build(NamedFamily.make("K", 6, s=4)), 3) == Family(6)
    with pytest.raises(ParameterError):
        layer(power_set(3), 4)


@given(families())
def test_layers_partition_family(f):
    parts = [layer(f, i) for i in range(f.n + 1)]
    assert sum(len(p) for p in parts) == len(f)
    joined = Family(f.n)
    for i, p in enumerate(parts):
        assert all(b.bit_count() == i for b in p.bits)
        joined = joined.union(p)
    assert joined == f


def test_k_subsets_counts():
    from math import comb

    for n in range(0, 9):
        for k in range(0, n + 1):
            subs = k_subsets(n, k)
            assert len(subs) == comb(n, k)
            assert all(b.bit_count() == k for b in subs)
            assert subs == sorted(subs)
    assert k_subsets(3, 4) == []


def test_params_duality():
    p = Params(7, s=5)
    assert p.d == 2 and p.dual_t == 2
    assert Params(8, s=6).d == 3
    with pytest.raises(ParameterError):
        Params(5, s=6)
    with pytest.raises(ParameterError):
        Params(7, s=5, t=3)


@given(families(min_n=0, max_n=8), st.sampled_from(["text", "hex"]))
def test_text_formats_round_trip(f, form):
    text = dumps_family(f, form)
    assert loads_family(text) == f
    assert loads_family(text, form) == f


def test_text_format_layout():
    f = Family.from_sets(3, [set(), {1, 3}])
    assert dumps_family(f) == "n=3\n{}\n1,3\n"
    assert dumps_family(f, "hex") == "n=3 hex\n0\n5\n"


@pytest.mark.parametrize(
    "text, line",
    [("", 1), ("x=3\n1,2\n", 1), ("n=3\n1,4\n", 2), ("n=3\n1,2\n1,a\n", 3)],
)
def test_malformed_text_names_line(text, line):
    with pytest.raises(FormatError, match=f"line {line}"):
        loads_family(text)
