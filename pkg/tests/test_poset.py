import json

import jsonschema
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from flagattr.coxeter import DimensionSignature, bruhat_leq, coset_poset
from flagattr.errors import CycleDetected, TooLarge
from flagattr.poset import (
    POSET_JSON_SCHEMA,
    AttractorLattice,
    FinitePoset,
    chain,
    enumerate_upper_sets,
    hasse_export,
    make_poset,
    poset_from_json,
    to_json_dict,
)
from oracles import upper_sets_by_filter


@st.composite
def random_posets(draw, max_size=10):
    n = draw(st.integers(1, max_size))
    # edges only from lower to higher index, so the relation is acyclic
    edges = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=2 * n))
    return make_poset(range(n), [(a, b) for a, b in edges if a < b])


def test_make_poset_examples():
    p = make_poset("abc", [("a", "b"), ("b", "c")])
    assert len(p.pairs()) == 6
    with pytest.raises(CycleDetected):
        make_poset("ab", [("a", "b"), ("b", "a")])


def test_make_poset_from_bruhat_covers():
    s3 = coset_poset(DimensionSignature.full(3))
    assert len(make_poset(s3.elements, s3.covers()).pairs()) == 19


def test_invalid_tables_are_rejected():
    with pytest.raises(ValueError):
        FinitePoset((0, 1), np.zeros((2, 2), dtype=bool))
    with pytest.raises(CycleDetected):
        FinitePoset((0, 1), np.ones((2, 2), dtype=bool))
    with pytest.raises(ValueError):
        FinitePoset((0, 1, 2), np.array([[1, 1, 0], [0, 1, 1], [0, 0, 1]], dtype=bool))


def test_relation_table_is_read_only():
    p = chain("ab")
    with pytest.raises(ValueError):
        p.leq[0, 1] = False


@pytest.mark.parametrize("k", [1, 2, 3, 5, 8])
def test_chain_has_k_plus_one_upper_sets(k):
    assert len(enumerate_upper_sets(chain(range(k)))) == k + 1


@pytest.mark.parametrize("sig,count", [(DimensionSignature.full(3), 9), (DimensionSignature((2,), 4), 8)])
def test_bruhat_upper_sets_match_filter(sig, count):
    p = coset_poset(sig)
    ours = enumerate_upper_sets(p)
    assert len(ours) == len(set(ours)) == count
    assert set(ours) == upper_sets_by_filter(p.elements, bruhat_leq)


@settings(max_examples=80, deadline=None)
@given(random_posets())
def test_upper_sets_match_filter_oracle(p):
    ours = enumerate_upper_sets(p)
    assert len(ours) == len(set(ours))
    assert set(ours) == upper_sets_by_filter(p.elements, p.le)


@settings(max_examples=60, deadline=None)
@given(random_posets())
def test_reduction_then_closure_roundtrip(p):
    assert make_poset(p.elements, p.covers()) == p


@settings(max_examples=40, deadline=None)
@given(random_posets(max_size=7))
def test_upper_set_lattice_is_distributive(p):
    lattice = AttractorLattice.of(p)
    assert lattice.is_closed()
    assert lattice.is_distributive()
    full = frozenset(p.elements)
    assert all(p.is_lower_set(full - u) for u in lattice.nodes)


def test_enumeration_guard():
    with pytest.raises(TooLarge):
        enumerate_upper_sets(chain(range(25)))
    assert len(enumerate_upper_sets(coset_poset(DimensionSignature.full(4)))) == 250


def test_dot_export():
    dot = hasse_export(chain("ab"))
    assert dot.startswith("digraph {") and "rankdir=BT;" in dot
    assert dot.count("->") == 1
    assert hasse_export(coset_poset(DimensionSignature.full(3))).count("->") == 8
    lattice = AttractorLattice.of(chain("abc"))
    dot = hasse_export(lattice)
    assert len(lattice) == 4 and dot.count("->") == 3
    assert hasse_export(lattice) == dot


def test_json_export_follows_schema_and_roundtrips():
    for p in [coset_poset(DimensionSignature.full(3)), coset_poset(DimensionSignature((2,), 4))]:
        text = hasse_export(p, "json")
        data = json.loads(text)
        jsonschema.validate(data, POSET_JSON_SCHEMA)
        back = poset_from_json(text)
        assert np.array_equal(back.leq, p.leq)
        assert len(data["covers"]) == len(p.covers())
    lattice_data = to_json_dict(AttractorLattice.of(coset_poset(DimensionSignature.full(3))))
    jsonschema.validate(lattice_data, POSET_JSON_SCHEMA)
    assert len(lattice_data["elements"]) == 9
