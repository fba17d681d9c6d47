from fractions import Fraction

import pytest
from hypothesis import given

from weblogmine.tree import (
    WapTree,
    build_tree,
    prefix_of,
    unsubsumed_counts,
    unsubsumed_counts_recursive,
)
from weblogmine.wasd import WasDatabase, filter_sequence, frequent_events

from tests.invariants import prefix_count_oracle, tree_paths, tree_violations
from tests.strategies import databases, thresholds

F1_DUMP = """\
root:0
  a:3
    b:3
      a:2
        c:2
          c:1
      c:1
        a:1
          c:1
  b:1
    a:1
      b:1
        a:1
          c:1
"""


@pytest.fixture
def f1_tree(f1):
    return build_tree(f1, frequent_events(f1, Fraction(3, 4)))


def filtered_rows(db, fe):
    return [f for f in (filter_sequence(s, set(fe)) for s in db.sequences) if f]


def node_at(tree, db, path):
    node = tree.root
    for e in db.encode(path):
        node = node.children[e]
    return node


def test_f1_tree_shape(f1, f1_tree):
    assert f1_tree.dump(f1.dictionary) == F1_DUMP
    a, b = (f1.encode(x)[0] for x in "ab")
    assert {k: v.count for k, v in f1_tree.root.children.items()} == {a: 3, b: 1}
    assert f1_tree.node_count == 13
    assert sum(len(s) for s in filtered_rows(f1, f1_tree.frequent_events)) == 19
    rows = filtered_rows(f1, f1_tree.frequent_events)
    assert [" ".join(f1.dictionary.decode(r)) for r in rows] == ["a b a c", "a b c a c", "b a b a c", "a b a c c"]
    assert tree_paths(f1_tree) == dict(prefix_count_oracle(rows))


def test_f1_tree_invariants(f1, f1_tree):
    assert tree_violations(f1_tree, filtered_rows(f1, f1_tree.frequent_events)) == []


def test_empty_database_builds_root_only():
    tree = build_tree(WasDatabase.from_strings([]), [])
    assert tree.inserted_count == 0 and not tree.root.children
    assert tree.dump() == "root:0\n"


def test_insert_repeated_and_shared_prefix():
    t = WapTree([0, 1, 2])
    t.insert_sequence((0, 1))
    t.insert_sequence((0, 1))
    assert t.dump() == "root:0\n  0:2\n    1:2\n"
    t = WapTree([0, 1, 2])
    t.insert_sequence((0, 1))
    t.insert_sequence((0, 2))
    assert t.dump() == "root:0\n  0:2\n    1:1\n    2:1\n"
    assert t.inserted_count == 2


def test_insert_repeated_label_on_one_path():
    t = WapTree([0])
    t.insert_sequence((0, 0))
    assert t.dump() == "root:0\n  0:1\n    0:1\n"
    queue = list(t.event_nodes(0))
    assert len(queue) == 2 and queue[1].parent is queue[0]


def test_insert_rejects_infrequent_and_empty():
    t = WapTree([0])
    with pytest.raises(ValueError):
        t.insert_sequence((1,))
    with pytest.raises(ValueError):
        t.insert_sequence(())


def test_weighted_insert_equals_unit_inserts():
    a, b = WapTree([0, 1]), WapTree([0, 1])
    a.insert_sequence((0, 1, 0), weight=3)
    for _ in range(3):
        b.insert_sequence((0, 1, 0))
    assert a.dump() == b.dump() and a.inserted_count == b.inserted_count == 3


def test_prefix_of(f1, f1_tree):
    assert f1.dictionary.decode(prefix_of(node_at(f1_tree, f1, "a b a c"))) == ["a", "b", "a"]
    for child in f1_tree.root.children.values():
        assert prefix_of(child) == ()
    assert f1.dictionary.decode(prefix_of(node_at(f1_tree, f1, "b a b a c"))) == ["b", "a", "b", "a"]
    with pytest.raises(ValueError):
        prefix_of(f1_tree.root)


def test_event_nodes(f1, f1_tree):
    a, c = f1.encode("a c")
    assert [n.count for n in f1_tree.event_nodes(c)] == [2, 1, 1, 1, 1]
    assert [n.count for n in f1_tree.event_nodes(a)] == [3, 2, 1, 1, 1]
    t = WapTree([0, 1])
    t.insert_sequence((0, 1))
    assert len(list(t.event_nodes(1))) == 1


def test_unsubsumed_counts_f1(f1, f1_tree):
    c = f1.encode("c")[0]
    unsub = unsubsumed_counts(f1_tree, c)
    assert unsub[node_at(f1_tree, f1, "a b a c")] == 1
    assert unsub[node_at(f1_tree, f1, "a b c")] == 0
    assert unsub[node_at(f1_tree, f1, "a b c a c")] == 1
    assert unsub[node_at(f1_tree, f1, "a b a c c")] == 1
    assert sum(unsub.values()) == 4


def test_unsubsumed_counts_chain():
    # e:5 -> x -> e:3 -> y -> e:2, built by weighted insertions
    e, x, y = 0, 1, 2
    t = WapTree([e, x, y])
    t.insert_sequence((e, x, e, y, e), weight=2)
    t.insert_sequence((e, x, e), weight=1)
    t.insert_sequence((e,), weight=2)
    top = t.root.children[e]
    mid = top.children[x].children[e]
    low = mid.children[y].children[e]
    assert (top.count, mid.count, low.count) == (5, 3, 2)
    for fn in (unsubsumed_counts, unsubsumed_counts_recursive):
        u = fn(t, e)
        assert (u[low], u[mid], u[top]) == (2, 1, 2)


@given(databases(), thresholds)
def test_random_tree_invariants(db, xi):
    fe = frequent_events(db, xi)
    tree = build_tree(db, fe)
    assert tree_violations(tree, filtered_rows(db, fe)) == []


@given(databases(max_m=20))
def test_build_is_deterministic(db):
    fe = frequent_events(db, Fraction(1, 5))
    t1, t2 = build_tree(db, fe), build_tree(db, fe)
    assert t1.dump() == t2.dump()
    for e in fe:
        assert [prefix_of(n) for n in t1.event_nodes(e)] == [prefix_of(n) for n in t2.event_nodes(e)]


@given(databases(max_m=20))
def test_leaf_count_bounded_by_distinct_filtered_sequences(db):
    fe = frequent_events(db, Fraction(1, 5))
    tree = build_tree(db, fe)
    leaves = sum(1 for n in tree.walk() if not n.children)
    assert leaves <= len(set(filtered_rows(db, fe)))
