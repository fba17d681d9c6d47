import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from weblogmine.baselines import brute_force_mine
from weblogmine.mining import (
    ConditionalSequence,
    MiningStats,
    conditional_base,
    conditional_frequent_events,
    conditional_tree,
    mine,
    mine_database,
    single_branch_patterns,
    suffix_extend,
)
from weblogmine.tree import WapTree, build_tree
from weblogmine.wasd import PatternSet, WasDatabase, frequent_events, support, threshold_count

from tests.conftest import F1_PATTERNS
from tests.strategies import databases, thresholds


def literal_branch_combinations(branch, threshold):
    """Every non-empty node subset; support = deepest node's count; keep max."""
    best = {}
    for k in range(1, len(branch) + 1):
        for idx in combinations(range(len(branch)), k):
            labels = tuple(branch[i][0] for i in idx)
            count = branch[idx[-1]][1]
            best[labels] = max(best.get(labels, 0), count)
    return {p: c for p, c in best.items() if c >= threshold}


def decode_set(db, ps):
    return {" ".join(db.dictionary.decode(p)): c for p, c in ps.counts.items()}


def test_single_branch_examples():
    a, b = 0, 1
    assert single_branch_patterns([(a, 3), (b, 2)], 2).counts == {(a,): 3, (b,): 2, (a, b): 2}
    got = single_branch_patterns([(a, 2), (b, 2), (a, 1)], 1).counts
    assert got == {(a,): 2, (b,): 2, (a, a): 1, (a, b): 2, (b, a): 1, (a, b, a): 1}
    assert len(single_branch_patterns([], 1)) == 0


def test_single_branch_rejects_increasing_counts():
    with pytest.raises(ValueError):
        single_branch_patterns([(0, 1), (1, 2)], 1)


@st.composite
def branches(draw):
    n = draw(st.integers(0, 9))
    labels = draw(st.lists(st.integers(0, 2), min_size=n, max_size=n))
    drops = draw(st.lists(st.integers(0, 2), min_size=n, max_size=n))
    count, out = draw(st.integers(1, 12)), []
    for label, drop in zip(labels, drops):
        count = max(1, count - drop)
        out.append((label, count))
    return out


@given(branches(), st.integers(1, 6))
def test_single_branch_matches_literal_enumeration(branch, threshold):
    assert single_branch_patterns(branch, threshold).counts == literal_branch_combinations(branch, threshold)


def test_single_branch_tree_is_mined_by_fast_path():
    db = WasDatabase.from_strings(["a b"])
    tree = build_tree(db, frequent_events(db, Fraction(1)))
    assert tree.is_single_branch()
    assert decode_set(db, mine(tree, 1, 1)) == {"a": 1, "b": 1, "a b": 1}


def test_f1_conditional_base_and_tree(f1):
    tree = build_tree(f1, frequent_events(f1, Fraction(3, 4)))
    c = f1.encode("c")[0]
    base = conditional_base(tree, c)
    assert sorted((" ".join(f1.dictionary.decode(s.events)), s.weight) for s in base) == [
        ("a b a", 1), ("a b a c", 1), ("a b c a", 1), ("b a b a", 1),
    ]
    cfe = conditional_frequent_events(base, 3)
    assert cfe == f1.encode("a b")
    ct = conditional_tree(base, cfe)
    assert ct.dump(f1.dictionary) == (
        "root:0\n  a:3\n    b:3\n      a:3\n  b:1\n    a:1\n      b:1\n        a:1\n"
    )
    assert ct.inserted_count == 4


def test_conditional_base_single_path_and_root_only():
    t = WapTree([0, 1])
    t.insert_sequence((0, 1))
    assert conditional_base(t, 1) == [ConditionalSequence((0,), 1)]
    assert conditional_base(t, 0) == []


def test_conditional_frequent_events_counts_each_entry_once():
    base = [ConditionalSequence((0, 0, 1), 2), ConditionalSequence((1,), 1)]
    assert conditional_frequent_events(base, 3) == (1,)
    assert conditional_frequent_events([], 1) == ()
    assert conditional_frequent_events([ConditionalSequence((2, 0, 2), 5)], 5) == (0, 2)


def test_conditional_tree_weights_and_empty():
    ct = conditional_tree([ConditionalSequence((7,), 5)], [7])
    assert ct.dump() == "root:0\n  7:5\n"
    ct = conditional_tree([ConditionalSequence((1, 2), 4)], [3])
    assert ct.inserted_count == 0 and not ct.root.children


def test_suffix_extend():
    a, b, c = 0, 1, 2
    assert suffix_extend(PatternSet(4, {(a, b): 3}), c).counts == {(a, b, c): 3}
    assert len(suffix_extend(PatternSet(4), c)) == 0
    assert suffix_extend(PatternSet(4, {(a,): 4, (b, a): 4}), c).counts == {(a, c): 4, (b, a, c): 4}


def test_f1_mine(f1):
    xi = Fraction(3, 4)
    tree = build_tree(f1, frequent_events(f1, xi))
    got = mine(tree, threshold_count(xi, f1.m), f1.m)
    assert decode_set(f1, got) == {p: 4 for p in F1_PATTERNS}
    assert got == brute_force_mine(f1, xi)


def test_threshold_above_m_gives_nothing(f1):
    tree = build_tree(f1, frequent_events(f1, Fraction(1, 4)))
    assert len(mine(tree, f1.m + 1, f1.m)) == 0


def test_mine_rejects_nonpositive_threshold(f1):
    tree = build_tree(f1, frequent_events(f1, Fraction(1)))
    with pytest.raises(ValueError):
        mine(tree, 0, f1.m)


def test_mine_empty_database():
    assert len(mine_database(WasDatabase.from_strings([]), Fraction(1, 2))) == 0


@given(databases(max_m=60, max_alphabet=6, max_len=10), thresholds)
def test_mine_matches_oracle(db, xi):
    stats = MiningStats()
    got = mine_database(db, xi, stats)
    assert got == brute_force_mine(db, xi)
    fe = set(frequent_events(db, xi))
    longest = max(len([e for e in s if e in fe]) for s in db.sequences)
    for p in got:
        assert set(p.events) <= fe
        count, _ = support(p.events, db)
        assert count == p.count and p.count >= threshold_count(xi, db.m)
        assert len(p) <= longest


@given(databases(max_m=30), thresholds, st.randoms(use_true_random=False))
def test_mine_is_independent_of_sequence_order(db, xi, rnd):
    rows = list(db.sequences)
    rnd.shuffle(rows)
    shuffled = WasDatabase(tuple(rows), db.dictionary)
    assert mine_database(shuffled, xi) == mine_database(db, xi)


def test_deep_repetition_is_handled():
    rng = random.Random(7)
    db = WasDatabase.from_tokens([[rng.choice("ab") for _ in range(rng.randint(10, 14))] for _ in range(8)])
    xi = Fraction(1, 2)
    assert mine_database(db, xi) == brute_force_mine(db, xi)
