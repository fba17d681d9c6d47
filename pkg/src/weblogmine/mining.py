"""Recursive conditional search over access trees.

Patterns are grown from the back: for each event ``e`` the prefixes ending
right before the nodes labeled ``e`` form the conditional sequence base of
``e``.  A conditional tree is built from that base and mined in turn, and
every pattern it yields gets ``e`` appended.  Supports are absolute counts
throughout, so the threshold count is fixed once at the top.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from .tree import WapNode, WapTree, build_tree
from .wasd import AccessSequence, PatternSet, WasDatabase, frequent_events, threshold_count


class ConditionalSequence(NamedTuple):
    events: AccessSequence
    weight: int


@dataclass
class MiningStats:
    trees_built: int = 0
    nodes_built: int = 0


def single_branch_patterns(branch: Sequence[Tuple[int, int]], threshold_count: int, m: int = 0) -> PatternSet:
    """Distinct label subsequences of one path with their supports.

    The support of a combination is the count of its deepest node; repeated
    label sequences keep the largest such count, which is the count at the end
    of the leftmost embedding.  Extending along leftmost embeddings visits
    each distinct sequence once and can stop as soon as a count drops below
    the threshold because counts never increase along the path.
    """
    for (_, upper), (_, lower) in zip(branch, branch[1:]):
        if lower > upper:
            raise ValueError("branch counts must be non-increasing from the root")
    labels = [label for label, _ in branch]
    counts = [count for _, count in branch]
    n = len(labels)
    # first_at[i][x]: first position >= i holding label x
    first_at: List[Dict[int, int]] = [dict() for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        first_at[i] = dict(first_at[i + 1])
        first_at[i][labels[i]] = i

    out = PatternSet(m)
    stack: List[Tuple[AccessSequence, int]] = [((), 0)]
    while stack:
        pattern, start = stack.pop()
        for label, pos in first_at[start].items():
            if counts[pos] < threshold_count:
                continue
            grown = pattern + (label,)
            out.add(grown, counts[pos])
            stack.append((grown, pos + 1))
    return out


def _project(tree: WapTree, e: int) -> Tuple[int, List[ConditionalSequence]]:
    """Support of ``e`` in ``tree`` and its conditional sequence base.

    A parent walk from each ``e`` node stops at its nearest ``e``-labeled
    ancestor, which is charged the node's count; a node's unsubsumed count is
    its count minus what it was charged.  Ancestors enter a queue before their
    descendants, so the ancestor's prefix is already known when the walk stops
    there and the rest of the path need not be walked again.
    """
    walked = []
    prefixes: Dict[WapNode, AccessSequence] = {}
    charged: Dict[WapNode, int] = {}
    for node in tree.event_nodes(e):
        labels = []
        cur = node.parent
        while cur.parent is not None and cur.label != e:
            labels.append(cur.label)
            cur = cur.parent
        labels.reverse()
        if cur.parent is None:
            prefix = tuple(labels)
        else:
            charged[cur] = charged.get(cur, 0) + node.count
            prefix = prefixes[cur] + (e,) + tuple(labels)
        prefixes[node] = prefix
        walked.append((node, prefix))

    total = 0
    base = []
    for node, prefix in walked:
        weight = node.count - charged.get(node, 0)
        if weight <= 0:
            continue
        total += weight
        if prefix:
            base.append(ConditionalSequence(prefix, weight))
    return total, base


def conditional_base(tree: WapTree, e: int) -> List[ConditionalSequence]:
    """Weighted prefixes of the ``e`` nodes, in queue order.

    Nodes with a zero unsubsumed count and nodes directly under the root
    contribute nothing.
    """
    return _project(tree, e)[1]


def conditional_frequent_events(base: Iterable[ConditionalSequence], threshold_count: int) -> Tuple[int, ...]:
    weights: Dict[int, int] = {}
    for events, weight in base:
        for x in set(events):
            weights[x] = weights.get(x, 0) + weight
    return tuple(sorted(x for x, w in weights.items() if w >= threshold_count))


def conditional_tree(base: Iterable[ConditionalSequence], cfe: Iterable[int]) -> WapTree:
    """Tree over ``base`` filtered to ``cfe``; each entry is inserted with its weight."""
    tree = WapTree(cfe)
    keep = tree._frequent
    for events, weight in base:
        filtered = [x for x in events if x in keep]
        if filtered:
            tree._insert(filtered, weight)
    return tree


def suffix_extend(patterns: PatternSet, e: int) -> PatternSet:
    return PatternSet(patterns.m, {events + (e,): count for events, count in patterns.counts.items()})


def event_support(tree: WapTree, e: int) -> int:
    """Total weight of inserted sequences containing ``e``."""
    return _project(tree, e)[0]


def mine(tree: WapTree, threshold_count: int, denominator_m: int, stats: Optional[MiningStats] = None) -> PatternSet:
    """All patterns over the tree's events whose support reaches ``threshold_count``."""
    if threshold_count < 1:
        raise ValueError("threshold_count must be positive")
    if stats is not None:
        stats.trees_built += 1
        stats.nodes_built += tree.node_count
    if tree.is_single_branch():
        return single_branch_patterns(tree.single_branch(), threshold_count, denominator_m)

    patterns = PatternSet(denominator_m)
    for e in tree.frequent_events:
        count, base = _project(tree, e)
        if count < threshold_count:
            continue
        patterns.add((e,), count)
        cfe = conditional_frequent_events(base, threshold_count)
        if not cfe:
            continue
        sub = mine(conditional_tree(base, cfe), threshold_count, denominator_m, stats)
        patterns.update(suffix_extend(sub, e))
    return patterns


def mine_database(db: WasDatabase, threshold: Fraction, stats: Optional[MiningStats] = None) -> PatternSet:
    """Build the tree for ``db`` at ``threshold`` and mine it."""
    fe = frequent_events(db, threshold)
    if db.m == 0 or not fe:
        return PatternSet(db.m)
    tree = build_tree(db, fe)
    return mine(tree, threshold_count(threshold, db.m), db.m, stats)
