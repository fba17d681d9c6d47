"""The access tree: a prefix tree with parent links and per-event node queues.

A prefix tree over frequent-event subsequences.  Besides the usual child
links every node keeps a parent pointer (for backward traversal to the root)
and a ``queue_next`` pointer chaining all nodes that carry the same label.
The header table stores the front of each label's queue.
"""

from __future__ import annotations

from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .wasd import AccessSequence, EventDictionary, WasDatabase, filter_sequence


class WapNode:
    __slots__ = ("label", "count", "children", "parent", "queue_next")

    def __init__(self, label: Optional[int], parent: Optional["WapNode"] = None) -> None:
        self.label = label
        self.count = 0
        self.children: Dict[int, WapNode] = {}
        self.parent = parent
        self.queue_next: Optional[WapNode] = None

    @property
    def is_root(self) -> bool:
        return self.parent is None

    def __repr__(self) -> str:
        return f"WapNode({self.label}:{self.count})"


class WapTree:
    """Prefix tree with parent links and a header table of per-event node queues.

    ``inserted_count`` is the total weight of non-empty sequences inserted;
    for a tree built from a database this is the number of sequences that
    kept at least one frequent event.
    """

    def __init__(self, frequent_events: Iterable[int]) -> None:
        self.root = WapNode(None)
        self.frequent_events: Tuple[int, ...] = tuple(sorted(set(frequent_events)))
        self._frequent = frozenset(self.frequent_events)
        self.header: Dict[int, WapNode] = {}
        self._tails: Dict[int, WapNode] = {}
        self.inserted_count = 0
        self.node_count = 0

    def insert_sequence(self, filtered: Sequence[int], weight: int = 1) -> None:
        """Add ``filtered`` along one root path, ``weight`` times."""
        if not filtered:
            raise ValueError("cannot insert an empty sequence")
        if weight < 1:
            raise ValueError("weight must be positive")
        for e in filtered:
            if e not in self._frequent:
                raise ValueError(f"event {e} is not frequent in this tree")
        self._insert(filtered, weight)

    def _insert(self, filtered: Sequence[int], weight: int) -> None:
        # unchecked hot path; caller guarantees a non-empty frequent sequence
        node = self.root
        tails = self._tails
        for e in filtered:
            child = node.children.get(e)
            if child is None:
                child = WapNode(e, node)
                node.children[e] = child
                tail = tails.get(e)
                if tail is None:
                    self.header[e] = child
                else:
                    tail.queue_next = child
                tails[e] = child
                self.node_count += 1
            child.count += weight
            node = child
        self.inserted_count += weight

    def event_nodes(self, e: int) -> Iterator[WapNode]:
        """Nodes labeled ``e`` in insertion order, following the event-node queue."""
        node = self.header.get(e)
        while node is not None:
            yield node
            node = node.queue_next

    def walk(self) -> Iterator[WapNode]:
        """Every labeled node, pre-order."""
        stack = list(reversed(list(self.root.children.values())))
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(list(node.children.values())))

    def is_single_branch(self) -> bool:
        node = self.root
        while node.children:
            if len(node.children) > 1:
                return False
            node = next(iter(node.children.values()))
        return True

    def single_branch(self) -> List[Tuple[int, int]]:
        """The ``(label, count)`` path of a single-branch tree, root first."""
        path = []
        node = self.root
        while node.children:
            if len(node.children) > 1:
                raise ValueError("tree has more than one branch")
            node = next(iter(node.children.values()))
            path.append((node.label, node.count))
        return path

    def depth(self) -> int:
        """Number of levels including the root level."""
        best = 0
        stack = [(self.root, 1)]
        while stack:
            node, d = stack.pop()
            best = max(best, d)
            stack.extend((c, d + 1) for c in node.children.values())
        return best

    def dump(self, dictionary: Optional[EventDictionary] = None) -> str:
        """Pre-order text dump, children in ascending label order.

        Labels are printed as tokens when ``dictionary`` is given, else as ids.
        """
        lines = ["root:0"]

        def name(label: int) -> str:
            return dictionary.lookup(label) if dictionary is not None else str(label)

        stack = [(c, 1) for c in sorted(self.root.children.values(), key=lambda n: n.label, reverse=True)]
        while stack:
            node, d = stack.pop()
            lines.append(f"{'  ' * d}{name(node.label)}:{node.count}")
            kids = sorted(node.children.values(), key=lambda n: n.label, reverse=True)
            stack.extend((c, d + 1) for c in kids)
        return "\n".join(lines) + "\n"


def build_tree(db: WasDatabase, fe: Iterable[int]) -> WapTree:
    tree = WapTree(fe)
    keep = tree._frequent
    for s in db.sequences:
        filtered = filter_sequence(s, keep)
        if filtered:
            tree._insert(filtered, 1)
    return tree


def prefix_of(node: WapNode) -> AccessSequence:
    """Labels from the root down to ``node``, excluding ``node`` itself."""
    if node.is_root:
        raise ValueError("the root has no prefix sequence")
    labels = []
    cur = node.parent
    while cur.parent is not None:
        labels.append(cur.label)
        cur = cur.parent
    labels.reverse()
    return tuple(labels)


def unsubsumed_counts(tree: WapTree, e: int) -> Dict[WapNode, int]:
    """Each ``e`` node's count minus the counts of its nearest ``e`` descendants.

    Every ``e`` node is charged to its nearest ``e``-labeled ancestor by one
    upward walk, so the cost is one parent chain per queue entry.
    """
    unsub: Dict[WapNode, int] = {}
    for node in tree.event_nodes(e):
        unsub[node] = unsub.get(node, 0) + node.count
        cur = node.parent
        while cur.parent is not None:
            if cur.label == e:
                unsub[cur] = unsub.get(cur, 0) - node.count
                break
            cur = cur.parent
    return unsub


def unsubsumed_counts_recursive(tree: WapTree, e: int) -> Dict[WapNode, int]:
    """Reference form: count minus unsubsumed counts of *all* ``e`` descendants."""
    unsub: Dict[WapNode, int] = {}

    def visit(node: WapNode) -> int:
        # returns the sum of unsub over e-labeled nodes in node's subtree, node excluded
        below = 0
        for child in node.children.values():
            below += visit(child)
        if node.label == e:
            unsub[node] = node.count - below
            return below + unsub[node]
        return below

    visit(tree.root)
    return unsub
