"""Level-wise GSP miner and a brute-force oracle.

Both work directly on the database with :func:`is_subsequence`; neither uses
the tree code, so they can serve as independent checks of it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, Optional, Set

from .wasd import AccessSequence, PatternSet, WasDatabase, is_subsequence, threshold_count


@dataclass
class GspStats:
    levels: int = 0
    peak_candidates: int = 0
    total_candidates: int = 0


def gsp_generate_candidates(fk: Iterable[AccessSequence]) -> Set[AccessSequence]:
    """Join frequent k-sequences into (k+1)-candidates and prune.

    ``s`` joins ``t`` when dropping the first event of ``s`` gives the same
    sequence as dropping the last event of ``t``.  A candidate survives only
    if each of its one-event deletions is in ``fk``.
    """
    fk = set(fk)
    if not fk:
        return set()
    k = len(next(iter(fk)))
    if any(len(s) != k for s in fk):
        raise ValueError("all sequences must share one length")
    if k == 1:
        events = sorted(s[0] for s in fk)
        return {(x, y) for x in events for y in events}

    by_head: Dict[AccessSequence, list] = {}
    for t in fk:
        by_head.setdefault(t[:-1], []).append(t[-1])
    candidates = set()
    for s in fk:
        for last in by_head.get(s[1:], ()):
            c = s + (last,)
            if all(c[:i] + c[i + 1:] in fk for i in range(len(c))):
                candidates.add(c)
    return candidates


def _count_candidates(db: WasDatabase, candidates: Set[AccessSequence]) -> Dict[AccessSequence, int]:
    # one pass over the database per level
    counts = dict.fromkeys(candidates, 0)
    cands = list(candidates)
    for s in db.sequences:
        present = set(s)
        for c in cands:
            if present.issuperset(c) and is_subsequence(c, s):
                counts[c] += 1
    return counts


def gsp_mine(db: WasDatabase, threshold: Fraction, stats: Optional[GspStats] = None) -> PatternSet:
    result = PatternSet(db.m)
    if db.m == 0:
        return result
    need = threshold_count(threshold, db.m)
    singles: Dict[AccessSequence, int] = {}
    for s in db.sequences:
        for e in set(s):
            singles[(e,)] = singles.get((e,), 0) + 1
    level = {c: n for c, n in singles.items() if n >= need}
    if stats is not None:
        stats.levels = 1
        stats.peak_candidates = stats.total_candidates = len(singles)
    while level:
        for c, n in level.items():
            result.add(c, n)
        candidates = gsp_generate_candidates(level)
        if not candidates:
            break
        if stats is not None:
            stats.levels += 1
            stats.peak_candidates = max(stats.peak_candidates, len(candidates))
            stats.total_candidates += len(candidates)
        counts = _count_candidates(db, candidates)
        level = {c: n for c, n in counts.items() if n >= need}
    return result


def brute_force_mine(
    db: WasDatabase,
    threshold: Fraction,
    max_len: Optional[int] = None,
    prune: bool = True,
) -> PatternSet:
    """Ground-truth miner.

    With ``prune`` the patterns are grown one event at a time and only
    frequent patterns are extended.  Without it, every distinct subsequence of
    every sequence (up to ``max_len``) is collected first and each is then
    counted; use that form only on tiny databases.
    """
    result = PatternSet(db.m)
    if db.m == 0:
        return result
    longest = max((len(s) for s in db.sequences), default=0)
    if max_len is None:
        max_len = longest
    need = threshold_count(threshold, db.m)

    def count(p: AccessSequence) -> int:
        return sum(1 for s in db.sequences if is_subsequence(p, s))

    if not prune:
        if db.m > 10:
            raise ValueError("the unpruned oracle is limited to 10 sequences")
        seen: Set[AccessSequence] = set()
        for s in db.sequences:
            for k in range(1, min(len(s), max_len) + 1):
                for idx in combinations(range(len(s)), k):
                    seen.add(tuple(s[i] for i in idx))
        for p in seen:
            n = count(p)
            if n >= need:
                result.add(p, n)
        return result

    alphabet = sorted({e for s in db.sequences for e in s})
    frontier = []
    for e in alphabet:
        n = count((e,))
        if n >= need:
            result.add((e,), n)
            frontier.append((e,))
    singles = list(frontier)
    length = 1
    while frontier and length < max_len:
        grown = []
        for p in frontier:
            for (e,) in singles:
                q = p + (e,)
                n = count(q)
                if n >= need:
                    result.add(q, n)
                    grown.append(q)
        frontier = grown
        length += 1
    return result
