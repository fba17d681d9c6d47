"""Access-sequence database model, support counting and the WASD text format.

A WASD file holds one access sequence per line as whitespace separated event
tokens.  Lines starting with ``#`` and blank lines are ignored::

    # sessions from access.log
    /index.html /products.html /cart.html
    /index.html /about.html

Supports are kept as exact integers; thresholds are :class:`fractions.Fraction`
values and every comparison is done by cross-multiplication.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, TextIO, Tuple

AccessSequence = Tuple[int, ...]

DEFAULT_MAX_TOKENS = 100_000


class WasdFormatError(ValueError):
    """Raised when a WASD stream violates the line format."""

    def __init__(self, line_number: int, message: str) -> None:
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class EventDictionary:
    """Interns event tokens to dense integer ids in first-seen order."""

    def __init__(self, tokens: Iterable[str] = ()) -> None:
        self._ids: Dict[str, int] = {}
        self._tokens: List[str] = []
        for token in tokens:
            self.intern(token)

    def intern(self, token: str) -> int:
        event_id = self._ids.get(token)
        if event_id is None:
            event_id = len(self._tokens)
            self._ids[token] = event_id
            self._tokens.append(token)
        return event_id

    def id_of(self, token: str) -> int:
        return self._ids[token]

    def lookup(self, event_id: int) -> str:
        return self._tokens[event_id]

    def encode(self, tokens: Iterable[str]) -> AccessSequence:
        return tuple(self.intern(t) for t in tokens)

    def decode(self, events: Iterable[int]) -> List[str]:
        return [self._tokens[e] for e in events]

    @property
    def tokens(self) -> Tuple[str, ...]:
        return tuple(self._tokens)

    def __len__(self) -> int:
        return len(self._tokens)

    def __contains__(self, token: object) -> bool:
        return token in self._ids

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EventDictionary):
            return NotImplemented
        return self._tokens == other._tokens

    def __repr__(self) -> str:
        return f"EventDictionary({self._tokens!r})"


@dataclass(frozen=True)
class WasDatabase:
    """A web access sequence database.

    ``m`` is the number of sequences at load time and is the denominator of
    every support fraction, even after sequences are filtered down to nothing.
    """

    sequences: Tuple[AccessSequence, ...]
    dictionary: EventDictionary = field(compare=True)
    m: int = -1

    def __post_init__(self) -> None:
        object.__setattr__(self, "sequences", tuple(tuple(s) for s in self.sequences))
        if self.m == -1:
            object.__setattr__(self, "m", len(self.sequences))
        if self.m != len(self.sequences):
            raise ValueError(f"m={self.m} does not match {len(self.sequences)} sequences")

    @classmethod
    def from_tokens(cls, rows: Iterable[Iterable[str]]) -> "WasDatabase":
        dictionary = EventDictionary()
        sequences = [dictionary.encode(row) for row in rows]
        return cls(tuple(sequences), dictionary)

    @classmethod
    def from_strings(cls, rows: Iterable[str]) -> "WasDatabase":
        """Build from space separated token strings, e.g. ``["a b", "b c"]``."""
        return cls.from_tokens(row.split() for row in rows)

    def head(self, n: int) -> "WasDatabase":
        """The database made of the first ``n`` sequences (``m`` becomes ``n``)."""
        if not 0 <= n <= self.m:
            raise ValueError(f"cannot take {n} of {self.m} sequences")
        return WasDatabase(self.sequences[:n], self.dictionary)

    def encode(self, tokens: str | Iterable[str]) -> AccessSequence:
        """Map tokens of an existing database to ids; unknown tokens raise KeyError."""
        if isinstance(tokens, str):
            tokens = tokens.split()
        return tuple(self.dictionary.id_of(t) for t in tokens)

    def __len__(self) -> int:
        return self.m


# ---------------------------------------------------------------------------
# thresholds


def parse_support(text: str | Fraction | int) -> Fraction:
    """Parse ``"0.75"``, ``"3/4"`` or ``"75%"`` to an exact fraction in [0, 1]."""
    if isinstance(text, Fraction):
        value = text
    elif isinstance(text, int):
        value = Fraction(text)
    else:
        raw = text.strip()
        try:
            if raw.endswith("%"):
                value = Fraction(raw[:-1].strip()) / 100
            else:
                value = Fraction(raw)
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"invalid support value {text!r}") from None
    if not 0 <= value <= 1:
        raise ValueError("support must be in [0,1]")
    return value


def meets_threshold(count: int, m: int, threshold: Fraction) -> bool:
    """``count / m >= threshold`` without floating point."""
    return count * threshold.denominator >= threshold.numerator * m


def threshold_count(threshold: Fraction, m: int) -> int:
    """Smallest positive count ``c`` with ``c / m >= threshold``.

    The floor of one keeps the zero threshold meaningful: a pattern must occur
    in at least one sequence to be reported.
    """
    c = -(-threshold.numerator * m // threshold.denominator)
    return max(1, c)


# ---------------------------------------------------------------------------
# subsequence mathematics


def is_subsequence(candidate: Sequence[int], host: Sequence[int]) -> bool:
    """Greedy left-to-right embedding test, O(len(host))."""
    it = iter(host)
    return all(event in it for event in candidate)


def support(pattern: Sequence[int], db: WasDatabase) -> Tuple[int, Fraction]:
    """Number of sequences containing ``pattern`` and that count over ``m``."""
    if len(pattern) == 0:
        raise ValueError("support of the empty pattern is undefined")
    count = sum(1 for s in db.sequences if is_subsequence(pattern, s))
    return count, Fraction(count, db.m) if db.m else Fraction(0)


def event_frequencies(sequences: Iterable[Sequence[int]]) -> Dict[int, int]:
    """Per-event count of sequences containing the event at least once."""
    freq: Dict[int, int] = {}
    for s in sequences:
        for e in set(s):
            freq[e] = freq.get(e, 0) + 1
    return freq


def frequent_events(db: WasDatabase, threshold: Fraction) -> Tuple[int, ...]:
    freq = event_frequencies(db.sequences)
    return tuple(sorted(e for e, c in freq.items() if meets_threshold(c, db.m, threshold)))


def filter_sequence(s: Sequence[int], fe: Iterable[int]) -> AccessSequence:
    keep = fe if isinstance(fe, (set, frozenset)) else frozenset(fe)
    return tuple(e for e in s if e in keep)


# ---------------------------------------------------------------------------
# patterns


@dataclass(frozen=True, order=True)
class Pattern:
    events: AccessSequence
    count: int
    m: int

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.count, self.m)

    def __len__(self) -> int:
        return len(self.events)


def pattern_sort_key(events: Sequence[int]) -> Tuple[int, Tuple[int, ...]]:
    return (len(events), tuple(events))


class PatternSet:
    """Mined patterns keyed by event sequence, each with one support count."""

    def __init__(self, m: int, counts: Optional[Dict[AccessSequence, int]] = None) -> None:
        self.m = m
        self.counts: Dict[AccessSequence, int] = dict(counts or {})

    def add(self, events: Sequence[int], count: int) -> None:
        """Insert a pattern; a repeated sequence keeps the larger count."""
        key = tuple(events)
        if not key:
            raise ValueError("empty patterns are never stored")
        old = self.counts.get(key)
        if old is None or count > old:
            self.counts[key] = count

    def update(self, other: "PatternSet") -> None:
        for events, count in other.counts.items():
            self.add(events, count)

    def filter_length(self, min_len: int = 1, max_len: Optional[int] = None) -> "PatternSet":
        hi = math.inf if max_len is None else max_len
        return PatternSet(self.m, {p: c for p, c in self.counts.items() if min_len <= len(p) <= hi})

    def patterns(self) -> List[Pattern]:
        """Patterns sorted by length, then by event-id order."""
        keys = sorted(self.counts, key=pattern_sort_key)
        return [Pattern(k, self.counts[k], self.m) for k in keys]

    def __iter__(self) -> Iterator[Pattern]:
        return iter(self.patterns())

    def __len__(self) -> int:
        return len(self.counts)

    def __contains__(self, events: object) -> bool:
        return tuple(events) in self.counts  # type: ignore[arg-type]

    def __getitem__(self, events: Sequence[int]) -> int:
        return self.counts[tuple(events)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PatternSet):
            return NotImplemented
        return self.m == other.m and self.counts == other.counts

    def __repr__(self) -> str:
        return f"PatternSet(m={self.m}, n={len(self.counts)})"


def format_patterns(patterns: PatternSet, dictionary: EventDictionary) -> str:
    """TSV lines ``tokens<TAB>count<TAB>num/den`` in canonical order."""
    lines = []
    for p in patterns.patterns():
        f = p.fraction
        tokens = " ".join(dictionary.decode(p.events))
        lines.append(f"{tokens}\t{p.count}\t{f.numerator}/{f.denominator}\n")
    return "".join(lines)


def write_patterns(patterns: PatternSet, dictionary: EventDictionary, stream: TextIO) -> None:
    stream.write(format_patterns(patterns, dictionary))


# ---------------------------------------------------------------------------
# WASD format


def read_wasd(stream: Iterable[str], max_tokens: int = DEFAULT_MAX_TOKENS) -> WasDatabase:
    dictionary = EventDictionary()
    sequences = []
    for line_number, line in enumerate(stream, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens = stripped.split()
        if len(tokens) > max_tokens:
            raise WasdFormatError(line_number, f"{len(tokens)} tokens exceeds limit of {max_tokens}")
        sequences.append(dictionary.encode(tokens))
    return WasDatabase(tuple(sequences), dictionary)


def write_wasd(db: WasDatabase, stream: TextIO) -> None:
    for i, s in enumerate(db.sequences):
        if not s:
            raise ValueError(f"sequence {i} is empty and has no WASD representation")
        stream.write(" ".join(db.dictionary.decode(s)))
        stream.write("\n")


def load_wasd(path: str, max_tokens: int = DEFAULT_MAX_TOKENS) -> WasDatabase:
    with open(path, encoding="utf-8") as fh:
        return read_wasd(fh, max_tokens=max_tokens)


def save_wasd(db: WasDatabase, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        write_wasd(db, fh)
