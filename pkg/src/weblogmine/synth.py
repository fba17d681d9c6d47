"""Deterministic synthetic access-sequence databases.

The random source is NumPy's ``PCG64`` bit generator seeded through
``SeedSequence(seed)``; only its raw 64-bit output is used (``random_raw``),
whose stream NumPy keeps stable across versions and platforms.  All sampling
on top of it is integer comparison against precomputed thresholds:

* sequence length: geometric with mean ``mean_length`` and minimum 1, drawn
  as repeated continue/stop trials with continue probability ``1 - 1/mean``;
* events: Zipf over ranks ``1..alphabet_size`` with weight ``rank**-zipf``,
  by inverse-CDF lookup on the raw draw.

Draws are consumed in one stream: for every sequence its length trials first,
then one draw per event.  Event tokens are ``e1`` (most likely) to ``eA``;
ids are assigned in first-seen order so a WASD round trip is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np

from .wasd import EventDictionary, WasDatabase

_TWO64 = 1 << 64


@dataclass(frozen=True)
class GenSpec:
    num_sequences: int
    alphabet_size: int
    mean_length: float
    zipf_exponent: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.num_sequences < 1:
            raise ValueError("num_sequences must be positive")
        if self.alphabet_size < 1:
            raise ValueError("alphabet_size must be positive")
        if self.mean_length < 1:
            raise ValueError("mean_length must be at least 1")
        if self.zipf_exponent < 0:
            raise ValueError("zipf_exponent must be non-negative")
        if not 0 <= self.seed < _TWO64:
            raise ValueError("seed must be an unsigned 64-bit integer")


class _RawStream:
    def __init__(self, seed: int, chunk: int = 1 << 14) -> None:
        self._bits = np.random.PCG64(seed)
        self._chunk = chunk
        self._buf: List[int] = []
        self._pos = 0

    def next(self) -> int:
        if self._pos == len(self._buf):
            self._buf = self._bits.random_raw(self._chunk).tolist()
            self._pos = 0
        value = self._buf[self._pos]
        self._pos += 1
        return value

    def take(self, n: int) -> np.ndarray:
        out = np.empty(n, dtype=np.uint64)
        for i in range(n):
            out[i] = self.next()
        return out


def zipf_thresholds(alphabet_size: int, exponent: float) -> np.ndarray:
    """Upper raw-value bounds of ranks 1..A-1 (rank A takes the rest)."""
    weights = np.arange(1, alphabet_size + 1, dtype=np.float64) ** -float(exponent)
    cdf = np.cumsum(weights) / weights.sum()
    bounds = [min(int(c * _TWO64), _TWO64 - 1) for c in cdf[:-1]]
    return np.array(bounds, dtype=np.uint64)


def zipf_ranks(raw: np.ndarray, thresholds: np.ndarray) -> np.ndarray:
    """Map raw draws to 0-based ranks."""
    return np.searchsorted(thresholds, raw, side="right")


def generate(spec: GenSpec) -> WasDatabase:
    stream = _RawStream(spec.seed)
    # continue while raw < cont; P(continue) = 1 - 1/mean
    cont = int((1.0 - 1.0 / spec.mean_length) * _TWO64)
    bounds = zipf_thresholds(spec.alphabet_size, spec.zipf_exponent)
    dictionary = EventDictionary()
    names = [f"e{i}" for i in range(1, spec.alphabet_size + 1)]

    sequences = []
    for _ in range(spec.num_sequences):
        length = 1
        while stream.next() < cont:
            length += 1
        ranks = zipf_ranks(stream.take(length), bounds)
        sequences.append(tuple(dictionary.intern(names[r]) for r in ranks.tolist()))
    return WasDatabase(tuple(sequences), dictionary)
