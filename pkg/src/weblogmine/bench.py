"""Runtime comparison of the tree miner against GSP.

Each cell is one (algorithm, support, size) combination.  Only the mining
call is timed, with ``time.perf_counter``; tree construction counts as part
of mining for the tree miner since it is part of that algorithm.
"""

from __future__ import annotations

import csv
import logging
import signal
import statistics
import threading
import time
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, TextIO, Tuple

from .baselines import GspStats, gsp_mine
from .mining import MiningStats, mine_database
from .wasd import PatternSet, WasDatabase, meets_threshold, support

log = logging.getLogger(__name__)

CSV_HEADER = ("algo", "support", "num_sequences", "wall_time_s", "patterns_found", "aux_peak")
ALGORITHMS = ("wap", "gsp")
DEFAULT_TIMEOUT = 600.0
DEFAULT_SUPPORTS = tuple(Fraction(p, 100) for p in (2, 5, 8, 11, 14, 17, 20))
DEFAULT_SIZE_SUPPORT = Fraction(5, 100)
DEFAULT_SIZES = (1000, 2500, 5000, 7500, 10000)


class CellTimeout(Exception):
    pass


class AgreementError(AssertionError):
    """Algorithms disagreed on the number of patterns in one cell."""


@dataclass(frozen=True)
class BenchResult:
    algorithm: str
    support: Fraction
    num_sequences: int
    wall_time: Optional[float]
    patterns_found: Optional[int]
    aux_peak: Optional[int]

    @property
    def timed_out(self) -> bool:
        return self.wall_time is None

    def row(self) -> List[str]:
        s = self.support
        if self.timed_out:
            return [self.algorithm, f"{s.numerator}/{s.denominator}", str(self.num_sequences), "timeout", "", ""]
        return [
            self.algorithm,
            f"{s.numerator}/{s.denominator}",
            str(self.num_sequences),
            f"{self.wall_time:.6f}",
            str(self.patterns_found),
            str(self.aux_peak),
        ]


def _run_wap(db: WasDatabase, threshold: Fraction) -> Tuple[PatternSet, int]:
    stats = MiningStats()
    return mine_database(db, threshold, stats), stats.nodes_built


def _run_gsp(db: WasDatabase, threshold: Fraction) -> Tuple[PatternSet, int]:
    stats = GspStats()
    return gsp_mine(db, threshold, stats), stats.peak_candidates


MINERS: Dict[str, Callable[[WasDatabase, Fraction], Tuple[PatternSet, int]]] = {
    "wap": _run_wap,
    "gsp": _run_gsp,
}


@contextmanager
def deadline(seconds: Optional[float]) -> Iterator[None]:
    """Raise :class:`CellTimeout` in the block after ``seconds`` of wall time.

    Uses ``SIGALRM``, so it is only armed in the main thread on POSIX.
    """
    usable = (
        seconds is not None
        and hasattr(signal, "setitimer")
        and threading.current_thread() is threading.main_thread()
    )
    if not usable:
        yield
        return

    def _expire(signum, frame):
        raise CellTimeout()

    previous = signal.signal(signal.SIGALRM, _expire)
    signal.setitimer(signal.ITIMER_REAL, seconds)
    try:
        yield
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0)
        signal.signal(signal.SIGALRM, previous)


def verify_patterns(patterns: PatternSet, db: WasDatabase, threshold: Fraction) -> None:
    """Re-count every pattern directly; raise if a count or threshold is off."""
    for p in patterns:
        count, _ = support(p.events, db)
        if count != p.count or not meets_threshold(count, db.m, threshold):
            raise AssertionError(f"pattern {p.events} reported {p.count}, actual {count}")


def time_cell(
    algorithm: str,
    db: WasDatabase,
    threshold: Fraction,
    repeats: int = 1,
    warmup: bool = True,
    timeout: Optional[float] = DEFAULT_TIMEOUT,
    verify: bool = False,
) -> BenchResult:
    """Median wall time of ``repeats`` mining runs after an optional warm-up."""
    miner = MINERS[algorithm]
    times = []
    patterns = aux = None
    try:
        if warmup:
            with deadline(timeout):
                miner(db, threshold)
        for _ in range(repeats):
            with deadline(timeout):
                start = time.perf_counter()
                patterns, aux = miner(db, threshold)
                times.append(time.perf_counter() - start)
    except CellTimeout:
        log.warning("%s timed out at support %s, %d sequences", algorithm, threshold, db.m)
        return BenchResult(algorithm, threshold, db.m, None, None, None)
    if verify:
        verify_patterns(patterns, db, threshold)
    return BenchResult(algorithm, threshold, db.m, statistics.median(times), len(patterns), aux)


def run_benchmark(
    db: WasDatabase,
    algorithms: Sequence[str] = ALGORITHMS,
    supports: Sequence[Fraction] = DEFAULT_SUPPORTS,
    sizes: Optional[Sequence[int]] = None,
    repeats: int = 1,
    warmup: bool = True,
    timeout: Optional[float] = DEFAULT_TIMEOUT,
    verify: bool = False,
    on_result: Optional[Callable[[BenchResult], None]] = None,
) -> List[BenchResult]:
    """Time every (size, support, algorithm) cell, sequentially."""
    unknown = set(algorithms) - set(MINERS)
    if unknown:
        raise ValueError(f"unknown algorithms: {', '.join(sorted(unknown))}")
    if sizes is None:
        sizes = [db.m]
    for n in sizes:
        if not 1 <= n <= db.m:
            raise ValueError(f"size {n} outside 1..{db.m}")

    results = []
    for n in sizes:
        sliced = db.head(n)
        for threshold in supports:
            cell = []
            for algorithm in algorithms:
                r = time_cell(algorithm, sliced, threshold, repeats, warmup, timeout, verify)
                log.info("%s support=%s n=%d time=%s patterns=%s", algorithm, threshold, n, r.wall_time, r.patterns_found)
                cell.append(r)
                if on_result is not None:
                    on_result(r)
            found = {r.patterns_found for r in cell if not r.timed_out}
            if len(found) > 1:
                raise AgreementError(f"pattern counts differ at support {threshold}, size {n}: {sorted(found)}")
            results.extend(cell)
    return results


def write_csv(results: Iterable[BenchResult], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in results:
        writer.writerow(r.row())


def read_csv(stream: TextIO) -> List[BenchResult]:
    out = []
    for row in csv.DictReader(stream):
        timed_out = row["wall_time_s"] == "timeout"
        out.append(BenchResult(
            row["algo"],
            Fraction(row["support"]),
            int(row["num_sequences"]),
            None if timed_out else float(row["wall_time_s"]),
            None if timed_out else int(row["patterns_found"]),
            None if timed_out else int(row["aux_peak"]),
        ))
    return out
