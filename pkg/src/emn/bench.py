"""Throughput timing for random sources."""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass

from .generators import RandomSource

DEFAULT_BENCH_N = 100_000
DEFAULT_WARMUP = 1_000


@dataclass(frozen=True)
class TimingResult:
    """Wall time for ``n_values`` block generations.

    ``wall_seconds`` is the median over ``reps`` repetitions, ``min_seconds``
    the fastest.  ``fold`` is the XOR of every timed output; it keeps the
    work observable and must change with the seed.
    """

    generator: str
    n_values: int
    wall_seconds: float
    values_per_second: float
    min_seconds: float
    reps: int
    fold: str


def _timed_run(next_block, n_values: int) -> tuple[float, int]:
    fold = 0
    start = time.perf_counter()
    for _ in range(n_values):
        fold ^= next_block()
    elapsed = time.perf_counter() - start
    return elapsed, fold


def time_generation(
    src: RandomSource,
    n_values: int = DEFAULT_BENCH_N,
    warmup: int = DEFAULT_WARMUP,
    reps: int = 1,
) -> TimingResult:
    """Time ``n_values`` calls to ``src.next_block()`` after ``warmup`` untimed ones.

    Runs single-threaded on the calling thread; do not time several sources
    concurrently.
    """
    if n_values < 1:
        raise ValueError("n_values must be at least 1")
    if warmup < 0:
        raise ValueError("warmup must be non-negative")
    if reps < 1:
        raise ValueError("reps must be at least 1")

    next_block = src.next_block
    for _ in range(warmup):
        next_block()

    times = []
    fold = 0
    for _ in range(reps):
        elapsed, rep_fold = _timed_run(next_block, n_values)
        # perf_counter is monotonic; guard against a zero reading on coarse clocks
        times.append(max(elapsed, 1e-9))
        fold ^= rep_fold

    wall = statistics.median(times)
    return TimingResult(
        generator=src.name,
        n_values=n_values,
        wall_seconds=wall,
        values_per_second=n_values / wall,
        min_seconds=min(times),
        reps=reps,
        fold=f"{fold:064x}",
    )
