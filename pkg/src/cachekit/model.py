"""Core data model: file database, prefetchings, demands, and demand statistics.

Conventions used across the package:

* users are numbered 1..K, file indices in demands are 1..N (the bit matrix
  row for file i is `bits[i-1]`),
* bit positions inside a file are 0..F-1,
* all randomness is drawn from numpy's PCG64 (`np.random.default_rng(seed)`),
  so a given seed reproduces the same database / placement on any platform.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .combinatorics import binomial, surjection_count

Demand = Sequence[int]


@dataclass(frozen=True)
class Database:
    """N files of F bits each; `bits[i-1, j]` is bit j of file i."""

    N: int
    F: int
    bits: np.ndarray

    def file(self, index: int) -> np.ndarray:
        """Row of file `index` (1-based)."""
        return self.bits[index - 1]


def make_database(N: int, F: int, seed: int) -> Database:
    """I.i.d. fair-coin database, deterministic for a given seed."""
    if N < 1 or F < 1:
        raise ValueError(f"need N >= 1 and F >= 1, got N={N}, F={F}")
    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, size=(N, F), dtype=np.uint8)
    bits.setflags(write=False)
    return Database(N, F, bits)


@dataclass(frozen=True)
class Placement:
    """Per-user cached bit positions.

    `mask[k-1, i-1, j]` is True iff user k caches bit j of file i. For batch
    placements, `batch_view` maps each subfile subset (tuple of members) to
    the half-open bit range `(start, stop)` it occupies inside every file,
    and `t` is the subfile subset size.
    """

    K: int
    mask: np.ndarray
    batch_view: dict[tuple[int, ...], tuple[int, int]] | None = None
    t: int | None = None

    def cached_bits(self, user: int) -> int:
        """Number of bits cached by `user` (1-based)."""
        return int(self.mask[user - 1].sum())

    def cached_pairs(self, user: int) -> list[tuple[int, int]]:
        """Sorted (file, bit) pairs cached by `user`; file 1-based, bit 0-based."""
        rows, cols = np.nonzero(self.mask[user - 1])
        return [(int(i) + 1, int(j)) for i, j in zip(rows, cols)]


def validate_demand(d: Demand, N: int) -> tuple[int, ...]:
    d = tuple(int(x) for x in d)
    if not d:
        raise ValueError("demand must be non-empty")
    if any(not 1 <= x <= N for x in d):
        raise ValueError(f"demand entries must be in 1..{N}: {d}")
    return d


@dataclass(frozen=True)
class DemandStats:
    """Sorted per-file request counts of a demand.

    `counts` is non-increasing and zero-padded to length N; `distinct` is the
    number of nonzero entries (the number of distinct files requested).
    Demands sharing the same counts form one type: they cost the same to
    serve and are interchangeable up to relabeling users and files.
    """

    counts: tuple[int, ...]
    distinct: int

    def __post_init__(self):
        if any(b > a for a, b in zip(self.counts, self.counts[1:])):
            raise ValueError("counts must be non-increasing")
        if self.distinct != sum(1 for c in self.counts if c > 0):
            raise ValueError("distinct must equal the number of nonzero counts")


def demand_stats(d: Demand, N: int) -> DemandStats:
    """Per-file request counts, sorted descending and zero-padded to length N."""
    d = validate_demand(d, N)
    counts = [0] * N
    for x in d:
        counts[x - 1] += 1
    counts.sort(reverse=True)
    return DemandStats(tuple(counts), sum(1 for c in counts if c > 0))


def distinct_count(d: Demand) -> int:
    """Number of distinct files requested by a demand."""
    return len(set(d))


def enumerate_types(N: int, K: int) -> list[DemandStats]:
    """All demand types for N files and K users, largest-first.

    A type is a partition of K into at most N parts, zero-padded to length N.
    """
    if N < 1 or K < 1:
        raise ValueError("need N >= 1 and K >= 1")
    out: list[DemandStats] = []

    def extend(prefix: list[int], remaining: int, cap: int, slots: int):
        if remaining == 0:
            counts = tuple(prefix) + (0,) * (N - len(prefix))
            out.append(DemandStats(counts, len(prefix)))
            return
        if slots == 0:
            return
        for part in range(min(cap, remaining), 0, -1):
            if part * slots < remaining:
                break
            extend(prefix + [part], remaining - part, part, slots - 1)

    extend([], K, K, N)
    return out


def type_size(stats: DemandStats, K: int) -> int:
    """Number of demands with the given statistics.

    Choose which file carries each count (multiplicities of equal counts,
    zeros included, collapse), then which users request what (multinomial).
    """
    N = len(stats.counts)
    if sum(stats.counts) != K:
        raise ValueError("counts must sum to K")
    file_assignments = math.factorial(N)
    for c in set(stats.counts):
        file_assignments //= math.factorial(stats.counts.count(c))
    user_assignments = math.factorial(K)
    for c in stats.counts:
        user_assignments //= math.factorial(c)
    return file_assignments * user_assignments


def all_demands(N: int, K: int) -> Iterable[tuple[int, ...]]:
    """Every demand in {1..N}^K, lexicographic order."""
    return itertools.product(range(1, N + 1), repeat=K)


@dataclass(frozen=True)
class NeDistribution:
    """Exact distribution of the number of distinct requested files.

    Entries are (e, P(distinct == e)) for e in 1..min(N, K) under a demand
    drawn uniformly from {1..N}^K.
    """

    entries: tuple[tuple[int, Fraction], ...]

    def __post_init__(self):
        if sum(p for _, p in self.entries) != 1:
            raise ValueError("probabilities must sum to 1")

    def mean(self) -> Fraction:
        return sum((Fraction(e) * p for e, p in self.entries), Fraction(0))

    def expect(self, fn) -> Fraction:
        """Exact expectation of fn(e) over the distribution."""
        return sum((p * fn(e) for e, p in self.entries), Fraction(0))


@functools.lru_cache(maxsize=None)
def ne_distribution(N: int, K: int) -> NeDistribution:
    """P(distinct = e) = C(N,e) * surjections(K -> e) / N^K, exact."""
    if N < 1 or K < 1:
        raise ValueError("need N >= 1 and K >= 1")
    total = N**K
    entries = tuple(
        (e, Fraction(binomial(N, e) * surjection_count(K, e), total))
        for e in range(1, min(N, K) + 1)
    )
    return NeDistribution(entries)


def expected_distinct(N: int, K: int) -> Fraction:
    """E[number of distinct requested files] under a uniform demand."""
    return ne_distribution(N, K).mean()


# --- placement file format -------------------------------------------------
#
# Line-oriented text. Header: `K N F M` (M as an exact fraction string, e.g.
# "1" or "1/2"). Then one line per user k = 1..K: the user index followed by
# space-separated `file:bit` pairs, file 1-based, bit 0-based, sorted
# ascending. Every user line is present even when the cache is empty.


def save_placement(path, placement: Placement, N: int, F: int, M) -> None:
    lines = [f"{placement.K} {N} {F} {Fraction(M)}"]
    for k in range(1, placement.K + 1):
        pairs = " ".join(f"{i}:{j}" for i, j in placement.cached_pairs(k))
        lines.append(f"{k} {pairs}".rstrip())
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


class PlacementParseError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def load_placement(path) -> tuple[Placement, int, int, Fraction]:
    """Parse a placement file; returns (placement, N, F, M)."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise PlacementParseError(1, "empty file")
    header = lines[0].split()
    if len(header) != 4:
        raise PlacementParseError(1, f"header must be 'K N F M', got {lines[0]!r}")
    try:
        K, N, F = (int(x) for x in header[:3])
        M = Fraction(header[3])
    except ValueError as exc:
        raise PlacementParseError(1, str(exc)) from None
    if K < 1 or N < 1 or F < 1 or not 0 <= M <= N:
        raise PlacementParseError(1, f"invalid parameters K={K} N={N} F={F} M={M}")
    if len(lines) < 1 + K:
        raise PlacementParseError(len(lines), f"expected {K} user lines, got {len(lines) - 1}")
    mask = np.zeros((K, N, F), dtype=bool)
    budget = math.floor(M * F)
    for offset, line in enumerate(lines[1 : 1 + K], start=2):
        tokens = line.split()
        if not tokens:
            raise PlacementParseError(offset, "missing user index")
        try:
            k = int(tokens[0])
        except ValueError:
            raise PlacementParseError(offset, f"bad user index {tokens[0]!r}") from None
        if k != offset - 1:
            raise PlacementParseError(offset, f"expected user {offset - 1}, got {k}")
        for tok in tokens[1:]:
            try:
                i_s, j_s = tok.split(":")
                i, j = int(i_s), int(j_s)
            except ValueError:
                raise PlacementParseError(offset, f"bad pair {tok!r}") from None
            if not (1 <= i <= N and 0 <= j < F):
                raise PlacementParseError(offset, f"pair {tok} out of range")
            mask[k - 1, i - 1, j] = True
        if int(mask[k - 1].sum()) > budget:
            raise PlacementParseError(offset, f"user {k} caches more than M*F = {budget} bits")
    return Placement(K, mask), N, F, M
