"""Exact subset combinatorics and lower convex envelopes.

Everything here is exact: binomials and surjection counts are arbitrary
precision integers, and the envelope is evaluated in rational arithmetic
whenever the inputs are rationals, so downstream rate formulas never lose
a tie to rounding.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence


def binomial(n: int, k: int) -> int:
    """C(n, k), with the convention C(n, k) = 0 when k > n."""
    if n < 0 or k < 0:
        raise ValueError(f"binomial requires non-negative arguments, got ({n}, {k})")
    return math.comb(n, k)


def surjection_count(universe: int, onto: int) -> int:
    """Number of functions from a `universe`-set onto an `onto`-set.

    Inclusion-exclusion: sum_i (-1)^i C(e, i) (e - i)^K.
    """
    if onto < 0 or universe < 0:
        raise ValueError("surjection_count requires non-negative arguments")
    if onto > universe:
        return 0
    return sum(
        (-1) ** i * binomial(onto, i) * (onto - i) ** universe
        for i in range(onto + 1)
    )


@dataclass(frozen=True)
class SubsetId:
    """A size-`k` subset of users {1..K}, with its lexicographic rank.

    `members` is strictly increasing; `rank` is the subset's position among
    all same-size subsets of {1..K} enumerated in lexicographic order.
    """

    members: tuple[int, ...]
    rank: int

    def __contains__(self, user: int) -> bool:
        return user in self.members

    def __len__(self) -> int:
        return len(self.members)


def subset_rank(members: Sequence[int], k_users: int) -> int:
    """Lexicographic rank of a sorted subset of {1..k_users}."""
    members = tuple(members)
    size = len(members)
    if any(b <= a for a, b in zip(members, members[1:])):
        raise ValueError(f"subset members must be strictly increasing: {members}")
    if members and (members[0] < 1 or members[-1] > k_users):
        raise ValueError(f"members {members} not within 1..{k_users}")
    rank = 0
    prev = 0
    for i, c in enumerate(members):
        for skipped in range(prev + 1, c):
            rank += binomial(k_users - skipped, size - i - 1)
        prev = c
    return rank


def subset_unrank(rank: int, k_users: int, size: int) -> tuple[int, ...]:
    """Inverse of subset_rank: the subset of {1..k_users} at `rank`."""
    if not 0 <= size <= k_users:
        raise ValueError(f"size {size} out of range 0..{k_users}")
    if not 0 <= rank < binomial(k_users, size):
        raise ValueError(f"rank {rank} out of range for C({k_users},{size})")
    members = []
    candidate = 1
    remaining = size
    while remaining > 0:
        below = binomial(k_users - candidate, remaining - 1)
        if rank < below:
            members.append(candidate)
            remaining -= 1
        else:
            rank -= below
        candidate += 1
    return tuple(members)


def enumerate_subsets(k_users: int, size: int) -> list[SubsetId]:
    """All size-`size` subsets of {1..k_users} in lexicographic order.

    Ranks are consistent with list position by construction.
    """
    if not 0 <= size <= k_users:
        raise ValueError(f"size {size} out of range 0..{k_users}")
    return [
        SubsetId(members, rank)
        for rank, members in enumerate(itertools.combinations(range(1, k_users + 1), size))
    ]


Number = int | float | Fraction


@dataclass(frozen=True)
class EnvelopePoints:
    """Sampled (t, value) points, t strictly increasing, to be enveloped."""

    points: tuple[tuple[Number, Number], ...]

    def __post_init__(self):
        if not self.points:
            raise ValueError("EnvelopePoints requires at least one point")
        ts = [t for t, _ in self.points]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("t values must be strictly increasing")


def _cross(o, a, b) -> Number:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def lower_hull(points: Iterable[tuple[Number, Number]]) -> list[tuple[Number, Number]]:
    """Lower convex hull of points sorted by x (monotone chain)."""
    hull: list[tuple[Number, Number]] = []
    for p in points:
        # pop while the previous point lies on or above the new chord
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) <= 0:
            hull.pop()
        hull.append(p)
    return hull


def _exact_ratio(num: Number, den: Number) -> Number:
    if isinstance(num, float) or isinstance(den, float):
        return num / den
    return Fraction(num) / Fraction(den)


def lower_convex_envelope(pts: EnvelopePoints | Sequence[tuple[Number, Number]], x: Number) -> Number:
    """Value at `x` of the lower convex envelope of the given points.

    `x` must lie within [min t, max t]. Exact when points and x are rational.
    """
    points = pts.points if isinstance(pts, EnvelopePoints) else tuple(pts)
    if not points:
        raise ValueError("no points to envelope")
    if not points[0][0] <= x <= points[-1][0]:
        raise ValueError(f"x={x} outside envelope domain [{points[0][0]}, {points[-1][0]}]")
    hull = lower_hull(points)
    if len(hull) == 1:
        return hull[0][1]
    for (t0, v0), (t1, v1) in zip(hull, hull[1:]):
        if t0 <= x <= t1:
            if x == t0:
                return v0
            if x == t1:
                return v1
            return v0 + (v1 - v0) * _exact_ratio(x - t0, t1 - t0)
    raise AssertionError("unreachable: x inside domain but no segment found")
