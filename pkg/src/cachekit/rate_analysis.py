"""Exact rate-memory tradeoff formulas, prior-art baselines, and the
converse bound for arbitrary uncoded placements.

All arithmetic is over `fractions.Fraction`; callers convert to float at
output time. Non-integer cache parameters are handled by the lower convex
envelope over the integer operating points (memory sharing).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .combinatorics import binomial, lower_convex_envelope
from .model import DemandStats, Placement, expected_distinct, ne_distribution


def delivery_rate_value(K: int, t: int, n_distinct: int) -> Fraction:
    """Delivery rate of the batch scheme at integer t for a demand with
    `n_distinct` distinct files: (C(K,t+1) - C(K-n,t+1)) / C(K,t)."""
    return Fraction(binomial(K, t + 1) - binomial(K - n_distinct, t + 1), binomial(K, t))


def _as_fraction(M, N: int) -> Fraction:
    M = Fraction(M)
    if not 0 <= M <= N:
        raise ValueError(f"M must be in [0, {N}], got {M}")
    return M


def _cache_parameter(N: int, K: int, M) -> Fraction:
    return Fraction(K) * _as_fraction(M, N) / N


def optimal_avg_points(N: int, K: int) -> list[tuple[int, Fraction]]:
    """Integer operating points of the average-rate tradeoff."""
    dist = ne_distribution(N, K)
    return [(t, dist.expect(lambda e: delivery_rate_value(K, t, e))) for t in range(K + 1)]


def optimal_peak_points(N: int, K: int) -> list[tuple[int, Fraction]]:
    worst = min(N, K)
    return [(t, delivery_rate_value(K, t, worst)) for t in range(K + 1)]


def avg_rate_optimal(N: int, K: int, M) -> Fraction:
    """Minimum average rate over uniform demands at cache size M."""
    return lower_convex_envelope(optimal_avg_points(N, K), _cache_parameter(N, K, M))


def peak_rate_optimal(N: int, K: int, M) -> Fraction:
    """Minimum worst-demand rate at cache size M."""
    return lower_convex_envelope(optimal_peak_points(N, K), _cache_parameter(N, K, M))


def baseline_centralized_avg(N: int, K: int, M, method: str = "envelope-of-min") -> Fraction:
    """Prior-art centralized average rate.

    The construction admits two interpolations, depending on where the
    envelope is taken; both are provided:

    * "envelope-of-min": lower convex envelope of the per-integer-t values
      min{(K-t)/(t+1), E[distinct]*(1-t/K)}  (default);
    * "min-of-envelopes": pointwise min of the two terms' own envelopes.
    """
    x = _cache_parameter(N, K, M)
    mean = expected_distinct(N, K)
    coded = [(t, Fraction(K - t, t + 1)) for t in range(K + 1)]
    uncoded = [(t, mean * (1 - Fraction(t, K))) for t in range(K + 1)]
    if method == "envelope-of-min":
        pts = [(t, min(a[1], b[1])) for t, (a, b) in enumerate(zip(coded, uncoded))]
        return lower_convex_envelope(pts, x)
    if method == "min-of-envelopes":
        return min(lower_convex_envelope(coded, x), lower_convex_envelope(uncoded, x))
    raise ValueError(f"unknown method {method!r}")


def _dec_integrand(N: int, M: Fraction, e: int) -> Fraction:
    return Fraction(N - M, M) * (1 - (Fraction(N - M, N)) ** e)


def dec_rate_for_distinct(N: int, M, n_distinct: int) -> Fraction:
    """Decentralized delivery rate predicted for one demand with
    `n_distinct` distinct files (the quantity averaged by dec_avg_rate)."""
    M = _as_fraction(M, N)
    if M == 0:
        return Fraction(n_distinct)
    return _dec_integrand(N, M, n_distinct)


def dec_avg_rate(N: int, M, K: int) -> Fraction:
    """Decentralized minimum average rate; M = 0 degenerates to unicast of
    each distinct request."""
    M = _as_fraction(M, N)
    dist = ne_distribution(N, K)
    if M == 0:
        return dist.mean()
    return dist.expect(lambda e: _dec_integrand(N, M, e))


def dec_peak_rate(N: int, M, K: int) -> Fraction:
    """Decentralized minimum peak rate."""
    M = _as_fraction(M, N)
    if M == 0:
        return Fraction(min(N, K))
    return _dec_integrand(N, M, min(N, K))


def baseline_decentralized_avg(N: int, M, K: int) -> Fraction:
    """Prior-art decentralized average rate: the better of coded delivery
    and plain multicast of distinct requests, scaled by the uncached share."""
    M = _as_fraction(M, N)
    mean = expected_distinct(N, K)
    if M == 0:
        return min(Fraction(K), mean)
    coded = Fraction(N, M) * (1 - (1 - Fraction(M, N)) ** K)
    return Fraction(N - M, N) * min(coded, mean)


@dataclass(frozen=True)
class CacheProfile:
    """`coverage[n]` counts database bits cached by exactly n users."""

    coverage: tuple[int, ...]

    @classmethod
    def from_placement(cls, placement: Placement) -> "CacheProfile":
        per_bit = placement.mask.sum(axis=0).ravel()
        counts = np.bincount(per_bit, minlength=placement.K + 1)
        return cls(tuple(int(c) for c in counts))


def converse_bound(profile: CacheProfile, stats: DemandStats, K: int, F: int, eps=0) -> Fraction:
    """Lower bound on the average rate within a demand type for any
    placement with the given coverage profile.

    Sum_n coverage[n]/(N*F) * rate_value(K,n,distinct) - (1/F + distinct^2 * eps).
    """
    N = len(stats.counts)
    if len(profile.coverage) != K + 1:
        raise ValueError(f"profile must have K+1 = {K + 1} entries")
    total = sum(profile.coverage)
    if total != N * F:
        raise ValueError(f"profile covers {total} bits, expected N*F = {N * F}")
    ne = stats.distinct
    bound = sum(
        (Fraction(a, N * F) * delivery_rate_value(K, n, ne) for n, a in enumerate(profile.coverage) if a),
        Fraction(0),
    )
    return bound - (Fraction(1, F) + ne * ne * Fraction(eps))


@dataclass(frozen=True)
class RateCurve:
    """Sampled (M, R) points of one scheme's tradeoff curve."""

    scheme: str
    N: int
    K: int
    points: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        ms = [m for m, _ in self.points]
        if any(b <= a for a, b in zip(ms, ms[1:])):
            raise ValueError("M values must be strictly increasing")


SCHEMES: dict[str, Callable[[int, int, Fraction], Fraction]] = {
    "optimal-avg": lambda N, K, M: avg_rate_optimal(N, K, M),
    "optimal-peak": lambda N, K, M: peak_rate_optimal(N, K, M),
    "man-avg": lambda N, K, M: baseline_centralized_avg(N, K, M),
    "man-avg-minconv": lambda N, K, M: baseline_centralized_avg(N, K, M, method="min-of-envelopes"),
    "dec-avg": lambda N, K, M: dec_avg_rate(N, M, K),
    "dec-peak": lambda N, K, M: dec_peak_rate(N, M, K),
    "man-dec-avg": lambda N, K, M: baseline_decentralized_avg(N, M, K),
}


def rate_curve(scheme: str, N: int, K: int, grid: Sequence) -> RateCurve:
    """Evaluate a named scheme on an M-grid (values in [0, N])."""
    fn = SCHEMES.get(scheme)
    if fn is None:
        raise ValueError(f"unknown scheme {scheme!r}; known: {', '.join(sorted(SCHEMES))}")
    pts = tuple((Fraction(M), fn(N, K, Fraction(M))) for M in grid)
    return RateCurve(scheme, N, K, pts)


def write_curves_csv(curves: Sequence[RateCurve], fh) -> None:
    """Long-format CSV `M,R,scheme,N,K`; grid-major, then scheme order as given."""
    fh.write("M,R,scheme,N,K\n")
    if not curves:
        return
    npoints = len(curves[0].points)
    if any(len(c.points) != npoints for c in curves):
        raise ValueError("all curves must share a grid")
    for i in range(npoints):
        for c in curves:
            m, r = c.points[i]
            fh.write(f"{float(m):.6f},{float(r):.6f},{c.scheme},{c.N},{c.K}\n")
