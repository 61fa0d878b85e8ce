"""Coded caching with uncoded prefetching: exact-optimal schemes on real bit
arrays, tradeoff formulas, and converse bounds."""

from .combinatorics import (
    EnvelopePoints,
    SubsetId,
    binomial,
    enumerate_subsets,
    lower_convex_envelope,
    subset_rank,
    subset_unrank,
    surjection_count,
)
from .model import (
    Database,
    DemandStats,
    NeDistribution,
    Placement,
    all_demands,
    demand_stats,
    enumerate_types,
    expected_distinct,
    load_placement,
    make_database,
    ne_distribution,
    save_placement,
    type_size,
)
from .centralized import (
    BroadcastMessage,
    DecodeError,
    batch_placement,
    decode_user,
    delivered_rate,
    encode_delivery,
    message_payload,
    reconstruct_message,
    select_leaders,
    verify_message_cancellation,
)
from .rate_analysis import (
    SCHEMES,
    CacheProfile,
    RateCurve,
    avg_rate_optimal,
    baseline_centralized_avg,
    baseline_decentralized_avg,
    converse_bound,
    dec_avg_rate,
    dec_peak_rate,
    dec_rate_for_distinct,
    delivery_rate_value,
    peak_rate_optimal,
    rate_curve,
)

__all__ = [name for name in dir() if not name.startswith("_")]
