"""Command-line front end: tradeoff tables, exhaustive verification,
end-to-end simulation, converse evaluation, and scheme comparison.

Exit codes: 0 success, 1 verification/simulation failure, 2 usage error.
All randomness derives from one seed (flag `--seed`, else env CACHEKIT_SEED,
else 0), so identical invocations produce byte-identical output.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

import numpy as np

from . import decentralized
from .centralized import (
    batch_placement,
    decode_user,
    delivered_rate,
    encode_delivery,
    select_leaders,
    verify_message_cancellation,
)
from .combinatorics import binomial
from .model import (
    PlacementParseError,
    all_demands,
    demand_stats,
    enumerate_types,
    load_placement,
    make_database,
    validate_demand,
)
from .rate_analysis import (
    CacheProfile,
    converse_bound,
    dec_rate_for_distinct,
    delivery_rate_value,
    rate_curve,
    write_curves_csv,
)

EXHAUSTION_GUARD = 10**6
# Full bit-exact decoding of every demand is done while the estimated work
# stays under this many subfile operations (~30 s); beyond that, verify
# bit-checks one representative per demand type plus a random sample.
FULL_WORK_LIMIT = 4 * 10**7
DEFAULT_SAMPLE = 200


class UsageError(ValueError):
    pass


def _fmt(x) -> str:
    return f"{float(x):.6f}"


def resolve_seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("CACHEKIT_SEED")
    return int(env) if env else 0


def child_seeds(seed: int, n: int) -> list[int]:
    """Independent per-purpose seeds derived from the one user-facing seed."""
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(n)]


def parse_grid(spec: str) -> list[Fraction]:
    try:
        parts = [Fraction(p) for p in spec.split(":")]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad grid {spec!r}; expected start:stop:step") from None
    if len(parts) != 3:
        raise UsageError(f"bad grid {spec!r}; expected start:stop:step")
    start, stop, step = parts
    if step <= 0 or stop < start:
        raise UsageError(f"bad grid {spec!r}; need step > 0 and stop >= start")
    values = []
    v = start
    while v <= stop:
        values.append(v)
        v += step
    return values


def parse_schemes(spec: str | None, default: list[str]) -> list[str]:
    if spec is None:
        return default
    labels = [s for s in (part.strip() for part in spec.split(",")) if s]
    if not labels:
        raise UsageError("empty scheme list")
    return labels


def parse_demand(spec: str, N: int, K: int) -> tuple[int, ...]:
    try:
        d = tuple(int(x) for x in spec.split(","))
    except ValueError:
        raise UsageError(f"bad demand {spec!r}; expected comma-separated file indices") from None
    if len(d) != K:
        raise UsageError(f"demand has {len(d)} entries, expected K={K}")
    try:
        return validate_demand(d, N)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _resolve_t(args, N: int, K: int) -> int:
    if args.t is not None:
        if not 0 <= args.t <= K:
            raise UsageError(f"t must be in 0..{K}")
        return args.t
    if args.m is not None:
        t = Fraction(K) * Fraction(args.m) / N
        if t.denominator != 1 or not 0 <= t <= K:
            raise UsageError(f"M={args.m} gives non-integer t={t}; pass --t or an integer-t M")
        return int(t)
    raise UsageError("need --t or --m")


# --- rates / compare ---------------------------------------------------------


def cmd_rates(args) -> int:
    labels = parse_schemes(args.schemes, default=[])
    if not labels:
        raise UsageError("rates requires --schemes")
    grid = parse_grid(args.grid if args.grid else f"0:{args.n}:1")
    curves = [rate_curve(label, args.n, args.k, grid) for label in labels]
    if args.out:
        with open(args.out, "w") as fh:
            write_curves_csv(curves, fh)
        print(f"wrote {len(grid) * len(curves)} rows to {args.out}")
    else:
        width = max(len(c.scheme) for c in curves) + 2
        print("M".ljust(10) + "".join(c.scheme.rjust(width) for c in curves))
        for i, m in enumerate(grid):
            row = _fmt(m).ljust(10)
            row += "".join(_fmt(c.points[i][1]).rjust(width) for c in curves)
            print(row)
    return 0


def cmd_compare(args) -> int:
    default = ["optimal-avg", "man-avg", "optimal-peak", "dec-avg", "man-dec-avg", "dec-peak"]
    labels = parse_schemes(args.schemes, default)
    grid = parse_grid(args.grid if args.grid else f"0:{args.n}:1")
    curves = [rate_curve(label, args.n, args.k, grid) for label in labels]
    header = "M," + ",".join(labels)
    lines = [header]
    for i, m in enumerate(grid):
        lines.append(",".join([_fmt(m)] + [_fmt(c.points[i][1]) for c in curves]))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("\n".join(lines) + "\n")
        print(f"wrote {len(grid)} rows to {args.out}")
    else:
        print("\n".join(lines))
    return 0


# --- verify ------------------------------------------------------------------


def _check_demand(db, placement, d, leaders, t) -> tuple[bool, str]:
    K = placement.K
    stats = demand_stats(d, db.N)
    messages = encode_delivery(db, placement, d, leaders)
    expected = binomial(K, t + 1) - binomial(K - stats.distinct, t + 1)
    if len(messages) != expected:
        return False, f"message count {len(messages)} != {expected}"
    if delivered_rate(messages, db.F) != delivery_rate_value(K, t, stats.distinct):
        return False, "delivered rate does not match the closed form"
    for k in range(1, K + 1):
        decoded = decode_user(k, db, placement, messages, d, leaders)
        if not np.array_equal(decoded, db.file(d[k - 1])):
            return False, f"user {k} decoded the wrong bits"
    return True, ""


def cmd_verify(args) -> int:
    N, K = args.n, args.k
    t = _resolve_t(args, N, K)
    F = args.f if args.f else 2 * binomial(K, t)
    total = N**K
    if total > EXHAUSTION_GUARD:
        raise UsageError(
            f"N^K = {total} exceeds the exhaustion guard {EXHAUSTION_GUARD}; "
            "choose smaller N or K"
        )
    try:
        placement = batch_placement(N, K, t, F)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    seed = resolve_seed(args.seed)
    db_seed, sample_seed = child_seeds(seed, 2)
    db = make_database(N, F, db_seed)
    work = total * K * binomial(K, t) * (t + 2)
    full = work <= FULL_WORK_LIMIT
    mode = "full" if full else f"per-type + {args.sample} sampled"
    print(f"verify: N={N} K={K} t={t} F={F} ({total} demands, mode: {mode})")

    demands = list(all_demands(N, K))
    seen_types: dict[tuple[int, ...], tuple[int, ...]] = {}
    to_check = []
    for d in demands:
        stats = demand_stats(d, N)
        if stats.counts not in seen_types:
            seen_types[stats.counts] = d
            to_check.append(d)
        elif full:
            to_check.append(d)
    if not full:
        rng = np.random.default_rng(sample_seed)
        picks = rng.integers(0, total, size=min(args.sample, total))
        to_check.extend(demands[int(i)] for i in picks)

    failures = []
    for d in to_check:
        leaders = select_leaders(d)
        ok, why = _check_demand(db, placement, d, leaders, t)
        if not ok:
            failures.append((d, why))
            break

    cancel_checks = 0
    for counts, rep in seen_types.items():
        leaders = select_leaders(rep)
        non_leaders = [k for k in range(1, K + 1) if k not in leaders]
        if len(non_leaders) < t + 1:
            continue  # no leaderless subset exists, nothing to cancel
        group = tuple(sorted(set(non_leaders[: t + 1]) | leaders))
        cancel_checks += 1
        if not verify_message_cancellation(db, rep, leaders, group):
            failures.append((rep, f"cancellation identity failed on group {group}"))
            break

    types = len(seen_types)
    assert types == len(enumerate_types(N, K))
    print(f"demand types: {types}; demands checked bit-exactly: {len(to_check)}")
    print("message-count and rate identities: checked on every demand verified above")
    print(f"cancellation identity: {cancel_checks} checks")
    if failures:
        d, why = failures[0]
        print(f"FAIL: demand={','.join(map(str, d))}: {why}")
        return 1
    print("PASS")
    return 0


# --- simulate ------------------------------------------------------------------


def _report_decode(db, decode_fn, K, d) -> list[int]:
    bad = []
    for k in range(1, K + 1):
        if not np.array_equal(decode_fn(k), db.file(d[k - 1])):
            bad.append(k)
    return bad


def cmd_simulate(args) -> int:
    N, K = args.n, args.k
    labels = parse_schemes(args.schemes, default=["centralized"])
    if len(labels) != 1 or labels[0] not in ("centralized", "decentralized"):
        raise UsageError("simulate takes one scheme: centralized or decentralized")
    scheme = labels[0]
    seed = resolve_seed(args.seed)
    db_seed, place_seed, demand_seed = child_seeds(seed, 3)

    if scheme == "centralized":
        t = _resolve_t(args, N, K)
        F = args.f if args.f else 2 * binomial(K, t)
        try:
            placement = batch_placement(N, K, t, F)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        db = make_database(N, F, db_seed)
        d = (
            parse_demand(args.demand, N, K)
            if args.demand
            else tuple(np.random.default_rng(demand_seed).integers(1, N + 1, size=K).tolist())
        )
        leaders = select_leaders(d)
        stats = demand_stats(d, N)
        messages = encode_delivery(db, placement, d, leaders)
        rate = delivered_rate(messages, F)
        predicted = delivery_rate_value(K, t, stats.distinct)
        bad = _report_decode(db, lambda k: decode_user(k, db, placement, messages, d, leaders), K, d)
        print(f"centralized simulate: N={N} K={K} t={t} F={F} seed={seed}")
        print(f"demand: {','.join(map(str, d))} ({stats.distinct} distinct), leaders: {sorted(leaders)}")
        print(f"messages: {len(messages)}, rate: {rate} = {_fmt(rate)}, predicted: {predicted}")
        print("decode: all users OK" if not bad else f"decode: FAILED for users {bad}")
        if args.dump:
            for m in messages:
                print(m.transcript_line())
        if bad or rate != predicted:
            if rate != predicted:
                print(f"rate mismatch: measured {rate} vs predicted {predicted}")
            return 1
        return 0

    if args.m is None:
        raise UsageError("decentralized simulate requires --m")
    F = args.f if args.f else 10_000
    M = Fraction(args.m)
    db = make_database(N, F, db_seed)
    placement = decentralized.random_placement(N, K, M, F, place_seed)
    partition = decentralized.level_partition(placement, N, F)
    d = (
        parse_demand(args.demand, N, K)
        if args.demand
        else tuple(np.random.default_rng(demand_seed).integers(1, N + 1, size=K).tolist())
    )
    leaders = select_leaders(d)
    stats = demand_stats(d, N)
    messages = decentralized.encode_delivery(db, partition, d, leaders)
    rate = decentralized.empirical_rate(messages, F)
    predicted = dec_rate_for_distinct(N, M, stats.distinct)
    rel = abs(float(rate) - float(predicted)) / float(predicted) if predicted else 0.0
    bad = _report_decode(
        db, lambda k: decentralized.decode_user(k, db, placement, partition, messages, d, leaders), K, d
    )
    print(f"decentralized simulate: N={N} K={K} M={M} F={F} seed={seed}")
    print(f"demand: {','.join(map(str, d))} ({stats.distinct} distinct), leaders: {sorted(leaders)}")
    print(
        f"messages: {len(messages)}, measured rate: {_fmt(rate)}, "
        f"predicted: {_fmt(predicted)}, relative error: {rel * 100:.3f}%"
    )
    print("decode: all users OK" if not bad else f"decode: FAILED for users {bad}")
    if args.dump:
        for m in messages:
            print(m.transcript_line())
    return 1 if bad else 0


# --- bound ---------------------------------------------------------------------


def _batch_achieved_level(placement, partition, N: int, F: int) -> int | None:
    """The single coverage level if the placement is batch-like, else None.

    Batch-like: every bit cached by exactly t users and all (set, file)
    groups have the equal subfile size F / C(K, t).
    """
    profile = CacheProfile.from_placement(placement)
    levels = [n for n, a in enumerate(profile.coverage) if a]
    if len(levels) != 1:
        return None
    t = levels[0]
    size, rem = divmod(F, binomial(placement.K, t))
    if rem:
        return None
    for members, per_file in partition.groups.items():
        if any(len(p) != size for p in per_file):
            return None
    return t


def cmd_bound(args) -> int:
    try:
        placement, N, F, M = load_placement(args.placement)
    except PlacementParseError as exc:
        print(f"error parsing {args.placement}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"cannot read {args.placement}: {exc}", file=sys.stderr)
        return 2
    K = placement.K
    profile = CacheProfile.from_placement(placement)
    partition = decentralized.level_partition(placement, N, F)
    print(f"placement: K={K} N={N} F={F} M={M}")
    print("coverage profile (bits cached by exactly n users):")
    for n, a in enumerate(profile.coverage):
        if a:
            print(f"  n={n}: {a}")
    batch_t = _batch_achieved_level(placement, partition, N, F)
    if batch_t is not None:
        print(f"placement is batch-structured with t={batch_t}")
    print("per-type lower bounds on the average delivery rate (eps=0):")
    for stats in enumerate_types(N, K):
        bound = converse_bound(profile, stats, K, F, eps=0)
        line = f"  type {stats.counts} distinct={stats.distinct}: bound={_fmt(bound)}"
        if batch_t is not None:
            achieved = delivery_rate_value(K, batch_t, stats.distinct)
            line += f", achieved={_fmt(achieved)}"
        print(line)
    return 0


# --- entry point -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cachekit",
        description="Coded caching with uncoded prefetching: schemes, tradeoffs, bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, n_required=True):
        p.add_argument("--n", type=int, required=n_required, help="number of files")
        p.add_argument("--k", type=int, required=n_required, help="number of users")
        p.add_argument("--m", type=str, default=None, help="cache size in files (fraction ok)")
        p.add_argument("--t", type=int, default=None, help="integer cache parameter K*M/N")
        p.add_argument("--f", type=int, default=None, help="bits per file")
        p.add_argument("--seed", type=int, default=None, help="seed (default env CACHEKIT_SEED or 0)")
        p.add_argument("--grid", type=str, default=None, help="M grid start:stop:step")
        p.add_argument("--schemes", type=str, default=None, help="comma-separated scheme labels")
        p.add_argument("--out", type=str, default=None, help="CSV output path")
        p.add_argument("--dump", action="store_true", help="print the delivery transcript")
        p.add_argument("--demand", type=str, default=None, help="comma-separated file indices")

    p_rates = sub.add_parser("rates", help="tabulate tradeoff formulas on an M grid")
    add_common(p_rates)
    p_rates.set_defaults(fn=cmd_rates)

    p_verify = sub.add_parser("verify", help="exhaustively verify an instance")
    add_common(p_verify)
    p_verify.add_argument("--sample", type=int, default=DEFAULT_SAMPLE,
                          help="extra random demands to bit-check in per-type mode")
    p_verify.set_defaults(fn=cmd_verify)

    p_sim = sub.add_parser("simulate", help="one placement + demand, end to end")
    add_common(p_sim)
    p_sim.set_defaults(fn=cmd_simulate)

    p_bound = sub.add_parser("bound", help="converse bound for a placement file")
    add_common(p_bound, n_required=False)
    p_bound.add_argument("placement", type=str, help="placement file path")
    p_bound.set_defaults(fn=cmd_bound)

    p_cmp = sub.add_parser("compare", help="side-by-side scheme table")
    add_common(p_cmp)
    p_cmp.set_defaults(fn=cmd_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
