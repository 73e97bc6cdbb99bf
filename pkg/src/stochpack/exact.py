"""Exact optimum and lower bounds for small or few-distinct-size instances.

Two exact routes:

* bin completion over the item set (n <= ``max_items``), iterative deepening on
  the bin count with a failure memo keyed by the remaining-item bitmask;
* for instances with at most ``max_distinct`` distinct sizes, a search over
  size-multiplicity vectors using maximal bin configurations.  Small vectors are
  solved by a memoized recursion; large ones by the configuration integer
  program, whose optimality is certified by its dual bound.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .core import CAPACITY, Packing, ceil_bins
from .heuristics import first_fit_decreasing


class ExactError(RuntimeError):
    """The oracle cannot certify an optimum; fall back to ``lower_bound``."""


class InstanceTooLarge(ExactError):
    pass


class BudgetExhausted(ExactError):
    pass


@dataclass(frozen=True)
class ExactConfig:
    max_items: int = 24
    max_distinct: int = 12
    node_budget: int = 2_000_000
    # multiplicity-vector state spaces up to this size use the memoized recursion
    dp_state_limit: int = 200_000


def lower_bound(sizes: Sequence[int]) -> int:
    """max(ceil(total weight), number of items larger than 1/2)."""
    big = sum(1 for s in sizes if 2 * s > CAPACITY)
    return max(ceil_bins(sum(sizes)), big)


@dataclass
class ExactResult:
    bins: int
    packing: Packing
    method: str


def opt_exact(sizes: Sequence[int], config: ExactConfig = ExactConfig()) -> ExactResult:
    sizes = list(sizes)
    if not sizes:
        return ExactResult(0, Packing([], 0, []), "empty")
    distinct = len(set(sizes))
    if len(sizes) <= config.max_items and (len(sizes) <= 16 or distinct > 3):
        return _bin_completion(sizes, config)
    if distinct <= config.max_distinct:
        return _distinct_sizes(sizes, config)
    if len(sizes) <= config.max_items:
        return _bin_completion(sizes, config)
    raise InstanceTooLarge(
        f"n={len(sizes)} > {config.max_items} and {distinct} distinct sizes > {config.max_distinct}")


def opt_value(sizes: Sequence[int], config: ExactConfig = ExactConfig()) -> int:
    return opt_exact(sizes, config).bins


# ---------------------------------------------------------------------------
# bin completion


def _bin_completion(sizes: list[int], config: ExactConfig) -> ExactResult:
    n = len(sizes)
    order = sorted(range(n), key=lambda i: -sizes[i])
    s = [sizes[i] for i in order]  # non-increasing
    full = (1 << n) - 1

    ffd = first_fit_decreasing(sizes)
    best = len(ffd.bins)
    lb = lower_bound(sizes)
    if lb == best:
        return ExactResult(best, ffd, "ffd=lb")

    budget = [config.node_budget]
    failed: dict[int, int] = {}  # mask -> largest k proven infeasible

    def mask_weight(mask):
        w = 0
        big = 0
        m = mask
        while m:
            low = m & -m
            j = low.bit_length() - 1
            w += s[j]
            if 2 * s[j] > CAPACITY:
                big += 1
            m ^= low
        return max(ceil_bins(w), big)

    def completions(mask, first):
        """Maximal sets of remaining items that fit alongside item ``first``,
        largest total first.  Equal sizes are taken as a prefix of their group,
        so permutations of identical items are never enumerated twice."""
        groups: list[tuple[int, list[int]]] = []
        for j in range(n):
            if mask >> j & 1 and j != first:
                if groups and groups[-1][0] == s[j]:
                    groups[-1][1].append(j)
                else:
                    groups.append((s[j], [j]))
        out = []

        def rec(g, room, chosen, total, min_left_out):
            if g == len(groups):
                if min_left_out > room:
                    out.append((total, chosen))
                return
            size, ids = groups[g]
            top = min(len(ids), room // size)
            for t in range(top, -1, -1):
                c = chosen
                for j in ids[:t]:
                    c |= 1 << j
                left_out = size if t < len(ids) else min_left_out
                rec(g + 1, room - t * size, c, total + t * size, min(min_left_out, left_out))

        rec(0, CAPACITY - s[first], 0, 0, CAPACITY + 1)
        out.sort(key=lambda tc: -tc[0])
        return [c for _, c in out]

    def feasible(mask, k, path):
        if mask == 0:
            return True
        if k <= 0 or mask_weight(mask) > k:
            return False
        if failed.get(mask, -1) >= k:
            return False
        budget[0] -= 1
        if budget[0] < 0:
            raise BudgetExhausted("bin-completion node budget exhausted")
        first = (mask & -mask).bit_length() - 1  # largest remaining item
        for c in completions(mask, first):
            b = c | (1 << first)
            path.append(b)
            if feasible(mask & ~b, k - 1, path):
                return True
            path.pop()
        failed[mask] = max(failed.get(mask, -1), k)
        return False

    for k in range(lb, best):
        path: list[int] = []
        if feasible(full, k, path):
            bins = [[order[j] for j in range(n) if b >> j & 1] for b in path]
            return ExactResult(k, Packing.from_bins(bins, sizes), "bin-completion")
    return ExactResult(best, ffd, "bin-completion")


# ---------------------------------------------------------------------------
# distinct sizes


def maximal_configurations(values: Sequence[int], limits: Sequence[int] | None = None) -> list[tuple[int, ...]]:
    """All count vectors c with sum c_i * values_i <= 1 that admit no further item
    (respecting ``limits`` when given)."""
    d = len(values)
    limits = list(limits) if limits is not None else [CAPACITY // v for v in values]
    out = []

    def rec(i, room, cur):
        if i == d:
            if all(cur[j] >= limits[j] or values[j] > room for j in range(d)):
                out.append(tuple(cur))
            return
        top = min(limits[i], room // values[i])
        for c in range(top, -1, -1):
            cur.append(c)
            rec(i + 1, room - c * values[i], cur)
            cur.pop()

    rec(0, CAPACITY, [])
    return [c for c in out if any(c)]


_DP_MAX_DEPTH = 500  # recursion depth is bounded by the item count


def _distinct_sizes(sizes: list[int], config: ExactConfig) -> ExactResult:
    counts = Counter(sizes)
    values = sorted(counts, reverse=True)
    demand = [counts[v] for v in values]
    states = math.prod(m + 1 for m in demand)
    if states <= config.dp_state_limit and len(sizes) <= _DP_MAX_DEPTH:
        x = _multiplicity_dp(values, demand, config)
        method = "multiplicity-dp"
    else:
        x = _configuration_ip(values, demand)
        method = "configuration-ip"
    packing = _realize(sizes, values, x)
    return ExactResult(len(packing.bins), packing, method)


def _multiplicity_dp(values, demand, config) -> list[tuple[tuple[int, ...], int]]:
    d = len(values)
    budget = [config.node_budget]

    @lru_cache(maxsize=None)
    def configs_for(vec):
        return maximal_configurations(values, vec)

    @lru_cache(maxsize=None)
    def solve(vec):
        if not any(vec):
            return 0, None
        budget[0] -= 1
        if budget[0] < 0:
            raise BudgetExhausted("multiplicity DP budget exhausted")
        first = next(i for i in range(d) if vec[i])
        best = (math.inf, None)
        for c in configs_for(vec):
            if c[first] == 0:
                continue
            rest = tuple(v - k for v, k in zip(vec, c))
            sub, _ = solve(rest)
            if sub + 1 < best[0]:
                best = (sub + 1, c)
        return best

    vec = tuple(demand)
    plan: Counter = Counter()
    while any(vec):
        _, c = solve(vec)
        plan[c] += 1
        vec = tuple(v - k for v, k in zip(vec, c))
    solve.cache_clear()
    return list(plan.items())


def _configuration_ip(values, demand) -> list[tuple[tuple[int, ...], int]]:
    from scipy.optimize import Bounds, LinearConstraint, milp

    configs = maximal_configurations(values)
    a = np.array(configs, dtype=float).T  # d x C
    c = np.ones(len(configs))
    res = milp(
        c,
        constraints=LinearConstraint(a, lb=np.array(demand, dtype=float), ub=np.inf),
        integrality=np.ones(len(configs)),
        bounds=Bounds(0, np.inf),
        options={"mip_rel_gap": 0.0, "time_limit": 120.0},
    )
    if res.x is None:
        raise BudgetExhausted(f"configuration IP failed: {res.message}")
    x = np.round(res.x).astype(int)
    obj = int(x.sum())
    covered = np.array(configs, dtype=np.int64).T @ x
    if np.any(covered < np.array(demand)):
        raise BudgetExhausted("configuration IP returned an infeasible plan")
    dual = getattr(res, "mip_dual_bound", None)
    if dual is None or math.ceil(dual - 1e-6) < obj:
        raise BudgetExhausted(f"configuration IP optimum {obj} not certified (bound {dual})")
    return [(configs[j], int(x[j])) for j in range(len(configs)) if x[j] > 0]


def _realize(sizes, values, plan) -> Packing:
    """Turn (configuration, multiplicity) pairs into bins over actual item ids,
    dropping over-coverage."""
    pools = {v: [] for v in values}
    for i in range(len(sizes) - 1, -1, -1):
        pools[sizes[i]].append(i)
    bins = []
    for cfg, times in plan:
        for _ in range(times):
            b = []
            for v, k in zip(values, cfg):
                for _ in range(k):
                    if pools[v]:
                        b.append(pools[v].pop())
            if b:
                bins.append(b)
    return Packing.from_bins(bins, sizes)
