"""Upright matching of plus/minus points and the Modified Best-Fit reduction.

A plus point at (t1, y1) may be matched to a minus point at (t2, y2) when
t1 <= t2 and y1 >= y2: the plus arrived earlier and sits at least as high.
For Modified Best-Fit a plus is a large item (level = its free space) and a
minus is an item of size <= 1/2 (level = its size).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from sortedcontainers import SortedList

from .core import CAPACITY, Packing
from .distributions import SplitMix64
from .heuristics import BestFit

PLUS = 1
MINUS = -1


@dataclass(frozen=True)
class SignedPoint:
    time: int
    level: int
    sign: int  # PLUS or MINUS


@dataclass
class MatchingResult:
    pairs: list[tuple[int, int]]  # (plus time, minus time)
    unmatched: int
    unmatched_minus: int = 0
    unmatched_plus: int = 0

    @property
    def size(self) -> int:
        return len(self.pairs)


def _edge(p: SignedPoint, q: SignedPoint) -> bool:
    return p.time <= q.time and p.level >= q.level


def upright_match_greedy(points: Sequence[SignedPoint]) -> MatchingResult:
    """Time sweep: each minus takes the open plus with the smallest level >= its own.

    Equal levels break toward the earliest plus.  The result is a maximum matching.
    """
    open_plus = SortedList()  # (level, time)
    pairs = []
    unmatched_minus = 0
    last = None
    for p in points:
        if last is not None and p.time < last:
            raise ValueError("points must be sorted by time")
        last = p.time
        if p.sign == PLUS:
            open_plus.add((p.level, p.time))
            continue
        k = open_plus.bisect_left((p.level, -math.inf))
        if k == len(open_plus):
            unmatched_minus += 1
        else:
            _, t = open_plus.pop(k)
            pairs.append((t, p.time))
    unmatched_plus = len(open_plus)
    return MatchingResult(pairs, unmatched_minus + unmatched_plus, unmatched_minus, unmatched_plus)


MAX_ORACLE_POINTS = 60


def upright_match_oracle(points: Sequence[SignedPoint]) -> int:
    """Maximum matching size by augmenting paths on the explicit edge set."""
    if len(points) > MAX_ORACLE_POINTS:
        raise ValueError(f"oracle limited to {MAX_ORACLE_POINTS} points, got {len(points)}")
    plus = [p for p in points if p.sign == PLUS]
    minus = [q for q in points if q.sign == MINUS]
    adj = [[j for j, q in enumerate(minus) if _edge(p, q)] for p in plus]
    match_of_minus = [-1] * len(minus)

    def augment(i, seen):
        for j in adj[i]:
            if not seen[j]:
                seen[j] = True
                if match_of_minus[j] < 0 or augment(match_of_minus[j], seen):
                    match_of_minus[j] = i
                    return True
        return False

    return sum(augment(i, [False] * len(minus)) for i in range(len(plus)))


def mirror(points: Sequence[SignedPoint]) -> list[SignedPoint]:
    """Negate every time coordinate and re-sort."""
    return sorted((SignedPoint(-p.time, p.level, p.sign) for p in points), key=lambda p: p.time)


class ModifiedBestFit(BestFit):
    """Best-Fit that permanently closes any bin receiving an item of size <= 1/2."""

    def accept(self, size, item_id=None):
        if 2 * size > CAPACITY:
            return super().accept(size, item_id)
        item_id = self._take_id(item_id)
        idx = self._open_bins.bisect_left((size, -1))
        if idx == len(self._open_bins):
            return self._open(item_id, size)  # never indexed: closed at once
        _, k = self._open_bins.pop(idx)
        return self._put(k, item_id, size)


def modified_best_fit(sizes: Sequence[int]) -> Packing:
    return ModifiedBestFit().pack(sizes)


def mbf_as_matching(sizes: Sequence[int]) -> list[SignedPoint]:
    """Item i becomes minus(i, x_i) if x_i <= 1/2, else plus(i, 1 - x_i)."""
    points = []
    for i, x in enumerate(sizes):
        if 3 * x <= CAPACITY:
            raise ValueError(f"item {i} has size <= 1/3")
        if 2 * x <= CAPACITY:
            points.append(SignedPoint(i, x, MINUS))
        else:
            points.append(SignedPoint(i, CAPACITY - x, PLUS))
    return points


def mbf_bins_via_matching(sizes: Sequence[int]) -> int:
    points = mbf_as_matching(sizes)
    result = upright_match_greedy(points)
    n_plus = sum(1 for p in points if p.sign == PLUS)
    return n_plus + result.unmatched_minus


@dataclass
class LMInstance:
    """k large/medium pairs with large + medium = 1 exactly, so Opt = k."""

    large: list[int]
    medium: list[int]
    sizes: list[int] = field(init=False)

    def __post_init__(self):
        self.sizes = list(self.large) + list(self.medium)

    @property
    def k(self) -> int:
        return len(self.large)


def lm_instance(k: int, seed: int, low: int = CAPACITY // 2, high: int = 620_000_000) -> LMInstance:
    """Large sizes uniform in (low, high], each paired with medium = 1 - large."""
    rng = SplitMix64(seed)
    span = high - low
    large = [low + 1 + rng.below(span) for _ in range(k)]
    return LMInstance(large, [CAPACITY - x for x in large])


def lm_point_set(levels_plus: Sequence[int], levels_minus: Sequence[int], seed: int) -> list[SignedPoint]:
    """Pair i gives plus level a_i and minus level a_{k+i} (a_i >= a_{k+i}); the
    2k time coordinates are a uniformly random permutation."""
    from .distributions import permutation

    k = len(levels_plus)
    times = permutation(2 * k, seed)
    pts = [SignedPoint(times[i], levels_plus[i], PLUS) for i in range(k)]
    pts += [SignedPoint(times[k + i], levels_minus[i], MINUS) for i in range(k)]
    pts.sort(key=lambda p: p.time)
    return pts
