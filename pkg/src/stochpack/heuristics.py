"""Classical online packers (NF, FF, BF, Harmonic) and their sorted offline variants.

Every online packer exposes ``accept(size) -> bin index`` and ``finish() -> Packing``.
Bins are numbered in opening order and an accepted item never moves.
"""

from __future__ import annotations

import re
from typing import Callable, Sequence

from sortedcontainers import SortedList

from .core import CAPACITY, Packing

DEFAULT_HARMONIC_K = 10


class OnlinePacker:
    """Base class: keeps the bins (item ids and loads) of an online run."""

    def __init__(self):
        self.bins: list[list[int]] = []
        self.loads: list[int] = []
        self._next_id = 0

    def _take_id(self, item_id):
        if item_id is None:
            item_id = self._next_id
        self._next_id += 1
        return item_id

    def _open(self, item_id, size) -> int:
        self.bins.append([item_id])
        self.loads.append(size)
        return len(self.bins) - 1

    def _put(self, k, item_id, size) -> int:
        self.bins[k].append(item_id)
        self.loads[k] += size
        return k

    def accept(self, size: int, item_id: int | None = None) -> int:
        raise NotImplementedError

    def finish(self) -> Packing:
        return Packing([list(b) for b in self.bins], self._next_id, list(self.loads))

    def pack(self, sizes: Sequence[int]) -> Packing:
        for s in sizes:
            self.accept(s)
        return self.finish()


class NextFit(OnlinePacker):
    def accept(self, size, item_id=None):
        item_id = self._take_id(item_id)
        if self.bins and self.loads[-1] + size <= CAPACITY:
            return self._put(len(self.bins) - 1, item_id, size)
        return self._open(item_id, size)


class _MaxTree:
    """Array segment tree over bin residuals, answering 'first bin with residual >= x'."""

    def __init__(self, capacity=16):
        self.size = capacity
        self.tree = [0] * (2 * capacity)

    def _grow(self):
        old = self.tree[self.size:]
        self.size *= 2
        self.tree = [0] * (2 * self.size)
        self.tree[self.size:self.size + len(old)] = old
        for i in range(self.size - 1, 0, -1):
            self.tree[i] = max(self.tree[2 * i], self.tree[2 * i + 1])

    def set(self, pos, value):
        while pos >= self.size:
            self._grow()
        i = pos + self.size
        tree = self.tree
        tree[i] = value
        i >>= 1
        while i:
            a, b = tree[2 * i], tree[2 * i + 1]
            v = a if a > b else b
            if tree[i] == v:
                break
            tree[i] = v
            i >>= 1

    def first_at_least(self, x) -> int:
        tree = self.tree
        if tree[1] < x:
            return -1
        i = 1
        while i < self.size:
            i = 2 * i if tree[2 * i] >= x else 2 * i + 1
        return i - self.size


class FirstFit(OnlinePacker):
    def __init__(self):
        super().__init__()
        self._tree = _MaxTree()

    def accept(self, size, item_id=None):
        if item_id is None:
            item_id = self._next_id
        self._next_id += 1
        loads = self.loads
        k = self._tree.first_at_least(size)
        if k < 0:
            k = len(loads)
            self.bins.append([item_id])
            loads.append(size)
        else:
            self.bins[k].append(item_id)
            loads[k] += size
        self._tree.set(k, CAPACITY - loads[k])
        return k


class BestFit(OnlinePacker):
    """Fullest feasible bin; equal loads break toward the lowest bin index."""

    def __init__(self):
        super().__init__()
        # (residual, bin index) for every open bin with positive residual
        self._open_bins = SortedList()

    def accept(self, size, item_id=None):
        item_id = self._take_id(item_id)
        open_bins = self._open_bins
        loads = self.loads
        idx = open_bins.bisect_left((size, -1))
        if idx == len(open_bins):
            k = self._open(item_id, size)
        else:
            old, k = open_bins.pop(idx)
            self._put(k, item_id, size)
        residual = CAPACITY - loads[k]
        if residual > 0:
            open_bins.add((residual, k))
        return k


class Harmonic(OnlinePacker):
    """Harmonic(k): sizes in (1/(i+1), 1/i] go to class i (i < k), i items per bin;
    sizes <= 1/k share a residual class packed by Next-Fit."""

    def __init__(self, k: int = DEFAULT_HARMONIC_K):
        if k < 2:
            raise ValueError("Harmonic needs k >= 2")
        super().__init__()
        self.k = k
        self._current: dict[int, int] = {}  # class -> open bin index

    def size_class(self, size: int) -> int:
        # largest i with size <= 1/i, i.e. i = floor(C / size), capped at k
        return min(CAPACITY // size, self.k)

    def accept(self, size, item_id=None):
        item_id = self._take_id(item_id)
        c = self.size_class(size)
        k = self._current.get(c)
        if k is not None:
            if c < self.k:
                if len(self.bins[k]) < c:
                    return self._put(k, item_id, size)
            elif self.loads[k] + size <= CAPACITY:
                return self._put(k, item_id, size)
        k = self._open(item_id, size)
        self._current[c] = k
        return k


def next_fit(sizes: Sequence[int]) -> Packing:
    return NextFit().pack(sizes)


def first_fit(sizes: Sequence[int]) -> Packing:
    return FirstFit().pack(sizes)


def best_fit(sizes: Sequence[int]) -> Packing:
    return BestFit().pack(sizes)


def harmonic(k: int, sizes: Sequence[int]) -> Packing:
    return Harmonic(k).pack(sizes)


_ONLINE = {"NF": NextFit, "FF": FirstFit, "BF": BestFit}


def sorted_variant(algorithm: str, sizes: Sequence[int]) -> Packing:
    """Run NF/FF/BF on the items sorted by non-increasing size (stable on ties)."""
    packer = _ONLINE[algorithm.upper()]()
    # reverse=True keeps equal sizes in arrival order
    for i in sorted(range(len(sizes)), key=sizes.__getitem__, reverse=True):
        packer.accept(sizes[i], i)
    return packer.finish()


def next_fit_decreasing(sizes):
    return sorted_variant("NF", sizes)


def first_fit_decreasing(sizes):
    return sorted_variant("FF", sizes)


def best_fit_decreasing(sizes):
    return sorted_variant("BF", sizes)


PackFn = Callable[[Sequence[int]], Packing]

_HARMONIC_ID = re.compile(r"^HARMONIC(?:[(:]?(\d+)\)?)?$")


def get_algorithm(name: str) -> PackFn:
    """Look up a packing function by id: NF, FF, BF, NFD, FFD, BFD, HARMONIC, HARMONIC(k)."""
    key = name.strip().upper()
    table = {
        "NF": next_fit,
        "FF": first_fit,
        "BF": best_fit,
        "NFD": next_fit_decreasing,
        "FFD": first_fit_decreasing,
        "BFD": best_fit_decreasing,
    }
    if key in table:
        return table[key]
    m = _HARMONIC_ID.match(key)
    if m:
        k = int(m.group(1)) if m.group(1) else DEFAULT_HARMONIC_K
        if k < 2:
            raise ValueError("Harmonic needs k >= 2")
        return lambda sizes: harmonic(k, sizes)
    raise ValueError(f"unknown algorithm {name!r}")


def make_online_packer(name: str) -> OnlinePacker:
    key = name.strip().upper()
    if key in _ONLINE:
        return _ONLINE[key]()
    m = _HARMONIC_ID.match(key)
    if m:
        return Harmonic(int(m.group(1)) if m.group(1) else DEFAULT_HARMONIC_K)
    raise ValueError(f"{name!r} is not an online packer")
