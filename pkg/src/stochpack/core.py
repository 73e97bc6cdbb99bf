"""Exact item, bin and packing representations.

Sizes are integers counting units of 1e-9, so a bin of unit capacity holds
exactly ``CAPACITY`` units and every fit test is exact integer arithmetic.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

SCALE = 10**9
CAPACITY = SCALE
FRACTION_DIGITS = 9

_DECIMAL = re.compile(r"^\s*(\d*)(?:\.(\d*))?\s*$")


class SizeError(ValueError):
    """Raised for a size that is malformed, out of (0, 1], or too precise."""


def parse_size(text: str) -> int:
    """Parse a decimal string in (0, 1] into integer units of 1e-9.

    >>> parse_size("0.5")
    500000000
    """
    m = _DECIMAL.match(text)
    if m is None or (not m.group(1) and not m.group(2)):
        raise SizeError(f"malformed size {text!r}")
    whole, frac = m.group(1) or "0", m.group(2) or ""
    if len(frac) > FRACTION_DIGITS:
        raise SizeError(f"precision overflow in {text!r}: more than {FRACTION_DIGITS} fractional digits")
    value = int(whole) * SCALE + int(frac.ljust(FRACTION_DIGITS, "0") or "0")
    if value <= 0 or value > CAPACITY:
        raise SizeError(f"size {text!r} outside (0, 1]")
    return value


def format_size(value: int) -> str:
    whole, frac = divmod(value, SCALE)
    if frac == 0:
        return str(whole)
    return f"{whole}.{frac:09d}".rstrip("0")


def check_size(value: int) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise SizeError(f"size must be an integer unit count, got {value!r}")
    if value <= 0 or value > CAPACITY:
        raise SizeError(f"size {value} outside (0, {CAPACITY}]")
    return value


@dataclass(frozen=True)
class Item:
    id: int
    size: int


@dataclass(frozen=True)
class Instance:
    """Ordered list of item sizes; an item's id is its arrival position."""

    sizes: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(check_size(s) for s in self.sizes))

    @classmethod
    def from_decimals(cls, values: Iterable[str | float]) -> "Instance":
        return cls(tuple(parse_size(v if isinstance(v, str) else repr(v)) for v in values))

    @property
    def n(self) -> int:
        return len(self.sizes)

    @property
    def items(self) -> list[Item]:
        return [Item(i, s) for i, s in enumerate(self.sizes)]

    def __len__(self) -> int:
        return len(self.sizes)

    def __iter__(self):
        return iter(self.sizes)

    def __getitem__(self, i):
        return self.sizes[i]


@dataclass(frozen=True)
class Bin:
    item_ids: tuple[int, ...]
    load: int


@dataclass
class Packing:
    """Assignment of item ids to bins. ``n`` is the size of the packed instance."""

    bins: list[list[int]]
    n: int
    loads: list[int] = field(default_factory=list)

    @classmethod
    def from_bins(cls, bins: Sequence[Sequence[int]], sizes: Sequence[int]) -> "Packing":
        bins = [list(b) for b in bins if b]
        return cls(bins, len(sizes), [sum(sizes[i] for i in b) for b in bins])

    def __len__(self) -> int:
        return len(self.bins)

    def __repr__(self) -> str:
        if len(self.bins) <= 8:
            return f"Packing(bins={self.bins}, n={self.n})"
        return f"Packing(<{len(self.bins)} bins>, n={self.n})"

    @property
    def num_bins(self) -> int:
        return len(self.bins)

    def as_bins(self) -> list[Bin]:
        return [Bin(tuple(b), load) for b, load in zip(self.bins, self.loads)]

    def assignment(self) -> list[int]:
        """Bin index of every item id (-1 where the item is missing)."""
        where = [-1] * self.n
        for k, b in enumerate(self.bins):
            for i in b:
                if 0 <= i < self.n:
                    where[i] = k
        return where

    def to_json(self) -> str:
        return json.dumps({"bins": self.bins, "n": self.n})

    @classmethod
    def from_json(cls, text: str, sizes: Sequence[int]) -> "Packing":
        data = json.loads(text)
        if data["n"] != len(sizes):
            raise ValueError(f"packing is for n={data['n']} but instance has {len(sizes)} items")
        return cls.from_bins(data["bins"], sizes)


def total_weight(sizes: Iterable[int]) -> int:
    return sum(sizes)


def ceil_bins(weight: int) -> int:
    """Weight lower bound on the number of unit bins."""
    return -(-weight // CAPACITY)


def classify_large(sizes: Sequence[int], delta: int) -> tuple[list[int], list[int]]:
    """Split item ids into (large, small) where large means size >= delta; order kept."""
    large = [i for i, s in enumerate(sizes) if s >= delta]
    small = [i for i, s in enumerate(sizes) if s < delta]
    return large, small


def _looks_valid(sizes: Sequence[int], packing: Packing) -> bool:
    if packing.n != len(sizes):
        return False
    ids = []
    get = sizes.__getitem__
    try:
        for b in packing.bins:
            if not b or sum(map(get, b)) > CAPACITY:
                return False
            ids.extend(b)
    except (IndexError, TypeError):
        return False
    return sorted(ids) == list(range(len(sizes)))


def verify_packing(sizes: Sequence[int], packing: Packing) -> list[str]:
    """Return a list of human-readable violations; an empty list means valid."""
    n = len(sizes)
    if _looks_valid(sizes, packing):
        return []
    violations = []
    if packing.n != n:
        violations.append(f"packing is for n={packing.n}, instance has n={n}")
    seen = [0] * n
    for k, b in enumerate(packing.bins):
        if not b:
            violations.append(f"bin {k} is empty")
            continue
        load = 0
        for i in b:
            if not 0 <= i < n:
                violations.append(f"bin {k}: unknown item id {i}")
                continue
            seen[i] += 1
            load += sizes[i]
        if load > CAPACITY:
            violations.append(f"bin {k}: load {format_size(load)} > 1")
    for i, c in enumerate(seen):
        if c == 0:
            violations.append(f"missing id {i}")
        elif c > 1:
            violations.append(f"duplicate id {i}")
    return violations


def read_instance(path: str | Path) -> Instance:
    """Read one decimal size per line; '#' starts a comment."""
    sizes = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            sizes.append(parse_size(line))
        except SizeError as exc:
            raise SizeError(f"{path}:{lineno}: {exc}") from None
    return Instance(tuple(sizes))


def write_instance(path: str | Path, sizes: Iterable[int]) -> None:
    Path(path).write_text("".join(format_size(s) + "\n" for s in sizes))
