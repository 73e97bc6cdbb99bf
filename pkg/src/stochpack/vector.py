"""d-dimensional vector packing by max-coordinate rounding.

Each vector is replaced by a scalar item equal to its largest coordinate; the
scalar stream is packed online and every vector lands in the bin its scalar
shadow received.  Since every coordinate is at most the maximum, every
dimension of every bin stays within capacity.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

from .core import CAPACITY, parse_size
from .distributions import DistributionSpec, derive_seed, sample_sizes
from .heuristics import OnlinePacker
from .iid_meta import ImpAlg, MetaConfig

Vector = tuple[int, ...]


def round_to_max(item: Sequence[int]) -> int:
    return max(item)


@dataclass
class VectorPacking:
    bins: list[list[int]]
    loads: list[list[int]]  # per bin, per dimension
    n: int
    d: int

    def __len__(self):
        return len(self.bins)


def verify_vector_packing(items: Sequence[Vector], packing: VectorPacking) -> list[str]:
    violations = []
    seen = [0] * len(items)
    for k, b in enumerate(packing.bins):
        if not b:
            violations.append(f"bin {k} is empty")
        loads = [0] * packing.d
        for i in b:
            seen[i] += 1
            for j, x in enumerate(items[i]):
                loads[j] += x
        for j, load in enumerate(loads):
            if load > CAPACITY:
                violations.append(f"bin {k}: dimension {j} load {load} > {CAPACITY}")
    for i, c in enumerate(seen):
        if c != 1:
            violations.append(f"item {i} packed {c} times")
    return violations


def pack_vector(items: Sequence[Vector], d: int,
                make_packer: Callable[[], OnlinePacker] | None = None) -> VectorPacking:
    """Feed the max-coordinate shadows to an online packer (default: ImpAlg with FFD)."""
    packer = make_packer() if make_packer is not None else ImpAlg(MetaConfig())
    for i, v in enumerate(items):
        if len(v) != d:
            raise ValueError(f"item {i} has dimension {len(v)}, expected {d}")
        packer.accept(round_to_max(v))
    shadow = packer.finish()
    loads = [[sum(items[i][j] for i in b) for j in range(d)] for b in shadow.bins]
    return VectorPacking(shadow.bins, loads, len(items), d)


MAX_EXACT_VECTORS = 12


def opt_vector_exact(items: Sequence[Vector]) -> int:
    """Minimum bin count by a subset DP over the item set (n <= 12)."""
    n = len(items)
    if n > MAX_EXACT_VECTORS:
        raise ValueError(f"exact vector oracle limited to {MAX_EXACT_VECTORS} items, got {n}")
    if n == 0:
        return 0
    d = len(items[0])
    full = (1 << n) - 1
    fits = [False] * (1 << n)
    sums = [(0,) * d] * (1 << n)
    fits[0] = True
    for mask in range(1, 1 << n):
        low = (mask & -mask).bit_length() - 1
        rest = mask & (mask - 1)
        s = tuple(a + b for a, b in zip(sums[rest], items[low]))
        sums[mask] = s
        fits[mask] = fits[rest] and max(s) <= CAPACITY
    best = [n + 1] * (1 << n)
    best[0] = 0
    for mask in range(1, 1 << n):
        low = mask & -mask
        rest = mask ^ low
        # bins containing the lowest item: low | sub for every sub of rest
        sub = rest
        b = n + 1
        while True:
            if fits[sub | low] and best[rest ^ sub] + 1 < b:
                b = best[rest ^ sub] + 1
            if sub == 0:
                break
            sub = (sub - 1) & rest
        best[mask] = b
    return best[full]


def sample_vectors(specs: Sequence[DistributionSpec], n: int, seed: int) -> list[Vector]:
    """Coordinate j of every item is drawn i.i.d. from specs[j]."""
    cols = [sample_sizes(spec, n, derive_seed(seed, j)) for j, spec in enumerate(specs)]
    return [tuple(c[i] for c in cols) for i in range(n)]


def read_vector_instance(path: str | Path) -> list[Vector]:
    out = []
    d = None
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        v = tuple(parse_size(x) for x in line.split(","))
        if d is None:
            d = len(v)
        elif len(v) != d:
            raise ValueError(f"{path}:{lineno}: dimension {len(v)} != {d}")
        out.append(v)
    return out
