"""Seeded samplers for i.i.d. item sizes and uniformly random arrival orders.

All randomness comes from SplitMix64 (Steele, Lea & Flood 2014), implemented
here so a seed gives the same stream on every platform:

    state  <- state + 0x9E3779B97F4A7C15          (mod 2**64)
    z      <- state
    z      <- (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z      <- (z ^ (z >> 27)) * 0x94D049BB133111EB
    output <- z ^ (z >> 31)

Output i of a stream seeded with s is mix(s + (i + 1) * GAMMA), so blocks of
outputs can be produced with vectorised uint64 arithmetic.  Conversions:

* ``below(m)``: ``(z * m) >> 64`` (multiply-high; bias < m / 2**64);
* uniform sizes on [a, b]: ``a + ((b - a) * (z >> 32) + 2**31) >> 32`` units,
  i.e. rounded half-up on the 1e-9 grid, then clamped to >= 1 unit;
* inverse-CDF draws compare ``(z >> 11) * 2**-53`` against cumulative weights.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .core import CAPACITY, Instance, parse_size, read_instance

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, trial: int) -> int:
    """Per-trial stream seed; distinct trials give distinct seeds (mix64 is a bijection)."""
    return mix64((seed & MASK64) + (trial + 1) * GAMMA)


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        return mix64(self.state)

    def below(self, m: int) -> int:
        return (self.next() * m) >> 64

    def random(self) -> float:
        return (self.next() >> 11) * (1.0 / (1 << 53))

    def block(self, count: int) -> np.ndarray:
        """The next ``count`` outputs as a uint64 array; advances the state."""
        with np.errstate(over="ignore"):
            idx = np.arange(1, count + 1, dtype=np.uint64)
            z = np.uint64(self.state) + idx * np.uint64(GAMMA)
            z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
            z = z ^ (z >> np.uint64(31))
        self.state = (self.state + count * GAMMA) & MASK64
        return z


# ---------------------------------------------------------------------------
# distribution specs


@dataclass(frozen=True)
class ContinuousUniform:
    a: int  # units, 0 <= a < b <= CAPACITY
    b: int

    def __post_init__(self):
        if not 0 <= self.a < self.b <= CAPACITY:
            raise ValueError(f"need 0 <= a < b <= 1, got a={self.a}, b={self.b} units")


@dataclass(frozen=True)
class DiscreteUniform:
    """Uniform over {1/k, 2/k, ..., j/k}."""

    j: int
    k: int

    def __post_init__(self):
        if not 1 <= self.j <= self.k:
            raise ValueError(f"need 1 <= j <= k, got j={self.j}, k={self.k}")

    def support(self) -> list[int]:
        # i/k rounded half-up to the grid
        return [(2 * i * CAPACITY + self.k) // (2 * self.k) for i in range(1, self.j + 1)]


@dataclass(frozen=True)
class FiniteDiscrete:
    atoms: tuple[tuple[int, float], ...]

    def __post_init__(self):
        if not self.atoms:
            raise ValueError("finite distribution needs at least one atom")
        for size, p in self.atoms:
            if not 0 < size <= CAPACITY:
                raise ValueError(f"atom size {size} outside (0, 1]")
            if p < 0:
                raise ValueError(f"negative probability {p}")
        total = sum(p for _, p in self.atoms)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {total!r}, not 1")


@dataclass(frozen=True)
class Empirical:
    sizes: tuple[int, ...]

    def __post_init__(self):
        if not self.sizes:
            raise ValueError("empirical distribution needs at least one size")


DistributionSpec = Union[ContinuousUniform, DiscreteUniform, FiniteDiscrete, Empirical]


def _size_field(v) -> int:
    # JSON numbers go through their shortest repr so 0.25 means 250000000 units
    if isinstance(v, str):
        return parse_size(v)
    return parse_size(repr(float(v))) if v != 0 else 0


def parse_distribution(data: dict | str, base: Path | None = None) -> DistributionSpec:
    """Build a spec from its JSON form (a dict or a JSON string)."""
    if isinstance(data, str):
        data = json.loads(data)
    kind = data.get("kind")
    if kind == "uniform":
        return ContinuousUniform(_size_field(data["a"]), _size_field(data["b"]))
    if kind == "discrete_uniform":
        return DiscreteUniform(int(data["j"]), int(data["k"]))
    if kind == "finite":
        return FiniteDiscrete(tuple((_size_field(s), float(p)) for s, p in data["atoms"]))
    if kind == "file":
        path = Path(data["path"])
        if base is not None and not path.is_absolute():
            path = base / path
        return Empirical(read_instance(path).sizes)
    raise ValueError(f"unknown distribution kind {kind!r}")


def load_distribution(path: str | Path) -> DistributionSpec:
    path = Path(path)
    return parse_distribution(json.loads(path.read_text()), base=path.parent)


def sample_sizes(spec: DistributionSpec, n: int, seed: int) -> list[int]:
    rng = SplitMix64(seed)
    z = rng.block(n)
    if isinstance(spec, ContinuousUniform):
        hi = (z >> np.uint64(32)).astype(np.uint64)
        span = np.uint64(spec.b - spec.a)
        units = np.uint64(spec.a) + ((span * hi + np.uint64(1 << 31)) >> np.uint64(32))
        return np.maximum(units, np.uint64(1)).astype(np.int64).tolist()
    if isinstance(spec, DiscreteUniform):
        support = np.array(spec.support(), dtype=np.int64)
        idx = ((z >> np.uint64(32)) * np.uint64(spec.j)) >> np.uint64(32)
        return support[idx.astype(np.int64)].tolist()
    if isinstance(spec, FiniteDiscrete):
        values = np.array([s for s, _ in spec.atoms], dtype=np.int64)
        cum = np.cumsum([p for _, p in spec.atoms])
        u = (z >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))
        idx = np.minimum(np.searchsorted(cum, u, side="right"), len(values) - 1)
        return values[idx].tolist()
    if isinstance(spec, Empirical):
        values = np.array(spec.sizes, dtype=np.int64)
        idx = ((z >> np.uint64(32)) * np.uint64(len(values))) >> np.uint64(32)
        return values[idx.astype(np.int64)].tolist()
    raise TypeError(f"not a distribution spec: {spec!r}")


def sample_instance(spec: DistributionSpec, n: int, seed: int) -> Instance:
    return Instance(tuple(sample_sizes(spec, n, seed)))


# ---------------------------------------------------------------------------
# permutations


def permutation(n: int, seed: int) -> list[int]:
    """Fisher-Yates: for i = n-1 .. 1 swap position i with below(i + 1)."""
    perm = list(range(n))
    if n < 2:
        return perm
    z = SplitMix64(seed).block(n - 1).tolist()
    for step, i in enumerate(range(n - 1, 0, -1)):
        j = (z[step] * (i + 1)) >> 64
        perm[i], perm[j] = perm[j], perm[i]
    return perm


def permutations_batch(n: int, seed: int, trials: int) -> np.ndarray:
    """Row t equals ``permutation(n, derive_seed(seed, t))``; vectorised over trials."""
    perms = np.tile(np.arange(n, dtype=np.int64), (trials, 1))
    if n < 2 or trials == 0:
        return perms
    rows = np.arange(trials)
    draws = np.empty((trials, n - 1), dtype=np.uint64)
    for t in range(trials):
        draws[t] = SplitMix64(derive_seed(seed, t)).block(n - 1)
    for step, i in enumerate(range(n - 1, 0, -1)):
        z = draws[:, step]
        # exact multiply-high of a 64-bit draw by (i + 1) < 2**32 via 32-bit halves
        m = np.uint64(i + 1)
        lo = (z & np.uint64(0xFFFFFFFF)) * m
        hi = (z >> np.uint64(32)) * m
        j = ((hi + (lo >> np.uint64(32))) >> np.uint64(32)).astype(np.int64)
        a = perms[rows, i].copy()
        perms[rows, i] = perms[rows, j]
        perms[rows, j] = a
    return perms


def random_permutation(sizes: Sequence[int], seed: int) -> list[int]:
    """Sizes re-ordered by a uniformly random permutation (arrival order shuffled)."""
    perm = permutation(len(sizes), seed)
    return [sizes[p] for p in perm]
