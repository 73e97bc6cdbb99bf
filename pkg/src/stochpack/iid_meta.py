"""Proxy-packing meta-algorithm for online bin packing with i.i.d. item sizes.

``AlgKnownN`` packs a stream whose length n is known in advance:

* the first floor(delta^2 n) items (the sampling stage) go into Next-Fit;
* if that stage holds at most delta^3 * weight large items (size >= delta), Next-Fit
  simply continues for the whole stream;
* otherwise each later stage is packed against an offline packing of every item seen
  so far in the run ("proxies").  A large arrival takes the place of the smallest
  proxy at least as big, or gets a bin of its own that is closed at once.  Small
  arrivals are packed Next-Fit into S-slots, the room each proxy bin has left
  beside its large proxies, with fresh unit slots on overflow.

``ImpAlg`` drops the knowledge of n: it runs the algorithm above on blocks of
n0 = 1/delta^3, n0, 2 n0, 4 n0, ... items.  Each stage builds its proxy packing in
1/delta chunks, lazily, and all small items share one global S-slot list.

Only bins that end up holding a real item are emitted.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Iterable, Sequence


from .core import CAPACITY, Packing
from .heuristics import OnlinePacker, PackFn, get_algorithm


@dataclass(frozen=True)
class MetaConfig:
    """delta = 2**-delta_exp.  Derived from epsilon as the largest power of 1/2 strictly
    below epsilon/8 unless ``delta_exp`` is given explicitly."""

    epsilon: float | None = 0.5
    delta_exp: int | None = None
    offline: str = "FFD"

    def __post_init__(self):
        if self.delta_exp is None:
            if self.epsilon is None or not self.epsilon > 0:
                raise ValueError("need a positive epsilon or an explicit delta")
            i = 1
            while 2.0**-i >= self.epsilon / 8:
                i += 1
            object.__setattr__(self, "delta_exp", i)
        if self.delta_exp < 1:
            raise ValueError("delta must be 2**-i with i >= 1")
        get_algorithm(self.offline)  # fail early on unknown ids

    @classmethod
    def from_delta(cls, delta: float, offline: str = "FFD") -> "MetaConfig":
        """Round delta in [2**-(i+1), 2**-i) down to 2**-(i+1)."""
        if not 0 < delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        i = 1
        while 2.0**-i > delta:
            i += 1
        return cls(epsilon=None, delta_exp=i, offline=offline)

    @property
    def delta(self) -> float:
        return 2.0**-self.delta_exp

    @property
    def eta(self) -> int:
        """Chunk count 1/delta."""
        return 1 << self.delta_exp

    @property
    def initial_guess(self) -> int:
        """n0 = 1/delta^3."""
        return 1 << (3 * self.delta_exp)

    def is_large(self, size: int) -> bool:
        return size << self.delta_exp >= CAPACITY

    def offline_algorithm(self) -> PackFn:
        return get_algorithm(self.offline)


@dataclass(frozen=True)
class StagePlan:
    n: int
    sizes: tuple[int, ...]

    @property
    def m(self) -> int:
        return len(self.sizes)

    def boundaries(self) -> list[tuple[int, int]]:
        out, start = [], 0
        for s in self.sizes:
            out.append((start, start + s))
            start += s
        return out


def plan_stages(n: int, config: MetaConfig) -> StagePlan:
    """Stage 0 has floor(delta^2 n) items, stage j >= 1 floor(2^(j-1) delta^2 n);
    the last of the m = log2(1/delta^2) + 1 stages absorbs the remainder."""
    two_i = 2 * config.delta_exp
    if n < 1 << two_i:
        raise ValueError(f"n={n} too small: need n >= 1/delta^2 = {1 << two_i}")
    m = two_i + 1
    sizes = [n >> two_i]
    for j in range(1, m - 1):
        sizes.append((n << (j - 1)) >> two_i)
    sizes.append(n - sum(sizes))
    return StagePlan(n, tuple(sizes))


def superstage_sizes(total: int, config: MetaConfig) -> list[int]:
    """Block lengths ImpAlg uses on a stream of ``total`` items."""
    out, seen = [], 0
    while seen < total:
        take = min(_block_length(len(out), config.initial_guess), total - seen)
        out.append(take)
        seen += take
    return out


def _block_length(index: int, n0: int) -> int:
    return n0 if index == 0 else n0 << (index - 1)


# ---------------------------------------------------------------------------
# building blocks


class _Holder:
    """An emitted bin that only comes into existence with its first real item."""

    __slots__ = ("label",)

    def __init__(self):
        self.label = -1


def _place(sink: OnlinePacker, holder: _Holder, item_id: int, size: int) -> int:
    if holder.label < 0:
        holder.label = sink._open(item_id, size)
    else:
        sink._put(holder.label, item_id, size)
    return holder.label


class ProxyState:
    """Large proxies of one offline packing, consumable smallest-first."""

    def __init__(self, proxy_sizes: Sequence[int], config: MetaConfig):
        packing = config.offline_algorithm()(proxy_sizes)
        self.num_bins = len(packing.bins)
        self.holders = [_Holder() for _ in packing.bins]
        self.slot_capacity: list[int] = []
        threshold = -(-CAPACITY >> config.delta_exp)  # smallest large size
        entries = []  # (proxy size, bin, slot within bin)
        for b, ids in enumerate(packing.bins):
            large = [proxy_sizes[i] for i in ids if proxy_sizes[i] >= threshold]
            entries.extend((d, b, slot) for slot, d in enumerate(large))
            self.slot_capacity.append(CAPACITY - sum(large))
        entries.sort()
        # chunks are small, so a plain sorted list beats a balanced structure
        self.remaining_large = entries

    def take(self, size: int) -> int:
        """Consume the smallest proxy >= size; return its bin or -1."""
        k = bisect_left(self.remaining_large, (size, -1, -1))
        if k == len(self.remaining_large):
            return -1
        d, b, _ = self.remaining_large.pop(k)
        assert size <= d, "real item larger than the proxy it replaces"
        return b


class SSlotSet:
    """Next-Fit over a growing list of slots: one forward cursor, never moved back."""

    def __init__(self):
        self.capacity: list[int] = []
        self.used: list[int] = []
        self.holders: list[_Holder] = []
        self.cursor = 0
        self.overflow_slots = 0

    def __len__(self):
        return len(self.capacity)

    def add(self, capacity: int, holder: _Holder) -> None:
        self.capacity.append(capacity)
        self.used.append(0)
        self.holders.append(holder)

    def place(self, size: int) -> _Holder:
        while self.cursor < len(self.capacity):
            c = self.cursor
            if self.used[c] + size <= self.capacity[c]:
                self.used[c] += size
                return self.holders[c]
            self.cursor += 1
        holder = _Holder()
        self.add(CAPACITY, holder)
        self.overflow_slots += 1
        self.cursor = len(self.capacity) - 1
        self.used[self.cursor] = size
        return holder


@dataclass
class Provenance:
    nf_bins: int = 0
    proxy_bins: int = 0
    closed_bins: int = 0
    overflow_bins: int = 0
    chunk_packings: int = 0

    def bound(self) -> int:
        return self.nf_bins + self.proxy_bins + self.closed_bins + self.overflow_bins


class StagePacker:
    """Packs one non-sampling stage against proxy packings of its prefix.

    The prefix is cut into ``chunks`` pieces of floor(|prefix|/chunks) items (the last
    piece takes the remainder).  Chunk p's proxy packing is built when the first item
    of sub-batch p arrives; sub-batch p holds as many items as chunk p and the last
    sub-batch runs to the end of the stage.
    """

    def __init__(self, sink: OnlinePacker, prefix: Sequence[int], config: MetaConfig, chunks: int,
                 sslots: SSlotSet | None, provenance: Provenance):
        self.sink = sink
        self.config = config
        self.provenance = provenance
        self.shared_sslots = sslots
        self.sslots = sslots
        c = len(prefix) // chunks
        self.chunks = [prefix[p * c:(p + 1) * c] for p in range(chunks - 1)]
        self.chunks.append(prefix[(chunks - 1) * c:])
        self.p = -1
        self.quota = 0
        self.proxies: ProxyState | None = None
        self.chunks_built = 0

    def _next_chunk(self):
        self.p += 1
        while self.p < len(self.chunks) - 1 and not self.chunks[self.p]:
            self.p += 1
        chunk = self.chunks[self.p]
        self.quota = len(chunk) if self.p < len(self.chunks) - 1 else math.inf
        self.proxies = ProxyState(chunk, self.config)
        self.chunks_built += 1
        self.provenance.chunk_packings += 1
        self.provenance.proxy_bins += self.proxies.num_bins
        if self.shared_sslots is None:
            self.sslots = SSlotSet()
        for cap, holder in zip(self.proxies.slot_capacity, self.proxies.holders):
            self.sslots.add(cap, holder)

    def accept(self, size: int, item_id: int) -> int:
        if self.quota == 0 or self.proxies is None:
            self._next_chunk()
        self.quota -= 1
        if self.config.is_large(size):
            b = self.proxies.take(size)
            if b < 0:
                self.provenance.closed_bins += 1
                return self.sink._open(item_id, size)
            return _place(self.sink, self.proxies.holders[b], item_id, size)
        before = self.sslots.overflow_slots
        holder = self.sslots.place(size)
        self.provenance.overflow_bins += self.sslots.overflow_slots - before
        return _place(self.sink, holder, item_id, size)


class _AlgRun:
    """One run of the known-n algorithm over a block of ``n`` items, emitting into ``sink``."""

    def __init__(self, sink: OnlinePacker, n: int, config: MetaConfig, chunked: bool,
                 sslots: SSlotSet | None, provenance: Provenance):
        self.sink = sink
        self.config = config
        self.plan = plan_stages(n, config)
        self.bounds = self.plan.boundaries()
        self.chunks = config.eta if chunked else 1
        self.sslots = sslots
        self.provenance = provenance
        self.sizes: list[int] = []
        self.stage = 0
        self.nf_label = -1
        self.next_fit_only: bool | None = None
        self.stage_packer: StagePacker | None = None
        self.stage_packers: list[StagePacker] = []

    def _next_fit(self, size, item_id):
        sink = self.sink
        if self.nf_label >= 0 and sink.loads[self.nf_label] + size <= CAPACITY:
            return sink._put(self.nf_label, item_id, size)
        self.nf_label = sink._open(item_id, size)
        self.provenance.nf_bins += 1
        return self.nf_label

    def _few_large(self) -> bool:
        """|large items in stage 0| <= delta^3 * w(stage 0), exactly."""
        end = self.bounds[0][1]
        sample = self.sizes[:end]
        large = sum(1 for s in sample if self.config.is_large(s))
        return (large * CAPACITY) << (3 * self.config.delta_exp) <= sum(sample)

    def accept(self, size: int, item_id: int) -> int:
        pos = len(self.sizes)
        if pos >= self.plan.n:
            raise ValueError(f"more than n={self.plan.n} items")
        if self.stage == 0 or self.next_fit_only:
            label = self._next_fit(size, item_id)
            self.sizes.append(size)
            if self.stage == 0 and len(self.sizes) == self.bounds[0][1]:
                self.next_fit_only = self._few_large()
                self.stage = 1
            return label
        start, end = self.bounds[self.stage]
        if pos == start:
            self.stage_packer = StagePacker(self.sink, self.sizes[:start], self.config, self.chunks,
                                            self.sslots, self.provenance)
            self.stage_packers.append(self.stage_packer)
        label = self.stage_packer.accept(size, item_id)
        self.sizes.append(size)
        if pos + 1 == end:
            self.stage += 1
            self.stage_packer = None
        return label


class AlgKnownN(OnlinePacker):
    """The known-n algorithm as an online packer; ``finish`` checks the count."""

    def __init__(self, n: int, config: MetaConfig = MetaConfig(), chunked: bool = False):
        super().__init__()
        self.n = n
        self.provenance = Provenance()
        self.run = _AlgRun(self, n, config, chunked, None, self.provenance)

    def accept(self, size, item_id=None):
        item_id = self._take_id(item_id)
        return self.run.accept(size, item_id)

    def finish(self) -> Packing:
        if self._next_id != self.n:
            raise ValueError(f"stream had {self._next_id} items, expected n={self.n}")
        return super().finish()

    @property
    def next_fit_only(self) -> bool | None:
        return self.run.next_fit_only


class ImpAlg(OnlinePacker):
    """Doubling over blocks (super-stages) with chunked stages; n is never needed.

    ``global_sslots=False`` gives every chunk its own S-slot list instead of one
    shared list (kept for comparison runs).
    """

    def __init__(self, config: MetaConfig = MetaConfig(), global_sslots: bool = True):
        super().__init__()
        self.config = config
        self.provenance = Provenance()
        self.sslots = SSlotSet() if global_sslots else None
        self.runs: list[_AlgRun] = []
        self.sizes: list[int] = []
        self._left = 0

    def accept(self, size, item_id=None):
        item_id = self._take_id(item_id)
        self.sizes.append(size)
        if self._left == 0:
            n = _block_length(len(self.runs), self.config.initial_guess)
            self.runs.append(_AlgRun(self, n, self.config, True, self.sslots, self.provenance))
            self._left = n
        self._left -= 1
        return self.runs[-1].accept(size, item_id)

    @property
    def overflow_slots(self) -> int:
        return self.provenance.overflow_bins

    def provenance_bound(self) -> int:
        return self.provenance.bound()

    def small_only_bins(self) -> int:
        """Emitted bins that hold small items only."""
        return sum(1 for b in self.bins if all(not self.config.is_large(self.sizes[i]) for i in b))


def alg_known_n(sizes: Sequence[int], n: int | None = None, config: MetaConfig = MetaConfig()) -> Packing:
    n = len(sizes) if n is None else n
    packer = AlgKnownN(n, config)
    for s in sizes:
        packer.accept(s)
    return packer.finish()


def imp_alg(sizes: Iterable[int], config: MetaConfig = MetaConfig(), global_sslots: bool = True) -> Packing:
    packer = ImpAlg(config, global_sslots)
    for s in sizes:
        packer.accept(s)
    return packer.finish()


@dataclass
class StageResult:
    packing: Packing
    chunk_packings: int
    bins: int = field(init=False)

    def __post_init__(self):
        self.bins = len(self.packing.bins)


def pack_stage_chunked(stage: Sequence[int], prefix: Sequence[int], config: MetaConfig = MetaConfig(),
                       sslots: SSlotSet | None = None) -> StageResult:
    """Pack one stage on its own against chunked proxy packings of ``prefix``."""
    sink = OnlinePacker()
    sp = StagePacker(sink, list(prefix), config, config.eta, sslots, Provenance())
    for s in stage:
        sp.accept(s, sink._take_id(None))
    return StageResult(sink.finish(), sp.chunks_built)
