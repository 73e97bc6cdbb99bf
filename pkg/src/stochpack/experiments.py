"""Monte-Carlo estimates of expected competitive ratio (i.i.d. sizes) and
random-order ratio, plus the structural statistics used for Best-Fit on
items in (1/4, 1/2]: S-triplets, k-bin censuses and the 2-bin fraction mu.
"""

from __future__ import annotations

import csv
import math
import statistics
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import CAPACITY, Packing
from .distributions import (DistributionSpec, derive_seed, permutations_batch,
                            random_permutation, sample_sizes)
from .exact import ExactConfig, ExactError, lower_bound, opt_exact
from .heuristics import PackFn, best_fit, get_algorithm
from .iid_meta import MetaConfig, alg_known_n, imp_alg
from .matching import (lm_instance, mbf_as_matching, modified_best_fit, upright_match_greedy)


def resolve_algorithm(name: str, meta: MetaConfig | None = None) -> PackFn:
    """Heuristic ids plus MBF, META/IMP_ALG (unknown n) and ALG_KNOWN_N."""
    key = name.strip().upper()
    meta = meta or MetaConfig()
    if key == "MBF":
        return modified_best_fit
    if key in ("META", "IMP_ALG", "IMPALG"):
        return lambda sizes: imp_alg(sizes, meta)
    if key in ("ALG_KNOWN_N", "ALG"):
        return lambda sizes: alg_known_n(sizes, len(sizes), meta)
    return get_algorithm(name)


# ---------------------------------------------------------------------------
# ratio estimation


@dataclass
class TrialStats:
    algo_bins: list[int] = field(default_factory=list)
    denom_bins: list[int] = field(default_factory=list)
    denom_kind: list[str] = field(default_factory=list)  # "opt" or "lower_bound"
    k_bin_census: Counter = field(default_factory=Counter)
    extra: dict[str, list] = field(default_factory=dict)

    @property
    def trials(self) -> int:
        return len(self.algo_bins)

    @property
    def ratios(self) -> list[float]:
        return [a / d if d else 1.0 for a, d in zip(self.algo_bins, self.denom_bins)]

    @property
    def ratio_of_means(self) -> float:
        total = sum(self.denom_bins)
        return sum(self.algo_bins) / total if total else 1.0

    @property
    def mean_ratio(self) -> float:
        return statistics.fmean(self.ratios) if self.ratios else 1.0

    @property
    def std(self) -> float:
        return statistics.pstdev(self.ratios) if len(self.ratios) > 1 else 0.0

    @property
    def exact_denominator(self) -> bool:
        return all(k == "opt" for k in self.denom_kind)

    def add(self, algo: int, denom: int, kind: str, packing: Packing | None = None, **extra):
        self.algo_bins.append(algo)
        self.denom_bins.append(denom)
        self.denom_kind.append(kind)
        if packing is not None:
            self.k_bin_census.update(k_bin_census(packing))
        # keep columns aligned when a key shows up in only some trials
        for key in [*self.extra, *(k for k in extra if k not in self.extra)]:
            column = self.extra.setdefault(key, [""] * (self.trials - 1))
            column.append(extra.get(key, ""))

    @property
    def triplet_count(self) -> list[int]:
        return self.extra.get("triplets", [])

    @property
    def mu(self) -> list[float]:
        return [m for m in self.extra.get("mu", []) if m != ""]

    def rows(self) -> list[dict]:
        out = []
        for t in range(self.trials):
            row = {
                "trial": t,
                "algo_bins": self.algo_bins[t],
                "denom_bins": self.denom_bins[t],
                "denom_kind": self.denom_kind[t],
                "ratio": self.ratios[t],
            }
            for key, values in self.extra.items():
                row[key] = values[t]
            out.append(row)
        return out

    def write_csv(self, path) -> None:
        rows = self.rows()
        fields = ["trial", "algo_bins", "denom_bins", "denom_kind", "ratio", *self.extra]
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=fields)
            writer.writeheader()
            writer.writerows(rows)

    def summary(self) -> str:
        kind = "opt" if self.exact_denominator else "lower_bound"
        return (f"trials={self.trials} ratio_of_means={self.ratio_of_means:.6f} "
                f"mean_ratio={self.mean_ratio:.6f} std={self.std:.6f} denominator={kind}")


def denominator(sizes: Sequence[int], config: ExactConfig = ExactConfig()) -> tuple[int, str, Packing | None]:
    """Exact optimum when the oracle can certify one, else the lower bound."""
    fits = len(sizes) <= config.max_items or len(set(sizes)) <= config.max_distinct
    if fits:
        try:
            res = opt_exact(sizes, config)
            return res.bins, "opt", res.packing
        except ExactError:
            pass
    return lower_bound(sizes), "lower_bound", None


def estimate_ecr(spec: DistributionSpec, algorithm: PackFn, n: int, trials: int, seed: int,
                 config: ExactConfig = ExactConfig()) -> TrialStats:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    stats = TrialStats()
    for t in range(trials):
        sizes = sample_sizes(spec, n, derive_seed(seed, t))
        packing = algorithm(sizes)
        denom, kind, opt = denominator(sizes, config)
        stats.add(len(packing.bins), denom, kind, packing, **_structure(sizes, packing, opt))
    return stats


def estimate_arr(sizes: Sequence[int], algorithm: PackFn, trials: int, seed: int,
                 config: ExactConfig = ExactConfig()) -> TrialStats:
    denom, kind, opt = denominator(sizes, config)
    stats = TrialStats()
    for t in range(trials):
        order = random_permutation(sizes, derive_seed(seed, t))
        packing = algorithm(order)
        stats.add(len(packing.bins), denom, kind, packing, **_structure(order, packing, opt))
    return stats


def _structure(order: Sequence[int], packing: Packing, opt: Packing | None) -> dict:
    """x3/triplets/mu columns, only for instances inside (1/4, 1/2]."""
    if not order or not all(4 * s > CAPACITY and 2 * s <= CAPACITY for s in order):
        return {}
    return {
        "x3": sum(1 for b in packing.bins if len(b) == 3),
        "triplets": count_triplets_in_labels([is_small(s) for s in order]),
        "mu": mu_fraction(opt) if opt is not None else "",
    }


# ---------------------------------------------------------------------------
# (1/4, 1/2] structure


def is_small(size: int) -> bool:
    """Size in (1/4, 1/3]."""
    return 4 * size > CAPACITY and 3 * size <= CAPACITY


def is_medium(size: int) -> bool:
    """Size in (1/3, 1/2]."""
    return 3 * size > CAPACITY and 2 * size <= CAPACITY


def _check_three_partition(sizes: Sequence[int]) -> None:
    for i, s in enumerate(sizes):
        if not (4 * s > CAPACITY and 2 * s <= CAPACITY):
            raise ValueError(f"item {i} of size {s} outside (1/4, 1/2]")


def count_triplets_in_labels(small: Sequence[bool]) -> int:
    """Maximum number of disjoint runs of three consecutive True labels."""
    count = run = 0
    for flag in small:
        run = run + 1 if flag else 0
        if run == 3:
            count += 1
            run = 0
    return count


def count_s_triplets(sizes: Sequence[int]) -> int:
    _check_three_partition(sizes)
    return count_triplets_in_labels([is_small(s) for s in sizes])


def triplet_positions(small: Sequence[bool]) -> list[int]:
    """Start positions of the disjoint triplets the greedy scan picks."""
    starts = []
    run = 0
    for i, flag in enumerate(small):
        run = run + 1 if flag else 0
        if run == 3:
            starts.append(i - 2)
            run = 0
    return starts


def k_bin_census(packing: Packing) -> Counter:
    return Counter(len(b) for b in packing.bins)


def mu_fraction(opt_packing: Packing) -> float:
    """Fraction of 2-bins in an optimal packing."""
    if not opt_packing.bins:
        return 0.0
    return sum(1 for b in opt_packing.bins if len(b) == 2) / len(opt_packing.bins)


@dataclass
class TripletCheck:
    ok: bool
    triplets: int  # X_sigma
    three_bins: int  # X_3
    bins: int
    ss_bins: int
    counterexample: str | None = None


def triplet_claim_check(sizes: Sequence[int], seed: int) -> TripletCheck:
    """Best-Fit on a seeded random order: each disjoint S-triplet must have a member
    in a 3-bin or in an SS-bin, and #3-bins >= #triplets/3 - 1."""
    _check_three_partition(sizes)
    order = random_permutation(sizes, seed)
    small = [is_small(s) for s in order]
    packing = best_fit(order)
    where = packing.assignment()
    counts = [len(b) for b in packing.bins]
    ss = [len(b) == 2 and all(small[i] for i in b) for b in packing.bins]
    starts = triplet_positions(small)
    x3 = sum(1 for c in counts if c == 3)
    problem = None
    for p in starts:
        if not any(counts[where[i]] == 3 or ss[where[i]] for i in (p, p + 1, p + 2)):
            problem = f"triplet at positions {p}..{p + 2} has no member in a 3-bin or SS-bin"
            break
    if problem is None and 3 * x3 < len(starts) - 3:
        problem = f"X3={x3} < X_sigma/3 - 1 with X_sigma={len(starts)}"
    return TripletCheck(problem is None, len(starts), x3, len(packing.bins), sum(ss), problem)


def triplet_formula(n: int, m: int) -> float:
    """floor(m/3) * m(m-1) / (n(n-1)): expected number of the floor(m/3) fixed
    triplets of small items that stay consecutive under a random order."""
    if n < 2:
        return 0.0
    return (m // 3) * m * (m - 1) / (n * (n - 1))


@dataclass
class TripletExpectation:
    mean: float
    se: float
    formula: float
    trials: int

    @property
    def ok(self) -> bool:
        return self.mean >= self.formula - 3 * self.se


def triplet_counts_batch(n: int, m: int, trials: int, seed: int) -> np.ndarray:
    """Disjoint S-triplet counts of ``trials`` random orders of m small + (n-m) medium items."""
    if not 0 <= m <= n:
        raise ValueError("need 0 <= m <= n")
    perms = permutations_batch(n, seed, trials)
    small = perms < m
    count = np.zeros(trials, dtype=np.int64)
    run = np.zeros(trials, dtype=np.int64)
    for col in range(n):
        run = np.where(small[:, col], run + 1, 0)
        hit = run == 3
        count += hit
        run[hit] = 0
    return count


def triplet_expectation_check(n: int, m: int, trials: int, seed: int) -> TripletExpectation:
    counts = triplet_counts_batch(n, m, trials, seed)
    mean = float(counts.mean())
    se = float(counts.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return TripletExpectation(mean, se, triplet_formula(n, m), trials)


def three_partition_bound(mu: float) -> float:
    """min(3/2 - mu/2, 3/2 - (1-mu)^3/162)."""
    return min(1.5 - mu / 2, 1.5 - (1 - mu) ** 3 / 162)


def worst_mu(tol: float = 1e-12) -> float:
    """Root of 81 mu = (1 - mu)^3 on [0, 0.05] by bisection."""
    lo, hi = 0.0, 0.05
    f = lambda mu: 81 * mu - (1 - mu) ** 3
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def bf_three_bin_identity(n: int, packing: Packing) -> bool:
    """BF(I) <= (n - X3)/2 + 1, checked as 2*BF <= n - X3 + 2."""
    x3 = sum(1 for b in packing.bins if len(b) == 3)
    return 2 * len(packing.bins) <= n - x3 + 2


# ---------------------------------------------------------------------------
# items larger than 1/3


@dataclass
class LMTrials:
    k: int
    bf_bins: list[int]
    mbf_bins: list[int]
    unmatched: list[int]

    @property
    def mean_bf_ratio(self) -> float:
        return statistics.fmean(self.bf_bins) / self.k

    @property
    def mean_unmatched(self) -> float:
        return statistics.fmean(self.unmatched)


def lm_random_order(k: int, trials: int, seed: int) -> LMTrials:
    """k large/medium pairs (Opt = k) in ``trials`` random orders: Best-Fit bins,
    Modified Best-Fit bins and the unmatched count U(P) of the matching reduction."""
    inst = lm_instance(k, seed)
    bf, mbf, unmatched = [], [], []
    for t in range(trials):
        order = random_permutation(inst.sizes, derive_seed(seed, t + 1))
        bf.append(len(best_fit(order)))
        mbf.append(len(modified_best_fit(order)))
        unmatched.append(upright_match_greedy(mbf_as_matching(order)).unmatched)
    return LMTrials(k, bf, mbf, unmatched)


def lm_upright_unmatched(k: int, trials: int, seed: int) -> list[int]:
    """U(P) for the permuted-time point sets built from k large/medium pairs."""
    from .matching import lm_point_set

    out = []
    for t in range(trials):
        inst = lm_instance(k, derive_seed(seed, 2 * t))
        plus = [CAPACITY - x for x in inst.large]
        pts = lm_point_set(plus, inst.medium, derive_seed(seed, 2 * t + 1))
        out.append(upright_match_greedy(pts).unmatched)
    return out
