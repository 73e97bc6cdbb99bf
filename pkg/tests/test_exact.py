import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import brute_force_opt
from stochpack.core import CAPACITY, parse_size, verify_packing
from stochpack.distributions import FiniteDiscrete, random_permutation, sample_sizes
from stochpack.exact import (ExactConfig, InstanceTooLarge, lower_bound, maximal_configurations, opt_exact,
                             opt_value)
from stochpack.heuristics import first_fit_decreasing

THIRD = 333_333_333
QUARTER = CAPACITY // 4


def sz(*xs):
    return [parse_size(str(x)) for x in xs]


def test_lower_bound():
    assert lower_bound(sz(0.6, 0.6, 0.6)) == 3
    assert lower_bound(sz(0.5, 0.5, 0.5)) == 2
    assert lower_bound(sz(0.9, 0.2)) == 2
    assert lower_bound([]) == 0


@pytest.mark.parametrize("sizes,opt", [(sz(0.5, 0.5, 0.5, 0.5), 2), (sz(0.6, 0.6, 0.4, 0.4), 2),
                                       (sz(0.7, 0.7, 0.7), 3), ([], 0), (sz(1), 1)])
def test_opt_examples(sizes, opt):
    res = opt_exact(sizes)
    assert res.bins == opt
    assert verify_packing(sizes, res.packing) == []


def test_opt_needs_search():
    # FFD uses 3 bins here, the optimum is 2: {0.5,0.3,0.2}, {0.4,0.3,0.3}
    s = sz(0.5, 0.4, 0.3, 0.3, 0.3, 0.2)
    assert len(first_fit_decreasing(s)) == 3
    res = opt_exact(s)
    assert res.bins == 2 and verify_packing(s, res.packing) == []


small_inst = st.lists(st.integers(1, 20).map(lambda k: k * CAPACITY // 20), max_size=8)


@given(small_inst)
def test_matches_brute_force(sizes):
    assert opt_value(sizes) == brute_force_opt(sizes)


@given(st.lists(st.integers(1, CAPACITY), max_size=8))
def test_matches_brute_force_fine_grid(sizes):
    assert opt_value(sizes) == brute_force_opt(sizes)


@given(st.lists(st.integers(1, 12).map(lambda k: k * CAPACITY // 12), max_size=20), st.integers(0, 2**32))
def test_sandwich_and_permutation_invariance(sizes, seed):
    res = opt_exact(sizes)
    assert lower_bound(sizes) <= res.bins <= len(first_fit_decreasing(sizes))
    assert verify_packing(sizes, res.packing) == []
    assert opt_value(random_permutation(sizes, seed)) == res.bins


def test_distinct_size_route():
    sizes = [QUARTER] * 300 + [THIRD] * 200
    res = opt_exact(sizes)
    # three thirds per bin (999999999 units) and four quarters per bin
    assert res.bins == 67 + 75
    assert res.method != "bin-completion"
    assert verify_packing(sizes, res.packing) == []


def test_distinct_size_mixed_bins():
    # 0.4 pairs with 0.6; 0.3 fills in threes; one 0.4+0.3+0.3 mix beats pure bins
    sizes = sz(*([0.6] * 7 + [0.4] * 9 + [0.3] * 8))
    assert opt_value(sizes) == 7 + 4
    assert brute_force_opt(sz(0.6, 0.4, 0.4, 0.3, 0.3, 0.3)) == opt_value(sz(0.6, 0.4, 0.4, 0.3, 0.3, 0.3))


def test_large_instance_uses_ip():
    spec = FiniteDiscrete(((QUARTER, 0.6), (THIRD, 0.4)))
    sizes = sample_sizes(spec, 20_000, 7)
    res = opt_exact(sizes)
    q = sizes.count(QUARTER)
    t = len(sizes) - q
    # a bin holds at most 4 quarters, 3 thirds, or 2 quarters + 1 third (0.833...) etc.
    assert res.bins >= lower_bound(sizes)
    assert verify_packing(sizes, res.packing) == []
    assert res.bins <= -(-q // 4) + -(-t // 3)


def test_maximal_configurations():
    configs = maximal_configurations([500_000_000, 300_000_000], [5, 5])
    assert sorted(configs) == [(0, 3), (1, 1), (2, 0)]


def test_too_large():
    sizes = list(range(1000, 1000 + 40))
    with pytest.raises(InstanceTooLarge):
        opt_exact(sizes, ExactConfig(max_items=24, max_distinct=12))
