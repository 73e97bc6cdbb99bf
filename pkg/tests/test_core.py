import pytest
from hypothesis import given
from hypothesis import strategies as st

from stochpack.core import (CAPACITY, Instance, Packing, SizeError, classify_large, format_size,
                            parse_size, read_instance, total_weight, verify_packing, write_instance)


def sz(*xs):
    return [parse_size(str(x)) for x in xs]


@pytest.mark.parametrize("text,units", [("0.5", 500_000_000), ("1", 1_000_000_000), ("1.0", CAPACITY),
                                        ("0.000000001", 1), (".25", 250_000_000), (" 0.3 ", 300_000_000)])
def test_parse_size(text, units):
    assert parse_size(text) == units


@pytest.mark.parametrize("text", ["0.3333333333", "0", "0.0", "1.000000001", "2", "-0.5", "abc", "", "0.5.1", "1e-3"])
def test_parse_size_rejects(text):
    with pytest.raises(SizeError):
        parse_size(text)


@given(st.integers(1, CAPACITY))
def test_format_parse_roundtrip(units):
    assert parse_size(format_size(units)) == units


def test_verify_ok():
    sizes = sz(0.6, 0.3, 0.7)
    assert verify_packing(sizes, Packing.from_bins([[0, 1], [2]], sizes)) == []


def test_verify_overload():
    sizes = sz(0.6, 0.5)
    problems = verify_packing(sizes, Packing([[0, 1]], 2))
    assert len(problems) == 1 and "load" in problems[0]


def test_verify_duplicate_and_missing():
    sizes = sz(0.1, 0.2, 0.3)
    problems = verify_packing(sizes, Packing([[0, 2], [2]], 3))
    assert any("2" in p and "dup" in p.lower() for p in problems)
    assert any("1" in p and "missing" in p.lower() for p in problems)


def test_verify_empty_bin():
    sizes = sz(0.1)
    assert verify_packing(sizes, Packing([[0], []], 1))


def test_total_weight():
    assert total_weight(sz(0.5, 0.5)) == CAPACITY
    assert total_weight([]) == 0
    assert total_weight(sz(0.3, 0.3, 0.3)) == parse_size("0.9")


def test_classify_large():
    large, small = classify_large(sz(0.05, 0.5, 0.1), parse_size("0.1"))
    assert large == [1, 2] and small == [0]
    large, _ = classify_large(sz(0.01, 0.02), parse_size("0.1"))
    assert large == []
    assert classify_large(sz(0.5), parse_size("0.5"))[0] == [0]


def test_instance_validates():
    with pytest.raises(ValueError):
        Instance((0,))
    with pytest.raises(ValueError):
        Instance((CAPACITY + 1,))
    inst = Instance.from_decimals(["0.5", "0.25"])
    assert inst.n == 2 and [it.id for it in inst.items] == [0, 1]


def test_instance_file_roundtrip(tmp_path):
    path = tmp_path / "inst.txt"
    path.write_text("# header\n0.5\n\n0.25  # trailing\n1\n")
    inst = read_instance(path)
    assert inst.sizes == (500_000_000, 250_000_000, CAPACITY)
    write_instance(tmp_path / "out.txt", inst.sizes)
    assert read_instance(tmp_path / "out.txt") == inst


def test_packing_json_roundtrip():
    sizes = sz(0.4, 0.6, 0.7)
    p = Packing.from_bins([[0, 1], [2]], sizes)
    q = Packing.from_json(p.to_json(), sizes)
    assert q.bins == p.bins and q.loads == [CAPACITY, parse_size("0.7")]
    with pytest.raises(ValueError):
        Packing.from_json(p.to_json(), sizes[:2])


@given(st.lists(st.integers(1, CAPACITY), max_size=30))
def test_weight_bounds_bins(sizes):
    bins = [[i] for i in range(len(sizes))]
    p = Packing.from_bins(bins, sizes)
    assert verify_packing(sizes, p) == []
    assert total_weight(sizes) <= CAPACITY * len(p)
