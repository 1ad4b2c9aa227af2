from itertools import combinations

from hypothesis import given, strategies as st

from momega import bitset


def test_ksubsets_are_revlex():
    subs = bitset.ksubsets(5, 2)
    assert len(subs) == 10
    for s, t in zip(subs, subs[1:]):
        assert max(bitset.elements(s ^ t)) in bitset.elements(t)


def test_fmt_and_parse_round_trip():
    assert bitset.fmt(0) == "-"
    assert bitset.parse("-") == 0
    assert bitset.fmt(0b1101) == "0,2,3"
    assert bitset.parse("0,2,3") == 0b1101


def test_popcounts():
    pc = bitset.popcounts(6)
    assert all(pc[s] == bin(s).count("1") for s in range(64))


@given(st.sets(st.integers(0, 9)), st.permutations(list(range(10))))
def test_permute_preserves_size_and_inverts(els, perm):
    m = bitset.mask(els)
    img = bitset.permute(m, perm)
    assert img.bit_count() == m.bit_count()
    inv = [0] * 10
    for i, p in enumerate(perm):
        inv[p] = i
    assert bitset.permute(img, inv) == m


def test_ksubsets_count():
    from math import comb

    for n in range(7):
        for k in range(n + 1):
            assert len(bitset.ksubsets(n, k)) == comb(n, k)
            assert set(bitset.ksubsets(n, k)) == {bitset.mask(c) for c in combinations(range(n), k)}
