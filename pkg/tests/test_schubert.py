from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from momega.catalog import generate_all, generate_labelled
from momega.matroid import MatroidError, SizeCapError, direct_sum, uniform
from momega.schubert import (
    CyclicFlatChain,
    SamplingPlan,
    SchubertExpansion,
    SchubertProfile,
    binomial_eulerian,
    chain_lattice,
    count_labelled_schuberts,
    enumerate_profiles,
    eulerian,
    expansion_labelled,
    expansion_symmetrized,
    lambda_closed_form,
    lambda_mobius,
    labelled_chains,
    profile_of_path,
    representative_chain,
    schubert_from_chain,
    schubert_from_path,
    schubert_from_profile,
    verify_indicator_identity,
)

import oracles
from named import PATHS24, M_SAME, N_SAME, T24, U12U12, U24

CLASSES_5 = [e.matroid for n in range(6) for r in range(n + 1) for e in generate_all(r, n)]


def chain(text, n, r):
    return CyclicFlatChain.parse(text, n, r)


def test_chain_lattice_examples():
    assert [str(c) for c in chain_lattice(U24)] == ["-:0|0,1,2,3:2"]
    assert len(chain_lattice(U12U12)) == 3
    assert len(chain_lattice(T24)) == 2


def test_lambda_closed_form_agrees_with_mobius_recursion():
    for m in CLASSES_5:
        chains = chain_lattice(m)
        assert lambda_closed_form(chains) == lambda_mobius(chains)


def test_schubert_from_chain_examples():
    assert schubert_from_chain(chain("-:0|0,1,2,3:2", 4, 2)) == U24
    assert schubert_from_chain(chain("-:0|0,1:1|0,1,2,3:2", 4, 2)).bases == T24.bases
    m = schubert_from_chain(chain("0:0|0,1,2,3:2", 4, 2))
    assert m.loops == 1 and len(m.bases) == 3


def test_schubert_from_chain_rejects_empty_family():
    with pytest.raises(MatroidError, match="empty basis family"):
        schubert_from_chain(chain("0,1,2:0|0,1,2,3:2", 4, 2), check=False)


def test_labelled_expansion_examples():
    e = expansion_labelled(T24)
    assert {str(c): v for c, v in e.coefficients.items()} == {"-:0|0,1:1|0,1,2,3:2": 1}
    e = expansion_labelled(U12U12)
    assert {str(c): v for c, v in e.coefficients.items()} == {
        "-:0|0,1,2,3:2": -1, "-:0|0,1:1|0,1,2,3:2": 1, "-:0|2,3:1|0,1,2,3:2": 1}


def test_loop_lies_in_every_bottom_set():
    m = direct_sum(uniform(0, 1), uniform(2, 4))
    for c in expansion_labelled(m).coefficients:
        assert c.entries[0][0] & 1


def test_symmetrized_expansion_of_two_parallel_pairs():
    e = expansion_symmetrized(U12U12, verify_seed=3)
    assert {str(p): v for p, v in e.coefficients.items()} == {"0:0|2:1|4:2": 2, "0:0|4:2": -1}


def test_nonisomorphic_pair_shares_expansion():
    want = {"0:0|3:2|6:3": 2, "0:0|6:3": -1}
    for m in (M_SAME, N_SAME):
        assert {str(p): v for p, v in expansion_symmetrized(m).coefficients.items()} == want


def test_schubert_matroids_expand_to_their_profile():
    for p in enumerate_profiles(3, 6):
        e = expansion_symmetrized(schubert_from_profile(p))
        assert e.coefficients == {p: 1}


def test_profile_counts():
    assert len(enumerate_profiles(2, 4)) == 6
    assert len(enumerate_profiles(3, 6, min_girth=3)) == 4
    assert len(enumerate_profiles(0, 5)) == 1
    for n in range(0, 9):
        for r in range(n + 1):
            assert len(enumerate_profiles(r, n)) == comb(n, r)


def test_profile_order_is_canonical():
    ps = enumerate_profiles(2, 4)
    assert [str(p) for p in ps] == ["2:0", "0:0|3:1", "0:0|4:2", "1:0|3:1", "1:0|4:2", "0:0|2:1|4:2"]


def test_reference_paths_and_girths():
    ps = [profile_of_path(w) for w in PATHS24]
    assert [str(p) for p in ps] == ["2:0", "1:0|3:1", "1:0|4:2", "0:0|3:1", "0:0|2:1|4:2", "0:0|4:2"]
    assert [p.girth for p in ps] == [1, 1, 1, 2, 2, 3]
    assert [schubert_from_path(w).girth for w in PATHS24] == [1, 1, 1, 2, 2, 3]


def test_every_profile_path_is_its_own_schubert():
    for w in PATHS24:
        m = schubert_from_path(w)
        assert expansion_symmetrized(m).coefficients == {profile_of_path(w): 1}


def test_profile_dual_round_trip():
    for n in range(7):
        for r in range(n + 1):
            for p in enumerate_profiles(r, n):
                assert p.dual().dual() == p
                assert schubert_from_profile(p).dual().cyclic_flats[0].elements.bit_count() == p.dual().signature[0][0]


@pytest.mark.parametrize("m,i", [(m, i) for m in range(1, 9) for i in range(m)])
def test_eulerian_matches_closed_formula(m, i):
    assert eulerian(m, i) == oracles.eulerian_formula(m, i)


def test_labelled_count_formula():
    for n in range(0, 9):
        for r in range(n + 1):
            assert count_labelled_schuberts(r, n) == binomial_eulerian(r, n)


def test_labelled_count_against_brute_force_chain_matroids():
    for n in range(0, 6):
        for r in range(n + 1):
            chains = sum(1 for m in generate_labelled(r, n)
                         if all(a.elements & b.elements == a.elements
                                for a, b in zip(m.cyclic_flats, m.cyclic_flats[1:])))
            assert count_labelled_schuberts(r, n) == chains


def test_labelled_paving_count():
    for n in range(1, 9):
        for r in range(1, n + 1):
            assert count_labelled_schuberts(r, n, min_girth=r) == sum(comb(n, j) for j in range(r, n + 1))


def test_labelled_count_cap():
    assert count_labelled_schuberts(1, 1) == 1
    with pytest.raises(SizeCapError):
        count_labelled_schuberts(3, 13)


def test_labellings_count_matches_enumeration():
    for p in enumerate_profiles(3, 6):
        assert p.labellings() == sum(1 for _ in labelled_chains(p))


def test_indicator_identity_positive_and_negative():
    assert verify_indicator_identity(U12U12, expansion_labelled(U12U12))
    wrong = SchubertExpansion("labelled", 4, 2, {representative_chain(SchubertProfile(4, 2, ((0, 0), (4, 2)))): 2})
    res = verify_indicator_identity(U24, wrong)
    assert not res and res.witness is not None


def test_indicator_identity_detects_a_perturbed_coefficient():
    e = expansion_labelled(U12U12)
    c = next(c for c in e.coefficients if len(c.entries) == 3)
    uni = representative_chain(SchubertProfile(4, 2, ((0, 0), (4, 2))))
    bad = dict(e.coefficients)
    bad[c] += 1
    bad[uni] -= 1
    assert not verify_indicator_identity(U12U12, SchubertExpansion("labelled", 4, 2, bad), SamplingPlan(seed=1))


def test_profile_text_round_trip():
    p = SchubertProfile.parse("0:0|2:1|4:2", 4, 2)
    assert str(p) == "0:0|2:1|4:2" and p.girth == 2
    c = chain("-:0|0,1:1|0,1,2,3:2", 4, 2)
    assert c.is_valid() and str(c.profile) == "0:0|2:1|4:2"
    assert not chain("-:0|0,1:1|0,1,2:2", 4, 2).is_valid()


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([m for m in CLASSES_5 if m.n >= 1]), st.permutations(range(5)))
def test_symmetrized_expansion_is_relabelling_invariant(m, perm):
    perm = [p for p in perm if p < m.n] if m.n <= 5 else perm
    assert expansion_symmetrized(m.relabel(perm)).coefficients == expansion_symmetrized(m).coefficients


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(CLASSES_5))
def test_coefficients_sum_to_one(m):
    assert expansion_labelled(m).total() == 1
