from fractions import Fraction as F
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from momega.analysis import instance_for
from momega.geometry import (
    GeometryError,
    affine_dim,
    affine_relations,
    enumerate_lattice_points,
    facial_test,
    in_hull,
    is_vertex,
    matrix_rank,
    qstr,
    supported_set,
)
from momega.matroid import canonical_key

import oracles
from named import T24, U12U12, U24

INST24 = instance_for(2, 4)
CLOUD24 = INST24.points


def pid(m):
    return INST24.point_of[canonical_key(m)]


def test_qstr():
    assert qstr(F(1, 2)) == "1/2" and qstr(3) == "3" and qstr(F(-4, 2)) == "-2"


def test_affine_dim_examples():
    assert affine_dim([(1, 2)]) == 0
    assert affine_dim([(1, 2), (3, 4)]) == 1
    assert affine_dim(CLOUD24) == 5


def test_affine_relations_of_the_cloud():
    rels = affine_relations(CLOUD24)
    assert len(rels) == len(CLOUD24[0]) - affine_dim(CLOUD24)
    for a, b in rels:
        assert all(sum(x * y for x, y in zip(a, p)) == b for p in CLOUD24)


def test_matrix_rank():
    assert matrix_rank([[1, 2], [2, 4]]) == 1
    assert matrix_rank([[0, 0]]) == 0


def test_minimal_matroid_is_midpoint():
    cert = is_vertex(pid(T24), CLOUD24)
    assert cert.status == "interior"
    assert cert.weights == {pid(U24): F(1, 2), pid(U12U12): F(1, 2)}


def test_uniform_and_the_rest_are_vertices():
    for i in range(len(CLOUD24)):
        cert = is_vertex(i, CLOUD24)
        assert cert.verify(CLOUD24)
        assert (cert.status == "vertex") == (i != pid(T24))


def test_vertex_errors_and_singleton():
    assert is_vertex(0, [(1, 0)]).status == "vertex"
    with pytest.raises(GeometryError):
        is_vertex(5, [(1, 0)])
    with pytest.raises(GeometryError):
        is_vertex(0, [])


def test_disconnected_family_is_facial():
    disc = [INST24.point_of[k] for k, m in INST24.classes.items() if not m.is_connected]
    res = facial_test(CLOUD24, disc)
    assert res.facial and res.epsilon > 0
    assert supported_set(CLOUD24, res.c, res.d) == sorted(disc)


def test_connected_family_is_not_facial():
    conn = [INST24.point_of[k] for k, m in INST24.classes.items() if m.is_connected]
    res = facial_test(CLOUD24, conn)
    assert not res.facial and res.counterexample == pid(U12U12)


def test_full_cloud_is_a_face():
    res = facial_test(CLOUD24, range(len(CLOUD24)))
    assert res.facial and all(v == 0 for v in res.c) and res.d == 0


def test_facial_test_errors():
    with pytest.raises(GeometryError):
        facial_test(CLOUD24, [])
    with pytest.raises(GeometryError):
        facial_test(CLOUD24, [99])


def test_lattice_points_of_the_24_cloud_are_the_matroid_points():
    pts = enumerate_lattice_points(CLOUD24)
    assert pts == sorted(CLOUD24)
    assert pts == oracles.box_lattice_points(CLOUD24, lambda x: in_hull(CLOUD24, x))


def test_lattice_points_singleton_and_errors():
    assert enumerate_lattice_points([(2, -1)]) == [(2, -1)]
    with pytest.raises(GeometryError):
        enumerate_lattice_points([(F(1, 2), 0)])


pts2 = st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3)), min_size=1, max_size=6)


@settings(max_examples=60, deadline=None)
@given(pts2)
def test_lattice_enumeration_matches_box_oracle(cloud):
    got = enumerate_lattice_points(cloud)
    assert got == oracles.box_lattice_points(cloud, lambda x: in_hull(cloud, x))


@settings(max_examples=60, deadline=None)
@given(pts2)
def test_vertex_certificates_verify(cloud):
    cloud = sorted(set(cloud))
    for i in range(len(cloud)):
        assert is_vertex(i, cloud).verify(cloud)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2)), min_size=2, max_size=7, unique=True),
       st.data())
def test_facial_results_are_consistent(cloud, data):
    k = data.draw(st.integers(1, len(cloud)))
    subset = sorted(data.draw(st.sampled_from(list(combinations(range(len(cloud)), k)))))
    res = facial_test(cloud, subset)
    if res.facial:
        assert supported_set(cloud, res.c, res.d) == subset or len(subset) == len(cloud)
    else:
        assert res.counterexample not in subset
