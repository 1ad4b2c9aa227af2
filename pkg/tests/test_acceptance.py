"""Acceptance gate: one PASS/FAIL line per criterion, printed in the terminal summary.

Each test asserts exact values and a wall-clock limit.
"""

import io
import json
import time
from fractions import Fraction
from math import comb

import pytest

from momega.analysis import (
    build_instance,
    direct_sum_extremality_check,
    extremality_report,
    face_family_report,
    instance_for,
    maximize_sequence,
    non_matroid_lattice_points,
    thickening_sequence,
    tutte_projection_dim,
)
from momega.catalog import (
    complete_graph_edges,
    cyclic_square,
    generate_all,
    generate_rank3,
    graphic_matroid,
    ingest_revlex,
    latin_square_matroid,
    s3_square,
    thickening2,
    write_revlex,
)
from momega.geometry import is_vertex, matrix_rank
from momega.matroid import canonical_key, classify, invariant_vector, uniform
from momega.properties import check_matroid
from momega.schubert import (
    SamplingPlan,
    count_labelled_schuberts,
    expansion_symmetrized,
    profile_of_path,
    schubert_from_profile,
)

import oracles
from named import PATHS24, LATTICE_EXTRAS_36, M_SAME, N_SAME, T24, U12U12, U24


class Clock:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.t0


def sym(m):
    return {str(p): v for p, v in expansion_symmetrized(m).coefficients.items()}


# The (2,4) reference matrix in path order: one row per Schubert lattice path, columns are the six
# Schubert matroids (same order) followed by the two disjoint parallel pairs.
REF24_MATRIX = [
    [1, 0, 0, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0, 0],
    [0, 0, 1, 0, 0, 0, 0],
    [0, 0, 0, 1, 0, 0, 0],
    [0, 0, 0, 0, 1, 0, 2],
    [0, 0, 0, 0, 0, 1, -1],
]


def test_criterion_1_expansion_and_matrix(record):
    with Clock() as clk:
        got = sym(U12U12)
        exact = got == {"0:0|2:1|4:2": 2, "0:0|4:2": -1}
        inst = instance_for(2, 4)
        canon = [str(p) for p in inst.coords]
        paths = [str(profile_of_path(w)) for w in PATHS24]
        perm = [canon.index(p) for p in paths]  # path row i is canonical coordinate perm[i]
        cols = [schubert_from_profile(profile_of_path(w)) for w in PATHS24] + [U12U12]
        ours = [[inst.points[inst.point_of[canonical_key(m)]][perm[i]] for m in cols] for i in range(6)]
        matrix_ok = ours == REF24_MATRIX and sorted(perm) == list(range(6)) and len(inst.points) == 7
    ok = exact and matrix_ok and clk.seconds < 1
    record(1, ok, f"expansion {got}; path->canonical permutation {perm}; matrix match {matrix_ok}; {clk.seconds:.2f}s")
    assert ok


def test_criterion_2_nonisomorphic_same_point(record):
    with Clock() as clk:
        km, kn = canonical_key(M_SAME), canonical_key(N_SAME)
        pm, pn = sym(M_SAME), sym(N_SAME)
    want = {"0:0|3:2|6:3": 2, "0:0|6:3": -1}
    ok = km != kn and pm == pn == want and clk.seconds < 1
    record(2, ok, f"keys differ {km != kn}; points {pm} / {pn}; {clk.seconds:.2f}s")
    assert ok


TABLE_BUILTIN = {**{(1, n): n for n in range(1, 7)}, (2, 4): 6, (2, 5): 11, (2, 6): 17, (3, 6): 28}


def test_criterion_3_table_builtin(record):
    got = {}
    with Clock() as clk:
        for (r, n) in TABLE_BUILTIN:
            rep = extremality_report(instance_for(r, n))
            got[(r, n)] = (rep.vertex_count, rep.extremal_class_count)
    ok = all(got[c] == (v, v) for c, v in TABLE_BUILTIN.items()) and clk.seconds < 300
    record(3, ok, "built-in cells " + ", ".join(f"{c}={v}/{e}" for c, (v, e) in sorted(got.items()))
           + f"; {clk.seconds:.1f}s")
    assert ok


@pytest.mark.slow
@pytest.mark.parametrize("n,want", [(7, (64, 64)), (8, (145, 148))])
def test_criterion_3_table_ingested_census(record, n, want):
    with Clock() as clk:
        text = write_revlex(generate_rank3(n), n, 3)
        classes = ingest_revlex(io.StringIO(text))
        rep = extremality_report(build_instance(classes))
        got = (rep.vertex_count, rep.extremal_class_count)
    ok = got == want and clk.seconds < 7200
    record(3, ok, f"stretch (3,{n}) from an ingested census of {len(classes)} classes: "
                  f"{got[0]} vertices / {got[1]} extremal classes; {clk.seconds:.1f}s")
    assert ok


def test_criterion_4_lattice_points(record):
    with Clock() as clk:
        inst = instance_for(3, 6)
        extras, search = non_matroid_lattice_points(inst)
    got = sorted(json.dumps(e.expansion, sort_keys=True) for e in extras)
    want = sorted(json.dumps(e, sort_keys=True) for e in LATTICE_EXTRAS_36)
    ok = got == want and clk.seconds < 3600
    record(4, ok, f"{len(extras)} non-matroid lattice points ({search.nodes} search nodes, {search.lps} LPs), "
                  f"match p1..p5 {got == want}; {clk.seconds:.1f}s")
    assert ok


def test_criterion_5_face_dimensions(record):
    r, n = 3, 6
    want = {"paving": n - r, "sparsePaving": 1, "elementarySplit": r * (n - r),
            "girth:2": comb(n - 1, r - 1) - 1, "girth:3": comb(n - 2, r - 2) - 1}
    got, strict = {}, True
    with Clock() as clk:
        inst = instance_for(r, n)
        for fam in want:
            rep = face_family_report(inst, fam)
            got[fam] = rep.dim
            res = rep.result
            vals = [sum(a * b for a, b in zip(res.c, p)) for p in inst.points] if rep.facial else []
            strict &= rep.facial and not rep.mixed and res.epsilon > 0 and all(
                (v == res.d) == (i in rep.members) and v <= res.d for i, v in enumerate(vals))
    ok = got == want and strict and clk.seconds < 600
    record(5, ok, f"dims {got} (expected {want}); strict functionals verified {strict}; {clk.seconds:.1f}s")
    assert ok


def test_criterion_6_property_suites(record):
    fails, count = {}, 0
    assert SamplingPlan().seed == 0 and SamplingPlan().random_points == 100
    with Clock() as clk:
        for n in range(7):
            for r in range(n + 1):
                for e in generate_all(r, n):
                    count += 1
                    for name, msgs in check_matroid(e.matroid, seed=0).items():
                        if msgs:
                            fails.setdefault(name, []).append(e.key)
    ok = count == 168 and not fails and clk.seconds < 900
    record(6, ok, f"{count} classes x 8 suites, failures {fails or 0}; {clk.seconds:.1f}s")
    assert ok


def test_criterion_7_labelled_counts(record):
    bad = []
    with Clock() as clk:
        for n in range(9):
            for r in range(n + 1):
                want = sum(comb(n, r + j) * oracles.eulerian_formula(r + j, j) for j in range(n - r + 1))
                if count_labelled_schuberts(r, n) != want:
                    bad.append(("all", r, n))
                if r >= 1 and count_labelled_schuberts(r, n, min_girth=r) != sum(comb(n, j) for j in range(r, n + 1)):
                    bad.append(("paving", r, n))
    ok = not bad and clk.seconds < 60
    record(7, ok, f"labelled Schubert and paving counts for r <= n <= 8, mismatches {bad or 0}; {clk.seconds:.1f}s")
    assert ok


def test_criterion_8_vertex_certificates(record):
    with Clock() as clk:
        inst = instance_for(2, 4)
        pid = lambda m: inst.point_of[canonical_key(m)]
        cert = is_vertex(pid(T24), inst.points)
        interior = cert.status == "interior" and cert.weights == {pid(U24): Fraction(1, 2), pid(U12U12): Fraction(1, 2)}
        uniform_ok = []
        for n in range(1, 7):
            for r in range(n + 1):
                ci = instance_for(r, n)
                c = is_vertex(ci.point_of[canonical_key(uniform(r, n))], ci.points)
                uniform_ok.append(c.status == "vertex" and c.verify(ci.points))
        labelled = {}
        for n in range(1, 6):
            for r in range(n + 1):
                li = instance_for(r, n, labelled=True)
                rep = extremality_report(li)
                labelled[(r, n)] = rep.vertex_count == len(li.points) == len(li.classes)
    ok = interior and all(uniform_ok) and all(labelled.values()) and clk.seconds < 600
    record(8, ok, f"T24 interior with weights 1/2, 1/2 {interior}; uniform vertices {sum(uniform_ok)}/{len(uniform_ok)}; "
                  f"labelled all-vertex cells {sum(labelled.values())}/{len(labelled)}; {clk.seconds:.1f}s")
    assert ok


def test_criterion_9_latin_squares(record):
    want = {"0:0|7:2|19:3": 3, "0:0|3:2|19:3": 36, "0:0|19:3": -38}
    details = []
    with Clock() as clk:
        points = []
        for sq in (cyclic_square(), s3_square()):
            m = latin_square_matroid(sq)
            c = classify(m)
            lines = [f.elements.bit_count() for f in m.flats if f.rank == 2 and f.elements.bit_count() > 2]
            e = expansion_symmetrized(m)
            points.append(sym(m))
            details.append(m.r == 3 and c.simple and c.paving and lines.count(7) == 3 and lines.count(3) == 36
                           and len(lines) == 39 and e.total() == 1)
    ok = all(details) and points[0] == points[1] == want and clk.seconds < 60
    record(9, ok, f"structure ok {details}; expansion {points[0]}; identical {points[0] == points[1]}; {clk.seconds:.1f}s")
    assert ok


def test_criterion_10_tutte_projection(record):
    out = {}
    with Clock() as clk:
        for r, n in ((2, 4), (3, 6)):
            inst = instance_for(r, n)
            tp = tutte_projection_dim(inst)
            imgs = [[v for row in invariant_vector(m).tutte for v in row] for m in inst.classes.values()]
            width = max(len(v) for v in imgs)
            linear = matrix_rank([v + [0] * (width - len(v)) for v in imgs])
            # affine dim d with linear rank d + 1: one affine hyperplane off the origin holds every image
            out[(r, n)] = (tp.dim, linear, tp.evaluation_relation_holds)
    ok = all(d == r * (n - r) and lin == d + 1 and rel for (r, n), (d, lin, rel) in out.items()) and clk.seconds < 300
    record(10, ok, "(r,n): (affine dim, linear rank, T(2,2)=2^n on all) " + str(out) + f"; {clk.seconds:.1f}s")
    assert ok


def test_criterion_11_extremality_findings(record):
    with Clock() as clk:
        a = maximize_sequence(instance_for(2, 4), ["max:bases_count"]).survivors == [canonical_key(U24)]
        b = maximize_sequence(instance_for(2, 6), thickening_sequence(2, 6)).survivors == [
            canonical_key(thickening2(2, 3))]
        ds = direct_sum_extremality_check(6)
        inst = instance_for(3, 6)
        k4 = is_vertex(inst.point_of[canonical_key(graphic_matroid(complete_graph_edges(4)))], inst.points)
    ok = a and b and ds["ok"] and not ds["theoremViolations"] and not ds["converseViolations"] \
        and k4.status == "vertex" and clk.seconds < 900
    record(11, ok, f"max bases -> uniform {a}; thickening sequence {b}; direct sums checked {ds['checked']} "
                   f"with {len(ds['theoremViolations'])}+{len(ds['converseViolations'])} violations; "
                   f"K4 {k4.status}; {clk.seconds:.1f}s")
    assert ok
