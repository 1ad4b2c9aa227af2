"""Point clouds of matroid classes in Schubert coordinates, and what can be certified about them."""

from __future__ import annotations

import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Callable, Iterable, Sequence

from . import geometry
from .catalog import CatalogEntry, generate_all, generate_labelled, revlex_string
from .geometry import FacialResult, VertexCertificate, affine_dim, facial_test, is_vertex
from .matroid import (
    Matroid,
    MatroidError,
    canonical_key,
    classify,
    invariant_vector,
    is_modular,
    is_series_parallel,
)
from .schubert import (
    enumerate_profiles,
    expansion_labelled,
    expansion_symmetrized,
    labelled_chains,
    schubert_from_chain,
    schubert_from_profile,
)

LABELLED_CAP = 5


class AnalysisError(MatroidError):
    pass


def _map(fn, items, jobs: int = 1):
    items = list(items)
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))
    return [fn(x) for x in items]


# -- instances ---------------------------------------------------------------------

@dataclass
class OmegaInstance:
    r: int
    n: int
    labelled: bool
    coords: list  # SchubertProfile (symmetrized) or CyclicFlatChain (labelled), canonical order
    points: list[tuple[int, ...]]
    occupancy: list[list[str]]  # point id -> class keys, sorted
    classes: dict[str, Matroid]
    point_of: dict[str, int]

    def coord_labels(self) -> list[str]:
        return [str(c) for c in self.coords]

    def expansion(self, point_id: int) -> dict[str, int]:
        return {str(c): v for c, v in zip(self.coords, self.points[point_id]) if v}


def _sym_point(args):
    m, order = args
    e = expansion_symmetrized(m)
    return tuple(e.coefficients.get(p, 0) for p in order)


def _lab_point(args):
    m, order = args
    e = expansion_labelled(m)
    return tuple(e.coefficients.get(c, 0) for c in order)


def labelled_coords(r: int, n: int) -> list:
    out = []
    for p in enumerate_profiles(r, n):
        out += list(labelled_chains(p))
    return sorted(out, key=lambda c: c.sort_key())


def build_instance(classes: Sequence, labelled: bool = False, jobs: int = 1) -> OmegaInstance:
    """Project every class to its Schubert coordinates and collapse equal points.

    ``classes`` are CatalogEntries (or Matroids) sharing (r, n).  In labelled mode
    every labelled matroid is its own class, keyed by its revlex string.
    """
    if not classes:
        raise AnalysisError("no classes given")
    ms = [c.matroid if isinstance(c, CatalogEntry) else c for c in classes]
    params = {(m.r, m.n) for m in ms}
    if len(params) != 1:
        raise AnalysisError(f"classes with mixed (r, n): {sorted(params)}")
    r, n = params.pop()
    if labelled:
        if n > LABELLED_CAP:
            raise AnalysisError(f"labelled mode is capped at n <= {LABELLED_CAP}")
        keyed = {f"{n}:{r}:{revlex_string(m)}": m for m in ms}
        coords = labelled_coords(r, n)
        fn = _lab_point
    else:
        keyed = {}
        for c, m in zip(classes, ms):
            keyed.setdefault(c.key if isinstance(c, CatalogEntry) else canonical_key(m), m)
        coords = enumerate_profiles(r, n)
        fn = _sym_point
    keys = sorted(keyed)
    pts = _map(fn, [(keyed[k], coords) for k in keys], jobs)
    points, occupancy, point_of = [], [], {}
    index: dict[tuple, int] = {}
    for k, p in zip(keys, pts):
        if p not in index:
            index[p] = len(points)
            points.append(p)
            occupancy.append([])
        occupancy[index[p]].append(k)
        point_of[k] = index[p]
    for p in points:
        if sum(p) != 1:
            raise AssertionError(f"coordinate sum {sum(p)} != 1")
    return OmegaInstance(r, n, labelled, coords, points, occupancy, keyed, point_of)


def instance_for(r: int, n: int, labelled: bool = False, jobs: int = 1) -> OmegaInstance:
    if labelled:
        return build_instance(list(generate_labelled(r, n)), labelled=True, jobs=jobs)
    return build_instance(generate_all(r, n), jobs=jobs)


# -- extremality ------------------------------------------------------------------------

@dataclass
class ExtremalityReport:
    vertex_count: int
    extremal_class_count: int
    certificates: list[VertexCertificate]
    extremal: set[str]

    def is_vertex(self, point_id: int) -> bool:
        return self.certificates[point_id].status == "vertex"


def _vertex_job(args):
    pid, points = args
    return is_vertex(pid, points)


def agreement_certificate(inst: OmegaInstance, point_id: int, schubert_bases: list[frozenset]) -> VertexCertificate:
    """Separate a labelled matroid point using c_S = number of r-sets where S and M agree on being a basis.

    At the point of N this functional equals the agreement count of N with M,
    so it is C(n, r) at M and at most C(n, r) - 1 elsewhere.
    """
    (key,) = inst.occupancy[point_id]
    mb = inst.classes[key].bases
    total = comb(inst.n, inst.r)
    c = [Fraction(total - len(mb ^ sb)) for sb in schubert_bases]
    cert = VertexCertificate(point_id, "vertex", c, Fraction(total - 1))
    if not cert.verify(inst.points):
        raise AssertionError("agreement functional failed to separate")
    return cert


def extremality_report(inst: OmegaInstance, jobs: int = 1, lp_crosscheck: bool | None = None) -> ExtremalityReport:
    if inst.labelled:
        sb = [schubert_from_chain(c, check=False).bases for c in inst.coords]
        certs = [agreement_certificate(inst, i, sb) for i in range(len(inst.points))]
        if lp_crosscheck if lp_crosscheck is not None else inst.n <= 4:
            for i in range(len(inst.points)):
                if is_vertex(i, inst.points).status != "vertex":
                    raise AssertionError("LP disagrees with the agreement certificate")
    else:
        certs = _map(_vertex_job, [(i, inst.points) for i in range(len(inst.points))], jobs)
    extremal = {k for i, c in enumerate(certs) if c.status == "vertex" for k in inst.occupancy[i]}
    return ExtremalityReport(sum(c.status == "vertex" for c in certs), len(extremal), certs, extremal)


# -- families and faces -----------------------------------------------------------------------

def family_predicate(name: str) -> Callable[[Matroid], bool]:
    m_girth = re.fullmatch(r"girth:(\d+)", name)
    if m_girth:
        g = int(m_girth.group(1))
        return lambda m: m.girth >= g
    table = {
        "disconnected": lambda m: not m.is_connected,
        "connected": lambda m: m.is_connected,
        "paving": lambda m: classify(m).paving,
        "copaving": lambda m: classify(m).copaving,
        "sparsePaving": lambda m: classify(m).sparse_paving,
        "elementarySplit": lambda m: classify(m).elementary_split,
        "modular": is_modular,
        "seriesParallel": lambda m: m.n >= 2 and is_series_parallel(m),
    }
    if name not in table:
        raise AnalysisError(f"unknown family {name!r}; known: girth:<m>, " + ", ".join(table))
    return table[name]


FAMILIES = ("disconnected", "connected", "paving", "copaving", "sparsePaving", "elementarySplit", "modular",
            "seriesParallel", "girth:<m>")


@dataclass
class FaceReport:
    family: str
    members: list[int]  # point ids whose occupants all satisfy the predicate
    mixed: list[int]  # point ids with occupants on both sides; excluded
    facial: bool
    dim: int
    result: FacialResult | None

    def to_json(self) -> dict:
        out = {"family": self.family, "facial": self.facial, "dim": self.dim, "points": self.members,
               "mixedPoints": self.mixed}
        if self.result is not None:
            out["functional" if self.facial else "counterexample"] = (
                self.result.to_json() if self.facial else self.result.counterexample)
        return out


def family_points(inst: OmegaInstance, family: str) -> tuple[list[int], list[int]]:
    pred = family_predicate(family)
    members, mixed = [], []
    for i, occ in enumerate(inst.occupancy):
        verdicts = {bool(pred(inst.classes[k])) for k in occ}
        if verdicts == {True}:
            members.append(i)
        elif len(verdicts) == 2:
            mixed.append(i)
    return members, mixed


def face_family_report(inst: OmegaInstance, family: str) -> FaceReport:
    members, mixed = family_points(inst, family)
    if not members:
        return FaceReport(family, [], mixed, True, -1, None)
    res = facial_test(inst.points, members)
    dim = affine_dim([inst.points[i] for i in members])
    return FaceReport(family, members, mixed, res.facial, dim, res)


# -- sequential maximization ------------------------------------------------------------------

_TERM = re.compile(r"\s*([+-])?\s*(?:(\d+)\s*\*\s*)?([a-z_]+)(?:\[([\d,\s]+)\])?\s*")


def _parse_objective(text: str) -> tuple[int, list[tuple[int, str, tuple[int, ...]]]]:
    sense = 1
    body = text.strip()
    if ":" in body:
        head, body = body.split(":", 1)
        head = head.strip()
        if head not in ("max", "min"):
            raise AnalysisError(f"objective prefix must be max: or min:, got {head!r}")
        sense = 1 if head == "max" else -1
    terms, pos = [], 0
    while pos < len(body):
        mt = _TERM.match(body, pos)
        if not mt or mt.end() == pos:
            raise AnalysisError(f"cannot parse invariant expression {text!r} at {body[pos:]!r}")
        sign = -1 if mt.group(1) == "-" else 1
        coef = int(mt.group(2)) if mt.group(2) else 1
        args = tuple(int(a) for a in mt.group(4).split(",")) if mt.group(4) else ()
        if mt.group(3) not in INVARIANTS:
            raise AnalysisError(f"unknown invariant {mt.group(3)!r}; known: {', '.join(sorted(INVARIANTS))}")
        terms.append((sign * coef, mt.group(3), args))
        pos = mt.end()
    if not terms:
        raise AnalysisError(f"empty invariant expression {text!r}")
    return sense, terms


def _at(seq, i):
    return seq[i] if 0 <= i < len(seq) else 0


INVARIANTS: dict[str, Callable] = {
    "bases_count": lambda v, m: v.bases_count,
    "nonbases": lambda v, m: comb(m.n, m.r) - v.bases_count,
    "independent": lambda v, m, k: _at(v.independent_counts, k),
    "flats": lambda v, m, k, s: v.flats_by_rank_size.get((k, s), 0),
    "circuits": lambda v, m, s: v.circuits_by_size.get(s, 0),
    "whitney": lambda v, m, i: _at(v.whitney, i),
    "tutte": lambda v, m, i, j: _at(v.tutte[i], j) if 0 <= i < len(v.tutte) else 0,
    "beta": lambda v, m: v.beta,
}


def evaluate(expr: str, m: Matroid, vec=None) -> int:
    sense, terms = _parse_objective(expr)
    vec = invariant_vector(m) if vec is None else vec
    try:
        return sense * sum(c * INVARIANTS[name](vec, m, *args) for c, name, args in terms)
    except TypeError:
        raise AnalysisError(f"wrong number of indices in {expr!r}") from None


@dataclass
class SequenceResult:
    survivors: list[str]
    stage_sizes: list[int]
    colocated: bool
    certificate: VertexCertificate | None


def maximize_sequence(inst: OmegaInstance, sequence: Iterable[str]) -> SequenceResult:
    """Keep the classes maximizing each objective in turn (``min:`` negates).

    When the survivors share one point, that point is certified a vertex by LP.
    """
    sequence = list(sequence)
    for expr in sequence:
        _parse_objective(expr)
    vecs = {k: invariant_vector(m) for k, m in inst.classes.items()}
    alive = sorted(inst.classes)
    sizes = [len(alive)]
    for expr in sequence:
        vals = {k: evaluate(expr, inst.classes[k], vecs[k]) for k in alive}
        best = max(vals.values())
        alive = [k for k in alive if vals[k] == best]
        sizes.append(len(alive))
    pts = {inst.point_of[k] for k in alive}
    cert = None
    if len(pts) == 1:
        cert = is_vertex(pts.pop(), inst.points)
        if cert.status != "vertex":
            raise AssertionError("survivors of a maximization sequence are not a vertex")
    return SequenceResult(alive, sizes, cert is not None, cert)


def thickening_sequence(r: int, n: int) -> list[str]:
    """Objectives isolating the parallel doubling of U_{r, n/2}: no small odd circuits, then only pairs as points."""
    circ = "+".join(f"circuits[{s}]" for s in range(1, r + 1) if s != 2)
    flats = "+".join(f"flats[1,{s}]" for s in range(1, n + 1) if s != 2)
    return [f"min:{circ}", f"min:{flats}"] if circ else [f"min:{flats}"]


# -- sparse paving ----------------------------------------------------------------------------

def sparse_paving_vertex_check(inst: OmegaInstance, report: ExtremalityReport | None = None) -> dict:
    report = extremality_report(inst) if report is None else report
    members, mixed = family_points(inst, "sparsePaving")
    total = comb(inst.n, inst.r)
    nb = {i: total - len(inst.classes[inst.occupancy[i][0]].bases) for i in members}
    uni = [i for i in members if nb[i] == 0]
    most = max(nb.values()) if nb else 0
    far = [i for i in members if nb[i] == most]
    expected = sorted(set(uni) | set(far))
    vertices = sorted(i for i in members if report.is_vertex(i))
    on_segment = True
    if uni and far:
        u, w = inst.points[uni[0]], inst.points[far[0]]
        for i in members:
            p = inst.points[i]
            ts = {Fraction(a - b, c - b) for a, b, c in zip(p, u, w) if c != b}
            fixed = all(a == b for a, b, c in zip(p, u, w) if c == b)
            on_segment &= fixed and len(ts) <= 1 and all(0 <= t <= 1 for t in ts)
    return {
        "sparsePavingPoints": members,
        "mixedPoints": mixed,
        "vertexPoints": vertices,
        "expectedVertexPoints": expected,
        "onSegment": on_segment,
        "ok": vertices == expected and on_segment and not mixed,
    }


# -- lattice points -----------------------------------------------------------------------------

@dataclass
class LatticeExtra:
    point: tuple[int, ...]
    expansion: dict[str, int]


def non_matroid_lattice_points(inst: OmegaInstance) -> tuple[list[LatticeExtra], geometry.LatticeSearch]:
    search = geometry.enumerate_lattice_points(inst.points, stats=True)
    occupied = set(inst.points)
    extras = [LatticeExtra(p, {str(c): v for c, v in zip(inst.coords, p) if v})
              for p in search.points if p not in occupied]
    missing = occupied - set(search.points)
    if missing:
        raise AssertionError(f"lattice enumeration missed {len(missing)} cloud points")
    return extras, search


# -- Tutte projection ---------------------------------------------------------------------

@dataclass
class TutteProjection:
    dim: int
    relations: int
    evaluation_relation_holds: bool  # T(2, 2) = 2^n on every image


def tutte_projection_dim(inst: OmegaInstance) -> TutteProjection:
    r, n = inst.r, inst.n
    imgs = []
    for k in sorted(inst.classes):
        t = invariant_vector(inst.classes[k]).tutte
        if t is None:
            raise AnalysisError("Tutte polynomial beyond size cap")
        imgs.append(tuple(_at(t[i], j) if i < len(t) else 0 for i in range(r + 1) for j in range(n - r + 1)))
    holds = all(sum(v * 2 ** (i + j) for (i, j), v in zip(
        ((i, j) for i in range(r + 1) for j in range(n - r + 1)), img)) == 2 ** n for img in imgs)
    rel = geometry.affine_relations(imgs)
    return TutteProjection(affine_dim(imgs), len(rel), holds)


# -- direct sums ---------------------------------------------------------------------------

def direct_sum_extremality_check(n_max: int, jobs: int = 1) -> dict:
    if n_max > 6:
        raise AnalysisError("direct-sum sweep is capped at n <= 6")
    extremal: dict[tuple[int, int], set[str]] = {}
    classes: dict[tuple[int, int], dict[str, Matroid]] = {}
    for n in range(1, n_max + 1):
        for r in range(n + 1):
            inst = instance_for(r, n, jobs=jobs)
            extremal[(r, n)] = extremality_report(inst, jobs=jobs).extremal
            classes[(r, n)] = inst.classes
    theorem, converse, checked = [], [], 0
    for (r, n), cls in sorted(classes.items()):
        for key, m in sorted(cls.items()):
            comps = m.components
            if len(comps) < 2:
                continue
            checked += 1
            parts = []
            for c in comps:
                s = m.restrict(c)
                parts.append(canonical_key(s) in extremal[(s.r, s.n)])
            ext = key in extremal[(r, n)]
            if ext and not all(parts):
                theorem.append(key)
            if all(parts) and not ext:
                converse.append(key)
    return {"checked": checked, "theoremViolations": theorem, "converseViolations": converse,
            "ok": not theorem and not converse}


# -- slices and hyperplanes ---------------------------------------------------------------------

def beta_vector(inst: OmegaInstance) -> list[int]:
    """Beta invariant of each Schubert coordinate; beta is linear on the cloud."""
    if inst.labelled:
        return [invariant_vector(schubert_from_chain(c, check=False)).beta for c in inst.coords]
    return [invariant_vector(schubert_from_profile(p)).beta for p in inst.coords]


def series_parallel_slice(inst: OmegaInstance) -> dict:
    bv = beta_vector(inst)
    level = {}
    linear_ok = True
    for k, m in inst.classes.items():
        b = invariant_vector(m).beta
        p = inst.points[inst.point_of[k]]
        linear_ok &= sum(x * y for x, y in zip(bv, p)) == b
        level[k] = b
    sp = {k for k, m in inst.classes.items() if m.n >= 2 and is_series_parallel(m)}
    slice_ok = sp == {k for k, b in level.items() if b == 1}
    disc = {k for k, m in inst.classes.items() if not m.is_connected}
    face_ok = disc == {k for k, b in level.items() if b == 0} and all(b >= 0 for b in level.values())
    members, _ = family_points(inst, "seriesParallel")
    res = facial_test(inst.points, members) if members else None
    return {
        "betaFunctional": bv,
        "betaLinear": linear_ok,
        "sliceIsSeriesParallel": slice_ok,
        "disconnectedFaceIsBetaZero": face_ok,
        "seriesParallelFacial": None if res is None else res.facial,
        "counterexample": None if res is None or res.facial else res.counterexample,
        "ok": linear_ok and slice_ok and face_ok and (res is None or not res.facial),
    }


def modular_face_check(inst: OmegaInstance) -> dict:
    """W_{r-1} - W_1 >= 0 with equality exactly on modular classes."""
    bad = []
    for k, m in sorted(inst.classes.items()):
        w = invariant_vector(m).whitney
        gap = (_at(w, m.r - 1) - _at(w, 1)) if m.r >= 2 else 0
        if gap < 0 or (gap == 0) != is_modular(m):
            bad.append(k)
    return {"violations": bad, "ok": not bad}


def colocation_check(inst: OmegaInstance) -> dict:
    """Classes sharing a point have equal valuative invariants."""
    bad = []
    for occ in inst.occupancy:
        parts = {invariant_vector(inst.classes[k]).valuative_part() for k in occ}
        if len(parts) > 1:
            bad.append(occ)
    return {"violations": bad, "ok": not bad}


# -- reports -----------------------------------------------------------------------------

def table1(cells: Iterable[tuple[int, int]], jobs: int = 1, sources: dict | None = None) -> dict:
    """Vertex and extremal-class counts for each (r, n) cell.

    ``sources`` may map a cell to its classes (e.g. an ingested census).
    """
    sources = sources or {}
    out = {}
    for r, n in cells:
        cls = sources.get((r, n)) or generate_all(r, n)
        rep = extremality_report(build_instance(cls, jobs=jobs), jobs=jobs)
        out[(r, n)] = (rep.vertex_count, rep.extremal_class_count)
    return out


def instance_json(inst: OmegaInstance, report: ExtremalityReport | None = None, faces=(), extras=(),
                  meta: dict | None = None) -> dict:
    pts = []
    for i, p in enumerate(inst.points):
        entry = {"coords": list(p), "classes": inst.occupancy[i]}
        if report is not None:
            entry["certificate"] = report.certificates[i].to_json()
        pts.append(entry)
    out = {
        "parameters": {"r": inst.r, "n": inst.n, "labelled": inst.labelled, **(meta or {})},
        "profileOrder": inst.coord_labels(),
        "points": pts,
        "tables": {} if report is None else {
            "vertexCount": report.vertex_count, "extremalClassCount": report.extremal_class_count},
        "faces": [f.to_json() for f in faces],
        "latticeExtras": [{"coords": list(e.point), "expansion": e.expansion} for e in extras],
    }
    return out


__all__ = [
    "AnalysisError", "OmegaInstance", "ExtremalityReport", "FaceReport", "SequenceResult", "LatticeExtra",
    "TutteProjection", "build_instance", "instance_for", "extremality_report", "agreement_certificate",
    "family_predicate", "family_points", "face_family_report", "maximize_sequence", "thickening_sequence",
    "evaluate", "sparse_paving_vertex_check", "non_matroid_lattice_points", "tutte_projection_dim",
    "direct_sum_extremality_check", "beta_vector", "series_parallel_slice", "modular_face_check",
    "colocation_check", "table1", "instance_json", "labelled_coords",
]
