"""Vertex tests, facial tests, affine dimension and lattice points for finite point clouds.

All arithmetic is exact.  Points are sequences of ints or Fractions; every
certificate returned here has been re-verified by direct arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor
from typing import Sequence

from .lp import LPError, RationalLP, lp_solve

Q = Fraction
Point = Sequence


class GeometryError(ValueError):
    pass


def qstr(v) -> str:
    """Rational as ``p/q`` (or ``p`` when integral)."""
    v = Q(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def _dot(a, b):
    return sum((x * y for x, y in zip(a, b) if x and y), Q(0))


def _check_cloud(cloud) -> int:
    if not cloud:
        raise GeometryError("empty point cloud")
    dim = len(cloud[0])
    if any(len(p) != dim for p in cloud):
        raise GeometryError("points of different dimensions")
    return dim


def matrix_rank(rows) -> int:
    """Rank by exact Gaussian elimination."""
    rows = [[Q(v) for v in r] for r in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        pr = rows[rank]
        for i in range(rank + 1, len(rows)):
            f = rows[i][col]
            if f:
                f = f / pr[col]
                rows[i] = [a - f * b for a, b in zip(rows[i], pr)]
        rank += 1
    return rank


def affine_dim(points) -> int:
    _check_cloud(points)
    p0 = points[0]
    diffs = [[Q(a) - Q(b) for a, b in zip(p, p0)] for p in points[1:]]
    return matrix_rank(diffs) if diffs else 0


def affine_relations(points) -> list[tuple[list[Fraction], Fraction]]:
    """A basis of the affine relations ``a . x = b`` satisfied by every point."""
    dim = _check_cloud(points)
    # null space of the matrix with rows (x, -1)
    rows = [[Q(v) for v in p] + [Q(-1)] for p in points]
    m = dim + 1
    piv_cols = []
    r = 0
    for col in range(m):
        piv = next((i for i in range(r, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][col]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col]:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        piv_cols.append(col)
        r += 1
    free = [c for c in range(m) if c not in piv_cols]
    out = []
    for fc in free:
        vec = [Q(0)] * m
        vec[fc] = Q(1)
        for i, pc in enumerate(piv_cols):
            vec[pc] = -rows[i][fc]
        out.append((vec[:dim], vec[dim]))
    return out


# -- vertex test ---------------------------------------------------------------

@dataclass
class VertexCertificate:
    point_id: int
    status: str  # "vertex" | "interior"
    c: list[Fraction] | None = None
    d: Fraction | None = None
    weights: dict[int, Fraction] = field(default_factory=dict)

    def verify(self, cloud) -> bool:
        p = cloud[self.point_id]
        if self.status == "vertex":
            cp = _dot(self.c, p)
            return all(i == self.point_id or _dot(self.c, q) <= self.d for i, q in enumerate(cloud)) and cp > self.d
        if any(w < 0 for w in self.weights.values()) or sum(self.weights.values()) != 1:
            return False
        if self.point_id in self.weights:
            return False
        combo = [sum((w * Q(cloud[i][k]) for i, w in self.weights.items()), Q(0)) for k in range(len(p))]
        return combo == [Q(v) for v in p]

    def to_json(self) -> dict:
        if self.status == "vertex":
            return {"status": "vertex", "c": [qstr(v) for v in self.c], "d": qstr(self.d)}
        return {"status": "interior", "weights": {str(i): qstr(w) for i, w in sorted(self.weights.items())}}


def is_vertex(point_id: int, cloud) -> VertexCertificate:
    """Decide whether cloud[point_id] lies outside the hull of the other points."""
    dim = _check_cloud(cloud)
    if not 0 <= point_id < len(cloud):
        raise GeometryError(f"point id {point_id} not in cloud")
    p = cloud[point_id]
    others = [i for i in range(len(cloud)) if i != point_id]
    if not others:
        cert = VertexCertificate(point_id, "vertex", [Q(0)] * dim, Q(-1))
        assert cert.verify(cloud)
        return cert
    a_eq = [[cloud[j][k] for j in others] for k in range(dim)] + [[1] * len(others)]
    b_eq = list(p) + [1]
    lp = RationalLP([0] * len(others), A_eq=a_eq, b_eq=b_eq)
    res = lp_solve(lp)
    if res.status == "optimal":
        weights = {j: w for j, w in zip(others, res.x) if w}
        cert = VertexCertificate(point_id, "interior", weights=weights)
    else:
        y = res.multipliers
        c = [-v for v in y[:dim]]
        d = y[dim]
        cert = VertexCertificate(point_id, "vertex", c, d)
    if not cert.verify(cloud):
        raise AssertionError("vertex certificate failed verification")
    return cert


# -- facial test ---------------------------------------------------------------

@dataclass
class FacialResult:
    facial: bool
    c: list[Fraction] | None = None
    d: Fraction | None = None
    counterexample: int | None = None
    epsilon: Fraction | None = None

    def to_json(self) -> dict:
        if self.facial:
            return {"facial": True, "c": [qstr(v) for v in self.c], "d": qstr(self.d), "epsilon": qstr(self.epsilon)}
        return {"facial": False, "counterexample": self.counterexample}


def supported_set(cloud, c, d) -> list[int]:
    """Ids of points where c . x attains the value d, given d is the maximum."""
    return [i for i, q in enumerate(cloud) if _dot(c, q) == d]


def facial_test(cloud, subset_ids) -> FacialResult:
    """Is ``subset_ids`` exactly the set of cloud points on some face?

    Maximizes eps subject to c.p = d on the subset, c.q <= d - eps elsewhere and
    -1 <= c_i <= 1.  When the optimum is zero, returns an outside point lying on
    the smallest face that contains the subset.
    """
    dim = _check_cloud(cloud)
    inside = sorted(set(subset_ids))
    if not inside:
        raise GeometryError("empty subset")
    if inside[0] < 0 or inside[-1] >= len(cloud):
        raise GeometryError("subset id out of range")
    outside = [i for i in range(len(cloud)) if i not in set(inside)]
    if not outside:
        return FacialResult(True, [Q(0)] * dim, Q(0), epsilon=Q(0))
    # variables: c_0..c_{dim-1}, d, eps
    nv = dim + 2
    a_eq = [[*cloud[i], -1, 0] for i in inside]
    a_ub = [[*cloud[i], -1, 1] for i in outside]
    obj = [0] * dim + [0, 1]
    lower = [-1] * dim + [None, None]
    upper = [1] * dim + [None, 1]
    res = lp_solve(RationalLP(obj, A_eq=a_eq, b_eq=[0] * len(a_eq), A_ub=a_ub, b_ub=[0] * len(a_ub),
                              lower=lower, upper=upper))
    assert res.status == "optimal" and len(res.x) == nv
    eps = res.value
    if eps > 0:
        c, d = res.x[:dim], res.x[dim]
        if supported_set(cloud, c, d) != inside or any(_dot(c, cloud[i]) > d for i in outside):
            raise AssertionError("facial functional failed verification")
        return FacialResult(True, c, d, epsilon=eps)
    return FacialResult(False, counterexample=_forced_point(cloud, inside, outside), epsilon=eps)


def _forced_point(cloud, inside, outside) -> int:
    """First outside point q with g + t(g - q) in the hull for some t > 0 (g = centroid of subset)."""
    dim = len(cloud[0])
    g = [sum((Q(cloud[i][k]) for i in inside), Q(0)) / len(inside) for k in range(dim)]
    m = len(cloud)
    for qi in outside:
        q = cloud[qi]
        # variables lambda_0..lambda_{m-1}, t ; sum lambda_j x_j - t (g - q) = g
        a_eq = [[cloud[j][k] for j in range(m)] + [-(g[k] - q[k])] for k in range(dim)]
        a_eq.append([1] * m + [0])
        b_eq = g + [1]
        res = lp_solve(RationalLP([0] * m + [1], A_eq=a_eq, b_eq=b_eq, upper=[None] * m + [1]))
        if res.status == "optimal" and res.value > 0:
            return qi
    raise AssertionError("no outside point on the minimal face although the family is not facial")


# -- lattice points ----------------------------------------------------------------

@dataclass
class LatticeSearch:
    points: list[tuple[int, ...]]
    nodes: int
    lps: int


def _membership_lp(cloud, fixed: dict[int, int], objective_coord=None, maximize=True) -> RationalLP:
    m = len(cloud)
    a_eq = [[cloud[j][k] for j in range(m)] for k in sorted(fixed)] + [[1] * m]
    b_eq = [fixed[k] for k in sorted(fixed)] + [1]
    obj = [0] * m if objective_coord is None else [cloud[j][objective_coord] for j in range(m)]
    return RationalLP(obj, A_eq=a_eq, b_eq=b_eq, maximize=maximize)


def _coord_range(cloud, fixed, k):
    hi = lp_solve(_membership_lp(cloud, fixed, k, True))
    if hi.status != "optimal":
        return None
    lo = lp_solve(_membership_lp(cloud, fixed, k, False))
    return lo.value, hi.value


def in_hull(cloud, x) -> bool:
    res = lp_solve(_membership_lp(cloud, dict(enumerate(x))))
    return res.status == "optimal"


def enumerate_lattice_points(cloud, stats: bool = False):
    """All integer points of conv(cloud), sorted.

    Depth-first over coordinates in order of increasing range width; each step
    bounds the next coordinate by LP min/max with the prefix fixed.  Clouds
    whose points share a common coordinate sum have the last coordinate
    implied by it.
    """
    dim = _check_cloud(cloud)
    for p in cloud:
        for v in p:
            if Q(v).denominator != 1:
                raise GeometryError("cloud point with non-integer coordinate")
    cloud = sorted({tuple(int(v) for v in p) for p in cloud})
    sums = {sum(p) for p in cloud}
    common_sum = sums.pop() if len(sums) == 1 else None
    counter = {"nodes": 0, "lps": 0}
    ranges = []
    for k in range(dim):
        lo, hi = min(p[k] for p in cloud), max(p[k] for p in cloud)
        ranges.append((hi - lo, k))
    order = [k for _, k in sorted(ranges)]
    last = order[-1] if common_sum is not None else None
    found = []

    def rec(depth, fixed):
        counter["nodes"] += 1
        if depth == dim:
            x = tuple(fixed[k] for k in range(dim))
            counter["lps"] += 1
            if in_hull(cloud, x):
                found.append(x)
            return
        k = order[depth]
        if k == last:
            fixed[k] = common_sum - sum(fixed.values())
            rec(depth + 1, fixed)
            del fixed[k]
            return
        counter["lps"] += 2
        rng = _coord_range(cloud, fixed, k)
        if rng is None:
            return
        lo, hi = ceil(rng[0]), floor(rng[1])
        for v in range(lo, hi + 1):
            fixed[k] = v
            rec(depth + 1, fixed)
            del fixed[k]

    rec(0, {})
    found.sort()
    if stats:
        return LatticeSearch(found, counter["nodes"], counter["lps"])
    return found


__all__ = [
    "GeometryError", "LPError", "VertexCertificate", "FacialResult", "LatticeSearch", "qstr",
    "matrix_rank", "affine_dim", "affine_relations", "is_vertex", "facial_test", "supported_set",
    "enumerate_lattice_points", "in_hull",
]
