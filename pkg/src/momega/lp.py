"""Exact rational linear programming: two-phase dense tableau simplex, Bland's rule.

Every answer comes with a certificate that is re-checked in exact arithmetic
before it is returned: a primal point and dual multipliers at an optimum, a
Farkas combination of the constraints when infeasible, a ray when unbounded.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

Q = Fraction


class LPError(ValueError):
    """Malformed linear program."""


def _q(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


@dataclass
class RationalLP:
    """Optimize ``objective . x`` subject to

    ``A_eq x = b_eq``, ``A_ub x <= b_ub`` and ``lower <= x <= upper``.

    A bound of ``None`` means unbounded in that direction; the default is
    ``0 <= x``.  All numbers are converted to Fractions.
    """

    objective: Sequence
    A_eq: Sequence[Sequence] = ()
    b_eq: Sequence = ()
    A_ub: Sequence[Sequence] = ()
    b_ub: Sequence = ()
    lower: Sequence | None = None
    upper: Sequence | None = None
    maximize: bool = True

    def __post_init__(self):
        nv = len(self.objective)
        self.objective = [_q(v) for v in self.objective]
        self.A_eq = [[_q(v) for v in row] for row in self.A_eq]
        self.A_ub = [[_q(v) for v in row] for row in self.A_ub]
        self.b_eq = [_q(v) for v in self.b_eq]
        self.b_ub = [_q(v) for v in self.b_ub]
        self.lower = [Q(0)] * nv if self.lower is None else [None if v is None else _q(v) for v in self.lower]
        self.upper = [None] * nv if self.upper is None else [None if v is None else _q(v) for v in self.upper]
        if len(self.A_eq) != len(self.b_eq) or len(self.A_ub) != len(self.b_ub):
            raise LPError("constraint matrix and right-hand side lengths differ")
        if any(len(row) != nv for row in list(self.A_eq) + list(self.A_ub)):
            raise LPError("constraint row length differs from the number of variables")
        if len(self.lower) != nv or len(self.upper) != nv:
            raise LPError("bounds length differs from the number of variables")

    @property
    def nvars(self) -> int:
        return len(self.objective)

    def rows(self):
        """All constraints as (coefficients, sense, rhs) with sense '=' or '<='."""
        nv = self.nvars
        out = [(row, "=", b) for row, b in zip(self.A_eq, self.b_eq)]
        out += [(row, "<=", b) for row, b in zip(self.A_ub, self.b_ub)]
        for j in range(nv):
            unit = [Q(0)] * nv
            if self.lower[j] is not None:
                neg = list(unit)
                neg[j] = Q(-1)
                out.append((neg, "<=", -self.lower[j]))
            if self.upper[j] is not None:
                pos = list(unit)
                pos[j] = Q(1)
                out.append((pos, "<=", self.upper[j]))
        return out

    def is_feasible_point(self, x) -> bool:
        return all(_holds(row, sense, b, x) for row, sense, b in self.rows())


def _dot(a, b) -> Fraction:
    return sum((u * v for u, v in zip(a, b) if u and v), Q(0))


def _holds(row, sense, b, x) -> bool:
    v = _dot(row, x)
    return v == b if sense == "=" else v <= b


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: Fraction | None = None
    x: list[Fraction] | None = None
    # multipliers, one per entry of RationalLP.rows(); for "infeasible" a Farkas
    # combination (sum y_i a_i = 0, sum y_i b_i < 0), for "optimal" the duals
    multipliers: list[Fraction] | None = None
    ray: list[Fraction] | None = None
    pivots: int = 0
    info: dict = field(default_factory=dict)


def verify_farkas(lp: RationalLP, y) -> bool:
    rows = lp.rows()
    if len(y) != len(rows):
        return False
    combo = [Q(0)] * lp.nvars
    rhs = Q(0)
    for yi, (row, sense, b) in zip(y, rows):
        if sense == "<=" and yi < 0:
            return False
        if yi:
            for j, a in enumerate(row):
                if a:
                    combo[j] += yi * a
            rhs += yi * b
    return all(c == 0 for c in combo) and rhs < 0


def verify_optimal(lp: RationalLP, res: LPResult) -> bool:
    """Primal feasibility, dual feasibility and zero duality gap."""
    x, y = res.x, res.multipliers
    if x is None or y is None or not lp.is_feasible_point(x):
        return False
    rows = lp.rows()
    # maximize c.x: y >= 0 on <= rows, sum y_i a_i = c, sum y_i b_i = c.x
    sign = 1 if lp.maximize else -1
    combo = [Q(0)] * lp.nvars
    rhs = Q(0)
    for yi, (row, sense, b) in zip(y, rows):
        if sense == "<=" and yi < 0:
            return False
        for j, a in enumerate(row):
            if a:
                combo[j] += yi * a
        rhs += yi * b
    c = [sign * v for v in lp.objective]
    return combo == c and rhs == sign * _dot(lp.objective, x) == sign * res.value


def verify_ray(lp: RationalLP, x, ray) -> bool:
    """x feasible, x + t*ray feasible for all t >= 0, objective improving along ray."""
    if not lp.is_feasible_point(x):
        return False
    for row, sense, _ in lp.rows():
        d = _dot(row, ray)
        if (sense == "=" and d != 0) or (sense == "<=" and d > 0):
            return False
    gain = _dot(lp.objective, ray)
    return gain > 0 if lp.maximize else gain < 0


class _Standard:
    """min c.z s.t. A z = b, z >= 0, b >= 0; with the map back to x."""

    def __init__(self, lp: RationalLP):
        nv = lp.nvars
        self.lp = lp
        cols = []  # (orig var j, coefficient +1/-1, offset) per standard var
        self.offset = [Q(0)] * nv
        for j in range(nv):
            lo, hi = lp.lower[j], lp.upper[j]
            if lo is not None:
                cols.append((j, 1))
                self.offset[j] = lo
            elif hi is not None:
                cols.append((j, -1))  # x = hi - z
                self.offset[j] = hi
            else:
                cols.append((j, 1))
                cols.append((j, -1))
        # constraint rows over x, then bound rows needing explicit constraints
        rows = [(row, "=", b, ("row", i)) for i, (row, b) in enumerate(zip(lp.A_eq, lp.b_eq))]
        rows += [(row, "<=", b, ("row", len(lp.A_eq) + i)) for i, (row, b) in enumerate(zip(lp.A_ub, lp.b_ub))]
        for j in range(nv):
            if lp.lower[j] is not None and lp.upper[j] is not None:
                unit = [Q(0)] * nv
                unit[j] = Q(1)
                rows.append((unit, "<=", lp.upper[j], ("upper", j)))
        self.cols = cols
        nz = len(cols)
        n_slack = sum(1 for r in rows if r[1] == "<=")
        self.nz = nz
        self.width = nz + n_slack
        A, b, self.row_tags, self.row_sign = [], [], [], []
        s = nz
        for row, sense, rhs, tag in rows:
            # substitute x_j = offset_j + sgn * z
            shifted = rhs - _dot(row, self.offset)
            line = [Q(0)] * self.width
            for k, (j, sgn) in enumerate(cols):
                if row[j]:
                    line[k] = row[j] * sgn
            if sense == "<=":
                line[s] = Q(1)
                s += 1
            sign = 1
            if shifted < 0:
                sign = -1
                line = [-v for v in line]
                shifted = -shifted
            A.append(line)
            b.append(shifted)
            self.row_tags.append(tag)
            self.row_sign.append(sign)
        self.A, self.b = A, b
        obj_sign = -1 if lp.maximize else 1
        self.c = [Q(0)] * self.width
        for k, (j, sgn) in enumerate(cols):
            self.c[k] = obj_sign * lp.objective[j] * sgn
        self.obj_sign = obj_sign

    def to_x(self, z) -> list[Fraction]:
        x = list(self.offset)
        for k, (j, sgn) in enumerate(self.cols):
            if z[k]:
                x[j] += sgn * z[k]
        return x

    def direction_to_x(self, dz) -> list[Fraction]:
        x = [Q(0)] * self.lp.nvars
        for k, (j, sgn) in enumerate(self.cols):
            if dz[k]:
                x[j] += sgn * dz[k]
        return x

    def multipliers(self, u, bound_duals) -> list[Fraction]:
        """Map standard-row multipliers to multipliers over RationalLP.rows().

        ``u`` are multipliers on the standard rows (after sign flips undone) with
        the convention that the x-part of sum u_i a_i plus bound terms vanishes or
        equals the objective; ``bound_duals[j]`` are the multipliers of the bound
        rows that were absorbed by the substitution.
        """
        lp = self.lp
        rows = lp.rows()
        out = [Q(0)] * len(rows)
        n_eq, n_ub = len(lp.A_eq), len(lp.A_ub)
        pos = {}
        k = n_eq + n_ub
        for j in range(lp.nvars):
            if lp.lower[j] is not None:
                pos[("lower", j)] = k
                k += 1
            if lp.upper[j] is not None:
                pos[("upper", j)] = k
                k += 1
        for ui, tag in zip(u, self.row_tags):
            if tag[0] == "row":
                out[tag[1]] = ui
            else:
                out[pos[tag]] = ui
        for (kind, j), v in bound_duals.items():
            out[pos[(kind, j)]] += v
        return out


def _pivot(T, basis, row, col):
    pr = T[row]
    pv = pr[col]
    if pv != 1:
        inv = 1 / pv
        pr = [v * inv if v else v for v in pr]
        T[row] = pr
    nz = [j for j, v in enumerate(pr) if v]
    for i, line in enumerate(T):
        if i == row:
            continue
        f = line[col]
        if f:
            for j in nz:
                line[j] -= f * pr[j]
    basis[row] = col


def _simplex(T, basis, cost, allowed, max_pivots=1_000_000):
    """Minimize cost over tableau T (last column = rhs) with Bland's rule.

    Returns ("optimal", pivots) or ("unbounded", entering column).
    """
    m = len(T)
    rhs = len(T[0]) - 1
    d = list(cost) + [Q(0)]
    for i in range(m):
        cb = cost[basis[i]]
        if cb:
            for j, v in enumerate(T[i]):
                if v:
                    d[j] -= cb * v
    pivots = 0
    while True:
        in_basis = set(basis)
        enter = next((j for j in allowed if d[j] < 0 and j not in in_basis), None)
        if enter is None:
            return "optimal", pivots
        leave = None
        best = None
        for i in range(m):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][rhs] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            return "unbounded", enter
        _pivot(T, basis, leave, enter)
        f = d[enter]
        d = [dv - f * pv if pv else dv for dv, pv in zip(d, T[leave])]
        pivots += 1
        if pivots > max_pivots:
            raise RuntimeError("simplex pivot limit exceeded")


def lp_solve(lp: RationalLP) -> LPResult:
    """Solve exactly; the returned certificate has already been re-verified."""
    std = _Standard(lp)
    m, w = len(std.A), std.width
    # tableau: [A | I (artificials) | b]
    T = []
    for i in range(m):
        art = [Q(0)] * m
        art[i] = Q(1)
        T.append(list(std.A[i]) + art + [std.b[i]])
    basis = [w + i for i in range(m)]
    cost1 = [Q(0)] * w + [Q(1)] * m
    status, piv1 = _simplex(T, basis, cost1, range(w))
    rhs = w + m
    phase1 = sum((T[i][rhs] for i in range(m) if basis[i] >= w), Q(0))
    if phase1 > 0:
        # y = c_B B^-1 read from the artificial block; Farkas multipliers are -y
        cb = [cost1[basis[i]] for i in range(m)]
        y = [sum((cb[i] * T[i][w + k] for i in range(m) if cb[i]), Q(0)) for k in range(m)]
        u = [-yk * sgn for yk, sgn in zip(y, std.row_sign)]
        bound_duals = _bound_duals(std, u, target=None)
        mult = std.multipliers(u, bound_duals)
        if not verify_farkas(lp, mult):
            raise AssertionError("Farkas certificate failed verification")
        return LPResult("infeasible", multipliers=mult, pivots=piv1)
    # drive remaining artificials out of the basis
    for i in range(m):
        if basis[i] >= w:
            for j in range(w):
                if T[i][j] != 0 and j not in basis:
                    _pivot(T, basis, i, j)
                    break
    cost2 = list(std.c) + [Q(0)] * m
    status, info = _simplex(T, basis, cost2, range(w))
    pivots = piv1 + (info if status == "optimal" else 0)
    z = [Q(0)] * w
    for i in range(m):
        if basis[i] < w:
            z[basis[i]] = T[i][rhs]
    x = std.to_x(z)
    if status == "unbounded":
        enter = info
        dz = [Q(0)] * w
        dz[enter] = Q(1)
        for i in range(m):
            if basis[i] < w:
                dz[basis[i]] = -T[i][enter]
        ray = std.direction_to_x(dz)
        if not verify_ray(lp, x, ray):
            raise AssertionError("unbounded ray failed verification")
        return LPResult("unbounded", x=x, ray=ray, pivots=pivots)
    cb = [cost2[basis[i]] for i in range(m)]
    y = [sum((cb[i] * T[i][w + k] for i in range(m) if cb[i]), Q(0)) for k in range(m)]
    # min c.z with A z = b: y are the duals, c - A^T y >= 0.  In maximize form the
    # multipliers on the original rows are -y (times row signs).
    u = [-yk * sgn for yk, sgn in zip(y, std.row_sign)]
    bound_duals = _bound_duals(std, u, target=[-v for v in std.c[: std.nz]])
    mult = std.multipliers(u, bound_duals)
    value = _dot(lp.objective, x)
    res = LPResult("optimal", value=value, x=x, multipliers=mult, pivots=pivots)
    if not verify_optimal(lp, res):
        raise AssertionError("optimality certificate failed verification")
    return res


def _bound_duals(std: _Standard, u, target):
    """Multipliers for bound rows absorbed into z >= 0.

    For each standard column k (orig var j, sign s) the x-combination of the
    constraint rows must be completed to ``target`` (zero for Farkas) by the
    multiplier of the absorbed bound row: lower bound row is -x_j <= -lo,
    an upper-only bound row is x_j <= hi.
    """
    lp = std.lp
    combo = [Q(0)] * lp.nvars
    for ui, tag in zip(u, std.row_tags):
        if not ui:
            continue
        if tag[0] == "row":
            row = (lp.A_eq + lp.A_ub)[tag[1]]
        else:
            row = [Q(0)] * lp.nvars
            row[tag[1]] = Q(1)
        for j, a in enumerate(row):
            if a:
                combo[j] += ui * a
    want = [Q(0)] * lp.nvars
    if target is not None:
        for k, (j, sgn) in enumerate(std.cols):
            want[j] = target[k] * sgn
    out = {}
    for j in range(lp.nvars):
        gap = want[j] - combo[j]
        if lp.lower[j] is not None:
            out[("lower", j)] = -gap  # multiplier on -x_j <= -lo
        elif lp.upper[j] is not None:
            out[("upper", j)] = gap  # multiplier on x_j <= hi
    return out
