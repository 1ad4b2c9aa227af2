"""Slow, obviously-correct reference implementations used only by the tests."""

from itertools import permutations

from momega.bitset import elements, ksubsets, permute


def brute_rank(bases, s):
    return max((b & s).bit_count() for b in bases)


def brute_flats(n, bases):
    out = []
    for s in range(1 << n):
        rk = brute_rank(bases, s)
        if all(brute_rank(bases, s | 1 << e) > rk for e in range(n) if not s >> e & 1):
            out.append((s, rk))
    return out


def brute_circuits(n, bases):
    dep = [s for s in range(1 << n) if brute_rank(bases, s) < s.bit_count()]
    return sorted(c for c in dep if all(brute_rank(bases, c & ~(1 << e)) == (c & ~(1 << e)).bit_count()
                                         for e in elements(c)))


def brute_tutte(n, r, bases):
    """Coefficients of sum_A (x-1)^(r - rk A) (y-1)^(|A| - rk A), expanded by brute force."""
    from math import comb

    t = [[0] * (n - r + 1) for _ in range(r + 1)]
    for s in range(1 << n):
        a = r - brute_rank(bases, s)
        b = s.bit_count() - brute_rank(bases, s)
        for i in range(a + 1):
            for j in range(b + 1):
                t[i][j] += comb(a, i) * (-1) ** (a - i) * comb(b, j) * (-1) ** (b - j)
    return t


def brute_canonical(n, r, bases):
    """Least '*'/'0' revlex string over all relabellings ('*' sorts before '0')."""
    subs = ksubsets(n, r)
    best = None
    for perm in permutations(range(n)):
        img = {permute(b, perm) for b in bases}
        s = "".join("*" if x in img else "0" for x in subs)
        if best is None or s < best:
            best = s
    return f"{n}:{r}:{best}"


def brute_isomorphic(a, b):
    """Search all bijections of the ground set."""
    if (a.n, a.r, len(a.bases)) != (b.n, b.r, len(b.bases)):
        return False
    target = set(b.bases)
    return any({permute(x, perm) for x in a.bases} == target for perm in permutations(range(a.n)))


def eulerian_formula(m, k):
    from math import comb

    return sum((-1) ** j * comb(m + 1, j) * (k + 1 - j) ** m for j in range(k + 1))


def box_lattice_points(points, member):
    """All integer points in the bounding box of ``points`` accepted by ``member``."""
    from itertools import product

    lo = [min(p[k] for p in points) for k in range(len(points[0]))]
    hi = [max(p[k] for p in points) for k in range(len(points[0]))]
    return sorted(x for x in product(*[range(a, b + 1) for a, b in zip(lo, hi)]) if member(x))


def _solve_square(rows, rhs):
    """Exact solve of a square system; None if singular."""
    from fractions import Fraction

    n = len(rows)
    a = [[Fraction(v) for v in r] + [Fraction(b)] for r, b in zip(rows, rhs)]
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col]), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        for i in range(n):
            if i != col and a[i][col]:
                f = a[i][col] / a[col][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    return [a[i][n] / a[i][i] for i in range(n)]


def brute_lp_optimum(lp):
    """Best objective over all basic feasible points (bounded feasible LPs), or None if none exist."""
    from itertools import combinations

    rows = lp.rows()
    eqs = [(r, b) for r, s, b in rows if s == "="]
    ubs = [(r, b) for r, s, b in rows if s == "<="]
    nv = lp.nvars
    best = None
    for pick in combinations(range(len(ubs)), nv - len(eqs)) if nv >= len(eqs) else []:
        sys_rows = [r for r, _ in eqs] + [ubs[i][0] for i in pick]
        x = _solve_square(sys_rows, [b for _, b in eqs] + [ubs[i][1] for i in pick])
        if x is None or not lp.is_feasible_point(x):
            continue
        v = sum(c * xi for c, xi in zip(lp.objective, x))
        if best is None or (v > best if lp.maximize else v < best):
            best = v
    return best
