"""Where matroids come from: exhaustive generation, revlex ingestion, named constructions."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Iterable, Iterator

from . import bitset
from .bitset import elements, ksubsets
from .matroid import (
    CANONICAL_CAP,
    Matroid,
    MatroidError,
    SizeCapError,
    canonical_key,
    matroid_from_key,
    uniform,
)
from .schubert import CyclicFlatChain, schubert_from_chain

DFS_CAP = 6
RANK2_CAP = 10
RANK3_CAP = 8


class CatalogError(MatroidError):
    pass


@dataclass(frozen=True)
class CatalogEntry:
    matroid: Matroid
    key: str
    source: str  # "generated" | "ingested" | "constructed"

    @classmethod
    def of(cls, m: Matroid, source: str) -> "CatalogEntry":
        return cls(m, canonical_key(m), source)


# -- exhaustive generation ------------------------------------------------------

def _exchange_requirements(n: int, r: int):
    """For each decision index t, the exchange conditions that become decidable at t.

    A condition (i, j, cands) fails iff subsets i and j are bases and no subset in
    cands is.
    """
    subs = ksubsets(n, r)
    idx = {s: i for i, s in enumerate(subs)}
    reqs: list[list[tuple[int, int, tuple[int, ...]]]] = [[] for _ in subs]
    for i, b1 in enumerate(subs):
        for j, b2 in enumerate(subs):
            if i == j:
                continue
            diff = elements(b2 & ~b1)
            for e in elements(b1 & ~b2):
                cands = tuple(idx[(b1 & ~(1 << e)) | (1 << f)] for f in diff)
                reqs[max(i, j, *cands)].append((i, j, cands))
    return subs, reqs


def generate_labelled(r: int, n: int) -> Iterator[Matroid]:
    """Every matroid of rank r on {0..n-1}, each labelled matroid exactly once.

    Depth-first over the r-subsets in revlex order, deciding basis or not and
    rejecting a branch as soon as an exchange condition is fully decided and fails.
    """
    if not 0 <= r <= n:
        raise CatalogError(f"need 0 <= r <= n, got r={r}, n={n}")
    if n > DFS_CAP and min(r, n - r) > 1:
        raise SizeCapError(f"exhaustive generation is capped at n <= {DFS_CAP}; ingest a revlex census instead")
    subs, reqs = _exchange_requirements(n, r)
    state = [False] * len(subs)
    out: list[int] = []

    def ok(t):
        for i, j, cands in reqs[t]:
            if state[i] and state[j] and not any(state[c] for c in cands):
                return False
        return True

    def rec(t):
        if t == len(subs):
            if out:
                yield Matroid.from_bases(n, out, check=False)
            return
        for choice in (True, False):
            state[t] = choice
            if choice:
                out.append(subs[t])
            if ok(t):
                yield from rec(t + 1)
            if choice:
                out.pop()
        state[t] = False

    yield from rec(0)


def _partitions(total: int, min_parts: int, max_part: int | None = None) -> Iterator[list[int]]:
    """Partitions of ``total`` into at least ``min_parts`` positive parts, non-increasing."""
    max_part = total if max_part is None else max_part

    def rec(rem, cap, acc):
        if rem == 0:
            if len(acc) >= min_parts:
                yield list(acc)
            return
        for p in range(min(rem, cap), 0, -1):
            acc.append(p)
            yield from rec(rem - p, p, acc)
            acc.pop()

    yield from rec(total, max_part, [])


def _rank_le1(r: int, n: int) -> list[Matroid]:
    if r == 0:
        return [Matroid.from_bases(n, [0], check=False)]
    # rank 1: the first n - k elements are parallel, the last k are loops
    return [Matroid.from_bases(n, [1 << e for e in range(n - k)], check=False) for k in range(n)]


def _rank2(n: int) -> list[Matroid]:
    out = []
    for loops in range(n - 1):
        for parts in _partitions(n - loops, 2):
            label = []
            for c, size in enumerate(parts):
                label += [c] * size
            bases = [(1 << a) | (1 << b) for a, b in combinations(range(n - loops), 2) if label[a] != label[b]]
            out.append(Matroid.from_bases(n, bases, check=False))
    return out


def generate_all(r: int, n: int, method: str = "auto") -> list[CatalogEntry]:
    """One representative per isomorphism class of rank-r matroids on n elements.

    ``method`` is "closed" (rank or corank at most 2), "dfs" (n <= 6), or "auto".
    Representatives are the canonical relabellings, sorted by canonical key.
    """
    if not 0 <= r <= n:
        raise CatalogError(f"need 0 <= r <= n, got r={r}, n={n}")
    low = min(r, n - r)
    if method == "auto":
        method = "closed" if low <= 2 else "dfs"
    if method == "closed":
        if low > 2:
            raise CatalogError("closed-form generation needs rank or corank at most 2")
        if low == 2 and n > RANK2_CAP:
            raise SizeCapError(f"rank-2 generation is capped at n <= {RANK2_CAP}; ingest a revlex census instead")
        if n > bitset.MAX_N:
            raise SizeCapError(f"n <= {bitset.MAX_N} required")
        base = _rank_le1(low, n) if low <= 1 else _rank2(n)
        ms = base if low == r else [m.dual() for m in base]
        if n > CANONICAL_CAP:
            # classes are distinct by construction; keys are not computable here
            return [CatalogEntry(m, f"{n}:{r}:#{i}", "generated") for i, m in enumerate(ms)]
        return dedupe_classes([CatalogEntry.of(m, "generated") for m in ms])
    if method == "dfs":
        if n > DFS_CAP:
            raise SizeCapError(
                f"exhaustive generation is capped at n <= {DFS_CAP}; ingest a revlex census instead (--catalog FILE)")
        seen: dict[str, Matroid] = {}
        for m in generate_labelled(r, n):
            k = canonical_key(m)
            if k not in seen:
                seen[k] = m
        return [CatalogEntry(matroid_from_key(k), k, "generated") for k in sorted(seen)]
    raise CatalogError(f"unknown generation method {method!r}")


def generate_up_to(max_n: int) -> dict[tuple[int, int], list[CatalogEntry]]:
    return {(r, n): generate_all(r, n) for n in range(max_n + 1) for r in range(n + 1)}


# -- rank 3 via single-element extensions (census builder) --------------------------

def _lines(m: Matroid) -> list[int]:
    return [f.elements for f in m.flats if f.rank == 2]


def _simple_rank3(k: int) -> dict[int, list[Matroid]]:
    """Simple rank-3 matroids on j <= k points, one per class, keyed by j.

    In rank 3 a simple single-element extension puts the new point on a family of
    pairwise disjoint lines, and every simple rank-3 matroid on j >= 4 points is
    such an extension of one on j - 1 points.
    """
    levels = {3: [uniform(3, 3)]}
    for j in range(4, k + 1):
        seen: dict[str, Matroid] = {}
        p = 1 << (j - 1)
        for m in levels[j - 1]:
            lines = _lines(m)

            def rec(i, chosen, used):
                yield list(chosen)
                for t in range(i, len(lines)):
                    if lines[t] & used == 0:
                        chosen.append(lines[t])
                        yield from rec(t + 1, chosen, used | lines[t])
                        chosen.pop()

            for family in rec(0, [], 0):
                on = [ln | p for ln in family]
                bases = [t for t in ksubsets(j, 3)
                         if m.rank(t & ~p) == 3 or (t & p and not any(t & ~ln == 0 for ln in on)
                                                     and m.rank(t & ~p) == 2)]
                ext = Matroid.from_bases(j, bases, check=False)
                seen.setdefault(canonical_key(ext), ext)
        levels[j] = [matroid_from_key(key) for key in sorted(seen)]
    return levels


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    for cuts in combinations(range(1, total), parts - 1):
        b = (0,) + cuts + (total,)
        yield tuple(b[i + 1] - b[i] for i in range(parts))


def generate_rank3(n: int) -> list[CatalogEntry]:
    """All rank-3 classes on n <= 8 elements: loops, parallel classes, simple core."""
    if n > RANK3_CAP:
        raise SizeCapError(f"rank-3 generation is capped at n <= {RANK3_CAP}")
    if n < 3:
        raise CatalogError("rank 3 needs n >= 3")
    cores = _simple_rank3(n)
    seen: dict[str, Matroid] = {}
    for loops in range(n - 2):
        live = n - loops
        for k in range(3, live + 1):
            for sizes in _compositions(live, k):
                owner = [c for c, s in enumerate(sizes) for _ in range(s)]
                for core in cores[k]:
                    bases = []
                    for t in combinations(range(live), 3):
                        img = {owner[e] for e in t}
                        if len(img) == 3 and bitset.mask(img) in core.bases:
                            bases.append(bitset.mask(t))
                    m = Matroid.from_bases(n, bases, check=False)
                    seen.setdefault(canonical_key(m), m)
    return [CatalogEntry(matroid_from_key(k), k, "generated") for k in sorted(seen)]


# -- revlex ingestion ---------------------------------------------------------------

def revlex_string(m: Matroid) -> str:
    return "".join("*" if s in m.bases else "0" for s in ksubsets(m.n, m.r))


def from_revlex(text: str, n: int, r: int, check: bool = True) -> Matroid:
    subs = ksubsets(n, r)
    text = text.strip()
    if len(text) != len(subs):
        raise CatalogError(f"revlex string has length {len(text)}, expected C({n},{r}) = {len(subs)}")
    bad = set(text) - {"*", "0"}
    if bad:
        raise CatalogError(f"revlex string has characters other than '*' and '0': {''.join(sorted(bad))}")
    return Matroid.from_bases(n, [s for s, ch in zip(subs, text) if ch == "*"], check=check)


def ingest_revlex(stream: Iterable[str], n: int | None = None, r: int | None = None) -> list[CatalogEntry]:
    """Parse a revlex census, one matroid per line; duplicates collapse to one class.

    An optional ``# n=<n> r=<r>`` header supplies parameters not given as arguments.
    """
    entries = []
    for lineno, raw in enumerate(stream, 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            fields = dict(tok.split("=", 1) for tok in line[1:].split() if "=" in tok)
            if "n" in fields and n is None:
                n = int(fields["n"])
            if "r" in fields and r is None:
                r = int(fields["r"])
            continue
        if n is None or r is None:
            raise CatalogError(f"line {lineno}: parameters n and r unknown (no header and none given)")
        try:
            m = from_revlex(line, n, r)
        except MatroidError as exc:
            raise CatalogError(f"line {lineno}: {exc}") from None
        entries.append(CatalogEntry.of(m, "ingested"))
    return dedupe_classes(entries)


def write_revlex(entries: Iterable[CatalogEntry], n: int, r: int) -> str:
    lines = [f"# n={n} r={r}"] + [revlex_string(e.matroid) for e in entries]
    return "\n".join(lines) + "\n"


def dedupe_classes(entries) -> list[CatalogEntry]:
    """One entry per canonical key, sorted by key; accepts Matroids or CatalogEntries."""
    items = [e if isinstance(e, CatalogEntry) else CatalogEntry.of(e, "constructed") for e in entries]
    if not items:
        return []
    params = {(e.matroid.n, e.matroid.r) for e in items}
    if len(params) > 1:
        raise CatalogError(f"entries with mixed (n, r): {sorted(params)}")
    out: dict[str, CatalogEntry] = {}
    for e in items:
        out.setdefault(e.key, e)
    return [out[k] for k in sorted(out)]


# -- named constructions ------------------------------------------------------------------

FANO_LINES = ((0, 1, 2), (0, 3, 4), (0, 5, 6), (1, 3, 5), (1, 4, 6), (2, 3, 6), (2, 4, 5))


def minimal_chain(r: int, n: int) -> CyclicFlatChain:
    """Hook-shaped chain: the first n - r elements form a rank-1 cyclic flat."""
    if not 0 <= r <= n:
        raise CatalogError(f"need 0 <= r <= n, got r={r}, n={n}")
    full = bitset.full(n)
    if r == 0:
        return CyclicFlatChain(n, 0, ((full, 0),))
    if r == n:
        return CyclicFlatChain(n, n, ((0, 0),))
    if r == 1 or n - r == 1:
        return CyclicFlatChain(n, r, ((0, 0), (full, r)))
    return CyclicFlatChain(n, r, ((0, 0), (bitset.full(n - r), 1), (full, r)))


def thickening2(r: int, n: int) -> Matroid:
    """U_{r,n} with each element i replaced by the parallel pair {2i, 2i+1}."""
    if not 0 <= r <= n or 2 * n > bitset.MAX_N:
        raise CatalogError(f"invalid parameters for thickening: r={r}, n={n}")
    bases = []
    for b in ksubsets(n, r):
        els = elements(b)
        for pick in range(1 << r):
            bases.append(bitset.mask(2 * e + ((pick >> i) & 1) for i, e in enumerate(els)))
    return Matroid.from_bases(2 * n, bases, check=False)


def fano() -> Matroid:
    return lines_matroid(7, [bitset.mask(ln) for ln in FANO_LINES])


def lines_matroid(n: int, lines: list[int]) -> Matroid:
    """Rank-3 paving matroid whose dependent 3-sets are those inside one of ``lines``."""
    bases = [t for t in ksubsets(n, 3) if not any(t & ~ln == 0 for ln in lines)]
    return Matroid.from_bases(n, bases, check=False)


def construct_named(name: str, r: int | None = None, n: int | None = None) -> Matroid:
    if name == "fano":
        return fano()
    if r is None or n is None:
        raise CatalogError(f"{name} needs parameters r and n")
    if not 0 <= r <= n or n > bitset.MAX_N:
        raise CatalogError(f"invalid parameters r={r}, n={n}")
    if name == "uniform":
        return uniform(r, n)
    if name == "minimal":
        return schubert_from_chain(minimal_chain(r, n))
    if name == "thickening2":
        return thickening2(r, n)
    raise CatalogError(f"unknown named matroid {name!r}; known: uniform, minimal, thickening2, fano")


def graphic_matroid(edges: list[tuple[int, int]]) -> Matroid:
    """Cycle matroid of a multigraph: bases are the maximal spanning forests."""
    if len(edges) > bitset.MAX_N:
        raise SizeCapError(f"at most {bitset.MAX_N} edges")

    def forest_rank(sub):
        parent = {}

        def find(v):
            while parent.setdefault(v, v) != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        rank = 0
        for e in sub:
            a, b = find(edges[e][0]), find(edges[e][1])
            if a != b:
                parent[a] = b
                rank += 1
        return rank

    n = len(edges)
    r = forest_rank(range(n))
    bases = [b for b in ksubsets(n, r) if forest_rank(elements(b)) == r]
    return Matroid.from_bases(n, bases, check=False)


def complete_graph_edges(k: int) -> list[tuple[int, int]]:
    return list(combinations(range(k), 2))


# -- latin squares ---------------------------------------------------------------------

def _normalize_square(square) -> list[list[int]]:
    rows = [list(map(int, row)) for row in square]
    if len(rows) != 6 or any(len(row) != 6 for row in rows):
        raise CatalogError("Latin square must be 6 x 6")
    lo = min(min(row) for row in rows)
    rows = [[v - lo for v in row] for row in rows]
    symbols = set(range(6))
    for i in range(6):
        if set(rows[i]) != symbols:
            raise CatalogError(f"row {i + 1} is not a permutation of six symbols")
        if {rows[j][i] for j in range(6)} != symbols:
            raise CatalogError(f"column {i + 1} is not a permutation of six symbols")
    return rows


def cyclic_square(k: int = 6) -> list[list[int]]:
    return [[(i + j) % k for j in range(k)] for i in range(k)]


def s3_square() -> list[list[int]]:
    """Cayley table of the symmetric group on three letters."""
    from itertools import permutations

    perms = list(permutations(range(3)))

    def mul(p, q):
        return tuple(p[q[i]] for i in range(3))

    return [[perms.index(mul(p, q)) for q in perms] for p in perms]


def intercalates(square) -> int:
    """Number of 2 x 2 Latin subsquares; an isotopy invariant."""
    L = _normalize_square(square)
    count = 0
    for i1, i2 in combinations(range(6), 2):
        for j1, j2 in combinations(range(6), 2):
            if L[i1][j1] == L[i2][j2] and L[i1][j2] == L[i2][j1]:
                count += 1
    return count


def latin_square_lines(square) -> list[int]:
    L = _normalize_square(square)
    x, row, col, sym = 0, 1, 7, 13
    lines = [bitset.mask([x] + [base + i for i in range(6)]) for base in (row, col, sym)]
    for i in range(6):
        for j in range(6):
            lines.append(bitset.mask([row + i, col + j, sym + L[i][j]]))
    return lines


def latin_square_matroid(square) -> Matroid:
    """Rank-3 paving matroid on 19 points: x, rows, columns, symbols.

    Elements are x = 0, rows 1..6, columns 7..12, symbols 13..18.  Lines are the
    three 7-point lines through x and one 3-point line per cell.
    """
    lines = latin_square_lines(square)
    n = 19
    covered = {}
    for ln in lines:
        for p in combinations(elements(ln), 2):
            if p in covered:
                raise CatalogError("two lines share two points")
            covered[p] = ln
    if len(covered) != comb(n, 2):
        raise CatalogError("some pair of points lies on no line")
    m = lines_matroid(n, lines)
    sizes = sorted(ln.bit_count() for ln in lines)
    assert sizes.count(7) == 3 and sizes.count(3) == 36 and len(sizes) == 39
    assert m.r == 3 and m.girth >= 3
    return m
