"""Matroids given by their basis family over a ground set {0, ..., n-1}.

Subsets are int bitmasks (see :mod:`momega.bitset`).  Everything here is
immutable; derived data is computed lazily and cached on the instance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from math import comb
from typing import Iterable

import numpy as np

from . import bitset
from .bitset import MAX_N, elements, full, ksubsets

# Largest n for which a dense 2^n rank table is built.
TABLE_CAP = 20
TUTTE_CAP = 16
CANONICAL_CAP = 10
MINOR_SEARCH_CAP = 12


class MatroidError(ValueError):
    """Invalid matroid data or an operation outside its domain."""


class SizeCapError(MatroidError):
    """The requested computation exceeds a documented size cap."""


@dataclass(frozen=True)
class FlatRecord:
    elements: int
    rank: int

    def sort_key(self):
        return (self.rank, self.elements.bit_count(), elements(self.elements))

    def __str__(self):
        return f"({{{bitset.fmt(self.elements)}}},{self.rank})"


@dataclass(frozen=True)
class Matroid:
    n: int
    r: int
    bases: frozenset = field(repr=False)

    def __post_init__(self):
        if not 0 <= self.n <= MAX_N:
            raise MatroidError(f"ground set size {self.n} outside 0..{MAX_N}")
        if not self.bases:
            raise MatroidError("empty basis family")
        ground = full(self.n)
        for b in self.bases:
            if b & ~ground or b.bit_count() != self.r:
                raise MatroidError(f"basis {bitset.fmt(b)} is not a subset of size {self.r} of the ground set")

    @classmethod
    def from_bases(cls, n: int, bases: Iterable, check: bool = True) -> "Matroid":
        """Build from masks or iterables of elements; rank is read off the bases."""
        masks = frozenset(b if isinstance(b, int) else bitset.mask(b) for b in bases)
        if not masks:
            raise MatroidError("empty basis family")
        r = next(iter(masks)).bit_count()
        m = cls(n, r, masks)
        if check:
            m.validate()
        return m

    def validate(self) -> None:
        """Raise MatroidError if the basis exchange axiom fails."""
        bases = self.bases
        for b1 in bases:
            for b2 in bases:
                diff = b1 & ~b2
                if not diff:
                    continue
                others = elements(b2 & ~b1)
                for e in elements(diff):
                    base = b1 & ~(1 << e)
                    if not any(base | (1 << f) in bases for f in others):
                        raise MatroidError(
                            f"basis exchange fails for B1={bitset.fmt(b1)}, B2={bitset.fmt(b2)}, e={e}")

    @property
    def ground(self) -> int:
        return full(self.n)

    def __str__(self):
        return format_matroid(self)

    # -- rank oracle -------------------------------------------------------

    @cached_property
    def rank_table(self) -> np.ndarray:
        """rank_table[S] = rank of S, for every subset S (n <= TABLE_CAP)."""
        n = self.n
        if n > TABLE_CAP:
            raise SizeCapError(f"rank table needs n <= {TABLE_CAP}")
        size = 1 << n
        indep = np.zeros(size, dtype=bool)
        indep[np.fromiter(self.bases, dtype=np.int64)] = True
        idx = np.arange(size, dtype=np.int64)
        for e in range(n):
            has = idx[(idx >> e) & 1 == 1]
            indep[has ^ (1 << e)] |= indep[has]
        rank = np.where(indep, bitset.popcounts(n), 0).astype(np.int8)
        for e in range(n):
            has = idx[(idx >> e) & 1 == 1]
            rank[has] = np.maximum(rank[has], rank[has ^ (1 << e)])
        rank.flags.writeable = False
        return rank

    @cached_property
    def _basis_list(self) -> list[int]:
        return sorted(self.bases)

    def rank(self, s: int) -> int:
        if self.n <= TABLE_CAP:
            return int(self.rank_table[s])
        return max((b & s).bit_count() for b in self._basis_list)

    def is_independent(self, s: int) -> bool:
        return self.rank(s) == s.bit_count()

    def closure(self, s: int) -> int:
        rk = self.rank(s)
        out = s
        for e in range(self.n):
            if not s >> e & 1 and self.rank(s | 1 << e) == rk:
                out |= 1 << e
        return out

    def is_flat(self, s: int) -> bool:
        return self.closure(s) == s

    @cached_property
    def loops(self) -> int:
        covered = 0
        for b in self.bases:
            covered |= b
        return self.ground & ~covered

    @cached_property
    def coloops(self) -> int:
        common = self.ground
        for b in self.bases:
            common &= b
        return common

    # -- flats, circuits, cyclic flats -------------------------------------

    @cached_property
    def flats(self) -> tuple[FlatRecord, ...]:
        """All flats, generated as closures of flats extended by one element."""
        if self.n <= TABLE_CAP:
            recs = [FlatRecord(int(s), int(self.rank_table[s])) for s in self._flat_masks_dense()]
        else:
            bottom = self.closure(0)
            level = {bottom}
            found = {bottom}
            for _ in range(self.r):
                nxt = set()
                for f in level:
                    for e in range(self.n):
                        if not f >> e & 1:
                            g = self.closure(f | 1 << e)
                            if g not in found:
                                found.add(g)
                                nxt.add(g)
                level = nxt
            recs = [FlatRecord(f, self.rank(f)) for f in found]
        return tuple(sorted(recs, key=FlatRecord.sort_key))

    def _flat_masks_dense(self) -> np.ndarray:
        n = self.n
        rank = self.rank_table
        idx = np.arange(1 << n, dtype=np.int64)
        is_flat = np.ones(1 << n, dtype=bool)
        for e in range(n):
            out = (idx >> e) & 1 == 0
            is_flat[out] &= rank[idx[out] | (1 << e)] > rank[idx[out]]
        return idx[is_flat]

    @cached_property
    def cyclic_flats(self) -> tuple[FlatRecord, ...]:
        """Flats F with rank(F - e) == rank(F) for every e in F, canonically sorted."""
        out = []
        for f in self.flats:
            if all(self.rank(f.elements & ~(1 << e)) == f.rank for e in elements(f.elements)):
                out.append(f)
        return tuple(out)

    @cached_property
    def circuits(self) -> tuple[int, ...]:
        """Inclusion-minimal dependent sets (all have size <= r + 1)."""
        out = []
        for k in range(1, min(self.r + 1, self.n) + 1):
            for s in ksubsets(self.n, k):
                if self.rank(s) == k - 1 and all(
                        self.rank(s & ~(1 << e)) == k - 1 for e in elements(s)):
                    out.append(s)
        return tuple(out)

    @cached_property
    def girth(self) -> int:
        """Smallest circuit size; n + 1 when the matroid is free."""
        for k in range(1, min(self.r + 1, self.n) + 1):
            for s in ksubsets(self.n, k):
                if self.rank(s) < k:
                    return k
        return self.n + 1

    # -- constructions -----------------------------------------------------

    def dual(self) -> "Matroid":
        g = self.ground
        return Matroid(self.n, self.n - self.r, frozenset(g & ~b for b in self.bases))

    def truncation(self) -> "Matroid":
        if self.r == 0:
            raise MatroidError("rank underflow: cannot truncate a rank-0 matroid")
        return Matroid(self.n, self.r - 1,
                       frozenset(b & ~(1 << e) for b in self.bases for e in elements(b)))

    def relabel(self, perm) -> "Matroid":
        """Image under the element map e -> perm[e]."""
        return Matroid(self.n, self.r, frozenset(bitset.permute(b, perm) for b in self.bases))

    def minor(self, delete: int = 0, contract: int = 0) -> "Matroid":
        """M / contract \\ delete, ground set relabelled 0.. in increasing order."""
        if delete & contract:
            raise MatroidError("delete and contract sets must be disjoint")
        rest = self.ground & ~delete & ~contract
        indep = 0
        for e in elements(contract):
            if self.rank(indep | 1 << e) > indep.bit_count():
                indep |= 1 << e
        k = self.rank(rest | contract) - indep.bit_count()
        keep = elements(rest)
        pos = {e: i for i, e in enumerate(keep)}
        bases = set()
        for b in self.bases:
            if b & indep == indep and (b & rest).bit_count() == k:
                bases.add(bitset.mask(pos[e] for e in elements(b & rest)))
        return Matroid(len(keep), k, frozenset(bases))

    def delete(self, s: int) -> "Matroid":
        return self.minor(delete=s)

    def contract(self, s: int) -> "Matroid":
        return self.minor(contract=s)

    def restrict(self, s: int) -> "Matroid":
        return self.minor(delete=self.ground & ~s)

    # -- connectivity ------------------------------------------------------

    @cached_property
    def components(self) -> tuple[int, ...]:
        """Connected components, via fundamental circuits of one basis."""
        b = min(self.bases)
        parent = list(range(self.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in range(self.n):
            if b >> e & 1:
                continue
            # fundamental circuit of e: e plus those f in b with b - f + e a basis
            for f in elements(b):
                if (b & ~(1 << f)) | 1 << e in self.bases:
                    parent[find(e)] = find(f)
        groups: dict[int, int] = {}
        for e in range(self.n):
            groups[find(e)] = groups.get(find(e), 0) | 1 << e
        return tuple(sorted(groups.values(), key=lambda m: elements(m)))

    @property
    def is_connected(self) -> bool:
        return len(self.components) <= 1


def uniform(r: int, n: int) -> Matroid:
    if not 0 <= r <= n:
        raise MatroidError(f"invalid uniform parameters r={r}, n={n}")
    return Matroid(n, r, frozenset(ksubsets(n, r)))


def direct_sum(m1: Matroid, m2: Matroid) -> Matroid:
    shift = m1.n
    return Matroid(m1.n + m2.n, m1.r + m2.r,
                   frozenset(b1 | b2 << shift for b1 in m1.bases for b2 in m2.bases))


def rank(m: Matroid, s: int) -> int:
    return m.rank(s)


def closure(m: Matroid, s: int) -> int:
    return m.closure(s)


def circuits_and_girth(m: Matroid) -> tuple[list[int], int]:
    return list(m.circuits), m.girth


def cyclic_flats(m: Matroid) -> list[FlatRecord]:
    return list(m.cyclic_flats)


# -- Tutte polynomial and invariants ---------------------------------------

def _rank_size_counts(m: Matroid) -> np.ndarray:
    """counts[k, s] = number of subsets of rank k and size s."""
    pc = bitset.popcounts(m.n).astype(np.int64)
    rk = m.rank_table.astype(np.int64)
    flat = np.bincount(rk * (m.n + 1) + pc, minlength=(m.r + 1) * (m.n + 1))
    return flat.reshape(m.r + 1, m.n + 1)


def tutte(m: Matroid) -> list[list[int]]:
    """Coefficients t[i][j] of x^i y^j in T_M(x, y), by the corank-nullity sum."""
    if m.n > TUTTE_CAP:
        raise SizeCapError(f"tutte size cap: n={m.n} > {TUTTE_CAP}")
    counts = _rank_size_counts(m)
    r, n = m.r, m.n
    # N[a][b]: subsets with corank a and nullity b
    big_n = [[0] * (n - r + 1) for _ in range(r + 1)]
    for k in range(r + 1):
        for s in range(n + 1):
            c = int(counts[k, s])
            if c:
                big_n[r - k][s - k] += c
    t = [[0] * (n - r + 1) for _ in range(r + 1)]
    for a in range(r + 1):
        for b in range(n - r + 1):
            c = big_n[a][b]
            if not c:
                continue
            for i in range(a + 1):
                ci = comb(a, i) * (-1) ** (a - i)
                for j in range(b + 1):
                    t[i][j] += c * ci * comb(b, j) * (-1) ** (b - j)
    return t


def tutte_eval(t: list[list[int]], x, y):
    return sum(c * x ** i * y ** j for i, row in enumerate(t) for j, c in enumerate(row))


def beta_alternating(m: Matroid) -> int:
    """Crapo's beta as (-1)^r sum_S (-1)^|S| rank(S)."""
    pc = bitset.popcounts(m.n).astype(np.int64)
    sign = 1 - 2 * (pc & 1)
    total = int(np.sum(sign * m.rank_table.astype(np.int64)))
    return (-1) ** m.r * total


@dataclass(frozen=True)
class InvariantVector:
    bases_count: int
    independent_counts: tuple[int, ...]
    flats_by_rank_size: dict
    circuits_by_size: dict
    whitney: tuple[int, ...]
    tutte: tuple[tuple[int, ...], ...] | None
    beta: int
    girth: int
    connected: bool

    def valuative_part(self):
        """The fields that are valuative invariants, as a hashable tuple."""
        return (self.bases_count, self.independent_counts,
                tuple(sorted(self.flats_by_rank_size.items())),
                tuple(sorted(self.circuits_by_size.items())), self.whitney, self.tutte, self.beta)


def invariant_vector(m: Matroid) -> InvariantVector:
    if m.n > TABLE_CAP and m.r > 3:
        raise SizeCapError(f"invariant counts need n <= {TABLE_CAP} or rank <= 3")
    indep = [0] * (m.r + 1)
    if m.n <= TABLE_CAP:
        counts = _rank_size_counts(m)
        for k in range(m.r + 1):
            indep[k] = int(counts[k, k])
    else:
        for k in range(m.r + 1):
            indep[k] = sum(1 for s in ksubsets(m.n, k) if m.rank(s) == k)
    flats: dict[tuple[int, int], int] = {}
    for f in m.flats:
        key = (f.rank, f.elements.bit_count())
        flats[key] = flats.get(key, 0) + 1
    circ: dict[int, int] = {}
    for c in m.circuits:
        circ[c.bit_count()] = circ.get(c.bit_count(), 0) + 1
    whitney = tuple(sum(v for (k, _), v in flats.items() if k == i) for i in range(m.r + 1))
    if m.n <= TUTTE_CAP:
        t = tutte(m)
        tt = tuple(tuple(row) for row in t)
        beta = t[1][0] if m.r >= 1 else 0
    else:
        tt = None
        beta = beta_alternating(m)
    return InvariantVector(
        bases_count=len(m.bases),
        independent_counts=tuple(indep),
        flats_by_rank_size=flats,
        circuits_by_size=circ,
        whitney=whitney,
        tutte=tt,
        beta=beta,
        girth=m.girth,
        connected=m.is_connected,
    )


# -- classification ----------------------------------------------------------

@dataclass(frozen=True)
class Classification:
    simple: bool
    loopless: bool
    paving: bool
    copaving: bool
    sparse_paving: bool
    elementary_split: bool | None
    modular: bool
    connected: bool
    series_parallel: bool


def is_paving(m: Matroid) -> bool:
    return m.girth >= m.r


def has_split_obstruction_minor(m: Matroid) -> bool:
    """Whether U_{0,1} + U_{1,1} + U_{1,2} is a minor of m (exhaustive search)."""
    if m.n > MINOR_SEARCH_CAP:
        raise SizeCapError(f"minor search needs n <= {MINOR_SEARCH_CAP}")
    if m.n < 4:
        return False
    rk = m.rank
    for t in combinations(range(m.n), 4):
        tm = bitset.mask(t)
        rest = elements(m.ground & ~tm)
        for k in range(len(rest) + 1):
            for c in combinations(rest, k):
                cm = bitset.mask(c)
                base = rk(cm)
                if rk(tm | cm) - base != 2:
                    continue
                loops = sum(1 for e in t if rk(cm | 1 << e) == base)
                if loops != 1:
                    continue
                coloops = sum(1 for e in t if rk((tm & ~(1 << e)) | cm) - base == 1)
                if coloops == 1:
                    return True
    return False


def nontrivial_cyclic_flats(m: Matroid) -> list[int]:
    """Cyclic flats other than the empty set and the whole ground set."""
    return [z.elements for z in m.cyclic_flats if z.elements not in (0, m.ground)]


def cyclic_flats_incomparable(m: Matroid) -> bool:
    zs = nontrivial_cyclic_flats(m)
    return all(a & b not in (a, b) for a, b in combinations(zs, 2))


def is_elementary_split(m: Matroid) -> bool:
    return not has_split_obstruction_minor(m)


def is_modular(m: Matroid) -> bool:
    fl = m.flats
    for i, f1 in enumerate(fl):
        for f2 in fl[i + 1:]:
            if f1.rank + f2.rank != m.rank(f1.elements & f2.elements) + m.rank(f1.elements | f2.elements):
                return False
    return True


def is_series_parallel(m: Matroid) -> bool:
    """Connected and reducible to one element by removing parallel or series pairs.

    Removing one element of a parallel pair (deletion) or of a series pair
    (contraction) preserves the class, so a greedy reduction decides it.
    """
    while m.n > 1:
        if not m.is_connected:
            return False
        pair = next((c for c in m.circuits if c.bit_count() == 2), None)
        if pair is not None:
            m = m.delete(pair & -pair)
            continue
        cos = next((c for c in m.dual().circuits if c.bit_count() == 2), None)
        if cos is None:
            return False
        m = m.contract(cos & -cos)
    return True


def classify(m: Matroid) -> Classification:
    g = m.girth
    paving = g >= m.r
    copaving = m.dual().girth >= m.n - m.r
    connected = m.is_connected
    split = is_elementary_split(m) if m.n <= MINOR_SEARCH_CAP else None
    return Classification(
        simple=g >= 3,
        loopless=g >= 2,
        paving=paving,
        copaving=copaving,
        sparse_paving=paving and copaving,
        elementary_split=split,
        modular=is_modular(m),
        connected=connected,
        series_parallel=m.n >= 2 and is_series_parallel(m),
    )


# -- isomorphism ---------------------------------------------------------------

def _element_invariants(m: Matroid) -> list[tuple]:
    deg = [0] * m.n
    pair = [[0] * m.n for _ in range(m.n)]
    for b in m.bases:
        els = elements(b)
        for e in els:
            deg[e] += 1
        for e, f in combinations(els, 2):
            pair[e][f] += 1
            pair[f][e] += 1
    return [(deg[e], tuple(sorted(pair[e][f] for f in range(m.n) if f != e))) for e in range(m.n)]


def _twin_classes(m: Matroid) -> list[int]:
    """twin[e] = smallest f such that swapping e and f is an automorphism."""
    twin = list(range(m.n))
    for e in range(m.n):
        if twin[e] != e:
            continue
        for f in range(e + 1, m.n):
            if twin[f] != f:
                continue
            sw = (1 << e) | (1 << f)
            if all((b & sw) in (0, sw) or (b ^ sw) in m.bases for b in m.bases):
                twin[f] = e
    return twin


def canonical_key(m: Matroid) -> str:
    """``n:r:string``: the lexicographically least revlex ``*``/``0`` basis string
    over relabellings that list elements in ascending order of an isomorphism
    invariant (basis degree, then sorted pair degrees).

    Restricting the search this way keeps the key a function of the
    isomorphism class while pruning most permutations; it need not equal the
    minimum over all n! relabellings.
    """
    n, r = m.n, m.r
    if n > CANONICAL_CAP:
        raise SizeCapError(f"canonicalization size cap: n={n} > {CANONICAL_CAP}")
    if r == 0:
        return f"{n}:0:*"
    inv = _element_invariants(m)
    order = sorted(range(n), key=lambda e: inv[e])
    slot_class = [inv[e] for e in order]
    twin = _twin_classes(m)
    bases = m.bases
    # (r-1)-subsets of labels {0..k-1}, ascending mask order, as label tuples
    chunks = [[tuple(elements(s)) for s in ksubsets(k, r - 1)] for k in range(n)]

    frontier: list[tuple[tuple[int, ...], int]] = [((), 0)]  # (labelled elements, used mask)
    prefix: list[tuple[int, ...]] = []
    for k in range(n):
        best = None
        nxt = []
        for assigned, used in frontier:
            seen_twin = set()
            for x in range(n):
                if used >> x & 1 or inv[x] != slot_class[k]:
                    continue
                t = twin[x]
                if t in seen_twin:
                    continue
                seen_twin.add(t)
                chunk = tuple(
                    0 if (bitset.mask(assigned[i] for i in sub) | 1 << x) in bases else 1
                    for sub in chunks[k])
                if best is None or chunk < best:
                    best = chunk
                    nxt = [(assigned + (x,), used | 1 << x)]
                elif chunk == best:
                    nxt.append((assigned + (x,), used | 1 << x))
        frontier = nxt
        prefix.append(best)
    bits = "".join("*" if c == 0 else "0" for chunk in prefix for c in chunk)
    return f"{n}:{r}:{bits}"


def is_isomorphic(m1: Matroid, m2: Matroid) -> bool:
    if (m1.n, m1.r, len(m1.bases)) != (m2.n, m2.r, len(m2.bases)):
        return False
    return canonical_key(m1) == canonical_key(m2)


def matroid_from_key(key: str) -> Matroid:
    n, r, bits = key.split(":")
    n, r = int(n), int(r)
    subs = ksubsets(n, r)
    return Matroid(n, r, frozenset(s for s, c in zip(subs, bits) if c == "*"))


# -- text format -----------------------------------------------------------------

def format_matroid(m: Matroid) -> str:
    """``<n> <r> <basis> ...`` with bases in revlex order."""
    return " ".join([str(m.n), str(m.r)] + [bitset.fmt(b) for b in sorted(m.bases)])


def parse_matroid(line: str, check: bool = True) -> Matroid:
    toks = line.split()
    if len(toks) < 3:
        raise MatroidError(f"expected '<n> <r> <basis> ...', got {line!r}")
    try:
        n, r = int(toks[0]), int(toks[1])
        bases = frozenset(bitset.parse(t) for t in toks[2:])
    except ValueError as exc:
        raise MatroidError(f"malformed matroid line {line!r}: {exc}") from None
    m = Matroid(n, r, bases)
    if check:
        m.validate()
    return m


def read_matroids(lines: Iterable[str], check: bool = True) -> list[Matroid]:
    out = []
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            out.append(parse_matroid(line, check=check))
        except MatroidError as exc:
            raise MatroidError(f"line {lineno}: {exc}") from None
    return out
