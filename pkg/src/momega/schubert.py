"""Schubert (nested) matroid expansions of base-polytope indicator functions.

A matroid's indicator function is an integer combination of Schubert matroid
indicators, one term per chain of cyclic flats running from the minimal to the
maximal cyclic flat.  The coefficient of a chain C is -mu(C, top) in the poset
of such chains with an artificial top adjoined.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from math import comb, factorial
from typing import Iterator

import numpy as np

from . import bitset
from .bitset import elements, full
from .matroid import Matroid, MatroidError, SizeCapError, TABLE_CAP

LABELLED_COUNT_CAP = 12


@dataclass(frozen=True, order=True)
class SchubertProfile:
    """Label-free signature of a chain: its (size, rank) pairs, bottom to top."""

    n: int
    r: int
    signature: tuple[tuple[int, int], ...]

    def sort_key(self):
        return (len(self.signature), self.signature)

    def __str__(self):
        return "|".join(f"{s}:{k}" for s, k in self.signature)

    @classmethod
    def parse(cls, text: str, n: int, r: int) -> "SchubertProfile":
        sig = tuple(tuple(int(v) for v in part.split(":")) for part in text.split("|"))
        return cls(n, r, sig)

    def dual(self) -> "SchubertProfile":
        n, r = self.n, self.r
        return SchubertProfile(n, n - r, tuple((n - s, n - s - r + k) for s, k in reversed(self.signature)))

    @property
    def girth(self) -> int:
        sig = self.signature
        if sig[0][0] > 0:
            return 1
        if len(sig) == 1:
            return self.n + 1
        return sig[1][1] + 1

    def labellings(self) -> int:
        """Number of labelled chains with this profile."""
        sizes = [s for s, _ in self.signature] + [self.n]
        out = factorial(self.n) // factorial(sizes[0])
        for a, b in zip(sizes, sizes[1:]):
            out //= factorial(b - a)
        return out


@dataclass(frozen=True)
class CyclicFlatChain:
    n: int
    r: int
    entries: tuple[tuple[int, int], ...]  # (subset mask, rank), bottom to top

    def sort_key(self):
        return (len(self.entries), [(elements(z), k) for z, k in self.entries])

    @property
    def profile(self) -> SchubertProfile:
        return SchubertProfile(self.n, self.r, tuple((z.bit_count(), k) for z, k in self.entries))

    def __str__(self):
        return "|".join(f"{bitset.fmt(z)}:{k}" for z, k in self.entries)

    @classmethod
    def parse(cls, text: str, n: int, r: int) -> "CyclicFlatChain":
        entries = []
        for part in text.split("|"):
            z, k = part.rsplit(":", 1)
            entries.append((bitset.parse(z), int(k)))
        return cls(n, r, tuple(entries))

    def is_valid(self) -> bool:
        """Ranks and nullities strictly increase; everything above the top is a coloop."""
        ent = self.entries
        if not ent or ent[0][1] != 0:
            return False
        for (z1, k1), (z2, k2) in zip(ent, ent[1:]):
            if z1 & ~z2 or z1 == z2 or k2 <= k1 or z2.bit_count() - k2 <= z1.bit_count() - k1:
                return False
        top, k = ent[-1]
        return self.n - top.bit_count() == self.r - k and top & ~full(self.n) == 0


@dataclass(frozen=True)
class SchubertExpansion:
    kind: str  # "labelled" or "symmetrized"
    n: int
    r: int
    coefficients: dict

    def total(self) -> int:
        return sum(self.coefficients.values())

    def sorted_items(self):
        return sorted(self.coefficients.items(), key=lambda kv: kv[0].sort_key())

    def __str__(self):
        return " ".join(f"{k}={v}" for k, v in self.sorted_items())


# -- chain lattice -------------------------------------------------------------

def chain_lattice(m: Matroid) -> list[CyclicFlatChain]:
    """Chains of cyclic flats containing the minimal and maximal cyclic flats."""
    zs = [(f.elements, f.rank) for f in m.cyclic_flats]
    bottom, top = zs[0], zs[-1]
    middle = zs[1:-1]
    out = []

    def extend(chain):
        last = chain[-1][0]
        if bottom == top:
            out.append(chain)
            return
        out.append(chain + [top])
        for z in middle:
            if z[0] != last and z[0] & last == last and z[0] & top[0] == z[0] and z[0] != top[0]:
                extend(chain + [z])

    extend([bottom])
    chains = [CyclicFlatChain(m.n, m.r, tuple(c)) for c in out]
    return sorted(chains, key=CyclicFlatChain.sort_key)


def _contains(d: CyclicFlatChain, c: CyclicFlatChain) -> bool:
    return set(c.entries) <= set(d.entries)


def lambda_closed_form(chains: list[CyclicFlatChain]) -> dict[CyclicFlatChain, int]:
    """lambda_C = sum over chains D containing C of (-1)^(|D| - |C|)."""
    out = {}
    for c in chains:
        sc = set(c.entries)
        out[c] = sum((-1) ** (len(d.entries) - len(c.entries)) for d in chains if sc <= set(d.entries))
    return out


def lambda_mobius(chains: list[CyclicFlatChain]) -> dict[CyclicFlatChain, int]:
    """lambda_C = -mu(C, top) by the defining recursion of the Mobius function."""
    out = {}
    for c in chains:
        above = sorted((d for d in chains if _contains(d, c)), key=lambda d: len(d.entries))
        mu = {}
        for d in above:
            if d == c:
                mu[d] = 1
            else:
                mu[d] = -sum(mu[e] for e in above if e in mu and _contains(d, e))
        out[c] = sum(mu.values())  # -mu(C, top) = sum_{C <= E < top} mu(C, E)
    return out


def lambda_coefficients(m: Matroid, check: bool = True) -> dict[CyclicFlatChain, int]:
    chains = chain_lattice(m)
    lam = lambda_closed_form(chains)
    if check:
        rec = lambda_mobius(chains)
        if rec != lam:
            raise AssertionError(f"Mobius recursion disagrees with closed form for {m}")
    return {c: v for c, v in lam.items() if v}


# -- Schubert matroids --------------------------------------------------------------

def schubert_from_chain(chain: CyclicFlatChain, check: bool = True) -> Matroid:
    """The matroid whose bases are the r-sets B with |B & Z| <= rank(Z) along the chain."""
    ent = chain.entries
    bases = frozenset(b for b in bitset.ksubsets(chain.n, chain.r)
                      if all((b & z).bit_count() <= k for z, k in ent))
    if not bases:
        raise MatroidError(f"empty basis family for chain {chain}")
    m = Matroid(chain.n, chain.r, bases)
    if check:
        got = tuple((f.elements, f.rank) for f in m.cyclic_flats)
        if got != tuple(ent):
            raise MatroidError(f"chain {chain} is not the cyclic-flat chain of its Schubert matroid")
    return m


def schubert_rank(chain: CyclicFlatChain, x: int) -> int:
    return min([chain.r] + [k + (x & ~z).bit_count() for z, k in chain.entries])


def representative_chain(p: SchubertProfile) -> CyclicFlatChain:
    """The chain of initial segments {0..s-1} realizing a profile."""
    return CyclicFlatChain(p.n, p.r, tuple(((1 << s) - 1, k) for s, k in p.signature))


def schubert_from_profile(p: SchubertProfile) -> Matroid:
    return schubert_from_chain(representative_chain(p))


def schubert_from_path(path: str) -> Matroid:
    """Schubert matroid drawn as a lattice path matroid with upper path ``path``.

    ``path`` is a word in N (up) and E (right) steps; the lower path is the
    bottom-right border.  Bases are the r-sets b_1 < ... < b_r with b_i >= u_i,
    where u_i is the position of the i-th N step (element i is position i + 1).
    """
    path = path.upper()
    n = len(path)
    ups = [i for i, s in enumerate(path) if s == "N"]
    r = len(ups)
    bases = frozenset(bitset.mask(c) for c in combinations(range(n), r)
                      if all(b >= u for b, u in zip(c, ups)))
    return Matroid(n, r, bases)


def profile_of_path(path: str) -> SchubertProfile:
    m = schubert_from_path(path)
    return SchubertProfile(m.n, m.r, tuple((f.elements.bit_count(), f.rank) for f in m.cyclic_flats))


# -- expansions -------------------------------------------------------------------------

def expansion_labelled(m: Matroid, check: bool = False) -> SchubertExpansion:
    lam = lambda_coefficients(m, check=check)
    return SchubertExpansion("labelled", m.n, m.r, lam)


def symmetrize(e: SchubertExpansion) -> SchubertExpansion:
    out: dict[SchubertProfile, int] = {}
    for c, v in e.coefficients.items():
        p = c.profile
        out[p] = out.get(p, 0) + v
    return SchubertExpansion("symmetrized", e.n, e.r, {p: v for p, v in out.items() if v})


def expansion_symmetrized(m: Matroid, verify_seed: int | None = None) -> SchubertExpansion:
    """Labelled coefficients summed over chains with equal profiles.

    With ``verify_seed`` set, the result is recomputed for a random relabelling
    of ``m`` and the two are asserted equal.
    """
    out = symmetrize(expansion_labelled(m))
    if verify_seed is not None:
        perm = list(range(m.n))
        random.Random(verify_seed).shuffle(perm)
        other = symmetrize(expansion_labelled(m.relabel(perm)))
        if other.coefficients != out.coefficients:
            raise AssertionError(f"symmetrized expansion not relabelling invariant for {m}")
    return out


# -- profiles and labelled counts -----------------------------------------------------

def enumerate_profiles(r: int, n: int, min_girth: int | None = None) -> list[SchubertProfile]:
    """All Schubert profiles for (r, n), in canonical order.

    A profile is a pair of strictly increasing sequences: ranks 0 = k_0 < ... < k_t <= r
    and nullities v_0 < ... < v_t = n - r.
    """
    if not 0 <= r <= n:
        raise MatroidError(f"invalid parameters r={r}, n={n}")
    out = []
    top_null = n - r
    for t in range(min(r, top_null) + 1):
        for ranks in combinations(range(1, r + 1), t):
            for nulls in combinations(range(top_null), t):
                ks = (0,) + ranks
                vs = nulls + (top_null,)
                sig = tuple((k + v, k) for k, v in zip(ks, vs))
                p = SchubertProfile(n, r, sig)
                if min_girth is None or p.girth >= min_girth:
                    out.append(p)
    return sorted(out, key=SchubertProfile.sort_key)


@lru_cache(maxsize=None)
def eulerian(m: int, i: int) -> int:
    """Number of permutations of m elements with exactly i descents."""
    if m == 0:
        return 1 if i == 0 else 0
    if not 0 <= i < m:
        return 0
    return (i + 1) * eulerian(m - 1, i) + (m - i) * eulerian(m - 1, i - 1)


def binomial_eulerian(r: int, n: int) -> int:
    return sum(comb(n, r + j) * eulerian(r + j, j) for j in range(n - r + 1))


def labelled_chains(p: SchubertProfile) -> Iterator[CyclicFlatChain]:
    """Every labelled chain with profile p."""
    n = p.n
    sizes = [s for s, _ in p.signature]
    ranks = [k for _, k in p.signature]

    def rec(i, prev, acc):
        if i == len(sizes):
            yield CyclicFlatChain(n, p.r, tuple(zip(acc, ranks)))
            return
        free = elements(full(n) & ~prev)
        for add in combinations(free, sizes[i] - prev.bit_count()):
            z = prev | bitset.mask(add)
            yield from rec(i + 1, z, acc + [z])

    yield from rec(0, 0, [])


def count_labelled_schuberts(r: int, n: int, min_girth: int | None = None) -> int:
    """|labelled Schubert matroids| by explicit enumeration of labelled chains."""
    if n > LABELLED_COUNT_CAP:
        raise SizeCapError(f"labelled Schubert enumeration needs n <= {LABELLED_COUNT_CAP}")
    return sum(1 for p in enumerate_profiles(r, n, min_girth) for _ in labelled_chains(p))


# -- indicator identity ---------------------------------------------------------------

@dataclass(frozen=True)
class SamplingPlan:
    random_points: int = 100
    seed: int = 0
    max_denominator: int = 7
    zero_one: bool = True
    half_integral: bool = True


@dataclass(frozen=True)
class IndicatorCheck:
    ok: bool
    points_checked: int
    witness: tuple | None = None
    detail: str = ""

    def __bool__(self):
        return self.ok


def _sample_points(n: int, r: int, plan: SamplingPlan) -> Iterator[tuple[int, tuple[int, ...]]]:
    """Points as (denominator q, integer numerators summing to r*q)."""
    if plan.zero_one:
        for b in bitset.ksubsets(n, r):
            yield 1, tuple((b >> i) & 1 for i in range(n))
    if plan.half_integral:
        for v in product((0, 1, 2), repeat=n):
            if sum(v) == 2 * r and any(x == 1 for x in v):
                yield 2, v
    rng = random.Random(plan.seed)
    for _ in range(plan.random_points):
        q = rng.randint(2, plan.max_denominator)
        k = [rng.randint(0, q) for _ in range(n)]
        target = r * q
        while sum(k) > target:
            i = rng.choice([i for i in range(n) if k[i] > 0])
            k[i] -= 1
        while sum(k) < target:
            i = rng.choice([i for i in range(n) if k[i] < q])
            k[i] += 1
        yield q, tuple(k)


def _subset_sums(v: tuple[int, ...]) -> np.ndarray:
    n = len(v)
    sums = np.zeros(1 << n, dtype=np.int64)
    for i, x in enumerate(v):
        sums[1 << i: 1 << (i + 1)] = sums[: 1 << i] + x
    return sums


def verify_indicator_identity(m: Matroid, e: SchubertExpansion,
                              plan: SamplingPlan = SamplingPlan()) -> IndicatorCheck:
    """Check sum_S a_S 1_{P(S)}(x) == 1_{P(M)}(x) on sampled points x.

    Membership of x in P(N) is tested by x(A) <= rank_N(A) for every subset A
    (together with x(E) = r, which holds for every sampled point).
    """
    if e.kind != "labelled":
        raise MatroidError("indicator identity needs a labelled expansion")
    if m.n > TABLE_CAP:
        raise SizeCapError(f"indicator check needs n <= {TABLE_CAP}")
    terms = []
    for chain, coeff in e.coefficients.items():
        s = Matroid(chain.n, chain.r, frozenset(
            b for b in bitset.ksubsets(chain.n, chain.r)
            if all((b & z).bit_count() <= k for z, k in chain.entries)))
        terms.append((coeff, s.rank_table.astype(np.int64), chain))
    target = m.rank_table.astype(np.int64)
    count = 0
    for q, v in _sample_points(m.n, m.r, plan):
        sums = _subset_sums(v)
        lhs = int(np.all(sums <= q * target))
        rhs = sum(c for c, tbl, _ in terms if np.all(sums <= q * tbl))
        count += 1
        if lhs != rhs:
            point = tuple(Fraction(x, q) for x in v)
            return IndicatorCheck(False, count, point,
                                  f"1_P(M)={lhs} but Schubert combination gives {rhs} at "
                                  f"{[str(x) for x in point]}")
    return IndicatorCheck(True, count)


def truncate_chain(chain: CyclicFlatChain) -> CyclicFlatChain:
    """Cyclic-flat chain of the truncation of the Schubert matroid of ``chain``."""
    s = schubert_from_chain(chain, check=False).truncation()
    return CyclicFlatChain(s.n, s.r, tuple((f.elements, f.rank) for f in s.cyclic_flats))


def dual_chain(chain: CyclicFlatChain) -> CyclicFlatChain:
    """Complements in reverse order: the cyclic-flat chain of the dual Schubert matroid."""
    n, r = chain.n, chain.r
    ground = full(n)
    return CyclicFlatChain(n, n - r, tuple(
        (ground & ~z, n - z.bit_count() - r + k) for z, k in reversed(chain.entries)))


def delete_from_chain(chain: CyclicFlatChain, e: int, coloop: bool) -> CyclicFlatChain:
    """Chain after deleting a loop (in every flat) or a coloop (in none); labels above e shift down."""
    low = (1 << e) - 1

    def squeeze(z):
        return (z & low) | ((z >> (e + 1)) << e)

    return CyclicFlatChain(chain.n - 1, chain.r - (1 if coloop else 0),
                           tuple((squeeze(z), k) for z, k in chain.entries))
