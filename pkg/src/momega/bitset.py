"""Subsets of a small ground set {0, ..., n-1} encoded as int bitmasks."""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from typing import Iterable

import numpy as np

MAX_N = 24


def mask(elements: Iterable[int]) -> int:
    m = 0
    for e in elements:
        m |= 1 << e
    return m


def elements(m: int) -> list[int]:
    out = []
    i = 0
    while m:
        if m & 1:
            out.append(i)
        m >>= 1
        i += 1
    return out


def full(n: int) -> int:
    return (1 << n) - 1


@lru_cache(maxsize=None)
def ksubsets(n: int, k: int) -> tuple[int, ...]:
    """All k-subsets of range(n) as masks, in revlex order.

    Revlex (S before T iff max(S ^ T) lies in T) coincides with ascending
    integer order of the masks.
    """
    return tuple(sorted(mask(c) for c in combinations(range(n), k)))


@lru_cache(maxsize=8)
def popcounts(n: int) -> np.ndarray:
    pc = np.zeros(1 << n, dtype=np.int8)
    for i in range(n):
        pc[1 << i: 1 << (i + 1)] = pc[: 1 << i] + 1
    return pc


def fmt(m: int) -> str:
    """Ascending comma form, e.g. ``0,2,3``; the empty set is ``-``."""
    els = elements(m)
    return ",".join(map(str, els)) if els else "-"


def parse(text: str) -> int:
    text = text.strip()
    if text in ("", "-"):
        return 0
    return mask(int(t) for t in text.split(","))


def permute(m: int, perm: "list[int] | tuple[int, ...]") -> int:
    """Image of the subset under the element map ``e -> perm[e]``."""
    out = 0
    i = 0
    while m:
        if m & 1:
            out |= 1 << perm[i]
        m >>= 1
        i += 1
    return out
