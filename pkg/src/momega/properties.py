"""Structural identities of Schubert expansions, checked one matroid at a time.

Each check returns a list of failure messages (empty when the identity holds).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .bitset import elements
from .matroid import Matroid, is_elementary_split
from .schubert import (
    SamplingPlan,
    SchubertExpansion,
    delete_from_chain,
    dual_chain,
    enumerate_profiles,
    expansion_labelled,
    representative_chain,
    schubert_from_chain,
    schubert_from_profile,
    truncate_chain,
    verify_indicator_identity,
)


def _support(e: SchubertExpansion):
    return [(c, schubert_from_chain(c, check=False)) for c in e.coefficients]


def _collect(pairs) -> dict:
    out: dict = {}
    for c, v in pairs:
        out[c] = out.get(c, 0) + v
    return {c: v for c, v in out.items() if v}


def check_sum(m: Matroid, e: SchubertExpansion) -> list[str]:
    return [] if e.total() == 1 else [f"coefficients sum to {e.total()}"]


def check_self_expansion(m: Matroid, e: SchubertExpansion) -> list[str]:
    """A matroid whose cyclic flats form a chain is its own expansion."""
    zs = m.cyclic_flats
    is_chain = all(a.elements & b.elements == a.elements for a, b in zip(zs, zs[1:]))
    if not is_chain:
        return []
    if len(e.coefficients) != 1 or next(iter(e.coefficients.values())) != 1:
        return [f"Schubert matroid does not expand to itself: {e}"]
    (c,) = e.coefficients
    if schubert_from_chain(c, check=False).bases != m.bases:
        return ["self-expansion names a different Schubert matroid"]
    return []


def check_truncation(m: Matroid, e: SchubertExpansion) -> list[str]:
    if m.r == 0:
        return []
    want = _collect((truncate_chain(c), v) for c, v in e.coefficients.items())
    got = expansion_labelled(m.truncation()).coefficients
    return [] if got == want else ["expansion of the truncation is not the truncated expansion"]


def check_girth(m: Matroid, e: SchubertExpansion) -> list[str]:
    g = min(s.girth for _, s in _support(e))
    return [] if g == m.girth else [f"girth {m.girth} but support minimum {g}"]


def check_duality(m: Matroid, e: SchubertExpansion) -> list[str]:
    want = _collect((dual_chain(c), v) for c, v in e.coefficients.items())
    got = expansion_labelled(m.dual()).coefficients
    return [] if got == want else ["expansion of the dual is not the dual expansion"]


def check_split_support(m: Matroid, e: SchubertExpansion) -> list[str]:
    lhs = is_elementary_split(m)
    rhs = all(is_elementary_split(s) for _, s in _support(e))
    return [] if lhs == rhs else [f"elementary split {lhs} but support all split {rhs}"]


def check_loops_coloops(m: Matroid, e: SchubertExpansion) -> list[str]:
    bad = []
    sup = _support(e)
    for kind, mask in (("loop", m.loops), ("coloop", m.coloops)):
        for i in elements(mask):
            own = (lambda s: s.loops) if kind == "loop" else (lambda s: s.coloops)
            if not all(own(s) >> i & 1 for _, s in sup):
                bad.append(f"{kind} {i} is not a {kind} of every support matroid")
                continue
            minor = m.delete(1 << i)
            want = _collect((delete_from_chain(c, i, kind == "coloop"), v) for c, v in e.coefficients.items())
            if expansion_labelled(minor).coefficients != want:
                bad.append(f"expansion does not survive deleting {kind} {i}")
    return bad


def check_indicator(m: Matroid, e: SchubertExpansion, seed: int = 0) -> list[str]:
    res = verify_indicator_identity(m, e, SamplingPlan(seed=seed))
    return [] if res.ok else [res.detail]


CHECKS = {
    "coefficientSum": check_sum,
    "schubertSelfExpansion": check_self_expansion,
    "truncation": check_truncation,
    "girth": check_girth,
    "duality": check_duality,
    "splitSupport": check_split_support,
    "loopsColoops": check_loops_coloops,
    "indicator": check_indicator,
}


@dataclass
class PropertyReport:
    checked: int = 0
    failures: dict[str, list[str]] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not any(self.failures.values())


def check_matroid(m: Matroid, seed: int = 0, names=None) -> dict[str, list[str]]:
    e = expansion_labelled(m, check=True)
    out = {}
    for name in names or CHECKS:
        fn = CHECKS[name]
        out[name] = fn(m, e, seed) if name == "indicator" else fn(m, e)
    return out


def check_profiles(r: int, n: int) -> list[str]:
    """Every Schubert profile's representative expands to exactly itself."""
    bad = []
    for p in enumerate_profiles(r, n):
        m = schubert_from_profile(p)
        e = expansion_labelled(m)
        if e.coefficients != {representative_chain(p): 1}:
            bad.append(f"profile {p} does not expand to itself")
    return bad
