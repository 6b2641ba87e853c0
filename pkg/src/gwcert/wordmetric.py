"""Exact arithmetic in the group O_w semidirect Z, word-metric balls and
lengths by breadth-first search, the z-coordinate bound m2, and the product
sets of the genuine action specialization."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import BallTooLarge, CapExceeded
from .field import FieldElement


@dataclass(frozen=True)
class GwElement:
    """(x, z) with law (x1, z1)(x2, z2) = (x1 + w^{z1} x2, z1 + z2);
    w is the defining generator of x's field."""

    x: FieldElement
    z: int


def gw_identity(nf) -> GwElement:
    return GwElement(nf.zero, 0)


def gw_mul(a: GwElement, b: GwElement) -> GwElement:
    w = a.x.field.gen
    return GwElement(a.x + w**a.z * b.x, a.z + b.z)


def gw_inv(a: GwElement) -> GwElement:
    w = a.x.field.gen
    return GwElement(-(w ** (-a.z)) * a.x, -a.z)


def power_set(S, n: int, cap: int = 2 * 10**6) -> frozenset:
    """S^n, the set of n-fold products; S must contain the identity, so the
    result contains all shorter products too."""
    cur = frozenset(S)
    for _ in range(n - 1):
        nxt = set()
        for a in cur:
            for s in S:
                nxt.add(gw_mul(a, s))
                if len(nxt) > cap:
                    raise BallTooLarge(f"product set exceeds cap {cap}")
        cur = frozenset(nxt)
    return cur


def m2_of(Sn) -> int:
    """max |z| over the product set."""
    return max(abs(g.z) for g in Sn)


def word_length(g: GwElement, S, cap: int = 2 * 10**6) -> int:
    """BFS distance from the identity in the Cayley graph of S."""
    e = gw_identity(g.x.field)
    if g == e:
        return 0
    gens = [s for s in S if s != e]
    visited = {e}
    frontier = [e]
    dist = 0
    while frontier:
        dist += 1
        nxt = []
        for a in frontier:
            for s in gens:
                b = gw_mul(a, s)
                if b == g:
                    return dist
                if b not in visited:
                    visited.add(b)
                    nxt.append(b)
                    if len(visited) > cap:
                        raise CapExceeded(f"BFS visited more than {cap} elements")
        frontier = nxt
    raise CapExceeded(f"{g} unreachable from the generating set")


def ball_with_distances(S, radius: int, cap: int = 2 * 10**6) -> dict:
    """All elements within the given word-metric radius, with distances."""
    e = gw_identity(next(iter(S)).x.field)
    gens = [s for s in S if s != e]
    out = {e: 0}
    frontier = [e]
    for d in range(1, radius + 1):
        nxt = []
        for a in frontier:
            for s in gens:
                b = gw_mul(a, s)
                if b not in out:
                    out[b] = d
                    nxt.append(b)
                    if len(out) > cap:
                        raise CapExceeded(f"ball exceeds cap {cap}")
        frontier = nxt
    return out


def sn_genuine(g: GwElement, S, n: int, cap: int = 2 * 10**6) -> frozenset:
    """{g k | k in S^{2n}}: the n-step neighborhood in the genuine-action
    specialization with the space collapsed to a point."""
    s2n = power_set(S, 2 * n, cap=cap)
    return frozenset(gw_mul(g, k) for k in s2n)
