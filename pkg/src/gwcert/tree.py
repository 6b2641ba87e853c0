"""The tree of rank-2 lattice classes over the local ring at a prime.

Lattices live globally: a basis is a 2x2 matrix over Q(w) whose columns
generate the module over the localization O_p, and all local structure is
read off through valuations.  A class is the unique canonical form
[[pi^a, b], [0, 1]] with b reduced to its pi-adic digit representative
mod pi^a; two lattices are equivalent iff these forms coincide.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import BusemannCapExceeded, PrimeMismatch, SingularBasis
from .field import FieldElement
from .valuation import PrimeIdeal, order_data, valuation


def _val(x: FieldElement, P: PrimeIdeal):
    key = (x.coeffs, P.p, P.kind, P.root)
    cache = P._cache.setdefault("valuations", {})
    if key not in cache:
        if len(cache) > 200000:
            cache.clear()
        cache[key] = valuation(x, P)
    return cache[key]


def residue_reps(P: PrimeIdeal) -> list[FieldElement]:
    """A fixed transversal of the residue field O_p / pi O_p."""
    nf = P.nf
    if P.f == 1:
        return [nf.element(i) for i in range(P.p)]
    om = order_data(nf).omega
    return [nf.element(i) + nf.element(j) * om for i in range(P.p) for j in range(P.p)]


def residue_digit(u: FieldElement, P: PrimeIdeal) -> FieldElement:
    """The transversal representative of u mod pi, for u with v(u) >= 0."""
    for d in residue_reps(P):
        v = _val(u - d, P)
        if v is None or v >= 1:
            return d
    raise RuntimeError(f"no residue representative for {u} at {P}")


def canonical_mod(b: FieldElement, a: int, P: PrimeIdeal) -> FieldElement:
    """Unique digit representative of the coset b + pi^a O_p."""
    nf = P.nf
    if b.is_zero():
        return nf.zero
    v = _val(b, P)
    if v >= a:
        return nf.zero
    pi = P.uniformizer
    rep = nf.zero
    x = b
    for i in range(v, a):
        if x.is_zero():
            break
        d = residue_digit(x * pi**(-i), P)
        if not d.is_zero():
            rep = rep + d * pi**i
            x = x - d * pi**i
    return rep


@dataclass(frozen=True)
class Lattice:
    """Raw lattice: columns of basis generate the O_p-module."""

    basis: tuple  # (m00, m01, m10, m11), columns (m00,m10) and (m01,m11)
    prime: PrimeIdeal


@dataclass(frozen=True)
class LatticeClass:
    """Canonical form [[pi^a, b],[0,1]]; equality of classes is equality here."""

    prime: PrimeIdeal
    a: int
    b: FieldElement

    def matrix(self) -> tuple:
        nf = self.prime.nf
        pi = self.prime.uniformizer
        return (pi**self.a, self.b, nf.zero, nf.one)

    def __repr__(self):
        return f"[pi^{self.a} | {self.b}]"


def normalize(L: Lattice) -> LatticeClass:
    """Canonical class of a lattice; invariant under column operations over
    the local ring and under global scaling."""
    P = L.prime
    m00, m01, m10, m11 = L.basis
    if (m00 * m11 - m01 * m10).is_zero():
        raise SingularBasis(f"basis {L.basis} is singular")
    v10, v11 = _val(m10, P), _val(m11, P)
    # put the bottom-row entry of smallest valuation into column 2
    if v11 is None or (v10 is not None and v10 < v11):
        m00, m01 = m01, m00
        m10, m11 = m11, m10
    if not m10.is_zero():
        coef = m10 / m11  # in O_p by the pivot choice
        m00 = m00 - coef * m01
        m10 = m10 - coef * m11
    # columns now (m00, 0) and (m01, m11); unit-scale and de-scale globally
    a = _val(m00, P) - _val(m11, P)
    b = canonical_mod(m00.field.element(m01 / m11), a, P)
    return LatticeClass(P, a, b)


def identity_class(P: PrimeIdeal) -> LatticeClass:
    return LatticeClass(P, 0, P.nf.zero)


def standard_line(P: PrimeIdeal, n: int) -> LatticeClass:
    """The class of pi^{-n} O_p + O_p, the vertices of the Busemann line."""
    return LatticeClass(P, -n, P.nf.zero)


def tree_distance(A: LatticeClass, B: LatticeClass) -> int:
    """|a1 - a2| for the elementary divisor exponents of the basis change."""
    if A.prime != B.prime:
        raise PrimeMismatch(f"{A.prime} vs {B.prime}")
    P = A.prime
    # M = A^{-1} B = [[pi^{a2-a1}, (b2-b1) pi^{-a1}], [0, 1]]
    e00 = B.a - A.a
    diff = B.b - A.b
    vd = _val(diff, P)
    entries = [e00, 0] + ([] if vd is None else [vd - A.a])
    a_min = min(entries)
    det_exp = B.a - A.a
    return abs(det_exp - 2 * a_min)


def act(g: tuple, A: LatticeClass) -> LatticeClass:
    """Action of (x, y) through the matrix [[y, x], [0, 1]]."""
    x, y = g
    if y.is_zero():
        raise SingularBasis("action requires y != 0")
    pi = A.prime.uniformizer
    nf = A.prime.nf
    m = (y * pi**A.a, y * A.b + x, nf.zero, nf.one)
    return normalize(Lattice(m, A.prime))


def busemann(A: LatticeClass) -> int:
    """Horofunction along the standard line: stabilized value of
    n - d(A, [L(n)])."""
    d0 = tree_distance(A, standard_line(A.prime, 0))
    cap = 2 * d0 + 4
    prev = None
    for n in range(cap + 1):
        cur = n - tree_distance(A, standard_line(A.prime, n))
        if cur == prev:
            return cur
        prev = cur
    raise BusemannCapExceeded(f"no stabilization within n <= {cap} for {A}")


def z_invariants(A: LatticeClass) -> tuple[int, int, int]:
    """(z1, z2, z2') of the canonical lattice: intersections with the axes
    and the minimal second-coordinate valuation."""
    z1 = A.a
    if A.b.is_zero():
        z2 = 0
    else:
        z2 = max(0, A.a - _val(A.b, A.prime))
    return (z1, z2, 0)


def neighbors(A: LatticeClass) -> list[LatticeClass]:
    """The N(p)+1 classes at distance 1, one per line of L / pi L."""
    P = A.prime
    if P.residue_size > 2**16:
        raise SingularBasis(f"residue field too large for valency enumeration: {P}")
    pi = P.uniformizer
    nf = P.nf
    c1 = (pi**A.a, nf.zero)
    c2 = (A.b, nf.one)
    out = []
    for d in residue_reps(P):
        m = (c2[0] + d * c1[0], pi * c1[0], c2[1] + d * c1[1], pi * c1[1])
        out.append(normalize(Lattice(m, P)))
    m = (c1[0], pi * c2[0], c1[1], pi * c2[1])
    out.append(normalize(Lattice(m, P)))
    seen = set()
    uniq = []
    for cl in out:
        if cl not in seen:
            seen.add(cl)
            uniq.append(cl)
    return uniq


def neighborhood_dot(A: LatticeClass, radius: int) -> str:
    """DOT export of the radius-r ball around A, vertices labeled by
    canonical form."""
    seen = {A}
    frontier = [A]
    edges = set()
    for _ in range(radius):
        nxt = []
        for v in frontier:
            for u in neighbors(v):
                key = tuple(sorted((repr(v), repr(u))))
                edges.add(key)
                if u not in seen:
                    seen.add(u)
                    nxt.append(u)
        frontier = nxt
    lines = ["graph tree {"]
    for v in sorted(seen, key=repr):
        lines.append(f'  "{v!r}";')
    for e in sorted(edges):
        lines.append(f'  "{e[0]}" -- "{e[1]}";')
    lines.append("}")
    return "\n".join(lines)
