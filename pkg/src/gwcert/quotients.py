"""Finite residue rings O_w/q^s, multiplicative orders of w, the semidirect
quotient groups, exhaustive subgroup enumeration, and the hyper-elementary
classification trichotomy.

Residue rings are realized as quotients of the maximal order by an ideal
lattice in Smith normal form; elements are integer tuples against the
elementary divisors.  w acts through its matrix, with non-integral w handled
by inverting the denominator (legal exactly when the modulus is coprime to
the primes where w is non-trivial).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

from .arith import divisors, factorint
from .errors import (
    GroupTooLarge,
    NoConjugatorFound,
    NotHyperElementary,
    UnsupportedDegree,
    WNotUnitModQ,
)
from .field import FieldElement, NumberField
from .valuation import PrimeIdeal, _ideal_mul, order_data, primes_above, valuation
from .zlattice import mat_inverse_exact, smith_normal_form, solve_one_combination


def _ideal_power_lattice(P: PrimeIdeal, k: int) -> list[list[int]]:
    od = order_data(P.nf)
    if P.nf.degree == 1:
        return [[P.p**k]]
    lat = [[1, 0], [0, 1]]
    base = P.lattice()
    for _ in range(k):
        lat = _ideal_mul(od, lat, base)
    return lat


class ResidueRing:
    """O_w modulo q^s (rational prime q) or modulo 𝔮^s (prime ideal 𝔮)."""

    def __init__(self, w: FieldElement, modulus, s: int):
        self.w = w
        self.nf = w.field
        self.modulus = modulus
        self.s = s
        od = order_data(self.nf)
        self._od = od
        deg = self.nf.degree
        if deg > 2:
            raise UnsupportedDegree("residue rings need degree <= 2")
        if isinstance(modulus, PrimeIdeal):
            if valuation(w, modulus) != 0:
                raise WNotUnitModQ(f"w has valuation {valuation(w, modulus)} at {modulus}")
            lat = _ideal_power_lattice(modulus, s)
            self.primes = [modulus]
        else:
            q = int(modulus)
            self.primes = primes_above(self.nf, q)
            for Q in self.primes:
                if valuation(w, Q) != 0:
                    raise WNotUnitModQ(f"w is not a unit at {Q}")
            lat = [[q**s if i == j else 0 for j in range(deg)] for i in range(deg)]
        u, d, v = smith_normal_form(lat)
        self._u = u
        self._uinv = mat_inverse_exact(u)
        self.divisors = tuple(d[i][i] for i in range(deg))
        self.element_count = 1
        for di in self.divisors:
            self.element_count *= di
        self.zero = tuple(0 for _ in self.divisors)
        self.one = self.enc(self.nf.one)
        self._mul_cache: dict = {}
        self.w_elem = self.enc(w)

    @property
    def unit_count(self) -> int:
        out = 1
        for Q in self.primes:
            n = Q.residue_size
            k = self.s * (Q.e if not isinstance(self.modulus, PrimeIdeal) else 1)
            out *= n ** (k - 1) * (n - 1)
        return out

    def enc(self, x: FieldElement) -> tuple:
        coords = self._od.coords(x)
        den = 1
        for c in coords:
            den = den * c.denominator // math.gcd(den, c.denominator)
        nums = [int(c * den) for c in coords]
        out = []
        for i, di in enumerate(self.divisors):
            v = sum(int(self._u[i][j]) * nums[j] for j in range(len(nums)))
            if di == 1:
                out.append(0)
                continue
            if math.gcd(den, di) != 1:
                raise WNotUnitModQ(f"{x} has a denominator not invertible mod {di}")
            out.append(v * pow(den, -1, di) % di)
        return tuple(out)

    def dec(self, t: tuple) -> FieldElement:
        coords = [sum(self._uinv[i][j] * t[j] for j in range(len(t))) for i in range(len(t))]
        return self._od.from_coords(coords)

    def add(self, a: tuple, b: tuple) -> tuple:
        return tuple((x + y) % d if d else 0 for x, y, d in zip(a, b, self.divisors))

    def neg(self, a: tuple) -> tuple:
        return tuple((-x) % d if d else 0 for x, d in zip(a, self.divisors))

    def mul(self, a: tuple, b: tuple) -> tuple:
        key = (a, b)
        out = self._mul_cache.get(key)
        if out is None:
            if len(self._mul_cache) > 300000:
                self._mul_cache.clear()
            out = self.enc(self.dec(a) * self.dec(b))
            self._mul_cache[key] = out
        return out

    def pow(self, a: tuple, n: int) -> tuple:
        acc, base = self.one, a
        while n:
            if n & 1:
                acc = self.mul(acc, base)
            base = self.mul(base, base)
            n >>= 1
        return acc

    def inverse_unit(self, a: tuple) -> tuple:
        inv = self.pow(a, self.unit_count - 1)
        if self.mul(a, inv) != self.one:
            raise WNotUnitModQ(f"{a} is not a unit in the residue ring")
        return inv

    def elements(self) -> list[tuple]:
        out = [()]
        for di in self.divisors:
            out = [t + (k,) for t in out for k in range(max(di, 1))]
        return out

    def units(self) -> list[tuple]:
        return [t for t in self.elements() if self._is_unit(t)]

    def _is_unit(self, a: tuple) -> bool:
        x = self.dec(a)
        if x.is_zero():
            return False
        return all(valuation(x, Q) == 0 for Q in self.primes)

    def mult_by_w_matrix(self) -> list[list[int]]:
        deg = len(self.divisors)
        cols = []
        for j in range(deg):
            e = tuple(int(i == j) for i in range(deg))
            cols.append(self.mul(self.w_elem, e))
        return [[cols[j][i] for j in range(deg)] for i in range(deg)]


def t_order(w: FieldElement, modulus, s: int) -> int:
    """Multiplicative order of w in (O_w / modulus^s)^x."""
    if isinstance(modulus, PrimeIdeal):
        Q = modulus
        if valuation(w, Q) != 0:
            raise WNotUnitModQ(f"w not a unit at {Q}")
        n = Q.residue_size
        group_order = n ** (s - 1) * (n - 1)
        for d in divisors(group_order):
            v = valuation(w**d - 1, Q)
            if v is None or v >= s:
                return d
        raise WNotUnitModQ(f"order of w not found mod {Q}^{s}")
    q = int(modulus)
    parts = [t_order(w, Q, s * Q.e) for Q in primes_above(w.field, q)]
    return reduce(math.lcm, parts)


def u_order(w: FieldElement, q: int) -> int:
    """The q-free part of t_w(q, s): lcm of the orders mod the primes above q."""
    parts = [t_order(w, Q, 1) for Q in primes_above(w.field, q)]
    return reduce(math.lcm, parts)


@dataclass
class CrtData:
    ring: ResidueRing
    component_rings: list[ResidueRing]
    idempotents: list[FieldElement]

    def forward(self, t: tuple) -> tuple:
        x = self.ring.dec(t)
        return tuple(r.enc(x) for r in self.component_rings)

    def backward(self, parts: tuple) -> tuple:
        acc = self.ring.nf.zero
        for r, t, e in zip(self.component_rings, parts, self.idempotents):
            acc = acc + r.dec(t) * e
        return self.ring.enc(acc)


def crt_split(w: FieldElement, q: int, s: int) -> CrtData:
    """Isomorphism O_w/q^s -> direct sum over primes above q."""
    ring = ResidueRing(w, q, s)
    primes = ring.primes
    comps = [ResidueRing(w, Q, s * Q.e) for Q in primes]
    count = 1
    for r in comps:
        count *= r.element_count
    assert count == ring.element_count
    nf = w.field
    if len(primes) == 1:
        return CrtData(ring, comps, [nf.one])
    # idempotents from 1 = lambda_1 + lambda_2 with lambda_i in the i-th lattice
    lat1 = _ideal_power_lattice(primes[0], s * primes[0].e)
    lat2 = _ideal_power_lattice(primes[1], s * primes[1].e)
    deg = nf.degree
    gens = [tuple(lat1[i][j] for i in range(deg)) for j in range(deg)]
    gens += [tuple(lat2[i][j] for i in range(deg)) for j in range(deg)]
    od = order_data(nf)
    target = tuple(int(c) for c in od.coords(nf.one))
    combo = solve_one_combination(gens, target)
    if combo is None:
        raise UnsupportedDegree(f"CRT idempotents not found for q={q}, s={s}")
    lam1 = od.from_coords(
        tuple(sum(combo[j] * gens[j][i] for j in range(deg)) for i in range(deg))
    )
    e1 = nf.one - lam1  # e1 = lambda_2: 1 mod first ideal, 0 mod second
    e2 = lam1
    return CrtData(ring, comps, [e1, e2])


class SemidirectGroup:
    """F = R semidirect Z/t with (a1,b1)(a2,b2) = (a1 + w^{b1} a2, b1 + b2)."""

    def __init__(self, ring: ResidueRing, t: int, cap: int = 50000):
        self.ring = ring
        self.t = t
        self.order = ring.element_count * t
        if self.order > cap:
            raise GroupTooLarge(f"order {self.order} exceeds cap {cap}")
        deg = len(ring.divisors)
        w_mat = ring.mult_by_w_matrix()
        self._wpow = [[[int(i == j) for j in range(deg)] for i in range(deg)]]
        for _ in range(1, t):
            prev = self._wpow[-1]
            nxt = [
                [
                    sum(w_mat[i][k] * prev[k][j] for k in range(deg)) % max(ring.divisors[i], 1)
                    for j in range(deg)
                ]
                for i in range(deg)
            ]
            self._wpow.append(nxt)
        self.identity = (ring.zero, 0)
        self._elements = None
        self._index = None
        self._table = None
        self._inv_table = None

    def twist(self, b: int, a: tuple) -> tuple:
        m = self._wpow[b % self.t]
        d = self.ring.divisors
        return tuple(
            sum(m[i][j] * a[j] for j in range(len(a))) % max(d[i], 1) for i in range(len(a))
        )

    def mul(self, g, h):
        a1, b1 = g
        a2, b2 = h
        return (self.ring.add(a1, self.twist(b1, a2)), (b1 + b2) % self.t)

    def inv(self, g):
        a, b = g
        bi = (-b) % self.t
        return (self.ring.neg(self.twist(bi, a)), bi)

    def alpha(self, x: FieldElement, z: int):
        """Reduction map from O_w semidirect Z."""
        return (self.ring.enc(x), z % self.t)

    def elements(self) -> list:
        if self._elements is None:
            self._elements = [(a, b) for a in self.ring.elements() for b in range(self.t)]
            self._index = {g: i for i, g in enumerate(self._elements)}
        return self._elements

    def index(self, g) -> int:
        self.elements()
        return self._index[g]

    def table(self) -> list[list[int]]:
        if self._table is None:
            if self.order > 5000:
                raise GroupTooLarge(f"no multiplication table above order 5000 ({self.order})")
            els = self.elements()
            idx = self._index
            self._table = [[idx[self.mul(g, h)] for h in els] for g in els]
            self._inv_table = [idx[self.inv(g)] for g in els]
        return self._table

    def inv_table(self) -> list[int]:
        self.table()
        return self._inv_table


@dataclass(frozen=True)
class Subgroup:
    elements: frozenset  # element indices in the ambient group
    generators: tuple  # indices generating the subgroup

    def __len__(self):
        return len(self.elements)


def _closure(gens, table, id_idx) -> frozenset:
    elems = {id_idx}
    stack = [id_idx]
    gens = [g for g in dict.fromkeys(gens)]
    while stack:
        x = stack.pop()
        row = table[x]
        for g in gens:
            y = row[g]
            if y not in elems:
                elems.add(y)
                stack.append(y)
    return frozenset(elems)


def enumerate_subgroups(F: SemidirectGroup, cap: int = 5000) -> list[Subgroup]:
    """Every subgroup exactly once: cyclic seeds, then pairwise joins to
    fixpoint."""
    if F.order > cap:
        raise GroupTooLarge(f"order {F.order} exceeds enumeration cap {cap}")
    table = F.table()
    id_idx = F.index(F.identity)
    seen = {}
    items = []
    for i in range(F.order):
        fs = _closure([i], table, id_idx)
        if fs not in seen:
            sub = Subgroup(fs, (i,))
            seen[fs] = sub
            items.append(sub)
    whole = frozenset(range(F.order))
    i = 1
    while i < len(items):
        A = items[i]
        for j in range(i):
            B = items[j]
            if A.elements <= B.elements or B.elements <= A.elements:
                continue
            inter = len(A.elements & B.elements)
            if len(A.elements) * len(B.elements) // inter > F.order // 2:
                fs = whole
                gens = A.generators + B.generators
            else:
                gens = A.generators + B.generators
                fs = _closure(gens, table, id_idx)
            if fs not in seen:
                sub = Subgroup(fs, gens)
                seen[fs] = sub
                items.append(sub)
        i += 1
    return sorted(items, key=lambda s: (len(s.elements), sorted(s.elements)))


def two_generator_census(F: SemidirectGroup) -> int:
    """Independent count of all 2-generated subgroups: one closure per
    unordered pair of cyclic subgroups (the join depends only on those)."""
    table = F.table()
    id_idx = F.index(F.identity)
    cyc = {}
    for i in range(F.order):
        fs = _closure([i], table, id_idx)
        if fs not in cyc:
            cyc[fs] = i
    reps = list(cyc.values())
    found = set(cyc.keys())
    for a in range(len(reps)):
        for b in range(a + 1, len(reps)):
            found.add(_closure([reps[a], reps[b]], table, id_idx))
    return len(found)


@dataclass
class HyperElementaryWitness:
    cyclic: Subgroup
    p: int | None  # None for cyclic H (P trivial)
    quotient_order: int


def is_hyperelementary(H: Subgroup, F: SemidirectGroup) -> HyperElementaryWitness | None:
    """Witness normal cyclic C <| H with H/C a p-group, p not dividing |C|."""
    table = F.table()
    inv = F.inv_table()
    id_idx = F.index(F.identity)
    n = len(H.elements)
    cyclics = {}
    for h in H.elements:
        fs = _closure([h], table, id_idx)
        if fs not in cyclics:
            cyclics[fs] = h
    for fs, gen in sorted(cyclics.items(), key=lambda kv: -len(kv[0])):
        idx = n // len(fs)
        if idx * len(fs) != n:
            continue
        if idx > 1:
            fac = factorint(idx)
            if len(fac) != 1:
                continue
            p = next(iter(fac))
            if len(fs) % p == 0:
                continue
        else:
            p = None
        # normality: conjugate of the generator stays inside
        normal = all(table[table[h][gen]][inv[h]] in fs for h in H.elements)
        if normal:
            return HyperElementaryWitness(Subgroup(fs, (gen,)), p, idx)
    return None


@dataclass
class Verdict:
    case: str  # InKernelCase | InPrimeToQCase | ConjugateToCyclic
    conjugator: tuple | None = None  # element of A semidirect A^x, as ring tuples


def _conjugate_in_extended(F: SemidirectGroup, conj, g):
    """(x,y)(a,w^b)(x,y)^{-1} = (x(1-w^b) + y a, w^b) in A semidirect A^x."""
    x, y = conj
    a, b = g
    r = F.ring
    one_minus_wb = r.add(r.one, r.neg(r.pow(r.w_elem, b % F.t)))
    return (r.add(r.mul(x, one_minus_wb), r.mul(y, a)), b)


def classify_hyperelementary(H: Subgroup, F: SemidirectGroup, t1: int) -> Verdict:
    """Trichotomy for hyper-elementary H in O_w/𝔮^s semidirect Z/t(𝔮,s):
    inside the kernel-side q-Sylow, inside the prime-to-q side, or conjugate
    (inside the extended group) into the cyclic axis."""
    if is_hyperelementary(H, F) is None:
        raise NotHyperElementary("subgroup is not hyper-elementary")
    els = [F.elements()[i] for i in H.elements]
    t = F.t
    bs = {b for (_, b) in els}
    if all(b % t1 == 0 for b in bs):
        return Verdict("InKernelCase")
    ratio = t // t1
    if all(b % ratio == 0 for b in bs):
        return Verdict("InPrimeToQCase")
    conj = _find_axis_conjugator(F, els)
    if conj is None:
        raise NoConjugatorFound(f"no conjugator into the axis for H={sorted(H.elements)}")
    return Verdict("ConjugateToCyclic", conjugator=conj)


def _find_axis_conjugator(F: SemidirectGroup, els):
    """Search (x, y) in A semidirect A^x conjugating every element of els
    into {0} x Z/t; linear conditions x(1 - w^b) + y a = 0."""
    r = F.ring
    nontrivial = [(a, b) for (a, b) in els if a != r.zero or b % F.t != 0]
    if all(a == r.zero for (a, b) in nontrivial):
        return (r.zero, r.one)

    def check(x, y):
        for g in nontrivial:
            ca, _ = _conjugate_in_extended(F, (x, y), g)
            if ca != r.zero:
                return False
        return True

    # solve x from a generator whose 1 - w^b is invertible, for each unit y
    pivot = None
    for a, b in nontrivial:
        omw = r.add(r.one, r.neg(r.pow(r.w_elem, b % F.t)))
        if r._is_unit(omw):
            pivot = (a, b, r.inverse_unit(omw))
            break
    for y in r.units():
        if pivot is not None:
            a, b, inv = pivot
            x = r.mul(r.neg(r.mul(y, a)), inv)
            if check(x, y):
                return (x, y)
        else:
            for x in r.elements():
                if check(x, y):
                    return (x, y)
    return None


def group_report(F: SemidirectGroup, t1: int) -> dict:
    """JSON-ready per-group summary of the classification."""
    subs = enumerate_subgroups(F)
    verdicts = []
    hyper = 0
    for H in subs:
        wit = is_hyperelementary(H, F)
        if wit is None:
            continue
        hyper += 1
        v = classify_hyperelementary(H, F, t1)
        verdicts.append(
            {
                "generators": [list(map(int, _flat(F, g))) for g in H.generators],
                "case": v.case,
                "witness": None if v.conjugator is None else [list(map(int, v.conjugator[0])), list(map(int, v.conjugator[1]))],
            }
        )
    return {
        "order": F.order,
        "subgroup_count": len(subs),
        "hyperelementary_count": hyper,
        "verdicts": verdicts,
    }


def _flat(F: SemidirectGroup, idx: int):
    a, b = F.elements()[idx]
    return tuple(a) + (b,)
