"""Prime and exponent selection, the finite quotient F_n, the per-subgroup
case split, and the subdivided-line Lipschitz estimate of the final
verification pipeline.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .arith import is_prime
from .errors import CapExceeded, CounterexampleFound, GroupTooLarge, RootOfUnity
from .field import FieldElement
from .quotients import (
    ResidueRing,
    SemidirectGroup,
    classify_hyperelementary,
    enumerate_subgroups,
    is_hyperelementary,
    t_order,
    u_order,
)
from .valuation import mw_set, order_data, primes_above, valuation
from .wordmetric import GwElement, gw_identity, gw_inv, gw_mul, m2_of, power_set, word_length


def check_not_root_of_unity(w: FieldElement, bound: int = 64) -> None:
    """Certify w^k != 1 for all k >= 1, or raise RootOfUnity.

    A non-unit norm or an embedding off the unit circle certifies it at
    once; the remaining integral case is settled by scanning small powers
    (an algebraic integer with all conjugates on the unit circle is a root
    of unity, necessarily of small order at these degrees).
    """
    if w.is_zero():
        raise RootOfUnity("w must be non-zero")
    nw = w.norm()
    if abs(nw) != 1:
        return
    for emb in w.field.embeddings:
        if abs(abs(complex(emb(w))) - 1.0) > 1e-9:
            return
    if not order_data(w.field).is_integral(w):
        return
    for k in range(1, bound + 1):
        if w**k == 1:
            raise RootOfUnity(f"w^{k} = 1")
    raise RootOfUnity("all conjugates of the integral element w lie on the unit circle")


def select_prime(w: FieldElement, n: int, m2: int, q_bound: int = 10**6):
    """Smallest prime q coprime to the residue characteristics of M_w such
    that no prime above q divides (w^k - 1) for 1 <= k <= 2 n m2.

    Returns (q, splitting) where splitting lists (prime ideal, v_i) from
    the factorization q O = prod q_i^{v_i}.
    """
    check_not_root_of_unity(w)
    nf = w.field
    bad_chars = {P.p for P in mw_set(w)}
    kmax = 2 * n * m2
    q = 2
    while q <= q_bound:
        if is_prime(q) and q not in bad_chars:
            primes = primes_above(nf, q)
            ok = all(valuation(w, Q) == 0 for Q in primes)
            if ok:
                for Q in primes:
                    for k in range(1, kmax + 1):
                        v = valuation(w**k - 1, Q)
                        if v is None or v != 0:
                            ok = False
                            break
                    if not ok:
                        break
            if ok:
                splitting = [(Q, Q.e) for Q in primes]
                return q, splitting
        q += 1
    raise CapExceeded(f"no admissible prime below {q_bound}")


def select_exponent(w: FieldElement, q: int, n: int, m2: int, cap: int = 64) -> int:
    """Smallest m with 2 n m2 < t(q_i, m v_i) / t(q_i, 1) for every prime
    q_i above q; the q^{-m} <= B smallness condition is intentionally not
    checked (no algorithm produces B) and reports record it as skipped."""
    primes = primes_above(w.field, q)
    base = [t_order(w, Q, 1) for Q in primes]
    for m in range(1, cap + 1):
        if all(
            2 * n * m2 * base[i] < t_order(w, Q, m * Q.e)
            for i, Q in enumerate(primes)
        ):
            return m
    raise CapExceeded(f"no admissible exponent below {cap} for q={q}")


# -- the subdivided line -------------------------------------------------------


@dataclass(frozen=True)
class SubdividedLine:
    """The real line as a simplicial complex with vertex set l Z."""

    l: int


def line_metric(E: SubdividedLine, a, b) -> Fraction:
    """l^1 simplicial path metric: 2 |a - b| / l within an edge, path sums
    through vertices across edges (which telescope to the same value)."""
    return 2 * abs(Fraction(a) - Fraction(b)) / E.l


# -- certificates --------------------------------------------------------------


@dataclass
class CaseVerdict:
    generators: tuple
    case: str  # "Case1" or "Case2"
    index_l: int
    conjugator: tuple | None = None
    lipschitz_pairs: int = 0
    inner_case: str | None = None


@dataclass
class Certificate:
    w: FieldElement
    n: int
    S: tuple
    m2: int
    q: int
    splitting: list
    m: int
    t: int
    group_order: int
    verdicts: list = field(default_factory=list)
    skipped_conditions: tuple = ("q^-m<=B",)
    skipped: str | None = None  # populated when caps forced a skip

    def to_json(self) -> dict:
        return {
            "field": [str(c) for c in self.w.field.min_poly],
            "w": [str(c) for c in self.w.coeffs],
            "n": self.n,
            "S": [[[str(c) for c in g.x.coeffs], g.z] for g in self.S],
            "m2": self.m2,
            "q": self.q,
            "splitting": [
                {"p": Q.p, "kind": Q.kind, "e": v, "f": Q.f} for Q, v in self.splitting
            ],
            "m": self.m,
            "t": self.t,
            "group_order": self.group_order,
            "verdicts": [
                {
                    "generators": [list(g) for g in v.generators],
                    "case": v.case,
                    "index": v.index_l,
                    "conjugator": None
                    if v.conjugator is None
                    else [list(v.conjugator[0]), list(v.conjugator[1])],
                    "lipschitz_pairs": v.lipschitz_pairs,
                }
                for v in self.verdicts
            ],
            "skipped_conditions": list(self.skipped_conditions),
            "skipped": self.skipped,
            "dimension_bound_N": None,
            "metric_scale_Lambda": None,
        }


def _pi_index(F: SemidirectGroup, H) -> int:
    """[Z/t : pi(H)] where pi projects to the exponent coordinate."""
    import math

    g = F.t
    for i in H.elements:
        _, b = F.elements()[i]
        g = math.gcd(g, b)
    return g


def _sample_bases(S, n, count, seed, cap):
    """Identity plus up to count elements drawn from the radius-n ball."""
    from .wordmetric import ball_with_distances

    ball = sorted(ball_with_distances(S, n, cap=cap), key=lambda g: (str(g.x.coeffs), g.z))
    rng = random.Random(seed)
    e = gw_identity(next(iter(S)).x.field)
    picks = [e]
    pool = [g for g in ball if g != e]
    rng.shuffle(pool)
    picks.extend(pool[: count - 1])
    return picks


def _verify_case2(l: int, S, Sn, n: int, base_elems, pair_cap: int = 10**4) -> int:
    """Check n * d1(f(g), f(h)) <= l_{S^{2n}}(h^{-1} g) over all pairs
    g = h k, k in S^n, around the base sample.  Returns the pair count."""
    E = SubdividedLine(l)
    S2n = power_set(S, 2 * n)
    e = gw_identity(next(iter(S)).x.field)
    checked = 0
    for h in base_elems:
        for k in Sn:
            g = gw_mul(h, k)
            d1 = line_metric(E, g.z, h.z)
            if k == e:
                rhs = 0
            else:
                rhs = 1 if k in S2n else word_length(k, S2n)
            if n * d1 > rhs:
                raise CounterexampleFound(
                    f"Lipschitz estimate fails: n*d1 = {n * d1} > {rhs} "
                    f"for h = {h}, k = {k}, l = {l}"
                )
            checked += 1
            if checked > pair_cap:
                return checked
    return checked


def build_and_verify(
    w: FieldElement,
    n: int,
    S,
    cap_order: int = 50000,
    base_count: int = 50,
    seed: int = 0,
    cap_bfs: int = 2 * 10**6,
) -> Certificate:
    """Full pipeline: select q and m, build F_n, classify every
    hyper-elementary subgroup, and verify the case split."""
    Sn = power_set(S, n, cap=cap_bfs)
    m2 = m2_of(Sn)
    q, splitting = select_prime(w, n, m2)
    m = select_exponent(w, q, n, m2)
    t = t_order(w, q, m)
    t1 = u_order(w, q)
    cert = Certificate(w, n, tuple(sorted(S, key=lambda g: (str(g.x.coeffs), g.z))),
                       m2, q, splitting, m, t, 0)
    try:
        ring = ResidueRing(w, q, m)
        F = SemidirectGroup(ring, t, cap=cap_order)
    except GroupTooLarge as exc:
        cert.skipped = str(exc)
        return cert
    cert.group_order = F.order
    base_elems = _sample_bases(S, n, base_count, seed, cap_bfs)
    bound = 2 * n * m2
    try:
        subgroups = enumerate_subgroups(F)
    except GroupTooLarge as exc:
        cert.skipped = str(exc)
        return cert
    for H in subgroups:
        if is_hyperelementary(H, F) is None:
            continue
        l = _pi_index(F, H)
        gens = tuple(tuple(map(int, _flatten(F, g))) for g in H.generators)
        if l <= bound:
            verdict = classify_hyperelementary(H, F, t1)
            if verdict.case == "ConjugateToCyclic":
                conj = (tuple(map(int, verdict.conjugator[0])), tuple(map(int, verdict.conjugator[1])))
            else:
                # already inside a conjugate of the axis-side subgroup; the
                # trivial conjugator witnesses it only when all a-parts
                # vanish, so run the search unconditionally
                from .quotients import _find_axis_conjugator

                els = [F.elements()[i] for i in H.elements]
                found = _find_axis_conjugator(F, els)
                if found is None:
                    raise CounterexampleFound(
                        f"index {l} <= {bound} but no conjugator into the "
                        f"cyclic axis for H = {sorted(H.elements)}"
                    )
                conj = (tuple(map(int, found[0])), tuple(map(int, found[1])))
            cert.verdicts.append(
                CaseVerdict(gens, "Case1", l, conjugator=conj, inner_case=verdict.case if l <= bound else None)
            )
        else:
            pairs = _verify_case2(l, S, Sn, n, base_elems)
            cert.verdicts.append(CaseVerdict(gens, "Case2", l, lipschitz_pairs=pairs))
    check_certificate(cert)
    return cert


def _flatten(F: SemidirectGroup, idx: int):
    a, b = F.elements()[idx]
    return tuple(a) + (b,)


def check_certificate(cert: Certificate) -> None:
    """Independent re-check of the admissibility invariants."""
    w = cert.w
    bad_chars = {P.p for P in mw_set(w)}
    if cert.q in bad_chars:
        raise CounterexampleFound(f"q = {cert.q} shares a residue characteristic with M_w")
    bound = 2 * cert.n * cert.m2
    for Q, v in cert.splitting:
        for k in range(1, bound + 1):
            if valuation(w**k - 1, Q) != 0:
                raise CounterexampleFound(f"q divides (w^{k} - 1) at {Q}")
        t1 = t_order(w, Q, 1)
        if not bound < t1:
            raise CounterexampleFound(f"2 n m2 = {bound} >= t({Q}, 1) = {t1}")
        ratio = Fraction(t_order(w, Q, cert.m * v), t1)
        if not bound < ratio:
            raise CounterexampleFound(f"2 n m2 = {bound} >= ratio {ratio} at {Q}")


def standard_generating_set(nf) -> frozenset:
    """{identity, (±1, 0), (0, ±1)}: the default symmetric generating set."""
    return frozenset(
        [
            gw_identity(nf),
            GwElement(nf.one, 0),
            GwElement(-nf.one, 0),
            GwElement(nf.zero, 1),
            GwElement(nf.zero, -1),
        ]
    )
