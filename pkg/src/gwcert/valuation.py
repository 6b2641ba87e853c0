"""Prime ideals, valuations, the finite set of primes where w is non-trivial,
and the unit group of the localized ring.

Fully automatic machinery covers field degrees 1 and 2.  Degree 2 works in
the integral basis (1, omega) of the maximal order, so Dedekind splitting of
the omega minimal polynomial is valid at every rational prime.  Higher
degrees are accepted only with user-supplied splitting data restricted to
unramified degree-one primes (Hensel evaluation applies there verbatim).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .arith import factorint, padic_val, rational_support
from .errors import NotAUnit, UnsupportedDegree, UnsupportedField
from .field import FieldElement, NumberField
from .zlattice import hnf_columns

INF = None  # valuation of 0


def _squarefree_decompose(n: int) -> tuple[int, int]:
    """n = s^2 * D with D squarefree; returns (s, D). Sign stays on D."""
    sign = -1 if n < 0 else 1
    s, d = 1, 1
    for p, e in factorint(abs(n)).items():
        s *= p ** (e // 2)
        if e % 2:
            d *= p
    return s, sign * d


class OrderData:
    """Integral-basis data for the ring of integers, degrees 1 and 2."""

    def __init__(self, nf: NumberField):
        self.nf = nf
        if nf.degree == 1:
            self.omega = nf.one
            self.disc_D = 1
            return
        if nf.degree != 2:
            raise UnsupportedDegree("automatic order data needs degree <= 2")
        b, c = nf.min_poly[1], nf.min_poly[0]
        d = b * b - 4 * c  # rational discriminant of the power basis
        s, D = _squarefree_decompose(d.numerator * d.denominator)
        # sqrt(d) = (s / den) * sqrt(D); and sqrt(d) = 2 w + b
        sqrtD = (nf.element([b, 2])) * Fraction(d.denominator, s)
        self.disc_D = D
        if D % 4 == 1:
            self.omega = (nf.one + sqrtD) * Fraction(1, 2)
        else:
            self.omega = sqrtD
        # change of basis: columns are (1, omega) in the power basis
        o = self.omega.coeffs
        det = o[1]  # basis matrix [[1, o0],[0, o1]]
        self._inv = (Fraction(1), -o[0] / det, Fraction(0), 1 / det)
        self.omega_trace = self.omega.trace()
        self.omega_norm = self.omega.norm()

    def coords(self, x: FieldElement) -> tuple[Fraction, ...]:
        """Coordinates of x in the integral basis (1,) or (1, omega)."""
        if self.nf.degree == 1:
            return (x.coeffs[0],)
        a, b, c, d = self._inv
        return (a * x.coeffs[0] + b * x.coeffs[1], c * x.coeffs[0] + d * x.coeffs[1])

    def from_coords(self, c) -> FieldElement:
        if self.nf.degree == 1:
            return self.nf.element(c[0])
        return self.nf.element(c[0]) + self.nf.element(c[1]) * self.omega

    def is_integral(self, x: FieldElement) -> bool:
        return all(Fraction(v).denominator == 1 for v in self.coords(x))


def order_data(nf: NumberField) -> OrderData:
    od = getattr(nf, "_order_data", None)
    if od is None:
        od = OrderData(nf)
        nf._order_data = od
    return od


@dataclass(frozen=True)
class PrimeIdeal:
    """A prime ideal of the ring of integers, with its valuation evaluator.

    kind is one of 'rational' (degree-1 field), 'inert', 'split', 'ramified',
    or 'user' (field-spec supplied, unramified residue-degree one).
    """

    nf: NumberField
    p: int
    e: int
    f: int
    kind: str
    root: int | None = None  # split/ramified/user: root of the omega (or min) poly mod p
    _cache: dict = dc_field(default_factory=dict, compare=False, hash=False, repr=False)

    def __hash__(self):
        return hash((id(self.nf), self.p, self.kind, self.root))

    def __eq__(self, other):
        if not isinstance(other, PrimeIdeal):
            return NotImplemented
        return (
            self.nf is other.nf
            and self.p == other.p
            and self.kind == other.kind
            and self.root == other.root
        )

    @property
    def residue_size(self) -> int:
        return self.p**self.f

    @property
    def two_element_rep(self) -> tuple[int, FieldElement]:
        if self.kind in ("rational", "inert"):
            return (self.p, self.nf.element(self.p))
        od = order_data(self.nf)
        if self.kind == "user":
            return (self.p, self.nf.gen - self.root)
        return (self.p, od.omega - self.root)

    @property
    def uniformizer(self) -> FieldElement:
        pi = self._cache.get("uniformizer")
        if pi is None:
            pi = self._find_uniformizer()
            self._cache["uniformizer"] = pi
        return pi

    def _find_uniformizer(self) -> FieldElement:
        if self.kind in ("rational", "inert"):
            return self.nf.element(self.p)
        od = order_data(self.nf)
        base = (self.nf.gen if self.kind == "user" else od.omega) - self.root
        for cand in (base, base + self.p):
            if valuation(cand, self) == 1:
                return cand
        # ramified primes can need a short search
        if self.kind == "ramified":
            for a in range(-2 * self.p, 2 * self.p + 1):
                for b in range(-2 * self.p, 2 * self.p + 1):
                    cand = od.from_coords((a, b))
                    if not cand.is_zero() and valuation(cand, self) == 1:
                        return cand
        raise RuntimeError(f"no uniformizer found for {self}")

    def principal_power(self, class_bound: int = 12) -> tuple[int, FieldElement]:
        """(k, y) with y generating the k-th power of this ideal, k minimal."""
        pw = self._cache.get("principal_power")
        if pw is None:
            pw = _principal_power(self, class_bound)
            self._cache["principal_power"] = pw
        return pw

    def lattice(self) -> list[list[int]]:
        """Z-basis (HNF, integral-basis coordinates) of the ideal; degree <= 2."""
        od = order_data(self.nf)
        if self.nf.degree == 1:
            return [[self.p]]
        _, g = self.two_element_rep
        gens = []
        for elem in (self.nf.element(self.p), self.nf.element(self.p) * od.omega, g, g * od.omega):
            c = od.coords(elem)
            gens.append((int(c[0]), int(c[1])))
        return hnf_columns(gens, 2)

    def __repr__(self):
        return f"PrimeIdeal(p={self.p}, e={self.e}, f={self.f}, kind={self.kind}, root={self.root})"


def _omega_poly(od: OrderData) -> tuple[int, int]:
    """omega satisfies x^2 - t x + n with integer t, n (degree 2 only)."""
    return int(od.omega_trace), int(od.omega_norm)


def primes_above(nf: NumberField, p: int) -> list[PrimeIdeal]:
    """All prime ideals above the rational prime p, with e, f and evaluators."""
    if nf.degree == 1:
        return [PrimeIdeal(nf, p, 1, 1, "rational")]
    spec_split = getattr(nf, "_spec_splittings", {}).get(p)
    if nf.degree > 2:
        if spec_split is None:
            raise UnsupportedDegree(f"no splitting data for p={p} in degree {nf.degree}")
        return [
            PrimeIdeal(nf, p, entry["e"], entry["f"], "user", root=entry["root"])
            for entry in spec_split
        ]
    od = order_data(nf)
    t, n = _omega_poly(od)
    # factor x^2 - t x + n mod p
    roots = [r for r in range(p) if (r * r - t * r + n) % p == 0]
    disc = (t * t - 4 * n) % p
    if not roots:
        return [PrimeIdeal(nf, p, 1, 2, "inert")]
    if disc == 0:
        return [PrimeIdeal(nf, p, 2, 1, "ramified", root=roots[0])]
    return [PrimeIdeal(nf, p, 1, 1, "split", root=r) for r in sorted(roots)]


def _hensel_lift(t: int, n: int, r: int, p: int, k: int) -> int:
    """Root of x^2 - t x + n mod p^k lifting the simple root r mod p."""
    mod = p
    while mod < p**k:
        mod = min(mod * mod, p**k)
        h = (r * r - t * r + n) % mod
        dh = (2 * r - t) % mod
        inv = pow(dh, -1, mod)
        r = (r - h * inv) % mod
    return r


def _hensel_lift_poly(poly: tuple[Fraction, ...], r: int, p: int, k: int) -> int:
    """Same, for a general integer-coefficient monic polynomial (user primes)."""
    coeffs = [int(c) for c in poly]
    mod = p
    while mod < p**k:
        mod = min(mod * mod, p**k)
        h = sum(c * pow(r, i, mod) for i, c in enumerate(coeffs)) % mod
        dh = sum(i * c * pow(r, i - 1, mod) for i, c in enumerate(coeffs) if i) % mod
        r = (r - h * pow(dh, -1, mod)) % mod
    return r


def valuation(x: FieldElement, P: PrimeIdeal) -> int | None:
    """The valuation of x at P; None means +infinity (x == 0)."""
    if x.is_zero():
        return INF
    nf = P.nf
    if P.kind == "rational":
        return padic_val(x.as_rational(), P.p)
    vn = padic_val(x.norm(), P.p)
    if P.kind == "inert":
        assert vn % 2 == 0
        return vn // 2
    if P.kind == "ramified":
        return vn
    # split or user: evaluate at the Hensel-lifted root with growing precision
    if P.kind == "user":
        c = x.coeffs
        evaluate = lambda rk: sum(ci * rk**i for i, ci in enumerate(c))
        lift = lambda k: _hensel_lift_poly(nf.min_poly, P.root, P.p, k)
        slack = min((padic_val(ci, P.p) or 0) for ci in c if ci != 0)
    else:
        od = order_data(nf)
        t, n = _omega_poly(od)
        c0, c1 = od.coords(x)
        evaluate = lambda rk: c0 + c1 * rk
        lift = lambda k: _hensel_lift(t, n, P.root, P.p, k)
        slack = min(v for v in (padic_val(c0, P.p), padic_val(c1, P.p)) if v is not None)
    k = 8
    while True:
        rk = lift(k)
        val = evaluate(rk)
        if val != 0:
            v = padic_val(val, P.p)
            if v < k + slack:
                return v
        k *= 2
        if k > 4096:
            raise RuntimeError("Hensel precision runaway in valuation")


def mw_set(w: FieldElement) -> list[PrimeIdeal]:
    """The primes at which w has non-zero valuation (a finite set)."""
    if w.is_zero():
        raise ValueError("w must be non-zero")
    nf = w.field
    out = []
    for p in rational_support(w.norm()):
        for P in primes_above(nf, p):
            if valuation(w, P) != 0:
                out.append(P)
    return out


def _relevant_primes(x: FieldElement) -> list[PrimeIdeal]:
    """All primes where x can possibly have non-zero valuation."""
    nx = x.norm()
    if abs(nx.numerator) == 1 and nx.denominator == 1:
        return []
    return [P for p in rational_support(nx) for P in primes_above(x.field, p)]


def membership(x: FieldElement, w: FieldElement, which: str) -> bool:
    """Membership in O, in the localized ring O_w, or in its unit group."""
    if which == "O":
        return order_data(x.field).is_integral(x)
    if x.is_zero():
        return which == "O_w"
    mw = {P for P in mw_set(w)}
    for P in _relevant_primes(x):
        if P in mw:
            continue
        v = valuation(x, P)
        if which == "O_w" and v < 0:
            return False
        if which == "O_w_units" and v != 0:
            return False
    return True


def _principal_power(P: PrimeIdeal, class_bound: int) -> tuple[int, FieldElement]:
    nf = P.nf
    if P.kind == "rational":
        return (1, nf.element(P.p))
    od = order_data(nf)
    target = 1
    lat = [[1, 0], [0, 1]]
    for k in range(1, class_bound + 1):
        lat = _ideal_mul(od, lat, P.lattice())
        target *= P.residue_size
        b1 = (lat[0][0], lat[1][0])
        b2 = (lat[0][1], lat[1][1])
        for bound in (4, 16, 64):
            for m1 in range(-bound, bound + 1):
                for m2 in range(-bound, bound + 1):
                    y = od.from_coords((m1 * b1[0] + m2 * b2[0], m1 * b1[1] + m2 * b2[1]))
                    if y.is_zero():
                        continue
                    if abs(y.norm()) == target:
                        return (k, y)
    raise UnsupportedField(f"no principal power of {P} up to exponent {class_bound}")


def _ideal_mul(od: OrderData, a: list[list[int]], b: list[list[int]]) -> list[list[int]]:
    """Product of two ideals given by HNF bases in the integral basis; degree 2."""
    ga = [(a[0][0], a[1][0]), (a[0][1], a[1][1])]
    gb = [(b[0][0], b[1][0]), (b[0][1], b[1][1])]
    prods = []
    for x in ga:
        ex = od.from_coords(x)
        for y in gb:
            c = od.coords(ex * od.from_coords(y))
            prods.append((int(c[0]), int(c[1])))
    return hnf_columns(prods, 2)


@dataclass
class UnitGroupData:
    torsion_order: int
    torsion_gen: FieldElement
    fundamental_units: list[FieldElement]
    rank_nw: int
    mw_primes: list[PrimeIdeal]
    mw_generators: list[tuple[int, FieldElement]]  # (k, y) per M_w prime


def _fundamental_unit(nf: NumberField) -> FieldElement:
    """Smallest unit > 1 of a real quadratic field, by minimal omega-coefficient."""
    od = order_data(nf)
    t, n = _omega_poly(od)
    for b in range(1, 10**6):
        for target in (1, -1):
            # a^2 + a b t' + b^2 n = target with t' = -trace? N(a+b omega):
            # (a + b omega)(a + b conj) = a^2 + a b t + b^2 n
            disc = b * b * t * t - 4 * (b * b * n - target)
            if disc < 0:
                continue
            s = math.isqrt(disc)
            if s * s != disc:
                continue
            for sign in (1, -1):
                num = -b * t + sign * s
                if num % 2 == 0:
                    a = num // 2
                    u = od.from_coords((a, b))
                    if abs(u.norm()) == 1:
                        return _normalize_unit(u)
    raise UnsupportedField("fundamental unit search exhausted")


def _normalize_unit(u: FieldElement) -> FieldElement:
    """Replace u by +-u^(+-1) so that the largest real embedding value is > 1
    and positive under the first real embedding."""
    nf = u.field
    emb = next(e for e in nf.embeddings if e.is_real)
    val = float(emb(u).real)
    if abs(val) < 1:
        u = u.inverse()
        val = float(emb(u).real)
    if val < 0:
        u = -u
    return u


def unit_group(nf: NumberField, w: FieldElement, class_bound: int = 12) -> UnitGroupData:
    """Unit group data for the localized ring: torsion, fundamental units,
    and a principal-power generator for every prime where w is non-trivial."""
    spec_units = getattr(nf, "_spec_units", None)
    mw = mw_set(w)
    gens = [P.principal_power(class_bound) for P in mw]
    if nf.degree == 1:
        return UnitGroupData(2, nf.element(-1), [], 0, mw, gens)
    if nf.degree > 2:
        if spec_units is None:
            raise UnsupportedField("degree > 2 needs fundamental_units in the field spec")
        return UnitGroupData(
            spec_units["torsion_order"],
            spec_units["torsion_gen"],
            spec_units["fundamental_units"],
            len(spec_units["fundamental_units"]),
            mw,
            gens,
        )
    od = order_data(nf)
    if od.disc_D < 0:
        if od.disc_D == -1:
            return UnitGroupData(4, _imaginary_torsion_gen(nf, 4), [], 0, mw, gens)
        if od.disc_D == -3:
            return UnitGroupData(6, _imaginary_torsion_gen(nf, 6), [], 0, mw, gens)
        return UnitGroupData(2, nf.element(-1), [], 0, mw, gens)
    return UnitGroupData(2, nf.element(-1), [_fundamental_unit(nf)], 1, mw, gens)


def _imaginary_torsion_gen(nf: NumberField, order: int) -> FieldElement:
    """Search a primitive root of unity of the given order in the order."""
    od = order_data(nf)
    for a in range(-3, 4):
        for b in range(-3, 4):
            z = od.from_coords((a, b))
            if z.is_zero():
                continue
            if z**order == 1 and all((z**k) != 1 for k in range(1, order)):
                return z
    raise UnsupportedField("no torsion generator found")


def alpha_w(y: FieldElement, units: UnitGroupData):
    """Decompose a unit of the localized ring as
    torsion * prod(fundamental^a_i) * prod(y_P^b_P); exact reconstruction.

    Returns (torsion_element, [a_i], [b_P]) ordered like units.mw_primes.
    """
    nf = y.field
    if y.is_zero():
        raise NotAUnit("0 is not a unit")
    # M_w exponents
    b_vec = []
    rest = y
    for P, (k, gen) in zip(units.mw_primes, units.mw_generators):
        v = valuation(y, P)
        if v % k != 0:
            raise NotAUnit(f"valuation {v} at {P} not divisible by principal power {k}")
        b = v // k
        b_vec.append(b)
        rest = rest * gen ** (-b)
    # rest must now be a unit of the maximal order
    if abs(rest.norm()) != 1 or not order_data(nf).is_integral(rest) or not order_data(nf).is_integral(rest.inverse()):
        raise NotAUnit(f"{y} is not a unit of the localized ring")
    a_vec = []
    for e in units.fundamental_units:
        emb = next(em for em in nf.embeddings if em.is_real)
        le = math.log(abs(complex(emb(e))))
        lr = math.log(abs(complex(emb(rest))))
        a = round(lr / le)
        a_vec.append(a)
        rest = rest * e ** (-a)
    # what is left must be torsion; verify exactly
    tors = rest
    if tors ** units.torsion_order != 1:
        raise NotAUnit("reconstruction failed: residual is not torsion")
    return tors, a_vec, b_vec


def alpha_reconstruct(decomp, units: UnitGroupData) -> FieldElement:
    tors, a_vec, b_vec = decomp
    out = tors
    for e, a in zip(units.fundamental_units, a_vec):
        out = out * e**a
    for (k, gen), b in zip(units.mw_generators, b_vec):
        out = out * gen**b
    return out
