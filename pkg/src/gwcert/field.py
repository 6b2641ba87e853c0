"""Exact arithmetic in an algebraic number field given by a monic minimal polynomial.

Elements are stored as rational coefficient vectors in the power basis
1, w, ..., w^(deg-1).  All ring operations reduce modulo the minimal
polynomial, so representations are unique and hashable.  Complex
embeddings are computed once per field by simultaneous root iteration
(mpmath) at a configurable digit count and only ever feed floating
checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .errors import DivisionByZero, NonMonic, ReduciblePolynomial

Rat = Fraction


def _as_fraction_vector(coeffs) -> tuple[Fraction, ...]:
    return tuple(Fraction(c) for c in coeffs)


def _poly_divmod(a: list[Fraction], b: list[Fraction]):
    # dense coefficient lists, lowest degree first; b monic-led
    a = list(a)
    db, lead = len(b) - 1, b[-1]
    q = [Fraction(0)] * max(1, len(a) - db)
    while len(a) - 1 >= db and any(a):
        while a and a[-1] == 0:
            a.pop()
        if len(a) - 1 < db:
            break
        shift = len(a) - 1 - db
        factor = a[-1] / lead
        q[shift] = factor
        for i, c in enumerate(b):
            a[shift + i] -= factor * c
        a.pop()
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return q, a


def _rational_roots(poly: tuple[Fraction, ...]) -> list[Fraction]:
    """All rational roots, via the rational-root test on the cleared form."""
    from .arith import divisors

    lcm = 1
    for c in poly:
        lcm = lcm * c.denominator // __import__("math").gcd(lcm, c.denominator)
    ints = [int(c * lcm) for c in poly]
    while ints and ints[0] == 0:
        # factor out x; 0 is a root
        ints = ints[1:]
    a0, an = ints[0], ints[-1]
    roots = []
    if len(ints) < len(poly):
        roots.append(Fraction(0))
    for p in divisors(abs(a0)):
        for q in divisors(abs(an)):
            for cand in (Fraction(p, q), Fraction(-p, q)):
                if sum(c * cand**i for i, c in enumerate(poly)) == 0:
                    if cand not in roots:
                        roots.append(cand)
    return roots


def _is_irreducible(poly: tuple[Fraction, ...]) -> bool:
    deg = len(poly) - 1
    if deg == 1:
        return True
    if _rational_roots(poly):
        return False
    if deg <= 3:
        # no rational root suffices for degrees 2 and 3
        return True
    # higher degree: delegate to sympy's factorization (imported lazily)
    import sympy

    x = sympy.Symbol("x")
    expr = sum(sympy.Rational(c.numerator, c.denominator) * x**i for i, c in enumerate(poly))
    return sympy.Poly(expr, x).is_irreducible


@dataclass(frozen=True)
class Embedding:
    """One complex embedding: a root of the minimal polynomial."""

    root: complex
    root_mp: object  # mpmath.mpc at full precision
    is_real: bool
    conjugate_index: int

    def __call__(self, elem: "FieldElement"):
        """Evaluate the embedding at elem, as an mpmath complex number."""
        acc = mpmath.mpc(0)
        for c in reversed(elem.coeffs):
            acc = acc * self.root_mp + mpmath.mpf(c.numerator) / c.denominator
        return acc


class NumberField:
    """Q(w) for w a root of a monic irreducible polynomial over Q."""

    def __init__(self, min_poly, precision: int = 30):
        poly = _as_fraction_vector(min_poly)
        if len(poly) < 2:
            raise NonMonic("polynomial must have degree >= 1")
        if poly[-1] != 1:
            raise NonMonic("minimal polynomial must be monic")
        if not _is_irreducible(poly):
            raise ReduciblePolynomial(f"{poly} is reducible over Q")
        self.min_poly = poly
        self.degree = len(poly) - 1
        self.precision = precision
        self.embeddings = self._compute_embeddings()
        self._norm_trace_cache: dict[tuple, tuple] = {}

    # -- construction helpers -------------------------------------------------

    def _compute_embeddings(self) -> list[Embedding]:
        with mpmath.workdps(self.precision + 10):
            coeffs = [mpmath.mpf(c.numerator) / c.denominator for c in reversed(self.min_poly)]
            roots = mpmath.polyroots(coeffs, maxsteps=200, extraprec=80)
            roots = sorted(roots, key=lambda z: (mpmath.re(z), mpmath.im(z)))
            tol = mpmath.mpf(10) ** (-(self.precision // 2))
            cleaned = []
            for r in roots:
                if abs(mpmath.im(r)) < tol:
                    cleaned.append(mpmath.mpc(mpmath.re(r), 0))
                else:
                    cleaned.append(mpmath.mpc(r))
            # pair conjugates
            conj = [None] * len(cleaned)
            for i, r in enumerate(cleaned):
                if r.imag == 0:
                    conj[i] = i
                    continue
                if conj[i] is not None:
                    continue
                for j in range(i + 1, len(cleaned)):
                    if conj[j] is None and abs(cleaned[j] - mpmath.conj(r)) < tol:
                        conj[i], conj[j] = j, i
                        break
            if any(c is None for c in conj):
                raise RuntimeError("failed to pair conjugate embeddings")
            out = []
            for i, r in enumerate(cleaned):
                out.append(
                    Embedding(
                        root=complex(r),
                        root_mp=r,
                        is_real=(r.imag == 0),
                        conjugate_index=conj[i],
                    )
                )
        return out

    # -- element factory ------------------------------------------------------

    def element(self, coeffs) -> "FieldElement":
        """Element from a scalar or a coefficient vector in the power basis."""
        if isinstance(coeffs, FieldElement):
            if coeffs.field is not self:
                raise ValueError("element belongs to a different field")
            return coeffs
        if isinstance(coeffs, (int, Fraction)):
            vec = [Fraction(coeffs)] + [Fraction(0)] * (self.degree - 1)
            return FieldElement(self, tuple(vec))
        vec = _as_fraction_vector(coeffs)
        if len(vec) > self.degree:
            _, rem = _poly_divmod(list(vec), list(self.min_poly))
            vec = tuple(rem)
        vec = tuple(vec) + (Fraction(0),) * (self.degree - len(vec))
        return FieldElement(self, vec)

    @property
    def zero(self) -> "FieldElement":
        return self.element(0)

    @property
    def one(self) -> "FieldElement":
        return self.element(1)

    @property
    def gen(self) -> "FieldElement":
        """The defining element w."""
        if self.degree == 1:
            return self.element(-self.min_poly[0])
        return self.element([0, 1])

    # r1 + r2 - 1, the Dirichlet unit rank
    @property
    def unit_rank(self) -> int:
        r1 = sum(1 for e in self.embeddings if e.is_real)
        r2 = (self.degree - r1) // 2
        return r1 + r2 - 1

    def __repr__(self):
        return f"NumberField(min_poly={[str(c) for c in self.min_poly]})"


class FieldElement:
    """Immutable element of a NumberField in the reduced power-basis form."""

    __slots__ = ("field", "coeffs", "_hash")

    def __init__(self, field: NumberField, coeffs: tuple[Fraction, ...]):
        self.field = field
        self.coeffs = coeffs
        self._hash = None

    # -- basic structure ------------------------------------------------------

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def as_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.field.element(other)
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.field is other.field and self.coeffs == other.coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.coeffs)
        return self._hash

    # -- arithmetic -----------------------------------------------------------

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.element(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return self.field.element(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        deg = self.field.degree
        prod = [Fraction(0)] * (2 * deg - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    prod[i + j] += a * b
        _, rem = _poly_divmod(prod, list(self.field.min_poly))
        rem = rem + [Fraction(0)] * (deg - len(rem))
        return FieldElement(self.field, tuple(rem[:deg]))

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        if self.is_zero():
            raise DivisionByZero("inverse of 0")
        # extended Euclid in Q[x] against the minimal polynomial
        a = list(self.field.min_poly)
        b = [c for c in self.coeffs]
        while len(b) > 1 and b[-1] == 0:
            b.pop()
        # invariants: s*min_poly + t*orig == current remainder
        t0, t1 = [Fraction(0)], [Fraction(1)]
        while True:
            if len(b) == 1:
                inv = [c / b[0] for c in t1]
                return self.field.element(inv)
            q, r = _poly_divmod(a, b)
            # t_next = t0 - q * t1
            qt = [Fraction(0)] * (len(q) + len(t1) - 1)
            for i, qc in enumerate(q):
                if qc:
                    for j, tc in enumerate(t1):
                        qt[i + j] += qc * tc
            t_next = [Fraction(0)] * max(len(t0), len(qt))
            for i, c in enumerate(t0):
                t_next[i] += c
            for i, c in enumerate(qt):
                t_next[i] -= c
            while len(t_next) > 1 and t_next[-1] == 0:
                t_next.pop()
            a, b = b, r
            while len(b) > 1 and b[-1] == 0:
                b.pop()
            t0, t1 = t1, t_next

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.field.element(other) / self

    def __pow__(self, n: int):
        if n == 0:
            return self.field.one
        base = self if n > 0 else self.inverse()
        n = abs(n)
        acc = self.field.one
        while n:
            if n & 1:
                acc = acc * base
            base = base * base
            n >>= 1
        return acc

    # -- invariants -----------------------------------------------------------

    def mult_matrix(self) -> list[list[Fraction]]:
        """Matrix of multiplication by self on the power basis (columns = images)."""
        deg = self.field.degree
        cols = []
        w = self.field.gen if deg > 1 else None
        cur = self
        for _ in range(deg):
            cols.append(list(cur.coeffs))
            if w is not None:
                cur = cur * w
        # cols[j] = coeffs of self * w^j
        return [[cols[j][i] for j in range(deg)] for i in range(deg)]

    def norm(self) -> Fraction:
        """Field norm: determinant of the multiplication matrix."""
        return _det(self.mult_matrix())

    def trace(self) -> Fraction:
        m = self.mult_matrix()
        return sum(m[i][i] for i in range(len(m)))

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            elif i == 1:
                terms.append(f"{c}*w")
            else:
                terms.append(f"{c}*w^{i}")
        return " + ".join(terms) if terms else "0"


def _det(m: list[list[Fraction]]) -> Fraction:
    """Fraction-exact determinant by Gaussian elimination."""
    n = len(m)
    m = [row[:] for row in m]
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        det *= m[col][col]
        inv = 1 / m[col][col]
        for r in range(col + 1, n):
            if m[r][col]:
                factor = m[r][col] * inv
                for c in range(col, n):
                    m[r][c] -= factor * m[col][c]
    return det


def field_from_spec(min_poly, precision: int = 30) -> NumberField:
    """Build a field from a monic rational polynomial; rejects reducible input."""
    return NumberField(min_poly, precision=precision)


def fe_arith(kind: str, a: FieldElement, b: FieldElement | None = None) -> FieldElement:
    """Uniform entry point for add/sub/mul/inv, mirroring the CLI surface."""
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if kind == "inv":
        return a.inverse()
    raise ValueError(f"unknown operation {kind!r}")


def norm_and_trace(a: FieldElement) -> tuple[Fraction, Fraction]:
    return a.norm(), a.trace()
