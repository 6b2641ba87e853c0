"""The CAT(0) model space R^{n_w} x product of trees, geodesics, the
retraction-based strong homotopy action, Minkowski coordinates, warp
functions, warped-product path lengths, and flow-space primitives.

Tree coordinates are exact (rational offsets along edges, canonical
encodings); only the final l2 combinations and the strong-homotopy
evaluations are floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import NotInActingGroup, ShapeMismatch, UnsupportedDegree
from .field import FieldElement, NumberField
from .tree import LatticeClass, act as tree_act, busemann, identity_class, neighbors, tree_distance
from .valuation import NotAUnit, UnitGroupData, alpha_w, unit_group, valuation


# -- tree points and exact tree geometry -------------------------------------


def _cls_key(c: LatticeClass):
    return (c.a, c.b.coeffs)


@dataclass(frozen=True)
class TreePoint:
    """Point on a vertex (a == b, offset 0) or in the interior of the edge
    from a to b at the given offset in (0,1); endpoint order canonical."""

    a: LatticeClass
    b: LatticeClass
    offset: Fraction


def tree_point(u: LatticeClass, v: LatticeClass, offset) -> TreePoint:
    offset = Fraction(offset)
    if not 0 <= offset <= 1:
        raise ValueError(f"offset {offset} outside [0,1]")
    if offset == 0 or u == v:
        return TreePoint(u, u, Fraction(0))
    if offset == 1:
        return TreePoint(v, v, Fraction(0))
    if tree_distance(u, v) != 1:
        raise ValueError("interior points need adjacent endpoints")
    if _cls_key(v) < _cls_key(u):
        u, v, offset = v, u, 1 - offset
    return TreePoint(u, v, offset)


def vertex_point(v: LatticeClass) -> TreePoint:
    return TreePoint(v, v, Fraction(0))


def _ends(p: TreePoint):
    if p.a == p.b:
        return [(p.a, Fraction(0))]
    return [(p.a, p.offset), (p.b, 1 - p.offset)]


def tp_distance(p: TreePoint, q: TreePoint) -> Fraction:
    if p == q:
        return Fraction(0)
    cands = []
    if p.a != p.b and (p.a, p.b) == (q.a, q.b):
        cands.append(abs(p.offset - q.offset))
    for vp, wp in _ends(p):
        for vq, wq in _ends(q):
            cands.append(wp + tree_distance(vp, vq) + wq)
    return min(cands)


def _vertex_path(u: LatticeClass, v: LatticeClass) -> list[LatticeClass]:
    path = [u]
    cur = u
    while cur != v:
        d = tree_distance(cur, v)
        for nb in neighbors(cur):
            if tree_distance(nb, v) == d - 1:
                cur = nb
                break
        else:
            raise RuntimeError("no descending neighbor; tree structure broken")
        path.append(cur)
    return path


def _interp_on_edge(p: TreePoint, q: TreePoint, f: Fraction) -> TreePoint:
    """Point at fraction f from p to q, both on a common closed edge."""
    if p == q:
        return p
    # identify the edge and both offsets along it
    if p.a != p.b:
        ea, eb = p.a, p.b
    elif q.a != q.b:
        ea, eb = q.a, q.b
    else:
        ea, eb = p.a, q.a  # both vertices of one edge
    def off(r: TreePoint) -> Fraction:
        if r.a == r.b:
            return Fraction(0) if r.a == ea else Fraction(1)
        if (r.a, r.b) == (ea, eb):
            return r.offset
        return 1 - r.offset
    s, t = off(p), off(q)
    return tree_point(ea, eb, s + (t - s) * f)


def tree_geodesic(p: TreePoint, q: TreePoint) -> list[tuple[Fraction, TreePoint]]:
    """Breakpoints (cumulative distance, point) of the unique arc."""
    if p == q:
        return [(Fraction(0), p)]
    if p.a != p.b and (p.a, p.b) == (q.a, q.b):
        return [(Fraction(0), p), (abs(p.offset - q.offset), q)]
    best = None
    for vp, wp in _ends(p):
        for vq, wq in _ends(q):
            d = wp + tree_distance(vp, vq) + wq
            if best is None or d < best[0]:
                best = (d, vp, wp, vq, wq)
    _, vp, wp, vq, wq = best
    pts: list[tuple[Fraction, TreePoint]] = [(Fraction(0), p)]
    cum = wp
    for v in _vertex_path(vp, vq):
        node = vertex_point(v)
        if pts[-1][1] != node:
            pts.append((cum, node))
        cum += 1
    cum -= 1  # last vertex added one step too many
    if pts[-1][1] != q:
        pts.append((cum + wq, q))
    return pts


def tree_geodesic_eval(path: list[tuple[Fraction, TreePoint]], t: Fraction) -> TreePoint:
    total = path[-1][0]
    if t <= 0:
        return path[0][1]
    if t >= total:
        return path[-1][1]
    for i in range(len(path) - 1):
        t0, p0 = path[i]
        t1, p1 = path[i + 1]
        if t0 <= t <= t1:
            return _interp_on_edge(p0, p1, (t - t0) / (t1 - t0))
    return path[-1][1]


# -- model space --------------------------------------------------------------


@dataclass(frozen=True)
class ModelPoint:
    euclid: tuple  # floats, length n_w
    trees: tuple  # TreePoint per prime in M_w


class ModelContext:
    """Unit data and M_w primes fixing the shape of the model space."""

    def __init__(self, nf: NumberField, w: FieldElement):
        self.nf = nf
        self.w = w
        self.units: UnitGroupData = unit_group(nf, w)
        self.primes = self.units.mw_primes
        self.n_w = self.units.rank_nw
        self._alpha_cache: dict = {}
        self.base = ModelPoint(
            tuple(0.0 for _ in range(self.n_w)),
            tuple(vertex_point(identity_class(P)) for P in self.primes),
        )

    def alpha_free(self, y: FieldElement):
        key = y.coeffs
        if key not in self._alpha_cache:
            try:
                self._alpha_cache[key] = alpha_w(y, self.units)
            except NotAUnit as exc:
                raise NotInActingGroup(str(exc)) from exc
        return self._alpha_cache[key]


def xw_distance(a: ModelPoint, b: ModelPoint) -> float:
    if len(a.euclid) != len(b.euclid) or len(a.trees) != len(b.trees):
        raise ShapeMismatch("model points of different shapes")
    s = sum((x - y) ** 2 for x, y in zip(a.euclid, b.euclid))
    s += sum(float(tp_distance(p, q)) ** 2 for p, q in zip(a.trees, b.trees))
    return math.sqrt(s)


def geodesic_eval(a: ModelPoint, b: ModelPoint, t: float) -> ModelPoint:
    """Point at arc length t along the unique geodesic from a to b."""
    total = xw_distance(a, b)
    if total == 0 or t <= 0:
        return a
    if t >= total:
        return b
    f = t / total
    eu = tuple(x + (y - x) * f for x, y in zip(a.euclid, b.euclid))
    trees = []
    for p, q in zip(a.trees, b.trees):
        path = tree_geodesic(p, q)
        d = path[-1][0]
        trees.append(tree_geodesic_eval(path, Fraction(f).limit_denominator(10**12) * d))
    return ModelPoint(eu, tuple(trees))


def act_model(g: tuple, pt: ModelPoint, ctx: ModelContext) -> ModelPoint:
    """Action of (x, y) in Q(w) semidirect O_w^x: translate R^{n_w} by the
    free part of y's unit decomposition, transform each tree factor."""
    x, y = g
    _, a_vec, _ = ctx.alpha_free(y)
    eu = tuple(r + a for r, a in zip(pt.euclid, a_vec))
    trees = []
    for p, P in zip(pt.trees, ctx.primes):
        if p.a == p.b:
            trees.append(vertex_point(tree_act(g, p.a)))
        else:
            trees.append(tree_point(tree_act(g, p.a), tree_act(g, p.b), p.offset))
    return ModelPoint(eu, tuple(trees))


def group_mul(g: tuple, h: tuple) -> tuple:
    """(x1,y1)(x2,y2) = (x1 + y1 x2, y1 y2) in Q(w) semidirect Q(w)^x."""
    return (g[0] + g[1] * h[0], g[1] * h[1])


# -- retraction and strong homotopy action ------------------------------------


def retraction_HR(x: ModelPoint, t: float, R: float, base: ModelPoint) -> ModelPoint:
    """H^R(x, t): slide x toward the base point by (d - R)(1 - t)."""
    d = xw_distance(x, base)
    s = (d - R) * (1 - t)
    if s <= 0:
        return x
    return geodesic_eval(x, base, min(s, d))


def sha_eval(word: list, x: ModelPoint, R: float, base: ModelPoint, ctx: ModelContext) -> ModelPoint:
    """Evaluate the strong homotopy action on an alternating word
    [g_j, t_j, g_{j-1}, ..., g_1, t_1, g_0]: the inductive composition of the
    group action with the homotopy retraction, then retract fully."""
    if len(word) % 2 != 1:
        raise ValueError("word must alternate g, t, ..., g")
    items = list(word)
    g0 = items[-1]
    val = act_model(g0, x, ctx)
    rest = items[:-1]
    while rest:
        t = rest.pop()
        g = rest.pop()
        val = act_model(g, retraction_HR(val, t, R, base), ctx)
    return retraction_HR(val, 0.0, R, base)


# -- Minkowski space and warped products --------------------------------------


@dataclass(frozen=True)
class MinkowskiVector:
    coords: tuple  # one complex number per embedding, conjugation-symmetric


def minkowski_embed(x: FieldElement) -> MinkowskiVector:
    return MinkowskiVector(tuple(complex(e(x)) for e in x.field.embeddings))


def minkowski_distance(u: MinkowskiVector, v: MinkowskiVector) -> float:
    return math.sqrt(sum(abs(a - b) ** 2 for a, b in zip(u.coords, v.coords)))


def minkowski_add(u: MinkowskiVector, v: MinkowskiVector) -> MinkowskiVector:
    return MinkowskiVector(tuple(a + b for a, b in zip(u.coords, v.coords)))


def minkowski_lerp(u: MinkowskiVector, v: MinkowskiVector, f: float) -> MinkowskiVector:
    return MinkowskiVector(tuple(a + (b - a) * f for a, b in zip(u.coords, v.coords)))


def ideal_lattice_basis(elements: list[FieldElement]) -> list[MinkowskiVector]:
    """Embeddings of an integral basis of an ideal (supplied as elements)."""
    if not elements:
        raise UnsupportedDegree("no integral basis supplied")
    return [minkowski_embed(b) for b in elements]


def busemann_of(p: TreePoint) -> Fraction:
    """Busemann value, linearly interpolated on edge interiors."""
    if p.a == p.b:
        return Fraction(busemann(p.a))
    return (1 - p.offset) * busemann(p.a) + p.offset * busemann(p.b)


def warp_factor(tau_index: int, pt: ModelPoint, ctx: ModelContext) -> float:
    """f^[tau](r, trees) = prod |tau(e_i)|^{-r_i} *
    prod |tau(y_P)|^{f_P(p_P) / v_P(y_P)}."""
    emb = ctx.nf.embeddings[tau_index]
    out = 1.0
    for e_i, r_i in zip(ctx.units.fundamental_units, pt.euclid):
        out *= abs(complex(emb(e_i))) ** (-r_i)
    for (k, y_P), p in zip(ctx.units.mw_generators, pt.trees):
        out *= abs(complex(emb(y_P))) ** (float(busemann_of(p)) / k)
    return out


def _warped_increment(a, b, ctx: ModelContext) -> float:
    """sqrt(d_X^2 + sum_tau f^[tau](a)^2 |z_tau(a) - z_tau(b)|^2),
    the warped increment with the warp read at the left endpoint."""
    dx = xw_distance(a[0], b[0])
    dz = 0.0
    for tau in range(len(ctx.nf.embeddings)):
        fw = warp_factor(tau, a[0], ctx)
        dz += (fw * abs(a[1].coords[tau] - b[1].coords[tau])) ** 2
    return math.sqrt(dx * dx + dz)


def warped_path_length(nodes: list, partition: list, ctx: ModelContext) -> float:
    """Minimal warped sum over sub-partitions of the given partition:
    the minimum over index chains 0 = i_0 < ... < i_r = end of
    sum sqrt(d_X^2 + sum_tau f^[tau](left end)^2 |dz_tau|^2).

    This realizes the minimum-over-partitions length on the discretization
    the caller supplies, so refining the partition never increases the value.

    nodes: [(ModelPoint, MinkowskiVector), ...] at integer times 0..k;
    partition: increasing times in [0, k] containing all the integers.
    """
    def at(time: float):
        i = min(int(time), len(nodes) - 2)
        f = time - i
        (p0, z0), (p1, z1) = nodes[i], nodes[i + 1]
        if f == 0:
            return p0, z0
        if f == 1:
            return p1, z1
        return geodesic_eval(p0, p1, f * xw_distance(p0, p1)), minkowski_lerp(z0, z1, f)

    pts = [at(t) for t in partition]
    n = len(pts)
    best = [math.inf] * n
    best[0] = 0.0
    for j in range(1, n):
        for i in range(j):
            cand = best[i] + _warped_increment(pts[i], pts[j], ctx)
            if cand < best[j]:
                best[j] = cand
    return best[-1]


# -- flow space ----------------------------------------------------------------


@dataclass(frozen=True)
class GeneralizedGeodesic:
    """Map R -> X_w: constant before c_minus, unit-speed geodesic from start
    to end on [c_minus, c_plus], constant after; c_plus - c_minus = d(start, end)."""

    c_minus: Fraction
    start: ModelPoint
    end: ModelPoint

    @property
    def c_plus(self) -> Fraction:
        return self.c_minus + Fraction(xw_distance(self.start, self.end)).limit_denominator(10**9)

    def _evaluator(self):
        ev = getattr(self, "_eval_cache", None)
        if ev is None:
            d = xw_distance(self.start, self.end)
            paths = [tree_geodesic(p, q) for p, q in zip(self.start.trees, self.end.trees)]
            object.__setattr__(self, "_eval_cache", (d, paths))
            ev = (d, paths)
        return ev

    def __call__(self, t: float) -> ModelPoint:
        d, paths = self._evaluator()
        s = t - float(self.c_minus)
        if s <= 0 or d == 0:
            return self.start
        if s >= d:
            return self.end
        f = s / d
        eu = tuple(x + (y - x) * f for x, y in zip(self.start.euclid, self.end.euclid))
        frac = Fraction(f).limit_denominator(10**9)
        trees = tuple(
            tree_geodesic_eval(path, frac * path[-1][0]) for path in paths
        )
        return ModelPoint(eu, trees)


def constant_geodesic(p: ModelPoint) -> GeneralizedGeodesic:
    return GeneralizedGeodesic(Fraction(0), p, p)


def fs_flow(c: GeneralizedGeodesic, tau) -> GeneralizedGeodesic:
    """Phi_tau(c)(t) = c(t + tau): exact shift of the interval."""
    return GeneralizedGeodesic(c.c_minus - Fraction(tau), c.start, c.end)


def _tail_weight(a: float) -> float:
    """integral of e^{-|t|}/2 over (-inf, a]."""
    if a <= 0:
        return 0.5 * math.exp(a)
    return 1.0 - 0.5 * math.exp(-a)


def _weight_integral(u: float, v: float) -> float:
    """integral of e^{-|t|}/2 over [u, v]."""
    return _tail_weight(v) - _tail_weight(u)


def fs_distance(c: GeneralizedGeodesic, d: GeneralizedGeodesic, step: float = 1e-3, tol: float = 1e-8) -> float:
    """Weighted integral of d_X(c(t), d(t)) against e^{-|t|}/2 dt.

    On stretches where both maps are constant the integrand is constant
    and the weight integrates in closed form (including the infinite
    tails); where either map moves, trapezoid quadrature with the given
    step.  The cutoff error stays below tol by the tail bound
    (D + 2T + 2) e^{-T} on (D + 2|t|) e^{-|t|}.
    """
    both_constant = c.start == c.end and d.start == d.end
    if both_constant:
        return xw_distance(c.start, d.start)
    d0 = xw_distance(c(0.0), d(0.0))
    T = 1.0
    while (d0 + 2 * T + 2) * math.exp(-T) >= tol:
        T += 1.0
    cuts = sorted(
        {-T, T}
        | {
            float(x)
            for x in (c.c_minus, c.c_plus, d.c_minus, d.c_plus)
            if -T < float(x) < T
        }
    )
    total = xw_distance(c(-T), d(-T)) * _tail_weight(-T)
    total += xw_distance(c(T), d(T)) * _tail_weight(-T)

    def moving(geod, u, v):
        return geod.start != geod.end and float(geod.c_minus) < v and float(geod.c_plus) > u

    for u, v in zip(cuts, cuts[1:]):
        if not (moving(c, u, v) or moving(d, u, v)):
            total += xw_distance(c(u), d(u)) * _weight_integral(u, v)
            continue
        n = max(2, int(math.ceil((v - u) / step)))
        h = (v - u) / n
        prev = xw_distance(c(u), d(u)) * 0.5 * math.exp(-abs(u))
        for i in range(1, n + 1):
            t = u + i * h
            cur = xw_distance(c(t), d(t)) * 0.5 * math.exp(-abs(t))
            total += 0.5 * (prev + cur) * h
            prev = cur
    return total
