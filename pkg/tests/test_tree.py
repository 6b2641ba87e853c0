"""Lattice-class trees: canonical forms, distance, action, Busemann values."""

import random

import pytest

from gwcert.errors import PrimeMismatch, SingularBasis
from gwcert.field import NumberField
from gwcert.tree import (
    Lattice,
    LatticeClass,
    act,
    busemann,
    identity_class,
    neighborhood_dot,
    neighbors,
    normalize,
    standard_line,
    tree_distance,
    z_invariants,
)
from gwcert.valuation import primes_above, valuation


def _p(nf, p, i=0):
    return primes_above(nf, p)[i]


def _random_class(P, rng, steps=4):
    c = identity_class(P)
    for _ in range(rng.randint(0, steps)):
        c = rng.choice(neighbors(c))
    return c


def test_normalize_column_ops_invariant(nf_q2):
    P = _p(nf_q2, 2)
    nf = nf_q2
    rng = random.Random(3)
    for _ in range(40):
        m = [nf.element(rng.randint(-8, 8)) for _ in range(4)]
        det = m[0] * m[3] - m[1] * m[2]
        if det.is_zero():
            continue
        base = normalize(Lattice(tuple(m), P))
        # swap columns
        swapped = (m[1], m[0], m[3], m[2])
        assert normalize(Lattice(swapped, P)) == base
        # add a multiple of one column to the other
        k = nf.element(rng.randint(-3, 3))
        combo = (m[0] + k * m[1], m[1], m[2] + k * m[3], m[3])
        assert normalize(Lattice(combo, P)) == base
        # global scaling by a power of the uniformizer
        pi = P.uniformizer
        scaled = tuple(pi * x for x in m)
        assert normalize(Lattice(scaled, P)) == base


def test_singular_basis_rejected(nf_q2):
    P = _p(nf_q2, 2)
    nf = nf_q2
    with pytest.raises(SingularBasis):
        normalize(Lattice((nf.one, nf.one, nf.one, nf.one), P))


def test_distance_axioms(nf_q2):
    P = _p(nf_q2, 2)
    rng = random.Random(5)
    pts = [_random_class(P, rng) for _ in range(12)]
    for a in pts:
        assert tree_distance(a, a) == 0
        for b in pts:
            assert tree_distance(a, b) == tree_distance(b, a) >= 0
            for c in pts:
                assert tree_distance(a, c) <= tree_distance(a, b) + tree_distance(b, c)


def test_prime_mismatch(nf_q2):
    with pytest.raises(PrimeMismatch):
        tree_distance(identity_class(_p(nf_q2, 2)), identity_class(_p(nf_q2, 3)))


def test_valency(nf_q2, nf_sqrt2):
    # N(p) + 1 neighbors, all at distance 1
    for nf, p, expected in [
        (nf_q2, 2, 3),
        (nf_q2, 3, 4),
        (nf_sqrt2, 3, 10),  # inert: residue field size 9
        (nf_sqrt2, 2, 3),  # ramified: residue field size 2
        (nf_sqrt2, 7, 8),  # split factor: residue field size 7
    ]:
        P = _p(nf, p)
        nbs = neighbors(identity_class(P))
        assert len(nbs) == expected
        assert all(tree_distance(identity_class(P), v) == 1 for v in nbs)


def test_standard_line_geometry(nf_q2):
    P = _p(nf_q2, 2)
    for m in range(-5, 6):
        for n in range(-5, 6):
            assert tree_distance(standard_line(P, m), standard_line(P, n)) == abs(m - n)


def test_busemann_on_line(nf_q2, nf_sqrt2):
    for nf, p in [(nf_q2, 2), (nf_q2, 5), (nf_sqrt2, 2), (nf_sqrt2, 7)]:
        P = _p(nf, p)
        for n in range(-8, 9):
            assert busemann(standard_line(P, n)) == n


def test_action_is_isometric(nf_q2):
    P = _p(nf_q2, 2)
    nf = nf_q2
    rng = random.Random(7)
    for _ in range(30):
        g = (
            nf.element(rng.randint(-6, 6)),
            nf.element(2) ** rng.randint(-2, 2) * nf.element(rng.choice([1, -1, 3])),
        )
        a, b = _random_class(P, rng), _random_class(P, rng)
        assert tree_distance(act(g, a), act(g, b)) == tree_distance(a, b)


def test_action_is_homomorphism(nf_q2):
    P = _p(nf_q2, 2)
    nf = nf_q2
    rng = random.Random(9)
    for _ in range(30):
        g = (nf.element(rng.randint(-4, 4)), nf.element(rng.choice([1, 2, 4, -1])))
        h = (nf.element(rng.randint(-4, 4)), nf.element(rng.choice([1, 2, -2])))
        gh = (g[0] + g[1] * h[0], g[1] * h[1])
        a = _random_class(P, rng)
        assert act(gh, a) == act(g, act(h, a))


def test_translation_by_integers_fixes_identity(nf_q2):
    P = _p(nf_q2, 2)
    L = identity_class(P)
    for x in range(-4, 5):
        assert act((nf_q2.element(x), nf_q2.one), L) == L


def test_z_invariants_and_stabilizer(nf_sqrt2):
    P = _p(nf_sqrt2, 2)
    nf = nf_sqrt2
    rng = random.Random(13)
    for _ in range(25):
        A = _random_class(P, rng)
        z1, z2, z2p = z_invariants(A)
        assert z1 == A.a and z2p <= z2
        # any x with v(x) >= z1 - z2' fixes the class
        x = P.uniformizer ** max(z1 - z2p, 0) * nf.element(rng.randint(1, 5))
        if valuation(x, P) >= z1 - z2p:
            assert act((x, nf.one), A) == A


def test_dot_export(nf_q2):
    P = _p(nf_q2, 2)
    dot = neighborhood_dot(identity_class(P), 1)
    assert dot.startswith("graph tree {") and dot.endswith("}")
    assert dot.count("--") == 3


def test_class_repr_roundtrip(nf_q2):
    P = _p(nf_q2, 2)
    A = LatticeClass(P, 2, nf_q2.element(3))
    assert normalize(Lattice(A.matrix(), P)) == A
