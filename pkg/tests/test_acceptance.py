"""Acceptance suite: eight pinned, independently cross-checked criteria.

Each test prints a single PASS line with its measured runtime; a failure in
any assertion is the corresponding FAIL.
"""

import math
import random
import time
from fractions import Fraction

from gwcert import certificate as cert_mod
from gwcert import geometry as geo
from gwcert import tree as tr
from gwcert.cli import EXIT_OK, run
from gwcert.field import NumberField
from gwcert.quotients import (
    ResidueRing,
    SemidirectGroup,
    classify_hyperelementary,
    enumerate_subgroups,
    is_hyperelementary,
    t_order,
    two_generator_census,
    u_order,
)
from gwcert.valuation import alpha_w, primes_above, unit_group, valuation
from gwcert.wordmetric import (
    GwElement,
    ball_with_distances,
    gw_identity,
    gw_inv,
    gw_mul,
    word_length,
)

NF_Q2 = NumberField([-2, 1])
NF_Q32 = NumberField(["-3/2", 1])
NF_SQRT2 = NumberField([-2, 0, 1])

FIELDS = {"2": NF_Q2, "3/2": NF_Q32, "sqrt2": NF_SQRT2}


def _report(num, label, t0):
    print(f"ACCEPTANCE {num} PASS: {label} ({time.monotonic() - t0:.2f} s)")


def _std_gens(nf):
    return cert_mod.standard_generating_set(nf)


# -- 1: order table vs brute-force oracle -------------------------------------


def _brute_order_rational(w_frac, q, s):
    """Multiplicative order of a rational w in (Z/q^s)^x by repeated
    multiplication, entirely independent of the library machinery."""
    mod = q**s
    val = (w_frac.numerator * pow(w_frac.denominator, -1, mod)) % mod
    acc, k = val, 1
    while acc != 1:
        acc = acc * val % mod
        k += 1
    return k


def _brute_order_sqrt2(q, s):
    """Order of sqrt 2 in (Z[sqrt 2]/q^s)^x via pair arithmetic mod q^s."""
    mod = q**s
    a, b = 0, 1  # a + b sqrt 2
    acc = (0, 1)
    k = 1
    while acc != (1, 0):
        x, y = acc
        acc = ((x * a + 2 * y * b) % mod, (x * b + y * a) % mod)
        k += 1
    return k


def test_acceptance_1_order_table():
    t0 = time.monotonic()
    checked = 0
    for label, qs in [("2", (3, 5, 7)), ("3/2", (5, 7, 11))]:
        nf = FIELDS[label]
        w = nf.gen
        wf = Fraction(w.coeffs[0])
        for q in qs:
            prev = None
            for s in (1, 2, 3):
                t = t_order(w, q, s)
                assert t == _brute_order_rational(wf, q, s), (label, q, s)
                if prev is not None:
                    assert t in (prev, q * prev)
                prev = t
                checked += 1
    w = NF_SQRT2.gen
    for q in (3, 5, 7):
        prev = None
        for s in (1, 2, 3):
            t = t_order(w, q, s)
            assert t == _brute_order_sqrt2(q, s), (q, s)
            if prev is not None:
                assert t in (prev, q * prev)
            prev = t
            checked += 1
    assert checked == 27
    _report(1, f"t-order table matches brute-force oracle on {checked} entries", t0)


# -- 2: hyper-elementary exhaustiveness ---------------------------------------


def test_acceptance_2_hyperelementary_exhaustive():
    t0 = time.monotonic()
    instances = [
        (NF_Q2, 5, 1, 20),
        (NF_Q2, 5, 2, 500),
        (NF_Q2, 3, 2, 54),
        (NF_Q32, 5, 1, 10),
        (NF_Q32, 5, 2, 250),
    ]
    total_hyper = 0
    for nf, q, m, expected_order in instances:
        w = nf.gen
        F = SemidirectGroup(ResidueRing(w, q, m), t_order(w, q, m))
        assert F.order == expected_order
        subs = enumerate_subgroups(F)
        assert two_generator_census(F) == len(subs)
        t1 = u_order(w, q)
        for H in subs:
            if is_hyperelementary(H, F) is None:
                continue
            v = classify_hyperelementary(H, F, t1)  # NoConjugatorFound would raise
            assert v.case in ("InKernelCase", "InPrimeToQCase", "ConjugateToCyclic")
            total_hyper += 1
    _report(2, f"5 instances, {total_hyper} hyper-elementary verdicts, census agrees", t0)


# -- 3: tree lemmas ------------------------------------------------------------


def _tree_sites():
    sites = [primes_above(NF_Q2, p)[0] for p in (2, 3, 5)]
    sites.append(primes_above(NF_SQRT2, 2)[0])
    sites.extend(primes_above(NF_SQRT2, 7))
    return sites


def _random_class(P, rng, steps=3):
    c = tr.identity_class(P)
    for _ in range(rng.randint(0, steps)):
        c = rng.choice(tr.neighbors(c))
    return c


def _random_gw_pair(P, rng):
    nf = P.nf
    pi = P.uniformizer
    y = pi ** rng.randint(-2, 2) * nf.element(rng.choice([1, -1]))
    if nf.degree == 2:
        x = nf.element([rng.randint(-4, 4), rng.randint(-4, 4)])
    else:
        x = nf.element(Fraction(rng.randint(-8, 8), rng.choice([1, 2, 3])))
    return (x, y)


def test_acceptance_3_tree_lemmas():
    t0 = time.monotonic()
    rng = random.Random(2024)
    sites = _tree_sites()
    for _ in range(1000):
        P = rng.choice(sites)
        A = _random_class(P, rng)
        # Busemann equivariance under the affine action
        g = _random_gw_pair(P, rng)
        assert tr.busemann(tr.act(g, A)) == tr.busemann(A) - valuation(g[1], P)
        # stabilizer sufficiency from the z-invariants
        z1, _, z2p = tr.z_invariants(A)
        x = P.uniformizer ** (z1 - z2p + rng.randint(0, 2))
        assert tr.act((x, P.nf.one), A) == A
    for P in sites:
        for n in range(-8, 9):
            assert tr.busemann(tr.standard_line(P, n)) == n
    _report(3, "1000 equivariance + stabilizer checks, line values exact", t0)


# -- 4: warping identity --------------------------------------------------------


def test_acceptance_4_warping_identity():
    t0 = time.monotonic()
    rng = random.Random(7)
    for label in ("2", "3/2", "sqrt2"):
        nf = FIELDS[label]
        w = nf.gen
        ug = unit_group(nf, w)
        for _ in range(500):
            y = ug.torsion_gen ** rng.randint(0, ug.torsion_order - 1)
            for e in ug.fundamental_units:
                y = y * e ** rng.randint(-4, 4)
            for k, gen in ug.mw_generators:
                y = y * gen ** rng.randint(-3, 3)
            tors, a_vec, b_vec = alpha_w(y, ug)
            for emb, P in [(e, P) for e in nf.embeddings for P in ug.mw_primes]:
                # the M_w exponent recovers the valuation exactly
                i = ug.mw_primes.index(P)
                k = ug.mw_generators[i][0]
                assert b_vec[i] * k == valuation(y, P)
            for emb in nf.embeddings:
                lhs = abs(complex(emb(tors)))
                for e, a in zip(ug.fundamental_units, a_vec):
                    lhs *= abs(complex(emb(e))) ** a
                for (k, gen), b in zip(ug.mw_generators, b_vec):
                    lhs *= abs(complex(emb(gen))) ** b
                rhs = abs(complex(emb(y)))
                assert abs(lhs - rhs) / rhs < 1e-9
            # exact reconstruction to the torsion-killing power
            l = ug.torsion_order
            rebuilt = nf.one
            for e, a in zip(ug.fundamental_units, a_vec):
                rebuilt = rebuilt * e**a
            for (k, gen), b in zip(ug.mw_generators, b_vec):
                rebuilt = rebuilt * gen**b
            assert rebuilt**l == y**l
    _report(4, "warping identity on 3 x 500 units, all embeddings, exact l-th powers", t0)


# -- 5: strong homotopy action --------------------------------------------------


def test_acceptance_5_strong_homotopy_action():
    t0 = time.monotonic()
    nf = NF_Q2
    ctx = geo.ModelContext(nf, nf.gen)
    base = ctx.base
    ident = (nf.zero, nf.one)
    rng = random.Random(11)

    def rand_g():
        k = rng.randint(-2, 2)
        return (
            nf.element(Fraction(rng.randint(-4, 4), 2 ** rng.randint(0, 2))),
            nf.element(Fraction(2) ** k),
        )

    def rand_x(R):
        c = tr.identity_class(ctx.primes[0])
        for _ in range(rng.randint(0, 4)):
            c = rng.choice(tr.neighbors(c))
        nb = rng.choice(tr.neighbors(c))
        pt = geo.ModelPoint((), (geo.tree_point(c, nb, Fraction(rng.randint(0, 4), 4)),))
        return geo.retraction_HR(pt, 0.0, R, base)

    def close(a, b):
        return geo.xw_distance(a, b) < 1e-9

    for trial in range(500):
        R = (1.0, 5.0)[trial % 2]
        ev = lambda word, x: geo.sha_eval(word, x, R, base, ctx)
        x = rand_x(R)
        j = rng.randint(1, 4)
        word = [rand_g()]
        for _ in range(j):
            word = [rand_g(), rng.random()] + word
        tpos = rng.randrange(1, len(word), 2)

        w1 = list(word)
        w1[tpos] = 0.0
        assert close(ev(w1, x), ev(w1[:tpos], ev(w1[tpos + 1:], x)))

        w2 = list(word)
        w2[tpos] = 1.0
        comp = geo.group_mul(w2[tpos - 1], w2[tpos + 1])
        assert close(ev(w2, x), ev(w2[:tpos - 1] + [comp] + w2[tpos + 2:], x))

        assert close(ev([ident, rng.random()] + word, x), ev(word, x))

        if len(word) >= 3:
            t1v, t2v = rng.random(), rng.random()
            w4 = word[:tpos] + [t1v, ident, t2v] + word[tpos + 1:]
            assert close(ev(w4, x), ev(word[:tpos] + [t1v * t2v] + word[tpos + 1:], x))

        assert close(ev(list(word) + [rng.random(), ident], x), ev(word, x))
        assert close(ev([ident], x), x)

        # semigroup law of the retraction
        y = rand_x(R + 3.0)
        t, tp = rng.random(), rng.random()
        lhs = geo.retraction_HR(geo.retraction_HR(y, tp, R, base), t, R, base)
        assert close(lhs, geo.retraction_HR(y, t * tp, R, base))
    _report(5, "six axioms + semigroup law on 500 random words, R in {1, 5}", t0)


# -- 6: certificate pipeline ----------------------------------------------------


def test_acceptance_6_certificate_pipeline(tmp_path, capsys):
    t0 = time.monotonic()
    spec = tmp_path / "q.toml"
    spec.write_text('min_poly = ["-2", "1"]\n')
    code = run(["verify-all", "--field", str(spec), "--w", "2", "--n", "1", "--json"])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    import json

    rep = json.loads(out)
    assert rep["q"] == 5 and rep["m"] == 2 and rep["group_order"] == 500
    assert all(v["case"] in ("Case1", "Case2") for v in rep["verdicts"])
    # full-enumeration cross-check of every case-2 pair in the radius-1 ball
    S = _std_gens(NF_Q2)
    from gwcert.wordmetric import power_set

    Sn = power_set(S, 1)
    S2n = power_set(S, 2)
    e = gw_identity(NF_Q2)
    for v in rep["verdicts"]:
        if v["case"] != "Case2":
            continue
        l = v["index"]
        for h in ball_with_distances(S, 1):
            for k in Sn:
                g = gw_mul(h, k)
                d1 = cert_mod.line_metric(cert_mod.SubdividedLine(l), g.z, h.z)
                rhs = 0 if k == e else word_length(k, S2n)
                assert 1 * d1 <= rhs
    _report(6, "verify-all pinned (q, m, |F|) = (5, 2, 500), exit 0, case-2 enumerated", t0)


# -- 7: word metric -------------------------------------------------------------


def _reversed_bfs_ball(nf, S, radius):
    """Distances by BFS multiplying generators on the left (independent of
    the right-multiplication BFS in the library)."""
    e = gw_identity(nf)
    gens = [s for s in S if s != e]
    dist = {e: 0}
    frontier = [e]
    for d in range(1, radius + 1):
        nxt = []
        for a in frontier:
            for s in gens:
                b = gw_mul(s, a)
                if b not in dist:
                    dist[b] = d
                    nxt.append(b)
        frontier = nxt
    return dist


def test_acceptance_7_word_metric():
    t0 = time.monotonic()
    nf = NF_Q2
    S = _std_gens(nf)
    ball = ball_with_distances(S, 4)
    oracle = _reversed_bfs_ball(nf, S, 4)
    assert set(oracle) == set(ball)
    rng = random.Random(5)
    # the radius-4 ball has 93 elements, so 200 draws repeat some of them
    pool = sorted(ball, key=lambda g: (str(g.x.coeffs), g.z))
    for g in rng.choices(pool, k=200):
        assert word_length(g, S) == oracle[g] == ball[g]
    # metric axioms on sampled triples: d(g, h) = l(g^{-1} h)
    elems = rng.sample(sorted(ball, key=lambda g: (str(g.x.coeffs), g.z)), 12)
    dist = {}
    for a in elems:
        for b in elems:
            dist[(a, b)] = word_length(gw_mul(gw_inv(a), b), S)
    for _ in range(1000):
        a, b, c = (rng.choice(elems) for _ in range(3))
        assert dist[(a, b)] == dist[(b, a)]
        assert dist[(a, b)] == 0 if a == b else dist[(a, b)] > 0
        assert dist[(a, c)] <= dist[(a, b)] + dist[(b, c)]
    _report(7, "200 reversed-BFS agreements, metric axioms on 1000 triples", t0)


# -- 8: flow-space primitives ---------------------------------------------------


def test_acceptance_8_flow_space():
    t0 = time.monotonic()
    nf = NF_Q2
    ctx = geo.ModelContext(nf, nf.gen)
    rng = random.Random(3)

    def rand_pt():
        c = tr.identity_class(ctx.primes[0])
        for _ in range(rng.randint(0, 4)):
            c = rng.choice(tr.neighbors(c))
        nb = rng.choice(tr.neighbors(c))
        return geo.ModelPoint((), (geo.tree_point(c, nb, Fraction(rng.randint(0, 4), 4)),))

    for _ in range(100):
        a, b = rand_pt(), rand_pt()
        d = geo.fs_distance(geo.constant_geodesic(a), geo.constant_geodesic(b))
        assert abs(d - geo.xw_distance(a, b)) < 1e-6
    c = geo.GeneralizedGeodesic(Fraction(-1), rand_pt(), rand_pt())
    assert geo.fs_flow(geo.fs_flow(c, Fraction(1, 3)), Fraction(2, 3)) == geo.fs_flow(c, Fraction(1))
    assert geo.fs_flow(c, 0) == c
    _report(8, "100 constant-geodesic closed forms, exact flow group law", t0)
