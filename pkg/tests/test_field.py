"""Exact field arithmetic, embeddings, norms and traces."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gwcert.errors import DivisionByZero, NonMonic, ReduciblePolynomial
from gwcert.field import NumberField, fe_arith, norm_and_trace

rationals = st.fractions(
    min_value=-50, max_value=50, max_denominator=8
)


def elements(nf):
    return st.lists(rationals, min_size=nf.degree, max_size=nf.degree).map(nf.element)


def test_rejects_non_monic():
    with pytest.raises(NonMonic):
        NumberField([1, 2])


def test_rejects_reducible():
    with pytest.raises(ReduciblePolynomial):
        NumberField([-1, 0, 1])  # x^2 - 1


def test_gen_satisfies_min_poly():
    nf = NumberField([-2, 0, 1])
    w = nf.gen
    assert w * w == nf.element(2)


def test_embeddings_are_roots():
    nf = NumberField([1, 0, 1])
    for emb in nf.embeddings:
        r = complex(emb.root)
        assert abs(r * r + 1) < 1e-20


def test_norm_trace_quadratic():
    nf = NumberField([-2, 0, 1])
    x = nf.element([3, 1])  # 3 + sqrt 2
    n, t = norm_and_trace(x)
    assert n == 7 and t == 6


@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_field_axioms_sqrt2(data):
    nf = NumberField([-2, 0, 1])
    a = data.draw(elements(nf))
    b = data.draw(elements(nf))
    c = data.draw(elements(nf))
    assert a + b == b + a
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a - a == nf.zero
    if not b.is_zero():
        assert (a / b) * b == a


@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_norm_multiplicative(data):
    nf = NumberField([1, 0, 1])
    a = data.draw(elements(nf))
    b = data.draw(elements(nf))
    assert (a * b).norm() == a.norm() * b.norm()
    assert (a + b).trace() == a.trace() + b.trace()


@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_embedding_respects_arithmetic(data):
    nf = NumberField([-2, 0, 1])
    a = data.draw(elements(nf))
    b = data.draw(elements(nf))
    for emb in nf.embeddings:
        lhs = complex(emb(a * b))
        rhs = complex(emb(a)) * complex(emb(b))
        scale = 1 + abs(complex(emb(a))) * abs(complex(emb(b)))
        assert abs(lhs - rhs) <= 1e-9 * scale


def test_division_by_zero():
    nf = NumberField([-2, 1])
    with pytest.raises(DivisionByZero):
        nf.one / nf.zero


def test_pow_negative():
    nf = NumberField([-2, 0, 1])
    w = nf.gen
    assert w**-2 == nf.element(Fraction(1, 2))


def test_fe_arith_dispatch():
    nf = NumberField([-2, 1])
    a, b = nf.element(6), nf.element(3)
    assert fe_arith("add", a, b) == nf.element(9)
    assert fe_arith("sub", a, b) == nf.element(3)
    assert fe_arith("mul", a, b) == nf.element(18)
    assert fe_arith("inv", b) == nf.element(Fraction(1, 3))


def test_degree_four_irreducibility_check():
    # x^4 - 2 is irreducible and must be accepted
    nf = NumberField([-2, 0, 0, 0, 1])
    assert nf.degree == 4
    # x^4 - 4 = (x^2-2)(x^2+2) must be rejected
    with pytest.raises(ReduciblePolynomial):
        NumberField([-4, 0, 0, 0, 1])
