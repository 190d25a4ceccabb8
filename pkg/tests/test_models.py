from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vircheck.descendent import DescAlgebra, Operators
from vircheck.models import (
    BruteForceSym,
    SymPowerRing,
    bernoulli,
    thaddeus_integral,
    thaddeus_table,
    thaddeus_triples,
)
from vircheck.superalgebra import SuperPoly


def test_realize_examples():
    S = SymPowerRing(2, 3)
    A = DescAlgebra(S.geometry)
    geo = S.geometry
    assert S.realize(A.chH(2, geo.cls("pt"))) == (S.eta * S.eta).scale(Fraction(1, 2))
    assert S.realize(A.chH(1, geo.one())) == S.eta.scale(3) - S.theta
    assert not S.realize(A.chH(0, geo.cls("f1")))
    assert S.realize(A.chH(0, geo.cls("e2"))) == S.e(2)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 3), st.sampled_from(["1", "pt", "e1", "f1", "e2", "f2"])), min_size=1, max_size=3))
def test_realize_is_multiplicative(factors):
    S = SymPowerRing(2, 3)
    A = DescAlgebra(S.geometry)
    D = SuperPoly.one()
    prod = SuperPoly.one()
    for i, name in factors:
        x = A.chH(i, S.geometry.cls(name))
        D = D * x
        prod = prod * S.realize(x)
    assert S.realize(D) == prod


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_integral_of_eta_power(n):
    S = SymPowerRing(1, n)
    assert S.integrate(S.eta_pow(n)) == factorial(n)
    assert S.integrate(S.eta_pow(n - 1)) == 0


def test_integral_examples_genus2():
    S = SymPowerRing(2, 2)
    assert S.integrate(S.f(1) * S.e(1) * S.eta) == 2
    assert S.integrate(S.theta * S.eta) == 4
    assert S.integrate(S.e(1) * S.f(2) * S.eta) == 0
    assert not S.e(1) * S.e(1)


def test_L1_of_unit_on_a_curve():
    for g in range(4):
        S = SymPowerRing(g, 1)
        assert S.integrate(S.L(1, SuperPoly.one())) == 0


def test_realize_intertwines_R():
    S = SymPowerRing(2, 3)
    A = DescAlgebra(S.geometry)
    o = Operators(A)
    for gen in A.generators(6):
        D = SuperPoly.gen(gen)
        for k in range(-1, 3):
            assert S.realize(o.R(k)(D)) == S.R(k)(S.realize(D))


@pytest.mark.parametrize("g, n", [(0, 3), (1, 2), (2, 4)])
def test_L_tilde_integrates_to_zero(g, n):
    S = SymPowerRing(g, n)
    for D in S.monomials():
        for k in range(4):
            assert S.integrate(S.L(k, D)) == 0


@pytest.mark.parametrize("g, n", [(0, 2), (1, 2), (2, 2), (2, 3)])
def test_brute_force_agrees(g, n):
    S = SymPowerRing(g, n)
    B = BruteForceSym(g, n)
    for D in S.monomials():
        assert S.integrate(D) == B.integrate(B.lift(S, D))


def test_sym_ring_rejects_bad_input():
    with pytest.raises(ValueError):
        SymPowerRing(1, 0)


def test_bernoulli_numbers():
    assert bernoulli(0) == 1
    assert bernoulli(1) == Fraction(-1, 2)
    assert bernoulli(2) == Fraction(1, 6)
    assert bernoulli(3) == 0
    assert bernoulli(12) == Fraction(-691, 2730)
    with pytest.raises(ValueError):
        bernoulli(-1)


def test_thaddeus_spot_values():
    assert thaddeus_integral(2, 3, 0, 0) == -4
    assert thaddeus_integral(2, 1, 1, 0) == 4
    assert thaddeus_integral(2, 0, 0, 1) == -4


def test_thaddeus_dimension_mismatch_is_zero():
    assert thaddeus_integral(2, 2, 0, 0) == 0
    assert thaddeus_integral(3, 0, 0, 0) == 0
    with pytest.raises(ValueError):
        thaddeus_integral(2, -1, 2, 0)


@pytest.mark.parametrize("g", [2, 3, 4, 5, 6])
def test_thaddeus_relation(g):
    for m, k, p in thaddeus_triples(g):
        if k >= 1:
            lhs = (g - p) * thaddeus_integral(g, m, k, p)
            rhs = -2 * m * thaddeus_integral(g, m - 1, k - 1, p + 1) if m >= 1 else 0
            assert lhs == rhs, (m, k, p)


def test_thaddeus_mutation_breaks_spots():
    assert thaddeus_integral(2, 3, 0, 0, drop_factor=True) != -4


def test_thaddeus_table_shape():
    rows = thaddeus_table(2)
    assert [(r["m"], r["k"], r["p"]) for r in rows] == [(3, 0, 0), (1, 1, 0), (0, 0, 1)]
    assert [r["q"] for r in rows] == [2, 0, 0]
    for g in range(2, 7):
        for r in thaddeus_table(g):
            assert r["m"] + 2 * r["k"] + 3 * r["p"] == 3 * g - 3
