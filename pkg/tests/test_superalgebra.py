from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vircheck.superalgebra import (
    FORMAL,
    HOL,
    Eliminator,
    Gen,
    SuperDerivation,
    SuperPoly,
    canonicalize,
    graded_solve,
    kernel_basis,
)

# a small pool of generators: degrees 2, 4 even; 1, 3 odd
POOL = [Gen(FORMAL, 0, i, b, d) for i, (b, d) in enumerate([(0, 2), (1, 4), (2, 1), (3, 3), (4, 1)])]


def x(i, c=1):
    return SuperPoly.gen(POOL[i], c)


monomials = st.lists(st.integers(0, len(POOL) - 1), max_size=4)
polys = st.lists(
    st.tuples(st.fractions(min_value=-3, max_value=3, max_denominator=4), monomials), max_size=4
).map(lambda ts: sum((SuperPoly.monomial([POOL[i] for i in m], c) for c, m in ts), SuperPoly.zero()))


def homogeneous_parts(p):
    return [p.filter(lambda m, d=d: sum(g.deg for g in m) % 2 == d) for d in (0, 1)]


def test_odd_square_is_zero():
    e = SuperPoly.gen(Gen(HOL, 0, 1, 1, 3))
    assert not e * e


def test_koszul_sign_for_two_odd_generators():
    a = SuperPoly.gen(Gen(HOL, 0, 1, 1, 3))
    b = SuperPoly.gen(Gen(HOL, 0, 0, 3, -1))
    assert a * b == -(b * a)
    assert a * b != b * a


def test_even_product_expands():
    X, Y = x(0), x(1)
    assert (X.scale(2) + Y) * X == (X * X).scale(2) + X * Y


def test_canonicalize_sign():
    s, m = canonicalize([POOL[3], POOL[2]])
    assert m == (POOL[2], POOL[3])
    assert s == -1
    s, _ = canonicalize([POOL[2], POOL[2]])
    assert s == 0


@settings(max_examples=60, deadline=None)
@given(polys, polys, polys)
def test_associative_and_distributive(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@settings(max_examples=60, deadline=None)
@given(polys, polys)
def test_supercommutative(a, b):
    for pa_par, pa in enumerate(homogeneous_parts(a)):
        for pb_par, pb in enumerate(homogeneous_parts(b)):
            assert pa * pb == (pb * pa).scale((-1) ** (pa_par * pb_par))


def _odd_d(g):
    # odd derivation of degree -1 sending POOL[2] -> 1 and POOL[3] -> x0
    if g == POOL[2]:
        return SuperPoly.one()
    if g == POOL[3]:
        return x(0)
    return None


def _even_d(g):
    if g == POOL[0]:
        return x(1)
    if g == POOL[2]:
        return x(4) * x(0)
    return None


@settings(max_examples=60, deadline=None)
@given(polys, polys)
def test_leibniz_rule(a, b):
    even = SuperDerivation(_even_d, 0)
    odd = SuperDerivation(_odd_d, 1)
    assert even(a * b) == even(a) * b + a * even(b)
    for pa_par, pa in enumerate(homogeneous_parts(a)):
        assert odd(pa * b) == odd(pa) * b + (pa * odd(b)).scale((-1) ** pa_par)


def test_derivation_examples():
    # R_{-1}-like: lowers the index on a pair of even generators
    g2, g1, g0 = (Gen(HOL, 0, i, 0, 2 * i) for i in (2, 1, 0))

    def lower(g):
        if g.idx == 0:
            return None
        return SuperPoly.gen(Gen(HOL, 0, g.idx - 1, 0, 2 * g.idx - 2))

    d = SuperDerivation(lower, 0)
    D = SuperPoly.gen(g2) * SuperPoly.gen(g1)
    assert d(D) == SuperPoly.gen(g1) * SuperPoly.gen(g1) + SuperPoly.gen(g2) * SuperPoly.gen(g0)
    assert not d(SuperPoly.one())
    w, u = POOL[2], POOL[0]
    dw = SuperDerivation(lambda g: SuperPoly.one() if g == w else None, 1)
    assert dw(SuperPoly.gen(w) * SuperPoly.gen(u)) == SuperPoly.gen(u)


def test_graded_solve_examples():
    X, Y = x(0), x(0) * 0 + SuperPoly.gen(Gen(FORMAL, 1, 0, 0, 2))
    assert graded_solve([X], X.scale(3)) == [3]
    assert graded_solve([X], Y) is None
    assert graded_solve([X + Y, X - Y], X) == [Fraction(1, 2), Fraction(1, 2)]
    with pytest.raises(ValueError):
        graded_solve([X], x(1))


def test_kernel_and_eliminator():
    v1 = {"a": Fraction(1), "b": Fraction(1)}
    v2 = {"a": Fraction(1), "b": Fraction(-1)}
    v3 = {"a": Fraction(2)}
    rels = kernel_basis([v1, v2, v3])
    assert len(rels) == 1
    combo = {}
    for i, c in rels[0].items():
        for k, a in [v1, v2, v3][i].items():
            combo[k] = combo.get(k, 0) + c * a
    assert all(a == 0 for a in combo.values())
    el = Eliminator()
    el.insert(v1)
    assert el.express(v2) is None
    assert el.rank == 1


def test_substitute_is_an_algebra_map():
    a, b = x(2), x(4)
    img = {POOL[2]: x(3), POOL[4]: x(2)}
    sub = (a * b).substitute(lambda g: img.get(g, SuperPoly.gen(g)))
    assert sub == x(3) * x(2)


def test_render():
    p = x(0).scale(Fraction(3, 2)) - x(1)
    s = p.render()
    assert "3/2" in s and "-" in s
    assert SuperPoly.zero().render() == "0"
