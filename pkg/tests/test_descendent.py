from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vircheck.descendent import (
    ZETA,
    DescAlgebra,
    Operators,
    T_vir_element,
    bracket_defect,
    generator_probes,
    is_weight0,
    operator_defect,
    product_probes,
    project_alpha,
)
from vircheck.geometry import curve, preset_geometry
from vircheck.superalgebra import SuperPoly


@pytest.fixture(scope="module")
def P1():
    g = curve(0)
    A = DescAlgebra(g)
    return g, A, Operators(A)


def test_T0_on_P1(P1):
    g, A, o = P1
    pt = g.cls("pt")
    assert o.T_element(0) == A.chH(0, pt) * A.chH(0, pt)


@pytest.mark.parametrize("kind", ["curve:0", "curve:2", "p2"])
def test_T_minus1_vanishes(kind):
    A = DescAlgebra(preset_geometry(kind))
    assert not Operators(A).T_element(-1)


def test_TV0_on_P1(P1):
    g, A, o = P1
    one, pt = g.one(), g.cls("pt")
    want = A.chH(0, pt) * A.chH(0, pt) - A.chH(0, one) - A.chH(0, pt)
    assert o.TV_element(0, g.one()) == want


def test_R_coefficients(P1):
    g, A, o = P1
    gam = g.cls("pt")
    assert o.R(1)(A.chH(2, gam)) == A.chH(3, gam).scale(6)
    assert not o.R(-1)(A.chH(0, gam))
    assert o.R(-1)(A.chH(2, gam) * A.chH(1, gam)) == A.chH(1, gam) ** 2 + A.chH(2, gam) * A.chH(0, gam)


def test_L_wt0_on_P1(P1):
    g, A, o = P1
    x0 = A.chH(0, g.cls("pt"))
    assert o.L_wt0()(A.chH(1, g.cls("pt"))) == x0 ** 3 - x0


def test_L_wt0_example_at_alpha():
    # rank 2: ch_0(pt) becomes the scalar 2, so x^3 - x -> 6
    g = curve(0)
    A = DescAlgebra(g)
    o = Operators(A)
    alpha = g.one().scale(2) + g.cls("pt").scale(3)
    B = DescAlgebra(g, "at_alpha", alpha)
    assert B.project(o.L_wt0()(A.chH(1, g.cls("pt")))) == SuperPoly.const(6)


@pytest.mark.parametrize("genus", [0, 2])
def test_F_twist_by_point(genus):
    g = curve(genus)
    A = DescAlgebra(g)
    F = Operators(A).F_twist(g.cls("pt"))
    for i in range(4):
        assert F(A.chH(i, g.one())) == A.chH(i, g.one()) + A.chH(i, g.cls("pt"))


@pytest.mark.parametrize("genus", [0, 1, 3])
def test_project_alpha_on_curves(genus):
    g = curve(genus)
    r, d = 3, 5
    alpha = g.one().scale(r) + g.cls("pt").scale(d)
    A = DescAlgebra(g)
    B = DescAlgebra(g, "at_alpha", alpha)
    assert B.project(A.chH(0, g.cls("pt"))) == SuperPoly.const(r)
    assert B.project(A.chH(0, g.one())) == SuperPoly.const(d)
    if genus:
        # odd class: chH_0(e1) has positive degree and survives as ch_1(e1)
        e1 = A.chH(0, g.cls("e1"))
        assert B.project(e1) == SuperPoly.gen(B.top_gen(1, g.index("e1"), 0))
        assert B.lift(B.project(e1)) == e1
    assert not B.project(A.chH(-1, g.cls("pt")))
    assert project_alpha(A, alpha, A.chH(0, g.cls("pt"))) == SuperPoly.const(r)


def test_weight0_examples():
    g = curve(1)
    A = DescAlgebra(g)
    a, b = g.cls("pt"), g.one()
    assert is_weight0(A, A.chH(1, a) * A.chH(0, b) - A.chH(0, a) * A.chH(1, b))
    assert not is_weight0(A, A.chH(1, a))
    assert is_weight0(A, SuperPoly.one())


def test_at_alpha_flavor_needs_alpha():
    with pytest.raises(ValueError):
        DescAlgebra(curve(0), "at_alpha")
    with pytest.raises(ValueError):
        DescAlgebra(curve(0), "nope")


def test_named_brackets_on_P1(P1):
    g, A, o = P1
    probes = generator_probes(A, 10)
    n, d = bracket_defect(o.L(1), o.L(2), lambda p: o.L(3)(p), probes)
    assert d is None and n == len(probes)
    n, d = bracket_defect(o.R(-1), o.L(2), lambda p: o.L(1)(p).scale(3), probes)
    assert d is None
    n, d = operator_defect(lambda p: o.R(-1)(o.L_wt0()(p)), lambda p: SuperPoly.zero(), product_probes(A, 6))
    assert d is None


def test_bracket_defect_reports_counterexample(P1):
    g, A, o = P1
    n, d = bracket_defect(o.L(1), o.L(2), lambda p: o.L(3)(p).scale(2), generator_probes(A, 6))
    assert d is not None
    assert d.got != d.expected


@pytest.mark.parametrize("kind", ["curve:1", "curve:2", "p1xp1"])
def test_pair_brackets(kind):
    g = preset_geometry(kind)
    A = DescAlgebra(g, "pair")
    o = Operators(A)
    probes = generator_probes(A, 6)
    for k in range(-1, 3):
        for l in range(k + 1, 3):
            _, d = bracket_defect(o.L(k), o.L(l), lambda p, k=k, l=l: o.L(k + l)(p).scale(l - k), probes)
            assert d is None, (k, l)


# products of up to three generators as probes
def _probe_strategy(A, degmax):
    gens = A.generators(degmax)
    return st.lists(st.sampled_from(gens), min_size=1, max_size=3).map(
        lambda gs: SuperPoly.monomial(gs) if SuperPoly.monomial(gs) else SuperPoly.gen(gs[0])
    )


_C2 = DescAlgebra(curve(2))
_C2ops = Operators(_C2)


@settings(max_examples=40, deadline=None)
@given(_probe_strategy(_C2, 5), st.integers(-1, 2), st.integers(-1, 2))
def test_bracket_on_random_products_curve2(p, k, l):
    o = _C2ops
    got = o.L(k)(o.L(l)(p)) - o.L(l)(o.L(k)(p))
    assert got == o.L(k + l)(p).scale(l - k)


@pytest.mark.parametrize("kind", ["curve:0", "curve:2", "p2"])
def test_L_V_brackets_nonnegative(kind):
    g = preset_geometry(kind)
    A = DescAlgebra(g)
    o = Operators(A)
    V = g.one() + g.cls("pt")
    probes = generator_probes(A, 6)
    for k in range(0, 3):
        for l in range(k + 1, 3):
            _, d = bracket_defect(o.L_V(k, V), o.L_V(l, V), lambda p, k=k, l=l: o.L_V(k + l, V)(p).scale(l - k), probes)
            assert d is None


@pytest.mark.parametrize("kind", ["curve:0", "curve:1", "p2"])
def test_L_V_minus1_defect_closed_form(kind):
    # [L^V_-1, L^V_l] - (l+1) L^V_{l-1} is multiplication by (l-1)! chH_{l-1}(ch(V)^dual td)
    g = preset_geometry(kind)
    A = DescAlgebra(g)
    o = Operators(A)
    V = g.one()
    corr = g.cup(g.dual_class(V), g.todd)
    for l in range(1, 4):
        for p in generator_probes(A, 4)[:6]:
            got = o.L_V(-1, V)(o.L_V(l, V)(p)) - o.L_V(l, V)(o.L_V(-1, V)(p)) - o.L_V(l - 1, V)(p).scale(l + 1)
            assert got == A.chH(l - 1, corr).scale(factorial(l - 1)) * p


@pytest.mark.parametrize("kind", ["curve:0", "curve:2"])
def test_xi_V_square_for_nonnegative_k(kind):
    g = preset_geometry(kind)
    A = DescAlgebra(g)
    P = DescAlgebra(g, "pair")
    o, op = Operators(A), Operators(P)
    V = g.one() + g.cls("pt")
    xi = op.xi_V(V)
    probes = generator_probes(P, 5) + product_probes(P, 4)
    for k in range(0, 3):
        _, d = operator_defect(lambda p: xi(op.L(k)(p)), lambda p: o.L_V(k, V)(xi(p)), probes)
        assert d is None, k


def test_xi_V_square_fails_at_minus1():
    g = curve(0)
    A, P = DescAlgebra(g), DescAlgebra(g, "pair")
    o, op = Operators(A), Operators(P)
    V = g.one() + g.cls("pt")
    xi = op.xi_V(V)
    p = P.chH(1, g.one(), 1)
    assert xi(op.L(-1)(p)) == SuperPoly.one()
    assert not o.L_V(-1, V)(xi(p))


@pytest.mark.parametrize("kind", ["curve:2", "p2"])
def test_T_vir_strata(kind):
    A = DescAlgebra(preset_geometry(kind))
    R = Operators(A).R(-1)
    el = T_vir_element(A, 6)
    assert not R(el)
    for s in range(7):
        assert not R(el.filter(lambda m, s=s: sum(g.idx for g in m) == s))


def test_delta_normalized_identity_and_eta():
    g = curve(1)
    A = DescAlgebra(g)
    o = Operators(A)
    alpha = g.one().scale(2) + g.cls("pt")
    delta = g.cls("pt")
    r = g.cup_and_integrate(delta, alpha)
    B = DescAlgebra(g, "at_alpha", alpha)
    probes = [q for q in (B.project(p) for p in product_probes(A, 5)) if q]
    _, d = operator_defect(lambda p: B.apply(o.L_wt0(), p), lambda p: B.apply(o.L_wt0((delta, r)), p), probes)
    assert d is None
    eta = o.eta_norm(delta, r)
    for p in probes:
        assert not B.apply(o.R(-1), B.apply(eta, p))


def test_delta_normalization_requires_nonzero_r(P1):
    g, A, o = P1
    with pytest.raises(ValueError):
        o.S_delta(1, g.cls("pt"), 0)


def test_E_twist_fixes_weight0_and_formal_variable():
    g = curve(0)
    A = DescAlgebra(g)
    o = Operators(A)
    E = o.E_twist(SuperPoly.gen(ZETA))
    w = o.L_wt0()(A.chH(2, g.cls("pt")))
    assert E(w) == w
    moved = E(A.chH(1, g.cls("pt")))
    assert moved == A.chH(1, g.cls("pt")) + SuperPoly.gen(ZETA) * A.chH(0, g.cls("pt"))
    assert o.E_twist(Fraction(2))(A.chH(1, g.cls("pt"))) == A.chH(1, g.cls("pt")) + A.chH(0, g.cls("pt")).scale(2)


def test_S_fixed_unit_part():
    g = curve(2)
    A = DescAlgebra(g)
    o = Operators(A)
    r = Fraction(2)
    for k in range(3):
        unit = o.S_fixed(k, only_unit=True)
        spt = o.S_delta(k, g.cls("pt"), r)
        for p in generator_probes(A, 4):
            assert unit(p) == spt(p).scale(-r)


def test_render_names():
    g = curve(1)
    P = DescAlgebra(g, "pair")
    s = P.render(P.chH(1, g.cls("pt"), 1) - P.chH(0, g.one(), 2).scale(Fraction(1, 2)))
    assert s == "chH^V[1](pt) - 1/2·chH^F[0](1)"
