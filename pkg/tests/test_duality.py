import random
from fractions import Fraction

import pytest

from vircheck.duality import DualityError, PairingContext
from vircheck.geometry import curve, preset_geometry
from vircheck.superalgebra import SuperPoly
from vircheck.voa import LatticeVA, VAState


@pytest.fixture(scope="module")
def P1ctx():
    va = LatticeVA(curve(0), True)
    return PairingContext(va, (1, 0, 0, 0))


def test_unit_pairs_to_one(P1ctx):
    ctx = P1ctx
    u = VAState.basis(ctx.sector)
    assert ctx.pair(SuperPoly.one(), u) == 1


def test_generator_pairing_example(P1ctx):
    ctx = P1ctx
    g, va = ctx.geometry, ctx.va
    x = ctx.alg.top_gen(2, g.index("pt"), 1)
    u = VAState._raw({(ctx.sector, (va.gen(va.index("V.1"), 2),)): Fraction(1)})
    assert ctx.pair(SuperPoly.gen(x), u) == 1
    # other side and other level pair to zero
    y = ctx.alg.top_gen(2, g.index("pt"), 2)
    assert ctx.pair(SuperPoly.gen(y), u) == 0
    z = ctx.alg.top_gen(3, g.index("pt"), 1)
    assert ctx.pair(SuperPoly.gen(z), u) == 0


def test_cap_of_generator_on_vacuum_vanishes(P1ctx):
    ctx = P1ctx
    x = ctx.alg.top_gen(1, ctx.geometry.index("pt"), 1)
    assert not ctx.cap(SuperPoly.gen(x), VAState.basis(ctx.sector))


def test_cap_rejects_other_sectors(P1ctx):
    ctx = P1ctx
    with pytest.raises(DualityError):
        ctx.cap(SuperPoly.one(), VAState.basis((0, 1, 0, 0)))


def test_single_lattice_rejected():
    with pytest.raises(DualityError):
        PairingContext(LatticeVA(curve(0), False), (0, 0))


@pytest.mark.parametrize("kind, sector", [("curve:0", (1, 0, 0, 0)), ("curve:1", (0, 1, 1, 0)), ("p2", (1, 0, 0, 0, 1, 0))])
def test_dual_coordinates_match_cap(kind, sector):
    va = LatticeVA(preset_geometry(kind), True)
    ctx = PairingContext(va, sector)
    rng = random.Random(11)
    for d in range(0, 6):
        Ds = ctx.descendent_basis(d)
        keys = ctx.state_basis(d)
        for key in rng.sample(keys, min(len(keys), 6)):
            u = VAState._raw({key: Fraction(1)})
            phi = ctx.dual_coords(u)
            for D in Ds:
                (m,) = D.terms
                assert phi.get(m, 0) == ctx.pair(D, u)


def test_adjointness_on_P1(P1ctx):
    for n in range(-1, 3):
        cases, cex = P1ctx.adjoint_defect(n, 6)
        assert cex is None, cex
        assert cases > 0
    cases, cex = P1ctx.translation_defect(6)
    assert cex is None and cases > 0


def test_adjointness_on_genus_one():
    va = LatticeVA(curve(1), True)
    ctx = PairingContext(va, (0, 1, 1, 0))
    for n in (0, 1, 2):
        _, cex = ctx.adjoint_defect(n, 6)
        assert cex is None, cex


def test_mutation_of_T_is_detected(P1ctx):
    ctx = P1ctx
    terms = ctx.effective_T_terms(1)
    assert terms
    for term in terms:
        _, cex = ctx.adjoint_defect(1, 6, desc_op=ctx.perturbed_L(1, term))
        assert cex is not None
        assert cex.lhs != cex.rhs
