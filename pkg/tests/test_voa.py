from fractions import Fraction

import pytest

from vircheck.geometry import curve, preset_geometry
from vircheck.voa import LatticeVA, VAError, VAState, gbinom


@pytest.fixture(scope="module")
def P1():
    return LatticeVA(curve(0), True)


@pytest.mark.parametrize(
    "kind, rank, odd, sectors, c",
    [("curve:0", 4, 0, 4, 4), ("curve:1", 8, 4, 4, 0), ("curve:2", 12, 8, 4, -4), ("p2", 6, 0, 6, 6)],
)
def test_pair_lattice_shapes_and_central_charge(kind, rank, odd, sectors, c):
    va = LatticeVA(preset_geometry(kind), True)
    assert va.rank == rank
    assert sum(va.parity) == odd
    assert va.m == sectors
    assert va.conformal
    assert va.central_charge() == c


def test_single_lattice_of_a_curve_has_no_conformal_element():
    va = LatticeVA(curve(0), False)
    assert not va.conformal
    with pytest.raises(VAError):
        va.require_conformal()


def test_omega_on_P1(P1):
    va = P1
    assert len(va.omega) == 4
    assert va.weights(va.omega) == {2}


@pytest.mark.parametrize("kind", ["curve:0", "curve:1", "curve:2", "p2"])
def test_L2_Lminus2_vacuum(kind):
    va = LatticeVA(preset_geometry(kind), True)
    vac = va.vacuum()
    got = va.virasoro(2, va.virasoro(-2, vac))
    assert got == vac.scale(Fraction(va.central_charge(), 2))


def test_generator_modes(P1):
    va = P1
    z = va.zero_sector()
    pt, F1 = va.index("V.pt"), va.index("F.1")
    a, b = va.state(z, [(pt, 1)]), va.state(z, [(F1, 1)])
    assert va.mode(a, -2, b) == va.state(z, [(F1, 1), (pt, 2)])
    assert va.mode(a, -1, b) == va.state(z, [(pt, 1), (F1, 1)])
    assert not va.mode(a, 0, b)
    assert va.mode(a, 1, b) == va.vacuum()
    assert not va.mode(a, 2, b)


def test_vacuum_and_creation(P1):
    va = P1
    s = va.state([0, 0, 1, 0])
    assert va.mode(s, -1, va.vacuum()) == s
    assert va.mode(va.vacuum(), -1, s) == s
    assert not va.mode(va.vacuum(), 0, s)


def test_translation_examples(P1):
    va = P1
    s = va.state([1, 0, 0, 0])
    assert va.translate(s) == va.state([1, 0, 0, 0], [(va.index("V.1"), 1)])
    w = va.state(None, [(va.index("V.pt"), 1)])
    assert va.translate(w) == va.state(None, [(va.index("V.pt"), 2)])
    assert not va.translate(va.vacuum())


def test_L0_and_L1_examples(P1):
    va = P1
    w = va.state(None, [(va.index("V.pt"), 2)])
    assert va.virasoro(0, w) == w.scale(2)
    assert va.virasoro(1, w) == va.state(None, [(va.index("V.pt"), 1)]).scale(2)
    assert not va.virasoro(2, w)
    assert va.virasoro(-1, w) == va.translate(w)


def test_fast_virasoro_matches_generic():
    va = LatticeVA(curve(1), True)
    z = va.zero_sector()
    e1, pt = va.index("V.e1"), va.index("F.pt")
    s = va.state([0, 1, 0, 0], [(e1, 1), (pt, 2)])
    for n in range(-1, 3):
        assert va.virasoro(n, s) == va.virasoro_generic(n, s)
    assert va.virasoro(0, va.state(z, [(e1, 1)])) == va.state(z, [(e1, 1)])


def test_odd_state_parity():
    va = LatticeVA(curve(1), True)
    e = va.state(None, [(va.index("V.e1"), 1)])
    assert va.state_parity(e) == 1
    assert not va.mode(e, -1, e)  # e_{-1}e_{-1}|0> vanishes


@pytest.mark.parametrize("sector, weight", [([0, 1, 0, 0], 0), ([0, 0, 1, 0], 1), ([1, 0, 1, 0], 0)])
def test_lattice_vectors_are_primary(P1, sector, weight):
    va = P1
    s = va.state(sector)
    ok, rep = va.is_primary(s)
    assert ok
    assert rep["weights"] == [weight]


def test_non_primary_detected(P1):
    va = P1
    w = va.state(None, [(va.index("V.pt"), 2)])
    ok, rep = va.is_primary(w)
    assert not ok and rep["failed_at"] == 1


def test_weight1_Heisenberg_state_is_primary(P1):
    va = P1
    ok, _ = va.is_primary(va.state(None, [(va.index("F.1"), 1)]))
    assert ok


def test_primary_lift(P1):
    va = P1
    s = va.state([0, 0, 1, 0])
    lift = va.primary_lift(s)
    assert va.is_primary(lift)[0]
    assert lift == s
    with pytest.raises(VAError):
        va.primary_lift(va.vacuum())
    with pytest.raises(VAError):
        va.primary_lift(s + va.state([0, 1, 0, 0]))


def test_lie_bracket_is_zero_mode(P1):
    va = P1
    z = va.zero_sector()
    a = va.state(z, [(va.index("V.pt"), 1)])
    s = va.state([0, 0, 1, 0])
    assert va.lie_bracket(a, s) == va.mode(a, 0, s)
    # zero mode of a Heisenberg state acts by Q(v, alpha)
    x = va.Q_basis_sector(va.index("V.pt"), (0, 0, 1, 0))
    assert x == 1
    assert va.lie_bracket(a, s) == s.scale(x)


def test_equal_mod_T(P1):
    va = P1
    v1 = va.state(None, [(va.index("V.pt"), 1)])
    v2 = va.state(None, [(va.index("V.pt"), 2)])
    assert va.equal_mod_T(v2, VAState.zero())
    assert not va.equal_mod_T(v1, VAState.zero())
    assert va.equal_mod_T(v1 + v2, v1)


def test_monomials_of_weight_counts(P1):
    va = P1
    z = va.zero_sector()
    assert len(va.monomials_of_weight(z, 0)) == 1
    assert len(va.monomials_of_weight(z, 1)) == 4
    # weight 2: 4 singles at level 2 and 10 quadratic monomials
    assert len(va.monomials_of_weight(z, 2)) == 14


def test_state_rejects_nonpositive_generators(P1):
    with pytest.raises(VAError):
        P1.gen(0, 0)


def test_gbinom():
    assert gbinom(5, 2) == 10
    assert gbinom(-1, 3) == -1
    assert gbinom(-2, 2) == 3
    assert gbinom(3, -1) == 0


def test_mode_upper_bound_is_sharp_on_P1(P1):
    va = P1
    a = va.state([0, 0, 1, 0])
    b = va.state([0, 0, 1, 0])
    ka, kb = next(iter(a.terms)), next(iter(b.terms))
    top = va.mode_bound(ka, kb)
    assert not va.mode(a, top + 1, b)
    assert va.mode(a, top, b)


def test_render(P1):
    va = P1
    s = va.state([0, 0, 1, 0], [(va.index("F.pt"), 2)], Fraction(1, 2))
    assert va.render(s) == "1/2*e[0,0,1,0]*v[F.pt,-2]"
    assert va.render(VAState.zero()) == "0"
