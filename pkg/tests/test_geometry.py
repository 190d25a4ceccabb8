import json
from fractions import Fraction

import pytest

from vircheck.geometry import (
    CohClass,
    GeometryError,
    chi,
    chi_sym,
    curve,
    diagonal_kunneth,
    euler_pairing,
    kunneth_tensor,
    mat_det,
    p2,
    preset_geometry,
    q_omega,
    sst_generators,
)


def test_curve0_todd_and_point():
    g = curve(0)
    assert g.todd == g.one() + g.cls("pt")
    assert g.integrate(g.cls("pt")) == 1


@pytest.mark.parametrize("genus", [0, 1, 2, 3, 5])
def test_curve_todd_integrates_to_euler_characteristic(genus):
    g = curve(genus)
    assert g.integrate(g.todd) == 1 - genus
    assert g.n == 2 * genus + 2


def test_curve2_odd_square_vanishes():
    g = curve(2)
    assert g.n == 6
    assert not g.cup(g.cls("e1"), g.cls("e1"))


def test_p2_ring():
    g = p2()
    assert g.cup(g.cls("H"), g.cls("H")) == g.cls("pt")
    assert g.integrate(g.todd) == 1
    assert g.cup_and_integrate(g.cls("H"), g.cls("H")) == 1


@pytest.mark.parametrize("genus", [1, 2, 3])
def test_curve_odd_sign_convention(genus):
    g = curve(genus)
    assert g.cup_and_integrate(g.cls("f1"), g.cls("e1")) == 1
    assert g.cup_and_integrate(g.cls("e1"), g.cls("f1")) == -1


def _contraction_holds(g, pairs):
    # sum_t int(a L_t) R_t = a for every basis class a
    for a in range(g.n):
        acc = g.zero()
        for kp in pairs:
            acc = acc + kp.right.scale(g.cup_and_integrate(g.cls(a), kp.left))
        if acc != g.cls(a):
            return False
    return True


@pytest.mark.parametrize("kind", ["curve:0", "curve:1", "curve:2", "curve:3", "p2", "p1xp1"])
def test_diagonal_contraction_identity(kind):
    g = preset_geometry(kind)
    assert _contraction_holds(g, diagonal_kunneth(g))


def test_p1_diagonal_pairs():
    g = curve(0)
    one, pt = g.index("1"), g.index("pt")
    assert kunneth_tensor(diagonal_kunneth(g), g.n) == {(one, pt): 1, (pt, one): 1}
    twisted = kunneth_tensor(diagonal_kunneth(g, g.todd), g.n)
    assert twisted == {(one, pt): 1, (pt, one): 1, (pt, pt): 1}


@pytest.mark.parametrize("genus", [0, 1, 2, 4])
def test_euler_pairings_on_curves(genus):
    g = curve(genus)
    O, pt = g.one(), g.cls("pt")
    assert chi(g, O, O) == 1 - genus
    assert chi_sym(g, O, O) == 2 - 2 * genus
    assert chi(g, pt, pt) == 0
    assert euler_pairing(g, "chi", O, O) == 1 - genus


def test_curve0_single_gram_is_degenerate():
    # the dual rule gives chi(pt, O) = -1, so chi_sym(O, pt) = 0
    g = curve(0)
    O, pt = g.one(), g.cls("pt")
    gram = [[chi_sym(g, a, b) for b in (O, pt)] for a in (O, pt)]
    assert gram == [[2, 0], [0, 0]]


@pytest.mark.parametrize("kind", ["curve:0", "curve:1", "curve:2", "p2", "p1xp1"])
def test_q_omega_nondegenerate_and_supersymmetric(kind):
    g = preset_geometry(kind)
    z = g.zero()
    basis = [(g.cls(i), z) for i in range(g.n)] + [(z, g.cls(i)) for i in range(g.n)]
    gram = [[q_omega(g, v, w) for w in basis] for v in basis]
    assert mat_det(gram) != 0
    for i, v in enumerate(basis):
        for j, w in enumerate(basis):
            pv, pw = g.class_parity(v[0] + v[1]), g.class_parity(w[0] + w[1])
            assert gram[i][j] == (-1) ** (pv * pw) * gram[j][i]


def test_pairing_variant_lattice_mismatch():
    g = curve(1)
    with pytest.raises(GeometryError):
        euler_pairing(g, "chi_pa", g.one(), g.one())
    with pytest.raises(ValueError):
        euler_pairing(g, "nope", g.one(), g.one())


def test_sst_generators_cover_even_classes():
    g = p2()
    gens = sst_generators(g)
    assert len(gens) == 3
    assert all(not g.class_parity(c) for c in gens)


def test_json_round_trip(tmp_path):
    g = curve(2)
    path = tmp_path / "c2.json"
    path.write_text(json.dumps(g.to_json()))
    h = preset_geometry(f"file:{path}")
    assert h.names == g.names
    assert h.cup_table == g.cup_table
    assert h.todd == g.todd


@pytest.mark.parametrize(
    "payload",
    [
        {"dimension": 3, "basis": [], "integral": [], "todd": []},
        {"basis": []},
        {"dimension": 1, "basis": [{"name": "1", "p": 0, "q": 0}], "integral": [{"b": "x", "c": "1"}], "todd": []},
    ],
)
def test_bad_geometry_files_rejected(tmp_path, payload):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(payload))
    with pytest.raises(GeometryError):
        preset_geometry(f"file:{path}")


def test_unknown_preset():
    with pytest.raises(GeometryError):
        preset_geometry("p3")
    with pytest.raises(GeometryError):
        preset_geometry("file:/nonexistent/geometry.json")


def test_cohclass_arithmetic():
    a = CohClass((Fraction(1), Fraction(2)))
    b = CohClass.basis(2, 1, 3)
    assert (a + b).coeffs == (1, 5)
    assert (a - a).support() == []
    assert not CohClass.zero(2)
    assert (2 * a).coeffs == (2, 4)
