"""Finite cohomology models of the target variety and the K-theory lattices built from them."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

Vec = Tuple[Fraction, ...]


class GeometryError(ValueError):
    """Raised when a geometry violates one of its defining axioms."""


def parse_rational(s) -> Fraction:
    if isinstance(s, (int, Fraction)):
        return Fraction(s)
    return Fraction(str(s).strip())


def fmt_rational(c: Fraction) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


# ---------------------------------------------------------------------------
# exact dense linear algebra for small matrices


def mat_inverse(m: Sequence[Sequence[Fraction]]) -> List[List[Fraction]]:
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            raise GeometryError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def mat_det(m: Sequence[Sequence[Fraction]]) -> Fraction:
    n = len(m)
    a = [[Fraction(x) for x in row] for row in m]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        for r in range(col + 1, n):
            if a[r][col]:
                f = a[r][col] / a[col][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return det


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CohClass:
    """A cohomology class as a dense coefficient vector over the geometry basis."""

    coeffs: Vec

    @classmethod
    def zero(cls, n: int) -> "CohClass":
        return cls(tuple(Fraction(0) for _ in range(n)))

    @classmethod
    def basis(cls, n: int, i: int, c=1) -> "CohClass":
        return cls(tuple(Fraction(c) if j == i else Fraction(0) for j in range(n)))

    def __add__(self, other: "CohClass") -> "CohClass":
        return CohClass(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "CohClass") -> "CohClass":
        return CohClass(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "CohClass":
        return CohClass(tuple(-a for a in self.coeffs))

    def scale(self, c) -> "CohClass":
        c = Fraction(c)
        return CohClass(tuple(a * c for a in self.coeffs))

    def __rmul__(self, c) -> "CohClass":
        return self.scale(c)

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def support(self) -> List[int]:
        return [i for i, a in enumerate(self.coeffs) if a]

    def items(self):
        return [(i, a) for i, a in enumerate(self.coeffs) if a]


@dataclass(frozen=True)
class KunnethPair:
    left: CohClass
    right: CohClass
    p: int
    q: int


@dataclass
class TargetGeometry:
    """Hodge-bigraded cohomology ring with integration and Todd class."""

    dimension: int
    names: Tuple[str, ...]
    hodge: Tuple[Tuple[int, int], ...]
    cup_table: Dict[Tuple[int, int], Vec]
    integral: Vec
    todd_vec: Vec
    label: str = "custom"
    meta: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        self.n = len(self.names)
        self._index = {nm: i for i, nm in enumerate(self.names)}
        self.unit = self._find_unit()

    # basic accessors ----------------------------------------------------
    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise GeometryError(f"unknown basis class {name!r}") from None

    def cls(self, name_or_index: Union[str, int], c=1) -> CohClass:
        i = self.index(name_or_index) if isinstance(name_or_index, str) else name_or_index
        return CohClass.basis(self.n, i, c)

    def zero(self) -> CohClass:
        return CohClass.zero(self.n)

    def one(self) -> CohClass:
        return self.cls(self.unit)

    @property
    def todd(self) -> CohClass:
        return CohClass(self.todd_vec)

    def parity(self, i: int) -> int:
        p, q = self.hodge[i]
        return (p + q) & 1

    def cdeg(self, i: int) -> int:
        p, q = self.hodge[i]
        return p + q

    def class_parity(self, c: CohClass) -> int:
        ps = {self.parity(i) for i in c.support()}
        if len(ps) > 1:
            raise GeometryError("mixed parity class where a single parity is required")
        return ps.pop() if ps else 0

    def bidegree_parts(self, c: CohClass) -> Dict[Tuple[int, int], CohClass]:
        out: Dict[Tuple[int, int], CohClass] = {}
        for i, a in c.items():
            h = self.hodge[i]
            out[h] = out.get(h, self.zero()) + self.cls(i, a)
        return out

    def top_index(self) -> int:
        """Basis position of the point class (integral one, top degree)."""
        for i, a in enumerate(self.integral):
            if a and self.cdeg(i) == 2 * self.dimension:
                return i
        raise GeometryError("no top-degree class")

    # ring structure -----------------------------------------------------
    def cup_basis(self, i: int, j: int) -> Vec:
        v = self.cup_table.get((i, j))
        return v if v is not None else CohClass.zero(self.n).coeffs

    def cup(self, a: CohClass, b: CohClass) -> CohClass:
        out = [Fraction(0)] * self.n
        for i, x in a.items():
            for j, y in b.items():
                v = self.cup_table.get((i, j))
                if v is None:
                    continue
                xy = x * y
                for k, z in enumerate(v):
                    if z:
                        out[k] += xy * z
        return CohClass(tuple(out))

    def integrate(self, a: CohClass) -> Fraction:
        return sum((x * y for x, y in zip(a.coeffs, self.integral)), Fraction(0))

    def cup_and_integrate(self, *classes: CohClass) -> Fraction:
        """Integral of the ordered cup product (left to right)."""
        acc = self.one()
        for c in classes:
            acc = self.cup(acc, c)
        return self.integrate(acc)

    def exp(self, c: CohClass) -> CohClass:
        """exp of a nilpotent even class."""
        if c and self.class_parity(c):
            raise GeometryError("exp of an odd class")
        if any(self.cdeg(i) == 0 for i in c.support()):
            raise GeometryError("exp needs a class without degree-0 part")
        out = self.one()
        power = self.one()
        for a in range(1, 2 * self.dimension + 2):
            power = self.cup(power, c)
            if not power:
                break
            out = out + power.scale(Fraction(1, factorial(a)))
        return out

    def degree_part(self, c: CohClass, d: int) -> CohClass:
        return CohClass(tuple(a if self.cdeg(i) == d else Fraction(0) for i, a in enumerate(c.coeffs)))

    def dual_class(self, c: CohClass) -> CohClass:
        """ch(v^vee) from ch(v): the degree-d part picks up (-1)^floor(d/2)."""
        return CohClass(tuple(a * (-1 if (self.cdeg(i) // 2) % 2 else 1) for i, a in enumerate(c.coeffs)))

    def gram(self) -> List[List[Fraction]]:
        return [[self.cup_and_integrate(self.cls(i), self.cls(j)) for j in range(self.n)] for i in range(self.n)]

    def dual_basis(self) -> List[CohClass]:
        """bar(b) with int(b * bar(b')) = delta(b, b')."""
        g = self.gram()
        x = mat_inverse(g)
        return [CohClass(tuple(x[c][b] for c in range(self.n))) for b in range(self.n)]

    def _find_unit(self) -> int:
        for u in range(self.n):
            if self.hodge[u] != (0, 0):
                continue
            if all(self.cup_basis(u, b) == CohClass.basis(self.n, b).coeffs for b in range(self.n)):
                return u
        raise GeometryError("cup product has no unit among the basis classes")

    # validation ---------------------------------------------------------
    def validate(self) -> None:
        n = self.n
        for i, (p, q) in enumerate(self.hodge):
            if abs(p - q) > 1:
                raise GeometryError(f"Hodge assumption |p-q|<=1 violated by {self.names[i]}")
            if not (0 <= p <= self.dimension and 0 <= q <= self.dimension):
                raise GeometryError(f"bidegree out of range for {self.names[i]}")
        for i in range(n):
            for j in range(n):
                vij = self.cup_basis(i, j)
                vji = self.cup_basis(j, i)
                sign = -1 if self.parity(i) and self.parity(j) else 1
                if any(a != sign * b for a, b in zip(vij, vji)):
                    raise GeometryError(f"cup not supercommutative on ({self.names[i]},{self.names[j]})")
                target = (self.hodge[i][0] + self.hodge[j][0], self.hodge[i][1] + self.hodge[j][1])
                for k, a in enumerate(vij):
                    if a and self.hodge[k] != target:
                        raise GeometryError(f"cup not bigraded on ({self.names[i]},{self.names[j]})")
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    a, b, c = self.cls(i), self.cls(j), self.cls(k)
                    if self.cup(self.cup(a, b), c) != self.cup(a, self.cup(b, c)):
                        raise GeometryError(
                            f"cup not associative on ({self.names[i]},{self.names[j]},{self.names[k]})"
                        )
        for i, a in enumerate(self.integral):
            if a and self.cdeg(i) != 2 * self.dimension:
                raise GeometryError(f"integral nonzero outside top degree on {self.names[i]}")
        if mat_det(self.gram()) == 0:
            raise GeometryError("intersection pairing is degenerate (Poincare duality fails)")
        td = self.todd
        if self.degree_part(td, 0) != self.one():
            raise GeometryError("todd class must start with 1")
        if any(self.cdeg(i) % 2 for i in td.support()):
            raise GeometryError("todd class must be even")
        chi = self.meta.get("chi_O")
        if chi is not None and self.integrate(td) != Fraction(chi):
            raise GeometryError("integral of todd differs from the holomorphic Euler characteristic")

    # provenance ---------------------------------------------------------
    def to_json(self) -> Dict[str, object]:
        cup = []
        for (i, j), v in sorted(self.cup_table.items()):
            val = [{"b": self.names[k], "c": fmt_rational(a)} for k, a in enumerate(v) if a]
            if val:
                cup.append({"i": self.names[i], "j": self.names[j], "value": val})
        return {
            "dimension": self.dimension,
            "basis": [{"name": nm, "p": p, "q": q} for nm, (p, q) in zip(self.names, self.hodge)],
            "cup": cup,
            "integral": [{"b": self.names[k], "c": fmt_rational(a)} for k, a in enumerate(self.integral) if a],
            "todd": [{"b": self.names[k], "c": fmt_rational(a)} for k, a in enumerate(self.todd_vec) if a],
        }

    def render_class(self, c: CohClass) -> str:
        parts = []
        for i, a in c.items():
            coef = "" if a == 1 else ("-" if a == -1 else fmt_rational(a) + "*")
            parts.append(f"{coef}{self.names[i]}")
        return " + ".join(parts).replace("+ -", "- ") if parts else "0"


# ---------------------------------------------------------------------------
# presets


def _vec(n: int, entries: Mapping[int, object]) -> Vec:
    out = [Fraction(0)] * n
    for k, v in entries.items():
        out[k] = Fraction(v)
    return tuple(out)


def _build(dimension, names, hodge, products, integral, todd, label, meta) -> TargetGeometry:
    """products: {(name_i, name_j): {name_k: coeff}} given for one ordering;
    the other ordering is filled in by supercommutativity."""
    n = len(names)
    idx = {nm: i for i, nm in enumerate(names)}
    par = [(p + q) & 1 for p, q in hodge]
    table: Dict[Tuple[int, int], Vec] = {}
    for (a, b), val in products.items():
        i, j = idx[a], idx[b]
        v = _vec(n, {idx[k]: c for k, c in val.items()})
        table[(i, j)] = v
        sign = -1 if par[i] and par[j] else 1
        table[(j, i)] = tuple(sign * x for x in v)
    geom = TargetGeometry(
        dimension=dimension,
        names=tuple(names),
        hodge=tuple(hodge),
        cup_table=table,
        integral=_vec(n, {idx[k]: c for k, c in integral.items()}),
        todd_vec=_vec(n, {idx[k]: c for k, c in todd.items()}),
        label=label,
        meta=meta,
    )
    return geom


def _unit_products(names: Sequence[str]) -> Dict[Tuple[str, str], Dict[str, int]]:
    return {("1", nm): {nm: 1} for nm in names}


def curve(g: int) -> TargetGeometry:
    if g < 0:
        raise GeometryError("genus must be nonnegative")
    es = [f"e{j}" for j in range(1, g + 1)]
    fs = [f"f{j}" for j in range(1, g + 1)]
    names = ["1"] + es + fs + ["pt"]
    hodge = [(0, 0)] + [(0, 1)] * g + [(1, 0)] * g + [(1, 1)]
    prods = _unit_products(names)
    for j in range(1, g + 1):
        # f_j . e_i = delta_ij pt = - e_i . f_j
        prods[(f"f{j}", f"e{j}")] = {"pt": 1}
    geom = _build(1, names, hodge, prods, {"pt": 1}, {"1": 1, "pt": 1 - g}, f"curve:{g}", {"genus": g, "chi_O": 1 - g})
    geom.validate()
    return geom


def p2() -> TargetGeometry:
    names = ["1", "H", "pt"]
    hodge = [(0, 0), (1, 1), (2, 2)]
    prods = _unit_products(names)
    prods[("H", "H")] = {"pt": 1}
    geom = _build(2, names, hodge, prods, {"pt": 1}, {"1": 1, "H": Fraction(3, 2), "pt": 1}, "p2", {"chi_O": 1})
    geom.validate()
    return geom


def p1xp1() -> TargetGeometry:
    names = ["1", "H1", "H2", "pt"]
    hodge = [(0, 0), (1, 1), (1, 1), (2, 2)]
    prods = _unit_products(names)
    prods[("H1", "H2")] = {"pt": 1}
    geom = _build(2, names, hodge, prods, {"pt": 1}, {"1": 1, "H1": 1, "H2": 1, "pt": 1}, "p1xp1", {"chi_O": 1})
    geom.validate()
    return geom


def load_geometry_file(path: str) -> TargetGeometry:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise GeometryError(f"cannot read geometry file: {exc}") from exc
    return geometry_from_json(data, label=f"file:{path}")


def geometry_from_json(data: Mapping, label: str = "custom") -> TargetGeometry:
    try:
        dim = int(data["dimension"])
        basis = data["basis"]
        names = [str(b["name"]) for b in basis]
        hodge = [(int(b["p"]), int(b["q"])) for b in basis]
    except (KeyError, TypeError, ValueError) as exc:
        raise GeometryError(f"schema violation: {exc}") from exc
    if dim not in (1, 2):
        raise GeometryError("dimension must be 1 or 2")
    if len(set(names)) != len(names):
        raise GeometryError("duplicate basis names")
    n = len(names)
    idx = {nm: i for i, nm in enumerate(names)}

    def lin(entries) -> Vec:
        out = [Fraction(0)] * n
        for e in entries or []:
            if e["b"] not in idx:
                raise GeometryError(f"unknown basis class {e['b']!r}")
            out[idx[e["b"]]] += parse_rational(e["c"])
        return tuple(out)

    try:
        table: Dict[Tuple[int, int], Vec] = {}
        for entry in data.get("cup", []):
            if entry["i"] not in idx or entry["j"] not in idx:
                raise GeometryError("cup entry references unknown class")
            table[(idx[entry["i"]], idx[entry["j"]])] = lin(entry["value"])
        integral = lin(data["integral"])
        todd = lin(data["todd"])
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise GeometryError(f"schema violation: {exc}") from exc
    meta = dict(data.get("meta", {}))
    geom = TargetGeometry(dim, tuple(names), tuple(hodge), table, integral, todd, label, meta)
    geom.validate()
    if "sst" in data:
        geom.meta["sst"] = [lin(v) for v in data["sst"]]
    return geom


def preset_geometry(kind: str) -> TargetGeometry:
    """Geometry from a spec string: ``curve:<g>``, ``p2``, ``p1xp1`` or ``file:<path>``."""
    kind = kind.strip()
    if kind.startswith("curve:"):
        try:
            g = int(kind.split(":", 1)[1])
        except ValueError:
            raise GeometryError(f"bad genus in {kind!r}") from None
        return curve(g)
    if kind in ("p2", "P2"):
        return p2()
    if kind in ("p1xp1", "P1xP1"):
        return p1xp1()
    if kind.startswith("file:"):
        return load_geometry_file(kind.split(":", 1)[1])
    raise GeometryError(f"unknown geometry {kind!r}")


def sst_generators(geom: TargetGeometry) -> List[CohClass]:
    """Chern characters of generators of the semitopological lattice."""
    if "sst" in geom.meta:
        return [CohClass(v) for v in geom.meta["sst"]]
    if geom.label.startswith("curve"):
        return [geom.one(), geom.cls("pt")]
    if geom.label == "p2":
        # O, O_line (ch = H - pt/2), O_pt
        return [geom.one(), geom.cls("H") - geom.cls("pt", Fraction(1, 2)), geom.cls("pt")]
    if geom.label == "p1xp1":
        return [geom.one(), geom.cls("H1"), geom.cls("H2"), geom.cls("pt")]
    return [geom.cls(i) for i in range(geom.n) if not geom.parity(i)]


# ---------------------------------------------------------------------------
# diagonal


def diagonal_kunneth(geom: TargetGeometry, twist: Optional[CohClass] = None) -> List[KunnethPair]:
    """Kunneth pairs of the pushforward of ``twist`` along the diagonal.

    Uses Delta_*1 = sum_b bar(b) (x) b with int(b bar(b)) = 1, then multiplies
    by 1 (x) twist.  Left factors are split into Hodge-homogeneous pieces.
    """
    if twist is None:
        twist = geom.one()
    if twist and geom.class_parity(twist):
        raise GeometryError("odd twist rejected")
    duals = geom.dual_basis()
    out: List[KunnethPair] = []
    for b in range(geom.n):
        right = geom.cup(geom.cls(b), twist)
        if not right:
            continue
        for (p, q), left in sorted(geom.bidegree_parts(duals[b]).items()):
            out.append(KunnethPair(left, right, p, q))
    return out


def kunneth_tensor(pairs: Iterable[KunnethPair], n: int) -> Dict[Tuple[int, int], Fraction]:
    """Coefficient matrix of sum left (x) right on basis (x) basis."""
    out: Dict[Tuple[int, int], Fraction] = {}
    for kp in pairs:
        for i, a in kp.left.items():
            for j, b in kp.right.items():
                out[(i, j)] = out.get((i, j), Fraction(0)) + a * b
    return {k: v for k, v in out.items() if v}


def left_twisted_tensor(geom: TargetGeometry, twist: CohClass) -> Dict[Tuple[int, int], Fraction]:
    """(twist (x) 1) . Delta_*1 as a coefficient matrix."""
    pairs = diagonal_kunneth(geom)
    moved = [KunnethPair(geom.cup(twist, kp.left), kp.right, kp.p, kp.q) for kp in pairs]
    return kunneth_tensor(moved, geom.n)


# ---------------------------------------------------------------------------
# Euler pairings


def chi(geom: TargetGeometry, v: CohClass, w: CohClass) -> Fraction:
    return geom.integrate(geom.cup(geom.cup(geom.dual_class(v), w), geom.todd))


def chi_sym(geom: TargetGeometry, v: CohClass, w: CohClass) -> Fraction:
    return chi(geom, v, w) + chi(geom, w, v)


def chi_H(geom: TargetGeometry, v: CohClass, w: CohClass) -> Fraction:
    """(-1)^p int v w td, summed over the Hodge columns p of v."""
    total = Fraction(0)
    for (p, _q), part in geom.bidegree_parts(v).items():
        val = geom.integrate(geom.cup(geom.cup(part, w), geom.todd))
        total += -val if p % 2 else val
    return total


PairVec = Tuple[CohClass, CohClass]


def chi_pa(geom: TargetGeometry, v: PairVec, w: PairVec) -> Fraction:
    return chi(geom, v[1] - v[0], w[1])


def chi_pa_sym(geom: TargetGeometry, v: PairVec, w: PairVec) -> Fraction:
    return chi_pa(geom, v, w) + chi_pa(geom, w, v)


def chi_H_pa(geom: TargetGeometry, v: PairVec, w: PairVec) -> Fraction:
    return chi_H(geom, v[1] - v[0], w[1])


def _pair_parity(geom: TargetGeometry, v: PairVec) -> int:
    ps = set()
    for c in v:
        if c:
            ps.add(geom.class_parity(c))
    if len(ps) > 1:
        raise GeometryError("mixed parity pair vector")
    return ps.pop() if ps else 0


def chi_H_pa_ssym(geom: TargetGeometry, v: PairVec, w: PairVec) -> Fraction:
    sign = -1 if _pair_parity(geom, v) and _pair_parity(geom, w) else 1
    return chi_H_pa(geom, v, w) + sign * chi_H_pa(geom, w, v)


def euler_pairing(geom: TargetGeometry, variant: str, v, w) -> Fraction:
    """Dispatch on ``variant``; single variants take classes, pair variants take pairs."""
    if variant == "Q_omega":
        return q_omega(geom, v, w)
    table = {
        "chi": chi,
        "chi_sym": chi_sym,
        "chi_H": chi_H,
        "chi_pa": chi_pa,
        "chi_pa_sym": chi_pa_sym,
        "chi_H_pa_ssym": chi_H_pa_ssym,
    }
    if variant not in table:
        raise ValueError(f"unknown pairing variant {variant!r}")
    pair_variant = variant.startswith("chi_pa") or variant == "chi_H_pa_ssym"
    if pair_variant != isinstance(v, tuple) or pair_variant != isinstance(w, tuple):
        raise GeometryError("lattice mismatch for pairing variant")
    return table[variant](geom, v, w)


def split_isotropic(geom: TargetGeometry, c: CohClass) -> Tuple[CohClass, CohClass]:
    """(I-part, I-hat-part) of an odd class: I = H^{p,p+1}, I-hat = H^{p+1,p}."""
    i_part, ihat_part = geom.zero(), geom.zero()
    for (p, q), part in geom.bidegree_parts(c).items():
        if q == p + 1:
            i_part = i_part + part
        elif p == q + 1:
            ihat_part = ihat_part + part
        elif (p + q) % 2:
            raise GeometryError("odd class outside the Hodge range")
    return i_part, ihat_part


def q_omega(geom: TargetGeometry, v: PairVec, w: PairVec) -> Fraction:
    """Shifted pairing on the pair lattice: Q on even parts,
    Q(v_I, w_Ihat) - Q(v_Ihat, w_I) on odd parts."""
    def parts(x: PairVec):
        ev = tuple(CohClass(tuple(a if not geom.parity(i) else Fraction(0) for i, a in enumerate(c.coeffs))) for c in x)
        od = tuple(c - e for c, e in zip(x, ev))
        i_ = tuple(split_isotropic(geom, c)[0] for c in od)
        ih = tuple(split_isotropic(geom, c)[1] for c in od)
        return ev, i_, ih

    ev_v, i_v, ih_v = parts(v)
    ev_w, i_w, ih_w = parts(w)
    return chi_pa_sym(geom, ev_v, ev_w) + chi_pa_sym(geom, i_v, ih_w) - chi_pa_sym(geom, ih_v, i_w)
