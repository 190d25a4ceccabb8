"""Descendent algebras and the Virasoro-type operators acting on them."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Callable, Dict, Iterable, List, Optional, Tuple, Union

from .geometry import CohClass, TargetGeometry, diagonal_kunneth
from .superalgebra import (
    FORMAL,
    HOL,
    TOP,
    Gen,
    SuperDerivation,
    SuperPoly,
    add_into,
)

FLAVORS = ("full", "at_alpha", "pair", "pair_at_alpha")
SIDE_NAMES = {0: "", 1: "V", 2: "F"}

# formal twist variable for E_twist, even of degree 2
ZETA = Gen(FORMAL, 0, 0, 0, 2)


def _falling(i: int, k: int) -> int:
    """prod_{j=0}^{k} (i+j); 1 when k = -1."""
    out = 1
    for j in range(k + 1):
        out *= i + j
    return out


@dataclass
class DescAlgebra:
    """A descendent algebra over a target geometry.

    ``alpha`` is the Chern character of the topological type (a class for
    ``at_alpha``, a pair of classes for ``pair_at_alpha``).
    """

    geometry: TargetGeometry
    flavor: str = "full"
    alpha: Optional[Union[CohClass, Tuple[CohClass, CohClass]]] = None
    _shift: List[int] = field(init=False, repr=False)

    def __post_init__(self):
        if self.flavor not in FLAVORS:
            raise ValueError(f"unknown flavor {self.flavor!r}")
        if self.flavor in ("at_alpha", "pair_at_alpha") and self.alpha is None:
            raise ValueError("at-alpha flavors need alpha")
        geom = self.geometry
        self._shift = [(p - q) // 2 for p, q in geom.hodge]

    # flavor helpers -----------------------------------------------------
    @property
    def is_pair(self) -> bool:
        return self.flavor.startswith("pair")

    @property
    def is_top(self) -> bool:
        return self.flavor.endswith("at_alpha")

    @property
    def sides(self) -> Tuple[int, ...]:
        return (1, 2) if self.is_pair else (0,)

    def holomorphic(self) -> "DescAlgebra":
        return DescAlgebra(self.geometry, "pair" if self.is_pair else "full")

    def alpha_for_side(self, side: int) -> CohClass:
        if self.flavor == "at_alpha":
            return self.alpha
        if self.flavor == "pair_at_alpha":
            return self.alpha[0] if side == 1 else self.alpha[1]
        raise ValueError("no alpha in this flavor")

    # generators ---------------------------------------------------------
    def hol_gen(self, i: int, b: int, side: int = 0) -> Gen:
        p, q = self.geometry.hodge[b]
        return Gen(HOL, side, i, b, 2 * i - p + q)

    def top_gen(self, i: int, b: int, side: int = 0) -> Gen:
        return Gen(TOP, side, i, b, 2 * i - self.geometry.parity(b))

    def chH(self, i: int, gamma: CohClass, side: int = 0) -> SuperPoly:
        """Holomorphic descendent ch^H_i(gamma), linear in gamma."""
        if i < 0:
            return SuperPoly.zero()
        terms = {}
        for b, c in gamma.items():
            terms[(self.hol_gen(i, b, side),)] = c
        return SuperPoly._raw(terms)

    def ch(self, i: int, gamma: CohClass, side: int = 0) -> SuperPoly:
        """Shifted descendent ch_i(gamma); in at-alpha flavors ch_0 is a scalar."""
        if self.is_top:
            if i < 0:
                return SuperPoly.zero()
            if i == 0:
                return SuperPoly.const(self.geometry.cup_and_integrate(gamma, self.alpha_for_side(side)))
            return SuperPoly._raw({(self.top_gen(i, b, side),): c for b, c in gamma.items()})
        out = SuperPoly.zero()
        for b, c in gamma.items():
            out = out + self.chH(i + self._shift[b], self.geometry.cls(b), side).scale(c)
        return out

    def generators(self, degmax: int, degmin: Optional[int] = None) -> List[Gen]:
        """All generators with degree <= degmax, in global order."""
        geom = self.geometry
        out = []
        for side in self.sides:
            for b in range(geom.n):
                i = 1 if self.is_top else 0
                while True:
                    g = self.top_gen(i, b, side) if self.is_top else self.hol_gen(i, b, side)
                    if g.deg > degmax:
                        break
                    if degmin is None or g.deg >= degmin:
                        out.append(g)
                    i += 1
        return sorted(out)

    def monomials(self, degree: int) -> List[SuperPoly]:
        """Canonical monomial basis of one graded component (at-alpha flavors only)."""
        if not self.is_top:
            raise ValueError("monomial bases are finite only in at-alpha flavors")
        gens = self.generators(degree)
        out: List[Tuple[Gen, ...]] = []

        def rec(start: int, remaining: int, acc: List[Gen]):
            if remaining == 0:
                out.append(tuple(acc))
                return
            for idx in range(start, len(gens)):
                g = gens[idx]
                if g.deg > remaining:
                    continue
                acc.append(g)
                rec(idx + 1 if g.deg & 1 else idx, remaining - g.deg, acc)
                acc.pop()

        rec(0, degree, [])
        return [SuperPoly._raw({m: Fraction(1)}) for m in sorted(out)]

    # lift / project -----------------------------------------------------
    def lift(self, D: SuperPoly) -> SuperPoly:
        """ch_i(gamma) -> ch^H_{i + floor((p-q)/2)}(gamma)."""
        if not self.is_top:
            return D

        def image(g: Gen) -> SuperPoly:
            if g.fam != TOP:
                return SuperPoly.gen(g)
            return SuperPoly.gen(self.hol_gen(g.idx + self._shift[g.basis], g.basis, g.side))

        return D.substitute(image)

    def project(self, D: SuperPoly) -> SuperPoly:
        """The homomorphism p_alpha from the holomorphic algebra to this one."""
        if not self.is_top:
            return D
        geom = self.geometry

        def image(g: Gen) -> SuperPoly:
            if g.fam != HOL:
                return SuperPoly.gen(g)
            if g.deg > 0:
                return SuperPoly.gen(self.top_gen(g.idx - self._shift[g.basis], g.basis, g.side))
            if g.deg == 0:
                return SuperPoly.const(geom.cup_and_integrate(geom.cls(g.basis), self.alpha_for_side(g.side)))
            return SuperPoly.zero()

        return D.substitute(image)

    # rendering ----------------------------------------------------------
    def namer(self, g: Gen) -> str:
        if g == ZETA:
            return "zeta"
        nm = self.geometry.names[g.basis]
        side = SIDE_NAMES.get(g.side, "")
        base = "chH" if g.fam == HOL else ("ch" if g.fam == TOP else "x")
        sup = f"^{side}" if side else ""
        return f"{base}{sup}[{g.idx}]({nm})"

    def render(self, D: SuperPoly) -> str:
        return D.render(self.namer)

    def apply(self, op: "DescOperator", D: SuperPoly) -> SuperPoly:
        """Apply an operator defined on the holomorphic algebra, through lift/project."""
        if self.is_top:
            return self.project(op(self.lift(D)))
        return op(D)


def project_alpha(alg_full: DescAlgebra, alpha, D: SuperPoly) -> SuperPoly:
    flavor = "pair_at_alpha" if alg_full.is_pair else "at_alpha"
    return DescAlgebra(alg_full.geometry, flavor, alpha).project(D)


# ---------------------------------------------------------------------------
# operators


class DescOperator:
    """Linear operator on a holomorphic descendent algebra."""

    name = "op"

    def __call__(self, D: SuperPoly) -> SuperPoly:  # pragma: no cover - abstract
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"<{self.name}>"


class DerivMult(DescOperator):
    """x -> d(x) + m*x for an even derivation d and element m."""

    def __init__(self, name: str, deriv: Optional[SuperDerivation] = None, mult: Optional[SuperPoly] = None):
        self.name = name
        self.deriv = deriv
        self.mult = mult if mult is not None else SuperPoly.zero()

    def __call__(self, D: SuperPoly) -> SuperPoly:
        out = self.deriv.apply_terms(D.terms) if self.deriv is not None else {}
        if self.mult:
            add_into(out, (self.mult * D).terms)
        return SuperPoly._raw(out)

    def plus(self, other: "DerivMult", name: Optional[str] = None, c=1) -> "DerivMult":
        """Sum of two derivation+multiplication operators sharing derivation style."""
        d1, d2 = self.deriv, other.deriv
        if d1 is None:
            deriv = d2 if c == 1 or d2 is None else SuperDerivation(lambda g: d2(SuperPoly.gen(g)).scale(c))
        elif d2 is None:
            deriv = d1
        else:
            deriv = SuperDerivation(lambda g: d1(SuperPoly.gen(g)) + d2(SuperPoly.gen(g)).scale(c))
        return DerivMult(name or f"{self.name}+{other.name}", deriv, self.mult + other.mult.scale(c))


class FuncOp(DescOperator):
    def __init__(self, name: str, fn: Callable[[SuperPoly], SuperPoly]):
        self.name = name
        self.fn = fn

    def __call__(self, D: SuperPoly) -> SuperPoly:
        return self.fn(D)


class Operators:
    """Factory for all operator variants on one holomorphic algebra."""

    def __init__(self, alg: DescAlgebra):
        self.alg = alg.holomorphic()
        self.geom = alg.geometry
        self._kunneth_td = diagonal_kunneth(self.geom, self.geom.todd)
        self._kunneth_1 = diagonal_kunneth(self.geom)
        self._cache: Dict[tuple, DescOperator] = {}

    def _memo(self, key, build):
        op = self._cache.get(key)
        if op is None:
            op = self._cache[key] = build()
        return op

    # derivations --------------------------------------------------------
    def R(self, k: int) -> DerivMult:
        def build():
            alg = self.alg

            def act(g: Gen) -> Optional[SuperPoly]:
                if g.fam != HOL:
                    return None
                i = g.idx
                if i + k < 0:
                    return None
                c = _falling(i, k)
                if not c:
                    return None
                return SuperPoly.gen(alg.hol_gen(i + k, g.basis, g.side), c)

            return DerivMult(f"R({k})", SuperDerivation(act, 0, 2 * k))

        return self._memo(("R", k), build)

    def R_twisted(self, gamma: CohClass) -> SuperDerivation:
        """R_{-1}[gamma]: ch^H_i(g') -> ch^H_{i-1}(gamma g'), a superderivation of parity |gamma|."""
        geom, alg = self.geom, self.alg
        parity = geom.class_parity(gamma)

        def act(g: Gen) -> Optional[SuperPoly]:
            if g.fam != HOL or g.idx == 0:
                return None
            return alg.chH(g.idx - 1, geom.cup(gamma, geom.cls(g.basis)), g.side)

        return SuperDerivation(act, parity)

    # multiplication elements -------------------------------------------
    def T_element(self, k: int) -> SuperPoly:
        geom, alg = self.geom, self.alg
        out = SuperPoly.zero()
        if k < 0:
            return out
        for i in range(k + 1):
            j = k - i
            c = factorial(i) * factorial(j)
            for kp in self._kunneth_td:
                sign = -1 if (geom.dimension - kp.p) % 2 else 1
                if alg.is_pair:
                    left = alg.chH(i, kp.left, 2) - alg.chH(i, kp.left, 1)
                    right = alg.chH(j, kp.right, 2)
                else:
                    left = alg.chH(i, kp.left)
                    right = alg.chH(j, kp.right)
                out = out + (left * right).scale(sign * c)
        return out

    def TV_element(self, k: int, V: CohClass) -> SuperPoly:
        geom = self.geom
        if self.alg.is_pair:
            raise ValueError("T_V lives on the single algebra")
        corr = geom.cup(geom.dual_class(V), geom.todd)
        return self.T_element(k) - self.alg.chH(k, corr).scale(factorial(k) if k >= 0 else 0)

    def T(self, k: int) -> DerivMult:
        return self._memo(("T", k), lambda: DerivMult(f"T({k})", None, self.T_element(k)))

    def L(self, k: int) -> DerivMult:
        """L_k = R_k + T_k (pair algebras get R^pa + T^pa)."""
        return self._memo(("L", k), lambda: DerivMult(f"L({k})", self.R(k).deriv, self.T_element(k)))

    def L_V(self, k: int, V: CohClass) -> DerivMult:
        return DerivMult(f"L_V({k})", self.R(k).deriv, self.TV_element(k, V))

    # delta-normalized pieces -------------------------------------------
    def S_delta(self, k: int, delta: CohClass, r) -> FuncOp:
        r = Fraction(r)
        if r == 0:
            raise ValueError("δ-normalization undefined: ∫δ·ch(α) = 0")
        c = -Fraction(factorial(k + 1)) / r
        F = self.alg.chH(k + 1, delta)
        R1 = self.R(-1)
        # multiply first, then derive
        return FuncOp(f"S_delta({k})", lambda D: R1(F * D).scale(c))

    def L_delta(self, k: int, delta: CohClass, r) -> FuncOp:
        S = self.S_delta(k, delta, r)
        L = self.L(k)
        return FuncOp(f"L_delta({k})", lambda D: L(D) + S(D))

    def S_fixed(self, k: int, only_unit: bool = False) -> FuncOp:
        """(k+1)! sum over Kunneth terms of Delta_*1 with p^L = 0 of R_{-1}[left] o ch^H_{k+1}(right)."""
        geom, alg = self.geom, self.alg
        terms = []
        for kp in self._kunneth_1:
            if kp.p != 0:
                continue
            if only_unit and kp.left != geom.one():
                continue
            terms.append((self.R_twisted(kp.left), alg.chH(k + 1, kp.right)))
        c = factorial(k + 1)

        def fn(D: SuperPoly) -> SuperPoly:
            out = SuperPoly.zero()
            for d, m in terms:
                out = out + d(m * D)
            return out.scale(c)

        return FuncOp(f"S_fixed({k})", fn)

    def L_fixed(self, k: int, r) -> FuncOp:
        r = Fraction(r)
        if r == 0:
            raise ValueError("rank must be nonzero")
        S = self.S_fixed(k)
        L = self.L(k)
        return FuncOp(f"L_fixed({k})", lambda D: L(D) - S(D).scale(1 / r))

    # weight zero ----------------------------------------------------------
    def L_wt0(self, normalized: Optional[Tuple[CohClass, Fraction]] = None) -> FuncOp:
        R1 = self.R(-1)

        def fn(D: SuperPoly) -> SuperPoly:
            out = SuperPoly.zero()
            cur = D  # R_{-1}^{j+1} D
            j = -1
            while cur:
                L = self.L_delta(j, *normalized) if normalized else self.L(j)
                out = out + L(cur).scale(Fraction((-1) ** (j % 2), factorial(j + 1)))
                cur = R1(cur)
                j += 1
            return out

        return FuncOp("L_wt0" if not normalized else "L_wt0_delta", fn)

    def eta_norm(self, delta: CohClass, r) -> FuncOp:
        """sum_j (-ch^H_1(delta)/r)^j / j! R_{-1}^j."""
        r = Fraction(r)
        if r == 0:
            raise ValueError("δ-normalization undefined: ∫δ·ch(α) = 0")
        x = self.alg.chH(1, delta).scale(-1 / r)
        R1 = self.R(-1)

        def fn(D: SuperPoly) -> SuperPoly:
            out = SuperPoly.zero()
            cur, power, j = D, SuperPoly.one(), 0
            while cur:
                out = out + (power * cur).scale(Fraction(1, factorial(j)))
                cur = R1(cur)
                power = power * x
                j += 1
            return out

        return FuncOp("eta_norm", fn)

    # homomorphisms --------------------------------------------------------
    def F_twist(self, H: CohClass) -> FuncOp:
        geom, alg = self.geom, self.alg
        eH = geom.exp(H)

        def image(g: Gen) -> SuperPoly:
            if g.fam != HOL:
                return SuperPoly.gen(g)
            return alg.chH(g.idx, geom.cup(eH, geom.cls(g.basis)), g.side)

        return FuncOp("F_twist", lambda D: D.substitute(image))

    def E_twist(self, c: Union[int, Fraction, SuperPoly]) -> FuncOp:
        """exp(c R_{-1}) as an algebra map; c may be a scalar or the formal ZETA."""
        alg = self.alg
        cpoly = c if isinstance(c, SuperPoly) else SuperPoly.const(c)

        def image(g: Gen) -> SuperPoly:
            if g.fam != HOL:
                return SuperPoly.gen(g)
            out = SuperPoly.zero()
            power = SuperPoly.one()
            for n in range(g.idx + 1):
                out = out + (power * SuperPoly.gen(alg.hol_gen(g.idx - n, g.basis, g.side))).scale(
                    Fraction(1, factorial(n))
                )
                power = power * cpoly
            return out

        return FuncOp("E_twist", lambda D: D.substitute(image))

    def xi_V(self, V: CohClass) -> FuncOp:
        """Pair algebra -> single algebra: V-side ch^H_i -> delta_{i0} int gamma ch(V)."""
        geom = self.geom
        single = DescAlgebra(geom, "full")

        def image(g: Gen) -> SuperPoly:
            if g.fam != HOL:
                return SuperPoly.gen(g)
            if g.side == 1:
                if g.idx:
                    return SuperPoly.zero()
                return SuperPoly.const(geom.cup_and_integrate(geom.cls(g.basis), V))
            return SuperPoly.gen(single.hol_gen(g.idx, g.basis, 0))

        return FuncOp("xi_V", lambda D: D.substitute(image))


def T_vir_element(alg: DescAlgebra, N: int) -> SuperPoly:
    """-sum_{i+j<=N} sum_t (-1)^{i - p^L + dim} ch^H_i(L_t) ch^H_j(R_t) over Delta_* td."""
    geom = alg.geometry
    out = SuperPoly.zero()
    for kp in diagonal_kunneth(geom, geom.todd):
        for i in range(N + 1):
            left = alg.chH(i, kp.left)
            for j in range(N + 1 - i):
                sign = -1 if (i - kp.p + geom.dimension) % 2 else 1
                out = out - (left * alg.chH(j, kp.right)).scale(sign)
    return out


def is_weight0(alg: DescAlgebra, D: SuperPoly) -> bool:
    ops = Operators(alg)
    return not alg.apply(ops.R(-1), D)


def total_index(m) -> int:
    return sum(g.idx for g in m)


# ---------------------------------------------------------------------------
# bracket defects


@dataclass
class Defect:
    probe: SuperPoly
    expected: SuperPoly
    got: SuperPoly


def bracket_defect(
    op1: Callable[[SuperPoly], SuperPoly],
    op2: Callable[[SuperPoly], SuperPoly],
    expected: Optional[Callable[[SuperPoly], SuperPoly]],
    probes: Iterable[SuperPoly],
) -> Tuple[int, Optional[Defect]]:
    """Evaluate op1 op2 - op2 op1 against ``expected`` (zero if None) on every probe.

    Returns (number of probes run, first defect or None).
    """
    n = 0
    for p in probes:
        n += 1
        got = op1(op2(p)) - op2(op1(p))
        want = expected(p) if expected is not None else SuperPoly.zero()
        if got != want:
            return n, Defect(p, want, got)
    return n, None


def operator_defect(
    lhs: Callable[[SuperPoly], SuperPoly], rhs: Callable[[SuperPoly], SuperPoly], probes: Iterable[SuperPoly]
) -> Tuple[int, Optional[Defect]]:
    n = 0
    for p in probes:
        n += 1
        a, b = lhs(p), rhs(p)
        if a != b:
            return n, Defect(p, b, a)
    return n, None


def generator_probes(alg: DescAlgebra, degmax: int) -> List[SuperPoly]:
    """The unit and every generator of degree <= degmax.

    For operators of the form derivation + multiplication this probe set
    determines the operator completely up to the cap.
    """
    return [SuperPoly.one()] + [SuperPoly.gen(g) for g in alg.generators(degmax)]


def product_probes(alg: DescAlgebra, degmax: int, limit: Optional[int] = None) -> List[SuperPoly]:
    """Unit, generators and pairwise products of generators up to ``degmax``."""
    gens = alg.generators(degmax)
    out = generator_probes(alg, degmax)
    for a_i, a in enumerate(gens):
        for b in gens[a_i:]:
            if a.deg + b.deg <= degmax:
                p = SuperPoly.gen(a) * SuperPoly.gen(b)
                if p:
                    out.append(p)
    if limit is not None:
        out = out[:limit]
    return out
