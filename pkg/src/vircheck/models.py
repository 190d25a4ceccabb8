"""Closed-form models: symmetric powers of curves and rank-2 Thaddeus integrals."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb, factorial
from typing import Dict, Iterator, List, Optional, Tuple

from .geometry import TargetGeometry, curve
from .superalgebra import FORMAL, HOL, Gen, SuperDerivation, SuperPoly, canonicalize

# ---------------------------------------------------------------------------
# symmetric powers


class SymPowerRing:
    """The reduced ring C[eta, ch^H_0(e_j), ch^H_1(f_j)] for C^n, C a genus-g curve."""

    def __init__(self, g: int, n: int):
        if g < 0 or n < 1:
            raise ValueError("need g >= 0 and n >= 1")
        self.g, self.n = g, n
        self.geometry: TargetGeometry = curve(g)
        geo = self.geometry
        self.e_idx = [geo.index(f"e{j}") for j in range(1, g + 1)]
        self.f_idx = [geo.index(f"f{j}") for j in range(1, g + 1)]
        self.eta_gen = Gen(FORMAL, 0, 0, 0, 2)
        self.e_gens = [Gen(HOL, 0, 0, b, 1) for b in self.e_idx]
        self.f_gens = [Gen(HOL, 0, 1, b, 1) for b in self.f_idx]

    @property
    def eta(self) -> SuperPoly:
        return SuperPoly.gen(self.eta_gen)

    def e(self, j: int) -> SuperPoly:
        return SuperPoly.gen(self.e_gens[j - 1])

    def f(self, j: int) -> SuperPoly:
        return SuperPoly.gen(self.f_gens[j - 1])

    @property
    def theta(self) -> SuperPoly:
        out = SuperPoly.zero()
        for j in range(1, self.g + 1):
            out = out + self.f(j) * self.e(j)
        return out

    def eta_pow(self, k: int) -> SuperPoly:
        return self.eta ** k if k >= 0 else SuperPoly.zero()

    # realization -----------------------------------------------------------
    def realize(self, D: SuperPoly) -> SuperPoly:
        """Algebra map from descendents of the curve to the reduced ring."""
        geo = self.geometry
        pt, one = geo.index("pt"), geo.index("1")

        def image(x: Gen) -> SuperPoly:
            if x.fam != HOL:
                raise ValueError("realize expects holomorphic descendents")
            k, b = x.idx, x.basis
            ek = self.eta_pow(k).scale(Fraction(1, factorial(k)))
            if b == pt:
                return ek
            if b == one:
                out = ek.scale(self.n)
                if k >= 1:
                    out = out - (self.theta * self.eta_pow(k - 1)).scale(Fraction(1, factorial(k - 1)))
                return out
            if b in self.e_idx:
                return SuperPoly.gen(Gen(HOL, 0, 0, b, 1)) * ek
            if b in self.f_idx:
                if k == 0:
                    return SuperPoly.zero()
                return SuperPoly.gen(Gen(HOL, 0, 1, b, 1)) * self.eta_pow(k - 1).scale(Fraction(1, factorial(k - 1)))
            raise ValueError("unknown basis class")

        return D.substitute(image)

    # integration -------------------------------------------------------------
    def integrate(self, x: SuperPoly) -> Fraction:
        """Integral over C^n via the pairing pattern of eta and the odd generators."""
        total = Fraction(0)
        for m, c in x.terms.items():
            total += c * self._integrate_mono(m)
        return total

    def _integrate_mono(self, m: Tuple[Gen, ...]) -> Fraction:
        ell = sum(1 for x in m if x == self.eta_gen)
        es = sorted(x.basis for x in m if x.fam == HOL and x.idx == 0)
        fs = sorted(x.basis for x in m if x.fam == HOL and x.idx == 1)
        ejs = [self.e_idx.index(b) for b in es]
        fjs = [self.f_idx.index(b) for b in fs]
        if ejs != fjs or ell + len(ejs) != self.n:
            return Fraction(0)
        inter: List[Gen] = []
        for j in ejs:
            inter += [self.f_gens[j], self.e_gens[j]]
        inter += [self.eta_gen] * ell
        sign, canon = canonicalize(inter)
        if canon != m:
            raise AssertionError("canonical order mismatch")
        return Fraction(sign * factorial(self.n))

    # operators ---------------------------------------------------------------
    def R(self, k: int) -> SuperDerivation:
        def act(x: Gen):
            if x == self.eta_gen:
                return self.eta_pow(k + 1)
            if x.fam == HOL and x.idx == 1:
                return (SuperPoly.gen(x) * self.eta_pow(k)).scale(k + 1)
            return None

        return SuperDerivation(act, 0, 2 * k)

    def T(self, k: int) -> SuperPoly:
        out = self.eta_pow(k).scale((1 - self.g) * k - self.n)
        if k >= 1:
            out = out + (self.theta * self.eta_pow(k - 1)).scale(k)
        return out

    def L(self, k: int, D: SuperPoly) -> SuperPoly:
        return self.R(k)(D) + self.T(k) * D

    def monomials(self, degmax: Optional[int] = None) -> Iterator[SuperPoly]:
        """All monomials eta^l prod f^a e^b of degree <= degmax (default 2n)."""
        if degmax is None:
            degmax = 2 * self.n
        odd = self.f_gens + self.e_gens
        for r in range(len(odd) + 1):
            for sub in combinations(odd, r):
                base = SuperPoly.monomial(sub)
                for ell in range((degmax - r) // 2 + 1):
                    yield base * self.eta_pow(ell)


class BruteForceSym:
    """Independent integral over C^n = C x ... x C with one copy of H(C) per slot."""

    def __init__(self, g: int, n: int):
        self.g, self.n = g, n

    def _pt(self, i):
        return Gen(FORMAL, i, 0, 0, 2)

    def _e(self, i, j):
        return Gen(FORMAL, i, 1, j, 1)

    def _f(self, i, j):
        return Gen(FORMAL, i, 2, j, 1)

    def eta(self) -> SuperPoly:
        return sum((SuperPoly.gen(self._pt(i)) for i in range(self.n)), SuperPoly.zero())

    def e(self, j) -> SuperPoly:
        return sum((SuperPoly.gen(self._e(i, j)) for i in range(self.n)), SuperPoly.zero())

    def f(self, j) -> SuperPoly:
        return sum((SuperPoly.gen(self._f(i, j)) for i in range(self.n)), SuperPoly.zero())

    def integrate(self, x: SuperPoly) -> Fraction:
        total = Fraction(0)
        for m, c in x.terms.items():
            val = Fraction(1)
            for i in range(self.n):
                slot = [y for y in m if y.side == i]
                if len(slot) == 1 and slot[0].idx == 0:
                    continue
                # canonical order puts e before f: int(e_j f_k) = -delta
                if len(slot) == 2 and slot[0].idx == 1 and slot[1].idx == 2 and slot[0].basis == slot[1].basis:
                    val = -val
                    continue
                val = Fraction(0)
                break
            total += c * val
        return total

    def lift(self, ring: SymPowerRing, x: SuperPoly) -> SuperPoly:
        """Substitute the reduced generators by their sums over slots."""

        def image(y: Gen) -> SuperPoly:
            if y == ring.eta_gen:
                return self.eta()
            if y.idx == 0:
                return self.e(ring.e_idx.index(y.basis) + 1)
            return self.f(ring.f_idx.index(y.basis) + 1)

        return x.substitute(image)


# ---------------------------------------------------------------------------
# Thaddeus integrals


@lru_cache(maxsize=None)
def bernoulli(q: int) -> Fraction:
    """Bernoulli number B_q with B_1 = -1/2, from sum_{i<=q} C(q+1, i) B_i = 0."""
    if q < 0:
        raise ValueError("q must be >= 0")
    if q == 0:
        return Fraction(1)
    if q > 1 and q % 2:
        return Fraction(0)
    s = sum(comb(q + 1, i) * bernoulli(i) for i in range(q))
    return -s / (q + 1)


def _inv_factorial(x: int) -> Fraction:
    return Fraction(1, factorial(x)) if x >= 0 else Fraction(0)


def thaddeus_integral(g: int, m: int, k: int, p: int, drop_factor: bool = False) -> Fraction:
    """Integral of eta^m theta^k zeta^p on the rank-2 odd-degree moduli of a genus-g curve.

    ``drop_factor`` removes the (2^q - 2) factor; only used as a mutation control.
    """
    if min(m, k, p) < 0:
        raise ValueError("exponents must be nonnegative")
    if m + 2 * k + 3 * p != 3 * g - 3:
        return Fraction(0)
    q = m + p - g + 1
    if q < 0 or p > g:
        return Fraction(0)
    sign = -1 if (g - 1 - p) % 2 else 1
    val = Fraction(sign * factorial(m) * factorial(g)) * _inv_factorial(q) * _inv_factorial(g - p)
    val *= Fraction(2) ** (2 * g - 2 - p)
    if not drop_factor:
        val *= 2 ** q - 2
    return val * bernoulli(q)


def thaddeus_triples(g: int) -> List[Tuple[int, int, int]]:
    out = []
    for p in range(0, g + 1):
        for k in range(0, (3 * g - 3 - 3 * p) // 2 + 1):
            m = 3 * g - 3 - 2 * k - 3 * p
            if m >= 0:
                out.append((m, k, p))
    return out


def thaddeus_table(g: int) -> List[Dict[str, object]]:
    rows = []
    for m, k, p in thaddeus_triples(g):
        rows.append({"m": m, "k": k, "p": p, "q": m + p - g + 1, "value": thaddeus_integral(g, m, k, p)})
    return rows
