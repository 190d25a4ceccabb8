"""Pairing between pair descendents and lattice states, and the adjointness check."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .descendent import DescAlgebra, DerivMult, Operators
from .geometry import CohClass, mat_inverse
from .superalgebra import LAT, TOP, Gen, SuperDerivation, SuperPoly, add_into
from .voa import Key, LatticeVA, Sector, VAState

ZERO = Fraction(0)
ONE = Fraction(1)


class DualityError(ValueError):
    pass


@dataclass
class Counterexample:
    n: int
    descendent: str
    state: str
    lhs: Fraction
    rhs: Fraction


class PairingContext:
    """A pair descendent algebra at a fixed sector together with the pair lattice VA."""

    def __init__(self, va: LatticeVA, sector: Sequence[int]):
        if not va.pair:
            raise DualityError("duality needs the pair lattice")
        self.va = va
        self.geometry = g = va.geometry
        self.sector: Sector = tuple(sector)
        vec = va.sector_vector(self.sector)
        n = g.n
        self.alpha_pa = (CohClass(tuple(vec[:n])), CohClass(tuple(vec[n:])))
        self.alg = DescAlgebra(g, "pair_at_alpha", self.alpha_pa)
        self.ops = Operators(self.alg)
        self._cap_cache: Dict[Gen, SuperDerivation] = {}
        self._norm_cache: Dict[tuple, Fraction] = {}
        self._sub_cache: Dict[Gen, SuperPoly] = {}
        self._dual_cache: Dict[Gen, SuperPoly] = {}
        self._gram = [[g.cup_and_integrate(g.cls(a), g.cls(b)) for b in range(n)] for a in range(n)]

    # pairing on generators -------------------------------------------------
    def gen_pairing(self, x: Gen, w: Gen) -> Fraction:
        """<ch_k(b), w_{-j}> = delta_{sides} delta_{kj} int(b w) / (k-1)!."""
        g = self.geometry
        if x.fam != TOP or w.fam != LAT or x.idx != w.idx:
            return ZERO
        side = w.basis // g.n
        if x.side != side + 1:
            return ZERO
        return self._gram[x.basis][w.basis % g.n] / factorial(x.idx - 1)

    def cap_derivation(self, x: Gen) -> SuperDerivation:
        d = self._cap_cache.get(x)
        if d is None:

            def act(w: Gen, x=x):
                c = self.gen_pairing(x, w)
                return SuperPoly.const(c) if c else None

            d = self._cap_cache[x] = SuperDerivation(act, x.deg & 1)
        return d

    def cap(self, D: SuperPoly, u: VAState) -> VAState:
        """D cap u, with (mu nu) cap u = mu cap (nu cap u)."""
        out: Dict[Key, Fraction] = {}
        for sec, m in u.terms:
            if sec != self.sector:
                raise DualityError("state outside the context sector")
        for mono, c in D.terms.items():
            cur = {m: a for (_, m), a in u.terms.items()}
            for x in reversed(mono):
                if x.fam != TOP:
                    raise DualityError("cap needs at-alpha descendents")
                cur = self.cap_derivation(x).apply_terms(cur)
                if not cur:
                    break
            for m, a in cur.items():
                add_into(out, {(self.sector, m): a * c})
        return VAState._raw(out)

    def pair(self, D: SuperPoly, u: VAState) -> Fraction:
        r = self.cap(D, u)
        return r.terms.get((self.sector, ()), ZERO)

    # dual coordinates ---------------------------------------------------------
    def _sub(self, w: Gen) -> SuperPoly:
        """w_{-k} in terms of the dual basis of descendent generators."""
        r = self._sub_cache.get(w)
        if r is None:
            g = self.geometry
            side = w.basis // g.n + 1
            out = SuperPoly.zero()
            for b in range(g.n):
                x = self.alg.top_gen(w.idx, b, side)
                c = self.gen_pairing(x, w)
                if c:
                    out = out + SuperPoly.gen(x, c)
            r = self._sub_cache[w] = out
        return r

    def dual_coords(self, u: VAState) -> Dict[Tuple[Gen, ...], Fraction]:
        """phi(u): <D, u> = sum_m D_m phi(u)_m for every descendent D."""
        poly = SuperPoly._raw({m: c for (sec, m), c in u.terms.items() if sec == self.sector})
        sub = poly.substitute(self._sub)
        out = {}
        for m, c in sub.terms.items():
            out[m] = c * self._norm(m)
        return out

    def _norm(self, m: Tuple[Gen, ...]) -> Fraction:
        """<m, m*> for the dual monomial m* (computed through the cap product)."""
        r = self._norm_cache.get(m)
        if r is None:
            r = ONE
            if m:
                # m* as a Fock polynomial
                fock = SuperPoly.one()
                for x in m:
                    fock = fock * self._dual_gen(x)
                dual = VAState._raw({(self.sector, mm): c for mm, c in fock.terms.items()})
                r = self.pair(SuperPoly._raw({m: ONE}), dual)
            self._norm_cache[m] = r
        return r

    def _dual_gen(self, x: Gen) -> SuperPoly:
        """Fock element x* with <y, x*> = delta_{xy} on generators."""
        r = self._dual_cache.get(x)
        if r is not None:
            return r
        g = self.geometry
        base = (x.side - 1) * g.n
        ws = [self.va.gen(base + w, x.idx) for w in range(g.n)]
        xs = [self.alg.top_gen(x.idx, b, x.side) for b in range(g.n)]
        A = [[self.gen_pairing(xb, w) for w in ws] for xb in xs]
        C = mat_inverse(A)
        out = SuperPoly.zero()
        for wi, w in enumerate(ws):
            c = C[wi][x.basis]
            if c:
                out = out + SuperPoly.gen(w, c)
        self._dual_cache[x] = out
        return out

    # adjointness --------------------------------------------------------------
    def descendent_basis(self, d: int) -> List[SuperPoly]:
        return self.alg.monomials(d) if d >= 0 else []

    def state_basis(self, d: int) -> List[Key]:
        return self.va.monomials_of_degree(self.sector, d + int(self.va.Q_sector(self.sector, self.sector)))

    def adjoint_defect(
        self,
        n: int,
        degmax: int,
        desc_op: Optional[Callable[[SuperPoly], SuperPoly]] = None,
        state_op: Optional[Callable[[VAState], VAState]] = None,
    ) -> Tuple[int, Optional[Counterexample]]:
        """Compare <L_n D, u> with <D, L_n u> on all basis pairs of degree <= degmax."""
        if desc_op is None:
            L = self.ops.L(n)
            desc_op = lambda D: self.alg.apply(L, D)  # noqa: E731
        if state_op is None:
            state_op = lambda u: self.va.virasoro(n, u)  # noqa: E731
        return self._defect(n, degmax, 2 * n, desc_op, state_op)

    def translation_defect(self, degmax: int) -> Tuple[int, Optional[Counterexample]]:
        R = self.ops.R(-1)
        return self._defect(-1, degmax, -2, lambda D: self.alg.apply(R, D), self.va.translate)

    def _defect(self, n, degmax, shift, desc_op, state_op) -> Tuple[int, Optional[Counterexample]]:
        cases = 0
        for d in range(0, degmax + 1):
            du = d + shift
            if du < 0 or du > degmax:
                continue
            Ds = self.descendent_basis(d)
            us = self.state_basis(du)
            if not Ds or not us:
                continue
            # reverse index m -> [(D index, coeff)] over images of desc_op
            rev: Dict[Tuple[Gen, ...], List[Tuple[int, Fraction]]] = {}
            Dkeys = {}
            for i, D in enumerate(Ds):
                (m0,) = D.terms.keys()
                Dkeys[m0] = i
                for m, c in desc_op(D).terms.items():
                    rev.setdefault(m, []).append((i, c))
            for key in us:
                u = VAState._raw({key: ONE})
                lhs: Dict[int, Fraction] = {}
                for m, c in self.dual_coords(u).items():
                    for i, a in rev.get(m, ()):
                        lhs[i] = lhs.get(i, ZERO) + a * c
                rhs: Dict[int, Fraction] = {}
                for m, c in self.dual_coords(state_op(u)).items():
                    i = Dkeys.get(m)
                    if i is None:
                        raise DualityError("image outside the enumerated component")
                    rhs[i] = rhs.get(i, ZERO) + c
                cases += len(Ds)
                for i in set(lhs) | set(rhs):
                    a, b = lhs.get(i, ZERO), rhs.get(i, ZERO)
                    if a != b:
                        return cases, Counterexample(
                            n, self.alg.render(Ds[i]), self.va.render(u), a, b
                        )
        return cases, None

    def perturbed_L(self, n: int, term: Tuple[Gen, ...], delta=1) -> Callable[[SuperPoly], SuperPoly]:
        """L_n with one coefficient of the multiplication element shifted by ``delta``."""
        base = self.ops.L(n)
        T = base.mult + SuperPoly._raw({term: Fraction(delta)})
        op = DerivMult(f"L'({n})", base.deriv, T)
        return lambda D: self.alg.apply(op, D)

    def effective_T_terms(self, n: int) -> List[Tuple[Gen, ...]]:
        """Monomials of the T^pa element whose image under p_alpha is nonzero."""
        T = self.ops.T_element(n)
        out = []
        for m in T.terms:
            if self.alg.project(SuperPoly._raw({m: ONE})):
                out.append(m)
        return out
