"""Lattice vertex algebras with super lattices, conformal element and Virasoro modes."""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple

from .geometry import (
    CohClass,
    GeometryError,
    TargetGeometry,
    chi,
    chi_pa,
    chi_pa_sym,
    chi_sym,
    mat_det,
    mat_inverse,
    sst_generators,
)
from .superalgebra import LAT, Eliminator, Gen, SuperDerivation, SuperPoly, add_into, mono_mul

Sector = Tuple[int, ...]
Key = Tuple[Sector, Tuple[Gen, ...]]

ZERO = Fraction(0)
ONE = Fraction(1)


class VAError(ValueError):
    pass


def gbinom(x: int, k: int) -> Fraction:
    """Generalized binomial coefficient C(x, k) for integer x and k >= 0."""
    if k < 0:
        return ZERO
    num = 1
    for t in range(k):
        num *= x - t
    return Fraction(num, factorial(k))


class VAState:
    """Finite sum of terms c * e^alpha (x) monomial."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Dict[Key, Fraction]] = None):
        self.terms: Dict[Key, Fraction] = {}
        if terms:
            for k, c in terms.items():
                c = Fraction(c)
                if c:
                    self.terms[k] = c

    @classmethod
    def _raw(cls, terms: Dict[Key, Fraction]) -> "VAState":
        s = cls.__new__(cls)
        s.terms = terms
        return s

    @classmethod
    def zero(cls) -> "VAState":
        return cls._raw({})

    @classmethod
    def basis(cls, sector: Sequence[int], mono: Tuple[Gen, ...] = (), c=1) -> "VAState":
        return cls({(tuple(sector), mono): Fraction(c)})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, VAState):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "VAState") -> "VAState":
        out = dict(self.terms)
        add_into(out, other.terms)
        return VAState._raw(out)

    def __sub__(self, other: "VAState") -> "VAState":
        out = dict(self.terms)
        add_into(out, other.terms, -1)
        return VAState._raw(out)

    def __neg__(self) -> "VAState":
        return VAState._raw({k: -c for k, c in self.terms.items()})

    def scale(self, c) -> "VAState":
        c = Fraction(c)
        if not c:
            return VAState.zero()
        return VAState._raw({k: v * c for k, v in self.terms.items()})

    def sectors(self) -> set:
        return {s for s, _ in self.terms}

    def sector_part(self, sector: Sector) -> "VAState":
        return VAState._raw({k: c for k, c in self.terms.items() if k[0] == tuple(sector)})

    def items(self):
        return self.terms.items()

    def __repr__(self) -> str:
        return f"VAState({len(self.terms)} terms)"


class LatticeVA:
    """The lattice vertex algebra C[Lambda_sst] (x) SSym[Lambda t^{-1}] for a target geometry.

    ``pair=True`` uses the doubled lattice with the pair pairing; the single
    lattice uses the symmetrized Euler pairing.  Conformal data is attached
    when the pairing is nondegenerate.
    """

    def __init__(self, geometry: TargetGeometry, pair: bool = True):
        self.geometry = geometry
        self.pair = pair
        g = geometry
        n = g.n
        self.rank = 2 * n if pair else n
        self.names = [f"{'VF'[s]}.{g.names[b]}" for s in range(2) for b in range(n)] if pair else list(g.names)
        self.parity = [g.parity(l % n) for l in range(self.rank)]
        self.hodge = [g.hodge[l % n] for l in range(self.rank)]
        vecs = [self._basis_class(l) for l in range(self.rank)]
        Qf, qf = (chi_pa_sym, chi_pa) if pair else (chi_sym, chi)
        self.Q = [[Qf(g, a, b) for b in vecs] for a in vecs]
        self.q = [[qf(g, a, b) for b in vecs] for a in vecs]
        # odd basis types: 1 = I (q = p + 1), 2 = I-hat (p = q + 1)
        self.otype = []
        for l in range(self.rank):
            p, qq = self.hodge[l]
            if not self.parity[l]:
                self.otype.append(0)
            elif qq == p + 1:
                self.otype.append(1)
            elif p == qq + 1:
                self.otype.append(2)
            else:
                raise GeometryError("odd class outside the isotropic splitting range")
        # sector generators in lattice coordinates
        sst = sst_generators(g)
        if pair:
            self.sst = [self._pair_coords(s, c) for s in range(2) for c in sst]
            self.sst_names = [f"{'VF'[s]}{i}" for s in range(2) for i in range(len(sst))]
        else:
            self.sst = [tuple(c.coeffs) for c in sst]
            self.sst_names = [str(i) for i in range(len(sst))]
        self.m = len(self.sst)
        self._Qs_memo: Dict[Tuple[Sector, Sector], Fraction] = {}
        self.QS = [[self._Qvec(self._unit(l), s) for s in self.sst] for l in range(self.rank)]
        self.QSS = [[self._Qvec(a, b) for b in self.sst] for a in self.sst]
        self.qSS = [[self._qvec(a, b) for b in self.sst] for a in self.sst]
        for row in self.qSS:
            for x in row:
                if x.denominator != 1:
                    raise VAError("q is not integral on Lambda_sst generators")
        self._deriv_cache: Dict[Tuple[int, int], SuperDerivation] = {}
        self._mode_memo: Dict[tuple, Dict[Key, Fraction]] = {}
        self._E_memo: Dict[Tuple[Sector, int], Dict] = {}
        self._vir_memo: Dict[Tuple[int, Key], Dict[Key, Fraction]] = {}
        self._Q_support = [[l for l in range(self.rank) if self.Q[l][b]] for b in range(self.rank)]
        self._T_deriv = SuperDerivation(lambda g: SuperPoly.gen(self.gen(g.basis, g.idx + 1), g.idx), 0)
        self._setup_conformal()

    # lattice helpers ----------------------------------------------------
    def _basis_class(self, l: int):
        n = self.geometry.n
        c = CohClass.basis(n, l % n)
        if not self.pair:
            return c
        z = CohClass.zero(n)
        return (c, z) if l < n else (z, c)

    def _pair_coords(self, side: int, c: CohClass) -> Tuple[Fraction, ...]:
        n = self.geometry.n
        out = [ZERO] * (2 * n)
        for b, a in c.items():
            out[side * n + b] = a
        return tuple(out)

    def _unit(self, l: int) -> Tuple[Fraction, ...]:
        out = [ZERO] * self.rank
        out[l] = ONE
        return tuple(out)

    def _Qvec(self, a, b) -> Fraction:
        return sum((a[i] * self.Q[i][j] * b[j] for i in range(self.rank) if a[i] for j in range(self.rank) if b[j]), ZERO)

    def _qvec(self, a, b) -> Fraction:
        return sum((a[i] * self.q[i][j] * b[j] for i in range(self.rank) if a[i] for j in range(self.rank) if b[j]), ZERO)

    def index(self, name: str) -> int:
        return self.names.index(name)

    def sector_vector(self, sector: Sector) -> Tuple[Fraction, ...]:
        out = [ZERO] * self.rank
        for a, s in zip(sector, self.sst):
            if a:
                for i, x in enumerate(s):
                    out[i] += a * x
        return tuple(out)

    def Q_sector(self, a: Sector, b: Sector) -> Fraction:
        key = (a, b)
        r = self._Qs_memo.get(key)
        if r is None:
            r = self._Qs_memo[key] = self._Q_sector(a, b)
        return r

    def _Q_sector(self, a: Sector, b: Sector) -> Fraction:
        return sum((x * self.QSS[i][j] * y for i, x in enumerate(a) if x for j, y in enumerate(b) if y), ZERO)

    def q_sector(self, a: Sector, b: Sector) -> Fraction:
        return sum((x * self.qSS[i][j] * y for i, x in enumerate(a) if x for j, y in enumerate(b) if y), ZERO)

    def Q_basis_sector(self, l: int, sector: Sector) -> Fraction:
        row = self.QS[l]
        return sum((row[i] * a for i, a in enumerate(sector) if a), ZERO)

    def zero_sector(self) -> Sector:
        return (0,) * self.m

    def gen(self, l: int, k: int) -> Gen:
        """The Fock generator v_{-k} for lattice basis vector l."""
        if k < 1:
            raise VAError("Fock generators need k >= 1")
        return Gen(LAT, 0, k, l, 2 * k - self.parity[l])

    def vacuum(self) -> VAState:
        return VAState.basis(self.zero_sector())

    def state(self, sector: Optional[Sequence[int]] = None, gens: Sequence[Tuple[int, int]] = (), c=1) -> VAState:
        """c * e^sector (x) prod v_{-k} for (v, k) in gens, multiplied in the given order."""
        sector = tuple(sector) if sector is not None else self.zero_sector()
        poly = SuperPoly.one()
        for l, k in gens:
            poly = poly * SuperPoly.gen(self.gen(l, k))
        return VAState._raw({(sector, m): Fraction(c) * a for m, a in poly.terms.items()})

    # gradings -------------------------------------------------------------
    def degree(self, key: Key) -> Fraction:
        sector, mono = key
        return sum(g.deg for g in mono) + self.Q_sector(sector, sector)

    def gen_weight(self, g: Gen) -> int:
        return g.idx - 1 if self.otype[g.basis] == 2 else g.idx

    def weight(self, key: Key) -> Fraction:
        sector, mono = key
        return sum(self.gen_weight(g) for g in mono) + self.Q_sector(sector, sector) / 2

    def weights(self, s: VAState) -> set:
        return {self.weight(k) for k in s.terms}

    def parity_of(self, key: Key) -> int:
        return sum(g.deg & 1 for g in key[1]) & 1

    def state_parity(self, s: VAState) -> int:
        ps = {self.parity_of(k) for k in s.terms}
        if len(ps) > 1:
            raise VAError("state of mixed parity")
        return ps.pop() if ps else 0

    # generator modes --------------------------------------------------------
    def _annihilator(self, l: int, k: int) -> SuperDerivation:
        d = self._deriv_cache.get((l, k))
        if d is None:
            Q = self.Q[l]
            if self.parity[l]:

                def act(g: Gen, k=k):
                    if g.idx != k + 1 or not Q[g.basis]:
                        return None
                    return SuperPoly.const(Q[g.basis])

                d = SuperDerivation(act, 1)
            else:

                def act(g: Gen, k=k):
                    if g.idx != k or not Q[g.basis]:
                        return None
                    return SuperPoly.const(k * Q[g.basis])

                d = SuperDerivation(act, 0)
            self._deriv_cache[(l, k)] = d
        return d

    def gen_mode_terms(self, l: int, k: int, terms: Dict[Key, Fraction]) -> Dict[Key, Fraction]:
        """v_(k) for lattice basis vector l on a flat term dict."""
        out: Dict[Key, Fraction] = {}
        if k < 0:
            g = self.gen(l, -k)
            left = (g,)
            for (sec, m), c in terms.items():
                s, mm = mono_mul(left, m)
                if s:
                    add_into(out, {(sec, mm): c if s > 0 else -c})
            return out
        if k == 0 and not self.parity[l]:
            for (sec, m), c in terms.items():
                x = self.Q_basis_sector(l, sec)
                if x:
                    add_into(out, {(sec, m): c * x})
            return out
        d = self._annihilator(l, k)
        for (sec, m), c in terms.items():
            img = d.apply_terms({m: c})
            if img:
                add_into(out, {(sec, mm): a for mm, a in img.items()})
        return out

    def gen_mode(self, l: int, k: int, s: VAState) -> VAState:
        return VAState._raw(self.gen_mode_terms(l, k, s.terms))

    # translation ------------------------------------------------------------
    def translate(self, s: VAState) -> VAState:
        out: Dict[Key, Fraction] = {}
        d = self._T_deriv
        for (sec, m), c in s.terms.items():
            img = d.apply_terms({m: c})
            if img:
                add_into(out, {(sec, mm): a for mm, a in img.items()})
            # e^alpha -> e^alpha (x) alpha_{-1}
            for l, a in enumerate(self.sector_vector(sec)):
                if a:
                    s1, mm = mono_mul((self.gen(l, 1),), m)
                    if s1:
                        add_into(out, {(sec, mm): c * a * s1})
        return VAState._raw(out)

    # field modes -------------------------------------------------------------
    def mode_bound(self, ka: Key, kb: Key) -> Optional[int]:
        """Largest n with a_(n)b possibly nonzero (None when unbounded below is irrelevant)."""
        gamma = tuple(x + y for x, y in zip(ka[0], kb[0]))
        top = self.degree(ka) + self.degree(kb) - 2 - self.Q_sector(gamma, gamma)
        return int((top // 2))

    def mode(self, a: VAState, n: int, b: VAState) -> VAState:
        out: Dict[Key, Fraction] = {}
        for ka, ca in a.terms.items():
            for kb, cb in b.terms.items():
                r = self._mode_key(ka, n, kb)
                if r:
                    add_into(out, r, ca * cb)
        return VAState._raw(out)

    def _mode_on_terms(self, ka: Key, n: int, terms: Dict[Key, Fraction]) -> Dict[Key, Fraction]:
        out: Dict[Key, Fraction] = {}
        for kb, cb in terms.items():
            r = self._mode_key(ka, n, kb)
            if r:
                add_into(out, r, cb)
        return out

    def _mode_key(self, ka: Key, n: int, kb: Key) -> Dict[Key, Fraction]:
        if n > self.mode_bound(ka, kb):
            return {}
        memo_key = (ka, n, kb)
        r = self._mode_memo.get(memo_key)
        if r is not None:
            return r
        alpha, m = ka
        if not m:
            r = self._vertex_mode(alpha, n, kb)
        else:
            r = self._reconstruct(ka, n, kb)
        self._mode_memo[memo_key] = r
        return r

    def _reconstruct(self, ka: Key, n: int, kb: Key) -> Dict[Key, Fraction]:
        alpha, m = ka
        g = m[0]
        rest = (alpha, m[1:])
        l, k = g.basis, g.idx - 1
        out: Dict[Key, Fraction] = {}
        # creation part: j < 0
        M = self.mode_bound(rest, kb)
        j = -1
        while n - j - 1 <= M:
            coef = gbinom(k - j - 1, k)
            if coef:
                inner = self._mode_key(rest, n - j - 1, kb)
                if inner:
                    add_into(out, self.gen_mode_terms(l, j - k, inner), coef)
            j -= 1
        # annihilation part: j >= k
        sign = -1 if (g.deg & 1) and self.parity_of(rest) else 1
        maxidx = max((h.idx for h in kb[1]), default=0)
        for j in range(k, k + maxidx + 1):
            coef = gbinom(k - j - 1, k)
            if not coef:
                continue
            inner = self.gen_mode_terms(l, j - k, {kb: ONE})
            if inner:
                add_into(out, self._mode_on_terms(rest, n - j - 1, inner), coef * sign)
        return out

    def _E_plus(self, alpha: Sector, a: int) -> Dict:
        """Coefficient of z^a in exp(sum_j alpha_{-j} z^j / j), as a monomial dict."""
        key = (alpha, a)
        r = self._E_memo.get(key)
        if r is not None:
            return r
        if a == 0:
            r = {(): ONE}
        else:
            av = self.sector_vector(alpha)
            acc: Dict = {}
            for j in range(1, a + 1):
                prev = self._E_plus(alpha, a - j)
                if not prev:
                    continue
                for l, x in enumerate(av):
                    if not x:
                        continue
                    g = (self.gen(l, j),)
                    for mm, c in prev.items():
                        s, p = mono_mul(g, mm)
                        if s:
                            add_into(acc, {p: c * x * s})
            r = {mm: c / a for mm, c in acc.items() if c}
        self._E_memo[key] = r
        return r

    def _vertex_mode(self, alpha: Sector, n: int, kb: Key) -> Dict[Key, Fraction]:
        """(e^alpha)_(n) (e^beta (x) P)."""
        beta, P = kb
        Qab = self.Q_sector(alpha, beta)
        eps = -1 if self.q_sector(alpha, beta) % 2 else 1
        target = tuple(x + y for x, y in zip(alpha, beta))
        # substitute w_{-k} -> w_{-k} - Q(alpha, w) z^{-k}: dict b -> monomial dict
        layers: Dict[int, Dict] = {0: {(): ONE}}
        for g in P:
            x = ZERO if g.deg & 1 else self.Q_basis_sector(g.basis, alpha)
            new: Dict[int, Dict] = {}
            for b, poly in layers.items():
                tgt = new.setdefault(b, {})
                for mm, c in poly.items():
                    s, p = mono_mul(mm, (g,))
                    if s:
                        add_into(tgt, {p: c * s})
                if x:
                    tgt2 = new.setdefault(b + g.idx, {})
                    add_into(tgt2, {mm: -c * x for mm, c in poly.items()})
            layers = new
        out: Dict[Key, Fraction] = {}
        for b, poly in layers.items():
            a = b - n - 1 - int(Qab)
            if a < 0 or not poly:
                continue
            E = self._E_plus(alpha, a)
            for me, ce in E.items():
                for mp, cp in poly.items():
                    s, p = mono_mul(me, mp)
                    if s:
                        add_into(out, {(target, p): eps * s * ce * cp})
        return out

    # conformal structure ----------------------------------------------------
    def _setup_conformal(self) -> None:
        self.conformal = False
        self.conformal_error: Optional[str] = None
        if mat_det(self.Q) == 0:
            self.conformal_error = "degenerate pairing"
            return
        N = self.rank
        W = [[ZERO] * N for _ in range(N)]
        for a in range(N):
            for b in range(N):
                if self.parity[a] != self.parity[b]:
                    continue
                if not self.parity[a]:
                    W[a][b] = self.Q[a][b]
                elif self.otype[a] == 1 and self.otype[b] == 2:
                    W[a][b] = self.Q[a][b]
                elif self.otype[a] == 2 and self.otype[b] == 1:
                    W[a][b] = -self.Q[a][b]
        self.Qomega = W
        if mat_det(W) == 0:
            self.conformal_error = "degenerate shifted pairing"
            return
        self.Qomega_inv = mat_inverse(W)
        self._pl = self._partners()
        self.conformal = True
        self.omega = self._build_omega()

    def require_conformal(self) -> None:
        if not self.conformal:
            raise VAError(f"no conformal structure: {self.conformal_error}")

    def _build_omega(self) -> VAState:
        """1/2 sum_{even} vhat_{-1} v_{-1} + sum_{v in I} vhat_{-2} v_{-1}."""
        Qinv = mat_inverse(self.Q)
        out = VAState.zero()
        zero = self.zero_sector()
        for v in range(self.rank):
            for w in range(self.rank):
                c = Qinv[w][v]
                if not c:
                    continue
                if not self.parity[v]:
                    out = out + self.state(zero, [(w, 1), (v, 1)], c / 2)
                elif self.otype[v] == 1:
                    out = out + self.state(zero, [(w, 2), (v, 1)], c)
        return out

    def central_charge(self) -> int:
        self.require_conformal()
        return sum(1 for p in self.parity if not p) - sum(1 for p in self.parity if p)

    def shifted_mode_terms(self, l: int, k: int, terms: Dict[Key, Fraction]) -> Dict[Key, Fraction]:
        if self.otype[l] == 2:
            if k == 0:
                return {}
            r = self.gen_mode_terms(l, k - 1, terms)
            return {key: -k * c for key, c in r.items()}
        return self.gen_mode_terms(l, k, terms)

    def _partners(self):
        """Nonzero coefficients of the quadratic form in L_n, as adjacency lists."""
        W = self.Qomega_inv
        left: Dict[int, List[Tuple[int, Fraction]]] = {}
        right: Dict[int, List[Tuple[int, Fraction]]] = {}
        for a in range(self.rank):
            for b in range(self.rank):
                odd = self.parity[a] and self.parity[b]
                c = W[a][b] if odd else W[b][a]
                if c:
                    left.setdefault(a, []).append((b, c / 2))
                    right.setdefault(b, []).append((a, c / 2))
        return left, right

    def _live_annihilators(self, key: Key) -> set:
        """Shifted annihilation modes (l, k >= 0) that can act nontrivially on a term."""
        sec, m = key
        out = set()
        for g in set(m):
            for l in self._Q_support[g.basis]:
                k = g.idx if not self.parity[l] else g.idx - 1
                if self.otype[l] == 2:
                    k += 1
                out.add((l, k))
        if any(sec):
            for l in range(self.rank):
                if not self.parity[l] and self.Q_basis_sector(l, sec):
                    out.add((l, 0))
        return out

    def virasoro(self, n: int, s: VAState) -> VAState:
        """L_n as the normal-ordered quadratic expression in shifted modes.

        Annihilators (index >= 0) stand to the right; only annihilators that
        can act on a term are evaluated.
        """
        self.require_conformal()
        out: Dict[Key, Fraction] = {}
        for key, coef in s.terms.items():
            r = self._vir_memo.get((n, key))
            if r is None:
                r = self._virasoro_term(n, key)
                self._vir_memo[(n, key)] = r
            if r:
                add_into(out, r, coef)
        return VAState._raw(out)

    def _virasoro_term(self, n: int, key: Key) -> Dict[Key, Fraction]:
        left, right = self._pl
        out: Dict[Key, Fraction] = {}
        single = {key: ONE}
        for l, k in self._live_annihilators(key):
            t1 = self.shifted_mode_terms(l, k, single)
            if not t1:
                continue
            # l applied first as the right factor b_(j), j = k >= 0
            for a, c in right.get(l, ()):
                t2 = self.shifted_mode_terms(a, n - k, t1)
                if t2:
                    add_into(out, t2, c)
            # l as the left factor a_(i), i = k >= 0, moved right past a creator b_(j)
            j = n - k
            if j < 0:
                for b, c in left.get(l, ()):
                    t2 = self.shifted_mode_terms(b, j, t1)
                    if t2:
                        add_into(out, t2, -c if self.parity[l] and self.parity[b] else c)
        if n <= -2:
            for i in range(n + 1, 0):
                j = n - i
                for b, lst in right.items():
                    t1 = self.shifted_mode_terms(b, j, single)
                    if not t1:
                        continue
                    for a, c in lst:
                        t2 = self.shifted_mode_terms(a, i, t1)
                        if t2:
                            add_into(out, t2, c)
        return out

    def virasoro_generic(self, n: int, s: VAState) -> VAState:
        """L_n = omega_(n+1) through the general mode machinery."""
        self.require_conformal()
        return self.mode(self.omega, n + 1, s)

    # Lie structure ---------------------------------------------------------
    def lie_bracket(self, a: VAState, b: VAState) -> VAState:
        return self.mode(a, 0, b)

    def min_weight(self, sector: Sector) -> Fraction:
        return self.Q_sector(sector, sector) / 2

    def is_primary(self, s: VAState, n_max: Optional[int] = None) -> Tuple[bool, Dict[str, object]]:
        self.require_conformal()
        ws = self.weights(s)
        report: Dict[str, object] = {"weights": sorted(ws)}
        if n_max is None:
            n_max = 1
            for key in s.terms:
                span = self.weight(key) - self.min_weight(key[0])
                n_max = max(n_max, int(span) + 1)
        report["n_max"] = n_max
        for n in range(1, n_max + 1):
            if self.virasoro(n, s):
                report["failed_at"] = n
                return False, report
        return True, report

    # bases and the translation image ---------------------------------------
    def monomials_of_weight(self, sector: Sector, w) -> List[Key]:
        """Canonical Fock monomials in a sector with conformal weight exactly w."""
        sector = tuple(sector)
        budget = Fraction(w) - self.min_weight(sector)
        if budget < 0 or budget.denominator != 1:
            return []
        budget = int(budget)
        gens = []
        for l in range(self.rank):
            for k in range(1, budget + 3):
                g = self.gen(l, k)
                if self.gen_weight(g) <= budget:
                    gens.append(g)
        gens.sort()
        out: List[Tuple[Gen, ...]] = []

        def rec(start, remaining, acc):
            if remaining == 0:
                # weight-0 odd generators may still be appended
                out.append(tuple(acc))
            for i in range(start, len(gens)):
                g = gens[i]
                wg = self.gen_weight(g)
                if wg > remaining:
                    continue
                acc.append(g)
                rec(i + 1 if g.deg & 1 else i, remaining - wg, acc)
                acc.pop()

        rec(0, budget, [])
        return [(sector, m) for m in sorted(set(out))]

    def monomials_of_degree(self, sector: Sector, d: int) -> List[Key]:
        """Canonical Fock monomials in a sector with Z-degree exactly d."""
        sector = tuple(sector)
        budget = d - self.Q_sector(sector, sector)
        if budget < 0 or budget.denominator != 1:
            return []
        budget = int(budget)
        gens = sorted(self.gen(l, k) for l in range(self.rank) for k in range(1, budget // 2 + 2) if 2 * k - self.parity[l] <= budget)
        out = []

        def rec(start, remaining, acc):
            if remaining == 0:
                out.append(tuple(acc))
                return
            for i in range(start, len(gens)):
                g = gens[i]
                if g.deg > remaining:
                    continue
                acc.append(g)
                rec(i + 1 if g.deg & 1 else i, remaining - g.deg, acc)
                acc.pop()

        rec(0, budget, [])
        return [(sector, m) for m in out]

    def equal_mod_T(self, a: VAState, b: VAState) -> bool:
        diff = a - b
        if not diff:
            return True
        for sec in diff.sectors():
            part = diff.sector_part(sec)
            ws = self.weights(part)
            for w in ws:
                piece = VAState._raw({k: c for k, c in part.terms.items() if self.weight(k) == w})
                el = Eliminator()
                for key in self.monomials_of_weight(sec, w - 1):
                    el.insert(self.translate(VAState._raw({key: ONE})).terms)
                if el.express(piece.terms) is None:
                    return False
        return True

    def primary_lift(self, a: VAState, b: Optional[Sequence[Fraction]] = None) -> VAState:
        """-a_(0)(e^0 (x) b_{-1}) for an even lattice vector b with Q(alpha, b) = 1."""
        secs = a.sectors()
        if len(secs) != 1:
            raise VAError("primary_lift needs a single-sector state")
        alpha = secs.pop()
        if not any(alpha):
            raise VAError("primary_lift needs a non-torsion sector")
        if b is None:
            b = self.find_unit_vector(alpha)
        if self._Qvec(self.sector_vector(alpha), tuple(b)) != 1:
            raise VAError("Q(alpha, b) must be 1")
        bstate = VAState.zero()
        for l, x in enumerate(b):
            if x:
                if self.parity[l]:
                    raise VAError("b must be even")
                bstate = bstate + self.state(None, [(l, 1)], x)
        return -self.mode(a, 0, bstate)

    def find_unit_vector(self, alpha: Sector) -> Tuple[Fraction, ...]:
        av = self.sector_vector(alpha)
        row = [self._Qvec(av, self._unit(l)) for l in range(self.rank)]
        for l, x in enumerate(row):
            if x and not self.parity[l]:
                return tuple(ONE / x if i == l else ZERO for i in range(self.rank))
        raise VAError("no even b with Q(alpha, b) = 1")

    # rendering -------------------------------------------------------------
    def render(self, s: VAState) -> str:
        if not s.terms:
            return "0"
        parts = []
        for (sec, m), c in sorted(s.terms.items()):
            body = f"e[{','.join(str(x) for x in sec)}]"
            for g in m:
                body += f"*v[{self.names[g.basis]},-{g.idx}]"
            parts.append(f"{c}*{body}" if c != 1 else body)
        return " + ".join(parts)


def build_lattice_va(geometry: TargetGeometry, pair: bool = True) -> LatticeVA:
    return LatticeVA(geometry, pair)
