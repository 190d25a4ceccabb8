"""Sparse supercommutative polynomials over exact rationals.

A monomial is a sorted tuple of generators, repeated according to the
exponent.  Odd generators never repeat.  Signs coming from reordering odd
generators are tracked by counting odd-odd transpositions.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, NamedTuple, Optional, Sequence, Tuple

# family tags; the global generator order is lexicographic on
# (family, side, index, basis)
HOL = 0
TOP = 1
LAT = 2
FORMAL = 3

FAMILY_NAMES = {HOL: "chH", TOP: "ch", LAT: "v", FORMAL: "x"}


class Gen(NamedTuple):
    """A generator id.

    ``idx`` is the descendent index i (or the mode number k for lattice
    generators v_{-k}); ``basis`` is a basis position; ``side`` separates the
    two tensor factors of pair algebras (0 when unused).
    """

    fam: int
    side: int
    idx: int
    basis: int
    deg: int

    @property
    def odd(self) -> int:
        return self.deg & 1


Monomial = Tuple[Gen, ...]
Coeff = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def mono_mul(x: Monomial, y: Monomial) -> Tuple[int, Monomial]:
    """Product of two canonical monomials as (sign, monomial); sign 0 means zero."""
    if not x:
        return 1, y
    if not y:
        return 1, x
    nx, ny = len(x), len(y)
    # odd generators of x not yet emitted
    odd_rem = 0
    for a in x:
        odd_rem += a.deg & 1
    out: List[Gen] = []
    flip = 0
    i = j = 0
    while i < nx and j < ny:
        a = x[i]
        b = y[j]
        if a < b:
            out.append(a)
            odd_rem -= a.deg & 1
            i += 1
        elif a == b:
            if a.deg & 1:
                return 0, ()
            out.append(a)
            i += 1
        else:
            out.append(b)
            if b.deg & 1:
                flip ^= odd_rem & 1
            j += 1
    if i < nx:
        out.extend(x[i:])
    if j < ny:
        out.extend(y[j:])
    return (-1 if flip else 1), tuple(out)


def canonicalize(seq: Iterable[Gen]) -> Tuple[int, Monomial]:
    """Sort a product of generators into canonical order, returning (sign, monomial)."""
    lst = list(seq)
    sign = 1
    for i in range(1, len(lst)):
        cur = lst[i]
        j = i - 1
        while j >= 0 and lst[j] > cur:
            if cur.deg & 1 and lst[j].deg & 1:
                sign = -sign
            lst[j + 1] = lst[j]
            j -= 1
        lst[j + 1] = cur
    for a, b in zip(lst, lst[1:]):
        if a == b and a.deg & 1:
            return 0, ()
    return sign, tuple(lst)


def mono_degree(m: Monomial) -> int:
    return sum(g.deg for g in m)


def mono_parity(m: Monomial) -> int:
    p = 0
    for g in m:
        p ^= g.deg & 1
    return p


def _fmt_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def default_namer(g: Gen) -> str:
    base = FAMILY_NAMES.get(g.fam, "g")
    side = f"{g.side}:" if g.side else ""
    return f"{base}[{side}{g.idx}]({g.basis})"


class SuperPoly:
    """Element of a free supercommutative algebra with rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Mapping[Monomial, Fraction]] = None):
        self.terms: Dict[Monomial, Fraction] = {}
        if terms:
            for m, c in terms.items():
                if c:
                    self.terms[m] = Fraction(c)

    # construction -------------------------------------------------------
    @classmethod
    def _raw(cls, terms: Dict[Monomial, Fraction]) -> "SuperPoly":
        p = cls.__new__(cls)
        p.terms = terms
        return p

    @classmethod
    def const(cls, c) -> "SuperPoly":
        c = Fraction(c)
        return cls._raw({(): c} if c else {})

    @classmethod
    def one(cls) -> "SuperPoly":
        return cls._raw({(): ONE})

    @classmethod
    def zero(cls) -> "SuperPoly":
        return cls._raw({})

    @classmethod
    def gen(cls, g: Gen, c=1) -> "SuperPoly":
        c = Fraction(c)
        return cls._raw({(g,): c} if c else {})

    @classmethod
    def monomial(cls, gens: Sequence[Gen], c=1) -> "SuperPoly":
        sign, m = canonicalize(gens)
        if not sign or not c:
            return cls.zero()
        return cls._raw({m: Fraction(c) * sign})

    # arithmetic ---------------------------------------------------------
    def copy(self) -> "SuperPoly":
        return SuperPoly._raw(dict(self.terms))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[Tuple[Monomial, Fraction]]:
        return iter(self.terms.items())

    def items(self):
        return self.terms.items()

    def __eq__(self, other) -> bool:
        if isinstance(other, SuperPoly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == SuperPoly.const(other).terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __neg__(self) -> "SuperPoly":
        return SuperPoly._raw({m: -c for m, c in self.terms.items()})

    def __add__(self, other) -> "SuperPoly":
        if not isinstance(other, SuperPoly):
            other = SuperPoly.const(other)
        out = dict(self.terms)
        add_into(out, other.terms)
        return SuperPoly._raw(out)

    __radd__ = __add__

    def __sub__(self, other) -> "SuperPoly":
        if not isinstance(other, SuperPoly):
            other = SuperPoly.const(other)
        out = dict(self.terms)
        add_into(out, other.terms, -1)
        return SuperPoly._raw(out)

    def __rsub__(self, other) -> "SuperPoly":
        return (-self) + other

    def scale(self, c) -> "SuperPoly":
        c = Fraction(c)
        if not c:
            return SuperPoly.zero()
        return SuperPoly._raw({m: v * c for m, v in self.terms.items()})

    def __mul__(self, other) -> "SuperPoly":
        if isinstance(other, SuperPoly):
            return SuperPoly._raw(poly_mul(self.terms, other.terms))
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other) -> "SuperPoly":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, n: int) -> "SuperPoly":
        out = SuperPoly.one()
        for _ in range(n):
            out = out * self
        return out

    # inspection ---------------------------------------------------------
    def constant_term(self) -> Fraction:
        return self.terms.get((), ZERO)

    def degrees(self) -> set:
        return {mono_degree(m) for m in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def degree(self) -> Optional[int]:
        ds = self.degrees()
        if len(ds) > 1:
            raise ValueError("inhomogeneous element")
        return next(iter(ds)) if ds else None

    def parity(self) -> Optional[int]:
        ps = {mono_parity(m) for m in self.terms}
        if len(ps) > 1:
            raise ValueError("mixed parity element")
        return next(iter(ps)) if ps else None

    def generators(self) -> set:
        return {g for m in self.terms for g in m}

    def homogeneous_part(self, d: int) -> "SuperPoly":
        return SuperPoly._raw({m: c for m, c in self.terms.items() if mono_degree(m) == d})

    def filter(self, pred: Callable[[Monomial], bool]) -> "SuperPoly":
        return SuperPoly._raw({m: c for m, c in self.terms.items() if pred(m)})

    def substitute(self, image: Callable[[Gen], "SuperPoly"]) -> "SuperPoly":
        """Apply the parity-preserving algebra homomorphism determined by ``image``."""
        cache: Dict[Gen, Dict[Monomial, Fraction]] = {}
        out: Dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            acc: Dict[Monomial, Fraction] = {(): c}
            for g in m:
                t = cache.get(g)
                if t is None:
                    t = cache[g] = image(g).terms
                acc = poly_mul(acc, t)
                if not acc:
                    break
            add_into(out, acc)
        return SuperPoly._raw(out)

    def render(self, namer: Callable[[Gen], str] = default_namer) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms):
            c = self.terms[m]
            factors = []
            i = 0
            while i < len(m):
                g = m[i]
                e = 1
                while i + e < len(m) and m[i + e] == g:
                    e += 1
                factors.append(namer(g) + (f"^{e}" if e > 1 else ""))
                i += e
            mag = abs(c)
            if not factors:
                body = _fmt_rational(mag)
            elif mag == 1:
                body = "·".join(factors)
            else:
                body = _fmt_rational(mag) + "·" + "·".join(factors)
            parts.append(("-" if c < 0 else "+", body))
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sg, body in parts[1:]:
            s += f" {sg} {body}"
        return s

    def __repr__(self) -> str:
        return f"SuperPoly({self.render()})"


def add_into(acc: Dict, terms: Mapping, c=1) -> None:
    """acc += c * terms, dropping zeros."""
    if c == 1:
        for m, v in terms.items():
            w = acc.get(m)
            if w is None:
                acc[m] = v
            else:
                w += v
                if w:
                    acc[m] = w
                else:
                    del acc[m]
    else:
        for m, v in terms.items():
            v = v * c
            w = acc.get(m)
            if w is None:
                if v:
                    acc[m] = v
            else:
                w += v
                if w:
                    acc[m] = w
                else:
                    del acc[m]


def poly_mul(x: Mapping[Monomial, Fraction], y: Mapping[Monomial, Fraction]) -> Dict[Monomial, Fraction]:
    out: Dict[Monomial, Fraction] = {}
    for my, cy in y.items():
        # unit coefficients are the common case for probes; skip the Fraction product
        unit = cy == 1
        for mx, cx in x.items():
            s, m = mono_mul(mx, my)
            if not s:
                continue
            v = cx if unit else cx * cy
            if s < 0:
                v = -v
            w = out.get(m)
            if w is None:
                out[m] = v
            else:
                w += v
                if w:
                    out[m] = w
                else:
                    del out[m]
    return out


class SuperDerivation:
    """A superderivation given by its values on generators.

    ``action`` returns the image of a generator (``None`` or zero for
    unlisted generators).  Images are cached per generator.
    """

    def __init__(self, action: Callable[[Gen], Optional[SuperPoly]], parity: int = 0, degree: Optional[int] = None):
        self.action = action
        self.parity = parity & 1
        self.degree = degree
        self._cache: Dict[Gen, Dict[Monomial, Fraction]] = {}

    def on_gen(self, g: Gen) -> Dict[Monomial, Fraction]:
        t = self._cache.get(g)
        if t is None:
            img = self.action(g)
            t = img.terms if img is not None else {}
            self._cache[g] = t
        return t

    def apply_terms(self, terms: Mapping[Monomial, Fraction]) -> Dict[Monomial, Fraction]:
        out: Dict[Monomial, Fraction] = {}
        odd_d = self.parity
        for m, c in terms.items():
            prefix_par = 0
            n = len(m)
            i = 0
            while i < n:
                g = m[i]
                e = 1
                if not g.deg & 1:
                    while i + e < n and m[i + e] == g:
                        e += 1
                img = self.on_gen(g)
                if img:
                    coef = c * e
                    if odd_d and prefix_par:
                        coef = -coef
                    prefix = m[:i]
                    # drop one copy of g
                    suffix = m[i + 1:]
                    for mg, cg in img.items():
                        s1, left = mono_mul(prefix, mg)
                        if not s1:
                            continue
                        s2, full = mono_mul(left, suffix)
                        if not s2:
                            continue
                        v = coef * cg
                        if s1 * s2 < 0:
                            v = -v
                        w = out.get(full)
                        if w is None:
                            out[full] = v
                        else:
                            w += v
                            if w:
                                out[full] = w
                            else:
                                del out[full]
                if g.deg & 1:
                    prefix_par ^= 1
                i += e
        return out

    def __call__(self, x: SuperPoly) -> SuperPoly:
        return SuperPoly._raw(self.apply_terms(x.terms))


# ---------------------------------------------------------------------------
# exact sparse linear algebra


class Eliminator:
    """Incremental row echelon form over the rationals for sparse vectors.

    Vectors are mappings key -> Fraction.  Each stored row remembers the
    combination of inserted vectors that produced it.
    """

    def __init__(self):
        self.rows: List[Tuple[object, Dict, Dict[int, Fraction]]] = []
        self.count = 0

    def _reduce(self, vec: Dict) -> Tuple[Dict, Dict[int, Fraction]]:
        v = dict(vec)
        used: Dict[int, Fraction] = {}
        for pivot, row, combo in self.rows:
            c = v.get(pivot)
            if not c:
                continue
            add_into(v, row, -c)
            for i, a in combo.items():
                used[i] = used.get(i, ZERO) + c * a
        return v, used

    def insert(self, vec: Mapping) -> Optional[Dict[int, Fraction]]:
        """Insert a vector.  Returns a kernel relation if it was dependent."""
        idx = self.count
        self.count += 1
        v, used = self._reduce(dict(vec))
        combo = {i: -a for i, a in used.items() if a}
        combo[idx] = combo.get(idx, ZERO) + ONE
        if not v:
            return combo
        try:
            pivot = min(v)
        except TypeError:
            pivot = next(iter(v))
        c = v[pivot]
        row = {k: a / c for k, a in v.items()}
        self.rows.append((pivot, row, {i: a / c for i, a in combo.items() if a}))
        return None

    def express(self, target: Mapping) -> Optional[Dict[int, Fraction]]:
        v, used = self._reduce(dict(target))
        if v:
            return None
        return {i: a for i, a in used.items() if a}

    @property
    def rank(self) -> int:
        return len(self.rows)


def graded_solve(vectors: Sequence[SuperPoly], target: SuperPoly) -> Optional[List[Fraction]]:
    """Express ``target`` as a rational combination of ``vectors``.

    All inputs must be homogeneous of one common degree.  Returns ``None``
    when ``target`` is not in the span.
    """
    degs = set()
    for v in list(vectors) + [target]:
        ds = v.degrees()
        if len(ds) > 1:
            raise ValueError("graded_solve: inhomogeneous input")
        degs |= ds
    if len(degs) > 1:
        raise ValueError("graded_solve: inputs of different degrees")
    el = Eliminator()
    for v in vectors:
        el.insert(v.terms)
    sol = el.express(target.terms)
    if sol is None:
        return None
    return [sol.get(i, ZERO) for i in range(len(vectors))]


def kernel_basis(images: Sequence[Mapping]) -> List[Dict[int, Fraction]]:
    """Basis of linear relations Σ c_i images[i] = 0, as dicts i -> c_i."""
    el = Eliminator()
    out = []
    for im in images:
        rel = el.insert(im)
        if rel is not None:
            out.append({i: c for i, c in rel.items() if c})
    return out


def exact_rank(vectors: Iterable[Mapping]) -> int:
    el = Eliminator()
    for v in vectors:
        el.insert(v)
    return el.rank
