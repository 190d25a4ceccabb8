"""Named verification suites.  Each returns a JSON-ready report dict."""

from __future__ import annotations

import hashlib
import itertools
import json
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .descendent import (
    ZETA,
    DescAlgebra,
    Operators,
    T_vir_element,
    bracket_defect,
    generator_probes,
    operator_defect,
    product_probes,
)
from .duality import PairingContext
from .geometry import TargetGeometry, diagonal_kunneth, fmt_rational, preset_geometry
from .models import (
    BruteForceSym,
    SymPowerRing,
    thaddeus_integral,
    thaddeus_table,
    thaddeus_triples,
)
from .superalgebra import SuperPoly, kernel_basis
from .voa import LatticeVA, VAState

SUITES = (
    "desc-bracket",
    "desc-wt0",
    "desc-twist",
    "desc-tvir",
    "voa-commute",
    "voa-virasoro",
    "voa-skew",
    "voa-jacobi",
    "voa-primary",
    "duality",
    "sym",
    "thaddeus",
)

GEOMETRY_SUITES = set(SUITES) - {"sym", "thaddeus"}

DEFAULT_GEOMETRIES = {
    "desc-bracket": ["curve:0", "curve:1", "curve:2", "curve:3", "p2"],
    "desc-wt0": ["curve:0", "curve:1", "curve:2", "curve:3", "p2"],
    "desc-twist": ["curve:2", "p2"],
    "desc-tvir": ["curve:2", "p2"],
    "voa-commute": ["curve:0", "curve:1", "curve:2", "p2"],
    "voa-virasoro": ["curve:0", "curve:1", "curve:2", "p2"],
    "voa-skew": ["curve:0", "curve:1", "curve:2", "p2"],
    "voa-jacobi": ["curve:0", "curve:1", "curve:2", "p2"],
    "voa-primary": ["curve:0", "curve:1", "curve:2", "p2"],
    "duality": ["curve:0", "curve:1", "curve:2", "p2"],
}

# parameter tiers; acceptance pins "full"
TIERS = {
    "smoke": {"kmax": 2, "degmax": 6, "nmax": 2, "wmax": 3, "samples": 40, "N": 6, "duality_degmax": 6,
              "K": 3, "commute_degmax": 6, "per_degree": 1},
    "full": {"kmax": 3, "degmax": 10, "nmax": 3, "wmax": 5, "samples": 200, "N": 8, "duality_degmax": 8,
             "K": 6, "commute_degmax": 8, "per_degree": 3},
}


class SpecError(ValueError):
    """Invalid check specification (maps to exit code 2)."""


# ---------------------------------------------------------------------------
# reports


def fingerprint(geom: TargetGeometry) -> str:
    """Hash of the generator order and the Kunneth signs of the Todd-twisted diagonal."""
    h = hashlib.sha256()
    h.update(json.dumps([list(geom.names), [list(x) for x in geom.hodge]]).encode())
    for kp in diagonal_kunneth(geom, geom.todd):
        sign = -1 if (geom.dimension - kp.p) % 2 else 1
        h.update(
            json.dumps([sign, kp.p, kp.q, [str(c) for c in kp.left.coeffs], [str(c) for c in kp.right.coeffs]]).encode()
        )
    return h.hexdigest()[:16]


@dataclass
class Recorder:
    """Accumulates cases and keeps the first counterexample."""

    cases: int = 0
    counterexample: Optional[Dict[str, object]] = None
    notes: List[str] = field(default_factory=list)

    @property
    def failed(self) -> bool:
        return self.counterexample is not None

    def add(self, n: int = 1) -> None:
        self.cases += n

    def fail(self, check: str, inputs: Dict[str, object], expected, got) -> None:
        if self.counterexample is None:
            self.counterexample = {
                "check": check,
                "inputs": inputs,
                "expected": _render(expected),
                "got": _render(got),
            }


def _render(x) -> str:
    if isinstance(x, Fraction):
        return fmt_rational(x)
    return str(x)


def make_report(suite: str, geometry: str, params: Dict[str, object], rec: Recorder, t0: float, fp: str = "") -> Dict:
    rep = {
        "suite": suite,
        "geometry": geometry,
        "parameters": params,
        "status": "fail" if rec.failed else ("pass" if rec.cases else "skipped"),
        "cases_run": rec.cases,
        "first_counterexample": rec.counterexample,
        "wall_time": round(time.perf_counter() - t0, 3),
        "fingerprint": fp,
    }
    if rec.notes:
        rep["notes"] = rec.notes
    return rep


# ---------------------------------------------------------------------------
# descendent suites


def _bracket_sweep(rec: Recorder, label: str, alg: DescAlgebra, L: Callable[[int], object], kmax: int, degmax: int, kmin: int = -1):
    probes = generator_probes(alg, degmax)
    for k in range(kmin, kmax + 1):
        for l in range(kmin, kmax + 1):
            if k + l < -1:
                continue
            n, d = bracket_defect(L(k), L(l), lambda p, k=k, l=l: L(k + l)(p).scale(l - k), probes)
            rec.add(n)
            if d is not None:
                rec.fail(
                    f"{label}: [L_{k}, L_{l}] = {l - k} L_{k + l}",
                    {"k": k, "l": l, "probe": alg.render(d.probe)},
                    alg.render(d.expected),
                    alg.render(d.got),
                )
                return


def suite_desc_bracket(geom: TargetGeometry, kmax: int, degmax: int, **_) -> Recorder:
    rec = Recorder()
    alg = DescAlgebra(geom)
    ops = Operators(alg)
    _bracket_sweep(rec, "L", alg, ops.L, kmax, degmax)
    if rec.failed:
        return rec
    pair = DescAlgebra(geom, "pair")
    pops = Operators(pair)
    _bracket_sweep(rec, "L^pa", pair, pops.L, kmax, degmax)
    if rec.failed:
        return rec
    for vname, V in (("O", geom.one()), ("O+O_pt", geom.one() + geom.cls(geom.top_index()))):
        cache: Dict[int, object] = {}

        def LV(k, V=V, cache=cache):
            if k not in cache:
                cache[k] = ops.L_V(k, V)
            return cache[k]

        # with T^V_{-1} = T_{-1} the relations only close for k, l >= 0
        _bracket_sweep(rec, f"L^V[{vname}]", alg, LV, kmax, degmax, kmin=0)
        if rec.failed:
            return rec
        # the k = -1 defect has a closed form: -(l-1)! chH_{l-1}(ch(V)^dual td)
        corr = geom.cup(geom.dual_class(V), geom.todd)
        for l in range(1, kmax + 1):
            got = LV(-1)(LV(l)(SuperPoly.one())) - LV(l)(LV(-1)(SuperPoly.one()))
            defect = got - ops.L_V(l - 1, V)(SuperPoly.one()).scale(l + 1)
            expected = alg.chH(l - 1, corr).scale(factorial(l - 1))
            rec.add()
            if defect != expected:
                rec.fail(f"L^V[{vname}]: [L_-1, L_{l}] - {l + 1} L_{l - 1} on 1", {"l": l}, alg.render(expected), alg.render(defect))
                return rec
    # [R_{-1}, L_j] = (j+1) L_{j-1}
    probes = generator_probes(alg, degmax)
    for j in range(0, kmax + 1):
        n, d = bracket_defect(ops.R(-1), ops.L(j), lambda p, j=j: ops.L(j - 1)(p).scale(j + 1), probes)
        rec.add(n)
        if d is not None:
            rec.fail(f"[R_-1, L_{j}] = {j + 1} L_{j - 1}", {"probe": alg.render(d.probe)}, alg.render(d.expected), alg.render(d.got))
            return rec
    return rec


def _alpha_for(geom: TargetGeometry):
    """A topological type with nonzero rank: ch = 2 + 3 pt."""
    return geom.one().scale(2) + geom.cls(geom.top_index()).scale(3)


def suite_desc_wt0(geom: TargetGeometry, degmax: int, **_) -> Recorder:
    rec = Recorder()
    alg = DescAlgebra(geom)
    ops = Operators(alg)
    probes = product_probes(alg, min(degmax, 6)) + generator_probes(alg, degmax)
    Lwt0 = ops.L_wt0()
    R1 = ops.R(-1)
    n, d = operator_defect(lambda p: R1(Lwt0(p)), lambda p: SuperPoly.zero(), probes)
    rec.add(n)
    if d is not None:
        rec.fail("R_-1 o L_wt0 = 0", {"probe": alg.render(d.probe)}, "0", alg.render(d.got))
        return rec
    # delta-normalized identity at alpha, delta = pt
    alpha = _alpha_for(geom)
    delta = geom.cls(geom.top_index())
    r = geom.cup_and_integrate(delta, alpha)
    at = DescAlgebra(geom, "at_alpha", alpha)
    Ld = ops.L_wt0((delta, r))
    top = [q for q in (at.project(p) for p in probes) if q]
    n, d = operator_defect(lambda p: at.apply(Lwt0, p), lambda p: at.apply(Ld, p), top)
    rec.add(n)
    if d is not None:
        rec.fail("L_wt0 = sum (-1)^j/(j+1)! L^delta_j R^{j+1}", {"probe": at.render(d.probe)}, at.render(d.expected), at.render(d.got))
        return rec
    # L^delta_j(F D) = F L^delta_j(D) after p_alpha, F = ch^H_1(delta)
    F = alg.chH(1, delta)
    small = product_probes(alg, min(degmax, 4))
    for j in range(-1, 3):
        Lj = ops.L_delta(j, delta, r)
        n, d = operator_defect(lambda p: at.project(Lj(F * p)), lambda p: at.project(F * Lj(p)), small)
        rec.add(n)
        if d is not None:
            rec.fail(f"L^delta_{j}(F D) = F L^delta_{j}(D)", {"probe": alg.render(d.probe)}, at.render(d.expected), at.render(d.got))
            return rec
    # eta_norm lands in ker R_{-1}
    eta = ops.eta_norm(delta, r)
    for p in top:
        rec.add()
        img = at.apply(R1, at.apply(eta, p))
        if img:
            rec.fail("R_-1 o eta_norm = 0", {"probe": at.render(p)}, "0", at.render(img))
            return rec
    # unit part of S_k equals -r S^pt_k
    for k in range(0, 3):
        unit = ops.S_fixed(k, only_unit=True)
        spt = ops.S_delta(k, delta, r)
        n, d = operator_defect(unit, lambda p: spt(p).scale(-r), small)
        rec.add(n)
        if d is not None:
            rec.fail(f"S_{k}|(1 x pt) = -r S^pt_{k}", {"probe": alg.render(d.probe)}, alg.render(d.expected), alg.render(d.got))
            return rec
    return rec


def _twist_class(geom: TargetGeometry):
    for name in ("H", "H1", "pt"):
        if name in geom.names:
            return name, geom.cls(name)
    return geom.names[geom.top_index()], geom.cls(geom.top_index())


def suite_desc_twist(geom: TargetGeometry, kmax: int, degmax: int, **_) -> Recorder:
    rec = Recorder()
    alg = DescAlgebra(geom)
    ops = Operators(alg)
    hname, H = _twist_class(geom)
    F = ops.F_twist(H)
    probes = product_probes(alg, min(degmax, 6)) + generator_probes(alg, degmax)
    for k in range(-1, kmax + 1):
        L = ops.L(k)
        n, d = operator_defect(lambda p: F(L(p)), lambda p: L(F(p)), probes)
        rec.add(n)
        if d is not None:
            rec.fail(f"F o L_{k} = L_{k} o F", {"H": hname, "probe": alg.render(d.probe)}, alg.render(d.expected), alg.render(d.got))
            return rec
        T = ops.T_element(k)
        rec.add()
        if F(T) != T:
            rec.fail(f"F(T_{k}) = T_{k}", {"H": hname}, alg.render(T), alg.render(F(T)))
            return rec
    # E_twist fixes weight-0 elements (formal zeta)
    E = ops.E_twist(SuperPoly.gen(ZETA))
    Lwt0 = ops.L_wt0()
    for p in product_probes(alg, min(degmax, 4)):
        w = Lwt0(p)
        rec.add()
        if E(w) != w:
            rec.fail("E_twist fixes weight-0 descendents", {"probe": alg.render(p)}, alg.render(w), alg.render(E(w)))
            return rec
    return rec


def suite_desc_tvir(geom: TargetGeometry, N: int, **_) -> Recorder:
    rec = Recorder()
    alg = DescAlgebra(geom)
    R1 = Operators(alg).R(-1)
    el = T_vir_element(alg, N)
    img = R1(el)
    rec.add()
    # boundary stratum: the R_{-1}-image of the truncation lives in total index N - 1
    outside = img.filter(lambda m: sum(g.idx for g in m) != N - 1)
    if outside:
        rec.fail("R_-1(T^vir_<=N) supported on boundary", {"N": N}, "0 off the boundary", alg.render(outside))
        return rec
    for s in range(N + 1):
        rec.add()
        stratum = el.filter(lambda m, s=s: sum(g.idx for g in m) == s)
        img_s = R1(stratum)
        if img_s:
            rec.fail("R_-1 kills each stratum i+j = s", {"s": s}, "0", alg.render(img_s))
            return rec
    return rec


# ---------------------------------------------------------------------------
# vertex algebra suites


def sample_sectors(va: LatticeVA, rng: random.Random, count: int) -> List[Tuple[int, ...]]:
    """Zero sector plus sectors from the box {-1,0,1}^m with 0 <= Q(a,a) <= 2."""
    box = [s for s in itertools.product((-1, 0, 1), repeat=va.m) if any(s) and 0 <= va.Q_sector(s, s) <= 2]
    rng.shuffle(box)
    return [va.zero_sector()] + box[:count]


def sample_states(va: LatticeVA, rng: random.Random, sectors, wmax, per_weight: int) -> List[VAState]:
    out = []
    for s in sectors:
        lo = va.min_weight(s)
        w = lo
        while w <= wmax:
            keys = va.monomials_of_weight(s, w)
            if len(keys) > per_weight:
                keys = rng.sample(keys, per_weight)
            out += [VAState._raw({k: Fraction(1)}) for k in keys]
            w += 1
    return out


def suite_voa_commute(geom: TargetGeometry, samples: int, K: int = 6, degmax: int = 8, per_degree: int = 3, **_) -> Recorder:
    rec = Recorder()
    va = LatticeVA(geom, True)
    rng = random.Random(1)
    states = []
    for s in sample_sectors(va, rng, 2):
        for d in range(0, degmax + 1):
            keys = va.monomials_of_degree(s, d + int(va.Q_sector(s, s)))
            if len(keys) > per_degree:
                keys = rng.sample(keys, per_degree)
            states += [VAState._raw({k: Fraction(1)}) for k in keys]
    modes = range(-K, K + 1)
    for st in states:
        one = {(v, k): va.gen_mode(v, k, st) for v in range(va.rank) for k in modes}
        for v in range(va.rank):
            for w in range(va.rank):
                pv = va.parity[v] and va.parity[w]
                for k in modes:
                    for l in modes:
                        a = va.gen_mode(v, k, one[w, l])
                        b = va.gen_mode(w, l, one[v, k])
                        got = a + b if pv else a - b
                        if va.parity[v]:
                            c = va.Q[v][w] if k + l + 1 == 0 else 0
                        else:
                            c = k * va.Q[v][w] if k + l == 0 else 0
                        want = st.scale(c)
                        rec.add()
                        if got != want:
                            rec.fail(
                                "[v_(k), w_(l)] = k^(1-|v|) Q(v,w) delta",
                                {"v": va.names[v], "w": va.names[w], "k": k, "l": l, "state": va.render(st)},
                                va.render(want),
                                va.render(got),
                            )
                            return rec
    if not va.conformal:
        rec.notes.append(f"shifted modes skipped: {va.conformal_error}")
        return rec
    for st in states[: max(4, len(states) // 4)]:
        one = {(v, k): va.shifted_mode_terms(v, k, st.terms) for v in range(va.rank) for k in modes}
        for v in range(va.rank):
            for w in range(va.rank):
                pv = va.parity[v] and va.parity[w]
                for k in modes:
                    for l in modes:
                        a = VAState._raw(va.shifted_mode_terms(v, k, one[w, l]))
                        b = VAState._raw(va.shifted_mode_terms(w, l, one[v, k]))
                        got = a + b if pv else a - b
                        want = st.scale(k * va.Qomega[v][w] if k + l == 0 else 0)
                        rec.add()
                        if got != want:
                            rec.fail(
                                "[v^w_(k), w^w_(l)] = k Q^w(v,w) delta",
                                {"v": va.names[v], "w": va.names[w], "k": k, "l": l, "state": va.render(st)},
                                va.render(want),
                                va.render(got),
                            )
                            return rec
    return rec


def suite_voa_virasoro(geom: TargetGeometry, nmax: int, wmax: int, samples: int, **_) -> Recorder:
    rec = Recorder()
    va = LatticeVA(geom, True)
    va.require_conformal()
    c = va.central_charge()
    rng = random.Random(2)
    vac = va.vacuum()
    # central charge from L_2 L_{-2}|0>
    rec.add()
    got = va.virasoro(2, va.virasoro(-2, vac))
    if got != vac.scale(Fraction(c, 2)):
        rec.fail("L_2 L_-2 |0> = c/2 |0>", {"c": c}, va.render(vac.scale(Fraction(c, 2))), va.render(got))
        return rec
    rec.notes.append(f"central charge {c}")
    per = max(2, samples // 40)
    states = sample_states(va, rng, sample_sectors(va, rng, 3), wmax, per)
    for st in states:
        rec.add()
        if va.virasoro(-1, st) != va.translate(st):
            rec.fail("L_-1 = T", {"state": va.render(st)}, va.render(va.translate(st)), va.render(va.virasoro(-1, st)))
            return rec
    for st in states[::3]:
        for n in range(-2, 3):
            rec.add()
            a, b = va.virasoro(n, st), va.virasoro_generic(n, st)
            if a != b:
                rec.fail("L_n = omega_(n+1)", {"n": n, "state": va.render(st)}, va.render(b), va.render(a))
                return rec
    for st in states:
        for n in range(-nmax, nmax + 1):
            for m in range(-nmax, nmax + 1):
                lhs = va.virasoro(n, va.virasoro(m, st)) - va.virasoro(m, va.virasoro(n, st))
                rhs = va.virasoro(n + m, st).scale(n - m)
                if n + m == 0:
                    rhs = rhs + st.scale(Fraction(n ** 3 - n, 12) * c)
                rec.add()
                if lhs != rhs:
                    rec.fail("[L_n, L_m] with central term", {"n": n, "m": m, "state": va.render(st)}, va.render(rhs), va.render(lhs))
                    return rec
    return rec


def _state_pool(va: LatticeVA, rng: random.Random, wmax: int = 4) -> List[VAState]:
    pool = sample_states(va, rng, sample_sectors(va, rng, 6), min(wmax, 2), 6)
    return [s for s in pool if max(va.weights(s)) <= wmax]


def _skew_rhs(va: LatticeVA, a: VAState, n: int, b: VAState) -> VAState:
    pa, pb = va.state_parity(a), va.state_parity(b)
    kb, ka = next(iter(b.terms)), next(iter(a.terms))
    out = VAState.zero()
    i = 0
    while n + i <= va.mode_bound(kb, ka):
        y = va.mode(b, n + i, a)
        for _ in range(i):
            y = va.translate(y)
        sgn = -1 if (pa * pb + i + n + 1) % 2 else 1
        out = out + y.scale(Fraction(sgn, factorial(i)))
        i += 1
    return out


def _bounded_tuple(va, rng, pool, size, cap=4, excess=None):
    while True:
        xs = [rng.choice(pool) for _ in range(size)]
        keys = [next(iter(x.terms)) for x in xs]
        if not all(va.mode_bound(p, q) <= cap for p in keys for q in keys):
            continue
        if excess is not None:
            # Fock weight left above the ground state of the total sector, at the top (m, n)
            tot = tuple(sum(v) for v in zip(*(k[0] for k in keys)))
            ex = sum(va.weight(k) for k in keys) - 1 - va.min_weight(tot)
            if not 0 <= ex <= excess:
                continue
        return xs


def suite_voa_skew(geom: TargetGeometry, samples: int, **_) -> Recorder:
    rec = Recorder()
    va = LatticeVA(geom, True)
    rng = random.Random(3)
    pool = _state_pool(va, rng)
    for _ in range(samples):
        a, b = _bounded_tuple(va, rng, pool, 2)
        for n in range(-2, 2):
            lhs = va.mode(a, n, b)
            rhs = _skew_rhs(va, a, n, b)
            rec.add()
            if lhs != rhs:
                rec.fail("skew-symmetry", {"a": va.render(a), "b": va.render(b), "n": n}, va.render(rhs), va.render(lhs))
                return rec
            tl, tr = va.mode(va.translate(a), n, b), va.mode(a, n - 1, b).scale(-n)
            rec.add()
            if tl != tr:
                rec.fail("(Ta)_(n) = -n a_(n-1)", {"a": va.render(a), "b": va.render(b), "n": n}, va.render(tr), va.render(tl))
                return rec
    return rec


def suite_voa_jacobi(geom: TargetGeometry, samples: int, **_) -> Recorder:
    rec = Recorder()
    va = LatticeVA(geom, True)
    rng = random.Random(4)
    pool = _state_pool(va, rng)
    combos = [(m, n) for m in (0, 1) for n in (-1, 0, 1)]
    for t in range(samples):
        a, b, c = _bounded_tuple(va, rng, pool, 3, excess=5)
        pa, pb = va.state_parity(a), va.state_parity(b)
        # two (m, n) pairs per triple, cycling so each pair is hit equally often
        for m, n in (combos[(2 * t) % 6], combos[(2 * t + 1) % 6]):
            lhs = va.mode(va.mode(a, m, b), n, c)
            rhs = VAState.zero()
            sg = -1 if (pa * pb + m) % 2 else 1
            for i in range(m + 1):
                t1 = va.mode(a, m - i, va.mode(b, n + i, c))
                t2 = va.mode(b, m + n - i, va.mode(a, i, c))
                rhs = rhs + (t1 - t2.scale(sg)).scale(_gbinom(m, i) * (-1) ** i)
            rec.add()
            if lhs != rhs:
                rec.fail(
                    "Borcherds-Jacobi",
                    {"a": va.render(a), "b": va.render(b), "c": va.render(c), "m": m, "n": n},
                    va.render(rhs),
                    va.render(lhs),
                )
                return rec
    return rec


def _gbinom(m: int, i: int) -> Fraction:
    num = 1
    for t in range(i):
        num *= m - t
    return Fraction(num, factorial(i))


def suite_voa_primary(geom: TargetGeometry, samples: int, **_) -> Recorder:
    rec = Recorder()
    va = LatticeVA(geom, True)
    va.require_conformal()
    rng = random.Random(5)
    z = va.zero_sector()
    weight1: List[VAState] = []
    for l in range(va.rank):
        if not va.parity[l]:
            s = va.state(z, [(l, 1)])
            ok, rep = va.is_primary(s)
            rec.add()
            if not ok:
                rec.fail("e^0 (x) b_-1 primary", {"b": va.names[l]}, "primary", rep)
                return rec
            weight1.append(s)
    # sectors with Q(a,a) = 2: e^a is primary of weight 1
    sectors = sample_sectors(va, rng, 60)
    for s in sectors:
        if va.Q_sector(s, s) == 2:
            st = VAState.basis(s)
            ok, rep = va.is_primary(st)
            rec.add()
            if not ok:
                rec.fail("e^a primary for Q(a,a) = 2", {"sector": list(s)}, "primary", rep)
                return rec
            weight1.append(st)
    # K0 = P0: kernel of a -> a_(0) omega on weight-1 sector spaces
    negatives = 0
    for s in sectors:
        if not any(s):
            continue
        keys = va.monomials_of_weight(s, 1)
        if not keys:
            continue
        if len(keys) > 40:
            # too large for the kernel; still a source of negative controls
            keys = rng.sample(keys, 5)
            imgs = [va.mode(VAState._raw({k: Fraction(1)}), 0, va.omega).terms for k in keys]
            rels = []
        else:
            imgs = [va.mode(VAState._raw({k: Fraction(1)}), 0, va.omega).terms for k in keys]
            rels = kernel_basis(imgs)
        for rel in rels:
            a = VAState._raw({keys[i]: c for i, c in rel.items()})
            lift = va.primary_lift(a)
            rec.add()
            if not va.equal_mod_T(lift, a):
                rec.fail("primary_lift(a) = a mod T", {"a": va.render(a)}, va.render(a), va.render(lift))
                return rec
            ok, rep = va.is_primary(lift)
            rec.add()
            if not ok:
                rec.fail("[a, omega] = 0 implies primary lift", {"a": va.render(a)}, "primary", rep)
                return rec
            weight1.append(lift)
        for i, k in enumerate(keys):
            if imgs[i] and negatives < samples:
                a = VAState._raw({k: Fraction(1)})
                ok, _ = va.is_primary(va.primary_lift(a))
                rec.add()
                negatives += 1
                if ok:
                    rec.fail("negative control: a_(0) omega != 0 gives non-primary lift", {"a": va.render(a)}, "not primary", "primary")
                    return rec
    # [a, omega] expansion through L_n
    for a in rng.sample(weight1, min(len(weight1), 20)):
        lhs = va.mode(a, 0, va.omega)
        rhs = VAState.zero()
        for n in range(-1, 4):
            y = va.virasoro(n, a)
            for _ in range(n + 1):
                y = va.translate(y)
            rhs = rhs + y.scale(Fraction((-1) ** (n % 2), factorial(n + 1)))
        rec.add()
        if lhs != rhs:
            rec.fail("[a, omega] = sum (-1)^n/(n+1)! T^{n+1} L_n a", {"a": va.render(a)}, va.render(rhs), va.render(lhs))
            return rec
    # closure: brackets of weight-1 primaries stay primary
    weight1 = [w for w in weight1 if w]
    pairs, tries = 0, 0
    while pairs < samples and weight1 and tries < 50 * samples:
        a, b = rng.choice(weight1), rng.choice(weight1)
        tries += 1
        # the bracket has weight 1; skip sectors where that leaves a large Fock space
        tot = tuple(x + y for x, y in zip(next(iter(a.terms))[0], next(iter(b.terms))[0]))
        if 1 - va.min_weight(tot) > 3:
            continue
        br = va.lie_bracket(a, b)
        ok, rep = va.is_primary(br)
        rec.add()
        pairs += 1
        if not ok:
            rec.fail("bracket of primaries is primary", {"a": va.render(a), "b": va.render(b)}, "primary", rep)
            return rec
        # a weight-1 primary acting on a primary of another weight
        hi = va.state(z, [(next(l for l in range(va.rank) if not va.parity[l]), 1)])
        ok, _ = va.is_primary(va.lie_bracket(a, hi))
        rec.add()
        if not ok:
            rec.fail("P_0 acts on primaries", {"a": va.render(a)}, "primary", "not primary")
            return rec
    rec.notes.append(f"negative controls: {negatives}")
    return rec


# ---------------------------------------------------------------------------
# duality


def suite_duality(geom: TargetGeometry, degmax: int, n_range: Sequence[int], **_) -> Recorder:
    rec = Recorder()
    va = LatticeVA(geom, True)
    m = va.m
    half = m // 2
    sectors = [tuple(1 if i == half else 0 for i in range(m)), tuple(1 if i in (0, m - 1) else 0 for i in range(m))]
    for sec in sectors:
        ctx = PairingContext(va, sec)
        n_cases, ce = ctx.translation_defect(degmax)
        rec.add(n_cases)
        if ce is not None:
            rec.fail("<R_-1 D, u> = <D, T u>", {"sector": list(sec), "D": ce.descendent, "u": ce.state}, ce.rhs, ce.lhs)
            return rec
        for n in n_range:
            n_cases, ce = ctx.adjoint_defect(n, degmax)
            rec.add(n_cases)
            if ce is not None:
                rec.fail(f"<L_{n} D, u> = <D, L_{n} u>", {"sector": list(sec), "n": n, "D": ce.descendent, "u": ce.state}, ce.rhs, ce.lhs)
                return rec
    # mutation control on the first sector
    ctx = PairingContext(va, sectors[0])
    muts = 0
    for n in n_range:
        if n < 0:
            continue
        for term in ctx.effective_T_terms(n):
            _, ce = ctx.adjoint_defect(n, degmax, desc_op=ctx.perturbed_L(n, term))
            rec.add()
            muts += 1
            if ce is None:
                rec.fail("mutation control detects perturbed T^pa", {"n": n, "term": ctx.alg.render(SuperPoly._raw({term: Fraction(1)}))}, "fail", "pass")
                return rec
    rec.notes.append(f"mutations detected: {muts}")
    return rec


# ---------------------------------------------------------------------------
# models


def suite_sym(g_range: Sequence[int], n_range: Sequence[int], kmax: int, **_) -> Recorder:
    rec = Recorder()
    for g in g_range:
        for n in n_range:
            S = SymPowerRing(g, n)
            monos = list(S.monomials())
            for k in range(0, kmax + 1):
                for D in monos:
                    rec.add()
                    v = S.integrate(S.L(k, D))
                    if v:
                        rec.fail("int L~_k(D) = 0", {"g": g, "n": n, "k": k, "D": D.render()}, "0", v)
                        return rec
                    # stratified identity on the degree-matched stratum
                    (m,) = D.terms
                    ell = sum(1 for x in m if x == S.eta_gen)
                    a = sum(1 for x in m if x in S.f_gens)
                    if k >= 1 and k + a + ell == n:
                        lhs = (g - a) * S.integrate(S.eta_pow(k) * D)
                        rhs = S.integrate(S.eta_pow(k - 1) * S.theta * D)
                        rec.add()
                        if lhs != rhs:
                            rec.fail("(g-a) int eta^k D = int eta^{k-1} theta D", {"g": g, "n": n, "k": k, "D": D.render()}, rhs, lhs)
                            return rec
                    elif k + a + ell != n:
                        rec.add()
                        lk = S.L(k, D)
                        if S.integrate(lk):
                            rec.fail("degree filter", {"g": g, "n": n, "k": k, "D": D.render()}, "0", S.integrate(lk))
                            return rec
            # independent brute-force oracle on small cells
            if g <= 2 and n <= 3:
                B = BruteForceSym(g, n)
                for D in monos:
                    rec.add()
                    if S.integrate(D) != B.integrate(B.lift(S, D)):
                        rec.fail("Claim integral = brute force", {"g": g, "n": n, "D": D.render()}, B.integrate(B.lift(S, D)), S.integrate(D))
                        return rec
    return rec


def suite_thaddeus(g_range: Sequence[int], mutate: bool = False, **_) -> Recorder:
    rec = Recorder()
    spots = {(2, 3, 0, 0): -4, (2, 1, 1, 0): 4, (2, 0, 0, 1): -4}
    for (g, m, k, p), want in spots.items():
        if g in g_range:
            rec.add()
            got = thaddeus_integral(g, m, k, p, drop_factor=mutate)
            if got != want:
                rec.fail("spot value", {"g": g, "m": m, "k": k, "p": p}, Fraction(want), got)
                return rec
    for g in g_range:
        if g < 2:
            raise SpecError("thaddeus needs g >= 2")
        for m, k, p in thaddeus_triples(g):
            q = m + p - g + 1
            rec.add()
            if q % 2 or q != 2 * (g - 1 - k - p):
                rec.fail("q = 2(g-1-k-p)", {"g": g, "m": m, "k": k, "p": p}, 2 * (g - 1 - k - p), q)
                return rec
            if k == 0:
                continue
            lhs = (g - p) * thaddeus_integral(g, m, k, p, drop_factor=mutate)
            rhs = -2 * m * thaddeus_integral(g, m - 1, k - 1, p + 1, drop_factor=mutate) if m >= 1 else Fraction(0)
            rec.add()
            if lhs != rhs:
                rec.fail("(g-p) I(m,k,p) = -2m I(m-1,k-1,p+1)", {"g": g, "m": m, "k": k, "p": p}, rhs, lhs)
                return rec
    return rec


# ---------------------------------------------------------------------------
# dispatcher


def run_suite(suite: str, params: Dict[str, object]) -> List[Dict]:
    """Run one suite over its geometries; returns one report per geometry (or one for models)."""
    if suite not in SUITES:
        raise SpecError(f"unknown suite {suite!r}")
    tier = TIERS[params.get("tier", "smoke")]
    kmax = params.get("kmax") if params.get("kmax") is not None else tier["kmax"]
    degmax = params.get("degmax") if params.get("degmax") is not None else tier["degmax"]
    nmax = params.get("nmax") if params.get("nmax") is not None else tier["nmax"]
    common = {
        "kmax": kmax,
        "degmax": degmax,
        "nmax": nmax,
        "wmax": tier["wmax"],
        "samples": params.get("samples") or tier["samples"],
        "N": params.get("N") or tier["N"],
    }
    reports = []
    if suite == "sym":
        g_range = params.get("g") or [0, 1, 2, 3]
        n_range = params.get("n") or [1, 2, 3, 4, 5]
        kk = params.get("kmax") if params.get("kmax") is not None else 5
        t0 = time.perf_counter()
        rec = suite_sym(g_range, n_range, kk)
        reports.append(make_report(suite, "curve-symmetric-powers", {"g": list(g_range), "n": list(n_range), "kmax": kk}, rec, t0))
        return reports
    if suite == "thaddeus":
        g_range = params.get("g") or [2, 3, 4, 5, 6]
        t0 = time.perf_counter()
        rec = suite_thaddeus(g_range, mutate=bool(params.get("mutate")))
        rep = make_report(suite, "rank2-fixed-determinant", {"g": list(g_range), "mutate": bool(params.get("mutate"))}, rec, t0)
        rep["table"] = {str(g): [{k: (fmt_rational(v) if isinstance(v, Fraction) else v) for k, v in row.items()} for row in thaddeus_table(g)] for g in g_range}
        reports.append(rep)
        return reports
    geoms = params.get("geometry") or DEFAULT_GEOMETRIES[suite]
    for gname in geoms:
        geom = preset_geometry(gname)
        t0 = time.perf_counter()
        if suite == "desc-bracket":
            p = {"kmax": kmax, "degmax": degmax}
            rec = suite_desc_bracket(geom, kmax, degmax)
        elif suite == "desc-wt0":
            p = {"degmax": degmax}
            rec = suite_desc_wt0(geom, degmax)
        elif suite == "desc-twist":
            p = {"kmax": kmax, "degmax": degmax}
            rec = suite_desc_twist(geom, kmax, degmax)
        elif suite == "desc-tvir":
            p = {"N": common["N"]}
            rec = suite_desc_tvir(geom, common["N"])
        elif suite == "voa-commute":
            p = {"K": tier["K"], "degmax": tier["commute_degmax"], "per_degree": tier["per_degree"]}
            rec = suite_voa_commute(geom, common["samples"], **p)
        elif suite == "voa-virasoro":
            p = {"nmax": nmax, "wmax": common["wmax"], "samples": common["samples"]}
            rec = suite_voa_virasoro(geom, nmax, common["wmax"], common["samples"])
        elif suite == "voa-skew":
            p = {"samples": common["samples"]}
            rec = suite_voa_skew(geom, common["samples"])
        elif suite == "voa-jacobi":
            p = {"samples": common["samples"]}
            rec = suite_voa_jacobi(geom, common["samples"])
        elif suite == "voa-primary":
            p = {"samples": common["samples"]}
            rec = suite_voa_primary(geom, common["samples"])
        elif suite == "duality":
            dd = params.get("degmax") if params.get("degmax") is not None else tier["duality_degmax"]
            n_range = params.get("n") or [-1, 0, 1, 2, 3]
            p = {"degmax": dd, "n": list(n_range)}
            rec = suite_duality(geom, dd, n_range)
        else:  # pragma: no cover
            raise SpecError(suite)
        reports.append(make_report(suite, gname, p, rec, t0, fingerprint(geom)))
    return reports
