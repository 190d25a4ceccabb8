"""Command-line harness: ``vircheck verify|table|eval``."""

from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from .checks import GEOMETRY_SUITES, SUITES, TIERS, SpecError, run_suite
from .descendent import DescAlgebra
from .geometry import GeometryError, TargetGeometry, fmt_rational, preset_geometry
from .models import thaddeus_table
from .superalgebra import SuperPoly
from .voa import LatticeVA, VAError, VAState

EXIT_PASS, EXIT_FAIL, EXIT_SPEC = 0, 1, 2

BOUNDS = {"kmax": (0, 10), "nmax": (0, 6), "degmax": (0, 16), "g": (0, 12), "n": (-1, 10)}


def parse_range(text: str, name: str) -> List[int]:
    """``2..6``, ``-1..3``, ``2,4,5`` or a single integer."""
    out: List[int] = []
    for part in text.split(","):
        part = part.strip()
        m = re.fullmatch(r"(-?\d+)\.\.(-?\d+)", part)
        if m:
            lo, hi = int(m.group(1)), int(m.group(2))
            if lo > hi:
                raise SpecError(f"--{name}: empty range {part!r}")
            out.extend(range(lo, hi + 1))
        elif re.fullmatch(r"-?\d+", part):
            out.append(int(part))
        else:
            raise SpecError(f"--{name}: cannot parse {part!r}")
    if not out:
        raise SpecError(f"--{name}: empty range")
    lo, hi = BOUNDS[name]
    if min(out) < lo or max(out) > hi:
        raise SpecError(f"--{name}: values must lie in {lo}..{hi}")
    return sorted(set(out))


def _bounded(value: Optional[int], name: str) -> Optional[int]:
    if value is None:
        return None
    lo, hi = BOUNDS[name]
    if not lo <= value <= hi:
        raise SpecError(f"--{name} must lie in {lo}..{hi}")
    return value


# ---------------------------------------------------------------------------
# literal parsing

_DESC_FACTOR = re.compile(r"(chH|ch)(?:\^([VF]))?\[(-?\d+)\]\(([^)]+)\)(?:\^(\d+))?$")


def _split_terms(text: str) -> List[tuple]:
    text = text.strip()
    if not text:
        raise SpecError("empty literal")
    if text[0] not in "+-":
        text = "+" + text
    # split on signs outside brackets only
    out = []
    depth, sign, start = 0, text[0], 1
    for i in range(1, len(text) + 1):
        ch = text[i] if i < len(text) else None
        if ch is not None and ch in "[(":
            depth += 1
        elif ch is not None and ch in "])":
            depth -= 1
        elif ch is None or (ch in "+-" and depth == 0 and text[i - 1] != "^"):
            body = text[start:i].strip()
            if not body:
                raise SpecError("dangling sign in literal")
            out.append((-1 if sign == "-" else 1, body))
            if ch is not None:
                sign, start = ch, i + 1
    return out


def _factors(body: str) -> List[str]:
    return [f.strip() for f in re.split(r"[·*]", body) if f.strip()]


def _rational(tok: str) -> Optional[Fraction]:
    if re.fullmatch(r"\d+(/\d+)?", tok):
        return Fraction(tok)
    return None


def parse_descendent(text: str, geom: TargetGeometry) -> tuple:
    """Parse ``3/2·chH[1](pt)·chH[2](1)``; returns (algebra, element)."""
    pair = "^V" in text or "^F" in text
    alg = DescAlgebra(geom, "pair" if pair else "full")
    total = SuperPoly.zero()
    for sign, body in _split_terms(text):
        term = SuperPoly.const(sign)
        for tok in _factors(body):
            c = _rational(tok)
            if c is not None:
                term = term.scale(c)
                continue
            m = _DESC_FACTOR.match(tok)
            if not m:
                raise SpecError(f"cannot parse descendent factor {tok!r}")
            fam, side, i, name, power = m.groups()
            try:
                gamma = geom.cls(name)
            except (GeometryError, KeyError, ValueError):
                raise SpecError(f"unknown class {name!r}") from None
            sidx = {"V": 1, "F": 2}.get(side, 0)
            f = alg.chH(int(i), gamma, sidx) if fam == "chH" else alg.ch(int(i), gamma, sidx)
            term = term * (f ** int(power or 1))
        total = total + term
    return alg, total


_STATE_E = re.compile(r"e\[([^\]]*)\]$")
_STATE_V = re.compile(r"v\[([^,\]]+),\s*-(\d+)\](?:\^(\d+))?$")


def parse_state(text: str, va: LatticeVA) -> VAState:
    """Parse ``e[a0,..]*v[name,-k]*...`` sums with rational coefficients."""
    total = VAState.zero()
    for sign, body in _split_terms(text):
        coef = Fraction(sign)
        sector = None
        gens = []
        for tok in _factors(body):
            c = _rational(tok)
            if c is not None:
                coef *= c
                continue
            m = _STATE_E.match(tok)
            if m:
                coords = [x.strip() for x in m.group(1).split(",") if x.strip()]
                if len(coords) != va.m or not all(re.fullmatch(r"-?\d+", x) for x in coords):
                    raise SpecError(f"sector needs {va.m} integer coordinates")
                sector = tuple(int(x) for x in coords)
                continue
            m = _STATE_V.match(tok)
            if m:
                name, k, power = m.groups()
                try:
                    l = va.index(name.strip())
                except (KeyError, ValueError):
                    raise SpecError(f"unknown lattice vector {name!r}; known: {', '.join(va.names)}") from None
                if int(k) < 1:
                    raise SpecError("creation modes need k >= 1")
                gens += [(l, int(k))] * int(power or 1)
                continue
            raise SpecError(f"cannot parse state factor {tok!r}")
        total = total + va.state(sector if sector is not None else va.zero_sector(), gens, coef)
    return total


# ---------------------------------------------------------------------------
# commands


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False)


def _spec_from_args(args) -> Dict[str, object]:
    spec: Dict[str, object] = {"tier": args.tier}
    if args.geometry:
        geoms = []
        for g in args.geometry:
            geoms += [x for x in g.split(",") if x]
        for g in geoms:
            preset_geometry(g)
        spec["geometry"] = geoms
    spec["kmax"] = _bounded(args.kmax, "kmax")
    spec["nmax"] = _bounded(args.nmax, "nmax")
    spec["degmax"] = _bounded(args.degmax, "degmax")
    if args.g:
        spec["g"] = parse_range(args.g, "g")
    if args.n:
        spec["n"] = parse_range(args.n, "n")
    if args.samples is not None:
        if args.samples < 1:
            raise SpecError("--samples must be positive")
        spec["samples"] = args.samples
    if args.mutate:
        spec["mutate"] = True
    return {k: v for k, v in spec.items() if v is not None}


def run_spec(suite: str, spec: Dict[str, object]) -> Dict[str, object]:
    suites = SUITES if suite == "all" else (suite,)
    reports = []
    for s in suites:
        sub = dict(spec)
        if suite == "all":
            # per-suite knobs do not transfer across suites
            sub = {"tier": spec.get("tier", "smoke")}
        reports += run_suite(s, sub)
    failed = any(r["status"] == "fail" for r in reports)
    return {
        "suite": suite,
        "spec": spec,
        "status": "fail" if failed else "pass",
        "reports": reports,
    }


def _print_summary(result: Dict[str, object], stream) -> None:
    for r in result["reports"]:
        line = f"{r['status'].upper():5} {r['suite']:<13} {r['geometry']:<24} cases={r['cases_run']}"
        print(line, file=stream)
        ce = r.get("first_counterexample")
        if ce:
            print(f"      first counterexample: {ce['check']}", file=stream)
            print(f"        inputs:   {json.dumps(ce['inputs'], ensure_ascii=False)}", file=stream)
            print(f"        expected: {ce['expected']}", file=stream)
            print(f"        got:      {ce['got']}", file=stream)
    print(f"overall: {result['status']}", file=stream)


def cmd_verify(args) -> int:
    if args.replay:
        try:
            with open(args.replay) as fh:
                old = json.load(fh)
        except (OSError, ValueError) as exc:
            raise SpecError(f"cannot read replay file: {exc}") from None
        suite = old.get("suite")
        spec = old.get("spec", {})
        if suite not in SUITES and suite != "all":
            raise SpecError("replay file has no valid suite")
        failing = [r for r in old.get("reports", []) if r.get("status") == "fail"]
        if failing and suite in GEOMETRY_SUITES:
            # only rerun the geometries that failed
            spec = dict(spec, geometry=[r["geometry"] for r in failing])
        result = run_spec(suite, spec)
        before = [r.get("first_counterexample") for r in failing]
        after = [r.get("first_counterexample") for r in result["reports"] if r["status"] == "fail"]
        result["replay"] = {"reproduced": bool(before) and before == after}
        _print_summary(result, sys.stdout)
        print(f"replay: counterexample {'reproduced' if result['replay']['reproduced'] else 'not reproduced'}")
    else:
        if args.suite is None:
            raise SpecError("verify needs a suite name")
        if args.suite not in SUITES and args.suite != "all":
            raise SpecError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES + ('all',))}")
        spec = _spec_from_args(args)
        result = run_spec(args.suite, spec)
        _print_summary(result, sys.stdout)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(_dump(result) + "\n")
    return EXIT_FAIL if result["status"] == "fail" else EXIT_PASS


def cmd_table(args) -> int:
    if args.which != "thaddeus":
        raise SpecError("only 'table thaddeus' is available")
    gs = parse_range(args.g or "2", "g")
    if min(gs) < 2:
        raise SpecError("thaddeus table needs g >= 2")
    tables = {str(g): thaddeus_table(g) for g in gs}
    if args.format == "tsv":
        print("g\tm\tk\tp\tq\tvalue")
        for g, rows in tables.items():
            for r in rows:
                print(f"{g}\t{r['m']}\t{r['k']}\t{r['p']}\t{r['q']}\t{fmt_rational(r['value'])}")
    else:
        data = {g: [dict(r, value=fmt_rational(r["value"])) for r in rows] for g, rows in tables.items()}
        print(_dump(data))
    return EXIT_PASS


def cmd_eval(args) -> int:
    geom = preset_geometry(args.geometry or "p2")
    if args.kind == "desc":
        alg, D = parse_descendent(args.literal, geom)
        print(alg.render(D))
        degs = sorted(D.degrees())
        if degs:
            print(f"degree: {', '.join(str(d) for d in degs)}")
    else:
        va = LatticeVA(geom, not args.single)
        s = parse_state(args.literal, va)
        print(va.render(s))
        if s:
            print(f"degree: {', '.join(str(d) for d in sorted({va.degree(k) for k in s.terms}))}")
            if va.conformal:
                print(f"weight: {', '.join(str(w) for w in sorted(va.weights(s)))}")
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vircheck", description="Exact verification of descendent and lattice vertex algebra identities.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a check suite")
    v.add_argument("suite", nargs="?", help="one of: " + ", ".join(SUITES + ("all",)))
    v.add_argument("--geometry", action="append", help="curve:<g>, p2, p1xp1 or file:<path> (repeatable or comma separated)")
    v.add_argument("--tier", choices=sorted(TIERS), default="smoke")
    v.add_argument("--kmax", type=int)
    v.add_argument("--nmax", type=int)
    v.add_argument("--degmax", type=int)
    v.add_argument("--g", help="genus range, e.g. 2..6")
    v.add_argument("--n", help="index range, e.g. -1..3")
    v.add_argument("--samples", type=int, help="sample count for sampled vertex algebra suites")
    v.add_argument("--mutate", action="store_true", help="thaddeus only: drop the (2^q - 2) factor (mutation control)")
    v.add_argument("--out", help="write the JSON report here")
    v.add_argument("--replay", help="rerun the check recorded in a JSON report")
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("table", help="print a closed-form table")
    t.add_argument("which", choices=["thaddeus"])
    t.add_argument("--g", help="genus or range (default 2)")
    t.add_argument("--format", choices=["json", "tsv"], default="json")
    t.set_defaults(func=cmd_table)

    e = sub.add_parser("eval", help="pretty-print the canonical form of a literal")
    e.add_argument("kind", choices=["desc", "state"])
    e.add_argument("literal")
    e.add_argument("--geometry", default="p2")
    e.add_argument("--single", action="store_true", help="state literals on the single (not pair) lattice")
    e.set_defaults(func=cmd_eval)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_SPEC if exc.code else EXIT_PASS
    try:
        return args.func(args)
    except (SpecError, GeometryError, VAError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
