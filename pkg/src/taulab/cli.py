"""Command-line entry point.

Exit codes: 0 success (or identity holds), 1 identity violated, 2 usage or
input error.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any

from . import characters, ginibre, hurwitz, partitions, ribbon, symfunc, tau


class UsageError(Exception):
    pass


# --- input helpers ------------------------------------------------------------------

def _load_json(text: str, what: str) -> Any:
    """Parse inline JSON or ``@path``/existing path to a JSON file."""
    source = what
    if text.startswith("@") or (not text.lstrip().startswith(("[", "{", '"')) and Path(text).exists()):
        path = Path(text[1:] if text.startswith("@") else text)
        try:
            text = path.read_text()
        except OSError as exc:
            raise UsageError(f"{what}: cannot read {path}: {exc.strerror}") from None
        source = f"{what} ({path})"
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{source}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _partition_arg(text: str, what: str) -> partitions.Partition:
    data = _load_json(text, what)
    if not isinstance(data, list) or not all(isinstance(x, int) for x in data):
        raise UsageError(f"{what}: expected a JSON array of integers")
    try:
        return partitions.partition(data)
    except ValueError as exc:
        raise UsageError(f"{what}: {exc}") from None


def _partition_list_arg(text: str, what: str) -> list[partitions.Partition]:
    data = _load_json(text, what)
    if not isinstance(data, list):
        raise UsageError(f"{what}: expected a JSON array of partitions")
    out = []
    for i, p in enumerate(data):
        if not isinstance(p, list) or not all(isinstance(x, int) for x in p):
            raise UsageError(f"{what}[{i}]: expected a JSON array of integers")
        try:
            out.append(partitions.partition(p))
        except ValueError as exc:
            raise UsageError(f"{what}[{i}]: {exc}") from None
    return out


def _number(x, where: str):
    if isinstance(x, bool):
        raise UsageError(f"{where}: boolean is not a number")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except ValueError:
            raise UsageError(f"{where}: cannot parse {x!r} as a rational") from None
    if isinstance(x, float):
        # decimal literals are read exactly, 1.5 -> 3/2
        try:
            return Fraction(repr(x))
        except ValueError:
            raise UsageError(f"{where}: {x!r} is not finite") from None
    if isinstance(x, list) and len(x) == 2:
        re_, im = _number(x[0], where), _number(x[1], where)
        return re_ if im == 0 else complex(float(re_), float(im))
    raise UsageError(f"{where}: unsupported number {x!r}")


def _vector(data, where: str) -> symfunc.PowerSumValues:
    if not isinstance(data, list):
        raise UsageError(f"{where}: expected an array of numbers")
    return symfunc.PowerSumValues(_number(x, f"{where}[{i}]") for i, x in enumerate(data))


def _graph_arg(text: str) -> ribbon.RibbonGraph:
    data = _load_json(text, "--graph")
    try:
        return ribbon.RibbonGraph.from_json(json.dumps(data))
    except (ValueError, TypeError) as exc:
        raise UsageError(f"--graph: {exc}") from None


def _sources_arg(text: str | None, g: ribbon.RibbonGraph, size: int | None) -> ribbon.SourceAssignment:
    if text is None:
        if size is None:
            raise UsageError("--size is required when no --sources are given")
        return ribbon.SourceAssignment.identity(g, size)
    data = _load_json(text, "--sources")
    try:
        src = ribbon.SourceAssignment.from_json(json.dumps(data))
        src.check_graph(g)
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"--sources: {exc}") from None
    if size is not None and size != src.N:
        raise UsageError(f"--size {size} disagrees with sources N={src.N}")
    return src


# --- output helpers -----------------------------------------------------------------

def fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, complex):
        if x.imag == 0:
            return repr(x.real)
        return f"{x.real!r}{x.imag:+}j"
    return str(x)


def _emit(args, human: str, payload: dict) -> None:
    if args.format == "json":
        print(json.dumps(payload, sort_keys=True))
    else:
        print(human)


# --- subcommands --------------------------------------------------------------------

def cmd_schur(args) -> int:
    lam = _partition_arg(args.lam, "--lambda")
    poly = symfunc.schur_in_powersums(lam, args.depth)
    _emit(args, poly.pretty(), {"lambda": list(lam), "terms": json.loads(poly.to_json())})
    return 0


def cmd_chartable(args) -> int:
    if args.weight < 1:
        raise UsageError("--weight must be >= 1")
    table = characters.character_table(args.weight, args.method)
    if args.format == "json":
        print(json.dumps({"d": args.weight, "rows": [
            {"lambda": list(lam), "mu": list(mu), "phi": fmt(v)} for (lam, mu), v in table.table.items()]},
            sort_keys=True))
    else:
        sys.stdout.write(table.to_tsv())
    return 0


def cmd_hurwitz(args) -> int:
    profiles = _partition_list_arg(args.profiles, "--profiles")
    try:
        inst = hurwitz.HurwitzInstance(args.euler, tuple(profiles))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    value = hurwitz.hurwitz_frobenius(inst)
    payload = {"euler": args.euler, "profiles": [list(p) for p in profiles], "value": fmt(value)}
    status = 0
    human = fmt(value)
    if args.check:
        brute = hurwitz.hurwitz_bruteforce(inst)
        payload["bruteforce"] = fmt(brute)
        status = 0 if brute == value else 1
        human += f"\nbruteforce={fmt(brute)} {'OK' if status == 0 else 'MISMATCH'}"
    _emit(args, human, payload)
    return status


def cmd_graph(args) -> int:
    g = _graph_arg(args.graph)
    faces = g.faces()
    payload = {"n": g.n, "vertices": [list(v) for v in g.vertices], "faces": [list(f) for f in faces],
               "v": g.v, "f": len(faces), "euler": g.euler(), "connected": g.is_connected(),
               "dual": [list(v) for v in g.dual().vertices]}
    human = "\n".join([
        f"edges n={g.n}  vertices v={g.v}  faces f={len(faces)}",
        f"euler characteristic = {g.euler()}" + (f" (genus {g.genus()})" if g.is_connected() else " (disconnected)"),
        "vertices: " + " ".join(str(v) for v in g.vertices),
        "faces:    " + " ".join(str(f) for f in faces),
    ])
    _emit(args, human, payload)
    return 0


_LABELS = {"evv": "vertex Schur integral <prod s(W_a(Z))> = c delta prod s(W*_b(I))",
           "evf": "face Schur integral <prod s(W*_b(Z))> = c delta prod s(W_a(I))",
           "polygons": "polygon gluing <prod p_mu(W*_b(Z))/Aut> = N^(-nd) sum H p_nu(W_a(I))"}


def cmd_verify(args) -> int:
    g = _graph_arg(args.graph)
    src = _sources_arg(args.sources, g, args.size)
    if not g.is_connected():
        raise UsageError("the graph must be connected")
    try:
        if args.identity in ("evv", "evf"):
            count = g.v if args.identity == "evv" else g.f
            if args.lambdas:
                lams = _partition_list_arg(args.lambdas, "--lambdas")
            elif args.lam:
                lams = [_partition_arg(args.lam, "--lambda")] * count
            else:
                raise UsageError("give --lambda or --lambdas")
            fn = ginibre.schur_integral_vertex if args.identity == "evv" else ginibre.schur_integral_face
            res = fn(g, src, lams)
        else:
            if not args.profiles:
                raise UsageError("polygons needs --profiles (one partition per face)")
            mus = _partition_list_arg(args.profiles, "--profiles")
            d = partitions.weight(mus[0]) if mus else 0
            res = ginibre.polygon_gluing_identity(g, src, mus, d)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    ok = res.holds
    extra = "".join(f" {k.upper()}={fmt(v)}" for k, v in res.extra.items())
    human = f"[{_LABELS[args.identity]}]\nLHS={fmt(res.lhs)} RHS={fmt(res.rhs)}{extra} {'OK' if ok else 'FAIL'}"
    for fl in res.flags:
        human += f"\nwarning: {fl}"
    payload = {"identity": args.identity, "lhs": fmt(res.lhs), "rhs": fmt(res.rhs), "holds": ok,
               "flags": list(res.flags), **{k: fmt(v) for k, v in res.extra.items()}}
    _emit(args, human, payload)
    return 0 if ok else 1


_TR = re.compile(r"tr\(([^()]*)\)")
_TERM_COEFF = re.compile(r"^\s*([+-]?\s*\d+(?:/\d+)?)?\s*\*?\s*")


def parse_observable(text: str, consts: dict) -> ginibre.TraceObservable:
    """Sums of products of traces, e.g. ``tr(1 A -1 B) + 1/2*tr(1) tr(-1)``.

    Integer tokens i / -i are Z_i / Z_i^dagger; other tokens name constants."""
    obs = ginibre.TraceObservable({}, consts)
    pieces = re.split(r"\+(?![^()]*\))", text)
    for piece in pieces:
        piece = piece.strip()
        if not piece:
            continue
        m = _TERM_COEFF.match(piece)
        coeff = Fraction(m.group(1).replace(" ", "")) if m and m.group(1) else Fraction(1)
        rest = piece[m.end():] if m else piece
        words = _TR.findall(rest)
        leftover = _TR.sub("", rest).replace("*", "").strip()
        if leftover or not words:
            raise UsageError(f"--observable: cannot parse term {piece!r}")
        term = ginibre.TraceObservable.constant(coeff)
        for w in words:
            toks = []
            for t in w.split():
                if re.fullmatch(r"[+-]?\d+", t):
                    toks.append(int(t))
                elif t in consts:
                    toks.append(t)
                else:
                    raise UsageError(f"--observable: unknown token {t!r} (no such constant)")
            term = term * ginibre.TraceObservable.trace(toks, consts)
        obs = obs + term
    return obs


def _consts_arg(text: str | None) -> dict:
    if text is None:
        return {}
    data = _load_json(text, "--consts")
    if not isinstance(data, dict):
        raise UsageError("--consts: expected an object of named matrices")
    import numpy as np
    out = {}
    for name, rows in data.items():
        try:
            out[name] = np.array([[_number(x, f"--consts[{name}][{i}][{j}]") for j, x in enumerate(r)]
                                  for i, r in enumerate(rows)], dtype=object)
        except TypeError:
            raise UsageError(f"--consts[{name}]: expected a matrix") from None
    return out


def cmd_mc(args) -> int:
    consts = _consts_arg(args.consts)
    obs = parse_observable(args.observable, consts)
    n = args.matrices or max(obs.matrices_used() or {1})
    try:
        spec = ginibre.EnsembleSpec(n, args.size)
        est = ginibre.mc_expect(obs, spec, args.samples, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    payload = {"mean": [est.mean.real, est.mean.imag], "stderr": est.stderr, "samples": est.samples,
               "seed": args.seed, "N": args.size, "n": n}
    human = f"mean = {fmt(est.mean)} +/- {est.stderr:.6g}  ({est.samples} samples, seed {args.seed})"
    status = 0
    if args.exact:
        exact = ginibre.wick_exact(obs, spec)
        ok = est.agrees(exact)
        payload["wick"] = fmt(exact)
        payload["agrees"] = ok
        human += f"\nwick = {fmt(exact)}  {'OK' if ok else 'FAIL'} (5 sigma)"
        status = 0 if ok else 1
    _emit(args, human, payload)
    return status


def cmd_tau(args) -> int:
    if args.tau_cmd == "cl":
        res = tau.cauchy_littlewood(args.depth, args.convention)
        ok = res.holds
        payload = {"depth": args.depth, "convention": args.convention, "holds": ok,
                   "terms": len(res.lhs.terms),
                   "mismatches": [{"mu": list(mu), "nu": list(nu), "lhs": fmt(a), "rhs": fmt(b)}
                                  for (mu, nu), (a, b) in res.mismatches().items()]}
        human = f"[Cauchy-Littlewood, convention {args.convention}] D={args.depth}: " + \
            ("LHS == RHS OK" if ok else f"FAIL (differing coefficients: {len(res.mismatches())})")
        for (mu, nu), (a, b) in sorted(res.mismatches().items())[:5]:
            human += f"\n  coefficient of p{list(mu)} pt{list(nu)}: LHS={fmt(a)} RHS={fmt(b)}"
        _emit(args, human, payload)
        return 0 if ok else 1

    if args.tau_cmd == "round-dance":
        data = _load_json(args.times, "--times")
        if not isinstance(data, dict) or "p" not in data or "pt" not in data:
            raise UsageError('--times: expected {"p": [[...], ...], "pt": [[...], ...]}')
        p = [_vector(v, f"--times.p[{i}]") for i, v in enumerate(data["p"])]
        pt = [_vector(v, f"--times.pt[{i}]") for i, v in enumerate(data["pt"])]
        try:
            spec = tau.TauSeriesSpec(args.components, args.depth, p, pt, args.kappa_max)
        except ValueError as exc:
            raise UsageError(f"--times: {exc}") from None
        value = tau.round_dance(spec)
        _emit(args, f"[round dance] {fmt(value)}", {"value": fmt(value), "components": args.components,
                                                     "depth": args.depth})
        return 0

    if args.tau_cmd == "hyp":
        data = _load_json(args.times, "--times")
        if not isinstance(data, dict) or "p1" not in data or "p2" not in data:
            raise UsageError('--times: expected {"p1": [...], "p2": [...]}')
        a_terms = [_number(x, "--factors") for x in _load_json(args.factors or "[]", "--factors")]
        levels = _load_json(args.levels or "[]", "--levels")
        if not all(isinstance(x, int) for x in levels):
            raise UsageError("--levels: expected integers")
        p1, p2 = _vector(data["p1"], "--times.p1"), _vector(data["p2"], "--times.p2")
        if len(p1) < args.depth or len(p2) < args.depth:
            raise UsageError("--times: vectors shorter than --depth")
        value = tau.hyp_tau(p1, p2, tau.ContentFactorList(tuple(a_terms), tuple(levels)),
                            args.edges, args.depth, args.size)
        _emit(args, f"[hypergeometric tau] {fmt(value)}", {"value": fmt(value)})
        return 0

    # generating
    g = _graph_arg(args.graph)
    src = _sources_arg(args.sources, g, args.size)
    data = _load_json(args.times, "--times")
    if not isinstance(data, list) or len(data) != g.v:
        raise UsageError(f"--times: expected a list of {g.v} time vectors (one per vertex)")
    p_list = [_vector(v, f"--times[{i}]") for i, v in enumerate(data)]
    if any(len(v) < args.depth for v in p_list):
        raise UsageError("--times: vectors shorter than --depth")
    if args.way2 in ("mc", "both") and args.seed is None:
        raise UsageError("--seed is required for Monte Carlo")
    res = tau.generating_expectation(g, src, p_list, args.depth, way2=args.way2,
                                     samples=args.samples, seed=args.seed)
    payload = {"schur_sum": fmt(res.schur_sum), "holds": res.holds, "flags": list(res.flags)}
    human = f"[averaged round dance] schur sum = {fmt(res.schur_sum)}"
    if res.wick is not None:
        payload["wick"] = fmt(res.wick)
        human += f"\nwick = {fmt(res.wick)}"
    if res.mc is not None:
        payload["mc"] = {"mean": [res.mc.mean.real, res.mc.mean.imag], "stderr": res.mc.stderr}
        human += f"\nmc = {fmt(res.mc.mean)} +/- {res.mc.stderr:.6g}"
    human += "\n" + ("OK" if res.holds else "FAIL")
    _emit(args, human, payload)
    return 0 if res.holds else 1


# --- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="taulab", description=__doc__.splitlines()[0])
    parser.add_argument("--format", choices=["human", "json"], default="human")
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("schur", help="Schur polynomial in power sums")
    p.add_argument("--lambda", dest="lam", required=True)
    p.add_argument("--depth", type=int, default=None)
    p.set_defaults(func=cmd_schur)

    p = sub.add_parser("chartable", help="normalized character table (TSV)")
    p.add_argument("--weight", type=int, required=True)
    p.add_argument("--method", choices=["extract", "mn"], default="extract")
    p.set_defaults(func=cmd_chartable)

    p = sub.add_parser("hurwitz", help="Hurwitz number by the character formula")
    p.add_argument("--euler", type=int, required=True)
    p.add_argument("--profiles", required=True)
    p.add_argument("--check", action="store_true", help="also count factorizations")
    p.set_defaults(func=cmd_hurwitz)

    p = sub.add_parser("graph", help="faces, Euler characteristic and dual of a ribbon graph")
    p.add_argument("--graph", required=True)
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("verify", help="check a Gaussian integral identity exactly")
    p.add_argument("identity", choices=["evv", "evf", "polygons"])
    p.add_argument("--graph", required=True)
    p.add_argument("--sources")
    p.add_argument("--size", type=int)
    p.add_argument("--lambda", dest="lam")
    p.add_argument("--lambdas")
    p.add_argument("--profiles")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("mc", help="Monte Carlo estimate of a trace observable")
    p.add_argument("--observable", required=True)
    p.add_argument("--consts")
    p.add_argument("--size", type=int, default=4)
    p.add_argument("--matrices", type=int)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--exact", action="store_true", help="compare with exact Wick contraction")
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("tau", help="tau-function series")
    tsub = p.add_subparsers(dest="tau_cmd", required=True)
    t = tsub.add_parser("cl")
    t.add_argument("--depth", type=int, default=5)
    t.add_argument("--convention", choices=list(tau.CONVENTIONS), default="alternating")
    t = tsub.add_parser("round-dance")
    t.add_argument("--components", type=int, required=True)
    t.add_argument("--times", required=True)
    t.add_argument("--depth", type=int, required=True)
    t.add_argument("--kappa-max", type=int)
    t = tsub.add_parser("hyp")
    t.add_argument("--factors")
    t.add_argument("--levels")
    t.add_argument("--depth", type=int, required=True)
    t.add_argument("--times", required=True)
    t.add_argument("--edges", type=int, default=0)
    t.add_argument("--size", type=int, default=1)
    t = tsub.add_parser("generating")
    t.add_argument("--graph", required=True)
    t.add_argument("--sources")
    t.add_argument("--size", type=int)
    t.add_argument("--times", required=True)
    t.add_argument("--depth", type=int, required=True)
    t.add_argument("--way2", choices=["wick", "mc", "both", "none"], default="wick")
    t.add_argument("--samples", type=int, default=10000)
    t.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_tau)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"taulab: error: {exc}", file=sys.stderr)
        return 2


run = main

if __name__ == "__main__":
    sys.exit(main())
