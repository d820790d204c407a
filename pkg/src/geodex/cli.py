"""Command-line entry point: ``geodex <command> ...``.

Every report is a JSON-able dict that starts with the resolved run
configuration, so identical invocations give byte-identical output.
"""

from __future__ import annotations

import argparse
import inspect
import json
import os
import sys
from typing import Any, Sequence

import numpy as np

from . import __version__, kernels
from .algebra import subspace_make
from .errors import BadArgs, GeodexError, MalformedInput
from .families import (
    BUILDERS,
    GeneratorSet,
    Graph,
    bipartite_double,
    folded,
    graph_from_json,
    graph_to_json,
    halved,
    is_automorphism,
    line_graph,
    load_graph,
    save_graph,
)
from . import metrics, polar_geo, symmetry
from .spaces import canonical_kind, space_make

# Neutral identifiers for the statements each command checks; the ledger maps them to their sources.
CLAIMS = {
    "array": "claim:intersection-array",
    "census": "claim:census-product",
    "bijection": "claim:flag-bijection",
    "primitivity": "claim:primitivity",
    "gtg": "claim:geodesic-transitive",
    "dtg": "claim:distance-transitive",
    "orbits": "claim:orbit-count",
    "screens": "claim:divisibility-screen",
    "pg-orbits": "claim:pg-orbit-profile",
    "pg-distance": "claim:pg-distance",
    "pg-opposite": "claim:pg-opposite",
    "pg-normalize": "claim:pg-normal-form",
    "pg-types": "claim:pg-type-count",
}

FAMILY_ALIASES = {
    "johnson": "johnson", "j": "johnson",
    "odd": "odd",
    "doubledodd": "doubled_odd",
    "foldedjohnson": "folded_johnson",
    "hamming": "hamming", "h": "hamming",
    "grassmann": "grassmann", "g": "grassmann",
    "doubledgrassmann": "doubled_grassmann",
    "incidence": "incidence_design", "incidencedesign": "incidence_design",
    "opposites": "incidence_opposites", "incidenceopposites": "incidence_opposites",
    "dualpolar": "dual_polar",
    "halfdualpolar": "half_dual_polar",
    "pg": "polar_grassmann", "polargrassmann": "polar_grassmann",
    "bilinear": "bilinear_forms", "bilinearforms": "bilinear_forms", "bf": "bilinear_forms",
    "alternating": "alternating_forms", "alternatingforms": "alternating_forms", "af": "alternating_forms",
    "hermitian": "hermitian_forms", "hermitianforms": "hermitian_forms", "hf": "hermitian_forms",
    "quadrangle": "symplectic_quadrangle_incidence",
    "symplecticquadrangleincidence": "symplectic_quadrangle_incidence",
    "cycle": "cycle", "c": "cycle",
    "complete": "complete",
    "completebipartite": "complete_bipartite",
}

INT_PARAMS = ("n", "k", "q", "m", "r", "omega")


class Failure(Exception):
    """A check failed; carries the report to print before exiting with status 1."""

    def __init__(self, report: dict):
        super().__init__("check failed")
        self.report = report


# -- configuration and output ---------------------------------------------------------

def resolve_threads(value: int | None) -> int:
    if value is not None:
        if value < 1:
            raise BadArgs("--threads must be positive")
        return value
    return kernels.default_threads()


def config_of(args: argparse.Namespace) -> dict:
    skip = {"func", "format", "out", "threads", "seed", "command"}
    params = {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}
    return {"command": args.command, "params": params, "seed": args.seed, "threads": args.threads,
            "format": args.format, "backend": kernels.backend(), "version": __version__}


def _flatten(obj: Any, prefix: str = "") -> list[tuple[str, str]]:
    if isinstance(obj, dict):
        out = []
        for k in sorted(obj):
            out += _flatten(obj[k], f"{prefix}.{k}" if prefix else str(k))
        return out
    if isinstance(obj, list) and obj and all(isinstance(x, (dict, list)) for x in obj):
        out = []
        for i, x in enumerate(obj):
            out += _flatten(x, f"{prefix}[{i}]")
        return out
    return [(prefix, json.dumps(obj, sort_keys=True, separators=(",", ":")) if not isinstance(obj, str) else obj)]


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=True) + "\n"
    rows = _flatten(report)
    if fmt == "tsv":
        return "".join(f"{k}\t{v}\n" for k, v in rows)
    lines = []
    if "summary" in report:
        lines.append(str(report["summary"]))
    lines += [f"{k}: {v}" for k, v in rows if k != "summary"]
    return "\n".join(lines) + "\n"


def emit(report: dict, args: argparse.Namespace) -> None:
    text = render(report, args.format)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- graph acquisition -----------------------------------------------------------------

def family_name(raw: str) -> str:
    key = raw.lower().replace("-", "").replace("_", "")
    if key in FAMILY_ALIASES:
        return FAMILY_ALIASES[key]
    if raw in BUILDERS:
        return raw
    raise BadArgs(f"unknown family {raw!r}")


def make_space(args: argparse.Namespace):
    if args.space is None or args.omega is None or args.q is None:
        raise BadArgs("formed-space families need --space, --omega and --q")
    return space_make(canonical_kind(args.space), args.omega, args.q)


def build_family(args: argparse.Namespace, name: str) -> tuple[Graph, GeneratorSet]:
    fam = family_name(name)
    builder = BUILDERS[fam]
    kwargs: dict[str, Any] = {}
    for pname in inspect.signature(builder).parameters:
        if pname == "space":
            kwargs["space"] = make_space(args)
        else:
            val = getattr(args, pname, None)
            if val is None:
                raise BadArgs(f"family {fam} needs --{pname}")
            kwargs[pname] = val
    g, gens = builder(**kwargs)
    derive = getattr(args, "derive", None)
    if derive:
        g, gens = derive_graph(g, gens, derive)
    return g, gens


def derive_graph(g: Graph, gens: GeneratorSet, how: str) -> tuple[Graph, GeneratorSet]:
    if how == "halved":
        return halved(g, "plus", gens)
    if how == "folded":
        return folded(g, gens)
    if how == "line":
        return line_graph(g, gens)
    if how == "double":
        return bipartite_double(g, gens)
    raise BadArgs(f"unknown derivation {how!r}")


def load_graph_file(path: str) -> tuple[Graph, GeneratorSet | None]:
    try:
        with open(path, "rb") as fh:
            head = fh.read(4)
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc}") from exc
    if head == b"GDX1":
        return load_graph(path), None
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedInput(f"not a graph file: {exc}") from exc
    if not isinstance(obj, dict):
        raise MalformedInput("graph file must hold a JSON object")
    g = graph_from_json(obj)
    perms = obj.get("generators")
    if perms is None:
        return g, None
    try:
        arr = [np.asarray(p, dtype=np.int32) for p in perms]
        for p in arr:
            symmetry.perm_check(p, g.n)
    except (GeodexError, ValueError, TypeError) as exc:
        raise MalformedInput(f"bad generators: {exc}") from exc
    if not all(is_automorphism(g, p) for p in arr):
        raise MalformedInput("listed generators are not automorphisms")
    prov = obj.get("provenance", ["file"] * len(arr))
    return g, GeneratorSet(arr, list(prov))


def acquire(args: argparse.Namespace, need_gens: bool = False) -> tuple[Graph, GeneratorSet | None]:
    if getattr(args, "graph", None):
        g, gens = load_graph_file(args.graph)
        if need_gens and gens is None:
            raise BadArgs("this check needs automorphism generators; use a JSON graph file written by build")
        return g, gens
    if not getattr(args, "family", None):
        raise BadArgs("give --family (with its parameters) or --graph FILE")
    return build_family(args, args.family)


def graph_summary(g: Graph) -> dict:
    return {"name": g.name, "n": g.n, "valency": g.valency if _regular(g) else None,
            "diameter": g.diameter, "edges": g.num_edges}


def _regular(g: Graph) -> bool:
    d = g.degrees() if callable(g.degrees) else g.degrees
    return bool(len(d) and (d == d[0]).all())


# -- reports -----------------------------------------------------------------------------

def report(args: argparse.Namespace, claim: str, result: dict, passed: bool, summary: str) -> dict:
    out = {"config": config_of(args), "claim": CLAIMS[claim], "result": result,
           "pass": passed, "summary": summary}
    if not passed:
        raise Failure(out)
    return out


def do_array(args) -> dict:
    g, _ = acquire(args)
    ia = metrics.intersection_array(g)
    if isinstance(ia, metrics.IntersectionArray):
        res = {"graph": graph_summary(g), "b": list(ia.b), "c": list(ia.c), "distance_regular": True}
        return report(args, "array", res, True, f"{g.name}: intersection array {ia}")
    w = ia
    res = {"graph": graph_summary(g), "distance_regular": False,
           "witness": {"distance": w.distance, "count": w.kind, "pair_low": list(w.pair_low), "value_low": w.value_low,
                       "pair_high": list(w.pair_high), "value_high": w.value_high}}
    return report(args, "array", res, False,
                  f"{g.name}: not distance-regular ({w.kind}_{w.distance} takes {w.value_low} and {w.value_high})")


def do_census(args) -> dict:
    g, _ = acquire(args)
    try:
        c = metrics.geodesic_census(g)
    except AssertionError as exc:
        raise Failure({"config": config_of(args), "claim": CLAIMS["census"], "pass": False,
                       "result": {"error": str(exc)}, "summary": str(exc)})
    res = {"graph": graph_summary(g), "counts": c.counts, "formula": c.formula, "matches": c.matches}
    return report(args, "census", res, c.matches is not False, f"{g.name}: geodesic counts {c.counts}")


def do_bijection(args) -> dict:
    g, _ = acquire(args)
    r = metrics.bijection_check(g, args.x, args.y)
    return report(args, "bijection", {"graph": graph_summary(g), **r.as_dict()}, r.passed,
                  f"{g.name}: {r.flags} flags, {r.geodesic_count} geodesics, bijective={r.passed}")


def do_primitivity(args) -> dict:
    g, gens = acquire(args)
    kind = metrics.primitivity(g)
    res = {"graph": graph_summary(g), "class": kind}
    if gens is not None:
        res["group_primitive"] = symmetry.is_primitive_group(gens.perms, g.n)
    return report(args, "primitivity", res, True, f"{g.name}: {kind}")


def _verdict_dict(v: symmetry.Verdict) -> dict:
    return {"holds": v.holds, "orbit_counts": v.orbit_counts, "reports": [r.as_dict() for r in v.reports]}


def do_gtg(args) -> dict:
    g, gens = acquire(args, need_gens=True)
    v = symmetry.check_geodesic_transitive(g, gens.perms)
    res = {"graph": graph_summary(g), **_verdict_dict(v),
           "note": "verdict relative to the generated group"}
    return report(args, "gtg", res, v.holds, f"{g.name}: geodesic orbits per length {v.orbit_counts}")


def do_dtg(args) -> dict:
    g, gens = acquire(args, need_gens=True)
    v = symmetry.check_distance_transitive(g, gens.perms)
    res = {"graph": graph_summary(g), **_verdict_dict(v), "note": "verdict relative to the generated group"}
    return report(args, "dtg", res, v.holds, f"{g.name}: pair orbits per distance {v.orbit_counts}")


def do_orbits(args) -> dict:
    g, gens = acquire(args, need_gens=True)
    L = args.length
    if args.object == "pairs":
        D = g.distances()
        pairs = np.argwhere(D == L).astype(np.int32)
        rep = symmetry.orbits_on_tuples(gens.perms, pairs, g.n, f"pairs-at-distance-{L}")
    elif args.object == "geodesics":
        if not 0 <= L <= g.diameter:
            raise BadArgs("geodesic length out of range")
        rep = symmetry.geodesic_orbits(g, gens.perms, L) if L else symmetry.orbits_on_tuples(
            gens.perms, np.arange(g.n).reshape(-1, 1), g.n, "geodesics-of-length-0")
    else:
        rep = symmetry.orbits_on_arcs(g, gens.perms, L)
    res = {"graph": graph_summary(g), **rep.as_dict(), "total": rep.total}
    return report(args, "orbits", res, True, f"{g.name}: {rep.count} orbit(s) on {rep.object_class}")


def do_screens(args) -> dict:
    r = symmetry.census_screens(args.qmax)
    return report(args, "screens", r, r["passed"],
                  f"{r['taylor_checked']} Taylor screens and {len(r['sporadic'])} sporadic screens; "
                  f"non-geodesic-transitivity confirmed={r['passed']}")


# -- polar Grassmann commands ---------------------------------------------------------

def _pg_graph(args) -> tuple[Any, Graph, GeneratorSet]:
    space = make_space(args)
    if args.k is None:
        raise BadArgs("pg commands need --k")
    from .families import polar_grassmann

    g, gens = polar_grassmann(space, args.k)
    return space, g, gens


def _vertex(space, g: Graph, token: str):
    token = token.strip()
    if token.lstrip("-").isdigit():
        i = int(token)
        if not 0 <= i < g.n:
            raise BadArgs(f"vertex index {i} out of range 0..{g.n - 1}")
        return g.labels[i]
    try:
        rows = json.loads(token)
        return subspace_make(space.field, [tuple(int(a) for a in r) for r in rows], space.n)
    except (json.JSONDecodeError, TypeError, ValueError) as exc:
        raise MalformedInput(f"cannot parse subspace {token!r}") from exc


def _basis(S) -> list[list[int]]:
    return [list(r) for r in S.basis]


def do_pg(args) -> dict:
    op = args.pg_op
    if op == "types":
        if args.m is None or args.omega is None or args.k is None:
            raise BadArgs("pg types needs --m, --omega and --k")
        types = polar_geo.enumerate_types(args.m, args.omega - args.k)
        total = polar_geo.nonopposite_orbit_count(args.m, args.omega, args.k)
        oracle = polar_geo.partition_oracle(args.m, args.omega - args.k)
        res = {"m": args.m, "cap": args.omega - args.k,
               "types": [{"t": list(t), "c_tau": polar_geo.c_tau(t)} for t in types],
               "L": total, "partition_oracle": oracle}
        return report(args, "pg-types", res, total == oracle, f"L({args.m}) = {total}")
    space, g, gens = _pg_graph(args)
    if op == "orbits":
        return _pg_orbits(args, space, g, gens)
    if args.x is None:
        raise BadArgs("pg commands need --x")
    X = _vertex(space, g, args.x)
    if op == "normalize":
        path = _pg_path(args, space, g, X)
        nf = polar_geo.pg_geodesic_normalize(space, path)
        res = {"path": [_basis(S) for S in path], "normal_form": nf.as_dict()}
        if nf.case == "F1":
            res["type"] = list(polar_geo.type_of(space, path))
        return report(args, "pg-normalize", res, True, f"normal form {nf.case}, pairing {nf.pairing}")
    if args.y is None:
        raise BadArgs("pg distance/opposite need --y")
    Y = _vertex(space, g, args.y)
    if op == "distance":
        d = polar_geo.pg_distance(space, args.k, X, Y)
        bfs = int(g.distances()[g.index(X), g.index(Y)])
        res = {"X": _basis(X), "Y": _basis(Y), "distance": d, "bfs": bfs}
        return report(args, "pg-distance", res, d == bfs, f"distance {d}")
    r = polar_geo.is_opposite(space, X, Y)
    res = {"X": _basis(X), "Y": _basis(Y), **r.as_dict()}
    return report(args, "pg-opposite", res, True, f"opposite={r.verdict}")


def _pg_path(args, space, g: Graph, X):
    if args.path:
        return [_vertex(space, g, t) for t in args.path.split(";")]
    if args.y is None:
        raise BadArgs("pg normalize needs --path or --y")
    Y = _vertex(space, g, args.y)
    geos = metrics.geodesics(g, g.index(X), g.index(Y))
    return [g.labels[v] for v in geos[0]]


def _pg_orbits(args, space, g: Graph, gens: GeneratorSet) -> dict:
    predicted = polar_geo.predicted_orbit_profile(space, args.k) if args.k < space.omega else None
    v = symmetry.check_geodesic_transitive(g, gens.perms)
    lengths = v.orbit_counts[1:]
    res = {"graph": graph_summary(g), "lengths": lengths, "predicted": predicted,
           "geodesic_transitive": v.holds}
    ok = predicted is None or lengths == predicted
    return report(args, "pg-orbits", res, ok, f"lengths: {lengths}")


# -- build ---------------------------------------------------------------------------------

def do_build(args) -> dict:
    g, gens = build_family(args, args.family)
    if args.save:
        if args.save.endswith(".gdx"):
            save_graph(g, args.save, "gdx")
        else:
            obj = graph_to_json(g)
            obj["generators"] = [p.tolist() for p in gens.perms]
            obj["provenance"] = list(gens.provenance)
            with open(args.save, "w") as fh:
                json.dump(obj, fh, sort_keys=True, separators=(",", ":"))
    s = graph_summary(g)
    res = {"graph": s, "generators": len(gens.perms), "saved": args.save}
    val = "" if s["valency"] is None else f" valency={s['valency']}"
    return {"config": config_of(args), "result": res, "pass": True,
            "summary": f"n={s['n']}{val} diameter={s['diameter']}"}


CHECKS = {
    "array": do_array,
    "gtg": do_gtg,
    "dtg": do_dtg,
    "primitivity": do_primitivity,
    "bijection": do_bijection,
    "screens": do_screens,
}


def do_check(args) -> dict:
    if args.kind == "pg-orbits":
        space, g, gens = _pg_graph(args)
        return _pg_orbits(args, space, g, gens)
    if args.kind == "screens" and args.qmax is None:
        args.qmax = 1000
    return CHECKS[args.kind](args)


# -- parser ----------------------------------------------------------------------------------

def _family_flags(p: argparse.ArgumentParser, family: bool = True) -> None:
    if family:
        p.add_argument("--family", help="family name, e.g. johnson, grassmann, dualpolar, pg")
        p.add_argument("--graph", help="graph file written by build (JSON keeps generators)")
    for name in INT_PARAMS:
        p.add_argument(f"--{name}", type=int)
    p.add_argument("--space", help="formed space kind: sp, o, o+, o-, u")
    p.add_argument("--derive", choices=["halved", "folded", "line", "double"])


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--format", choices=["json", "tsv", "text"], default="json")
    p.add_argument("--out")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="geodex", description="Geodesic structure of distance-transitive graphs.")
    parser.add_argument("--version", action="version", version=f"geodex {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="construct a graph and optionally save it")
    p.add_argument("family")
    _family_flags(p, family=False)
    p.add_argument("--save")
    p.set_defaults(func=do_build)

    p = sub.add_parser("check", help="run one verification")
    p.add_argument("kind", choices=["array", "gtg", "dtg", "primitivity", "bijection", "pg-orbits", "screens"])
    _family_flags(p)
    p.add_argument("--x", type=int)
    p.add_argument("--y", type=int)
    p.add_argument("--qmax", type=int)
    p.set_defaults(func=do_check)

    for name, fn, helptext in (("array", do_array, "intersection array or a witness"),
                               ("census", do_census, "geodesic counts per length"),
                               ("primitivity", do_primitivity, "primitive, bipartite or antipodal")):
        p = sub.add_parser(name, help=helptext)
        _family_flags(p)
        p.set_defaults(func=fn)

    p = sub.add_parser("bijection", help="flag-to-geodesic bijection check")
    _family_flags(p)
    p.add_argument("--x", type=int)
    p.add_argument("--y", type=int)
    p.set_defaults(func=do_bijection)

    p = sub.add_parser("orbits", help="orbits on pairs, geodesics or arcs")
    _family_flags(p)
    p.add_argument("--object", choices=["pairs", "geodesics", "arcs"], default="geodesics")
    p.add_argument("--length", type=int, default=1)
    p.set_defaults(func=do_orbits)

    p = sub.add_parser("screens", help="arithmetic divisibility screens")
    p.add_argument("--qmax", type=int, default=1000)
    p.set_defaults(func=do_screens)

    p = sub.add_parser("pg", help="polar Grassmann geodesic calculus")
    p.add_argument("pg_op", choices=["distance", "opposite", "normalize", "types", "orbits"])
    for name in ("omega", "q", "k", "m"):
        p.add_argument(f"--{name}", type=int)
    p.add_argument("--space", default="sp")
    p.add_argument("--x", help="vertex index or JSON basis")
    p.add_argument("--y", help="vertex index or JSON basis")
    p.add_argument("--path", help="';'-separated vertex indices or bases")
    p.set_defaults(func=do_pg)

    for sp in sub.choices.values():
        _common(sp)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.threads = resolve_threads(args.threads)
        os.environ["GEODEX_THREADS"] = str(args.threads)
        rep = args.func(args)
    except Failure as f:
        emit(f.report, args)
        return 1
    except GeodexError as exc:
        sys.stderr.write(f"geodex: {type(exc).__name__}: {exc}\n")
        return exc.exit_code
    emit(rep, args)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
