"""Command line front end.  JSON reports go to stdout, a short summary to stderr.

Exit codes: 0 certified, 1 violated or improvement found, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .delaunay import carnot_audit, delaunay_contains_shortest, delaunay_triangulation, triangulation_to_dict
from .extremal import NAMES, CylinderSpec, Slit, delaunay_of, global_max_surface, named_example
from .geometry import Mat2
from .saddle import DEFAULT_BUDGET, BudgetExceeded, enumerate_saddle_connections, systole
from .surface import StratumSignature, SurfaceError, apply_matrix, load_surface, save_surface
from . import verify as V

SCHEMA_VERSION = 1
CHECKS = ("global", "local-criterion", "kissing", "rigidity", "probe")


class InputError(Exception):
    pass


def _budget() -> int:
    raw = os.environ.get("FLATSYS_BUDGET")
    if not raw:
        return DEFAULT_BUDGET
    try:
        val = int(raw)
    except ValueError:
        raise InputError(f"FLATSYS_BUDGET must be an integer, got {raw!r}") from None
    if val <= 0:
        raise InputError("FLATSYS_BUDGET must be positive")
    return val


def _load(path):
    try:
        return load_surface(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None
    except SurfaceError as exc:
        raise InputError(f"{path}: {exc}") from None


def _emit(doc, summary):
    doc = dict(doc)
    doc.setdefault("schema_version", SCHEMA_VERSION)
    sys.stdout.write(json.dumps(doc, indent=1, sort_keys=True, default=_jsonable))
    sys.stdout.write("\n")
    if summary:
        print(summary, file=sys.stderr)


def _jsonable(obj):
    if isinstance(obj, V.Deformation):
        return obj.deltas.tolist()
    if hasattr(obj, "tolist"):
        return obj.tolist()
    return str(obj)


def _surface_info(s):
    return {"name": s.name, "genus": s.genus, "stratum": list(s.stratum.orders), "area": float(s.area)}


def cmd_systole(args):
    s = _load(args.file)
    rep = systole(s, budget=_budget())
    doc = {"command": "systole", "surface": _surface_info(s), **rep.to_dict()}
    _emit(doc, f"systole {rep.systole:.12g}, {rep.count} shortest connection(s)")
    return 0


def cmd_enumerate(args):
    s = _load(args.file)
    if not args.lmax > 0:
        raise InputError("--lmax must be positive")
    conns = enumerate_saddle_connections(s, args.lmax, budget=_budget())
    doc = {
        "command": "enumerate",
        "surface": _surface_info(s),
        "lmax": args.lmax,
        "count": len(conns),
        "connections": [c.to_dict() for c in conns],
    }
    _emit(doc, f"{len(conns)} saddle connection(s) of length <= {args.lmax}")
    return 0


def cmd_delaunay(args):
    s = _load(args.file)
    tri = delaunay_triangulation(s, seed=args.seed)
    cont = delaunay_contains_shortest(s, seed=args.seed, budget=_budget())
    doc = {
        "command": "delaunay",
        "surface": _surface_info(s),
        "triangulation": triangulation_to_dict(tri),
        "flips": tri.flips,
        "contains_shortest": cont.ok,
        "shortest_count": cont.count,
    }
    sys2 = systole(s, tri=tri, budget=_budget()).systole2
    if float(sys2) >= 1.0 - 1e-9:
        doc["carnot"] = carnot_audit(tri, sys2).to_dict()
    _emit(doc, f"{tri.num_triangles} triangles after {tri.flips} flip(s); shortest connections are edges: {cont.ok}")
    return 0 if cont.ok else 1


def cmd_verify(args):
    s = _load(args.file)
    check = args.check
    if check in ("global", "local-criterion") and not s.exact:
        raise InputError(f"--check {check} needs an exact surface")
    if check == "global":
        rep = V.check_global_max(s)
    elif check == "local-criterion":
        rep = V.check_local_max_criterion(s)
    elif check == "kissing":
        try:
            rep = V.kissing_audit(s)
        except AssertionError as exc:
            rep = {"check": "kissing", "ok": False, "error": str(exc)}
    elif check == "rigidity":
        rep = V.first_order_rigidity(s)
        if not rep["ok"]:
            w = V.flex_witness(s, step=args.step)
            rep["witness"] = None if w is None else {k: v for k, v in w.items()}
    else:
        pr = V.perturbation_probe(s, steps=(args.step,), trials=args.trials, seed=args.seed)
        rep = pr.to_dict()
        rep["ok"] = pr.verdict == V.NO_IMPROVEMENT
    rep = dict(rep, command="verify", surface=_surface_info(s))
    verdict = rep.get("verdict", "ok" if rep["ok"] else "violated")
    _emit(rep, f"{check}: {verdict}")
    return 0 if rep["ok"] else 1


def _write_or_print(s, out, label):
    if out:
        try:
            save_surface(s, out)
        except OSError as exc:
            raise InputError(f"cannot write {out}: {exc.strerror or exc}") from None
    doc = {"surface": _surface_info(s), "output": out}
    if not out:
        from .surface import surface_to_dict

        doc["data"] = surface_to_dict(s)
    return doc


def cmd_example(args):
    if args.name not in NAMES:
        raise InputError(f"unknown example {args.name!r}; choose from {', '.join(NAMES)}")
    s = named_example(args.name)
    doc = dict(_write_or_print(s, args.output, args.name), command="example")
    _emit(doc, f"{args.name}: stratum {s.stratum}, genus {s.genus}")
    return 0


def cmd_construct(args):
    try:
        orders = [int(x) for x in args.stratum.split(",") if x.strip()]
        sig = StratumSignature.from_orders(orders)
    except ValueError as exc:
        raise InputError(f"bad --stratum: {exc}") from None
    spec = CylinderSpec.parse(args.cylinder) if args.cylinder else None
    try:
        s = global_max_surface(sig, cylinder=spec)
    except (ValueError, KeyError) as exc:
        raise InputError(str(exc)) from None
    doc = dict(_write_or_print(s, args.output, str(sig)), command="construct")
    _emit(doc, f"constructed {s.stratum}, genus {s.genus}")
    return 0


def _pick_slit(s, idx, label):
    tri = delaunay_of(s)
    rep = systole(s, tri=tri, budget=_budget())
    if not 0 <= idx < rep.count:
        raise InputError(f"--slit-{label} must be in 0..{rep.count - 1}")
    return Slit(s, rep.connections[idx], tri)


def cmd_surgery(args):
    from .extremal import slit_glue

    a, b = _load(args.a), _load(args.b)
    if not (a.exact and b.exact):
        raise InputError("surgery needs exact surfaces")
    sa = _pick_slit(a, args.slit_a, "a")
    sb = _pick_slit(b, args.slit_b, "b")
    target = sa.connection.holonomy
    if sb.connection.length2 != sa.connection.length2:
        raise InputError("slits have different lengths")
    for k in range(6):
        m = Mat2.rotation_sixth(k)
        if m.apply(sb.connection.holonomy) != target:
            continue
        rb = b if k == 0 else apply_matrix(b, m)
        tri = delaunay_of(rb)
        rep = systole(rb, tri=tri, budget=_budget())
        old = (sb.connection.start, sb.connection.end)
        cands = [c for c in rep.connections if c.holonomy == target]
        cands.sort(key=lambda c: (c.start, c.end) != old)
        if cands:
            sb = Slit(rb, cands[0], tri)
            break
    else:
        raise InputError("no rotation by a multiple of 60 degrees aligns the slits")
    try:
        s = slit_glue(sa, sb, name=f"{a.name or 'a'} # {b.name or 'b'}")
    except (ValueError, SurfaceError) as exc:
        raise InputError(str(exc)) from None
    doc = dict(_write_or_print(s, args.output, "surgery"), command="surgery", rotation_sixths=k)
    _emit(doc, f"glued surface in {s.stratum}, genus {s.genus}")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="flatsys", description="Systoles of translation surfaces.")
    p.add_argument("--version", action="version", version=f"flatsys {__version__}")
    sub = p.add_subparsers(dest="command")

    q = sub.add_parser("systole", help="shortest saddle connections")
    q.add_argument("file")
    q.set_defaults(func=cmd_systole)

    q = sub.add_parser("enumerate", help="all saddle connections up to a length")
    q.add_argument("file")
    q.add_argument("--lmax", type=float, required=True)
    q.set_defaults(func=cmd_enumerate)

    q = sub.add_parser("delaunay", help="Delaunay triangulation and Carnot audit")
    q.add_argument("file")
    q.add_argument("--seed", type=int, default=None)
    q.set_defaults(func=cmd_delaunay)

    q = sub.add_parser("verify", help="certification checks")
    q.add_argument("file")
    q.add_argument("--check", choices=CHECKS, required=True)
    q.add_argument("--trials", type=int, default=500)
    q.add_argument("--step", type=float, default=1e-3)
    q.add_argument("--seed", type=int, default=0)
    q.set_defaults(func=cmd_verify)

    q = sub.add_parser("example", help="write a named example surface")
    q.add_argument("name")
    q.add_argument("-o", "--output")
    q.set_defaults(func=cmd_example)

    q = sub.add_parser("construct", help="a global maximum in a stratum")
    q.add_argument("--stratum", required=True, help="comma separated orders, e.g. 2,0")
    q.add_argument("--cylinder", help='one-cylinder diagram "top labels / bottom labels"')
    q.add_argument("-o", "--output")
    q.set_defaults(func=cmd_construct)

    q = sub.add_parser("surgery", help="glue two surfaces along shortest connections")
    q.add_argument("a")
    q.add_argument("b")
    q.add_argument("--slit-a", type=int, required=True)
    q.add_argument("--slit-b", type=int, required=True)
    q.add_argument("-o", "--output")
    q.set_defaults(func=cmd_surgery)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    if not getattr(args, "func", None):
        parser.print_usage(sys.stderr)
        return 2
    try:
        return args.func(args)
    except InputError as exc:
        print(f"flatsys: error: {exc}", file=sys.stderr)
        return 2
    except BudgetExceeded as exc:
        print(f"flatsys: error: {exc}; raise FLATSYS_BUDGET", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
