"""Command line entry point: ``cubetop <command> FILE [options]``.

Exit status: 0 pass/finite, 2 fail with witnesses, 3 inconclusive or over
budget, 1 input error. Every report is canonical JSON with ``"schema": 1``.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from .complex_core import DEFAULT_CELL_CAP, check_npc
from .cores import SubgroupRep
from .document import SCHEMA, canonical_json, load_document
from .errors import (
    BoundedModeInconclusive,
    BudgetExceeded,
    ClassBudgetExceeded,
    CubetopError,
    MalformedInput,
)
from .fiber_product import check_stable, fiber_product, is_symmetric, multiple_fiber_product, principal_components
from .fixtures import emit_fixture, fixture_names
from .graph_of_complexes import assemble_total_space, augment, check_gluing_criterion
from .hyperplanes import check_special, compute_walls
from .morphisms import check_local_isometry, elevations
from .parallel import resolve_jobs
from .small_cancellation import (
    check_helly,
    check_liftable_shells,
    check_small_cancellation,
    enumerate_pieces,
    systole,
)
from .stature import depth, enumerate_big_trees, height, stature

PASS, INPUT_ERROR, FAIL, INCONCLUSIVE = 0, 1, 2, 3
INCONCLUSIVE_ERRORS = (BudgetExceeded, BoundedModeInconclusive, ClassBudgetExceeded)


class Context:
    """Parsed arguments plus the loaded document and id lookups."""

    def __init__(self, args):
        self.args = args
        self.doc = load_document(args.file)
        self._ids = list(args.id or [])

    def take(self, block):
        """Next ``--id`` if one is left, otherwise the first object in ``block``."""
        wanted = self._ids.pop(0) if self._ids else None
        return self.doc.pick(block, wanted)

    def budgets(self, *names):
        return {n: getattr(self.args, n) for n in names}


def _verdict(ok):
    return PASS if ok else FAIL


# --- command handlers: each returns (result dict, exit status) ------------

def cmd_validate(ctx):
    doc = ctx.doc
    out = {}
    for block in ("complex", "map", "cover", "gog", "presentation", "family"):
        for key in doc.ids(block):
            obj = doc.get(block, key)
            if block == "complex":
                out.setdefault("complexes", {})[key] = obj.summary()
            else:
                out.setdefault(block, []).append(key)
    return out, PASS


def cmd_check_npc(ctx):
    key, X = ctx.take("complex")
    rep = check_npc(X)
    return {"complex": key, **rep.to_dict()}, _verdict(rep.passed)


def cmd_walls(ctx):
    key, X = ctx.take("complex")
    walls = compute_walls(X)
    return {"complex": key, "count": len(walls), "walls": [w.to_dict() for w in walls]}, PASS


def cmd_check_special(ctx):
    key, X = ctx.take("complex")
    rep = check_special(X)
    return {"complex": key, **rep.to_dict()}, _verdict(rep.special)


def cmd_check_li(ctx):
    key, f = ctx.take("map")
    rep = check_local_isometry(f)
    return {"map": key, **rep.to_dict()}, _verdict(rep.passed)


def cmd_cover(ctx):
    key, (C, p) = ctx.take("cover")
    return {"cover": key, "complex": C.to_dict(), "summary": C.summary(),
            "projection": p.to_dict()}, PASS


def cmd_elevate(ctx):
    mkey, f = ctx.take("map")
    ckey, cover = ctx.take("cover")
    els = elevations(f, cover)
    return {"map": mkey, "cover": ckey, "count": len(els),
            "elevations": [e.to_dict() for e in els]}, PASS


def _maps_for_product(ctx):
    """Maps named by ``--id``, else the first family, else the first two maps."""
    if ctx._ids:
        return [ctx.doc.map(k) for k in ctx._ids]
    if ctx.doc.ids("family"):
        return ctx.take("family")[1]
    return [ctx.take("map")[1], ctx.take("map")[1]]


def cmd_fiber(ctx):
    maps = _maps_for_product(ctx)
    comps = fiber_product(*maps) if len(maps) == 2 else multiple_fiber_product(maps)
    return {"factors": len(maps), "count": len(comps),
            "components": [c.to_dict() for c in comps]}, PASS


def cmd_symmetric(ctx):
    key, f = ctx.take("map")
    rep = is_symmetric(f)
    return {"map": key, **rep.to_dict()}, _verdict(rep.symmetric)


def cmd_principal(ctx):
    key, fam = ctx.take("family")
    res = principal_components(fam, ctx.args.depth)
    return {"family": key, "budgets": ctx.budgets("depth"), **res.to_dict()}, PASS


def cmd_stable(ctx):
    key, fam = ctx.take("family")
    rep = check_stable(fam)
    return {"family": key, **rep.to_dict()}, _verdict(rep.stable)


def cmd_gog_assemble(ctx):
    key, G = ctx.take("gog")
    return {"gog": key, "graph": G.summary(), **assemble_total_space(G).to_dict()}, PASS


def cmd_gog_augment(ctx):
    key, G = ctx.take("gog")
    extra = []
    for spec in ctx.args.extra or []:
        vname, _, mref = spec.partition(":")
        if vname not in G.vertex_names or not mref:
            raise MalformedInput(f"--extra expects VERTEX:MAP, got {spec!r}")
        extra.append((G.vertex_index(vname), ctx.doc.map(mref)))
    H = augment(G, extra)
    return {"gog": key, "graph": H.summary(), "total_space": assemble_total_space(H).to_dict()}, PASS


def cmd_gog_criterion(ctx):
    key, G = ctx.take("gog")
    rep = check_gluing_criterion(G, jobs=ctx.args.jobs)
    return {"gog": key, **rep.to_dict()}, _verdict(rep.passed)


def cmd_height(ctx):
    key, f = ctx.take("map")
    res = height(f, ctx.args.levels)
    return {"map": key, **res.to_dict()}, PASS if res.verdict == "finite" else INCONCLUSIVE


def cmd_depth(ctx):
    key, fam = ctx.take("family")
    res = depth([SubgroupRep(f) for f in fam], ctx.args.variant, ctx.args.depth)
    return {"family": key, **res.to_dict()}, PASS if res.certified else INCONCLUSIVE


def cmd_big_trees(ctx):
    key, G = ctx.take("gog")
    records = enumerate_big_trees(G, ctx.args.radius)
    open_ = any(r.status != "maximal-certified" for r in records)
    return {"gog": key, "budgets": ctx.budgets("radius"), "count": len(records),
            "records": [r.to_dict() for r in records]}, INCONCLUSIVE if open_ else PASS


def cmd_stature(ctx):
    key, G = ctx.take("gog")
    res = stature(G, ctx.args.depth, ctx.args.radius, jobs=ctx.args.jobs)
    return {"gog": key, **res.to_dict()}, PASS if res.verdict == "finite" else INCONCLUSIVE


def cmd_pieces(ctx):
    key, P = ctx.take("presentation")
    per = []
    for i in range(len(P.cones)):
        pieces = enumerate_pieces(P, i, ctx.args.ball)
        per.append({"cone": i, "count": len(pieces), "pieces": [p.to_dict() for p in pieces]})
    return {"presentation": key, "budgets": ctx.budgets("ball"), "cones": per}, PASS


def cmd_systole(ctx):
    key, P = ctx.take("presentation")
    rows, status = [], PASS
    for i in range(len(P.cones)):
        try:
            rows.append({"cone": i, **systole(P, i, ctx.args.ball, ctx.args.cap).to_dict()})
        except BoundedModeInconclusive as exc:
            rows.append({"cone": i, "systole": "inconclusive", "reason": str(exc)})
            status = INCONCLUSIVE
    return {"presentation": key, "budgets": ctx.budgets("ball"), "cones": rows}, status


def _sc_status(verdict):
    return {"pass": PASS, "fail": FAIL}.get(verdict, INCONCLUSIVE)


def cmd_check_c24(ctx):
    key, P = ctx.take("presentation")
    rep = check_small_cancellation(P, ctx.args.alpha, ctx.args.ball, ctx.args.ball)
    return {"presentation": key, **rep.to_dict()}, _sc_status(rep.verdict)


def cmd_liftable_shells(ctx):
    akey, A = ctx.take("map")
    pkey, P = ctx.take("presentation")
    rep = check_liftable_shells(A, P, ctx.args.ball, ctx.args.ball)
    verdict = rep.to_dict()["verdict"]
    return {"map": akey, "presentation": pkey, **rep.to_dict()}, _sc_status(verdict)


def cmd_helly(ctx):
    key, P = ctx.take("presentation")
    rep = check_helly(P.cones)
    return {"presentation": key, **rep.to_dict()}, _verdict(rep.passed)


COMMANDS = {
    "validate": cmd_validate,
    "check-npc": cmd_check_npc,
    "walls": cmd_walls,
    "check-special": cmd_check_special,
    "check-li": cmd_check_li,
    "cover": cmd_cover,
    "elevate": cmd_elevate,
    "fiber": cmd_fiber,
    "symmetric": cmd_symmetric,
    "principal": cmd_principal,
    "stable": cmd_stable,
    "gog-assemble": cmd_gog_assemble,
    "gog-augment": cmd_gog_augment,
    "gog-criterion": cmd_gog_criterion,
    "height": cmd_height,
    "depth": cmd_depth,
    "big-trees": cmd_big_trees,
    "stature": cmd_stature,
    "pieces": cmd_pieces,
    "systole": cmd_systole,
    "check-c24": cmd_check_c24,
    "liftable-shells": cmd_liftable_shells,
    "helly": cmd_helly,
}


def _positive(text):
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("budgets must be positive")
    return value


def _alpha(text):
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad alpha {text!r}") from exc
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError("alpha must lie in (0, 1)")
    return value


def build_parser():
    parser = argparse.ArgumentParser(prog="cubetop", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("file", help="input document (JSON)")
        p.add_argument("--id", action="append", help="object id; repeat for commands taking several inputs")
        p.add_argument("--depth", type=_positive, default=3, help="fiber-product / intersection depth")
        p.add_argument("--radius", type=_positive, default=3, help="Bass-Serre radius")
        p.add_argument("--ball", type=_positive, default=4, help="universal-cover ball radius")
        p.add_argument("--cap", type=_positive, default=DEFAULT_CELL_CAP, help="cell cap for developments")
        p.add_argument("--levels", type=_positive, default=6, help="height levels to explore")
        p.add_argument("--alpha", type=_alpha, default=Fraction(1, 24))
        p.add_argument("--variant", choices=("commensurable", "plain"), default="commensurable")
        p.add_argument("--extra", action="append", help="VERTEX:MAP for gog-augment")
        p.add_argument("--jobs", type=_positive, default=None, help="worker processes (default CUBETOP_JOBS or 1)")
        p.add_argument("-o", "--output", help="also write the report here")
    p = sub.add_parser("fixture", help="write a shipped example document")
    p.add_argument("name", nargs="?")
    p.add_argument("--list", action="store_true")
    p.add_argument("-o", "--output", default=".", help="directory to write into")
    return parser


def _emit(report, output):
    text = canonical_json(report)
    sys.stdout.write(text)
    if output:
        Path(output).write_text(text)


def run(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "fixture":
        return _run_fixture(args)
    args.jobs = resolve_jobs(args.jobs)
    report = {"schema": SCHEMA, "command": args.command, "input": Path(args.file).name}
    try:
        ctx = Context(args)
        result, status = COMMANDS[args.command](ctx)
        report["result"] = result
    except INCONCLUSIVE_ERRORS as exc:
        report["error"] = exc.to_dict()
        status = INCONCLUSIVE
    except CubetopError as exc:
        report["error"] = exc.to_dict()
        status = INPUT_ERROR
    report["status"] = status
    _emit(report, args.output)
    return status


def _run_fixture(args):
    if args.list or not args.name:
        sys.stdout.write("\n".join(fixture_names()) + "\n")
        return PASS
    try:
        path = emit_fixture(args.name, args.output)
    except CubetopError as exc:
        _emit({"schema": SCHEMA, "command": "fixture", "error": exc.to_dict(), "status": INPUT_ERROR}, None)
        return INPUT_ERROR
    except OSError as exc:
        error = MalformedInput(f"cannot write fixture: {exc}").to_dict()
        _emit({"schema": SCHEMA, "command": "fixture", "error": error, "status": INPUT_ERROR}, None)
        return INPUT_ERROR
    sys.stdout.write(f"{path}\n")
    return PASS


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
