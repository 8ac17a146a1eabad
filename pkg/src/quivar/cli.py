"""Command line front-end.

Subcommands read a quiver file (or stdin with ``-``), run the requested
analysis and print a text report; ``--json`` switches to a machine-readable
report validating against the bundled ``report.schema.json``.  Exit codes:
0 success, 2 malformed input, 3 refused instance size.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import divisors, flagdeform
from .cohomology import t_invariant
from .polytope import (InstanceSizeError, conifold_check, flow_polytope,
                       is_reflexive, polystable_subquivers, quiver_polytope)
from .quiver import (QuiverStructureError, flag_violation, gamma_dbl,
                     gamma_opp, gamma_perm, is_flag_quiver, is_tight,
                     ladder_flag, tighten)
from .quiverfile import QuiverInputError, parse_quiver, serialize_quiver

SCHEMA_VERSION = 1


def _read_input(path):
    if path in (None, "-"):
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def build_report(q, weight=None, probe_samples=12, force=False):
    """The full analysis dictionary; every number replays a library call."""
    theta = weight if weight is not None else q.canonical_weight()
    connected = len(q.full().components()) == 1
    acyclic = not q.has_oriented_cycles()
    tight = is_tight(q, theta)
    flag = is_flag_quiver(q)
    report = {
        "schema_version": SCHEMA_VERSION,
        "quiver": {
            "vertices": q.n_vertices,
            "arrows": q.n_arrows,
            "acyclic": acyclic,
            "connected": connected,
            "tight": tight,
            "tightened_for_analysis": False,
            "flag": None if flag is None else {
                "source": flag.source,
                "sinks": list(flag.sinks),
                "m": flag.m,
                "multiplicities": list(flag.multiplicities),
            },
        },
        "polytope": None,
        "simple_knots": None,
        "t1_height0_total": None,
        "t2_probe": None,
        "divisor_class_rank": None,
        "picard_rank": None,
        "blocking_knots": None,
        "smoothability": None,
    }
    if connected:
        dual = quiver_polytope(q, theta, force=force)
        flow = flow_polytope(q, theta, force=force)
        report["polytope"] = {
            "dual_dim": dual.dim,
            "flow_dim": flow.dim,
            "reflexive": is_reflexive(q, force=force) if acyclic else None,
            "conifold": conifold_check(dual, q, theta)[0] if acyclic else None,
        }
    if flag is not None:
        work = q
        if not tight:
            work, _ = tighten(q, q.canonical_weight())
            report["quiver"]["tightened_for_analysis"] = True
        knots = flagdeform.simple_knots(work)
        rows = []
        total = 0
        for k in knots:
            avoid = flagdeform.multipaths(work, k, avoiding=True)
            deg = flagdeform.t1_degree_for_knot(work, k)
            rows.append({
                "knot": k.knot,
                "t0_dim": len(avoid),
                "degree_height": deg.height,
                "witness_multipath": avoid[0] if avoid else None,
            })
            total += len(avoid)
        report["simple_knots"] = rows
        report["t1_height0_total"] = total
        if probe_samples:
            probe = flagdeform.obstruction_probe(work, samples=probe_samples)
            report["t2_probe"] = {
                "samples": probe.samples,
                "within_bound": probe.within_bound,
                "t2_zero": probe.t2_zero,
                "certified": probe.certified,
                "skipped": probe.skipped,
            }
        wtheta = work.canonical_weight()
        report["divisor_class_rank"] = divisors.weil_class_group(work, wtheta).rank
        report["picard_rank"] = divisors.picard_group(work, wtheta).rank
        report["blocking_knots"] = divisors.blocking_knots(work)
        verdict = flagdeform.smoothability_verdict(work)
        report["smoothability"] = {
            "codim3": verdict.codim3,
            "degree0": verdict.degree0,
            "blocking_reason": verdict.blocking_reason,
            "a1_strata": verdict.a1_strata,
        }
    return report


def render_text(report):
    lines = []
    qd = report["quiver"]
    lines.append(f"quiver: {qd['vertices']} vertices, {qd['arrows']} arrows, "
                 f"acyclic={qd['acyclic']}, connected={qd['connected']}, "
                 f"tight={qd['tight']}")
    if qd["flag"]:
        f = qd["flag"]
        lines.append(f"flag: source={f['source']} m={f['m']} "
                     f"sinks={','.join(f['sinks'])} "
                     f"multiplicities={f['multiplicities']}")
    else:
        lines.append("flag: no")
    if report["polytope"]:
        p = report["polytope"]
        lines.append(f"polytope: dual_dim={p['dual_dim']} flow_dim={p['flow_dim']} "
                     f"reflexive={p['reflexive']} conifold={p['conifold']}")
    if report["simple_knots"] is not None:
        for row in report["simple_knots"]:
            w = row["witness_multipath"]
            witness = "" if w is None else " witness=" + ",".join(
                f"{a}:{v}" for a, v in sorted(w.items()))
            lines.append(f"knot {row['knot']}: t0_dim={row['t0_dim']} "
                         f"degree_height={row['degree_height']}{witness}")
        lines.append(f"t1 height-0 total: {report['t1_height0_total']}")
    if report["t2_probe"]:
        t = report["t2_probe"]
        lines.append(f"t2 probe: samples={t['samples']} within_bound={t['within_bound']} "
                     f"t2_zero={t['t2_zero']} certified={t['certified']} "
                     f"skipped={t['skipped']}")
    if report["divisor_class_rank"] is not None:
        lines.append(f"divisor class rank: {report['divisor_class_rank']}")
        lines.append(f"picard rank: {report['picard_rank']}")
        lines.append("blocking knots: " +
                     (",".join(report["blocking_knots"]) or "none"))
    if report["smoothability"]:
        s = report["smoothability"]
        deg0 = "YES" if s["degree0"] else f"NO ({s['blocking_reason']})"
        lines.append(f"smoothability: codim-3: "
                     f"{'YES' if s['codim3'] else 'NO'}; degree-0: {deg0}")
        lines.append("a1 strata: " + (",".join(s["a1_strata"]) or "none"))
    return "\n".join(lines)


def _emit(args, report):
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print(render_text(report))


def _cmd_analyze(args):
    q, weight = parse_quiver(_read_input(args.file))
    report = build_report(q, weight, probe_samples=args.samples, force=args.force)
    _emit(args, report)


def _cmd_tighten(args):
    q, weight = parse_quiver(_read_input(args.file))
    theta = weight if weight is not None else q.canonical_weight()
    tq, _ = tighten(q, theta)
    out = serialize_quiver(tq, None if weight is None else _pushed(q, tq, theta))
    sys.stdout.write(out)


def _pushed(q, tq, theta):
    pushed = {v: 0 for v in tq.vertices}
    lookup = {}
    for v in tq.vertices:
        for part in v.split("+"):
            lookup[part] = v
    for v, val in theta.items():
        pushed[lookup.get(v, v)] += val
    return pushed


def _cmd_faces(args):
    q, weight = parse_quiver(_read_input(args.file))
    theta = weight if weight is not None else q.canonical_weight()
    dual = quiver_polytope(q, theta, force=args.force) \
        if len(q.full().components()) == 1 else None
    flow = flow_polytope(q, theta, force=args.force)
    rows = []
    for p in polystable_subquivers(q, theta, force=args.force):
        fdim = flow.face_index[p].dim if flow.face_index else 0
        ddim = dual.face_index[p].dim if dual is not None else None
        if args.max_dim is not None and fdim > args.max_dim:
            continue
        rows.append({"arrows": sorted(p), "flow_dim": fdim, "dual_dim": ddim})
    if args.json:
        print(json.dumps({"faces": rows}, indent=2, sort_keys=True))
    else:
        for r in rows:
            print(f"dim {r['flow_dim']}"
                  + (f" / dual {r['dual_dim']}" if r['dual_dim'] is not None else "")
                  + ": {" + ",".join(r["arrows"]) + "}")


def _cmd_t1(args):
    q, _ = parse_quiver(_read_input(args.file))
    reason = flag_violation(q)
    if reason:
        raise QuiverInputError(0, f"not a flag quiver: {reason}")
    if not is_tight(q, q.canonical_weight()):
        q, _ = tighten(q, q.canonical_weight())
    per, total = flagdeform.t1_height0(q)
    if args.height0:
        payload = {"t0": per, "total": total}
        if args.json:
            print(json.dumps(payload, indent=2, sort_keys=True))
        else:
            for k, v in sorted(per.items()):
                print(f"{k}: {v}")
            print(f"total: {total}")
        return
    rows = []
    for k in flagdeform.simple_knots(q):
        deg = flagdeform.t1_degree_for_knot(q, k)
        rows.append({"knot": k.knot, "t0_dim": per[k.knot],
                     "degree_height": deg.height,
                     "degree": deg.as_dict(),
                     "t1_dim": t_invariant(q, deg, 1)})
    if args.json:
        print(json.dumps({"knots": rows, "t1_height0_total": total},
                         indent=2, sort_keys=True))
    else:
        for r in rows:
            print(f"knot {r['knot']}: t0_dim={r['t0_dim']} "
                  f"degree_height={r['degree_height']} t1_dim={r['t1_dim']}")
        print(f"t1 height-0 total: {total}")


def _cmd_t2probe(args):
    q, _ = parse_quiver(_read_input(args.file))
    reason = flag_violation(q)
    if reason:
        raise QuiverInputError(0, f"not a flag quiver: {reason}")
    if not is_tight(q, q.canonical_weight()):
        q, _ = tighten(q, q.canonical_weight())
    probe = flagdeform.obstruction_probe(q, samples=args.samples, seed=args.seed)
    payload = {"samples": probe.samples, "within_bound": probe.within_bound,
               "t2_zero": probe.t2_zero, "certified": probe.certified,
               "skipped": probe.skipped,
               "failures": [list(map(list, f)) for f in probe.failures]}
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(f"samples={probe.samples} within_bound={probe.within_bound} "
              f"t2_zero={probe.t2_zero} certified={probe.certified} "
              f"skipped={probe.skipped}")
        if probe.failures:
            print("FAILURES:", probe.failures)


def _cmd_picard(args):
    q, weight = parse_quiver(_read_input(args.file))
    theta = weight if weight is not None else q.canonical_weight()
    if not is_tight(q, theta):
        q, _ = tighten(q, theta)
        theta = weight if weight is not None else q.canonical_weight()
    divcl = divisors.weil_class_group(q, theta)
    pic = divisors.picard_group(q, theta, force=args.force)
    payload = {"divisor_class_rank": divcl.rank, "picard_rank": pic.rank}
    if is_flag_quiver(q):
        payload["blocking_knots"] = divisors.blocking_knots(q)
        payload["flag_picard_rank"] = divisors.flag_picard(q).rank
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for k, v in payload.items():
            print(f"{k}: {v}")


def _cmd_smooth(args):
    q, _ = parse_quiver(_read_input(args.file))
    try:
        verdict = flagdeform.smoothability_verdict(q)
    except QuiverStructureError as exc:
        raise QuiverInputError(0, str(exc))
    payload = {
        "codim3": verdict.codim3,
        "degree0": verdict.degree0,
        "blocking_reason": verdict.blocking_reason,
        "a1_strata": verdict.a1_strata,
        "knots": [{"knot": k.knot, "avoiding": k.avoiding, "total": k.total,
                   "witness": k.witness} for k in verdict.knots],
    }
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        deg0 = "YES" if verdict.degree0 else f"NO ({verdict.blocking_reason})"
        print(f"codim-3: YES; degree-0: {deg0}")
        for k in verdict.knots:
            print(f"knot {k.knot}: avoiding={k.avoiding} total={k.total}")


def _cmd_gen(args):
    kind = args.kind
    ns = args.params
    if kind == "ladder":
        q = ladder_flag(*[int(x) for x in ns])
    elif kind == "opp":
        q = gamma_opp(int(ns[0]))
    elif kind == "dbl":
        q = gamma_dbl(int(ns[0]))
    elif kind == "perm":
        if len(ns) != 2:
            raise QuiverInputError(0, "gen perm needs k and a comma-separated image")
        q = gamma_perm(int(ns[0]), [int(x) for x in ns[1].split(",")])
    else:
        raise QuiverInputError(0, f"unknown generator {kind!r}")
    sys.stdout.write(serialize_quiver(q))


def make_parser():
    parser = argparse.ArgumentParser(
        prog="quivar",
        description="flow/quiver polytopes, deformation invariants and "
                    "smoothability of toric singularities from quivers")
    parser.add_argument("--json", action="store_true",
                        help="emit machine-readable JSON reports")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, **kw):
        p = sub.add_parser(name, **kw)
        p.set_defaults(fn=fn)
        return p

    p = add("analyze", _cmd_analyze, help="full analysis report")
    p.add_argument("file", nargs="?", default="-")
    p.add_argument("--samples", type=int, default=12,
                   help="obstruction probe sample count (0 disables)")
    p.add_argument("--force", action="store_true",
                   help="override the instance size guard")

    p = add("tighten", _cmd_tighten, help="contract forced arrows")
    p.add_argument("file", nargs="?", default="-")

    p = add("faces", _cmd_faces, help="polystable subquivers and face dims")
    p.add_argument("file", nargs="?", default="-")
    p.add_argument("--max-dim", type=int, default=None)
    p.add_argument("--force", action="store_true")

    p = add("t1", _cmd_t1, help="deformation degrees per simple knot")
    p.add_argument("file", nargs="?", default="-")
    p.add_argument("--height0", action="store_true")

    p = add("t2probe", _cmd_t2probe, help="sample obstruction degrees")
    p.add_argument("file", nargs="?", default="-")
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)

    p = add("picard", _cmd_picard, help="divisor class and Picard ranks")
    p.add_argument("file", nargs="?", default="-")
    p.add_argument("--force", action="store_true")

    p = add("smooth", _cmd_smooth, help="smoothability verdict")
    p.add_argument("file", nargs="?", default="-")

    p = add("gen", _cmd_gen, help="generate a named quiver family member")
    p.add_argument("kind", choices=["ladder", "opp", "dbl", "perm"])
    p.add_argument("params", nargs="+")
    return parser


def main(argv=None):
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        args.fn(args)
    except QuiverInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except QuiverStructureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InstanceSizeError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
