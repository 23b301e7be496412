"""Command-line entry point: ``python3 -m rgk <verb> ...``.

Exit codes: 0 success, 1 validation failure, 2 verification failure, 3 I/O.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
from typing import List, Optional

from . import io as rio
from .graph import GraphError
from .quiver import QuiverError

EXIT_OK, EXIT_INVALID, EXIT_VERIFY, EXIT_IO = 0, 1, 2, 3


class CLIError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise CLIError(f"cannot read {path}: {e.strerror}", EXIT_IO)


def _write(path: Optional[str], text: str):
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as e:
        raise CLIError(f"cannot write {path}: {e.strerror}", EXIT_IO)


def _json(path: str):
    return rio.parse_json(_read(path))


def _doc(path: str) -> rio.GraphDocument:
    return rio.load_document(_read(path))


def _emit(args, payload: dict, lines: List[str]):
    if getattr(args, "json", False):
        sys.stdout.write(rio.dumps(payload))
    else:
        sys.stdout.write("\n".join(lines) + "\n")


def _chordal_or_fail(doc: rio.GraphDocument):
    C = doc.chordal
    if C is None:
        raise CLIError("the document has no zero_section", EXIT_INVALID)
    return C


# ---------------------------------------------------------------------------
# verbs

def cmd_validate(args) -> int:
    doc = _doc(args.path)
    parts = [f"graph: {len(doc.graph.vertices)} vertices, {len(doc.graph.edges)} edges"]
    if doc.zero_section is not None:
        parts.append(f"chordal: zero section of {len(doc.zero_section)} edges")
    if doc.grading is not None:
        rio.grading_from_block(doc)
        parts.append(f"grading: {doc.grading.get('kind')}")
    _emit(args, {"valid": True, "checked": parts}, ["valid"] + ["  " + p for p in parts])
    return EXIT_OK


def invariants(doc: rio.GraphDocument) -> dict:
    from .ribbon import boundary_components, genus
    R = doc.ribbon
    G = R.graph
    walks = boundary_components(R)
    out = {"vertices": len(G.vertices), "edges": len(G.edges),
           "boundary_components": len(walks),
           "compact_boundaries": sum(1 for w in walks if w.compact),
           "connected": G.is_connected()}
    try:
        out["genus"] = genus(R)
    except GraphError:
        out["genus"] = None
    C = doc.chordal
    if C is not None:
        from .cpm import base_graph, dualizable
        B = base_graph(C)
        D = dualizable(C)
        out["zero_components"] = [{"vertex": b, "circle_genus": 0} for b in B.vertices]
        out["base_shape"] = B.shape
        out["dualizable"] = bool(D)
        out["reason"] = None if D else D.reason
        out["indices"] = list(D.indices.values) if D else None
    return out


def cmd_invariants(args) -> int:
    inv = invariants(_doc(args.path))
    width = max(len(k) for k in inv)
    lines = [f"{k.ljust(width)}  {v}" for k, v in inv.items()]
    _emit(args, inv, lines)
    return EXIT_OK


def cmd_dualizable(args) -> int:
    from .cpm import dualizable
    D = dualizable(_chordal_or_fail(_doc(args.path)))
    payload = {"dualizable": bool(D), "reason": D.reason,
               "shape": D.indices.shape if D else None,
               "indices": list(D.indices.values) if D else None}
    line = f"dualizable {D.indices.shape} {D.indices.values}" if D else f"not dualizable: {D.reason}"
    _emit(args, payload, [line])
    return EXIT_OK if D else EXIT_VERIFY


def cmd_export_dot(args) -> int:
    _write(args.output, rio.to_dot(_doc(args.path)))
    return EXIT_OK


def cmd_quiver(args) -> int:
    from .quiver import ConicLagrangian, quiver_from_lagrangian
    L = ConicLagrangian.from_json(_json(args.path))
    Q = quiver_from_lagrangian(L)
    arrows = [{"name": a.name, "source": a.source, "target": a.target,
               "spoke": [str(a.spoke[0]), a.spoke[1]]} for a in Q.arrows]
    lines = [f"{len(Q.vertices)} vertices, {len(Q.arrows)} arrows"]
    if L.base == "line":
        lines.append(f"shape {Q.shape()}")
    lines += [f"  {a['name']}: {a['source']} -> {a['target']}  ({a['spoke'][1]} spoke at {a['spoke'][0]})"
              for a in arrows]
    _emit(args, {"vertices": list(Q.vertices), "arrows": arrows}, lines)
    return EXIT_OK


def cmd_hom(args) -> int:
    from .quiver import hom_ext
    M, N = rio.rep_from_json(_json(args.source)), rio.rep_from_json(_json(args.target))
    if M.quiver != N.quiver:
        raise CLIError("the two representations live on different quivers", EXIT_INVALID)
    h, e = hom_ext(M, N)
    _emit(args, {"hom": h, "ext1": e}, [f"Hom = {h}", f"Ext^1 = {e}"])
    return EXIT_OK


def cmd_reflect(args) -> int:
    from .quiver import bgp_reflect, reflect_quiver
    data = _json(args.path)
    M = rio.rep_from_json(data)
    x = args.vertex
    N = bgp_reflect(M.quiver, x, M)
    Q2 = reflect_quiver(M.quiver, x)
    block = {"vertices": len(Q2.vertices), "arrows": [[a.name, a.source, a.target] for a in Q2.arrows]}
    _write(args.output, rio.dumps(rio.rep_to_json(N, block)))
    return EXIT_OK


def _glued(path: Optional[str], C, cover):
    from .cpm import structure_object
    if path is None:
        return structure_object(C, cover)
    return rio.glued_from_json(_json(path), cover)


def cmd_cpm_hom(args) -> int:
    from .cpm import cpm_hom, euler, wheel_cover, CPMError
    C = _chordal_or_fail(_doc(args.graph))
    cover = wheel_cover(C)
    A, B = _glued(args.a, C, cover), _glued(args.b, C, cover)
    h = cpm_hom(A, B)
    payload = {"degrees": [-1, 0, 1], "dims": list(h), "euler": euler(h),
               "oracle": "total complex of wheel Homs over overlap Homs"}
    _emit(args, payload, [f"h^-1 = {h[0]}", f"h^0  = {h[1]}", f"h^1  = {h[2]}", f"chi  = {euler(h)}"])
    return EXIT_OK


def _parse_indices(text: str):
    try:
        vals = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise CLIError(f"indices must be comma-separated integers, got {text!r}", EXIT_INVALID)
    return vals


def cmd_mirror_check(args) -> int:
    from .mirror import MirrorError, bb_compare, cech_oracle, chain, perf_hom, ring, structure_sheaf
    a = _parse_indices(args.indices)
    S = (ring if args.shape == "cycle" else chain)(*a)
    balloons = []
    for p, q in S.balloons:
        r = bb_compare(p, q)
        balloons.append(r.as_dict())
    O = structure_sheaf(S)
    ph = perf_hom(S, O, O)
    cech = cech_oracle(S)
    ok = all(b["passed"] for b in balloons) and (ph.get(0, 0), ph.get(1, 0)) == cech
    payload = {"indices": list(a), "shape": S.shape, "balloons": balloons,
               "perf_hom": {"dims": [ph.get(0, 0), ph.get(1, 0)], "oracle": "descent equalizer"},
               "cech": {"dims": list(cech), "oracle": "Cech nerve complex"}, "passed": ok}
    lines = [f"{'PASS' if b['passed'] else 'FAIL'} balloon {tuple(b['indices'])}: Hom {b['balloon_hom']}"
             + (f" ({b['mismatch']})" if b["mismatch"] else "") for b in balloons]
    lines.append(f"{'PASS' if ok else 'FAIL'} Hom(O,O): descent {(ph.get(0, 0), ph.get(1, 0))}, Cech {cech}")
    _emit(args, payload, lines)
    return EXIT_OK if ok else EXIT_VERIFY


def hms_report(C) -> dict:
    from .cpm import cpm_hom, dualizable, structure_object
    from .mirror import cech_oracle, chain, perf_hom, ring, structure_sheaf
    D = dualizable(C)
    if not D:
        return {"dualizable": False, "reason": D.reason, "passed": False}
    a = D.indices.values
    S = (ring if D.indices.shape == "CYCLE" else chain)(*a)
    O = structure_object(C)
    h = cpm_hom(O, O)
    ph = perf_hom(S, structure_sheaf(S), structure_sheaf(S))
    p = (ph.get(-1, 0), ph.get(0, 0), ph.get(1, 0))
    cech = cech_oracle(S)
    return {"dualizable": True, "shape": D.indices.shape, "indices": list(a),
            "cpm_hom": {"dims": list(h), "oracle": "glued wheel representations"},
            "perf_hom": {"dims": list(p), "oracle": "descent equalizer"},
            "cech": {"dims": list(cech), "oracle": "Cech nerve complex"},
            "passed": h == p and (h[1], h[2]) == cech}


def cmd_hms_check(args) -> int:
    rep = hms_report(_chordal_or_fail(_doc(args.graph)))
    if not rep["dualizable"]:
        lines = [f"FAIL not dualizable: {rep['reason']}"]
    else:
        lines = [f"{rep['shape']} {tuple(rep['indices'])}",
                 f"  CPM  (h^-1,h^0,h^1) = {tuple(rep['cpm_hom']['dims'])}",
                 f"  Perf (h^-1,h^0,h^1) = {tuple(rep['perf_hom']['dims'])}",
                 f"  Cech (h^0,h^1)      = {tuple(rep['cech']['dims'])}",
                 "PASS" if rep["passed"] else "FAIL"]
    _emit(args, rep, lines)
    return EXIT_OK if rep["passed"] else EXIT_VERIFY


def cmd_sieve_check(args) -> int:
    from .cpm import (gt_axioms, is_covering, local_contractions, maximal_sieve, sieve, star_sieve,
                      uncovered)
    from .ribbon import open_restriction
    R = _doc(args.path).ribbon
    G = R.graph
    rng = random.Random(args.seed)
    members = local_contractions(R)
    star_ok = is_covering(star_sieve(R))
    vs = sorted(G.vertices)
    opens = [open_restriction(R, S, {e for v in S for e in G.incident(v)})
             for S in (rng.sample(vs, rng.randint(1, len(vs))) for _ in range(args.samples))]
    tallies = {"maximal": 0, "pullback": 0, "local": 0}
    failures = []
    for k in range(args.samples):
        U = sieve(R, rng.sample(members, min(len(members), rng.randint(1, 3))) + list(star_sieve(R).generators))
        V = sieve(R, rng.sample(members, min(len(members), rng.randint(1, 3))))
        res = gt_axioms(R, U, V, opens)
        for ax, ok in res.items():
            tallies[ax] += ok
            if not ok:
                failures.append({"sample": k, "axiom": ax})
    ok = star_ok and not failures
    payload = {"star_sieve_covers": star_ok, "samples": args.samples, "axioms_held": tallies,
               "failures": failures, "passed": ok,
               "oracle": "membership by factorisation through generators"}
    lines = [f"star sieve covering: {star_ok}"] + \
        [f"{ax}: {n}/{args.samples}" for ax, n in tallies.items()] + ["PASS" if ok else "FAIL"]
    _emit(args, payload, lines)
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_grade(args) -> int:
    from .grading import chordal_grading
    doc = _doc(args.path)
    if doc.grading is not None:
        Gr = rio.grading_from_block(doc)
    else:
        Gr = chordal_grading(_chordal_or_fail(doc))
    rows, ok = {}, True
    for v, U in sorted(Gr.unwindings.items()):
        good = not U.validate() and U.is_free_transitive()
        ok &= good
        rows[v] = {"n": U.n, "delta": {h[0]: d for h, d in sorted(U.delta.items())},
                   "parity": {h[0]: p for h, p in sorted(U.parity.items())}, "valid": good}
    theta = {f"{e}@{v}": t for (e, v), t in sorted(Gr.theta.items())}
    payload = {"unwindings": rows, "theta": theta, "edge_parity": dict(sorted(Gr.z2.edge_parity.items())),
               "valid": ok}
    lines = [f"{v}: n={r['n']} delta={r['delta']} parity={r['parity']} {'ok' if r['valid'] else 'BAD'}"
             for v, r in rows.items()]
    _emit(args, payload, lines)
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_verify_all(args) -> int:
    from .acceptance import Config, run_all
    cfg = Config(seed=args.seed, indices_max=args.indices_max)
    outcomes = run_all(cfg)
    for o in outcomes:
        line = o.line()
        if args.timings:
            line += f"  ({o.seconds:.1f}s)"
        print(line)
    ok = all(o.passed for o in outcomes)
    print(f"{sum(o.passed for o in outcomes)}/{len(outcomes)} criteria pass")
    if args.report:
        rep = {"seed": args.seed, "indices_max": args.indices_max, "passed": ok,
               "criteria": [{"number": o.number, "name": o.name, "passed": o.passed,
                             "detail": o.detail, "oracle": o.oracle} for o in outcomes]}
        _write(args.report, rio.dumps(rep))
    return EXIT_OK if ok else EXIT_VERIFY


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rgk", description="ribbon graphs, CPM and their mirrors")
    p.add_argument("--truncation", type=int, help="truncation degree (default: $RGK_TRUNCATION or 25)")
    sub = p.add_subparsers(dest="verb", required=True)

    def verb(name, fn, help_, json_flag=True):
        s = sub.add_parser(name, help=help_)
        s.set_defaults(fn=fn)
        if json_flag:
            s.add_argument("--json", action="store_true", help="emit JSON")
        return s

    verb("validate", cmd_validate, "validate a graph document").add_argument("path")
    verb("invariants", cmd_invariants, "boundary, genus, base graph and indices").add_argument("path")
    verb("dualizable", cmd_dualizable, "dualizability and indices").add_argument("path")
    verb("indices", cmd_dualizable, "alias of dualizable").add_argument("path")
    s = verb("export-dot", cmd_export_dot, "DOT export", json_flag=False)
    s.add_argument("path")
    s.add_argument("-o", "--output")
    verb("quiver", cmd_quiver, "quiver of a conic Lagrangian").add_argument("path")
    s = verb("hom", cmd_hom, "Hom and Ext^1 between two representations")
    s.add_argument("source")
    s.add_argument("target")
    s = verb("reflect", cmd_reflect, "BGP reflection of a representation", json_flag=False)
    s.add_argument("path")
    s.add_argument("--vertex", type=int, required=True)
    s.add_argument("-o", "--output")
    s = verb("cpm-hom", cmd_cpm_hom, "graded Hom dimensions between glued objects")
    s.add_argument("graph")
    s.add_argument("--a", help="glued object JSON (default: structure object)")
    s.add_argument("--b", help="glued object JSON (default: structure object)")
    s = verb("mirror-check", cmd_mirror_check, "mirror-side checks for an index tuple")
    s.add_argument("--indices", required=True)
    s.add_argument("--shape", choices=["path", "cycle"], default="path")
    verb("hms-check", cmd_hms_check, "compare both sides on a dualizable graph").add_argument("--graph", required=True)
    s = verb("sieve-check", cmd_sieve_check, "topology axioms on sampled sieves")
    s.add_argument("path")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--samples", type=int, default=6)
    verb("grade", cmd_grade, "compass or explicit Z-grading").add_argument("path")
    s = verb("verify-all", cmd_verify_all, "run every acceptance check", json_flag=False)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--indices-max", type=int, default=6)
    s.add_argument("--report", help="write a JSON report here")
    s.add_argument("--timings", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.truncation is not None:
        os.environ["RGK_TRUNCATION"] = str(args.truncation)
    try:
        return args.fn(args)
    except CLIError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except (rio.DocumentError, GraphError, QuiverError, ValueError, KeyError) as e:
        # DocumentError, GraphError (incl. ribbon/grading errors) and the
        # module errors all carry the violated rule in their message
        msg = e.args[0] if isinstance(e, KeyError) and e.args else e
        print(f"invalid: {msg}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
