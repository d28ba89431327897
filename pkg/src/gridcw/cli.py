"""Command-line front end.

Exit codes: 0 success or verified-true, 2 verification false, 3 input
error, 4 search budget or horizon exhausted, 5 internal invariant
violation.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import catalog as catalog_mod
from .builders import (build_bounded_two_row, build_panel_expression,
                       build_rectangular_block)
from .cwx import (LinearExpression, parse, parse_linear, serialize,
                  serialize_linear, validate_against)
from .deltaspec import DeltaSpec, classify, extract_k_factor, load_spec, parse_spec
from .errors import BudgetError, GridcwError, InputError, InvariantError
from .grid import GridGraph, GridVertex, build_rectangle
from .lowerbound import audit_expression
from .oracle import exact_cwd
from .params import m_beta_curve, n_delta_curve, n_delta_star
from .veins import build_panels


def _load_spec_arg(path: str) -> DeltaSpec:
    if not os.path.exists(path) and path in catalog_mod.entry_names():
        return catalog_mod.load_entry(path).spec
    if not os.path.exists(path):
        raise InputError(f"spec file {path!r} not found")
    return load_spec(path)


def _parse_rect(text: str):
    parts = text.split(",")
    if len(parts) != 4:
        raise InputError(f"--rect wants i,j,m,n, got {text!r}")
    try:
        i, j, m, n = (int(p) for p in parts)
    except ValueError as exc:
        raise InputError(f"--rect wants integers, got {text!r}") from exc
    return i, j, m, n


def _parse_factor(text: str):
    parts = text.split(",")
    if len(parts) != 2:
        raise InputError(f"--factor wants start,width, got {text!r}")
    return int(parts[0]), int(parts[1])


def _load_vertices(path: str):
    verts = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            toks = line.split()
            if len(toks) != 2 or not all(t.isdigit() for t in toks):
                raise InputError(f"{path}:{lineno}: vertex lines are '<col> <row>'")
            verts.append(GridVertex(int(toks[0]), int(toks[1])))
    return verts


def _target_graph(spec: DeltaSpec, args) -> GridGraph:
    if getattr(args, "rect", None):
        i, j, m, n = _parse_rect(args.rect)
        return build_rectangle(spec, i, j, m, n)
    if getattr(args, "vertices", None):
        return GridGraph(spec, _load_vertices(args.vertices))
    raise InputError("give a target with --rect i,j,m,n or --vertices FILE")


def _load_expression(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    body = "\n".join(ln for ln in text.splitlines() if not ln.lstrip().startswith("#"))
    if "(" in body:
        return parse(body)
    return parse_linear(text)


def _load_oracle_edges(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.split("#", 1)[0].strip() for ln in fh]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise InputError(f"{path} holds no edges")
    if lines[0].startswith("grid"):
        coords = set()
        pairs = []
        for ln in lines[1:]:
            toks = ln.split()
            if len(toks) != 4:
                raise InputError(f"grid edge lines are 'c1 r1 c2 r2', got {ln!r}")
            a = (int(toks[0]), int(toks[1]))
            b = (int(toks[2]), int(toks[3]))
            coords.update((a, b))
            pairs.append((a, b))
        order = {c: i for i, c in enumerate(sorted(coords))}
        return len(order), [(order[a], order[b]) for a, b in pairs]
    n = None
    pairs = []
    for ln in lines:
        toks = ln.split()
        if toks[0] == "vertices" and len(toks) == 2:
            n = int(toks[1])
            continue
        if len(toks) != 2:
            raise InputError(f"edge lines are 'u v', got {ln!r}")
        pairs.append((int(toks[0]), int(toks[1])))
    if n is None:
        n = max((max(u, v) for u, v in pairs), default=-1) + 1
    return n, pairs


def cmd_build(args) -> int:
    spec = _load_spec_arg(args.spec)
    i, j, m, n = _parse_rect(args.rect)
    g = build_rectangle(spec, i, j, m, n)
    sys.stdout.write(g.export_dot() if args.dot else g.export_edge_list())
    return 0


def cmd_params(args) -> int:
    spec = _load_spec_arg(args.spec)
    if args.curve == "n-delta":
        curve = n_delta_curve(spec, args.max)
    elif args.curve == "m-beta":
        curve = m_beta_curve(spec.beta, args.max)
    else:
        if not args.factor:
            raise InputError("n-delta-star needs --factor start,width")
        start, width = _parse_factor(args.factor)
        f = extract_k_factor(spec, start, width)
        curve = n_delta_star(spec, f, count=args.max, horizon=args.horizon)
    sys.stdout.write(curve.as_tsv())
    if args.sparkline:
        sys.stdout.write(curve.sparkline() + "\n")
    return 0


def cmd_expr(args) -> int:
    spec = _load_spec_arg(args.spec)
    if args.method == "block":
        if not args.rect:
            raise InputError("block method needs --rect i,j,m,n")
        i, j, m, n = _parse_rect(args.rect)
        e = build_rectangular_block(spec, i, j, m, n)
    elif args.method == "two-row":
        g = _target_graph(spec, args)
        e = build_bounded_two_row(spec, g, J=args.first_cols)
    else:
        if not args.factor:
            raise InputError("panel method needs --factor start,width")
        g = _target_graph(spec, args)
        start, width = _parse_factor(args.factor)
        e, _ = build_panel_expression(spec, g, start, width,
                                      M=args.m_bound, N=args.n_bound, J=args.j_bound)
    header = e.budget.header(e.label_count()) if e.budget else None
    sys.stdout.write(serialize_linear(e, header=header))
    return 0


def cmd_verify(args) -> int:
    spec = _load_spec_arg(args.spec)
    target = _target_graph(spec, args)
    e = _load_expression(args.expr)
    ok, diff = validate_against(e, target)
    if ok:
        print("verified: expression builds the target exactly")
        return 0
    print(f"mismatch: {len(diff['missing'])} missing, {len(diff['extra'])} extra edges")
    for u, v in diff["missing"][:10]:
        print(f"  missing {tuple(u)}-{tuple(v)}")
    for u, v in diff["extra"][:10]:
        print(f"  extra  {tuple(u)}-{tuple(v)}")
    return 2


def cmd_audit(args) -> int:
    spec = _load_spec_arg(args.spec)
    h = build_rectangle(spec, args.col, args.row, args.square, args.square)
    e = _load_expression(args.expr)
    if isinstance(e, LinearExpression):
        e = e.to_tree()
    report = audit_expression(e, h)
    if report is None:
        print("not applicable: the square has no interior rows")
        return 0
    print(report.summary())
    return 0 if report.holds else 2


def cmd_oracle(args) -> int:
    n, edges = _load_oracle_edges(args.edges)
    result = exact_cwd(n, edges, args.max_k, linear=args.linear)
    kind = "linear clique-width" if args.linear else "clique-width"
    if result is None:
        print(f"{kind} exceeds {args.max_k}")
        return 2
    width, expr = result
    print(f"{kind} = {width}")
    if isinstance(expr, LinearExpression):
        sys.stdout.write(serialize_linear(expr))
    else:
        print(serialize(expr))
    return 0


def cmd_catalog(args) -> int:
    if args.name:
        sys.stdout.write(catalog_mod.entry_text(args.name))
        return 0
    for entry in catalog_mod.all_entries():
        bound = "-" if entry.expected_m_beta is None else str(entry.expected_m_beta)
        print(f"{entry.name:28s} m-beta-bound={bound:2s} {entry.note}")
    return 0


def cmd_classify(args) -> int:
    spec = _load_spec_arg(args.spec)
    report = classify(spec, probe_depth=args.depth)
    print(report.summary())
    return 0


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gridcw",
                                 description="grid-defined graph classes: parameters, "
                                             "expression builders and audits")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="materialise a rectangle and export it")
    p.add_argument("--spec", required=True)
    p.add_argument("--rect", required=True, metavar="i,j,m,n")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--dot", action="store_true")
    fmt.add_argument("--edges", action="store_true")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("params", help="parameter curves as TSV")
    p.add_argument("--spec", required=True)
    p.add_argument("--curve", required=True, choices=["n-delta", "m-beta", "n-delta-star"])
    p.add_argument("--max", required=True, type=int)
    p.add_argument("--factor", metavar="start,width")
    p.add_argument("--horizon", type=int, default=400)
    p.add_argument("--sparkline", action="store_true")
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("expr", help="emit a linear expression for a target")
    p.add_argument("--spec", required=True)
    p.add_argument("--method", required=True, choices=["block", "two-row", "panel"])
    p.add_argument("--rect", metavar="i,j,m,n")
    p.add_argument("--vertices", metavar="FILE")
    p.add_argument("--factor", metavar="start,width")
    p.add_argument("--first-cols", type=int, default=None,
                   help="two-row method: columns handled per-column")
    p.add_argument("--m-bound", type=int, default=None)
    p.add_argument("--n-bound", type=int, default=None)
    p.add_argument("--j-bound", type=int, default=None)
    p.set_defaults(func=cmd_expr)

    p = sub.add_parser("verify", help="check an expression against a target")
    p.add_argument("--spec", required=True)
    p.add_argument("--expr", required=True, metavar="FILE")
    p.add_argument("--rect", metavar="i,j,m,n")
    p.add_argument("--vertices", metavar="FILE")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("audit", help="label lower-bound audit on a square")
    p.add_argument("--spec", required=True)
    p.add_argument("--expr", required=True, metavar="FILE")
    p.add_argument("--square", required=True, type=int)
    p.add_argument("--col", type=int, default=1)
    p.add_argument("--row", type=int, default=1)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("oracle", help="exact width of a tiny graph")
    p.add_argument("--edges", required=True, metavar="FILE")
    p.add_argument("--max-k", required=True, type=int)
    p.add_argument("--linear", action="store_true")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("catalog", help="list or emit the shipped triples")
    p.add_argument("--name")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("classify", help="classification report for a triple")
    p.add_argument("--spec", required=True)
    p.add_argument("--depth", type=int, default=16)
    p.set_defaults(func=cmd_classify)
    return ap


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvariantError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 5
    except BudgetError as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return 4
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 3
    except GridcwError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
