"""Command-line surface of the workbench.

Decision commands exit 0 when the decided value is true, 1 when false;
any error exits 2.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import fileio
from .errors import MsolabError
from .graphs import Graph
from .mso import evaluate, formula_size, formula_to_block, free_variables, parse_block
from .mso.syntax import ExistsSet, ForallSet, iter_nodes
from .pipeline import check_reduced, reduce_instance
from .report import write_report
from .sigmacol import (
    decide_alternating,
    instance_to_labeled_graph,
    reduce_qsat_to_sigmacol,
    sigmacol_formula,
)
from .strongcolor import strong_edge_colour, validate_strong


def _read(path: str) -> str:
    return Path(path).read_text()


def _parse_structure(text: str):
    head = next((l for l in text.splitlines() if l.strip() and not l.startswith("#")), "")
    if head.startswith("digraph"):
        return fileio.parse_digraph_text(text)
    return fileio.parse_labeled_graph_text(text)


def cmd_parse(args) -> int:
    phi = parse_block(_read(args.formula))
    fv, fs = free_variables(phi)
    print(f"size: {formula_size(phi)}")
    print(f"free vertex variables: {' '.join(sorted(fv)) or '-'}")
    print(f"free set variables: {' '.join(sorted(fs)) or '-'}")
    print(formula_to_block(phi))
    return 0


def cmd_check(args) -> int:
    structure = _parse_structure(_read(args.graph))
    phi = parse_block(_read(args.formula))
    value = evaluate(structure, phi)
    print("true" if value else "false")
    return 0 if value else 1


def cmd_reduce(args) -> int:
    f = fileio.parse_graph_text(_read(args.graph))
    phi = parse_block(_read(args.formula))
    ri = reduce_instance(f, phi)
    out = fileio.write_reduced_instance(args.out, ri)
    sizes = ri.provenance.sizes
    for key in sorted(sizes):
        print(f"{key}\t{sizes[key]}")
    print(f"wrote {out}")
    return 0


def _direct_check_feasible(f: Graph, phi) -> bool:
    set_quants = sum(1 for n in iter_nodes(phi) if isinstance(n, (ExistsSet, ForallSet)))
    return f.n <= 6 and set_quants <= 3


def cmd_verify(args) -> int:
    ri = fileio.read_reduced_instance(args.directory)
    value = check_reduced(ri)
    print("reduced instance decides:", "true" if value else "false")
    prov = ri.provenance
    if _direct_check_feasible(prov.f, prov.phi):
        direct = evaluate(prov.f, prov.phi)
        print("direct evaluation:", "true" if direct else "false")
        if direct != value:
            print("MISMATCH between direct and reduced evaluation", file=sys.stderr)
            return 2
        print("agreement: ok")
    else:
        print("direct evaluation skipped (instance too large)")
    return 0 if value else 1


def cmd_sigmacol_reduce(args) -> int:
    q = fileio.parse_qdimacs(_read(args.qbf))
    inst = reduce_qsat_to_sigmacol(q)
    text = fileio.instance_to_text(inst)
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}")
    else:
        print(text, end="")
    return 0


def cmd_sigmacol_solve(args) -> int:
    inst = fileio.parse_instance_text(_read(args.instance))
    value = decide_alternating(inst)
    print("true" if value else "false")
    return 0 if value else 1


def cmd_sigmacol_formula(args) -> int:
    phi = sigmacol_formula(args.k)
    print(formula_to_block(phi))
    if args.instance:
        inst = fileio.parse_instance_text(_read(args.instance))
        lg = instance_to_labeled_graph(inst)
        print("# encoded instance:")
        print(fileio.labeled_graph_to_text(lg), end="")
    return 0


def cmd_color(args) -> int:
    g = fileio.parse_graph_text(_read(args.graph))
    colouring = strong_edge_colour(g)
    assert validate_strong(g, colouring)
    print(fileio.graph_with_colouring_to_text(g, colouring), end="")
    print(f"# palette {colouring.palette_size}")
    return 0


def cmd_grid(args) -> int:
    from .graphs import make_grid

    print(fileio.gridlike_to_text(make_grid(args.rows, args.cols)), end="")
    return 0


def cmd_report(args) -> int:
    out = write_report(args.directory, args.out)
    for p in sorted(out.iterdir()):
        print(p)
    return 0


def cmd_bundle(args) -> int:
    ri = fileio.read_reduced_instance(args.directory)
    print(json.dumps(fileio.reduced_instance_to_bundle(ri), sort_keys=True, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="msolab",
        description="desk-scale MSO model-checking and reduction workbench",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse a formula file and print it back")
    p.add_argument("formula")
    p.set_defaults(fn=cmd_parse)

    p = sub.add_parser("check", help="brute-force model checking")
    p.add_argument("graph")
    p.add_argument("formula")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("reduce", help="reduce (graph, sentence) to a labeled grid instance")
    p.add_argument("graph")
    p.add_argument("formula")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_reduce)

    p = sub.add_parser("verify", help="run the certified checker on a reduce output")
    p.add_argument("directory")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("sigmacol", help="alternating-colouring toolbox")
    ssub = p.add_subparsers(dest="subcommand", required=True)
    q = ssub.add_parser("reduce", help="QDIMACS to alternating-colouring instance")
    q.add_argument("qbf")
    q.add_argument("--out")
    q.set_defaults(fn=cmd_sigmacol_reduce)
    q = ssub.add_parser("solve", help="decide an instance by brute force")
    q.add_argument("instance")
    q.set_defaults(fn=cmd_sigmacol_solve)
    q = ssub.add_parser("formula", help="print the deciding sentence for odd k")
    q.add_argument("k", type=int)
    q.add_argument("--instance", help="also print the instance encoded as a labeled graph")
    q.set_defaults(fn=cmd_sigmacol_formula)

    p = sub.add_parser("color", help="greedy strong edge colouring")
    p.add_argument("graph")
    p.set_defaults(fn=cmd_color)

    p = sub.add_parser("grid", help="emit a grid-like bundle")
    p.add_argument("rows", type=int)
    p.add_argument("cols", type=int)
    p.set_defaults(fn=cmd_grid)

    p = sub.add_parser("report", help="render figures and a TSV summary for a reduce output")
    p.add_argument("directory")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_report)

    p = sub.add_parser("bundle", help="print the JSON bundle of a reduce output")
    p.add_argument("directory")
    p.set_defaults(fn=cmd_bundle)

    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except MsolabError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
