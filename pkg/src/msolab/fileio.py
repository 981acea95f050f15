"""Text formats for graphs, labelings, interpretations, instances and the
on-disk reduced-instance bundle.

Graph files: header `graph <n>` (vertices 0..n-1), one `e u v` line per
edge.  Digraphs use `digraph <n>` and `a u v`.  Labeled graphs add
`l v name1,name2,...` lines.  Grid-like bundles add `p white|black v1 ...`
lines, one per path.  Edge colourings add `c u v colour` lines.
Alternating-colouring instances add `part i v1 v2 ...` and `f0 v colour`
lines.  Blank lines and `#` comments are ignored everywhere.

Interpretations serialize as optional `def name(args) := formula` lines
followed by `alpha: ...`, `beta_adj: ...` and `beta_lab_NAME: ...` entries
(plus `name:` and `symmetric:` metadata).  QBF input follows QDIMACS:
`p cnf <vars> <clauses>`, quantifier lines `e ... 0` / `a ... 0`, clause
lines terminated by 0.
"""

from __future__ import annotations

import json
from pathlib import Path

from .encoding import EncodingLabeling
from .errors import MsolabError
from .graphs import (
    BLACK,
    WHITE,
    Digraph,
    Graph,
    GridLikeGraph,
    LabeledGraph,
    PathCollection,
)
from .interp import Interpretation
from .mso import (
    DefinedPred,
    Formula,
    collect_defined_preds,
    formula_to_block,
    formula_to_text,
    parse_block,
)
from .mso.parse import _DEF_RE, parse
from .mso.syntax import _node_text, _pred_dependency_order, free_variables
from .pipeline import Advice, Provenance, ReducedInstance
from .regular13 import EmbeddedSubdivision, Regular13Encoding
from .sigmacol import QbfFormula, SigmaColInstance
from .strongcolor import EdgeColouring


class FormatError(MsolabError):
    pass


def _content_lines(text: str) -> list[list[str]]:
    out = []
    for raw in text.splitlines():
        line = raw.strip()
        if line and not line.startswith("#"):
            out.append(line.split())
    return out


def _parse_sections(text: str, kind: str) -> tuple[int, dict[str, list[list[str]]]]:
    lines = _content_lines(text)
    if not lines or lines[0][0] != kind or len(lines[0]) != 2:
        raise FormatError(f"expected header '{kind} <n>'")
    try:
        n = int(lines[0][1])
    except ValueError as e:
        raise FormatError(f"bad vertex count {lines[0][1]!r}") from e
    sections: dict[str, list[list[str]]] = {}
    for parts in lines[1:]:
        sections.setdefault(parts[0], []).append(parts[1:])
    return n, sections


def _edge_lines(entries: list[list[str]]) -> list[tuple[int, int]]:
    edges = []
    for parts in entries:
        if len(parts) != 2:
            raise FormatError(f"edge line needs two endpoints, got {parts}")
        edges.append((int(parts[0]), int(parts[1])))
    return edges


# -- graphs -------------------------------------------------------------------


def graph_to_text(g: Graph) -> str:
    verts = g.sorted_vertices()
    if verts != list(range(g.n)):
        raise FormatError("text format needs dense vertex ids 0..n-1")
    lines = [f"graph {g.n}"]
    lines += [f"e {u} {v}" for u, v in g.sorted_edges()]
    return "\n".join(lines) + "\n"


def parse_graph_text(text: str) -> Graph:
    n, sections = _parse_sections(text, "graph")
    unknown = set(sections) - {"e"}
    if unknown:
        raise FormatError(f"unexpected line kinds {sorted(unknown)} in graph file")
    return Graph(range(n), _edge_lines(sections.get("e", [])))


def digraph_to_text(d: Digraph) -> str:
    verts = d.sorted_vertices()
    if verts != list(range(d.n)):
        raise FormatError("text format needs dense vertex ids 0..n-1")
    lines = [f"digraph {d.n}"]
    lines += [f"a {u} {v}" for u, v in sorted(d.arcs)]
    return "\n".join(lines) + "\n"


def parse_digraph_text(text: str) -> Digraph:
    n, sections = _parse_sections(text, "digraph")
    unknown = set(sections) - {"a"}
    if unknown:
        raise FormatError(f"unexpected line kinds {sorted(unknown)} in digraph file")
    return Digraph(range(n), _edge_lines(sections.get("a", [])))


def labeled_graph_to_text(lg: LabeledGraph) -> str:
    verts = lg.graph.sorted_vertices()
    if verts != list(range(lg.graph.n)):
        raise FormatError("text format needs dense vertex ids 0..n-1")
    lines = [f"graph {lg.graph.n}"]
    lines.append("alphabet " + ",".join(lg.alphabet) if lg.alphabet else "alphabet -")
    lines += [f"e {u} {v}" for u, v in lg.graph.sorted_edges()]
    for v in verts:
        names = sorted(lg.labeling[v])
        if names:
            lines.append(f"l {v} " + ",".join(names))
    return "\n".join(lines) + "\n"


def parse_labeled_graph_text(text: str) -> LabeledGraph:
    n, sections = _parse_sections(text, "graph")
    unknown = set(sections) - {"e", "l", "alphabet"}
    if unknown:
        raise FormatError(f"unexpected line kinds {sorted(unknown)}")
    graph = Graph(range(n), _edge_lines(sections.get("e", [])))
    labeling: dict[int, set[str]] = {}
    for parts in sections.get("l", []):
        if len(parts) != 2:
            raise FormatError(f"label line needs vertex and names, got {parts}")
        labeling[int(parts[0])] = set(parts[1].split(","))
    alpha_entries = sections.get("alphabet", [])
    if alpha_entries:
        spec = alpha_entries[0][0] if alpha_entries[0] else "-"
        alphabet = tuple() if spec == "-" else tuple(spec.split(","))
    else:
        alphabet = tuple(sorted({x for names in labeling.values() for x in names}))
    return LabeledGraph(graph, alphabet, labeling)


def gridlike_to_text(glg: GridLikeGraph) -> str:
    lines = [graph_to_text(glg.graph).rstrip("\n")]
    for i, path in enumerate(glg.paths):
        lines.append(f"p {glg.bipartition[i]} " + " ".join(str(v) for v in path))
    return "\n".join(lines) + "\n"


def parse_gridlike_text(text: str) -> GridLikeGraph:
    n, sections = _parse_sections(text, "graph")
    graph = Graph(range(n), _edge_lines(sections.get("e", [])))
    paths = []
    classes = []
    for parts in sections.get("p", []):
        if len(parts) < 3 or parts[0] not in (WHITE, BLACK):
            raise FormatError(f"bad path line {parts}")
        classes.append(parts[0])
        paths.append(tuple(int(x) for x in parts[1:]))
    return GridLikeGraph(graph, PathCollection(paths), classes)


def graph_with_colouring_to_text(g: Graph, colouring: EdgeColouring) -> str:
    lines = [graph_to_text(g).rstrip("\n")]
    for (u, v) in g.sorted_edges():
        lines.append(f"c {u} {v} {colouring[(u, v)]}")
    return "\n".join(lines) + "\n"


def parse_graph_with_colouring(text: str) -> tuple[Graph, EdgeColouring]:
    n, sections = _parse_sections(text, "graph")
    graph = Graph(range(n), _edge_lines(sections.get("e", [])))
    colours = {}
    for parts in sections.get("c", []):
        if len(parts) != 3:
            raise FormatError(f"colour line needs u v colour, got {parts}")
        colours[(int(parts[0]), int(parts[1]))] = int(parts[2])
    return graph, EdgeColouring(colours)


# -- interpretations ----------------------------------------------------------


def interpretation_to_text(i: Interpretation) -> str:
    preds: dict[str, DefinedPred] = {}
    formulas: list[tuple[str, Formula]] = [("alpha", i.alpha), ("beta_adj", i.beta_adj)]
    formulas += [(f"beta_lab_{lab}", f) for lab, f in sorted(i.beta_labels.items())]
    for _, f in formulas:
        preds.update(collect_defined_preds(f))
    lines = [f"name: {i.name}", f"symmetric: {'true' if i.symmetric else 'false'}"]
    for name in _pred_dependency_order(preds):
        p = preds[name]
        lines.append(f"def {name}({','.join(p.params)}) := {_node_text(p.defn)}")
    for key, f in formulas:
        lines.append(f"{key}: {_node_text(f)}")
    return "\n".join(lines) + "\n"


def parse_interpretation_text(text: str) -> Interpretation:
    defs: dict[str, DefinedPred] = {}
    fields: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _DEF_RE.match(line)
        if m:
            name, params_text, rhs = m.groups()
            params = tuple(p.strip() for p in params_text.split(",") if p.strip())
            defn = parse(rhs, defs)
            fv, _ = free_variables(defn)
            if fv - set(params):
                raise FormatError(f"line {lineno}: definition {name!r} has stray variables")
            defs[name] = DefinedPred(name, params, params, defn)
            continue
        if ":" not in line:
            raise FormatError(f"line {lineno}: expected 'key: value'")
        key, _, value = line.partition(":")
        fields[key.strip()] = value.strip()
    if "alpha" not in fields or "beta_adj" not in fields:
        raise FormatError("interpretation needs alpha and beta_adj entries")
    beta_labels = {
        key[len("beta_lab_"):]: parse(value, defs)
        for key, value in fields.items()
        if key.startswith("beta_lab_")
    }
    return Interpretation(
        alpha=parse(fields["alpha"], defs),
        beta_adj=parse(fields["beta_adj"], defs),
        beta_labels=beta_labels,
        name=fields.get("name", "i"),
        symmetric=fields.get("symmetric", "false").lower() == "true",
    )


# -- alternating-colouring instances ------------------------------------------


def instance_to_text(inst: SigmaColInstance) -> str:
    lines = [graph_to_text(inst.graph).rstrip("\n")]
    for i, block in enumerate(inst.partition):
        lines.append(f"part {i} " + " ".join(str(v) for v in sorted(block)))
    for v in sorted(inst.precolouring):
        lines.append(f"f0 {v} {inst.precolouring[v]}")
    return "\n".join(lines) + "\n"


def parse_instance_text(text: str) -> SigmaColInstance:
    n, sections = _parse_sections(text, "graph")
    graph = Graph(range(n), _edge_lines(sections.get("e", [])))
    blocks: dict[int, frozenset[int]] = {}
    for parts in sections.get("part", []):
        blocks[int(parts[0])] = frozenset(int(x) for x in parts[1:])
    if set(blocks) != set(range(len(blocks))):
        raise FormatError("part indices must be 0..k")
    precolouring = {}
    for parts in sections.get("f0", []):
        if len(parts) != 2:
            raise FormatError(f"f0 line needs vertex and colour, got {parts}")
        precolouring[int(parts[0])] = int(parts[1])
    partition = tuple(blocks[i] for i in range(len(blocks)))
    return SigmaColInstance(graph, partition, precolouring)


# -- QDIMACS ------------------------------------------------------------------


def qbf_to_qdimacs(q: QbfFormula) -> str:
    nv = len(q.variables)
    lines = [f"p cnf {nv} {len(q.matrix)}"]
    for quant, vs in q.blocks:
        lines.append(f"{quant} " + " ".join(str(v) for v in vs) + " 0")
    for cl in q.matrix:
        lines.append(" ".join(str(l) for l in cl) + " 0")
    return "\n".join(lines) + "\n"


def parse_qdimacs(text: str) -> QbfFormula:
    blocks: list[tuple[str, tuple[int, ...]]] = []
    clauses: list[tuple[int, ...]] = []
    header_seen = False
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if header_seen or parts[1:2] != ["cnf"] or len(parts) != 4:
                raise FormatError(f"bad problem line {line!r}")
            header_seen = True
            continue
        if parts[0] in ("e", "a"):
            if parts[-1] != "0":
                raise FormatError(f"quantifier line must end in 0: {line!r}")
            blocks.append((parts[0], tuple(int(x) for x in parts[1:-1])))
            continue
        if parts[-1] != "0":
            raise FormatError(f"clause line must end in 0: {line!r}")
        clauses.append(tuple(int(x) for x in parts[:-1]))
    if not header_seen:
        raise FormatError("missing 'p cnf' line")
    return QbfFormula(blocks=tuple(blocks), matrix=tuple(clauses))


# -- reduced-instance bundles --------------------------------------------------

BUNDLE_NAME = "bundle.json"


def _sparse_graph_obj(g: Graph) -> dict:
    return {
        "vertices": g.sorted_vertices(),
        "edges": [list(e) for e in g.sorted_edges()],
    }


def _sparse_graph_from(obj: dict) -> Graph:
    return Graph(obj["vertices"], [tuple(e) for e in obj["edges"]])


def reduced_instance_to_bundle(ri: ReducedInstance) -> dict:
    prov = ri.provenance
    return {
        "format": "msolab-reduced-instance",
        "version": 1,
        "host": labeled_graph_to_text(ri.host),
        "psi": formula_to_block(ri.psi),
        "f": graph_to_text(prov.f),
        "phi": formula_to_block(prov.phi),
        "h": graph_to_text(prov.encoding13.h),
        "anchors": {str(u): a for u, a in sorted(prov.encoding13.vertex_anchors.items())},
        "i1": interpretation_to_text(prov.encoding13.i1),
        "i2": interpretation_to_text(prov.i2),
        "phi_i1": formula_to_block(prov.phi_i1),
        "advice": {
            "grid": gridlike_to_text(prov.advice.grid),
            "colouring": graph_with_colouring_to_text(
                prov.advice.grid.graph, prov.advice.colouring
            ),
            "size_params": list(prov.advice.size_params),
        },
        "embedding": {
            "target": _sparse_graph_obj(prov.embedding.target),
            "vertex_to_path": {
                str(v): p for v, p in sorted(prov.embedding.vertex_to_path.items())
            },
            "edge_to_path": [
                [u, v, p] for (u, v), p in sorted(prov.embedding.edge_to_path.items())
            ],
            "rows": prov.embedding.rows,
            "cols": prov.embedding.cols,
        },
        "representatives": {
            str(p): v for p, v in sorted(prov.labeling.representatives.items())
        },
        "colour_count": prov.labeling.colour_count,
        "sizes": dict(prov.sizes),
    }


def bundle_to_reduced_instance(bundle: dict) -> ReducedInstance:
    if bundle.get("format") != "msolab-reduced-instance":
        raise FormatError("not a reduced-instance bundle")
    host = parse_labeled_graph_text(bundle["host"])
    _, colouring = parse_graph_with_colouring(bundle["advice"]["colouring"])
    advice = Advice(
        grid=parse_gridlike_text(bundle["advice"]["grid"]),
        colouring=colouring,
        size_params=tuple(bundle["advice"]["size_params"]),
    )
    emb = bundle["embedding"]
    embedding = EmbeddedSubdivision(
        target=_sparse_graph_from(emb["target"]),
        vertex_to_path={int(v): p for v, p in emb["vertex_to_path"].items()},
        edge_to_path={(u, v): p for u, v, p in emb["edge_to_path"]},
        rows=emb["rows"],
        cols=emb["cols"],
    )
    labeling = EncodingLabeling(
        host=host,
        representatives={int(p): v for p, v in bundle["representatives"].items()},
        colour_count=bundle["colour_count"],
    )
    encoding13 = Regular13Encoding(
        h=parse_graph_text(bundle["h"]),
        i1=parse_interpretation_text(bundle["i1"]),
        vertex_anchors={int(u): a for u, a in bundle["anchors"].items()},
    )
    provenance = Provenance(
        f=parse_graph_text(bundle["f"]),
        phi=parse_block(bundle["phi"]),
        encoding13=encoding13,
        phi_i1=parse_block(bundle["phi_i1"]),
        advice=advice,
        embedding=embedding,
        labeling=labeling,
        i2=parse_interpretation_text(bundle["i2"]),
        sizes={k: int(v) for k, v in bundle["sizes"].items()},
    )
    return ReducedInstance(host=host, psi=parse_block(bundle["psi"]), provenance=provenance)


def write_reduced_instance(directory: str | Path, ri: ReducedInstance) -> Path:
    """Write the bundle plus the individual text artifacts; deterministic
    byte-for-byte for identical inputs."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    bundle = reduced_instance_to_bundle(ri)
    (directory / BUNDLE_NAME).write_text(
        json.dumps(bundle, sort_keys=True, indent=2) + "\n"
    )
    (directory / "host.lgraph").write_text(bundle["host"])
    (directory / "psi.mso").write_text(bundle["psi"] + "\n")
    (directory / "phi.mso").write_text(bundle["phi"] + "\n")
    (directory / "phi_i1.mso").write_text(bundle["phi_i1"] + "\n")
    (directory / "f.graph").write_text(bundle["f"])
    (directory / "h.graph").write_text(bundle["h"])
    (directory / "i1.interp").write_text(bundle["i1"])
    (directory / "i2.interp").write_text(bundle["i2"])
    (directory / "advice.grid").write_text(bundle["advice"]["grid"])
    (directory / "advice.colouring").write_text(bundle["advice"]["colouring"])
    return directory / BUNDLE_NAME


def read_reduced_instance(directory: str | Path) -> ReducedInstance:
    bundle = json.loads((Path(directory) / BUNDLE_NAME).read_text())
    return bundle_to_reduced_instance(bundle)
