"""Encode a subgraph of a grid-like graph's path intersection graph into
vertex labels of the host, so the subgraph can be recovered by an
interpretation.

Given a grid-like host (G, P) with path bipartition white/black, a strong
edge colouring of G with c colours, and a target graph h on the path
indices (every h-edge joining a white and a black path), the labeling uses
the alphabet

    light_1 .. light_c   colours of white-path edges at a vertex
    dark_1  .. dark_c    colours of black-path edges at a vertex
    w, b                 representative markers (one chosen vertex per
                         h-path, a system of distinct representatives)
    m                    crossing marker: vertex lies on both paths of
                         some h-edge

(2c+3 labels).  Because the colouring is strong and same-class paths are
vertex-disjoint, an edge of G is a white-path edge exactly when the light
colour sets of its endpoints intersect; connectivity along white (black)
edges is therefore expressible over the labels, and two representatives
are adjacent in the recovered graph exactly when some m-marked vertex is
white-connected to one and black-connected to the other.

The connectivity predicates con_w/con_b and the adjacency definition
grid_adj carry native procedures (union-find over the label-decided edge
sets) registered as evaluation hooks; certify_connectivity_hooks checks
native against definition before hooked evaluation is used at scale.
"""

from __future__ import annotations

import functools
import random
from dataclasses import dataclass
from typing import Mapping

from .errors import MsolabError
from .graphs import BLACK, WHITE, Graph, GridLikeGraph, LabeledGraph, make_grid
from .interp import Interpretation, induced_structure
from .mso import (
    Adj,
    And,
    Assignment,
    DefinedPred,
    Evaluator,
    ExistsVertex,
    ForallSet,
    Formula,
    Implies,
    LabelPred,
    Membership,
    Not,
    Or,
    VarEq,
    conj,
    disj,
)
from .strongcolor import EdgeColouring, strong_edge_colour, validate_strong

INTERP_NAME = "grid"


class EncodingError(MsolabError):
    pass


def encoding_alphabet(colour_count: int) -> tuple[str, ...]:
    lights = tuple(f"light_{i}" for i in range(1, colour_count + 1))
    darks = tuple(f"dark_{i}" for i in range(1, colour_count + 1))
    return lights + darks + ("w", "b", "m")


@dataclass(frozen=True)
class EncodingLabeling:
    """A labeled host plus the path -> representative map that decodes it."""

    host: LabeledGraph
    representatives: Mapping[int, int]
    colour_count: int

    def __post_init__(self):
        object.__setattr__(self, "representatives", dict(self.representatives))
        lab = self.host.labeling
        for v, names in lab.items():
            lights = [x for x in names if x.startswith("light_")]
            darks = [x for x in names if x.startswith("dark_")]
            if len(lights) > 2 or len(darks) > 2:
                raise EncodingError(f"vertex {v} carries more than two colours per class")
            if "w" in names and "b" in names:
                raise EncodingError(f"vertex {v} marked as both class representatives")
        reps = list(self.representatives.values())
        if len(set(reps)) != len(reps):
            raise EncodingError("representatives are not pairwise distinct")

    def __hash__(self):
        return hash((self.host, frozenset(self.representatives.items()), self.colour_count))


def select_representatives(
    glg: GridLikeGraph, h_vertices: frozenset[int] | set[int]
) -> dict[int, int]:
    """A system of distinct representatives: one vertex per chosen path,
    injectively, found by augmenting-path matching.  Lowest-numbered
    vertices are preferred, so the output is deterministic.  Failure means
    the grid-like invariants were violated upstream."""
    h_vertices = set(h_vertices)
    if not h_vertices <= set(range(len(glg.paths))):
        raise EncodingError("target vertices must index paths of the grid-like graph")
    owner: dict[int, int] = {}

    def assign(p: int, visited: set[int]) -> bool:
        for v in sorted(glg.paths.vertex_set(p)):
            if v in visited:
                continue
            visited.add(v)
            if v not in owner or assign(owner[v], visited):
                owner[v] = p
                return True
        return False

    for p in sorted(h_vertices):
        if not assign(p, set()):
            raise EncodingError(
                f"no distinct representative for path {p}; grid-like input is corrupted"
            )
    return {p: v for v, p in owner.items()}


def class_edges(glg: GridLikeGraph, h_vertices, cls: str) -> set[tuple[int, int]]:
    """Edges of the cls-class paths among h_vertices."""
    out: set[tuple[int, int]] = set()
    for p in h_vertices:
        if glg.bipartition[p] == cls:
            out.update(glg.paths.path_edges(p))
    return out


def build_labeling(
    glg: GridLikeGraph, h: Graph, colouring: EdgeColouring
) -> EncodingLabeling:
    """Label the host so that h (a graph on path indices, each edge joining
    a white and a black path) is recoverable; see the module docstring."""
    if not validate_strong(glg.graph, colouring):
        raise EncodingError("colouring is not strong on the host")
    if not set(h.vertices) <= set(range(len(glg.paths))):
        raise EncodingError("target vertices must index paths of the grid-like graph")
    for p, q in h.edges:
        if glg.bipartition[p] == glg.bipartition[q]:
            raise EncodingError(
                f"target edge ({p},{q}) joins two {glg.bipartition[p]} paths"
            )

    c = colouring.palette_size
    white = class_edges(glg, h.vertices, WHITE)
    black = class_edges(glg, h.vertices, BLACK)
    labeling: dict[int, set[str]] = {v: set() for v in glg.graph.vertices}
    for e in white:
        for v in e:
            labeling[v].add(f"light_{colouring[e]}")
    for e in black:
        for v in e:
            labeling[v].add(f"dark_{colouring[e]}")

    reps = select_representatives(glg, set(h.vertices))
    for p, v in reps.items():
        labeling[v].add("w" if glg.bipartition[p] == WHITE else "b")

    for p, q in h.edges:
        for v in glg.paths.vertex_set(p) & glg.paths.vertex_set(q):
            labeling[v].add("m")

    host = LabeledGraph(glg.graph, encoding_alphabet(c), labeling)
    return EncodingLabeling(host=host, representatives=reps, colour_count=c)


# -- the recovering interpretation ------------------------------------------


def _shared_colour_test(kind: str, u: str, v: str, c: int) -> Formula:
    return disj(
        [And(LabelPred(f"{kind}_{i}", u), LabelPred(f"{kind}_{i}", v)) for i in range(1, c + 1)]
    )


def _connectivity_defn(kind: str, c: int) -> Formula:
    """t and z lie in the same component spanned by edges whose endpoints
    share a `kind` colour: every set containing z but not t is crossed by
    such an edge."""
    crossing = ExistsVertex(
        "u",
        ExistsVertex(
            "v",
            conj(
                [
                    Membership("v", "Z"),
                    Not(Membership("u", "Z")),
                    Adj("u", "v"),
                    _shared_colour_test(kind, "u", "v", c),
                ]
            ),
        ),
    )
    return ForallSet(
        "Z",
        Implies(And(Membership("z", "Z"), Not(Membership("t", "Z"))), crossing),
    )


def con_pred(kind: str, c: int, t_arg: str, z_arg: str) -> DefinedPred:
    name = "con_w" if kind == "light" else "con_b"
    return DefinedPred(name, ("t", "z"), (t_arg, z_arg), _connectivity_defn(kind, c))


def build_I2(colour_count: int) -> Interpretation:
    """Interpretation recovering the encoded target from a labeled host:
    the domain is the marked representatives and two of them are adjacent
    when some m-vertex is same-class-connected to both."""
    c = colour_count
    con_w_defn = _connectivity_defn("light", c)
    con_b_defn = _connectivity_defn("dark", c)

    def rho(t_arg: str) -> Formula:
        return And(
            Implies(
                LabelPred("w", t_arg), DefinedPred("con_w", ("t", "z"), (t_arg, "z"), con_w_defn)
            ),
            Implies(
                LabelPred("b", t_arg), DefinedPred("con_b", ("t", "z"), (t_arg, "z"), con_b_defn)
            ),
        )

    beta = ExistsVertex("z", conj([LabelPred("m", "z"), rho("x"), rho("y")]))
    alpha = Or(LabelPred("w", "x"), LabelPred("b", "x"))
    return Interpretation(
        alpha=alpha, beta_adj=beta, name=INTERP_NAME, symmetric=True
    )


# -- native procedures for the hooks -----------------------------------------


def _labels_of(structure) -> dict[int, frozenset[str]]:
    if not isinstance(structure, LabeledGraph):
        raise EncodingError("connectivity natives need a labeled undirected host")
    return structure.labeling


def _colour_components(ev: Evaluator, kind: str) -> dict[int, int]:
    key = ("encoding-comp", kind)
    comp = ev.scratch.get(key)
    if comp is not None:
        return comp
    structure = ev.structure
    labels = _labels_of(structure)
    g = structure.graph
    parent = {v: v for v in g.vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    prefix = f"{kind}_"
    for u, v in g.edges:
        shared = any(
            x.startswith(prefix) and x in labels[v] for x in labels[u]
        )
        if shared:
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
    comp = {v: find(v) for v in g.vertices}
    ev.scratch[key] = comp
    return comp


def _native_con(kind: str):
    def native(ev: Evaluator, t: int, z: int) -> bool:
        comp = _colour_components(ev, kind)
        return comp[t] == comp[z]

    return native


def _native_grid_adj(ev: Evaluator, a: int, b: int) -> bool:
    labels = _labels_of(ev.structure)
    wcomp = _colour_components(ev, "light")
    bcomp = _colour_components(ev, "dark")
    key = ("encoding-marks",)
    marks = ev.scratch.get(key)
    if marks is None:
        marks = ev.scratch[key] = [v for v in ev.vertex_ids if "m" in labels[v]]

    def rho(t: int, z: int) -> bool:
        if "w" in labels[t] and wcomp[t] != wcomp[z]:
            return False
        if "b" in labels[t] and bcomp[t] != bcomp[z]:
            return False
        return True

    return any(rho(a, z) and rho(b, z) for z in marks)


def connectivity_hooks() -> dict:
    """Native procedures for con_w, con_b and the whole adjacency
    definition (name `grid_adj`, as produced by translate/induce)."""
    return {
        "con_w": _native_con("light"),
        "con_b": _native_con("dark"),
        f"{INTERP_NAME}_adj": _native_grid_adj,
    }


# -- conformance certification ----------------------------------------------


def _random_labeled_host(rng: random.Random, n: int, c: int) -> LabeledGraph:
    """Arbitrary (not necessarily well-formed) labeled host for conformance."""
    edges = [
        (u, v)
        for u in range(n)
        for v in range(u + 1, n)
        if rng.random() < 0.4
    ]
    g = Graph(range(n), edges)
    alphabet = encoding_alphabet(c)
    labeling = {}
    for v in range(n):
        names = set()
        for kind in ("light", "dark"):
            for i in rng.sample(range(1, c + 1), k=rng.randint(0, min(2, c))):
                names.add(f"{kind}_{i}")
        if rng.random() < 0.3:
            names.add(rng.choice(["w", "b"]))
        if rng.random() < 0.3:
            names.add("m")
        labeling[v] = names
    return LabeledGraph(g, alphabet, labeling)


def _certification_hosts(c: int, thorough: bool) -> list[LabeledGraph]:
    hosts: list[LabeledGraph] = []
    dims = [(2, 2), (2, 3), (3, 3)] + ([(2, 4), (2, 5)] if thorough else [])
    for rows, cols in dims:
        glg = make_grid(rows, cols)
        colouring = strong_edge_colour(glg.graph)
        targets = [
            Graph(range(rows + cols), [(0, rows)]),
            Graph(range(rows + cols), [(0, rows), (1, rows), (1, rows + 1)]),
        ]
        for h in targets:
            hosts.append(build_labeling(glg, h, colouring).host)
    rng = random.Random(91)
    sizes = [5, 6, 7, 8] + ([9, 10] if thorough else [])
    for n in sizes:
        hosts.append(_random_labeled_host(rng, n, c))
    return hosts


@functools.lru_cache(maxsize=None)
def certify_connectivity_hooks(colour_count: int, thorough: bool = False) -> bool:
    """Prove hook == definition for con_w/con_b/grid_adj on a deterministic
    corpus of hosts (small grid encodings plus adversarial random
    labelings), over every argument pair.  con_w/con_b are certified by
    full quantifier expansion; grid_adj is then certified with the
    connectivity hooks active on both sides.

    Each host is checked against the definitions built for its own colour
    count, the invariant build_labeling/build_I2 maintain.  Returns True
    or raises."""
    hooks = connectivity_hooks()
    con_hooks = {k: v for k, v in hooks.items() if k.startswith("con_")}
    for host in _certification_hosts(colour_count, thorough):
        c_host = (len(host.alphabet) - 3) // 2
        preds = {
            "con_w": (con_pred("light", c_host, "t", "z"), {}),
            "con_b": (con_pred("dark", c_host, "t", "z"), {}),
            f"{INTERP_NAME}_adj": (build_I2(c_host).adj_pred("t", "z"), con_hooks),
        }
        for name, (pred, base_hooks) in preds.items():
            plain = Evaluator(host, hooks=base_hooks)
            hooked = Evaluator(host, hooks=hooks)
            for t in host.graph.sorted_vertices():
                for z in host.graph.sorted_vertices():
                    env = Assignment(vertex={"t": t, "z": z})
                    if plain.check(pred, env) != hooked.check(pred, env):
                        raise EncodingError(
                            f"hook {name} disagrees with its definition at "
                            f"({t},{z}) on {host!r}"
                        )
    return True


def decode(enc: EncodingLabeling) -> Graph:
    """Recover the encoded target: induce the structure and rename each
    representative back to its path index."""
    ind = induced_structure(
        enc.host, build_I2(enc.colour_count), hooks=connectivity_hooks()
    )
    back = {v: p for p, v in enc.representatives.items()}
    missing = [v for v in ind.graph.vertices if v not in back]
    if missing:
        raise EncodingError(
            f"recovered domain contains non-representative vertices {sorted(missing)}"
        )
    return Graph(
        (back[v] for v in ind.graph.vertices),
        ((back[u], back[v]) for u, v in ind.graph.edges),
    )
