"""Core graph data model: simple graphs, labeled graphs, path collections,
grid-like graphs, digraphs, and small-scale structural checks.

All values are immutable after construction and safe to share across
threads; queries never mutate.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Iterator, Mapping

from .errors import CapacityError, MsolabError

WHITE = "white"
BLACK = "black"

# has_clique_minor refuses inputs above this vertex count rather than
# guessing; the branch-and-bound below is only meant for certification
# instances.
MINOR_VERTEX_CEILING = 14


class GraphStructureError(MsolabError):
    """A graph-level invariant is violated (loops, undeclared vertices, ...)."""


class GridLikeError(MsolabError):
    """A path bundle fails one of the grid-like conditions.

    `condition` names the failed check: 'path-length', 'path-distinct',
    'path-adjacency', 'union', 'bipartite', 'class-disjoint' or 'degree'.
    """

    def __init__(self, condition: str, message: str):
        super().__init__(f"{condition}: {message}")
        self.condition = condition


def _norm_edge(u: int, v: int) -> tuple[int, int]:
    if u == v:
        raise GraphStructureError(f"loop at vertex {u}")
    return (u, v) if u < v else (v, u)


class Graph:
    """Simple undirected graph over integer vertex identifiers.

    No loops, no parallel edges; every edge endpoint must be declared.
    Constructors in this module produce dense identifiers 0..n-1, but any
    integers are accepted (induced substructures keep their host ids).
    """

    __slots__ = ("vertices", "edges", "_adj", "_hash")

    def __init__(self, vertices: Iterable[int], edges: Iterable[tuple[int, int]] = ()):
        vs = frozenset(vertices)
        es = frozenset(_norm_edge(u, v) for u, v in edges)
        for u, v in es:
            if u not in vs or v not in vs:
                raise GraphStructureError(f"edge ({u},{v}) references undeclared vertex")
        object.__setattr__(self, "vertices", vs)
        object.__setattr__(self, "edges", es)
        adj: dict[int, set[int]] = {v: set() for v in vs}
        for u, v in es:
            adj[u].add(v)
            adj[v].add(u)
        object.__setattr__(self, "_adj", {v: frozenset(ns) for v, ns in adj.items()})
        object.__setattr__(self, "_hash", hash((vs, es)))

    def __setattr__(self, name, value):
        raise AttributeError("Graph is immutable")

    # -- basic queries -------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> frozenset[int]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def max_degree(self) -> int:
        return max((len(ns) for ns in self._adj.values()), default=0)

    def has_edge(self, u: int, v: int) -> bool:
        return u != v and _norm_edge(u, v) in self.edges

    def sorted_vertices(self) -> list[int]:
        return sorted(self.vertices)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def induced(self, keep: Iterable[int]) -> "Graph":
        ks = frozenset(keep)
        if not ks <= self.vertices:
            raise GraphStructureError("induced set contains undeclared vertices")
        return Graph(ks, (e for e in self.edges if e[0] in ks and e[1] in ks))

    def is_connected_set(self, vs: Iterable[int]) -> bool:
        """True iff the induced subgraph on `vs` is connected (and nonempty)."""
        vs = set(vs)
        if not vs:
            return False
        start = next(iter(vs))
        seen = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for y in self._adj[x]:
                if y in vs and y not in seen:
                    seen.add(y)
                    stack.append(y)
        return seen == vs

    # -- constructors ---------------------------------------------------

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(range(n))

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls(range(n), itertools.combinations(range(n), 2))

    @classmethod
    def path(cls, n: int) -> "Graph":
        return cls(range(n), ((i, i + 1) for i in range(n - 1)))

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        if n < 3:
            raise GraphStructureError("cycle needs at least 3 vertices")
        return cls(range(n), [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def complete_bipartite(cls, a: int, b: int) -> "Graph":
        return cls(range(a + b), ((i, a + j) for i in range(a) for j in range(b)))

    def __eq__(self, other):
        return (
            isinstance(other, Graph)
            and self.vertices == other.vertices
            and self.edges == other.edges
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


class Digraph:
    """Simple digraph: ordered arcs, no loops."""

    __slots__ = ("vertices", "arcs", "_out", "_hash")

    def __init__(self, vertices: Iterable[int], arcs: Iterable[tuple[int, int]] = ()):
        vs = frozenset(vertices)
        ars = frozenset((u, v) for u, v in arcs)
        for u, v in ars:
            if u == v:
                raise GraphStructureError(f"loop arc at {u}")
            if u not in vs or v not in vs:
                raise GraphStructureError(f"arc ({u},{v}) references undeclared vertex")
        object.__setattr__(self, "vertices", vs)
        object.__setattr__(self, "arcs", ars)
        out: dict[int, set[int]] = {v: set() for v in vs}
        for u, v in ars:
            out[u].add(v)
        object.__setattr__(self, "_out", {v: frozenset(ns) for v, ns in out.items()})
        object.__setattr__(self, "_hash", hash((vs, ars)))

    def __setattr__(self, name, value):
        raise AttributeError("Digraph is immutable")

    @property
    def n(self) -> int:
        return len(self.vertices)

    def has_arc(self, u: int, v: int) -> bool:
        return (u, v) in self.arcs

    def sorted_vertices(self) -> list[int]:
        return sorted(self.vertices)

    def __eq__(self, other):
        return (
            isinstance(other, Digraph)
            and self.vertices == other.vertices
            and self.arcs == other.arcs
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Digraph(n={self.n}, arcs={len(self.arcs)})"


def underlying(d: Digraph) -> Graph:
    """Underlying undirected graph: antiparallel arc pairs collapse to one edge."""
    return Graph(d.vertices, ((u, v) for u, v in d.arcs))


def orientations(g: Graph) -> Iterator[Digraph]:
    """All 2^m orientations of g, in a deterministic order."""
    edges = g.sorted_edges()
    for mask in range(1 << len(edges)):
        arcs = [
            (u, v) if not (mask >> i) & 1 else (v, u)
            for i, (u, v) in enumerate(edges)
        ]
        yield Digraph(g.vertices, arcs)


class LabeledGraph:
    """Graph with a per-vertex set of labels from a declared alphabet.

    The labeling is total: vertices without labels map to the empty set.
    """

    __slots__ = ("graph", "alphabet", "labeling", "_hash")

    def __init__(
        self,
        graph: Graph,
        alphabet: Iterable[str],
        labeling: Mapping[int, Iterable[str]] | None = None,
    ):
        alpha = tuple(alphabet)
        if len(set(alpha)) != len(alpha):
            raise GraphStructureError("duplicate label names in alphabet")
        lab: dict[int, frozenset[str]] = {v: frozenset() for v in graph.vertices}
        if labeling:
            for v, names in labeling.items():
                if v not in graph.vertices:
                    raise GraphStructureError(f"labeling mentions undeclared vertex {v}")
                ns = frozenset(names)
                unknown = ns - set(alpha)
                if unknown:
                    raise GraphStructureError(f"labels {sorted(unknown)} not in alphabet")
                lab[v] = ns
        object.__setattr__(self, "graph", graph)
        object.__setattr__(self, "alphabet", alpha)
        object.__setattr__(self, "labeling", lab)
        canon = frozenset((v, s) for v, s in lab.items())
        object.__setattr__(self, "_hash", hash((graph, alpha, canon)))

    def __setattr__(self, name, value):
        raise AttributeError("LabeledGraph is immutable")

    def has_label(self, name: str, v: int) -> bool:
        return name in self.labeling[v]

    def __eq__(self, other):
        return (
            isinstance(other, LabeledGraph)
            and self.graph == other.graph
            and self.alphabet == other.alphabet
            and self.labeling == other.labeling
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"LabeledGraph(n={self.graph.n}, m={self.graph.m}, |L|={len(self.alphabet)})"


class LabeledDigraph:
    """Digraph counterpart of LabeledGraph (used by the directed-formula adapter)."""

    __slots__ = ("digraph", "alphabet", "labeling", "_hash")

    def __init__(
        self,
        digraph: Digraph,
        alphabet: Iterable[str] = (),
        labeling: Mapping[int, Iterable[str]] | None = None,
    ):
        alpha = tuple(alphabet)
        lab: dict[int, frozenset[str]] = {v: frozenset() for v in digraph.vertices}
        if labeling:
            for v, names in labeling.items():
                ns = frozenset(names)
                if not ns <= set(alpha):
                    raise GraphStructureError("label not in alphabet")
                lab[v] = ns
        object.__setattr__(self, "digraph", digraph)
        object.__setattr__(self, "alphabet", alpha)
        object.__setattr__(self, "labeling", lab)
        canon = frozenset((v, s) for v, s in lab.items())
        object.__setattr__(self, "_hash", hash((digraph, alpha, canon)))

    def __setattr__(self, name, value):
        raise AttributeError("LabeledDigraph is immutable")

    def has_label(self, name: str, v: int) -> bool:
        return name in self.labeling[v]

    def __eq__(self, other):
        return (
            isinstance(other, LabeledDigraph)
            and self.digraph == other.digraph
            and self.alphabet == other.alphabet
            and self.labeling == other.labeling
        )

    def __hash__(self):
        return self._hash


class PathCollection:
    """A list of vertex sequences, each with pairwise-distinct vertices and
    at least two of them.  Adjacency in a host graph is checked wherever a
    host is available (see validate_grid_like)."""

    __slots__ = ("paths",)

    def __init__(self, paths: Iterable[Iterable[int]]):
        ps = tuple(tuple(p) for p in paths)
        for i, p in enumerate(ps):
            if len(p) < 2:
                raise GridLikeError("path-length", f"path {i} has fewer than 2 vertices")
            if len(set(p)) != len(p):
                raise GridLikeError("path-distinct", f"path {i} repeats a vertex")
        object.__setattr__(self, "paths", ps)

    def __setattr__(self, name, value):
        raise AttributeError("PathCollection is immutable")

    def __len__(self):
        return len(self.paths)

    def __iter__(self):
        return iter(self.paths)

    def __getitem__(self, i):
        return self.paths[i]

    def vertex_set(self, i: int) -> frozenset[int]:
        return frozenset(self.paths[i])

    def path_edges(self, i: int) -> list[tuple[int, int]]:
        p = self.paths[i]
        return [_norm_edge(p[j], p[j + 1]) for j in range(len(p) - 1)]

    def __eq__(self, other):
        return isinstance(other, PathCollection) and self.paths == other.paths

    def __hash__(self):
        return hash(self.paths)


def intersection_graph(paths: PathCollection) -> Graph:
    """One vertex per path; an edge whenever two paths share a vertex."""
    sets = [paths.vertex_set(i) for i in range(len(paths))]
    edges = [
        (i, j)
        for i, j in itertools.combinations(range(len(paths)), 2)
        if sets[i] & sets[j]
    ]
    return Graph(range(len(paths)), edges)


def validate_grid_like(g: Graph, p: PathCollection) -> list[str]:
    """Check the grid-like conditions for (g, p); return a path 2-colouring.

    Accepts iff g is exactly the union of the paths, every path has at
    least two vertices (enforced by PathCollection), and the intersection
    graph of p is bipartite.  On acceptance the classes are confirmed to
    be vertex-disjoint families and the maximum degree of g to be at most
    4.  On rejection raises GridLikeError naming the failed condition.
    """
    union_vertices: set[int] = set()
    union_edges: set[tuple[int, int]] = set()
    for i in range(len(p)):
        for v in p[i]:
            if v not in g.vertices:
                raise GridLikeError("path-adjacency", f"path {i} leaves the host vertex set")
        for e in p.path_edges(i):
            if e not in g.edges:
                raise GridLikeError(
                    "path-adjacency", f"path {i} uses non-edge {e} of the host"
                )
            union_edges.add(e)
        union_vertices.update(p[i])

    if union_vertices != set(g.vertices) or union_edges != set(g.edges):
        raise GridLikeError("union", "host graph is not the union of the paths")

    ig = intersection_graph(p)
    colour: dict[int, str] = {}
    for start in ig.sorted_vertices():
        if start in colour:
            continue
        colour[start] = WHITE
        queue = [start]
        while queue:
            x = queue.pop(0)
            for y in sorted(ig.neighbors(x)):
                if y not in colour:
                    colour[y] = BLACK if colour[x] == WHITE else WHITE
                    queue.append(y)
                elif colour[y] == colour[x]:
                    raise GridLikeError(
                        "bipartite", f"paths {x} and {y} force an odd intersection cycle"
                    )
    bipartition = [colour[i] for i in range(len(p))]

    # Same-class paths are non-adjacent in I(p), hence vertex-disjoint;
    # confirmed here rather than assumed.
    for cls in (WHITE, BLACK):
        seen: set[int] = set()
        for i, c in enumerate(bipartition):
            if c != cls:
                continue
            vs = p.vertex_set(i)
            if vs & seen:
                raise GridLikeError("class-disjoint", f"class {cls} paths overlap")
            seen |= vs
    if g.max_degree() > 4:
        raise GridLikeError("degree", "maximum degree exceeds 4")
    return bipartition


class GridLikeGraph:
    """A graph with a witnessing path collection and path bipartition."""

    __slots__ = ("graph", "paths", "bipartition")

    def __init__(self, graph: Graph, paths: PathCollection, bipartition: Iterable[str]):
        bip = tuple(bipartition)
        if len(bip) != len(paths) or any(c not in (WHITE, BLACK) for c in bip):
            raise GridLikeError("bipartite", "bipartition must assign white/black per path")
        canonical = validate_grid_like(graph, paths)
        # The provided classes must be a valid 2-colouring of I(paths);
        # they may differ from the canonical one by component swaps.
        ig = intersection_graph(paths)
        for i, j in ig.edges:
            if bip[i] == bip[j]:
                raise GridLikeError(
                    "bipartite", f"intersecting paths {i},{j} share class {bip[i]}"
                )
        del canonical
        object.__setattr__(self, "graph", graph)
        object.__setattr__(self, "paths", paths)
        object.__setattr__(self, "bipartition", bip)

    def __setattr__(self, name, value):
        raise AttributeError("GridLikeGraph is immutable")

    def class_paths(self, cls: str) -> list[int]:
        return [i for i, c in enumerate(self.bipartition) if c == cls]

    def __eq__(self, other):
        return (
            isinstance(other, GridLikeGraph)
            and self.graph == other.graph
            and self.paths == other.paths
            and self.bipartition == other.bipartition
        )

    def __hash__(self):
        return hash((self.graph, self.paths, self.bipartition))


def make_grid(rows: int, cols: int) -> GridLikeGraph:
    """The rows x cols square grid with rows as white paths, columns as black.

    Vertex (i, j) gets identifier i*cols + j.  Both dimensions must be at
    least 2 so every path has two vertices.
    """
    if rows < 2 or cols < 2:
        raise GridLikeError("path-length", "grid dimensions must be at least 2x2")
    edges = []
    for i in range(rows):
        for j in range(cols):
            if j + 1 < cols:
                edges.append((i * cols + j, i * cols + j + 1))
            if i + 1 < rows:
                edges.append((i * cols + j, (i + 1) * cols + j))
    g = Graph(range(rows * cols), edges)
    row_paths = [tuple(i * cols + j for j in range(cols)) for i in range(rows)]
    col_paths = [tuple(i * cols + j for i in range(rows)) for j in range(cols)]
    paths = PathCollection(row_paths + col_paths)
    bipartition = (WHITE,) * rows + (BLACK,) * cols
    return GridLikeGraph(g, paths, bipartition)


def subdivide(g: Graph, plan: Mapping[tuple[int, int], int]) -> Graph:
    """Replace each planned edge {u,v} by a path through `count` fresh vertices.

    Fresh identifiers start at max(vertices)+1 and are assigned edge by
    edge in sorted edge order, so the output is deterministic.
    """
    norm_plan: dict[tuple[int, int], int] = {}
    for (u, v), t in plan.items():
        e = _norm_edge(u, v)
        if e not in g.edges:
            raise GraphStructureError(f"subdivision plan references non-edge {e}")
        if t < 0:
            raise GraphStructureError("subdivision count must be non-negative")
        norm_plan[e] = norm_plan.get(e, 0) + t

    nxt = max(g.vertices, default=-1) + 1
    vertices = set(g.vertices)
    edges: list[tuple[int, int]] = []
    for e in g.sorted_edges():
        t = norm_plan.get(e, 0)
        if t == 0:
            edges.append(e)
            continue
        u, v = e
        chain = [u] + [nxt + i for i in range(t)] + [v]
        nxt += t
        vertices.update(chain)
        edges.extend(zip(chain, chain[1:]))
    return Graph(vertices, edges)


def suppress_degree_two(g: Graph, keep: Iterable[int] = ()) -> Graph:
    """Smooth away degree-2 vertices not in `keep`, one at a time.

    Each removed vertex w with neighbours a, b is replaced by the edge
    {a,b}; if a and b are already adjacent the vertex is simply dropped
    (simple-graph collapse).  Used as the contraction oracle when checking
    that a graph is a subdivision of another.
    """
    keep = frozenset(keep)
    vertices = set(g.vertices)
    edges = set(g.edges)
    adj = {v: set(g.neighbors(v)) for v in vertices}
    changed = True
    while changed:
        changed = False
        for w in sorted(vertices):
            if w in keep or len(adj[w]) != 2:
                continue
            a, b = sorted(adj[w])
            vertices.remove(w)
            for x in (a, b):
                adj[x].discard(w)
                edges.discard(_norm_edge(w, x))
            if a != b and b not in adj[a]:
                adj[a].add(b)
                adj[b].add(a)
                edges.add(_norm_edge(a, b))
            del adj[w]
            changed = True
            break
    return Graph(vertices, edges)


def is_13_regular(g: Graph) -> bool:
    """True iff every vertex has degree exactly 1 or exactly 3."""
    return all(g.degree(v) in (1, 3) for v in g.vertices)


def _connected_supersets(
    g: Graph, root: int, allowed: frozenset[int], max_size: int
) -> Iterator[frozenset[int]]:
    """Connected subsets S of `allowed` with min(S) == root, |S| <= max_size."""
    allowed = frozenset(v for v in allowed if v >= root)

    def extend(current: set[int], frontier: list[int], banned: set[int]):
        yield frozenset(current)
        if len(current) >= max_size:
            return
        for idx, v in enumerate(frontier):
            new_banned = banned | set(frontier[:idx])
            current.add(v)
            new_frontier = frontier[idx + 1 :] + sorted(
                w
                for w in g.neighbors(v)
                if w in allowed and w not in current and w not in new_banned
                and w not in frontier
            )
            yield from extend(current, new_frontier, new_banned)
            current.remove(v)

    if root not in allowed:
        return
    start_frontier = sorted(w for w in g.neighbors(root) if w in allowed)
    yield from extend({root}, start_frontier, set())


def has_clique_minor(g: Graph, ell: int) -> bool:
    """Decide whether g has `ell` disjoint connected vertex sets pairwise
    joined by at least one edge.

    Branch-and-bound over canonical branch-set sequences (block minima
    increasing).  Inputs above MINOR_VERTEX_CEILING vertices raise
    CapacityError instead of answering.
    """
    if g.n > MINOR_VERTEX_CEILING:
        raise CapacityError(
            f"clique-minor search is limited to {MINOR_VERTEX_CEILING} vertices, got {g.n}"
        )
    if ell <= 0:
        return True
    if ell == 1:
        return g.n >= 1
    if ell > g.n:
        return False

    verts = g.sorted_vertices()

    def blocks_adjacent(block: frozenset[int], other: frozenset[int]) -> bool:
        return any(g.has_edge(u, v) for u in block for v in other)

    def search(blocks: list[frozenset[int]], used: frozenset[int], last_root: int) -> bool:
        if len(blocks) == ell:
            return True
        needed = ell - len(blocks)
        free = [v for v in verts if v not in used and v > last_root]
        if len(free) < needed:
            return False
        for root in free:
            budget = g.n - len(used) - (needed - 1)
            for s in _connected_supersets(g, root, frozenset(free), budget):
                if all(blocks_adjacent(s, b) for b in blocks):
                    if search(blocks + [s], used | s, root):
                        return True
        return False

    return search([], frozenset(), -1)
