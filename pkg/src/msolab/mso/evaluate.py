"""Brute-force model checking of MSO formulas on finite structures.

Structures are LabeledGraph/Graph (adjacency signature) or
LabeledDigraph/Digraph (arc signature).  Set quantifiers range over all
subsets of the vertex set, enumerated in binary-counter order over the
sorted vertices (bit i of the counter is the i-th smallest vertex), so
short-circuiting is reproducible.  Vertex quantifiers iterate the sorted
vertex set; innermost quantifiers iterate fastest.

Cost note: a sentence with s set quantifiers and v vertex quantifiers over
an n-vertex structure performs at most 2^(s*n) * n^v atomic checks; this
is documented rather than asserted per run.

Two evaluation controls exist beyond plain expansion:

* hooks: a mapping from DefinedPred names to native procedures
  ``fn(evaluator, *vertex_ids) -> bool``.  A hooked predicate is decided
  natively instead of expanding its definition; conformance of every hook
  against its definition is established by tests before hooked evaluation
  is trusted at scale.  Natives may stash precomputed state in
  ``evaluator.scratch``.

* set_domain: an optional vertex subset; set quantifiers then enumerate
  only subsets of it.  This is sound exactly for formulas produced by
  interpretation translation (their residual set quantifiers never
  inspect membership outside the domain predicate's extension), with any
  set-quantified interpretation internals hooked or expanded (expansion
  of a DefinedPred definition always uses the full subset space).

Vertex quantifiers are never clipped by set_domain; a quantifier whose
body is guarded as ``guard(v) & ...`` or ``guard(v) -> ...`` (guard a
one-argument DefinedPred, the shape produced by translation) enumerates
only the guard's extension, which is a pure short-circuit of the same
semantics.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from ..errors import MsolabError
from ..graphs import Digraph, Graph, LabeledDigraph, LabeledGraph
from .syntax import (
    Adj,
    And,
    Arc,
    DefinedPred,
    ExistsSet,
    ExistsVertex,
    ForallSet,
    ForallVertex,
    Formula,
    Implies,
    LabelPred,
    Membership,
    Not,
    Or,
    VarEq,
    free_variables,
)


class EvaluationError(MsolabError):
    """Unbound variable, bad binding, or malformed evaluation request."""


class SignatureError(MsolabError):
    """Formula atom does not fit the structure (adj on a digraph, ...)."""


class UnknownLabelError(MsolabError):
    """A label predicate refers to a name outside the structure's alphabet."""


Structure = LabeledGraph | Graph | LabeledDigraph | Digraph

Hook = Callable[..., bool]


@dataclass(frozen=True)
class Assignment:
    """Bindings for the free variables of a formula."""

    vertex: Mapping[str, int] = field(default_factory=dict)
    sets: Mapping[str, frozenset[int]] = field(default_factory=dict)


_MISSING = object()


class Evaluator:
    """Reusable evaluation context for one structure.

    Reuse a single Evaluator when checking many formulas (or one formula
    under many assignments) against the same structure: compiled formula
    code, DefinedPred result caches, guard extensions and native scratch
    state all persist across calls.
    """

    def __init__(
        self,
        structure: Structure,
        hooks: Mapping[str, Hook] | None = None,
        set_domain: Iterable[int] | None = None,
    ):
        self.structure = structure
        self.hooks = dict(hooks or {})
        self.scratch: dict = {}

        if isinstance(structure, LabeledGraph):
            graph, labels, directed = structure.graph, structure, False
        elif isinstance(structure, Graph):
            graph, labels, directed = structure, None, False
        elif isinstance(structure, LabeledDigraph):
            graph, labels, directed = structure.digraph, structure, True
        elif isinstance(structure, Digraph):
            graph, labels, directed = structure, None, True
        else:
            raise EvaluationError(f"cannot evaluate over {type(structure).__name__}")
        self.directed = directed
        self.vertex_ids = sorted(graph.vertices)
        self.index = {v: i for i, v in enumerate(self.vertex_ids)}
        n = len(self.vertex_ids)

        if directed:
            self._out = [0] * n
            for u, v in graph.arcs:
                self._out[self.index[u]] |= 1 << self.index[v]
            self._adj = None
        else:
            self._adj = [0] * n
            for u, v in graph.edges:
                iu, iv = self.index[u], self.index[v]
                self._adj[iu] |= 1 << iv
                self._adj[iv] |= 1 << iu
            self._out = None

        self.alphabet = labels.alphabet if labels is not None else ()
        self._label_masks: dict[str, int] = {}
        if labels is not None:
            for name in self.alphabet:
                mask = 0
                for v, ls in labels.labeling.items():
                    if name in ls:
                        mask |= 1 << self.index[v]
                self._label_masks[name] = mask

        if set_domain is None:
            self._set_universe = list(range(n))
        else:
            dom = set(set_domain)
            bad = dom - set(self.vertex_ids)
            if bad:
                raise EvaluationError(f"set_domain vertices {sorted(bad)} not in structure")
            self._set_universe = sorted(self.index[v] for v in dom)

        self._all_indices = list(range(n))
        # per-unit variable environments; definitions compile as separate units
        self._compiled: dict[int, tuple[Formula, Callable[[], bool]]] = {}
        self._defn_units: dict[int, tuple[Formula, Callable[[], bool], dict, tuple[str, ...]]] = {}
        self._in_progress: set[int] = set()
        self._pred_cache: dict[tuple, bool] = {}
        self._pinned: list[Formula] = []  # keeps id()-keyed cache entries alive
        self._venv: dict[str, int] = {}
        self._senv: dict[str, int] = {}

    # -- public API -----------------------------------------------------

    def check(self, phi: Formula, env: Assignment | None = None) -> bool:
        env = env or Assignment()
        fv, fs = free_variables(phi)
        for name in sorted(fv):
            if name not in env.vertex:
                raise EvaluationError(f"unbound vertex variable {name!r}")
        for name in sorted(fs):
            if name not in env.sets:
                raise EvaluationError(f"unbound set variable {name!r}")
        self._venv.clear()
        self._senv.clear()
        for name, v in env.vertex.items():
            if v not in self.index:
                raise EvaluationError(f"binding {name}={v} is not a vertex of the structure")
            self._venv[name] = self.index[v]
        for name, vs in env.sets.items():
            mask = 0
            for v in vs:
                if v not in self.index:
                    raise EvaluationError(f"set binding {name} contains non-vertex {v}")
                mask |= 1 << self.index[v]
            self._senv[name] = mask
        fn = self._compile_root(phi)
        return fn()

    # -- compilation ----------------------------------------------------

    def _compile_root(self, phi: Formula) -> Callable[[], bool]:
        key = id(phi)
        hit = self._compiled.get(key)
        if hit is not None and hit[0] is phi:
            return hit[1]
        fn = self._compile(phi, self._venv, self._senv, self._set_universe)
        self._compiled[key] = (phi, fn)
        return fn

    def _guard_extension(self, guard: DefinedPred, venv: dict) -> list[int]:
        pred_fn = self._compile_pred(guard, venv)
        var = guard.args[0]
        saved = venv.get(var, _MISSING)
        out = []
        for idx in self._all_indices:
            venv[var] = idx
            if pred_fn():
                out.append(idx)
        if saved is _MISSING:
            venv.pop(var, None)
        else:
            venv[var] = saved
        return out

    def _compile_pred(self, node: DefinedPred, venv: dict) -> Callable[[], bool]:
        """Compile a DefinedPred occurrence: cached native or definition call."""
        hook = self.hooks.get(node.name)
        cache = self._pred_cache
        args = node.args
        defn = node.defn
        self._pinned.append(defn)
        defn_key = (id(defn), node.name)
        vertex_ids = self.vertex_ids

        if hook is None:
            unit = self._defn_units.get(id(defn))
            if unit is None or unit[0] is not defn:
                if id(defn) in self._in_progress:
                    raise EvaluationError(f"recursive predicate {node.name!r}")
                self._in_progress.add(id(defn))
                dvenv: dict[str, int] = {}
                dsenv: dict[str, int] = {}
                # definitions always expand over the full subset space
                dfn = self._compile(defn, dvenv, dsenv, self._all_indices)
                self._in_progress.discard(id(defn))
                unit = (defn, dfn, dvenv, node.params)
                self._defn_units[id(defn)] = unit
            _, dfn, dvenv, params = unit

            def run(vals: tuple[int, ...]) -> bool:
                dvenv.clear()
                dvenv.update(zip(params, vals))
                return dfn()

        else:

            def run(vals: tuple[int, ...]) -> bool:
                return hook(self, *(vertex_ids[i] for i in vals))

        def fn() -> bool:
            vals = tuple(venv[a] for a in args)
            key = (defn_key, vals)
            hit = cache.get(key)
            if hit is None:
                hit = cache[key] = run(vals)
            return hit

        return fn

    def _compile(
        self, phi: Formula, venv: dict, senv: dict, set_universe: list[int]
    ) -> Callable[[], bool]:
        if isinstance(phi, Adj):
            if self.directed:
                raise SignatureError("adj(...) is not available on digraph structures")
            adj = self._adj
            x, y = phi.x, phi.y
            return lambda: bool(adj[venv[x]] >> venv[y] & 1)
        if isinstance(phi, Arc):
            if not self.directed:
                raise SignatureError("arc(...) is not available on undirected structures")
            out = self._out
            x, y = phi.x, phi.y
            return lambda: bool(out[venv[x]] >> venv[y] & 1)
        if isinstance(phi, VarEq):
            x, y = phi.x, phi.y
            return lambda: venv[x] == venv[y]
        if isinstance(phi, Membership):
            x, X = phi.x, phi.X
            return lambda: bool(senv[X] >> venv[x] & 1)
        if isinstance(phi, LabelPred):
            if phi.name not in self._label_masks:
                raise UnknownLabelError(
                    f"label {phi.name!r} is not in the structure alphabet {list(self.alphabet)}"
                )
            mask = self._label_masks[phi.name]
            x = phi.x
            return lambda: bool(mask >> venv[x] & 1)
        if isinstance(phi, DefinedPred):
            return self._compile_pred(phi, venv)
        if isinstance(phi, Not):
            body = self._compile(phi.body, venv, senv, set_universe)
            return lambda: not body()
        if isinstance(phi, And):
            left = self._compile(phi.left, venv, senv, set_universe)
            right = self._compile(phi.right, venv, senv, set_universe)
            return lambda: left() and right()
        if isinstance(phi, Or):
            left = self._compile(phi.left, venv, senv, set_universe)
            right = self._compile(phi.right, venv, senv, set_universe)
            return lambda: left() or right()
        if isinstance(phi, Implies):
            left = self._compile(phi.left, venv, senv, set_universe)
            right = self._compile(phi.right, venv, senv, set_universe)
            return lambda: not left() or right()
        if isinstance(phi, (ExistsVertex, ForallVertex)):
            return self._compile_vertex_quant(phi, venv, senv, set_universe)
        if isinstance(phi, (ExistsSet, ForallSet)):
            return self._compile_set_quant(phi, venv, senv, set_universe)
        raise EvaluationError(f"cannot compile node {type(phi).__name__}")

    def _compile_vertex_quant(self, phi, venv, senv, set_universe):
        var = phi.var
        exists = isinstance(phi, ExistsVertex)
        body = phi.body

        guard = None
        rest = None
        if exists and isinstance(body, And) and isinstance(body.left, DefinedPred):
            guard, rest = body.left, body.right
        elif not exists and isinstance(body, Implies) and isinstance(body.left, DefinedPred):
            guard, rest = body.left, body.right
        if guard is not None and guard.args != (var,):
            guard = rest = None

        if guard is not None:
            rest_fn = self._compile(rest, venv, senv, set_universe)
            ev = self
            cell: list[list[int]] = []

            def fn() -> bool:
                if not cell:
                    cell.append(ev._guard_extension(guard, venv))
                candidates = cell[0]
                saved = venv.get(var, _MISSING)
                result = not exists
                for idx in candidates:
                    venv[var] = idx
                    if rest_fn() == exists:
                        result = exists
                        break
                if saved is _MISSING:
                    venv.pop(var, None)
                else:
                    venv[var] = saved
                return result

            return fn

        body_fn = self._compile(body, venv, senv, set_universe)
        indices = self._all_indices

        def fn() -> bool:
            saved = venv.get(var, _MISSING)
            result = not exists
            for idx in indices:
                venv[var] = idx
                if body_fn() == exists:
                    result = exists
                    break
            if saved is _MISSING:
                venv.pop(var, None)
            else:
                venv[var] = saved
            return result

        return fn

    def _compile_set_quant(self, phi, venv, senv, set_universe):
        var = phi.var
        exists = isinstance(phi, ExistsSet)
        body_fn = self._compile(phi.body, venv, senv, set_universe)
        positions = list(set_universe)
        k = len(positions)

        def fn() -> bool:
            saved = senv.get(var, _MISSING)
            result = not exists
            for counter in range(1 << k):
                mask = 0
                c = counter
                pos = 0
                while c:
                    if c & 1:
                        mask |= 1 << positions[pos]
                    c >>= 1
                    pos += 1
                senv[var] = mask
                if body_fn() == exists:
                    result = exists
                    break
            if saved is _MISSING:
                senv.pop(var, None)
            else:
                senv[var] = saved
            return result

        return fn


def evaluate(
    structure: Structure,
    phi: Formula,
    env: Assignment | None = None,
    *,
    hooks: Mapping[str, Hook] | None = None,
    set_domain: Iterable[int] | None = None,
) -> bool:
    """One-shot truth of phi on the structure under env (see Evaluator)."""
    return Evaluator(structure, hooks=hooks, set_domain=set_domain).check(phi, env)
