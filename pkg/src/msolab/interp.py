"""Interpretation engine: translate formulas between structure signatures
and induce target structures inside host structures.

An interpretation is a bundle of formulas over the host signature: a domain
predicate `alpha` (canonical free variable x), an adjacency definition
`beta_adj` (canonical free variables x, y), and optionally one formula per
target label.  It acts two ways, and the two actions agree:

    evaluate(host, translate(phi, i)) == evaluate(induced_structure(host, i), phi)

Translation substitutes interpretation formulas as DefinedPred applications
rather than inlining them, which both prevents variable capture (arguments
bind parameters in a fresh scope) and keeps translated formulas compact
(one shared definition per atom kind).  Translation runs in time polynomial
in the input formula size.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping

from .errors import MsolabError
from .graphs import Graph, LabeledGraph
from .mso import (
    Adj,
    And,
    Arc,
    Assignment,
    DefinedPred,
    Evaluator,
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
    formula_size,
    free_variables,
    substitute,
)
from .mso.syntax import bound_vertex_names

ALPHA_VAR = "x"
BETA_VARS = ("x", "y")


class InterpretationError(MsolabError):
    """Malformed interpretation (wrong free variables, ...)."""


class MissingBetaError(MsolabError):
    """A target label has no defining formula in the interpretation."""


def _check_free(formula: Formula, allowed: tuple[str, ...], what: str) -> None:
    fv, fs = free_variables(formula)
    if fs:
        raise InterpretationError(f"{what} has free set variables {sorted(fs)}")
    if not fv <= set(allowed):
        raise InterpretationError(
            f"{what} must use only {allowed} free, got {sorted(fv)}"
        )
    # rebinding a parameter name inside a definition would let the
    # symmetrizing x/y swap capture; reject it up front
    clash = bound_vertex_names(formula) & set(BETA_VARS)
    if clash:
        raise InterpretationError(f"{what} rebinds parameter names {sorted(clash)}")


@dataclass(frozen=True)
class Interpretation:
    """Domain predicate, adjacency definition, optional label definitions.

    `symmetric` declares that beta_adj(x,y) and beta_adj(y,x) agree on every
    host; constructions in this package set it for their hand-built bundles
    (verified by their tests), while arbitrary bundles leave it off and get
    symmetrized explicitly.
    """

    alpha: Formula
    beta_adj: Formula
    beta_labels: Mapping[str, Formula] = field(default_factory=dict)
    name: str = "i"
    symmetric: bool = False

    def __post_init__(self):
        _check_free(self.alpha, (ALPHA_VAR,), "alpha")
        _check_free(self.beta_adj, BETA_VARS, "beta_adj")
        for lab, f in self.beta_labels.items():
            _check_free(f, (ALPHA_VAR,), f"beta for label {lab!r}")
        object.__setattr__(self, "beta_labels", dict(self.beta_labels))

    def __hash__(self):
        return hash((self.alpha, self.beta_adj, tuple(sorted(self.beta_labels)), self.name))

    def alpha_pred(self, arg: str) -> DefinedPred:
        return DefinedPred(f"{self.name}_alpha", (ALPHA_VAR,), (arg,), self.alpha)

    def adj_pred(self, u: str, v: str) -> DefinedPred:
        """The substituted adjacency atom; symmetrized unless declared so."""
        if self.symmetric:
            defn = self.beta_adj
        else:
            defn = Or(self.beta_adj, substitute(self.beta_adj, {"x": "y", "y": "x"}))
        return DefinedPred(f"{self.name}_adj", BETA_VARS, (u, v), defn)

    def label_pred(self, label: str, arg: str) -> DefinedPred:
        if label not in self.beta_labels:
            raise MissingBetaError(
                f"interpretation {self.name!r} has no beta for target label {label!r}"
            )
        return DefinedPred(
            f"{self.name}_lab_{label}", (ALPHA_VAR,), (arg,), self.beta_labels[label]
        )


def identity_interpretation(name: str = "id") -> Interpretation:
    return Interpretation(
        alpha=VarEq("x", "x"), beta_adj=Adj("x", "y"), name=name, symmetric=True
    )


def translate(phi: Formula, i: Interpretation) -> Formula:
    """Translate phi over the target signature into a formula over the host.

    Adjacency and target-label atoms become applications of the
    interpretation's definitions; vertex quantifiers are relativized to the
    domain predicate (E x. b  ->  E x. alpha(x) & b;  A x. b  ->
    A x. alpha(x) -> b); set quantifiers and the remaining connectives pass
    through unchanged.  DefinedPred nodes inside phi are translated once per
    distinct definition and keep their arguments.
    """
    defn_memo: dict[int, tuple[Formula, Formula]] = {}

    def walk(f: Formula) -> Formula:
        if isinstance(f, Adj):
            return i.adj_pred(f.x, f.y)
        if isinstance(f, Arc):
            raise InterpretationError("cannot translate arc atoms (digraph signature)")
        if isinstance(f, LabelPred):
            return i.label_pred(f.name, f.x)
        if isinstance(f, (VarEq, Membership)):
            return f
        if isinstance(f, DefinedPred):
            hit = defn_memo.get(id(f.defn))
            if hit is None or hit[0] is not f.defn:
                hit = (f.defn, walk(f.defn))
                defn_memo[id(f.defn)] = hit
            return DefinedPred(f"{i.name}_{f.name}", f.params, f.args, hit[1])
        if isinstance(f, Not):
            return Not(walk(f.body))
        if isinstance(f, And):
            return And(walk(f.left), walk(f.right))
        if isinstance(f, Or):
            return Or(walk(f.left), walk(f.right))
        if isinstance(f, Implies):
            return Implies(walk(f.left), walk(f.right))
        if isinstance(f, ExistsVertex):
            return ExistsVertex(f.var, And(i.alpha_pred(f.var), walk(f.body)))
        if isinstance(f, ForallVertex):
            return ForallVertex(f.var, Implies(i.alpha_pred(f.var), walk(f.body)))
        if isinstance(f, ExistsSet):
            return ExistsSet(f.var, walk(f.body))
        if isinstance(f, ForallSet):
            return ForallSet(f.var, walk(f.body))
        raise InterpretationError(f"cannot translate {type(f).__name__}")

    out = walk(phi)
    # size-polynomial guarantee: every node contributes at most the largest
    # substituted template plus relativization overhead
    templates = [formula_size(i.alpha), formula_size(i.adj_pred("x", "y"))]
    templates += [formula_size(f) for f in i.beta_labels.values()]
    bound = formula_size(phi) * (max(templates) + 3)
    assert formula_size(out) <= bound, "translation exceeded its size bound"
    return out


def induced_structure(
    host: LabeledGraph | Graph,
    i: Interpretation,
    hooks: Mapping | None = None,
    evaluator: Evaluator | None = None,
) -> LabeledGraph:
    """The structure phi-translation talks about: vertices are the host
    vertices satisfying alpha, edges the pairs satisfying beta_adj in either
    argument order, labels (if any) from the label definitions.  Loops
    implied by beta_adj(a,a) are dropped to keep the result simple.
    """
    ev = evaluator or Evaluator(host, hooks=hooks)
    domain = [
        a
        for a in ev.vertex_ids
        if ev.check(i.alpha_pred(ALPHA_VAR), Assignment(vertex={ALPHA_VAR: a}))
    ]
    # adj_pred covers both argument orders unless declared symmetric, in
    # which case a single order is equivalent
    adj_atom = i.adj_pred(*BETA_VARS)
    edges = [
        (a, b)
        for a, b in itertools.combinations(domain, 2)
        if ev.check(adj_atom, Assignment(vertex={"x": a, "y": b}))
    ]
    graph = Graph(domain, edges)
    if not i.beta_labels:
        return LabeledGraph(graph, ())
    alphabet = sorted(i.beta_labels)
    labeling = {
        a: [
            lab
            for lab in alphabet
            if ev.check(i.label_pred(lab, ALPHA_VAR), Assignment(vertex={ALPHA_VAR: a}))
        ]
        for a in domain
    }
    return LabeledGraph(graph, alphabet, labeling)


def to_directed_formula(phi: Formula) -> Formula:
    """Adapt an adjacency-signature formula to digraphs: every adj(x,y)
    becomes arc(x,y) | arc(y,x); everything else is unchanged.  For every
    orientation D of a graph G, G satisfies phi iff D satisfies the result.
    """
    memo: dict[int, tuple[Formula, Formula]] = {}

    def walk(f: Formula) -> Formula:
        if isinstance(f, Adj):
            return Or(Arc(f.x, f.y), Arc(f.y, f.x))
        if isinstance(f, (Arc, VarEq, Membership, LabelPred)):
            return f
        if isinstance(f, DefinedPred):
            hit = memo.get(id(f.defn))
            if hit is None or hit[0] is not f.defn:
                hit = (f.defn, walk(f.defn))
                memo[id(f.defn)] = hit
            if hit[1] == f.defn:
                return f
            return DefinedPred(f.name, f.params, f.args, hit[1])
        if isinstance(f, Not):
            return Not(walk(f.body))
        if isinstance(f, And):
            return And(walk(f.left), walk(f.right))
        if isinstance(f, Or):
            return Or(walk(f.left), walk(f.right))
        if isinstance(f, Implies):
            return Implies(walk(f.left), walk(f.right))
        if isinstance(f, (ExistsVertex, ForallVertex, ExistsSet, ForallSet)):
            return type(f)(f.var, walk(f.body))
        raise InterpretationError(f"cannot adapt {type(f).__name__}")

    return walk(phi)
