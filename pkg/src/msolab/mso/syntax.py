"""Abstract syntax for MSO formulas over labeled graphs and digraphs.

Vertex variables are lowercase-led identifiers, set variables uppercase-led;
the constructors enforce this so a name can never denote both kinds.
Formula size is the number of AST nodes (variables are node fields, not
nodes).  A DefinedPred node stands for its definition with the arguments
substituted and counts as the definition's size.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

from ..errors import MsolabError


class FormulaError(MsolabError):
    """Malformed formula construction (bad variable kind, arity, ...)."""


def is_vertex_name(name: str) -> bool:
    return bool(name) and (name[0].islower() or name[0] == "_")


def is_set_name(name: str) -> bool:
    return bool(name) and name[0].isupper()


def _check_vertex(name: str) -> None:
    if not is_vertex_name(name):
        raise FormulaError(f"{name!r} is not a vertex variable (must start lowercase)")


def _check_set(name: str) -> None:
    if not is_set_name(name):
        raise FormulaError(f"{name!r} is not a set variable (must start uppercase)")


@dataclass(frozen=True)
class Formula:
    def __and__(self, other: "Formula") -> "Formula":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return Or(self, other)

    def __invert__(self) -> "Formula":
        return Not(self)


@dataclass(frozen=True)
class Adj(Formula):
    x: str
    y: str

    def __post_init__(self):
        _check_vertex(self.x)
        _check_vertex(self.y)


@dataclass(frozen=True)
class Arc(Formula):
    """Directed adjacency; only meaningful over digraph structures."""

    x: str
    y: str

    def __post_init__(self):
        _check_vertex(self.x)
        _check_vertex(self.y)


@dataclass(frozen=True)
class LabelPred(Formula):
    name: str
    x: str

    def __post_init__(self):
        if not self.name:
            raise FormulaError("empty label name")
        _check_vertex(self.x)


@dataclass(frozen=True)
class VarEq(Formula):
    x: str
    y: str

    def __post_init__(self):
        _check_vertex(self.x)
        _check_vertex(self.y)


@dataclass(frozen=True)
class Membership(Formula):
    x: str
    X: str

    def __post_init__(self):
        _check_vertex(self.x)
        _check_set(self.X)


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class ExistsVertex(Formula):
    var: str
    body: Formula

    def __post_init__(self):
        _check_vertex(self.var)


@dataclass(frozen=True)
class ForallVertex(Formula):
    var: str
    body: Formula

    def __post_init__(self):
        _check_vertex(self.var)


@dataclass(frozen=True)
class ExistsSet(Formula):
    var: str
    body: Formula

    def __post_init__(self):
        _check_set(self.var)


@dataclass(frozen=True)
class ForallSet(Formula):
    var: str
    body: Formula

    def __post_init__(self):
        _check_set(self.var)


@dataclass(frozen=True)
class DefinedPred(Formula):
    """A named vertex predicate applied to arguments.

    Semantically identical to `defn` with `params` substituted by `args`.
    The definition's free vertex variables must be exactly `params` and it
    must have no free set variables, so its value depends only on the
    argument vertices; evaluators exploit this for caching and may run a
    registered native procedure instead of expanding `defn`.
    """

    name: str
    params: tuple[str, ...]
    args: tuple[str, ...]
    defn: Formula = field(compare=False, hash=False)

    def __post_init__(self):
        if not is_vertex_name(self.name):
            raise FormulaError(f"predicate name {self.name!r} must start lowercase")
        for p in self.params:
            _check_vertex(p)
        for a in self.args:
            _check_vertex(a)
        if len(self.params) != len(self.args):
            raise FormulaError(f"{self.name}: {len(self.params)} params, {len(self.args)} args")
        fv, fs = free_variables(self.defn)
        if fs:
            raise FormulaError(f"{self.name}: definition has free set variables {sorted(fs)}")
        if fv - set(self.params):
            raise FormulaError(
                f"{self.name}: definition has stray free variables {sorted(fv - set(self.params))}"
            )


_BINARY = (And, Or, Implies)
_VERTEX_QUANT = (ExistsVertex, ForallVertex)
_SET_QUANT = (ExistsSet, ForallSet)
QUANTIFIERS = _VERTEX_QUANT + _SET_QUANT


def children(phi: Formula) -> tuple[Formula, ...]:
    if isinstance(phi, Not):
        return (phi.body,)
    if isinstance(phi, _BINARY):
        return (phi.left, phi.right)
    if isinstance(phi, QUANTIFIERS):
        return (phi.body,)
    return ()


def formula_size(phi: Formula) -> int:
    """AST node count; a DefinedPred contributes its definition's size."""
    memo: dict[int, int] = {}

    def size(f: Formula) -> int:
        key = id(f)
        if key in memo:
            return memo[key]
        if isinstance(f, DefinedPred):
            s = size(f.defn)
        else:
            s = 1 + sum(size(c) for c in children(f))
        memo[key] = s
        return s

    return size(phi)


def free_variables(phi: Formula) -> tuple[frozenset[str], frozenset[str]]:
    """Free (vertex, set) variable names of phi."""
    fv: set[str] = set()
    fs: set[str] = set()

    def walk(f: Formula, bound_v: frozenset[str], bound_s: frozenset[str]) -> None:
        if isinstance(f, (Adj, Arc, VarEq)):
            for name in (f.x, f.y):
                if name not in bound_v:
                    fv.add(name)
        elif isinstance(f, LabelPred):
            if f.x not in bound_v:
                fv.add(f.x)
        elif isinstance(f, Membership):
            if f.x not in bound_v:
                fv.add(f.x)
            if f.X not in bound_s:
                fs.add(f.X)
        elif isinstance(f, DefinedPred):
            for name in f.args:
                if name not in bound_v:
                    fv.add(name)
        elif isinstance(f, Not):
            walk(f.body, bound_v, bound_s)
        elif isinstance(f, _BINARY):
            walk(f.left, bound_v, bound_s)
            walk(f.right, bound_v, bound_s)
        elif isinstance(f, _VERTEX_QUANT):
            walk(f.body, bound_v | {f.var}, bound_s)
        elif isinstance(f, _SET_QUANT):
            walk(f.body, bound_v, bound_s | {f.var})
        else:
            raise FormulaError(f"unknown node {type(f).__name__}")

    walk(phi, frozenset(), frozenset())
    return frozenset(fv), frozenset(fs)


def is_sentence(phi: Formula) -> bool:
    fv, fs = free_variables(phi)
    return not fv and not fs


def bound_vertex_names(phi: Formula) -> frozenset[str]:
    """Vertex variable names bound by quantifiers in phi, not descending
    into DefinedPred definitions (those have their own scopes)."""
    out: set[str] = set()
    stack = [phi]
    while stack:
        f = stack.pop()
        if isinstance(f, _VERTEX_QUANT):
            out.add(f.var)
        stack.extend(children(f))
    return frozenset(out)


def substitute(phi: Formula, mapping: dict[str, str]) -> Formula:
    """Rename free vertex variables according to `mapping`.

    Bound variables shadow as usual.  The caller is responsible for
    capture avoidance (the interpretation engine keeps bound names in a
    reserved namespace, so its substitutions never capture).
    """
    if not mapping:
        return phi

    def sub(f: Formula, m: dict[str, str]) -> Formula:
        if not m:
            return f
        if isinstance(f, Adj):
            return Adj(m.get(f.x, f.x), m.get(f.y, f.y))
        if isinstance(f, Arc):
            return Arc(m.get(f.x, f.x), m.get(f.y, f.y))
        if isinstance(f, VarEq):
            return VarEq(m.get(f.x, f.x), m.get(f.y, f.y))
        if isinstance(f, LabelPred):
            return LabelPred(f.name, m.get(f.x, f.x))
        if isinstance(f, Membership):
            return Membership(m.get(f.x, f.x), f.X)
        if isinstance(f, DefinedPred):
            return DefinedPred(f.name, f.params, tuple(m.get(a, a) for a in f.args), f.defn)
        if isinstance(f, Not):
            return Not(sub(f.body, m))
        if isinstance(f, And):
            return And(sub(f.left, m), sub(f.right, m))
        if isinstance(f, Or):
            return Or(sub(f.left, m), sub(f.right, m))
        if isinstance(f, Implies):
            return Implies(sub(f.left, m), sub(f.right, m))
        if isinstance(f, _VERTEX_QUANT):
            inner = {k: v for k, v in m.items() if k != f.var}
            return type(f)(f.var, sub(f.body, inner))
        if isinstance(f, _SET_QUANT):
            return type(f)(f.var, sub(f.body, m))
        raise FormulaError(f"unknown node {type(f).__name__}")

    return sub(phi, dict(mapping))


def conj(parts: Iterable[Formula]) -> Formula:
    """Right-nested conjunction; empty input is not allowed."""
    items = list(parts)
    if not items:
        raise FormulaError("empty conjunction")
    out = items[-1]
    for f in reversed(items[:-1]):
        out = And(f, out)
    return out


def disj(parts: Iterable[Formula]) -> Formula:
    items = list(parts)
    if not items:
        raise FormulaError("empty disjunction")
    out = items[-1]
    for f in reversed(items[:-1]):
        out = Or(f, out)
    return out


def collect_defined_preds(phi: Formula) -> dict[str, DefinedPred]:
    """All DefinedPred nodes in phi (including inside definitions), by name.

    Two predicates with the same name must share the same definition
    object; mixing differently-defined namesakes in one formula is a
    construction error.
    """
    found: dict[str, DefinedPred] = {}
    seen: set[int] = set()

    def walk(f: Formula) -> None:
        if id(f) in seen:
            return
        seen.add(id(f))
        if isinstance(f, DefinedPred):
            prev = found.get(f.name)
            if prev is not None and prev.defn is not f.defn and prev.defn != f.defn:
                raise FormulaError(f"conflicting definitions for predicate {f.name!r}")
            found.setdefault(f.name, f)
            walk(f.defn)
        for c in children(f):
            walk(c)

    walk(phi)
    return found


def expand_defined_preds(phi: Formula) -> Formula:
    """Inline every DefinedPred by its definition (recursively)."""
    if isinstance(phi, DefinedPred):
        body = expand_defined_preds(phi.defn)
        return substitute(body, dict(zip(phi.params, phi.args)))
    if isinstance(phi, Not):
        return Not(expand_defined_preds(phi.body))
    if isinstance(phi, _BINARY):
        return type(phi)(expand_defined_preds(phi.left), expand_defined_preds(phi.right))
    if isinstance(phi, QUANTIFIERS):
        return type(phi)(phi.var, expand_defined_preds(phi.body))
    return phi


# -- concrete syntax --------------------------------------------------------

_ATOMS = (Adj, Arc, LabelPred, VarEq, Membership, DefinedPred)


def _atom_text(phi: Formula) -> str:
    if isinstance(phi, Adj):
        return f"adj({phi.x},{phi.y})"
    if isinstance(phi, Arc):
        return f"arc({phi.x},{phi.y})"
    if isinstance(phi, LabelPred):
        return f"lab_{phi.name}({phi.x})"
    if isinstance(phi, VarEq):
        return f"{phi.x} = {phi.y}"
    if isinstance(phi, Membership):
        return f"{phi.x} in {phi.X}"
    if isinstance(phi, DefinedPred):
        return f"{phi.name}({','.join(phi.args)})"
    raise FormulaError(f"not an atom: {type(phi).__name__}")


def _left_text(phi: Formula) -> str:
    # a quantifier's scope extends maximally right, so as a left operand it
    # must be bracketed or it would swallow the rest of the line
    if isinstance(phi, QUANTIFIERS):
        return f"({_node_text(phi)})"
    return _node_text(phi)


def _node_text(phi: Formula) -> str:
    if isinstance(phi, _ATOMS):
        return _atom_text(phi)
    if isinstance(phi, Not):
        inner = _node_text(phi.body)
        if not isinstance(phi.body, _ATOMS + (Not,)):
            inner = f"({inner})"
        return f"~{inner}"
    if isinstance(phi, And):
        return f"({_left_text(phi.left)} & {_node_text(phi.right)})"
    if isinstance(phi, Or):
        return f"({_left_text(phi.left)} | {_node_text(phi.right)})"
    if isinstance(phi, Implies):
        return f"({_left_text(phi.left)} -> {_node_text(phi.right)})"
    if isinstance(phi, (ExistsVertex, ExistsSet)):
        return f"E {phi.var}. {_node_text(phi.body)}"
    if isinstance(phi, (ForallVertex, ForallSet)):
        return f"A {phi.var}. {_node_text(phi.body)}"
    raise FormulaError(f"unknown node {type(phi).__name__}")


def formula_to_text(phi: Formula) -> str:
    """Single-line concrete syntax; parse(formula_to_text(phi)) == phi
    whenever phi contains no DefinedPred nodes (those need a definition
    section, see formula_to_block)."""
    return _node_text(phi)


def _pred_dependency_order(preds: dict[str, DefinedPred]) -> list[str]:
    order: list[str] = []
    visiting: set[str] = set()

    def visit(name: str) -> None:
        if name in order:
            return
        if name in visiting:
            raise FormulaError(f"cyclic predicate definitions via {name!r}")
        visiting.add(name)
        for dep in sorted(collect_defined_preds(preds[name].defn)):
            visit(dep)
        visiting.remove(name)
        order.append(name)

    for name in sorted(preds):
        visit(name)
    return order


def formula_to_block(phi: Formula) -> str:
    """Multi-line form: `def name(params) := ...` lines, then the formula.

    This is the on-disk format; it round-trips through parse_block.
    """
    preds = collect_defined_preds(phi)
    lines = []
    for name in _pred_dependency_order(preds):
        p = preds[name]
        lines.append(f"def {name}({','.join(p.params)}) := {_node_text(p.defn)}")
    lines.append(_node_text(phi))
    return "\n".join(lines)


def iter_nodes(phi: Formula) -> Iterator[Formula]:
    """All nodes of phi, not descending into DefinedPred definitions."""
    stack = [phi]
    while stack:
        f = stack.pop()
        yield f
        stack.extend(children(f))
