"""Recursive-descent parser for the ASCII formula grammar.

    adj(x,y)   arc(x,y)   lab_NAME(x)   x = y   x in X
    ~F   F & G   F | G   F -> G
    E x. F   A x. F   E X. F   A X. F

Lowercase identifiers are vertex variables, uppercase are set variables;
`E` and `A` are reserved quantifier keywords and cannot name set variables.
Precedence: ~  >  &  >  |  >  ->, with -> associating to the right and
quantifier scope extending maximally to the right.

Files may also carry definition lines `def name(p1,p2) := FORMULA` which
introduce named predicates usable as atoms `name(a,b)` below them.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import MsolabError
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
    is_set_name,
    is_vertex_name,
)


class ParseError(MsolabError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class _Token:
    kind: str  # IDENT LABEL SYM END
    text: str
    line: int
    column: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<label>lab_[A-Za-z0-9_]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<sym>->|[~&|()=.,])
    """,
    re.VERBOSE,
)

_RESERVED = {"adj", "arc", "in", "def", "E", "A"}


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line = 1
    line_start = 0
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        col = pos - line_start + 1
        if m.lastgroup == "ws":
            chunk = m.group()
            if "\n" in chunk:
                line += chunk.count("\n")
                line_start = pos + chunk.rindex("\n") + 1
        elif m.lastgroup == "label":
            tokens.append(_Token("LABEL", m.group()[len("lab_"):], line, col))
        elif m.lastgroup == "ident":
            tokens.append(_Token("IDENT", m.group(), line, col))
        else:
            tokens.append(_Token("SYM", m.group(), line, col))
        pos = m.end()
    tokens.append(_Token("END", "", line, len(text) - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token], defs: dict[str, DefinedPred]):
        self.tokens = tokens
        self.pos = 0
        self.defs = defs

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, message: str, tok: _Token | None = None):
        tok = tok or self.peek()
        raise ParseError(message, tok.line, tok.column)

    def expect_sym(self, text: str) -> _Token:
        tok = self.peek()
        if tok.kind != "SYM" or tok.text != text:
            self.fail(f"expected {text!r}", tok)
        return self.advance()

    def at_sym(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind == "SYM" and tok.text == text

    # formula := implies; implies := or ('->' implies)?
    def formula(self) -> Formula:
        left = self.or_level()
        if self.at_sym("->"):
            self.advance()
            return Implies(left, self.formula())
        return left

    def or_level(self) -> Formula:
        out = self.and_level()
        while self.at_sym("|"):
            self.advance()
            out = Or(out, self.and_level())
        return out

    def and_level(self) -> Formula:
        out = self.unary()
        while self.at_sym("&"):
            self.advance()
            out = And(out, self.unary())
        return out

    def unary(self) -> Formula:
        tok = self.peek()
        if self.at_sym("~"):
            self.advance()
            return Not(self.unary())
        if tok.kind == "IDENT" and tok.text in ("E", "A"):
            return self.quantifier()
        return self.atom()

    def quantifier(self) -> Formula:
        q = self.advance()
        var = self.peek()
        if var.kind != "IDENT" or var.text in _RESERVED:
            self.fail("expected a variable after quantifier", var)
        self.advance()
        self.expect_sym(".")
        body = self.formula()
        if is_vertex_name(var.text):
            return ExistsVertex(var.text, body) if q.text == "E" else ForallVertex(var.text, body)
        return ExistsSet(var.text, body) if q.text == "E" else ForallSet(var.text, body)

    def vertex_var(self) -> str:
        tok = self.peek()
        if tok.kind != "IDENT":
            self.fail("expected a vertex variable", tok)
        if tok.text in _RESERVED:
            self.fail(f"{tok.text!r} is reserved", tok)
        if not is_vertex_name(tok.text):
            self.fail(
                f"{tok.text!r} is a set variable where a vertex variable is required", tok
            )
        return self.advance().text

    def atom(self) -> Formula:
        tok = self.peek()
        if self.at_sym("("):
            self.advance()
            inner = self.formula()
            self.expect_sym(")")
            return inner
        if tok.kind == "LABEL":
            self.advance()
            self.expect_sym("(")
            x = self.vertex_var()
            self.expect_sym(")")
            return LabelPred(tok.text, x)
        if tok.kind != "IDENT":
            self.fail("expected an atom", tok)
        name = tok.text
        if name in ("adj", "arc"):
            self.advance()
            self.expect_sym("(")
            x = self.vertex_var()
            self.expect_sym(",")
            y = self.vertex_var()
            self.expect_sym(")")
            return Adj(x, y) if name == "adj" else Arc(x, y)
        if name in self.defs:
            self.advance()
            self.expect_sym("(")
            args = [self.vertex_var()]
            while self.at_sym(","):
                self.advance()
                args.append(self.vertex_var())
            self.expect_sym(")")
            template = self.defs[name]
            if len(args) != len(template.params):
                self.fail(f"{name} expects {len(template.params)} arguments", tok)
            return DefinedPred(name, template.params, tuple(args), template.defn)
        if name in _RESERVED:
            self.fail(f"{name!r} is reserved", tok)
        # variable-led atom: `x = y` or `x in X`
        self.advance()
        if not is_vertex_name(name):
            self.fail(f"set variable {name!r} cannot start an atom", tok)
        nxt = self.peek()
        if self.at_sym("="):
            self.advance()
            return VarEq(name, self.vertex_var())
        if nxt.kind == "IDENT" and nxt.text == "in":
            self.advance()
            set_tok = self.peek()
            if set_tok.kind != "IDENT":
                self.fail("expected a set variable after 'in'", set_tok)
            if not is_set_name(set_tok.text):
                self.fail(
                    f"{set_tok.text!r} is a vertex variable where a set variable is required",
                    set_tok,
                )
            self.advance()
            return Membership(name, set_tok.text)
        self.fail("expected '=' or 'in' after variable", nxt)


def parse(text: str, definitions: dict[str, DefinedPred] | None = None) -> Formula:
    """Parse one formula (no definition lines)."""
    parser = _Parser(_tokenize(text), dict(definitions or {}))
    phi = parser.formula()
    tok = parser.peek()
    if tok.kind != "END":
        parser.fail("trailing input after formula", tok)
    return phi


_DEF_RE = re.compile(r"^def\s+([a-z_][A-Za-z0-9_]*)\s*\(([^)]*)\)\s*:=\s*(.*)$")


def parse_block(text: str) -> Formula:
    """Parse a definition block: optional `def` lines, then the formula.

    Blank lines and `#` comment lines are ignored.  The main formula may
    span several lines once definitions are exhausted.
    """
    defs: dict[str, DefinedPred] = {}
    body_lines: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if body_lines:
            body_lines.append(raw)
            continue
        if not line or line.startswith("#"):
            continue
        m = _DEF_RE.match(line)
        if m:
            name, params_text, rhs = m.groups()
            if name in defs or name in _RESERVED:
                raise ParseError(f"duplicate or reserved definition {name!r}", lineno, 1)
            params = tuple(p.strip() for p in params_text.split(",") if p.strip())
            defn = parse(rhs, defs)
            fv, _ = free_variables(defn)
            if fv - set(params):
                raise ParseError(
                    f"definition {name!r} uses undeclared variables {sorted(fv - set(params))}",
                    lineno,
                    1,
                )
            defs[name] = DefinedPred(name, params, params, defn)
        else:
            body_lines.append(raw)
    if not body_lines:
        raise ParseError("no formula found", 1, 1)
    return parse("\n".join(body_lines), defs)
