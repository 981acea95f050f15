"""MSO formula language: syntax, concrete grammar, brute-force evaluation."""

from .evaluate import (
    Assignment,
    EvaluationError,
    Evaluator,
    SignatureError,
    UnknownLabelError,
    evaluate,
)
from .parse import ParseError, parse, parse_block
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
    FormulaError,
    Implies,
    LabelPred,
    Membership,
    Not,
    Or,
    VarEq,
    collect_defined_preds,
    conj,
    disj,
    expand_defined_preds,
    formula_size,
    formula_to_block,
    formula_to_text,
    free_variables,
    is_sentence,
    substitute,
)

__all__ = [
    "Adj",
    "And",
    "Arc",
    "Assignment",
    "DefinedPred",
    "EvaluationError",
    "Evaluator",
    "ExistsSet",
    "ExistsVertex",
    "ForallSet",
    "ForallVertex",
    "Formula",
    "FormulaError",
    "Implies",
    "LabelPred",
    "Membership",
    "Not",
    "Or",
    "ParseError",
    "SignatureError",
    "UnknownLabelError",
    "VarEq",
    "collect_defined_preds",
    "conj",
    "disj",
    "evaluate",
    "expand_defined_preds",
    "formula_size",
    "formula_to_block",
    "formula_to_text",
    "free_variables",
    "is_sentence",
    "parse",
    "parse_block",
    "substitute",
]
