"""Ready-made MSO sentences used throughout the tests and the CLI."""

from __future__ import annotations

from .mso import (
    Adj,
    And,
    ExistsSet,
    ExistsVertex,
    ForallVertex,
    Formula,
    Membership,
    Not,
    Or,
    VarEq,
    conj,
    disj,
)


def three_colourability() -> Formula:
    """Proper-3-colourability as a sentence with three set quantifiers:
    some (V1, V2, V3) covers all vertices and no class contains an edge."""
    cover = ForallVertex(
        "v",
        disj([Membership("v", f"V{i}") for i in (1, 2, 3)]),
    )
    clauses = [
        ForallVertex(
            "v",
            ForallVertex(
                "w",
                disj(
                    [
                        Not(Membership("v", f"V{i}")),
                        Not(Membership("w", f"V{i}")),
                        Not(Adj("v", "w")),
                    ]
                ),
            ),
        )
        for i in (1, 2, 3)
    ]
    body = And(cover, conj(clauses))
    return ExistsSet("V1", ExistsSet("V2", ExistsSet("V3", body)))


def has_isolated_vertex() -> Formula:
    return ExistsVertex("x", ForallVertex("y", Not(Adj("x", "y"))))


def is_edgeless() -> Formula:
    return ForallVertex("x", ForallVertex("y", Not(Adj("x", "y"))))


def has_dominating_vertex() -> Formula:
    return ExistsVertex("x", ForallVertex("y", Or(VarEq("x", "y"), Adj("x", "y"))))


def single_vertex() -> Formula:
    """True exactly on one-vertex structures."""
    return ExistsVertex("x", ForallVertex("y", VarEq("x", "y")))


def fixture_sentences() -> dict[str, Formula]:
    """The named sentence set exercised by the end-to-end pipeline tests."""
    return {
        "three_colourable": three_colourability(),
        "has_isolated_vertex": has_isolated_vertex(),
        "edgeless": is_edgeless(),
        "has_dominating_vertex": has_dominating_vertex(),
    }
