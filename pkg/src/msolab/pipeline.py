"""End-to-end reduction: a model-checking instance (F, phi) becomes a
labeled-grid instance (host, psi) with the same truth value.

Stages: encode F as a {1,3}-regular H with interpretation I1; build advice
(a grid sized to H with a strong edge colouring); embed the 1-subdivision
of H into the grid's path intersection graph; label the grid so the
embedded copy is recoverable by interpretation I2; translate phi through
I1 then I2.  Truth is preserved because each interpretation is sound and
the translated formula cannot tell H from its subdivision.

check_reduced verifies a reduced instance without touching F: tier one
recovers the embedded copy from the labels alone (using the certified
connectivity hooks), tier two model-checks the once-translated formula on
the recovered structure (pattern hooks plus domain restriction).  This
replaces a hypothetical fast model-checker with a certified brute-force
one: the pipeline demonstrates correctness, not speed.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Mapping

from .encoding import (
    EncodingLabeling,
    build_I2,
    build_labeling,
    certify_connectivity_hooks,
    connectivity_hooks,
)
from .errors import CapacityError, MsolabError
from .graphs import Graph, GridLikeGraph, LabeledGraph, make_grid
from .interp import Interpretation, induced_structure, translate
from .mso import (
    Arc,
    Assignment,
    DefinedPred,
    Evaluator,
    Formula,
    LabelPred,
    formula_size,
    free_variables,
)
from .mso.syntax import iter_nodes
from .regular13 import (
    Regular13Encoding,
    certify_pattern_hooks,
    embed_subdivision,
    EmbeddedSubdivision,
    encode_13regular,
    pattern_hooks,
)
from .strongcolor import EdgeColouring, strong_edge_colour, validate_strong

logger = logging.getLogger(__name__)


class PipelineError(MsolabError):
    pass


class ProvenanceMismatchError(PipelineError):
    """The labels do not decode to the recorded embedded structure."""


class HookNotCertifiedError(PipelineError):
    """Refusing hooked evaluation at scale without conformance."""


@dataclass(frozen=True)
class Advice:
    """The per-size witness bundle consumed by the reduction: an explicit
    grid with a strong colouring (explicit grids stand in for the
    non-constructive high-tree-width witnesses; the reduction only ever
    consumes the advice, it never verifies where it came from)."""

    grid: GridLikeGraph
    colouring: EdgeColouring
    size_params: tuple[int, int]

    def __post_init__(self):
        if not validate_strong(self.grid.graph, self.colouring):
            raise PipelineError("advice colouring is not strong")


@dataclass(frozen=True)
class Provenance:
    f: Graph
    phi: Formula
    encoding13: Regular13Encoding
    phi_i1: Formula
    advice: Advice
    embedding: EmbeddedSubdivision
    labeling: EncodingLabeling
    i2: Interpretation
    sizes: Mapping[str, int]

    def __post_init__(self):
        object.__setattr__(self, "sizes", dict(self.sizes))

    def __hash__(self):
        return hash((self.f, self.phi))


@dataclass(frozen=True)
class ReducedInstance:
    host: LabeledGraph
    psi: Formula
    provenance: Provenance

    def __hash__(self):
        return hash((self.host, self.provenance))


def build_advice(h: Graph) -> Advice:
    """Grid dimensions (|V(h)|, |E(h)|), clamped to the 2x2 minimum, with
    a strong colouring attached."""
    rows, cols = max(h.n, 2), max(h.m, 2)
    grid = make_grid(rows, cols)
    return Advice(
        grid=grid, colouring=strong_edge_colour(grid.graph), size_params=(rows, cols)
    )


def _require_plain_sentence(phi: Formula) -> None:
    fv, fs = free_variables(phi)
    if fv or fs:
        raise PipelineError(
            f"need a closed sentence, got free variables {sorted(fv | fs)}"
        )
    for node in iter_nodes(phi):
        if isinstance(node, LabelPred):
            raise PipelineError("pipeline sentences are over unlabeled graphs")
        if isinstance(node, Arc):
            raise PipelineError("pipeline sentences are over undirected graphs")


def reduce_instance(f: Graph, phi: Formula) -> ReducedInstance:
    """Compose the stages; deterministic, with per-stage size logging and
    capacity errors attributed to their stage."""
    _require_plain_sentence(phi)
    sizes: dict[str, int] = {
        "f_vertices": f.n,
        "f_edges": f.m,
        "phi_size": formula_size(phi),
    }

    def stage(name: str, fn):
        try:
            return fn()
        except CapacityError as e:
            raise CapacityError(f"stage {name}: {e}") from e

    enc13 = stage("encode_13regular", lambda: encode_13regular(f))
    sizes["h_vertices"] = enc13.h.n
    sizes["h_edges"] = enc13.h.m

    advice = stage("build_advice", lambda: build_advice(enc13.h))
    rows, cols = advice.size_params
    sizes["host_vertices"] = advice.grid.graph.n
    sizes["host_edges"] = advice.grid.graph.m
    sizes["palette"] = advice.colouring.palette_size

    embedding = stage(
        "embed_subdivision", lambda: embed_subdivision(enc13.h, rows, cols)
    )
    labeling = stage(
        "build_labeling",
        lambda: build_labeling(advice.grid, embedding.target, advice.colouring),
    )
    i2 = build_I2(labeling.colour_count)

    phi_i1 = stage("translate_i1", lambda: translate(phi, enc13.i1))
    psi = stage("translate_i2", lambda: translate(phi_i1, i2))
    sizes["phi_i1_size"] = formula_size(phi_i1)
    sizes["psi_size"] = formula_size(psi)

    for key in sorted(sizes):
        logger.info("reduce_instance %s = %d", key, sizes[key])

    provenance = Provenance(
        f=f,
        phi=phi,
        encoding13=enc13,
        phi_i1=phi_i1,
        advice=advice,
        embedding=embedding,
        labeling=labeling,
        i2=i2,
        sizes=sizes,
    )
    return ReducedInstance(host=labeling.host, psi=psi, provenance=provenance)


def recover_embedded(ri: ReducedInstance) -> Graph:
    """Tier one: decode the host labels into the embedded copy (a graph on
    path indices), using only the host and the representative map."""
    prov = ri.provenance
    ev = Evaluator(ri.host, hooks=connectivity_hooks())
    ind = induced_structure(ri.host, prov.i2, evaluator=ev)
    back = {v: p for p, v in prov.labeling.representatives.items()}
    extraneous = [v for v in ind.graph.vertices if v not in back]
    if extraneous:
        raise ProvenanceMismatchError(
            f"recovered domain has non-representative vertices {sorted(extraneous)}"
        )
    return Graph(
        (back[v] for v in ind.graph.vertices),
        ((back[u], back[v]) for u, v in ind.graph.edges),
    )


def check_reduced(ri: ReducedInstance) -> bool:
    """Decide the reduced instance by the certified two-tier route and
    verify the recovery against the recorded embedding on the way."""
    prov = ri.provenance
    try:
        certify_connectivity_hooks(prov.labeling.colour_count)
        certify_pattern_hooks()
    except MsolabError as e:
        raise HookNotCertifiedError(f"hook conformance failed: {e}") from e

    recovered = recover_embedded(ri)
    if recovered != prov.embedding.target:
        raise ProvenanceMismatchError(
            "labels decode to a different structure than the recorded embedding"
        )

    ev = Evaluator(recovered, hooks=pattern_hooks())
    alpha_pred = prov.encoding13.i1.alpha_pred("x")
    alpha_set = [
        v
        for v in recovered.sorted_vertices()
        if ev.check(alpha_pred, Assignment(vertex={"x": v}))
    ]
    tier2 = Evaluator(recovered, hooks=pattern_hooks(), set_domain=alpha_set)
    return tier2.check(prov.phi_i1)
