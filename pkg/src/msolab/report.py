"""Render a reduced-instance directory into figures and a delimited
summary: the labeled host grid with its strong colouring, the gadget
carrier graph, and the per-stage size growth (which makes the polynomial
character of the reduction inspectable at a glance).
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import networkx as nx
from matplotlib import cm

from .fileio import read_reduced_instance
from .pipeline import ReducedInstance

STAGE_ROWS = [
    ("input graph", "f_vertices", "f_edges", "phi_size"),
    ("carrier", "h_vertices", "h_edges", "phi_i1_size"),
    ("labeled host", "host_vertices", "host_edges", "psi_size"),
]


def _grid_positions(rows: int, cols: int) -> dict[int, tuple[float, float]]:
    return {i * cols + j: (float(j), float(rows - 1 - i)) for i in range(rows) for j in range(cols)}


def _draw_host(ri: ReducedInstance, path: Path) -> None:
    rows, cols = ri.provenance.advice.size_params
    colouring = ri.provenance.advice.colouring
    palette = max(colouring.palette_size, 1)
    pos = _grid_positions(rows, cols)
    cmap = cm.get_cmap("turbo", palette) if hasattr(cm, "get_cmap") else plt.get_cmap("turbo", palette)

    fig, ax = plt.subplots(figsize=(max(4, cols * 0.45), max(3, rows * 0.45)))
    for (u, v) in ri.host.graph.sorted_edges():
        (x1, y1), (x2, y2) = pos[u], pos[v]
        ax.plot([x1, x2], [y1, y2], color=cmap((colouring[(u, v)] - 1) / palette), lw=1.4, zorder=1)
    labeling = ri.host.labeling
    plain = [v for v in pos if not labeling[v]]
    ax.scatter(
        [pos[v][0] for v in plain], [pos[v][1] for v in plain], s=6, c="lightgray", zorder=2
    )
    groups = [
        ("m", "crossing (m)", "o", "crimson", 26),
        ("w", "white rep", "^", "black", 42),
        ("b", "black rep", "s", "black", 42),
    ]
    for name, label, marker, colour, size in groups:
        vs = [v for v in pos if name in labeling[v]]
        if vs:
            ax.scatter(
                [pos[v][0] for v in vs],
                [pos[v][1] for v in vs],
                s=size,
                marker=marker,
                facecolors="none" if name in ("w", "b") else colour,
                edgecolors=colour,
                label=label,
                zorder=3,
            )
    ax.set_title(
        f"labeled {rows}x{cols} host, {palette} strong colours"
    )
    ax.set_aspect("equal")
    ax.axis("off")
    ax.legend(loc="upper right", fontsize=7, framealpha=0.9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _draw_carrier(ri: ReducedInstance, path: Path) -> None:
    h = ri.provenance.encoding13.h
    anchors = set(ri.provenance.encoding13.vertex_anchors.values())
    g = nx.Graph()
    g.add_nodes_from(h.sorted_vertices())
    g.add_edges_from(h.sorted_edges())
    pos = nx.spring_layout(g, seed=11)
    fig, ax = plt.subplots(figsize=(6, 6))
    nx.draw_networkx_edges(g, pos, ax=ax, width=0.8, edge_color="gray")
    others = [v for v in g.nodes if v not in anchors]
    nx.draw_networkx_nodes(g, pos, nodelist=others, node_size=24, node_color="steelblue", ax=ax)
    nx.draw_networkx_nodes(
        g, pos, nodelist=sorted(anchors), node_size=60, node_color="crimson", ax=ax
    )
    ax.set_title(f"{{1,3}}-regular carrier: {h.n} vertices, anchors in red")
    ax.axis("off")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _draw_sizes(ri: ReducedInstance, path: Path) -> None:
    sizes = ri.provenance.sizes
    structure_keys = ["f_vertices", "h_vertices", "host_vertices"]
    formula_keys = ["phi_size", "phi_i1_size", "psi_size"]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8, 3.4))
    ax1.bar(range(3), [sizes[k] for k in structure_keys], color="steelblue")
    ax1.set_xticks(range(3), ["F", "H", "host"])
    ax1.set_yscale("log")
    ax1.set_title("structure growth (vertices)")
    ax2.bar(range(3), [sizes[k] for k in formula_keys], color="darkorange")
    ax2.set_xticks(range(3), ["phi", "phi^I1", "psi"])
    ax2.set_yscale("log")
    ax2.set_title("formula growth (nodes)")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def write_report(directory: str | Path, out: str | Path | None = None) -> Path:
    """Read a reduce output directory, render the figures and write
    stages.tsv next to them; returns the report directory."""
    directory = Path(directory)
    ri = read_reduced_instance(directory)
    report_dir = Path(out) if out else directory / "report"
    report_dir.mkdir(parents=True, exist_ok=True)

    _draw_host(ri, report_dir / "host_grid.png")
    _draw_carrier(ri, report_dir / "carrier.png")
    _draw_sizes(ri, report_dir / "stage_sizes.png")

    sizes = ri.provenance.sizes
    with open(report_dir / "stages.tsv", "w", newline="") as fh:
        writer = csv.writer(fh, delimiter="\t", lineterminator="\n")
        writer.writerow(["stage", "vertices", "edges", "formula_nodes"])
        for label, vkey, ekey, fkey in STAGE_ROWS:
            writer.writerow([label, sizes[vkey], sizes[ekey], sizes[fkey]])
    return report_dir
