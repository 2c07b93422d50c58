"""Social graphs: knows/cites edges, eigenvector centrality, influencers.

"knows" edges are undirected (stored with canonical endpoint order);
"cites" edges are directed and score flows along the edge into the cited
node, so being cited raises a node's centrality.

Centrality is computed by power iteration on the weighted adjacency with
a unit spectrum shift (iterating with A + I): the shift leaves every
eigenvector unchanged but guarantees convergence on bipartite structures
where plain iteration oscillates. With damping d the step is

    x <- normalize_1((1 - d) * (A x + x) + d * uniform)

starting from the uniform vector, so results are deterministic. Final
scores are divided by the maximum, putting them on a [0, 1] scale where
percentage thresholds read directly.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .corpus import RowError


class EdgeKind(str, Enum):
    KNOWS = "knows"
    CITES = "cites"


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    kind: EdgeKind
    weight: int = 1


@dataclass(frozen=True)
class Graph:
    nodes: tuple[str, ...]  # sorted
    edges: tuple[Edge, ...]  # aggregated, canonical order

    def edges_of(self, kind: EdgeKind | None) -> tuple[Edge, ...]:
        if kind is None:
            return self.edges
        return tuple(e for e in self.edges if e.kind is kind)

    @property
    def node_index(self) -> dict[str, int]:
        return {n: i for i, n in enumerate(self.nodes)}


@dataclass(frozen=True)
class GraphBuildResult:
    graph: Graph
    row_errors: tuple[RowError, ...]
    self_loops_dropped: int


def build_graph(rows) -> GraphBuildResult:
    """Aggregate raw (src, dst, kind) triples into a weighted graph.

    Duplicate edges fold into weights, knows pairs are canonicalized to
    one undirected edge, and self-loops are dropped (counted). Rows with
    an empty endpoint or unknown kind are collected as errors.
    """
    weights: dict[tuple[str, str, EdgeKind], int] = {}
    errors: list[RowError] = []
    self_loops = 0
    nodes: set[str] = set()
    for line, row in enumerate(rows, start=1):
        src, dst, raw_kind = row
        src = str(src).strip()
        dst = str(dst).strip()
        if not src or not dst:
            errors.append(RowError(line=line, reason="empty username"))
            continue
        try:
            kind = EdgeKind(str(raw_kind).strip().lower())
        except ValueError:
            errors.append(
                RowError(line=line, reason=f"unknown edge kind {raw_kind!r}")
            )
            continue
        if src == dst:
            self_loops += 1
            continue
        if kind is EdgeKind.KNOWS and dst < src:
            src, dst = dst, src
        key = (src, dst, kind)
        weights[key] = weights.get(key, 0) + 1
        nodes.add(src)
        nodes.add(dst)
    edges = tuple(
        Edge(src=s, dst=d, kind=k, weight=w)
        for (s, d, k), w in sorted(weights.items())
    )
    return GraphBuildResult(
        graph=Graph(nodes=tuple(sorted(nodes)), edges=edges),
        row_errors=tuple(errors),
        self_loops_dropped=self_loops,
    )


def read_edge_csv(path: str | Path) -> list[tuple[str, str, str]]:
    """Read src,dst,kind rows; a literal header row is skipped."""
    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        for i, row in enumerate(csv.reader(fh)):
            if not row or all(not c.strip() for c in row):
                continue
            if i == 0 and [c.strip().lower() for c in row[:3]] == ["src", "dst", "kind"]:
                continue
            while len(row) < 3:
                row.append("")
            rows.append((row[0], row[1], row[2]))
    return rows


@dataclass(frozen=True)
class NodeScore:
    username: str
    centrality: float
    highlighted: bool


@dataclass(frozen=True)
class CentralityResult:
    scores: tuple[NodeScore, ...]  # descending centrality, then name
    converged: bool
    iterations: int
    kind: EdgeKind | None  # None = knows and cites combined
    damping: float

    def score_of(self, username: str) -> float:
        for s in self.scores:
            if s.username == username:
                return s.centrality
        raise KeyError(username)


def eigenvector_centrality(
    graph: Graph,
    kind: EdgeKind | None = EdgeKind.CITES,
    damping: float = 0.15,
    tol: float = 1e-10,
    max_iter: int = 1000,
    highlight: float = 0.5,
) -> CentralityResult:
    """Max-normalized eigenvector centrality of one edge layer.

    ``kind=None`` merges knows and cites into one operator. Damping adds
    a uniform teleport term, which keeps reducible directed graphs
    well-posed; 0 disables it. Convergence is an L-infinity change below
    ``tol`` between successive normalized iterates.
    """
    if not 0 <= damping < 1:
        raise ValueError("damping must be in [0, 1)")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be positive")
    n = len(graph.nodes)
    if n == 0:
        return CentralityResult(
            scores=(), converged=True, iterations=0, kind=kind, damping=damping
        )
    index = graph.node_index
    src_idx: list[int] = []
    dst_idx: list[int] = []
    wts: list[float] = []
    for e in graph.edges_of(kind):
        s, d = index[e.src], index[e.dst]
        # score flows into dst; knows edges carry it both ways
        src_idx.append(s)
        dst_idx.append(d)
        wts.append(float(e.weight))
        if e.kind is EdgeKind.KNOWS:
            src_idx.append(d)
            dst_idx.append(s)
            wts.append(float(e.weight))
    src_arr = np.asarray(src_idx, dtype=np.int64)
    dst_arr = np.asarray(dst_idx, dtype=np.int64)
    w_arr = np.asarray(wts)
    uniform = np.full(n, 1.0 / n)
    x = uniform.copy()
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        spread = np.zeros(n)
        if len(src_arr):
            np.add.at(spread, dst_arr, w_arr * x[src_arr])
        nxt = (1.0 - damping) * (spread + x) + damping * uniform
        total = nxt.sum()
        if total > 0:
            nxt /= total
        if float(np.max(np.abs(nxt - x))) < tol:
            x = nxt
            converged = True
            break
        x = nxt
    peak = float(x.max())
    if peak > 0:
        x = x / peak
    scores = tuple(
        NodeScore(
            username=name,
            centrality=float(x[i]),
            highlighted=float(x[i]) > highlight,
        )
        for name, i in index.items()
    )
    ordered = tuple(
        sorted(scores, key=lambda s: (-s.centrality, s.username))
    )
    return CentralityResult(
        scores=ordered,
        converged=converged,
        iterations=iterations,
        kind=kind,
        damping=damping,
    )


@dataclass(frozen=True)
class InfluencerNode:
    username: str
    centrality: float
    highlighted: bool
    size: float  # display size, proportional to centrality


@dataclass(frozen=True)
class InfluencerSubgraph:
    nodes: tuple[InfluencerNode, ...]
    edges: tuple[Edge, ...]
    threshold: float
    highlight: float

    def to_json_dict(self) -> dict:
        return {
            "nodes": [
                {
                    "name": n.username,
                    "score": n.centrality,
                    "highlighted": n.highlighted,
                }
                for n in self.nodes
            ],
            "edges": [
                {
                    "src": e.src,
                    "dst": e.dst,
                    "kind": e.kind.value,
                    "weight": e.weight,
                }
                for e in self.edges
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), ensure_ascii=False, indent=2)


def influencers(
    graph: Graph,
    result: CentralityResult,
    threshold: float = 0.25,
    highlight: float = 0.5,
) -> InfluencerSubgraph:
    """Keep nodes with centrality strictly above the threshold.

    Edges survive only when both endpoints are kept. Nodes strictly
    above ``highlight`` are marked for emphasized rendering.
    """
    if not 0 <= threshold <= 1:
        raise ValueError("threshold must be within [0, 1]")
    if not 0 <= highlight <= 1:
        raise ValueError("highlight must be within [0, 1]")
    kept = {
        s.username: s.centrality
        for s in result.scores
        if s.centrality > threshold
    }
    nodes = tuple(
        InfluencerNode(
            username=s.username,
            centrality=s.centrality,
            highlighted=s.centrality > highlight,
            size=s.centrality,
        )
        for s in result.scores
        if s.username in kept
    )
    edges = tuple(
        e for e in graph.edges_of(result.kind) if e.src in kept and e.dst in kept
    )
    return InfluencerSubgraph(
        nodes=nodes, edges=edges, threshold=threshold, highlight=highlight
    )


def _dot_quote(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(subgraph: InfluencerSubgraph, directed: bool = True) -> str:
    """DOT text: node size/fill encode centrality and highlight, edge
    width encodes weight."""
    graph_kw, arrow = ("digraph", "->") if directed else ("graph", "--")
    lines = [f"{graph_kw} influencers {{"]
    lines.append("  node [style=filled shape=ellipse];")
    for n in subgraph.nodes:
        size = 0.4 + 1.2 * n.centrality
        fill = "black" if n.highlighted else "white"
        font = "white" if n.highlighted else "black"
        lines.append(
            f"  {_dot_quote(n.username)} [width={size:.3f} height={size / 2:.3f} "
            f'fillcolor={fill} fontcolor={font} label={_dot_quote(n.username)}];'
        )
    max_weight = max((e.weight for e in subgraph.edges), default=1)
    for e in subgraph.edges:
        penwidth = 0.5 + 3.0 * e.weight / max_weight
        lines.append(
            f"  {_dot_quote(e.src)} {arrow} {_dot_quote(e.dst)} "
            f"[penwidth={penwidth:.2f}];"
        )
    lines.append("}")
    return "\n".join(lines)
