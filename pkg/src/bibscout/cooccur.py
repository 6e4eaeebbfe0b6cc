"""Keyword co-occurrence graphs: build, cluster, export.

Nodes are keywords that reach a minimum number of in-window documents;
an edge's weight is the number of documents where both endpoints appear
together.  Clustering is a greedy weighted-modularity label assignment:
every node starts alone and is repeatedly moved to the neighboring
community with the best modularity gain until a full pass changes
nothing.  Visit order is shuffled from the given seed, so runs are
deterministic per seed and never merge disconnected components.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from itertools import combinations
from pathlib import Path
from typing import Iterable, Sequence

from .ingest import DocumentRecord

__all__ = [
    "CoOccurrenceGraph",
    "KeywordNode",
    "build_graph",
    "cluster_graph",
    "export_wordcloud",
    "link_count",
    "load_wordcloud",
    "weighted_modularity",
]


@dataclass(frozen=True)
class KeywordNode:
    occurrences: int
    mean_year: float
    cluster_id: int | None = None


@dataclass(frozen=True)
class CoOccurrenceGraph:
    """Nodes keyed by keyword; edges keyed by sorted keyword pairs."""

    nodes: dict[str, KeywordNode]
    edges: dict[tuple[str, str], int]


def build_graph(
    docs: Sequence[DocumentRecord],
    min_occurrence: int = 5,
    window: tuple[int, int] | None = None,
) -> CoOccurrenceGraph:
    """Build the co-occurrence graph for a document set.

    Keywords are opaque strings.  Only keywords appearing in at least
    ``min_occurrence`` in-window documents become nodes, and edges exist
    only between surviving keywords.  Documents without keyword data
    contribute nothing.
    """
    if min_occurrence < 1:
        raise ValueError("min_occurrence must be >= 1")
    if window is not None and window[0] > window[1]:
        raise ValueError(f"window start {window[0]} is after end {window[1]}")

    in_window = [
        d
        for d in docs
        if window is None or window[0] <= d.year <= window[1]
    ]
    occurrences: dict[str, int] = {}
    year_sums: dict[str, int] = {}
    for doc in in_window:
        if doc.keywords is None:
            continue
        for keyword in set(doc.keywords):
            occurrences[keyword] = occurrences.get(keyword, 0) + 1
            year_sums[keyword] = year_sums.get(keyword, 0) + doc.year

    surviving = {k for k, n in occurrences.items() if n >= min_occurrence}
    edges: dict[tuple[str, str], int] = {}
    for doc in in_window:
        if doc.keywords is None:
            continue
        present = sorted(set(doc.keywords) & surviving)
        for a, b in combinations(present, 2):
            edges[(a, b)] = edges.get((a, b), 0) + 1

    nodes = {
        k: KeywordNode(
            occurrences=occurrences[k],
            mean_year=year_sums[k] / occurrences[k],
        )
        for k in sorted(surviving)
    }
    return CoOccurrenceGraph(nodes=nodes, edges=edges)


def link_count(graph: CoOccurrenceGraph, keyword: str) -> int:
    """Number of distinct keywords sharing an edge with this one."""
    if keyword not in graph.nodes:
        raise KeyError(f"unknown keyword: {keyword!r}")
    return sum(1 for a, b in graph.edges if keyword in (a, b))


def _adjacency(graph: CoOccurrenceGraph) -> dict[str, dict[str, int]]:
    adjacency: dict[str, dict[str, int]] = {k: {} for k in graph.nodes}
    for (a, b), weight in graph.edges.items():
        adjacency[a][b] = weight
        adjacency[b][a] = weight
    return adjacency


def weighted_modularity(
    graph: CoOccurrenceGraph,
    labels: dict[str, int],
    resolution: float = 1.0,
) -> float:
    """Weighted Newman modularity of a labeling of the graph's nodes."""
    total = sum(graph.edges.values())
    if total == 0:
        return 0.0
    strength: dict[str, float] = {k: 0.0 for k in graph.nodes}
    for (a, b), weight in graph.edges.items():
        strength[a] += weight
        strength[b] += weight
    two_m = 2.0 * total
    score = 0.0
    for (a, b), weight in graph.edges.items():
        if labels[a] == labels[b]:
            score += weight / total
    for label in set(labels.values()):
        members = [k for k, l in labels.items() if l == label]
        degree_sum = sum(strength[k] for k in members)
        score -= resolution * (degree_sum / two_m) ** 2
    return score


def cluster_graph(
    graph: CoOccurrenceGraph,
    resolution: float = 1.0,
    seed: int = 0,
) -> CoOccurrenceGraph:
    """Assign cluster ids by greedy modularity moves; deterministic per seed.

    Nodes only ever move into communities they share an edge with, so two
    disconnected components can never end up in one cluster.  Cluster ids
    are normalized to 1..K ordered by descending size, ties broken by the
    lexicographically smallest member.
    """
    if not graph.nodes:
        raise ValueError("cannot cluster an empty graph")

    names = sorted(graph.nodes)
    adjacency = _adjacency(graph)
    strength = {k: float(sum(adjacency[k].values())) for k in names}
    total = sum(graph.edges.values())
    labels = {k: i for i, k in enumerate(names)}

    if total > 0:
        community_strength: dict[int, float] = {
            labels[k]: strength[k] for k in names
        }
        two_m = 2.0 * total
        rng = random.Random(seed)
        improved = True
        while improved:
            improved = False
            order = names[:]
            rng.shuffle(order)
            for node in order:
                current = labels[node]
                community_strength[current] -= strength[node]
                weights_to: dict[int, float] = {}
                for neighbor, weight in adjacency[node].items():
                    weights_to.setdefault(labels[neighbor], 0.0)
                    weights_to[labels[neighbor]] += weight
                best_label = current
                best_gain = weights_to.get(current, 0.0) / total - resolution * (
                    strength[node] * community_strength.get(current, 0.0)
                ) / (two_m * total)
                for label in sorted(weights_to):
                    gain = weights_to[label] / total - resolution * (
                        strength[node] * community_strength.get(label, 0.0)
                    ) / (two_m * total)
                    if gain > best_gain + 1e-12:
                        best_gain = gain
                        best_label = label
                community_strength[best_label] = (
                    community_strength.get(best_label, 0.0) + strength[node]
                )
                if best_label != current:
                    labels[node] = best_label
                    improved = True

    clusters: dict[int, list[str]] = {}
    for node, label in labels.items():
        clusters.setdefault(label, []).append(node)
    ordered = sorted(
        clusters.values(), key=lambda members: (-len(members), min(members))
    )
    final: dict[str, int] = {}
    for cluster_id, members in enumerate(ordered, start=1):
        for member in members:
            final[member] = cluster_id

    nodes = {
        k: replace(node, cluster_id=final[k]) for k, node in graph.nodes.items()
    }
    return CoOccurrenceGraph(nodes=nodes, edges=dict(graph.edges))


def export_wordcloud(graph: CoOccurrenceGraph, path: str | Path) -> None:
    """Write the two-section tab-separated export.

    Section one, one node per line: keyword, occurrences, mean year,
    cluster id (empty when unassigned), link count.  A single blank line,
    then one edge per line: keyword pair and weight.  An empty graph
    yields a file with both sections empty.
    """
    degrees: dict[str, int] = {k: 0 for k in graph.nodes}
    for a, b in graph.edges:
        degrees[a] += 1
        degrees[b] += 1

    lines: list[str] = []
    for keyword in sorted(graph.nodes):
        if "\t" in keyword or "\n" in keyword:
            raise ValueError(f"keyword not exportable: {keyword!r}")
        node = graph.nodes[keyword]
        cluster = "" if node.cluster_id is None else str(node.cluster_id)
        lines.append(
            f"{keyword}\t{node.occurrences}\t{node.mean_year}\t{cluster}\t{degrees[keyword]}"
        )
    lines.append("")
    for a, b in sorted(graph.edges):
        lines.append(f"{a}\t{b}\t{graph.edges[(a, b)]}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_wordcloud(path: str | Path) -> CoOccurrenceGraph:
    """Parse a file produced by :func:`export_wordcloud`."""
    text = Path(path).read_text(encoding="utf-8")
    node_part, _, edge_part = text.partition("\n\n")
    nodes: dict[str, KeywordNode] = {}
    for line in node_part.splitlines():
        if not line:
            continue
        keyword, occurrences, mean_year, cluster, _degree = line.split("\t")
        nodes[keyword] = KeywordNode(
            occurrences=int(occurrences),
            mean_year=float(mean_year),
            cluster_id=int(cluster) if cluster else None,
        )
    edges: dict[tuple[str, str], int] = {}
    for line in edge_part.splitlines():
        if not line:
            continue
        a, b, weight = line.split("\t")
        edges[(a, b)] = int(weight)
    return CoOccurrenceGraph(nodes=nodes, edges=edges)
