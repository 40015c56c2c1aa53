"""Brute-force reference implementations the fast code is checked against.

Everything here recomputes from raw adjacency with the dumbest possible
algorithm (all-pairs BFS, explicit sorts) and must stay independent of the
query paths under test.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from hotspot.graph import Graph


def hop_distances(g: Graph, src: int) -> dict[int, int]:
    """Plain queue BFS returning hop distance to every reachable node."""
    dist = {src: 0}
    queue = deque([src])
    while queue:
        v = queue.popleft()
        for w in g.neighbors(v).tolist():
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def nn_oracle(g: Graph, i: int, k: int) -> list[int]:
    """k nearest neighbors by full sort over (distance, id)."""
    dist = hop_distances(g, i)
    ranked = sorted((d, v) for v, d in dist.items() if v != i)
    return [v for _, v in ranked[:k]]


def ball_oracle(g: Graph, i: int, l: int) -> list[int]:
    dist = hop_distances(g, i)
    return sorted(v for v, d in dist.items() if 0 < d <= l)


def hotspot_count_oracle(g: Graph, reporting: set[int], k: int, s: int) -> int:
    """Materialize every NN set from scratch and count the firing reporters."""
    count = 0
    for i in sorted(reporting):
        members = nn_oracle(g, i, k)
        if sum(1 for v in members if v in reporting) >= s:
            count += 1
    return count


def random_graph(n: int, edge_prob: float, rng: np.random.Generator) -> Graph:
    """Small dense-ish random graph for oracle comparisons."""
    edges = [(i, j) for i in range(n) for j in range(i + 1, n)
             if rng.random() < edge_prob]
    return Graph.from_edges(n, np.asarray(edges, dtype=np.int64).reshape(-1, 2))
