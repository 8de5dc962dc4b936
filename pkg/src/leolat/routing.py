"""Minimum-latency pathfinding over a snapshot graph.

Dijkstra over positive weights, made fully deterministic: among
equal-latency shortest paths the route with the lexicographically
smallest node sequence (ground stations before satellites, then by
label) is returned. The search runs from the destination so the route
can be rebuilt forward from the source, greedily taking the smallest
eligible next hop at each step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from heapq import heappop, heappush

from .topology import NodeRef, SnapshotGraph


@dataclass(frozen=True)
class Route:
    """An executed path: node sequence plus per-hop and total latency."""

    nodes: tuple[NodeRef, ...]
    hop_latencies_s: tuple[float, ...]
    total_latency_s: float

    @property
    def hop_count(self) -> int:
        return len(self.hop_latencies_s)

    @property
    def satellite_count(self) -> int:
        return sum(1 for n in self.nodes if not n.is_ground)

    def labels(self) -> list[str]:
        return [n.label for n in self.nodes]


def shortest_path(graph: SnapshotGraph, src: NodeRef, dst: NodeRef) -> Route | None:
    """Latency-minimal route from src to dst, or None when unreachable.

    Raises ValueError for src == dst; KeyError for nodes not in the graph.
    Unreachability is a result, not an error.
    """
    if src == dst:
        raise ValueError("src and dst must differ")
    i_src = graph.index_of(src)
    i_dst = graph.index_of(dst)

    offsets, nbrs, wts = graph.csr()
    n = graph.n_nodes
    dist = [math.inf] * n
    done = bytearray(n)
    dist[i_dst] = 0.0
    heap = [(0.0, i_dst)]
    pop, push = heappop, heappush
    while heap:
        d, u = pop(heap)
        if done[u]:
            continue
        done[u] = 1
        if u == i_src:
            break
        for k in range(offsets[u], offsets[u + 1]):
            v = nbrs[k]
            nd = d + wts[k]
            if nd < dist[v]:
                dist[v] = nd
                push(heap, (nd, v))
    if not done[i_src]:
        return None

    # Forward reconstruction. Every stored distance was set by a relaxation
    # dist[u] = w(u,v) + dist[v], so an eligible neighbor always exists and
    # distances strictly decrease (weights are positive) until dst. Taking
    # the smallest eligible node index at each step yields the
    # lexicographically smallest equal-latency node sequence.
    path = [i_src]
    hops: list[float] = []
    u = i_src
    while u != i_dst:
        best_v = None
        best_w = 0.0
        du = dist[u]
        for k in range(offsets[u], offsets[u + 1]):
            v = nbrs[k]
            w = wts[k]
            if du == w + dist[v] and (best_v is None or v < best_v):
                best_v = v
                best_w = w
        if best_v is None:  # pragma: no cover - excluded by the invariant above
            raise RuntimeError("route reconstruction lost the shortest-path trail")
        path.append(best_v)
        hops.append(best_w)
        u = best_v

    return Route(
        nodes=tuple(graph.node_ref(i) for i in path),
        hop_latencies_s=tuple(hops),
        total_latency_s=math.fsum(hops),
    )


def enumerate_paths_oracle(
    graph: SnapshotGraph, src: NodeRef, dst: NodeRef, max_nodes: int = 12
) -> float | None:
    """Exact minimum latency by exhaustive DFS over simple paths.

    Test oracle only; refuses graphs larger than max_nodes (capped at 12)
    because the path count grows factorially.
    """
    if max_nodes > 12:
        raise ValueError("max_nodes is capped at 12")
    if graph.n_nodes > max_nodes:
        raise ValueError(f"graph has {graph.n_nodes} nodes, oracle cap is {max_nodes}")
    if src == dst:
        raise ValueError("src and dst must differ")
    i_src = graph.index_of(src)
    i_dst = graph.index_of(dst)
    adj = graph.adjacency()

    best: float | None = None
    on_path = bytearray(graph.n_nodes)

    def dfs(u: int, acc: float) -> None:
        nonlocal best
        if u == i_dst:
            if best is None or acc < best:
                best = acc
            return
        on_path[u] = 1
        for v, w in adj[u]:
            if not on_path[v]:
                dfs(v, acc + w)
        on_path[u] = 0

    dfs(i_src, 0.0)
    return best
