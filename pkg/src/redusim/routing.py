"""Base routing algorithms the enhancer wraps: lexicographic shortest path,
equal-cost multipath, and k-alternative-path search with link exclusion.

All operations are congestion-oblivious (they read base latencies only) and
deterministic: cost ties are always broken by the lexicographically smallest
node sequence, so identical inputs yield identical routes on both kernel
backends.
"""

import heapq
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .kernels import UNREACHABLE
from .topology import LinkKey, NodeId, Topology

Route = Tuple[NodeId, ...]


class RoutingError(ValueError):
    """Unreachable destination or malformed routing query."""


class CostMetric(str, Enum):
    HOP_COUNT = "hop_count"
    STATIC_LATENCY = "static_latency"

    @property
    def weights(self) -> str:
        return "hop" if self is CostMetric.HOP_COUNT else "latency"


def route_cost(topology: Topology, route: Route, metric: CostMetric) -> int:
    cost = 0
    for u, v in zip(route, route[1:]):
        link = topology.links[topology.link_index[(u, v)]]
        cost += 1 if metric is CostMetric.HOP_COUNT else link.base_latency_us
    return cost


def _check_endpoints(topology: Topology, origin: NodeId, destination: NodeId) -> None:
    if origin == destination:
        raise RoutingError(f"origin equals destination ({origin})")
    for node in (origin, destination):
        if not 0 <= node < topology.node_count:
            raise RoutingError(f"node {node} not in topology")


def shortest_path(topology: Topology, origin: NodeId, destination: NodeId,
                  metric: CostMetric = CostMetric.HOP_COUNT) -> Route:
    """Minimum-cost simple path, ties broken lexicographically.

    Computes distances-to-destination on the reverse graph, then walks tight
    edges forward always taking the smallest-id next node. With positive
    weights the tight-edge graph is a DAG, so the walk terminates and the
    result is simple.
    """
    _check_endpoints(topology, origin, destination)
    graph = topology.csr(metric.weights)
    dist_to = graph.dists_to(destination)
    if dist_to[origin] == UNREACHABLE:
        raise RoutingError(f"no route from {origin} to {destination}")
    path = [origin]
    u = origin
    indptr, nbr, w = graph.indptr, graph.nbr, graph.w
    while u != destination:
        best = -1
        du = dist_to[u]
        for i in range(indptr[u], indptr[u + 1]):
            v = nbr[i]
            if du == w[i] + dist_to[v]:
                best = v  # neighbors ascend, first tight edge is lex-min
                break
        u = int(best)
        path.append(u)
    return tuple(path)


def ecmp_paths(topology: Topology, origin: NodeId, destination: NodeId,
               metric: CostMetric = CostMetric.HOP_COUNT,
               max_paths: int = 16) -> List[Route]:
    """All minimum-cost simple paths, lexicographic order, capped at max_paths."""
    _check_endpoints(topology, origin, destination)
    if max_paths < 1:
        raise RoutingError("max_paths must be >= 1")
    graph = topology.csr(metric.weights)
    dist_to = graph.dists_to(destination)
    if dist_to[origin] == UNREACHABLE:
        raise RoutingError(f"no route from {origin} to {destination}")
    indptr, nbr, w = graph.indptr, graph.nbr, graph.w
    paths: List[Route] = []
    stack = [origin]

    def descend(u: int) -> None:
        if len(paths) >= max_paths:
            return
        if u == destination:
            paths.append(tuple(stack))
            return
        du = dist_to[u]
        for i in range(indptr[u], indptr[u + 1]):
            v = int(nbr[i])
            if du == w[i] + dist_to[v]:
                stack.append(v)
                descend(v)
                stack.pop()
                if len(paths) >= max_paths:
                    return

    descend(origin)
    return paths


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return x ^ (x >> 31)


def ecmp_select(flow_id: int, paths: Sequence[Route]) -> Route:
    """Deterministic flow-to-path pinning: same flow id, same path, always."""
    if not paths:
        raise RoutingError("ecmp_select needs at least one path")
    return paths[_splitmix64(flow_id) % len(paths)]


def _lex_shortest_excluding(topology: Topology, graph, origin: NodeId,
                            destination: NodeId,
                            banned_links: Set[LinkKey],
                            banned_nodes: Set[NodeId]) -> Optional[Tuple[int, Route]]:
    """Lex-min shortest path on the graph minus bans, or None.

    Pure-Python Dijkstra over the CSR arrays; only called from the (rare)
    alternative-route searches, never on the per-flow hot path.
    """
    if origin in banned_nodes or destination in banned_nodes:
        return None
    indptr, nbr, w = graph.indptr.tolist(), graph.nbr.tolist(), graph.w.tolist()
    ridptr, rnbr, rw = graph.rev_indptr.tolist(), graph.rev_nbr.tolist(), graph.rev_w.tolist()
    # distances to destination on the reverse graph, honoring bans
    dist: Dict[int, int] = {destination: 0}
    heap = [(0, destination)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist.get(u, UNREACHABLE):
            continue
        for i in range(ridptr[u], ridptr[u + 1]):
            v = rnbr[i]
            if v in banned_nodes or (v, u) in banned_links:
                continue
            nd = d + rw[i]
            if nd < dist.get(v, UNREACHABLE):
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    total = dist.get(origin)
    if total is None:
        return None
    path = [origin]
    u = origin
    while u != destination:
        du = dist[u]
        nxt = -1
        for i in range(indptr[u], indptr[u + 1]):
            v = nbr[i]
            if v in banned_nodes or (u, v) in banned_links:
                continue
            if dist.get(v, UNREACHABLE) + w[i] == du:
                nxt = v
                break
        if nxt < 0:  # defensive; cannot happen when dist[origin] is finite
            return None
        path.append(nxt)
        u = nxt
    return total, tuple(path)


def alternative_routes(topology: Topology, origin: NodeId, destination: NodeId,
                       excluded_links: Iterable[LinkKey], k: int,
                       metric: CostMetric = CostMetric.HOP_COUNT,
                       excluded_nodes: Iterable[NodeId] = ()) -> List[Route]:
    """Up to k cheapest loop-free routes avoiding every excluded link (and any
    excluded interior node).

    Yen's algorithm on the graph minus the exclusions; results ascend by
    (cost, node sequence). An empty list is a valid result the caller must
    handle (degraded mode).
    """
    _check_endpoints(topology, origin, destination)
    if k < 1:
        raise RoutingError("k must be >= 1")
    excluded: FrozenSet[LinkKey] = frozenset(excluded_links)
    node_bans: FrozenSet[NodeId] = frozenset(excluded_nodes) - {origin, destination}
    graph = topology.csr(metric.weights)

    first = _lex_shortest_excluding(topology, graph, origin, destination,
                                    set(excluded), set(node_bans))
    if first is None:
        return []
    accepted: List[Tuple[int, Route]] = [first]
    candidates: List[Tuple[int, Route]] = []
    seen: Set[Route] = {first[1]}

    while len(accepted) < k:
        _, last_path = accepted[-1]
        for spur_i in range(len(last_path) - 1):
            spur_node = last_path[spur_i]
            root = last_path[:spur_i + 1]
            banned_links = set(excluded)
            for cost, path in accepted:
                if path[:spur_i + 1] == root and len(path) > spur_i + 1:
                    banned_links.add((path[spur_i], path[spur_i + 1]))
            banned_nodes = set(root[:-1]) | node_bans
            spur = _lex_shortest_excluding(topology, graph, spur_node,
                                           destination, banned_links, banned_nodes)
            if spur is None:
                continue
            spur_cost, spur_path = spur
            total_path = root[:-1] + spur_path
            if total_path in seen:
                continue
            seen.add(total_path)
            root_cost = route_cost(topology, root, metric) if len(root) > 1 else 0
            heapq.heappush(candidates, (root_cost + spur_cost, total_path))
        if not candidates:
            break
        accepted.append(heapq.heappop(candidates))
    return [path for _, path in accepted[:k]]


def validate_route(topology: Topology, route: Route) -> None:
    """Raise unless the route satisfies the Route invariants."""
    if len(route) < 2:
        raise RoutingError("route needs at least one edge")
    if len(set(route)) != len(route):
        raise RoutingError(f"route revisits a node: {route}")
    for u, v in zip(route, route[1:]):
        if (u, v) not in topology.link_index:
            raise RoutingError(f"route uses missing link ({u},{v})")
