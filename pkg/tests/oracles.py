"""Brute-force oracles the routing tests check against.

These deliberately share no code with redusim.routing: plain dict adjacency
and exhaustive simple-path enumeration, ordered by (cost, node sequence).
"""

from typing import Dict, Iterable, List, Optional, Tuple

Edge = Tuple[int, int]


def enumerate_simple_paths(edges: Dict[Edge, int], origin: int,
                           destination: int,
                           excluded: Iterable[Edge] = ()) -> List[Tuple[int, Tuple[int, ...]]]:
    """All simple paths with their costs, sorted by (cost, path)."""
    banned = set(excluded)
    adj: Dict[int, List[Tuple[int, int]]] = {}
    for (u, v), w in edges.items():
        if (u, v) not in banned:
            adj.setdefault(u, []).append((v, w))
    for nbrs in adj.values():
        nbrs.sort()
    out: List[Tuple[int, Tuple[int, ...]]] = []
    path = [origin]
    on_path = {origin}

    def walk(u: int, cost: int) -> None:
        if u == destination:
            out.append((cost, tuple(path)))
            return
        for v, w in adj.get(u, ()):
            if v not in on_path:
                path.append(v)
                on_path.add(v)
                walk(v, cost + w)
                path.pop()
                on_path.remove(v)

    walk(origin, 0)
    out.sort()
    return out


def oracle_shortest(edges: Dict[Edge, int], origin: int,
                    destination: int) -> Optional[Tuple[int, Tuple[int, ...]]]:
    paths = enumerate_simple_paths(edges, origin, destination)
    return paths[0] if paths else None


def oracle_k_best(edges: Dict[Edge, int], origin: int, destination: int,
                  excluded: Iterable[Edge], k: int) -> List[Tuple[int, ...]]:
    paths = enumerate_simple_paths(edges, origin, destination, excluded)
    return [p for _, p in paths[:k]]


def oracle_min_cost_paths(edges: Dict[Edge, int], origin: int,
                          destination: int, cap: int) -> List[Tuple[int, ...]]:
    paths = enumerate_simple_paths(edges, origin, destination)
    if not paths:
        return []
    best = paths[0][0]
    return [p for c, p in paths if c == best][:cap]


def edges_of_topology(topology, metric: str = "hop") -> Dict[Edge, int]:
    out = {}
    for link in topology.links:
        out[(link.src, link.dst)] = 1 if metric == "hop" else link.base_latency_us
    return out


def random_connected_digraph(rng, n: int) -> Dict[Edge, int]:
    """Random strongly-connected weighted digraph on n nodes (ring backbone
    plus random extra edges, random small weights)."""
    edges: Dict[Edge, int] = {}
    order = list(range(n))
    rng.shuffle(order)
    for i in range(n):
        u, v = order[i], order[(i + 1) % n]
        edges[(u, v)] = rng.randint(1, 5)
    extra = rng.randint(0, n * (n - 1) // 2)
    for _ in range(extra):
        u, v = rng.randrange(n), rng.randrange(n)
        if u != v and (u, v) not in edges:
            edges[(u, v)] = rng.randint(1, 5)
    return edges
