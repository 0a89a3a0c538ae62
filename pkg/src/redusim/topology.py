"""Network graph model: links with time-varying slowdowns and the
small-world data-center (torus + random shortcuts) generator."""

import random
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Set, Tuple

NodeId = int
LinkKey = Tuple[NodeId, NodeId]

# All times are integer microseconds internally; config speaks milliseconds.
US_PER_MS = 1000


class TopologyError(ValueError):
    """Invalid topology parameters or unknown link references."""


def ms_to_us(ms: float) -> int:
    return int(round(ms * US_PER_MS))


@dataclass(slots=True)
class Link:
    src: NodeId
    dst: NodeId
    base_latency_us: int
    capacity_pkts_per_ms: float

    def __post_init__(self) -> None:
        if self.src == self.dst:
            raise TopologyError(f"self-loop link ({self.src},{self.dst})")
        if self.base_latency_us <= 0:
            raise TopologyError(f"link ({self.src},{self.dst}): base latency must be > 0")
        if self.capacity_pkts_per_ms <= 0:
            raise TopologyError(f"link ({self.src},{self.dst}): capacity must be > 0")

    @property
    def service_interval_us(self) -> int:
        # one packet occupies the transmitter for 1/capacity milliseconds
        return max(1, int(round(US_PER_MS / self.capacity_pkts_per_ms)))


@dataclass(slots=True)
class CongestionEvent:
    """A slowdown factor applied to a set of links during [start, end)."""

    link_keys: Set[LinkKey]
    slowdown: float
    start_us: int
    end_us: Optional[int] = None  # None = open-ended

    def __post_init__(self) -> None:
        if self.slowdown <= 1.0:
            raise TopologyError(f"congestion slowdown must be > 1, got {self.slowdown}")
        if self.end_us is not None and not self.start_us < self.end_us:
            raise TopologyError("congestion window start must precede end")

    def active_at(self, t_us: int) -> bool:
        if t_us < self.start_us:
            return False
        return self.end_us is None or t_us < self.end_us


@dataclass(slots=True)
class SwdcParams:
    grid_width: int
    grid_height: int
    shortcuts_per_node: int
    rng_seed: int
    base_latency_ms: float = 1.0
    capacity_pkts_per_ms: float = 1.0

    def __post_init__(self) -> None:
        if self.grid_width * self.grid_height < 2:
            raise TopologyError("grid must contain at least 2 nodes")
        if self.shortcuts_per_node < 0:
            raise TopologyError("shortcuts_per_node must be >= 0")


class Topology:
    """Directed graph with per-link congestion schedules.

    Built once before a run; afterwards only queried. Congestion state is a
    pure function of time, so concurrent reads are safe.
    """

    def __init__(self, node_count: int, links: Sequence[Link]):
        if node_count < 2:
            raise TopologyError("topology needs at least 2 nodes")
        self.node_count = node_count
        self.links: List[Link] = []
        self.link_index: Dict[LinkKey, int] = {}
        self.out_adj: List[List[int]] = [[] for _ in range(node_count)]
        self.in_adj: List[List[int]] = [[] for _ in range(node_count)]
        for link in links:
            if not (0 <= link.src < node_count and 0 <= link.dst < node_count):
                raise TopologyError(f"link ({link.src},{link.dst}) references unknown node")
            key = (link.src, link.dst)
            if key in self.link_index:
                raise TopologyError(f"duplicate link {key}")
            idx = len(self.links)
            self.links.append(link)
            self.link_index[key] = idx
            self.out_adj[link.src].append(idx)
            self.in_adj[link.dst].append(idx)
        # neighbor order is part of the routing tie-break contract
        for adj in self.out_adj:
            adj.sort(key=lambda i: self.links[i].dst)
        for adj in self.in_adj:
            adj.sort(key=lambda i: self.links[i].src)
        # per-link congestion schedules, kept sorted by start time
        self._schedules: List[List[CongestionEvent]] = [[] for _ in self.links]
        self._csr_cache: dict = {}

    # -- congestion ---------------------------------------------------------

    def inject_congestion(self, event: CongestionEvent) -> None:
        for key in event.link_keys:
            if key not in self.link_index:
                raise TopologyError(f"congestion event names unknown link {key}")
        for key in sorted(event.link_keys):
            idx = self.link_index[key]
            self._schedules[idx].append(event)
            self._schedules[idx].sort(key=lambda e: e.start_us)
        self._csr_cache.clear()

    def clear_congestion(self) -> None:
        self._schedules = [[] for _ in self.links]

    def congested_link_ids(self) -> List[int]:
        return [i for i, sched in enumerate(self._schedules) if sched]

    def slowdown_at(self, link_id: int, t_us: int) -> float:
        """Product of all slowdowns active on the link at time t (>= 1)."""
        factor = 1.0
        for event in self._schedules[link_id]:
            if event.start_us > t_us:
                break
            if event.active_at(t_us):
                factor *= event.slowdown
        return factor

    def effective_latency_us(self, link_key: LinkKey, t_us: int) -> int:
        if link_key not in self.link_index:
            raise TopologyError(f"unknown link {link_key}")
        link_id = self.link_index[link_key]
        return self.effective_latency_us_by_id(link_id, t_us)

    def effective_latency_us_by_id(self, link_id: int, t_us: int) -> int:
        base = self.links[link_id].base_latency_us
        sched = self._schedules[link_id]
        if not sched:
            return base
        return int(round(base * self.slowdown_at(link_id, t_us)))

    # -- structure ----------------------------------------------------------

    def is_strongly_connected(self) -> bool:
        return (self._reaches_all(self.out_adj, lambda i: self.links[i].dst)
                and self._reaches_all(self.in_adj, lambda i: self.links[i].src))

    def _reaches_all(self, adj, endpoint) -> bool:
        seen = bytearray(self.node_count)
        seen[0] = 1
        stack = [0]
        count = 1
        while stack:
            u = stack.pop()
            for link_id in adj[u]:
                v = endpoint(link_id)
                if not seen[v]:
                    seen[v] = 1
                    count += 1
                    stack.append(v)
        return count == self.node_count

    def link_keys(self) -> List[LinkKey]:
        return [(l.src, l.dst) for l in self.links]

    def csr(self, weights: str):
        """CSR adjacency arrays for the routing kernels.

        weights: 'hop' (unit weights) or 'latency' (base latency, us).
        Returns (indptr, dst, w, reverse_indptr, reverse_src, reverse_w).
        Cached; invalidated only by congestion injection (weights ignore
        congestion by contract, but the cache key is cheap to keep safe).
        """
        cached = self._csr_cache.get(weights)
        if cached is not None:
            return cached
        from . import kernels

        built = kernels.build_csr(self.node_count, self.links, weights)
        self._csr_cache[weights] = built
        return built


def generate_swdc(params: SwdcParams) -> Topology:
    """Torus lattice plus per-node random long-range shortcuts.

    Each node links to its 4 grid neighbors (torus wrap, deduplicated) and to
    `shortcuts_per_node` uniformly chosen non-neighbors; every physical link is
    two directed links sharing parameters. Deterministic in rng_seed.
    """
    w, h = params.grid_width, params.grid_height
    n = w * h
    keys: Set[LinkKey] = set()

    def node_at(row: int, col: int) -> int:
        return (row % h) * w + (col % w)

    for row in range(h):
        for col in range(w):
            u = node_at(row, col)
            for v in (node_at(row - 1, col), node_at(row + 1, col),
                      node_at(row, col - 1), node_at(row, col + 1)):
                if u != v:
                    keys.add((u, v))
                    keys.add((v, u))

    rng = random.Random(params.rng_seed)
    for u in range(n):
        added = 0
        attempts = 0
        while added < params.shortcuts_per_node and attempts < 64 * (params.shortcuts_per_node + 1):
            attempts += 1
            v = rng.randrange(n)
            if v == u or (u, v) in keys:
                continue
            keys.add((u, v))
            keys.add((v, u))
            added += 1

    lat_us = ms_to_us(params.base_latency_ms)
    links = [Link(src, dst, lat_us, params.capacity_pkts_per_ms)
             for src, dst in sorted(keys)]
    topo = Topology(n, links)
    if not topo.is_strongly_connected():
        raise TopologyError("generated topology is not strongly connected")
    return topo


def build_explicit(node_count: int, specs: Sequence[Tuple[int, int, float, float]]) -> Topology:
    """Topology from explicit (src, dst, latency_ms, capacity) tuples."""
    links = [Link(src, dst, ms_to_us(lat_ms), cap) for src, dst, lat_ms, cap in specs]
    return Topology(node_count, links)
