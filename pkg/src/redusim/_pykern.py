"""Pure-Python distance kernels; drop-in fallback for the compiled core.

Both backends take the same CSR arrays and must return identical distances
(all arithmetic is exact int64), so backend choice can never change a route.
"""

import heapq
from collections import deque

import numpy as np

UNREACHABLE = np.iinfo(np.int64).max


def dijkstra_dists(indptr, nbr, weights, source: int) -> np.ndarray:
    n = len(indptr) - 1
    indptr_l = indptr.tolist()
    nbr_l = nbr.tolist()
    w_l = weights.tolist()
    dist = [UNREACHABLE] * n
    dist[source] = 0
    heap = [(0, source)]
    pop = heapq.heappop
    push = heapq.heappush
    while heap:
        d, u = pop(heap)
        if d > dist[u]:
            continue
        for i in range(indptr_l[u], indptr_l[u + 1]):
            v = nbr_l[i]
            nd = d + w_l[i]
            if nd < dist[v]:
                dist[v] = nd
                push(heap, (nd, v))
    return np.array(dist, dtype=np.int64)


def bfs_dists(indptr, nbr, source: int) -> np.ndarray:
    n = len(indptr) - 1
    indptr_l = indptr.tolist()
    nbr_l = nbr.tolist()
    dist = [UNREACHABLE] * n
    dist[source] = 0
    q = deque([source])
    while q:
        u = q.popleft()
        du = dist[u] + 1
        for i in range(indptr_l[u], indptr_l[u + 1]):
            v = nbr_l[i]
            if dist[v] == UNREACHABLE:
                dist[v] = du
                q.append(v)
    return np.array(dist, dtype=np.int64)
