# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled distance kernels: array-heap Dijkstra and BFS over CSR graphs.

Must return bit-identical distances to redusim._pykern (exact int64 math).
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

cdef cnp.int64_t UNREACHABLE = np.iinfo(np.int64).max


def dijkstra_dists(cnp.int64_t[::1] indptr, cnp.int64_t[::1] nbr,
                   cnp.int64_t[::1] weights, long source):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    out = np.full(n, UNREACHABLE, dtype=np.int64)
    cdef cnp.int64_t[::1] dist = out
    # binary min-heap of (distance, node), stored in parallel arrays
    heap_d_arr = np.empty(n * 4 + 8, dtype=np.int64)
    heap_v_arr = np.empty(n * 4 + 8, dtype=np.int64)
    cdef cnp.int64_t[::1] heap_d = heap_d_arr
    cdef cnp.int64_t[::1] heap_v = heap_v_arr
    cdef Py_ssize_t size = 0, cap = heap_d_arr.shape[0]
    cdef Py_ssize_t i, child, parent, pos
    cdef cnp.int64_t d, nd, u, v

    dist[source] = 0
    heap_d[0] = 0
    heap_v[0] = source
    size = 1
    while size > 0:
        d = heap_d[0]
        u = heap_v[0]
        size -= 1
        heap_d[0] = heap_d[size]
        heap_v[0] = heap_v[size]
        pos = 0
        while True:
            child = 2 * pos + 1
            if child >= size:
                break
            if child + 1 < size and heap_d[child + 1] < heap_d[child]:
                child += 1
            if heap_d[child] < heap_d[pos]:
                heap_d[pos], heap_d[child] = heap_d[child], heap_d[pos]
                heap_v[pos], heap_v[child] = heap_v[child], heap_v[pos]
                pos = child
            else:
                break
        if d > dist[u]:
            continue
        for i in range(indptr[u], indptr[u + 1]):
            v = nbr[i]
            nd = d + weights[i]
            if nd < dist[v]:
                dist[v] = nd
                if size >= cap:
                    # lazy-deletion heap can exceed n entries; grow
                    heap_d_arr = np.concatenate([heap_d_arr, heap_d_arr])
                    heap_v_arr = np.concatenate([heap_v_arr, heap_v_arr])
                    heap_d = heap_d_arr
                    heap_v = heap_v_arr
                    cap = heap_d_arr.shape[0]
                pos = size
                heap_d[pos] = nd
                heap_v[pos] = v
                size += 1
                while pos > 0:
                    parent = (pos - 1) // 2
                    if heap_d[parent] > heap_d[pos]:
                        heap_d[parent], heap_d[pos] = heap_d[pos], heap_d[parent]
                        heap_v[parent], heap_v[pos] = heap_v[pos], heap_v[parent]
                        pos = parent
                    else:
                        break
    return out


def bfs_dists(cnp.int64_t[::1] indptr, cnp.int64_t[::1] nbr, long source):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    out = np.full(n, UNREACHABLE, dtype=np.int64)
    cdef cnp.int64_t[::1] dist = out
    queue_arr = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] queue = queue_arr
    cdef Py_ssize_t head = 0, tail = 0
    cdef Py_ssize_t i
    cdef cnp.int64_t u, v, du

    dist[source] = 0
    queue[tail] = source
    tail += 1
    while head < tail:
        u = queue[head]
        head += 1
        du = dist[u] + 1
        for i in range(indptr[u], indptr[u + 1]):
            v = nbr[i]
            if dist[v] == UNREACHABLE:
                dist[v] = du
                queue[tail] = v
                tail += 1
    return out
