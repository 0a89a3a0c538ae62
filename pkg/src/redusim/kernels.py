"""Kernel backend selection: compiled extension when available, else pure Python.

Set REDUSIM_KERNELS=pure (or =compiled) to force a backend; forcing `compiled`
when the extension is missing raises at import so benchmarks can't silently
compare a backend against itself.
"""

import os

import numpy as np

_forced = os.environ.get("REDUSIM_KERNELS", "").strip().lower()

if _forced == "pure":
    from . import _pykern as _impl
    BACKEND = "pure"
else:
    try:
        from . import _ckern as _impl  # type: ignore[attr-defined]
        BACKEND = "compiled"
    except ImportError:
        if _forced == "compiled":
            raise ImportError(
                "REDUSIM_KERNELS=compiled but the extension is not built; "
                "run: python setup.py build_ext --inplace")
        from . import _pykern as _impl
        BACKEND = "pure"

UNREACHABLE = np.iinfo(np.int64).max

dijkstra_dists = _impl.dijkstra_dists
bfs_dists = _impl.bfs_dists


def build_csr(node_count, links, weights: str):
    """CSR arrays for the forward and reverse graphs.

    Edge order inside each row is ascending neighbor id; the routing layer
    relies on that for lexicographic tie-breaking.
    """
    if weights == "hop":
        wof = lambda link: 1
    elif weights == "latency":
        wof = lambda link: link.base_latency_us
    else:
        raise ValueError(f"unknown weight kind {weights!r}")

    fwd = sorted(((l.src, l.dst, wof(l)) for l in links))
    rev = sorted(((l.dst, l.src, wof(l)) for l in links))

    def pack(edges):
        indptr = np.zeros(node_count + 1, dtype=np.int64)
        nbr = np.empty(len(edges), dtype=np.int64)
        w = np.empty(len(edges), dtype=np.int64)
        for i, (u, v, wt) in enumerate(edges):
            indptr[u + 1] += 1
            nbr[i] = v
            w[i] = wt
        np.cumsum(indptr, out=indptr)
        return indptr, nbr, w

    f_indptr, f_nbr, f_w = pack(fwd)
    r_indptr, r_nbr, r_w = pack(rev)
    return CsrGraph(node_count, f_indptr, f_nbr, f_w, r_indptr, r_nbr, r_w)


class CsrGraph:
    """Forward+reverse CSR views of a topology under one weight metric."""

    __slots__ = ("node_count", "indptr", "nbr", "w",
                 "rev_indptr", "rev_nbr", "rev_w", "unit_weights")

    def __init__(self, node_count, indptr, nbr, w, rev_indptr, rev_nbr, rev_w):
        self.node_count = node_count
        self.indptr = indptr
        self.nbr = nbr
        self.w = w
        self.rev_indptr = rev_indptr
        self.rev_nbr = rev_nbr
        self.rev_w = rev_w
        self.unit_weights = bool(len(w) == 0 or (w == 1).all())

    def dists_from(self, source: int) -> np.ndarray:
        if self.unit_weights:
            return bfs_dists(self.indptr, self.nbr, source)
        return dijkstra_dists(self.indptr, self.nbr, self.w, source)

    def dists_to(self, target: int) -> np.ndarray:
        if self.unit_weights:
            return bfs_dists(self.rev_indptr, self.rev_nbr, target)
        return dijkstra_dists(self.rev_indptr, self.rev_nbr, self.rev_w, target)
