import os
import subprocess
import sys

import numpy as np
import pytest

from redusim import _pykern
from redusim.kernels import UNREACHABLE
from redusim.topology import SwdcParams, generate_swdc

try:
    from redusim import _ckern
except ImportError:
    _ckern = None

REPO_ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), os.pardir))
SRC = os.path.join(REPO_ROOT, "src")


def _child_env(backend):
    env = dict(os.environ, REDUSIM_KERNELS=backend)
    env["PYTHONPATH"] = SRC + os.pathsep + env.get("PYTHONPATH", "")
    return env


def graphs_for_parity():
    yield generate_swdc(SwdcParams(8, 8, 2, rng_seed=3))
    yield generate_swdc(SwdcParams(16, 16, 1, rng_seed=11))
    yield generate_swdc(SwdcParams(4, 4, 0, rng_seed=0))


@pytest.mark.skipif(_ckern is None, reason="compiled kernels not built")
def test_compiled_and_pure_dijkstra_identical():
    for topo in graphs_for_parity():
        graph = topo.csr("latency")
        for source in (0, topo.node_count // 2, topo.node_count - 1):
            pure = _pykern.dijkstra_dists(graph.indptr, graph.nbr, graph.w, source)
            comp = _ckern.dijkstra_dists(graph.indptr, graph.nbr, graph.w, source)
            assert (pure == comp).all()


@pytest.mark.skipif(_ckern is None, reason="compiled kernels not built")
def test_compiled_and_pure_bfs_identical():
    for topo in graphs_for_parity():
        graph = topo.csr("hop")
        for source in (0, topo.node_count - 1):
            pure = _pykern.bfs_dists(graph.indptr, graph.nbr, source)
            comp = _ckern.bfs_dists(graph.indptr, graph.nbr, source)
            assert (pure == comp).all()


def test_unreachable_sentinel():
    # node 2 has no inbound path from 0
    from redusim.topology import build_explicit
    topo = build_explicit(3, [(0, 1, 1.0, 1.0), (1, 0, 1.0, 1.0),
                              (2, 0, 1.0, 1.0)])
    graph = topo.csr("hop")
    dists = _pykern.bfs_dists(graph.indptr, graph.nbr, 0)
    assert dists[2] == UNREACHABLE


def test_csr_rows_sorted_by_neighbor():
    topo = generate_swdc(SwdcParams(6, 6, 2, rng_seed=9))
    graph = topo.csr("hop")
    for u in range(topo.node_count):
        row = graph.nbr[graph.indptr[u]:graph.indptr[u + 1]]
        assert (np.diff(row) > 0).all()


def test_env_var_forces_pure_backend():
    out = subprocess.run(
        [sys.executable, "-c", "from redusim.kernels import BACKEND; print(BACKEND)"],
        env=_child_env("pure"), capture_output=True, text=True, cwd=REPO_ROOT)
    assert out.stdout.strip() == "pure"


@pytest.mark.skipif(_ckern is None, reason="compiled kernels not built")
def test_scenario_results_identical_across_backends():
    code = (
        "from redusim.config import recipe, run_scenario\n"
        "from redusim.simcore import records_to_csv\n"
        "s = recipe('short_flows_clone_replicate')\n"
        "s.raw['workload'][0]['count'] = 30\n"
        "import sys; sys.stdout.write(records_to_csv(run_scenario(s, 5).records))\n"
    )
    outputs = {}
    for backend in ("pure", "compiled"):
        proc = subprocess.run([sys.executable, "-c", code],
                              env=_child_env(backend), capture_output=True,
                              text=True, cwd=REPO_ROOT)
        assert proc.returncode == 0, proc.stderr
        outputs[backend] = proc.stdout
    assert outputs["pure"] == outputs["compiled"]
