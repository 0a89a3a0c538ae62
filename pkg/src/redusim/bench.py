"""Backend benchmark: compiled kernels vs the pure-Python fallback.

Usage: python -m redusim.bench [--pairs N] [--grid W] [--skip-scenario]

Compares single-pair route computations on a SWDC graph and a full desk-scale
scenario run, and verifies both backends return identical results (they must:
all kernel arithmetic is exact int64).
"""

import argparse
import random
import time

from . import _pykern
from .kernels import BACKEND
from .topology import SwdcParams, generate_swdc

try:
    from . import _ckern
except ImportError:
    _ckern = None


def bench_kernels(grid: int, pairs: int) -> None:
    topo = generate_swdc(SwdcParams(grid, grid, 2, rng_seed=9))
    n = topo.node_count
    graph = topo.csr("latency")
    rng = random.Random(11)
    sources = [rng.randrange(n) for _ in range(pairs)]

    backends = [("pure", _pykern)]
    if _ckern is not None:
        backends.append(("compiled", _ckern))

    print(f"graph: {n} nodes, {len(topo.links)} directed links, "
          f"{pairs} single-source queries")
    results = {}
    for name, impl in backends:
        t0 = time.perf_counter()
        acc = 0
        for s in sources:
            d = impl.dijkstra_dists(graph.indptr, graph.nbr, graph.w, s)
            acc ^= int(d[(s + 1) % n])
        dt = time.perf_counter() - t0
        results[name] = acc
        print(f"  dijkstra [{name:8s}]: {dt:7.3f} s  ({pairs / dt:8.1f} queries/s)")
    for name, impl in backends:
        t0 = time.perf_counter()
        acc = 0
        for s in sources:
            d = impl.bfs_dists(graph.indptr, graph.nbr, s)
            acc ^= int(d[(s + 1) % n])
        dt = time.perf_counter() - t0
        results[name + "_bfs"] = acc
        print(f"  bfs      [{name:8s}]: {dt:7.3f} s  ({pairs / dt:8.1f} queries/s)")

    if _ckern is not None:
        assert results["pure"] == results["compiled"], "backend outputs diverge"
        assert results["pure_bfs"] == results["compiled_bfs"], "backend outputs diverge"
        print("  outputs identical across backends: ok")


def bench_scenario(flows: int) -> None:
    import os
    import subprocess
    import sys

    # a routing-dominated slice of the 1024-node scale scenario: mostly-unique
    # origin/destination pairs, so nearly every flow costs one distance query.
    # Scenario timing needs the backend pinned before import -> child runs.
    code = (
        "import time, sys\n"
        "from redusim.config import recipe, run_scenario\n"
        "from redusim.kernels import BACKEND\n"
        "scenario = recipe('scale_1024')\n"
        f"scenario.raw['workload'][0]['count'] = {flows}\n"
        "del scenario.raw['workload'][1]\n"
        "t0 = time.perf_counter()\n"
        "result = run_scenario(scenario, seed=1)\n"
        "dt = time.perf_counter() - t0\n"
        "rows = tuple(sorted((r.flow_id, r.completed_us) for r in result.records))\n"
        "print(f'{BACKEND}\\t{dt:.3f}\\t{hash(rows)}')\n"
    )
    outputs = {}
    for backend in ("pure", "compiled"):
        env = dict(os.environ, REDUSIM_KERNELS=backend)
        proc = subprocess.run([sys.executable, "-c", code], env=env,
                              capture_output=True, text=True)
        if proc.returncode != 0:
            print(f"  scenario [{backend:8s}]: unavailable "
                  f"({proc.stderr.strip().splitlines()[-1] if proc.stderr else 'error'})")
            continue
        name, dt, digest = proc.stdout.strip().split("\t")
        outputs[backend] = digest
        print(f"  scenario [{name:8s}]: {float(dt):7.3f} s  "
              f"(scale_1024 trimmed to {flows} flows, seed 1)")
    if len(outputs) == 2:
        assert outputs["pure"] == outputs["compiled"], "scenario outputs diverge"
        print("  scenario outputs identical across backends: ok")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--grid", type=int, default=32)
    parser.add_argument("--pairs", type=int, default=300)
    parser.add_argument("--scenario-flows", type=int, default=10_000)
    parser.add_argument("--skip-scenario", action="store_true")
    args = parser.parse_args()

    print(f"active backend at import: {BACKEND}")
    bench_kernels(args.grid, args.pairs)
    if not args.skip_scenario:
        bench_scenario(args.scenario_flows)


if __name__ == "__main__":
    main()
