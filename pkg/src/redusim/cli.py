"""Command-line entry points: validate, run, batch, recipe.

Exit codes: 0 success, 2 validation/usage failure (with a machine-readable
JSON error list on stderr), 1 runtime failure.
"""

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

from .config import (RECIPE_NAMES, ConfigError, ScenarioConfig, load_scenario,
                     recipe, run_scenario)
from .simcore import build_summary, records_to_csv


def _fail(errors: List[str]) -> int:
    json.dump({"errors": errors}, sys.stderr, indent=2)
    sys.stderr.write("\n")
    return 2


def parse_seeds(text: str) -> List[int]:
    """Accepts '1..20' ranges and comma lists like '1,2,7'."""
    seeds: List[int] = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..", 1)
            seeds.extend(range(int(lo), int(hi) + 1))
        elif part:
            seeds.append(int(part))
    if not seeds:
        raise ValueError("no seeds given")
    return seeds


def _run_one(args: Tuple[str, int, Optional[bool]]):
    """Worker for parallel batches; scenarios re-load from the raw dict so the
    task payload stays picklable and runs stay isolated. A failure aborts the
    whole batch, naming the seed that died."""
    raw_json, seed, enhancements = args
    try:
        scenario = ScenarioConfig(json.loads(raw_json))
        result = run_scenario(scenario, seed, enhancements)
    except Exception as exc:
        raise RuntimeError(f"seed {seed} failed: {exc}") from exc
    return seed, result.records, result.counters


def run_batch(scenario: ScenarioConfig, seeds: Sequence[int], out_dir: str,
              parallelism: int = 1, compare: bool = False) -> Dict[str, str]:
    """One CSV per seed plus an aggregate summary; --compare adds a paired
    base-only run per seed (same workload and congestion).

    Results are written in seed order regardless of execution order, so the
    aggregate bytes are independent of parallelism.
    """
    os.makedirs(out_dir, exist_ok=True)
    raw_json = json.dumps(scenario.raw, sort_keys=True)
    tasks = []
    for seed in seeds:
        tasks.append((raw_json, seed, None))
        if compare:
            tasks.append((raw_json, seed, False))

    if parallelism > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            outcomes = list(pool.map(_run_one, tasks))
    else:
        outcomes = [_run_one(task) for task in tasks]

    by_task = {(tasks[i][1], tasks[i][2]): outcomes[i] for i in range(len(tasks))}
    written: Dict[str, str] = {}
    all_records = []
    counters_total: Dict[str, int] = {}
    harm_counterexamples = 0

    for seed in seeds:
        _, records, counters = by_task[(seed, None)]
        all_records.extend(records)
        for key, value in counters.items():
            counters_total[key] = counters_total.get(key, 0) + value
        path = os.path.join(out_dir, f"seed_{seed}.csv")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(records_to_csv(records))
        written[f"seed_{seed}"] = path
        if compare:
            _, base_records, _ = by_task[(seed, False)]
            base_path = os.path.join(out_dir, f"base_seed_{seed}.csv")
            with open(base_path, "w", encoding="utf-8") as fh:
                fh.write(records_to_csv(base_records))
            written[f"base_seed_{seed}"] = base_path
            base_violated = {r.flow_id for r in base_records if r.sla_violated}
            for r in records:
                if r.sla_violated and r.flow_id not in base_violated:
                    harm_counterexamples += 1

    summary = build_summary(all_records, counters_total)
    text = summary.render()
    text += f"seeds = {','.join(str(s) for s in seeds)}\n"
    if compare:
        text += f"do_no_harm_counterexamples = {harm_counterexamples}\n"
    agg_path = os.path.join(out_dir, "aggregate_summary.txt")
    with open(agg_path, "w", encoding="utf-8") as fh:
        fh.write(text)
    written["aggregate"] = agg_path
    return written


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="redusim",
        description="Deterministic simulator of SLA-aware flow redundancy "
                    "over base routing in data-center networks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="validate a scenario file")
    p_validate.add_argument("file")

    p_run = sub.add_parser("run", help="run one scenario seed")
    p_run.add_argument("file")
    p_run.add_argument("--seed", type=int, required=True)
    p_run.add_argument("--out", default="redusim_out")
    p_run.add_argument("--base-only", action="store_true",
                       help="disable enhancements for this run")

    p_batch = sub.add_parser("batch", help="run a scenario over many seeds")
    p_batch.add_argument("file")
    p_batch.add_argument("--seeds", required=True,
                         help="e.g. 1..20 or 3,5,9")
    p_batch.add_argument("--parallel", type=int, default=1)
    p_batch.add_argument("--compare", action="store_true",
                         help="add a paired base-only run per seed")
    p_batch.add_argument("--out", default="redusim_out")

    p_recipe = sub.add_parser("recipe", help="emit a built-in scenario")
    p_recipe.add_argument("name", choices=RECIPE_NAMES)
    p_recipe.add_argument("--emit", help="write to a file instead of stdout")

    args = parser.parse_args(argv)

    try:
        if args.command == "validate":
            load_scenario(args.file)
            print("ok")
            return 0

        if args.command == "run":
            scenario = load_scenario(args.file)
            enhancements = False if args.base_only else None
            result = run_scenario(scenario, args.seed, enhancements)
            os.makedirs(args.out, exist_ok=True)
            tag = f"seed_{args.seed}" + ("_base" if args.base_only else "")
            csv_path = os.path.join(args.out, f"run_{tag}.csv")
            with open(csv_path, "w", encoding="utf-8") as fh:
                fh.write(records_to_csv(result.records))
            summary_path = os.path.join(args.out, f"run_{tag}_summary.txt")
            with open(summary_path, "w", encoding="utf-8") as fh:
                fh.write(result.summary.render())
            print(csv_path)
            print(summary_path)
            return 0

        if args.command == "batch":
            scenario = load_scenario(args.file)
            seeds = parse_seeds(args.seeds)
            written = run_batch(scenario, seeds, args.out,
                                parallelism=args.parallel, compare=args.compare)
            for path in written.values():
                print(path)
            return 0

        if args.command == "recipe":
            scenario = recipe(args.name)
            text = scenario.serialize()
            if args.emit:
                with open(args.emit, "w", encoding="utf-8") as fh:
                    fh.write(text)
                print(args.emit)
            else:
                sys.stdout.write(text)
            return 0
    except ConfigError as exc:
        return _fail(exc.errors)
    except (OSError, ValueError) as exc:
        return _fail([str(exc)])
    return 0


if __name__ == "__main__":
    sys.exit(main())
