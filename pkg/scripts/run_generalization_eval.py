#!/usr/bin/env python3
"""Run the four-category generalization evaluation and render the report.

Scenario categories: seen (reference layout), physical (target rescaled),
semantic (target renamed with matching instruction), visual (distractor
added). The scripted expert is the 100%-success reference; pass
--failure-probability to dilute it and exercise the aggregation on
imperfect policies.
"""

import argparse
import sys
import time
from pathlib import Path

from toolforge.action import make_task
from toolforge.evaluation import (
    CATEGORIES,
    aggregate_report,
    generate_scenarios,
    render_report,
    run_trials,
)
from toolforge.policies import FailureInjectingPolicy, NullPolicy, ScriptedExpert


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--task", choices=("cut", "pick_place"), default="cut")
    parser.add_argument("--n", type=int, default=20, help="trials per category")
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--policy", choices=("expert", "null"), default="expert")
    parser.add_argument("--failure-probability", type=float, default=0.0)
    parser.add_argument("--csv-out", type=Path, default=None)
    args = parser.parse_args()

    policy = NullPolicy() if args.policy == "null" else ScriptedExpert()
    if args.failure_probability > 0.0:
        policy = FailureInjectingPolicy(policy, args.failure_probability, seed=args.seed)

    task = make_task(args.task, "cake")
    results = []
    timings = {}
    for i, category in enumerate(CATEGORIES):
        scenarios = generate_scenarios(task, category, args.n, seed=args.seed + i)
        started = time.perf_counter()
        trial_results = run_trials(policy, scenarios)
        timings[f"trials_{category}"] = (time.perf_counter() - started) / len(scenarios)
        results.extend(trial_results)

    report = aggregate_report(results, timings=timings)
    sys.stdout.write(render_report(report, format="text"))
    if args.csv_out:
        args.csv_out.parent.mkdir(parents=True, exist_ok=True)
        args.csv_out.write_text(render_report(report, format="csv"), encoding="utf-8")
        print(f"wrote {args.csv_out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
