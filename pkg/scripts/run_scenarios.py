"""Run every preset scenario (or a chosen subset) and write JSON + CSV per run.

    python3 scripts/run_scenarios.py --out results/ [--seed 42] [names ...]
"""

import argparse
import json
from pathlib import Path

from dfalgebra.scenarios import get_preset, run_scenario, scenario_names


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("names", nargs="*", default=scenario_names())
    ap.add_argument("--out", type=Path, default=Path("results"))
    ap.add_argument("--seed", type=int)
    args = ap.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    failed = []
    for name in args.names:
        cfg = get_preset(name)
        if args.seed is not None:
            cfg = cfg.with_seed(args.seed)
        rep = run_scenario(cfg)
        (args.out / f"{name}.json").write_text(json.dumps(rep.to_json(), indent=2, sort_keys=True) + "\n")
        (args.out / f"{name}.csv").write_text(rep.to_csv())
        summary = ", ".join(f"{k}={v['value']:.3g}" for k, v in rep.assertions.items())
        print(f"{'ok  ' if rep.passed else 'FAIL'} {name:34s} {summary}")
        if not rep.passed:
            failed.append(name)
    raise SystemExit(1 if failed else 0)


if __name__ == "__main__":
    main()
