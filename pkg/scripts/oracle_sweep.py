"""Sweep the closed forms against the exact solver over several seeds."""

import argparse
import json

from krselect.selfcheck import run_selfcheck


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--instances", type=int, default=200)
    ap.add_argument("--seeds", type=int, default=5)
    args = ap.parse_args()
    rows = [run_selfcheck(args.instances, seed) for seed in range(args.seeds)]
    names = rows[0]["checks"]
    summary = {n: max(r["checks"][n]["max_error"] for r in rows) for n in names}
    print(json.dumps({"instances_per_seed": args.instances, "seeds": args.seeds, "max_error": summary}, indent=2))


if __name__ == "__main__":
    main()
