#!/usr/bin/env python3
"""Audit the two claimed bounds whose proofs are documented as flawed.

Computes exact expectations over every uniform draw, measures (gamma, m)
per instance, and prints min-ratio summaries plus a bucketed (m, gamma)
grid. Violating instances (if any turn up) are written as replayable JSON.
Always exits 0: these are audits, not assertions.
"""

import argparse
import json
import sys
from collections import defaultdict
from pathlib import Path

from submodlab import serialization
from submodlab.verify import audit_problem4, audit_problem5


def bucket_grid(rows, key2="m"):
    grid = defaultdict(list)
    for row in rows:
        if row.ratio is None:
            continue
        g = round(row.params["gamma"], 1)
        m = round(row.params.get(key2, 1.0), 1)
        grid[(m, g)].append(row.ratio)
    return {f"m={m},gamma={g}": round(min(v), 4)
            for (m, g), v in sorted(grid.items())}


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=60)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out-dir", default="submodlab-out")
    args = parser.parse_args()
    out = Path(args.out_dir)

    for name, report in (
            ("problem4-claimed", audit_problem4(args.trials, args.seed)),
            ("problem5-claimed", audit_problem5(args.trials, args.seed))):
        print(json.dumps(report.summary(), sort_keys=True))
        print("min ratios on the measured (m, gamma) grid:")
        print(json.dumps(bucket_grid(report.rows), indent=2, sort_keys=True))
        for i, doc in enumerate(report.violations):
            path = out / "violations" / f"{name}-s{args.seed}-v{i}.json"
            serialization.save(doc, path)
            print(f"violating instance written to {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
