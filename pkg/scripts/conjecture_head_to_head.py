#!/usr/bin/env python3
"""Round-count head-to-head for the bicriteria multi-pass greedy.

Compares the conjectured ceil(log_{p+1}(1/eps)) pass count against the
proved ceil(ln(1/eps)/ln((p+1)/p)) passes on seeded coverage instances and
prints per-instance rows plus a summary. Exploratory: no verdict.
"""

import argparse
import json
import sys

from submodlab.verify import audit_problem2_conjecture


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--p", type=int, nargs="+", default=[2, 3])
    parser.add_argument("--epsilon", type=float, default=0.1)
    parser.add_argument("--trials", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--rows", action="store_true",
                        help="print per-instance rows too")
    args = parser.parse_args()

    for p in args.p:
        report = audit_problem2_conjecture(args.trials, args.seed, p=p,
                                           epsilon=args.epsilon)
        if args.rows:
            print("instance,opt,rounds_conjecture,rounds_multipass,"
                  "value_at_conjecture,value_at_multipass,first_round_reaching")
            for r in report.rows:
                print(f"{r.instance_id},{r.opt!r},{r.rounds_conjecture},"
                      f"{r.rounds_multipass},{r.value_at_conjecture!r},"
                      f"{r.value_at_multipass!r},{r.first_round_reaching}")
        print(json.dumps(report.summary(), sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
