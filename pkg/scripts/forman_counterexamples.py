"""List simplices where the closed Forman formula differs from the extracted potential.

Usage: python3 scripts/forman_counterexamples.py [--augmented on|off] [--count N] [--seed S]

Runs the fixtures, the torus and seeded random complexes; prints one JSON
object per mismatching simplex and a per-degree tally on stderr.
"""

import argparse
import json
import sys
from collections import Counter

from hodgeheat.generators import fixtures, random_complexes, torus
from hodgeheat.operators import forman_discrepancy


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--augmented", choices=("on", "off"), default="off")
    ap.add_argument("--count", type=int, default=50)
    ap.add_argument("--seed", type=int, default=20240611)
    args = ap.parse_args(argv)
    cases = dict(fixtures(augmented=args.augmented))
    cases["torus"] = torus(args.augmented)
    for i, cx in enumerate(random_complexes(args.seed, args.count, max_simplices=60, max_dim=3,
                                            augmented=args.augmented)):
        cases[f"random-{i}"] = cx
    tally = Counter()
    for name, cx in cases.items():
        for k in range(0, cx.dim + 1):
            for row in forman_discrepancy(cx, k):
                tally[k] += 1
                print(json.dumps({"complex": name, "degree": k, **row}))
    for k in sorted(tally):
        print(f"degree {k}: {tally[k]} mismatches", file=sys.stderr)
    if not tally:
        print("no mismatches", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
