#!/usr/bin/env python3
"""Walk through the degree-2 rank-1 obstruction: a star of three genus-one
curves around a projective line carries a divisor of rank 1 that no
2-dimensional function space can complete to a limit series.

Usage: python3 scripts/demo_not_completable.py [p] [a] [b]
"""

import sys

from mcdiv.limitseries import build_three_leaf_star, not_completable_audit
from mcdiv.rank import rank


def main():
    p = int(sys.argv[1]) if len(sys.argv) > 1 else 5
    a = int(sys.argv[2]) if len(sys.argv) > 2 else 1
    b = int(sys.argv[3]) if len(sys.argv) > 3 else 1
    cx, center, xs = build_three_leaf_star(p, a, b)
    print(f"complex: projective line center over F{p}, three genus-one leaves")
    print(f"genus: {cx.genus()}")
    base = center.field.elem(3)
    div = cx.divisor(curve_parts={"c": center.divisor((base, 2))})
    print(f"divisor: 2*({base}) on the center, degree {div.degree()}")
    print(f"rank: {rank(cx, div)}")
    rep = not_completable_audit(p, a, b)
    print()
    for name, ok, witness in rep.checks:
        mark = "ok " if ok else "FAIL"
        print(f"  [{mark}] {name}")
    print()
    print("verdict:", "obstruction reproduced" if rep.passed() else "AUDIT FAILED")
    return 0 if rep.passed() else 1


if __name__ == "__main__":
    sys.exit(main())
