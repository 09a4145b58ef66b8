#!/usr/bin/env python3
"""Fuzz the core identities: Riemann-Roch, Clifford, and reduced-divisor
quasi-uniqueness on random small complexes.

Usage: python3 scripts/fuzz_audits.py [--pairs N] [--seed S]
"""

import argparse
import random
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from conftest import random_complex, random_divisor, random_witness  # noqa: E402

from mcdiv.rank import nonneg_rank, rank, rr_audit  # noqa: E402
from mcdiv.reduction import reduce_divisor  # noqa: E402


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--pairs", type=int, default=100)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    rng = random.Random(args.seed)

    t0 = time.time()
    special = 0
    complexes = [random_complex(rng) for _ in range(max(args.pairs // 8, 1))]
    for i in range(args.pairs):
        cx = complexes[i % len(complexes)]
        d = random_divisor(rng, cx, deg_lo=-6, deg_hi=6)
        rep = rr_audit(cx, d)
        if not rep.passed():
            print(f"FAIL riemann-roch at pair {i}: {rep.data} on {d!r}")
            return 1
        k = cx.canonical()
        if 0 <= d.degree() <= 2 * cx.genus() - 2:
            if nonneg_rank(cx, d) and nonneg_rank(cx, k - d):
                special += 1
                if 2 * rank(cx, d) > d.degree():
                    print(f"FAIL clifford at pair {i}: {d!r}")
                    return 1
        w = random_witness(rng, cx)
        v0 = cx.model.vertex_point(cx.model.vertices[0])
        r1, _ = reduce_divisor(cx, d, v0)
        r2, _ = reduce_divisor(cx, d + w.divisor(), v0)
        if r1.gamma_part() != r2.gamma_part():
            print(f"FAIL quasi-uniqueness at pair {i}: {d!r}")
            return 1
    dt = time.time() - t0
    print(f"ok: {args.pairs} pairs, {special} special divisors, {dt:.1f}s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
