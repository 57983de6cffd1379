#!/usr/bin/env python3
"""Pick exponential-weight parameters (c, delta) from two kernel facts.

For kernels that (i) never create mass, (ii) produce at most d^y small
fragments below some delta1, and (iii) are bounded by b_m on a strip of
width delta2 below the diagonal, the tail ratio under w(x) = c^x is
asymptotically at most  c^-delta + delta * b_m.  Choosing delta small and
then c large makes that bound < 1; the deterministic rule here is

    delta = min(delta2, 1/(4 b_m)),   c = max(2d, e^{2/delta1}, 2^{2/delta}).
"""

import numpy as np

from fragkit import FragmentKernel, Weight, check, exp_weight_search, ratio_curve

print("reference parameters (delta1, delta2, d, b_m) = (1, 1, 1.5, 1):")
res = exp_weight_search(1.0, 1.0, 1.5, 1.0)
print(f"  c = {res.c:g}, delta = {res.delta:g}")
print(f"  bound c^-delta + delta b_m = {res.c**-res.delta + res.delta * 1.0:g} < 1")

print("\nthe boundary-binary kernel fits the hypotheses with d barely above 1")
print("(it makes exactly one small fragment, so the count below 1 is 1 <= d^y):")
res_bb = exp_weight_search(1.0, 1.0, 1.01, 1.0)
print(f"  c = {res_bb.c:g}, delta = {res_bb.delta:g}")

bb = FragmentKernel.boundary_binary()
w = res_bb.as_weight()
rep = check(bb, w, 2.0, 50.0)
print(f"  admissibility tail_estimate = {rep.tail_estimate:.6f} (< 1: condition met)")

# where the asymptote actually lands: ((c-1)c^-y + 1 - 1/c) / log(c)
c = res_bb.c
ys = np.array([5.0, 10.0, 30.0, 50.0])
rc = ratio_curve(bb, w, ys)
limit = (1.0 - 1.0 / c) / np.log(c)
print(f"\n  sampled ratio vs the closed-form limit {limit:.6f}:")
for y, r in zip(ys, rc.ratio):
    print(f"    r({y:4.0f}) = {r:.6f}")

print("\nsmall b_m means delta can stay at delta2 and c only has to clear e^{2/delta1}:")
res_small = exp_weight_search(1.0, 1.0, 1.5, 1e-6)
print(f"  b_m = 1e-6  ->  c = {res_small.c:g}, delta = {res_small.delta:g}")

print("\nand an impossible request overflows honestly:")
print(f"  delta1 = 0.001 -> {exp_weight_search(0.001, 1.0, 1.5, 1.0)!r} (needs c ~ e^2000)")
