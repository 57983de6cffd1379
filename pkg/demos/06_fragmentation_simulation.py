#!/usr/bin/env python3
"""Evolve a cluster population and watch the guaranteed structure appear.

Uniform binary fragmentation (two daughters per event) with rate a(x) = x:
big clusters shatter fast, the number of clusters grows, total mass is
conserved once the dust bookkeeping (mass crossing the smallest resolved
size) is included, and the mass-weighted norm never increases.
"""

import numpy as np

from fragkit import (FragmentKernel, Grid, RateFunction, Weight, bump,
                     column_kappa, discretize, expm_oracle, semigroup_check,
                     simulate)

kernel = FragmentKernel.homogeneous_power(0.0)   # h(z) = 2: uniform binary
rate = RateFunction.power(1.0)                   # a(x) = x
grid = Grid.geometric(1e-4, 20.0, 512)
gen = discretize(kernel, rate, grid)
w_mass = Weight.power(1.0)

print(f"grid: {grid.n} nodes on [{grid.dust_cutoff:g}, {grid.nodes[-1]:g}], "
      f"ratio {grid.ratio:.4f}")
print(f"discrete admissibility of the mass weight: column kappa = "
      f"{column_kappa(gen, w_mass):.9f} (<= 1)")

u0 = bump(grid, 1.0, 10.0)
traj = simulate(u0, gen, 1.0, 2e-3, weight=w_mass, sample_every=50)

print("\n   t      M0 (count)   M1 (mass)    dust        M1 + dust")
for t, m0, m1, d in zip(traj.times, traj.M0, traj.M1, traj.dust_mass):
    print(f"  {t:4.2f}   {m0:10.4f}  {m1:10.6f}  {d:.3e}  {m1 + d:.9f}")

total = traj.M1 + traj.dust_mass
print(f"\nmass closure |M1 + dust - M1(0)| / M1(0): "
      f"{np.max(np.abs(total - total[0]) / total[0]):.2e}")
print(f"count grew by a factor {traj.M0[-1] / traj.M0[0]:.2f} "
      "(binary splitting makes clusters, never destroys them)")
print(f"weighted norm non-increasing: "
      f"{bool(np.all(np.diff(traj.norm_omega) <= 1e-10 * traj.norm_omega[:-1]))}")
print(f"density non-negative: {bool(np.all(traj.final.u >= 0))}")

print("\ncross-checks on a small system (N = 32):")
g32 = Grid.geometric(0.01, 2.0, 32)
gen32 = discretize(kernel, rate, g32)
u32 = bump(g32, 0.1, 1.0)
ref = expm_oracle(gen32, 1.0, u32)
fin = simulate(u32, gen32, 1.0, 1e-3).final
wv = Weight.power_shifted(1.0).eval(g32.nodes)
err = np.abs(wv * g32.weights * (fin.u - ref.u)).sum() / np.abs(wv * g32.weights * ref.u).sum()
print(f"  implicit Euler vs matrix exponential at t=1, dt=1e-3: rel err {err:.2e}")
dev = semigroup_check(gen32, u32, 0.25, 0.25, scheme="implicit_euler", dt=1e-4)
print(f"  two-hop vs one-hop evolution deviation: {dev:.2e}")
