"""Splitting the hierarchy between the accelerator and the host.

Levels finer than the partition level run on the accelerator engine. The
coarser ones run on the host. Only the right-hand side and the correction on
the partition level cross the boundary, twice per V-cycle.
"""

import numpy as np

from gmgpoisson import LevelGrid, ProblemSpec, SolveConfig, gmg_solve

spacer = "_" * 60

dim, depth = 2, 9
problem = ProblemSpec(dim)
f0 = problem.scaled_rhs(LevelGrid.for_depth(dim, depth, 0))

reference, _ = gmg_solve(SolveConfig(dim, depth, partition=0), f0)

print("Ltheta  its  copies  bytes moved  identical  comm share")
for ltheta in range(depth + 1):
    u, stats = gmg_solve(SolveConfig(dim, depth, partition=ltheta, workers=4), f0)
    same = np.array_equal(u.values, reference.values)
    share = stats.times["communication"] / stats.times["total"]
    print(f"{ltheta:6d}  {stats.iterations:3d}  {stats.transfers.copies:6d}  "
          f"{stats.transfer_bytes:11d}  {str(same):9s}  {share:.2%}")

print(spacer)
print("Kernel launches with Ltheta = 4 (one launch per color per sweep):")
_, stats = gmg_solve(SolveConfig(dim, depth, partition=4), f0)
for key in sorted(stats.launches):
    print(f"  {key:28s} {stats.launches[key]}")
