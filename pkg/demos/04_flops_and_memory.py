"""Where the work and the memory go in one V-cycle."""

from gmgpoisson import LevelGrid, ProblemSpec, build_hierarchy, memory_report, vcycle_flops
from gmgpoisson import SolveConfig, flop_report, gmg_solve

spacer = "_" * 60

print("Closed-form flops per finest unknown for one outer iteration")
for dim, depth in ((2, 12), (3, 8)):
    fl = vcycle_flops(dim, depth)
    n = LevelGrid.for_depth(dim, depth, 0).interior_count
    parts = "  ".join(f"{k}={v / n:.2f}" for k, v in fl.as_dict().items())
    print(f"{dim}D L={depth}: total {fl.total / n:.2f}  ({parts})")

print(spacer)
print("The counters of a real solve agree with the closed form")
dim, depth = 2, 8
_, stats = gmg_solve(SolveConfig(dim, depth), ProblemSpec(dim).scaled_rhs(LevelGrid.for_depth(dim, depth, 0)))
for kernel, row in flop_report(stats).items():
    print(f"  {kernel:9s} {row['per_unknown']:7.3f} per unknown")

print(spacer)
print("Memory, as field values per finest grid point")
for dim, levels in ((2, range(8, 13)), (3, range(5, 9))):
    for L in levels:
        rep = memory_report(build_hierarchy(dim, L))
        print(f"{dim}D L={L:2d}: {rep.per_dof:.4f}  "
              f"(one shared residual buffer: {rep.shared_residual_per_dof:.4f})  {rep.bytes / 2**20:8.1f} MiB")
