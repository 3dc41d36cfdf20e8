"""Full multigrid against the sine-transform direct solver."""

from gmgpoisson import ProblemSpec, SolveConfig, discrete_l2_error, fmg_solve, poisson_direct
from gmgpoisson.spectral import spectral_flops

spacer = "_" * 60

problem = ProblemSpec(dim=2)

print("The direct solver gives the exact discrete solution,")
print("so its error is pure discretization error.")
for L in range(6, 11):
    u = poisson_direct(2, L, problem.rhs)
    print(f"L={L:2d}  FFT error {discrete_l2_error(u, problem.solution, 'mesh'):.4e}")

print(spacer)
print("One FMG pass with nu1 pre- and nu2 post-sweeps per level")
print("L    " + "  ".join(f"FMG{nu}" for nu in [(1, 1), (1, 2), (2, 2), (3, 3)]))
for L in range(6, 11):
    row = []
    for nu1, nu2 in [(1, 1), (1, 2), (2, 2), (3, 3)]:
        u, stats = fmg_solve(SolveConfig(2, L, mu_f=nu1, mu_b=nu2), problem.rhs)
        row.append(f"{discrete_l2_error(u, problem.solution, 'points'):.3e}")
    print(f"{L:2d}   " + "  ".join(row))

print(spacer)
print("Operation counts at L=10")
_, stats = fmg_solve(SolveConfig(2, 10, mu_f=1, mu_b=2), problem.rhs)
print(f"FMG(1,2): {stats.flops.total:.3e} flops")
print(f"FFT     : {spectral_flops(2, 10):.3e} operations")
