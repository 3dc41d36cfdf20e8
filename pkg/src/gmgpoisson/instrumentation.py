"""Flop, memory and rate accounting.

Flop counts are charged per interior point at the rates below (work units of
one floating-point operation). The counters are deterministic: they depend
only on grid sizes and the sequence of kernel calls, never on timing.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

from .grid import LevelGrid

KERNELS = ("residual", "smooth", "restrict", "prolong", "norm")

# per output interior point
RESIDUAL_RATE = {2: 6, 3: 8}
SMOOTH_RATE = {2: 5, 3: 7}
RESTRICT_RATE = {2: 8, 3: 16}
PROLONG_RATE = {2: 2.5, 3: 23 / 8}
NORM_RATE = 2
# damped Jacobi: neighbour sum, diagonal scale, then the (1-w)u + w*z blend
JACOBI_RATE = {2: 8, 3: 10}


@dataclass
class KernelFlops:
    residual: float = 0.0
    smooth: float = 0.0
    restrict: float = 0.0
    prolong: float = 0.0
    norm: float = 0.0

    @property
    def total(self) -> float:
        return self.residual + self.smooth + self.restrict + self.prolong + self.norm

    def as_dict(self) -> dict[str, float]:
        return asdict(self)

    def copy(self) -> "KernelFlops":
        return KernelFlops(**asdict(self))

    def __sub__(self, other: "KernelFlops") -> "KernelFlops":
        return KernelFlops(**{k: getattr(self, k) - getattr(other, k) for k in KERNELS})

    def scaled(self, factor: float) -> "KernelFlops":
        return KernelFlops(**{k: getattr(self, k) * factor for k in KERNELS})


def _interior_counts(dim: int, depth: int) -> list[int]:
    return [LevelGrid.for_depth(dim, depth, l).interior_count for l in range(depth)]


def vcycle_flops(dim: int, depth: int, mu_f: int = 1, mu_b: int = 1) -> KernelFlops:
    """Closed-form cost of one outer iteration: a V-cycle plus the residual norm check."""
    m = _interior_counts(dim, depth)
    above_coarsest = sum(m[:-1])
    return KernelFlops(
        residual=RESIDUAL_RATE[dim] * (above_coarsest + m[0]),
        smooth=SMOOTH_RATE[dim] * (mu_f * sum(m) + mu_b * above_coarsest),
        restrict=RESTRICT_RATE[dim] * sum(m[1:]),
        prolong=PROLONG_RATE[dim] * above_coarsest,
        norm=NORM_RATE * m[0],
    )


def flop_report(stats, per_iteration: bool = True) -> dict[str, dict[str, float]]:
    """Per-kernel flop totals and flops per finest interior unknown.

    With ``per_iteration`` the setup cost (initial residual and norm) is removed
    and the remainder averaged over outer iterations.
    """
    flops = stats.flops
    if per_iteration and stats.iterations:
        flops = (flops - stats.setup_flops).scaled(1.0 / stats.iterations)
    n = stats.finest_unknowns
    rows = {k: {"flops": getattr(flops, k), "per_unknown": getattr(flops, k) / n} for k in KERNELS}
    rows["total"] = {"flops": flops.total, "per_unknown": flops.total / n}
    return rows


@dataclass(frozen=True)
class MemoryReport:
    values: int
    bytes: int
    per_dof: float
    # same hierarchy with a single residual buffer sized for level 0
    shared_residual_values: int
    shared_residual_per_dof: float


def memory_report(hier) -> MemoryReport:
    """Allocated field values of a hierarchy relative to the finest grid point count."""
    finest = hier.grids[0].total_points
    values = hier.allocated_values()
    shared = 2 * sum(g.total_points for g in hier.grids) + (finest if hier.depth > 1 else 0)
    return MemoryReport(values, 8 * values, values / finest, shared, shared / finest)


def rate(flops: float, seconds: float) -> float:
    """GFLOPS."""
    if seconds <= 0:
        raise ValueError("seconds must be positive")
    return flops / seconds / 1e9


def bandwidth(nbytes: float, seconds: float) -> float:
    """GB/s."""
    if seconds <= 0:
        raise ValueError("seconds must be positive")
    return nbytes / seconds / 1e9
