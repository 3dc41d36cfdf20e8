"""V-cycle, full multigrid, and the partitioned outer solver.

Levels ``0 .. L_theta - 1`` run on the accelerator engine and levels
``L_theta .. L - 1`` on the host. When ``0 < L_theta < L`` every outer
iteration moves exactly two fields across the boundary: ``f`` on level
``L_theta`` down to the host after restriction, and ``u`` on that level back
to the device before prolongation.
"""

from __future__ import annotations

import time
import warnings
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .backend import Engine, TransferLog, accelerator_engine, copy_across, host_engine
from .grid import DEVICE, GridField, Hierarchy, build_hierarchy
from .instrumentation import KernelFlops
from .problem import ProblemSpec
from .stencil import Smoother, euclidean_norm, relax, residual
from .transfer import DEFAULT_RHS_SCALE, fmg_prolong, prolong_add, restrict


class NonConvergence(UserWarning):
    """The outer iteration hit ``maxit`` before reaching the tolerance."""


@dataclass
class SolveConfig:
    dim: int
    depth: int
    partition: int = 0
    tol: float = 1e-6
    maxit: int = 100
    mu_f: int = 1
    mu_b: int = 1
    smoother: Smoother = field(default_factory=Smoother)
    rhs_scale: float = DEFAULT_RHS_SCALE
    workers: int = 1
    # how FMG builds coarse right-hand sides: restrict f_0 level by level, or resample f
    fmg_rhs: str = "restrict"

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError(f"dim must be 2 or 3, got {self.dim}")
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        if not 0 <= self.partition <= self.depth:
            raise ValueError(f"partition must lie in [0, {self.depth}], got {self.partition}")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.maxit < 1:
            raise ValueError("maxit must be >= 1")
        if self.mu_f < 0 or self.mu_b < 0 or self.mu_f + self.mu_b == 0:
            raise ValueError("sweep counts must be >= 0 and not both zero")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.fmg_rhs not in ("restrict", "sample"):
            raise ValueError(f"fmg_rhs must be 'restrict' or 'sample', got {self.fmg_rhs!r}")


@dataclass
class SolveStats:
    iterations: int = 0
    residual_history: list[float] = field(default_factory=list)
    flops: KernelFlops = field(default_factory=KernelFlops)
    setup_flops: KernelFlops = field(default_factory=KernelFlops)
    transfers: TransferLog = field(default_factory=TransferLog)
    readback_bytes: int = 0
    launches: Counter = field(default_factory=Counter)
    times: dict[str, float] = field(default_factory=dict)
    converged: bool = True
    finest_unknowns: int = 0
    # discrete L2 error against the analytic solution, filled in by callers that know it
    error: float | None = None

    @property
    def transfer_bytes(self) -> int:
        return self.transfers.total_bytes

    @property
    def relative_residual(self) -> float:
        return self.residual_history[-1] / self.residual_history[0]


@dataclass
class CycleContext:
    """Engines, counters and cycle options shared by one solve."""

    host: Engine = field(default_factory=host_engine)
    accelerator: Engine = field(default_factory=accelerator_engine)
    smoother: Smoother = field(default_factory=Smoother)
    rhs_scale: float = DEFAULT_RHS_SCALE
    flops: KernelFlops = field(default_factory=KernelFlops)
    transfers: TransferLog = field(default_factory=TransferLog)

    @classmethod
    def from_config(cls, config: SolveConfig) -> "CycleContext":
        return cls(
            accelerator=accelerator_engine(config.workers),
            smoother=config.smoother,
            rhs_scale=config.rhs_scale,
        )

    def engine(self, hier: Hierarchy, level: int) -> Engine:
        return self.accelerator if hier.space_of_level(level) == DEVICE else self.host

    def launches(self) -> Counter:
        out = Counter()
        for eng in (self.host, self.accelerator):
            out.update({f"{eng.name}:{k}": v for k, v in eng.launches.items()})
        return out

    def close(self) -> None:
        self.host.shutdown()
        self.accelerator.shutdown()


def _boundary(hier: Hierarchy) -> int | None:
    p = hier.partition_level
    return p if 0 < p < hier.depth else None


def _zero(fld: GridField, engine: Engine) -> None:
    engine.claim(fld)
    engine.launches["zero"] += 1
    fld.values[...] = 0.0


def vcycle(hier: Hierarchy, mu_f: int, mu_b: int, top: int = 0, ctx: CycleContext | None = None) -> None:
    """One V-cycle on levels ``top .. L-1``, updating ``hier.u[top]`` in place.

    Coarse levels solve for corrections: each ``u[l+1]`` is zeroed after its
    right-hand side is restricted. With a single interior unknown, the forward
    relaxation on the coarsest level is an exact solve.
    """
    ctx = ctx or CycleContext()
    L = hier.depth
    boundary = _boundary(hier)
    u, f, r = hier.u, hier.f, hier.r
    for l in range(top, L - 1):
        eng = ctx.engine(hier, l)
        relax("forward", mu_f, u[l], f[l], ctx.smoother, eng, ctx.flops)
        residual(u[l], f[l], r[l], eng, ctx.flops)
        restrict(r[l], f[l + 1], ctx.rhs_scale, eng, ctx.flops)
        if l + 1 == boundary:
            copy_across(f[l + 1], "to_host", ctx.transfers)
        _zero(u[l + 1], ctx.engine(hier, l + 1))
    relax("forward", mu_f, u[L - 1], f[L - 1], ctx.smoother, ctx.engine(hier, L - 1), ctx.flops)
    for l in range(L - 2, top - 1, -1):
        eng = ctx.engine(hier, l)
        if l + 1 == boundary:
            copy_across(u[l + 1], "to_device", ctx.transfers)
        prolong_add(u[l], u[l + 1], eng, ctx.flops)
        relax("backward", mu_b, u[l], f[l], ctx.smoother, eng, ctx.flops)


def _residual_norm(hier: Hierarchy, ctx: CycleContext, scratch: GridField | None) -> float:
    eng = ctx.engine(hier, 0)
    r0 = hier.r[0] if hier.r else scratch
    residual(hier.u[0], hier.f[0], r0, eng, ctx.flops)
    return euclidean_norm(r0, eng, ctx.flops)


def _load(dest: GridField, src) -> None:
    values = src.values if isinstance(src, GridField) else np.asarray(src, dtype=float)
    if values.shape != dest.grid.shape:
        raise ValueError(f"expected array of shape {dest.grid.shape}, got {values.shape}")
    dest.values[...] = values


def _finish(hier, ctx, stats, t0) -> tuple[GridField, SolveStats]:
    u0 = hier.u[0]
    if u0.space == DEVICE:
        t = time.perf_counter()
        stats.readback_bytes = copy_across(u0, "to_host")
        ctx.transfers.seconds += time.perf_counter() - t
    total = time.perf_counter() - t0
    stats.flops = ctx.flops
    stats.transfers = ctx.transfers
    stats.launches = ctx.launches()
    stats.times = {
        "total": total,
        "communication": ctx.transfers.seconds,
        "compute": total - ctx.transfers.seconds,
    }
    stats.finest_unknowns = hier.grids[0].interior_count
    ctx.close()
    return u0, stats


def gmg_solve(config: SolveConfig, f0) -> tuple[GridField, SolveStats]:
    """Iterate V-cycles from ``u = 0`` until ``||f - A u|| <= tol * ||f||`` or ``maxit``.

    ``f0`` is the scaled right-hand side ``h**2 f`` on the finest grid, as a
    :class:`GridField` or an array of the full grid shape. Returns the finest
    solution (in host space) and the statistics. Emits :class:`NonConvergence`
    if ``maxit`` is reached; the last iterate is still returned.
    """
    hier = build_hierarchy(config.dim, config.depth, config.partition)
    ctx = CycleContext.from_config(config)
    stats = SolveStats()
    t0 = time.perf_counter()
    _load(hier.f[0], f0)
    scratch = None if hier.r else GridField.zeros(hier.grids[0], hier.space_of_level(0))

    resinit = _residual_norm(hier, ctx, scratch)
    stats.setup_flops = ctx.flops.copy()
    stats.residual_history.append(resinit)
    res, it = resinit, 0
    while res > config.tol * resinit and it < config.maxit:
        vcycle(hier, config.mu_f, config.mu_b, 0, ctx)
        res = _residual_norm(hier, ctx, scratch)
        stats.residual_history.append(res)
        it += 1
    stats.iterations = it
    stats.converged = res <= config.tol * resinit
    if not stats.converged:
        warnings.warn(
            NonConvergence(
                f"relative residual {res / resinit:.3e} after {it} iterations "
                f"(tol {config.tol:g})"
            ),
            stacklevel=2,
        )
    return _finish(hier, ctx, stats, t0)


def fmg_solve(config: SolveConfig, rhs: Callable[..., np.ndarray]) -> tuple[GridField, SolveStats]:
    """Full multigrid with ``config.mu_f`` pre- and ``config.mu_b`` post-sweeps per V-cycle.

    ``rhs`` is the unscaled continuous right-hand side ``f(x, y[, z])``. Coarse
    right-hand sides are built by restricting ``h**2 f`` from the finest level
    (``config.fmg_rhs="restrict"``) or by resampling ``h_l**2 f`` on each level.
    The coarsest problem is solved by relaxation, then each finer level starts
    from the prolonged coarse solution and runs one V-cycle.
    """
    hier = build_hierarchy(config.dim, config.depth, config.partition)
    ctx = CycleContext.from_config(config)
    stats = SolveStats()
    L = hier.depth
    boundary = _boundary(hier)
    t0 = time.perf_counter()

    if config.fmg_rhs == "sample":
        for fl in hier.f:
            _load(fl, GridField.sample(fl.grid, rhs, scale=fl.grid.h**2))
    else:
        _load(hier.f[0], GridField.sample(hier.grids[0], rhs, scale=hier.grids[0].h ** 2))
        for l in range(L - 1):
            restrict(hier.f[l], hier.f[l + 1], ctx.rhs_scale, ctx.engine(hier, l), ctx.flops)
            if l + 1 == boundary:
                copy_across(hier.f[l + 1], "to_host", ctx.transfers)
    # u = 0 initially, so the initial residual is f_0 itself
    stats.residual_history.append(euclidean_norm(hier.f[0], ctx.engine(hier, 0), ctx.flops))
    stats.setup_flops = ctx.flops.copy()

    relax("forward", config.mu_f, hier.u[L - 1], hier.f[L - 1], ctx.smoother,
          ctx.engine(hier, L - 1), ctx.flops)
    for l in range(L - 2, -1, -1):
        if l + 1 == boundary:
            copy_across(hier.u[l + 1], "to_device", ctx.transfers)
        fmg_prolong(hier.u[l + 1], hier.u[l], ctx.engine(hier, l), ctx.flops)
        vcycle(hier, config.mu_f, config.mu_b, l, ctx)

    scratch = None if hier.r else GridField.zeros(hier.grids[0], hier.space_of_level(0))
    stats.residual_history.append(_residual_norm(hier, ctx, scratch))
    stats.iterations = 1
    return _finish(hier, ctx, stats, t0)


SMOOTHER_FAMILY = (
    Smoother("wj", 0.667),
    Smoother("wj", 0.8),
    Smoother("gs-2color"),
    Smoother("gs-multicolor"),
)


def smoother_comparison(
    dim: int = 2,
    levels=range(8, 13),
    smoothers=SMOOTHER_FAMILY,
    **config_kw,
) -> dict[str, dict[int, int]]:
    """Iteration counts of :func:`gmg_solve` on the model problem, ``{smoother label: {L: its}}``."""
    problem = ProblemSpec(dim)
    table: dict[str, dict[int, int]] = {}
    for sm in smoothers:
        row = table.setdefault(sm.label(dim), {})
        for L in levels:
            config = SolveConfig(dim, L, smoother=sm, **config_kw)
            _, stats = gmg_solve(config, problem.scaled_rhs(build_hierarchy(dim, L).grids[0]))
            row[L] = stats.iterations
    return table
