"""Geometric multigrid and spectral solvers for the Poisson equation on the unit square and cube."""

from .backend import (
    HOST_ENGINE,
    Engine,
    OperandNotResident,
    TransferLog,
    accelerator_engine,
    copy_across,
    host_engine,
)
from .grid import DEVICE, HOST, GridField, Hierarchy, LevelGrid, build_hierarchy
from .instrumentation import KernelFlops, bandwidth, flop_report, memory_report, rate, vcycle_flops
from .multigrid import (
    CycleContext,
    NonConvergence,
    SolveConfig,
    SolveStats,
    fmg_solve,
    gmg_solve,
    smoother_comparison,
    vcycle,
)
from .problem import ProblemSpec
from .spectral import poisson_direct, sine_transform, spectral_flops
from .stencil import (
    Smoother,
    discrete_l2_error,
    euclidean_norm,
    gs_color_sweep,
    relax,
    residual,
    weighted_jacobi_sweep,
)
from .transfer import fmg_prolong, prolong_add, restrict

__version__ = "0.1.0"
