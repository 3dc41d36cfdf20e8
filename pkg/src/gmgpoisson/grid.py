"""Nested uniform grids on the unit square/cube and the fields that live on them.

Level 0 is the finest grid. A hierarchy of depth ``L`` has ``n_l = 2**(L - l)``
cells per axis on level ``l``, so the coarsest level ``L - 1`` carries a single
interior unknown. Fields store the full ``(n + 1)**dim`` box, boundary ring
included, so stencils can read neighbours without branching.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

HOST = "host"
DEVICE = "device"

VALUE_BYTES = 8


@dataclass(frozen=True)
class LevelGrid:
    """Geometry of one level: ``cells`` intervals of width ``1 / cells`` per axis."""

    dim: int
    level: int
    cells: int

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError(f"dim must be 2 or 3, got {self.dim}")
        if self.cells < 2 or self.cells & (self.cells - 1):
            raise ValueError(f"cells per axis must be a power of two >= 2, got {self.cells}")

    @classmethod
    def for_depth(cls, dim: int, depth: int, level: int) -> "LevelGrid":
        return cls(dim, level, 2 ** (depth - level))

    @property
    def h(self) -> float:
        return 1.0 / self.cells

    @property
    def points_per_axis(self) -> int:
        return self.cells + 1

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.cells + 1,) * self.dim

    @property
    def interior_count(self) -> int:
        return (self.cells - 1) ** self.dim

    @property
    def total_points(self) -> int:
        return (self.cells + 1) ** self.dim

    @property
    def nbytes(self) -> int:
        return VALUE_BYTES * self.total_points

    def coordinates(self) -> list[np.ndarray]:
        x = np.linspace(0.0, 1.0, self.cells + 1)
        return np.meshgrid(*([x] * self.dim), indexing="ij")

    def coarser(self) -> "LevelGrid":
        return LevelGrid(self.dim, self.level + 1, self.cells // 2)


@dataclass(eq=False)
class GridField:
    """A scalar field on one level with a homogeneous Dirichlet boundary ring.

    ``values`` has shape ``grid.shape`` and Fortran memory order, so the flat
    layout (:attr:`flat`) runs with axis 0 fastest. ``space`` records which
    memory space currently holds the live copy.
    """

    grid: LevelGrid
    values: np.ndarray = field(repr=False)
    space: str = HOST
    name: str = ""

    @classmethod
    def zeros(cls, grid: LevelGrid, space: str = HOST, name: str = "") -> "GridField":
        return cls(grid, np.zeros(grid.shape, order="F"), space, name)

    @classmethod
    def sample(
        cls, grid: LevelGrid, fn: Callable[..., np.ndarray], scale: float = 1.0, name: str = ""
    ) -> "GridField":
        """Point-sample ``fn`` on the interior, times ``scale``; boundary set to zero."""
        out = cls.zeros(grid, name=name)
        inner = interior_slices(grid.dim)
        coords = [c[inner] for c in grid.coordinates()]
        out.values[inner] = scale * fn(*coords)
        return out

    @property
    def interior(self) -> np.ndarray:
        return self.values[interior_slices(self.grid.dim)]

    @property
    def flat(self) -> np.ndarray:
        return self.values.ravel(order="F")

    def copy(self) -> "GridField":
        return GridField(self.grid, self.values.copy(order="F"), self.space, self.name)

    def boundary_is_zero(self) -> bool:
        mask = np.ones(self.grid.shape, dtype=bool)
        mask[interior_slices(self.grid.dim)] = False
        return not np.any(self.values[mask])


def interior_slices(dim: int) -> tuple[slice, ...]:
    return (slice(1, -1),) * dim


@dataclass(eq=False)
class Hierarchy:
    """Per-level solution, right-hand side and residual storage.

    ``u`` and ``f`` exist on levels ``0 .. depth-1``; ``r`` on ``0 .. depth-2``
    (the coarsest level never forms a residual).
    """

    dim: int
    depth: int
    partition_level: int
    grids: list[LevelGrid]
    u: list[GridField]
    f: list[GridField]
    r: list[GridField]

    def fields(self) -> list[GridField]:
        return [*self.u, *self.f, *self.r]

    def allocated_values(self) -> int:
        return sum(fld.grid.total_points for fld in self.fields())

    def values_per_dof(self) -> float:
        return self.allocated_values() / self.grids[0].total_points

    def space_of_level(self, level: int) -> str:
        """Levels above the partition level run in device space, the rest on the host."""
        return DEVICE if level < self.partition_level else HOST


def build_hierarchy(dim: int, depth: int, partition: int = 0) -> Hierarchy:
    """Allocate zero-filled fields for every level of a depth-``depth`` hierarchy.

    Fields on levels ``l < partition`` are placed in device space.
    """
    if dim not in (2, 3):
        raise ValueError(f"dim must be 2 or 3, got {dim}")
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    if not 0 <= partition <= depth:
        raise ValueError(f"partition level must lie in [0, {depth}], got {partition}")
    grids = [LevelGrid.for_depth(dim, depth, l) for l in range(depth)]

    def space(l):
        return DEVICE if l < partition else HOST

    u = [GridField.zeros(g, space(g.level), f"u{g.level}") for g in grids]
    f = [GridField.zeros(g, space(g.level), f"f{g.level}") for g in grids]
    r = [GridField.zeros(g, space(g.level), f"r{g.level}") for g in grids[:-1]]
    return Hierarchy(dim, depth, partition, grids, u, f, r)


def interior_index_set(grid: LevelGrid) -> np.ndarray:
    """All interior multi-indices, lexicographic (first axis slowest), shape ``(count, dim)``."""
    rng = range(1, grid.cells)
    idx = np.array(list(itertools.product(rng, repeat=grid.dim)), dtype=np.intp)
    return idx.reshape(-1, grid.dim)


def color_count(dim: int, scheme: str = "multicolor") -> int:
    if scheme == "multicolor":
        return 2**dim
    if scheme == "redblack":
        return 2
    raise ValueError(f"unknown coloring scheme {scheme!r}")


def color_of(index, scheme: str = "multicolor") -> int:
    """Color of a multi-index: parity code ``sum((i_a % 2) << a)`` or ``sum(i) % 2``."""
    if scheme == "redblack":
        return sum(index) % 2
    return sum((int(i) % 2) << a for a, i in enumerate(index))


def color_index_set(grid: LevelGrid, color: int, scheme: str = "multicolor") -> np.ndarray:
    """Interior indices of one color, in the order of :func:`interior_index_set`."""
    ncolors = color_count(grid.dim, scheme)
    if not 0 <= color < ncolors:
        raise ValueError(f"color must lie in [0, {ncolors}), got {color}")
    idx = interior_index_set(grid)
    if scheme == "redblack":
        codes = idx.sum(axis=1) % 2
    else:
        codes = ((idx % 2) << np.arange(grid.dim)).sum(axis=1)
    return idx[codes == color]
