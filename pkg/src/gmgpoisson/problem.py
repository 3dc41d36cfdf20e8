"""Model problem: -Laplace(u) = f on the unit square/cube, u = 0 on the boundary."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import GridField, LevelGrid


@dataclass(frozen=True)
class ProblemSpec:
    """Exact solution ``prod(sin(pi x_a))`` with right-hand side ``dim * pi**2 * prod(sin(pi x_a))``."""

    dim: int

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError(f"dim must be 2 or 3, got {self.dim}")

    def solution(self, *x: np.ndarray) -> np.ndarray:
        out = np.sin(np.pi * x[0])
        for xa in x[1:]:
            out = out * np.sin(np.pi * xa)
        return out

    def rhs(self, *x: np.ndarray) -> np.ndarray:
        return self.dim * np.pi**2 * self.solution(*x)

    def scaled_rhs(self, grid: LevelGrid) -> GridField:
        """``h**2 f`` sampled on the interior of ``grid``."""
        return GridField.sample(grid, self.rhs, scale=grid.h**2, name="f")

    def exact(self, grid: LevelGrid) -> GridField:
        return GridField.sample(grid, self.solution, name="u_exact")

    def discrete_exact(self, grid: LevelGrid) -> GridField:
        """Exact solution of the discrete system, from the eigenvalue of the single sine mode.

        ``prod(sin)`` is an eigenvector of the scaled operator with eigenvalue
        ``4 dim sin(pi h / 2)**2``.
        """
        lam = 4 * self.dim * np.sin(np.pi * grid.h / 2) ** 2
        factor = self.dim * np.pi**2 * grid.h**2 / lam
        return GridField.sample(grid, self.solution, scale=factor, name="u_h")
