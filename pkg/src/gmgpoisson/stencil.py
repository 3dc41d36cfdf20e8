"""Matrix-free kernels for the scaled central-difference Laplacian.

The discrete system is ``2*dim*u_p - sum(axis neighbours) = h**2 f(x_p)`` on
interior points, so the operator has diagonal 4 (2D) or 6 (3D) and unit
off-diagonals on every level, while the right-hand side carries ``h**2``.

Each kernel is written as a slab function over the last (slowest) axis and
handed to an :class:`~gmgpoisson.backend.Engine`; every output point in one
launch depends only on values that launch does not write.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .backend import HOST_ENGINE, Engine
from .grid import GridField, LevelGrid, color_count
from .instrumentation import JACOBI_RATE, NORM_RATE, RESIDUAL_RATE, SMOOTH_RATE, KernelFlops


def _box(dim: int, n: int, lo: int, hi: int) -> list[slice]:
    return [slice(1, n)] * (dim - 1) + [slice(lo, hi)]


def _shift(box, axis: int, offset: int) -> tuple[slice, ...]:
    out = list(box)
    s = box[axis]
    out[axis] = slice(s.start + offset, s.stop + offset, s.step)
    return tuple(out)


def _same_level(*fields: GridField) -> LevelGrid:
    grid = fields[0].grid
    for fld in fields[1:]:
        if fld.grid != grid:
            raise ValueError(f"level mismatch: {fld.grid} vs {grid}")
    return grid


def _neighbour_sum_into(acc: np.ndarray, u: np.ndarray, box, dim: int) -> np.ndarray:
    for ax in range(dim):
        acc += u[_shift(box, ax, -1)]
        acc += u[_shift(box, ax, 1)]
    return acc


def residual(
    u: GridField,
    f: GridField,
    r: GridField,
    engine: Engine = HOST_ENGINE,
    flops: KernelFlops | None = None,
) -> None:
    """``r = f - A u`` on the interior; the boundary ring of ``r`` is untouched (zero)."""
    grid = _same_level(u, f, r)
    engine.require(u, f, r)
    d, n = grid.dim, grid.cells
    diag = 2.0 * d
    uv, fv, rv = u.values, f.values, r.values

    def slab(lo, hi):
        box = tuple(_box(d, n, lo, hi))
        acc = fv[box] - diag * uv[box]
        rv[box] = _neighbour_sum_into(acc, uv, box, d)

    engine.run("residual", slab, 1, n)
    if flops is not None:
        flops.residual += RESIDUAL_RATE[d] * grid.interior_count


def _color_box(dim: int, n: int, code: int, lo: int, hi: int) -> tuple[slice, ...]:
    box = [slice(1 if (code >> a) & 1 else 2, n, 2) for a in range(dim - 1)]
    parity = (code >> (dim - 1)) & 1
    start = lo if lo % 2 == parity else lo + 1
    box.append(slice(start, hi, 2))
    return tuple(box)


def _color_size(grid: LevelGrid, code: int) -> int:
    half = grid.cells // 2
    size = 1
    for a in range(grid.dim):
        size *= half if (code >> a) & 1 else half - 1
    return size


def _multicolor_codes(dim: int, color: int, scheme: str) -> list[int]:
    ncolors = color_count(dim, scheme)
    if not 0 <= color < ncolors:
        raise ValueError(f"color must lie in [0, {ncolors}), got {color}")
    if scheme == "multicolor":
        return [color]
    # red-black: union of parity codes with matching popcount parity; those never touch
    return [c for c in range(2**dim) if bin(c).count("1") % 2 == color]


def gs_color_sweep(
    u: GridField,
    f: GridField,
    color: int,
    scheme: str = "multicolor",
    engine: Engine = HOST_ENGINE,
    flops: KernelFlops | None = None,
) -> None:
    """Gauss-Seidel update of every point of one color, ``u = (f + sum nbrs) / (2 dim)``.

    ``scheme="multicolor"`` uses the ``2**dim`` parity classes
    ``sum((i_a % 2) << a)``; ``scheme="redblack"`` uses ``sum(i) % 2``.
    """
    grid = _same_level(u, f)
    engine.require(u, f)
    d, n = grid.dim, grid.cells
    diag = 2.0 * d
    codes = _multicolor_codes(d, color, scheme)
    uv, fv = u.values, f.values

    def slab(lo, hi):
        for code in codes:
            box = _color_box(d, n, code, lo, hi)
            if any(s.start >= s.stop for s in box):
                continue
            acc = fv[box].copy()
            uv[box] = _neighbour_sum_into(acc, uv, box, d) / diag

    engine.run("gs_color", slab, 1, n)
    if flops is not None:
        flops.smooth += SMOOTH_RATE[d] * sum(_color_size(grid, c) for c in codes)


def weighted_jacobi_sweep(
    u: GridField,
    f: GridField,
    weight: float,
    engine: Engine = HOST_ENGINE,
    flops: KernelFlops | None = None,
) -> None:
    """Damped Jacobi from a full snapshot: ``u = (1 - w) u + w (f + sum nbrs) / (2 dim)``."""
    if not 0.0 < weight <= 1.0:
        raise ValueError(f"Jacobi weight must lie in (0, 1], got {weight}")
    grid = _same_level(u, f)
    engine.require(u, f)
    d, n = grid.dim, grid.cells
    diag = 2.0 * d
    uv, fv = u.values, f.values
    new = np.empty((n - 1,) * d, order="F")

    def compute(lo, hi):
        box = tuple(_box(d, n, lo, hi))
        z = _neighbour_sum_into(fv[box].copy(), uv, box, d) / diag
        new[..., lo - 1 : hi - 1] = (1.0 - weight) * uv[box] + weight * z

    def commit(lo, hi):
        uv[tuple(_box(d, n, lo, hi))] = new[..., lo - 1 : hi - 1]

    engine.run("jacobi", compute, 1, n)
    engine.run("jacobi_commit", commit, 1, n)
    if flops is not None:
        flops.smooth += JACOBI_RATE[d] * grid.interior_count


@dataclass(frozen=True)
class Smoother:
    """Relaxation choice: ``gs-multicolor`` (4/8 colors), ``gs-2color`` or ``wj`` (damped Jacobi)."""

    kind: str = "gs-multicolor"
    weight: float = 1.0

    def __post_init__(self):
        if self.kind not in ("gs-multicolor", "gs-2color", "wj"):
            raise ValueError(f"unknown smoother {self.kind!r}")
        if self.kind == "wj" and not 0.0 < self.weight <= 1.0:
            raise ValueError(f"Jacobi weight must lie in (0, 1], got {self.weight}")

    @classmethod
    def parse(cls, text: str) -> "Smoother":
        """Accepts ``gs4``, ``gs8``, ``gs2`` and ``wj:W``."""
        text = text.strip().lower()
        if text in ("gs4", "gs8", "gs", "gs-multicolor"):
            return cls("gs-multicolor")
        if text in ("gs2", "gs-2color", "redblack"):
            return cls("gs-2color")
        if text.startswith("wj"):
            _, _, w = text.partition(":")
            return cls("wj", float(w) if w else 2.0 / 3.0)
        raise ValueError(f"cannot parse smoother {text!r}")

    def label(self, dim: int = 2) -> str:
        if self.kind == "gs-multicolor":
            return f"gs{2 ** dim}"
        if self.kind == "gs-2color":
            return "gs2"
        return f"wj:{self.weight:g}"


def relax(
    direction: str,
    sweeps: int,
    u: GridField,
    f: GridField,
    smoother: Smoother = Smoother(),
    engine: Engine = HOST_ENGINE,
    flops: KernelFlops | None = None,
) -> None:
    """``sweeps`` full smoothing passes.

    Forward visits colors in ascending order, backward in descending order.
    Jacobi has no ordering, so ``direction`` only matters for Gauss-Seidel.
    """
    if direction not in ("forward", "backward"):
        raise ValueError(f"direction must be 'forward' or 'backward', got {direction!r}")
    if sweeps < 0:
        raise ValueError("sweeps must be >= 0")
    d = u.grid.dim
    if smoother.kind == "wj":
        for _ in range(sweeps):
            weighted_jacobi_sweep(u, f, smoother.weight, engine, flops)
        return
    scheme = "multicolor" if smoother.kind == "gs-multicolor" else "redblack"
    colors = list(range(color_count(d, scheme)))
    if direction == "backward":
        colors.reverse()
    for _ in range(sweeps):
        for c in colors:
            gs_color_sweep(u, f, c, scheme, engine, flops)


def _pairwise(a: np.ndarray) -> float:
    while a.size > 1:
        a = a[0::2] + a[1::2]
    return float(a[0])


def tree_sum(values: np.ndarray, engine: Engine = HOST_ENGINE) -> float:
    """Sum by a fixed balanced binary tree over the zero-padded power-of-two length.

    Workers reduce aligned subtrees, so the bits of the result do not depend
    on the worker count.
    """
    values = np.asarray(values, dtype=float).ravel()
    if values.size == 0:
        return 0.0
    size = 1 << (values.size - 1).bit_length()
    padded = np.zeros(size)
    padded[: values.size] = values
    chunks = 1
    while chunks * 2 <= min(engine.workers, size):
        chunks *= 2
    width = size // chunks
    partial = engine.map(lambda k: _pairwise(padded[k * width : (k + 1) * width]), chunks)
    return _pairwise(np.array(partial))


def euclidean_norm(
    fld: GridField, engine: Engine = HOST_ENGINE, flops: KernelFlops | None = None
) -> float:
    """``sqrt(sum of squares)`` over interior points, reduced in flat (axis-0-fastest) order."""
    engine.require(fld)
    engine.launches["norm"] += 1
    v = fld.interior.ravel(order="F")
    total = tree_sum(v * v, engine)
    if flops is not None:
        flops.norm += NORM_RATE * fld.grid.interior_count
    return float(np.sqrt(total))


def discrete_l2_error(
    u_h: GridField,
    u_exact: GridField | Callable[..., np.ndarray],
    normalization: str = "mesh",
) -> float:
    """Discrete L2 norm of ``u_h - u_exact``.

    ``normalization="mesh"`` gives ``sqrt(h**dim * sum e**2)``; ``"points"``
    averages over all ``(n + 1)**dim`` grid points, boundary included,
    ``sqrt(sum e**2 / (n + 1)**dim)``.
    """
    grid = u_h.grid
    if callable(u_exact):
        u_exact = GridField.sample(grid, u_exact)
    _same_level(u_h, u_exact)
    e = u_h.interior - u_exact.interior
    ss = float(np.sum(e * e))
    if normalization == "mesh":
        return float(np.sqrt(grid.h**grid.dim * ss))
    if normalization == "points":
        return float(np.sqrt(ss / grid.total_points))
    raise ValueError(f"normalization must be 'mesh' or 'points', got {normalization!r}")
