"""Restriction and prolongation between adjacent levels.

Both operators follow a skewed linear-interpolation rule: a fine point that is
odd along several axes is interpolated from the single coarse pair along the
``(+1, +1[, +1])`` diagonal. In 2D this is the 7-point restriction

    f_c[i, j] = (2 r[2i, 2j] + r[2i+-1, 2j] + r[2i, 2j+-1]
                 + r[2i-1, 2j-1] + r[2i+1, 2j+1]) / 8

and its matching prolongation. In 3D the restriction has centre weight 2 and
unit weight on the 14 neighbours ``+-s`` for every nonzero ``s`` in
``{0, 1}**3`` (6 face, 6 skew edge, 2 body diagonal), divided by 16, which
costs 16 flops per coarse point. Prolongation copies even points and averages
the two coarse parents ``e[i]`` and ``e[i + s]`` for every other parity class
``s``. In both dimensions the prolongation matrix is ``2**dim`` times the
transpose of the restriction matrix.

The restricted residual is multiplied by ``rhs_scale``. The operator keeps
diagonal ``2 dim`` on every level while the right-hand side carries ``h**2``,
so the consistent coarse right-hand side needs ``rhs_scale = 4``.
"""

from __future__ import annotations

import itertools

from .backend import HOST_ENGINE, Engine
from .grid import GridField
from .instrumentation import PROLONG_RATE, RESTRICT_RATE, KernelFlops

DEFAULT_RHS_SCALE = 4.0


def restriction_offsets(dim: int) -> list[tuple[int, ...]]:
    """Unit-weight neighbour offsets: ``+s`` then ``-s`` for nonzero ``s``, axis-aligned first."""
    nonzero = [s for s in itertools.product((0, 1), repeat=dim) if any(s)]
    nonzero.sort(key=lambda s: (sum(s), [-x for x in s]))
    out = []
    for s in nonzero:
        out.append(s)
        out.append(tuple(-x for x in s))
    return out


def _check_adjacent(fine: GridField, coarse: GridField) -> None:
    fg, cg = fine.grid, coarse.grid
    if fg.dim != cg.dim or fg.cells != 2 * cg.cells:
        raise ValueError(f"levels are not adjacent: fine {fg}, coarse {cg}")


def restrict(
    r_fine: GridField,
    f_coarse: GridField,
    rhs_scale: float = DEFAULT_RHS_SCALE,
    engine: Engine = HOST_ENGINE,
    flops: KernelFlops | None = None,
) -> None:
    """Weighted fine-to-coarse average, times ``rhs_scale``, written over ``f_coarse``."""
    _check_adjacent(r_fine, f_coarse)
    engine.require(r_fine)
    engine.claim(f_coarse)
    d, nc = f_coarse.grid.dim, f_coarse.grid.cells
    norm = float(2 ** (d + 1))
    offsets = restriction_offsets(d)
    rv, fv = r_fine.values, f_coarse.values

    def slab(lo, hi):
        coarse = [slice(1, nc)] * (d - 1) + [slice(lo, hi)]
        centre = [slice(2 * s.start, 2 * s.stop - 1, 2) for s in coarse]
        acc = 2.0 * rv[tuple(centre)]
        for off in offsets:
            acc += rv[tuple(slice(c.start + o, c.stop + o, 2) for c, o in zip(centre, off))]
        fv[tuple(coarse)] = rhs_scale * (acc / norm)

    engine.run("restrict", slab, 1, nc)
    if flops is not None:
        flops.restrict += RESTRICT_RATE[d] * f_coarse.grid.interior_count


def _class_slices(parity: int, nc: int, lo: int | None = None, hi: int | None = None):
    """Fine slice for one parity along an axis, with the coarse parent slices ``i`` and ``i + 1``."""
    nf = 2 * nc
    if lo is None:
        lo, hi = 1, nf
    start = lo if lo % 2 == parity else lo + 1
    count = len(range(start, hi, 2))
    i0 = (start - parity) // 2
    return slice(start, hi, 2), slice(i0, i0 + count), slice(i0 + 1, i0 + 1 + count), count


def _prolong_add(u_fine: GridField, e_coarse: GridField, engine: Engine) -> None:
    d, nc = e_coarse.grid.dim, e_coarse.grid.cells
    uv, ev = u_fine.values, e_coarse.values

    def slab(lo, hi):
        for cls in itertools.product((0, 1), repeat=d):
            parts = [_class_slices(p, nc) for p in cls[:-1]]
            parts.append(_class_slices(cls[-1], nc, lo, hi))
            if any(p[3] == 0 for p in parts):
                continue
            target = tuple(p[0] for p in parts)
            first = ev[tuple(p[1] for p in parts)]
            if any(cls):
                second = ev[tuple(p[2] if c else p[1] for p, c in zip(parts, cls))]
                value = 0.5 * (first + second)
            else:
                value = first
            uv[target] += value

    engine.run("prolong", slab, 1, 2 * nc)


def prolong_add(
    u_fine: GridField,
    e_coarse: GridField,
    engine: Engine = HOST_ENGINE,
    flops: KernelFlops | None = None,
) -> None:
    """``u_fine += P e_coarse``, evaluated as a gather over coarse parents per fine point."""
    _check_adjacent(u_fine, e_coarse)
    engine.require(u_fine, e_coarse)
    _prolong_add(u_fine, e_coarse, engine)
    if flops is not None:
        flops.prolong += PROLONG_RATE[u_fine.grid.dim] * u_fine.grid.interior_count


def fmg_prolong(
    u_coarse: GridField,
    u_fine: GridField,
    engine: Engine = HOST_ENGINE,
    flops: KernelFlops | None = None,
) -> None:
    """``u_fine = P u_coarse`` (same stencil as :func:`prolong_add`, starting from zero)."""
    _check_adjacent(u_fine, u_coarse)
    engine.require(u_coarse)
    engine.claim(u_fine)
    u_fine.values[...] = 0.0
    _prolong_add(u_fine, u_coarse, engine)
    if flops is not None:
        flops.prolong += PROLONG_RATE[u_fine.grid.dim] * u_fine.grid.interior_count

