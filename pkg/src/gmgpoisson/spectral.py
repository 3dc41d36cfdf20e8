"""Direct Poisson solver by type-I discrete sine transforms.

The sine modes ``sin(k pi x)`` diagonalize the Dirichlet five/seven-point
Laplacian, with eigenvalues ``sum_a (4 / h**2) sin(k_a pi h / 2)**2``. Solving
is a forward transform along every axis, a pointwise division and an inverse
transform.
"""

from __future__ import annotations

import math

import numpy as np

from .grid import GridField, LevelGrid


def _check_power_of_two(n: int) -> None:
    if n < 2 or n & (n - 1):
        raise ValueError(f"transform length + 1 must be a power of two >= 2, got {n}")


def sine_transform(x: np.ndarray, axis: int = -1) -> np.ndarray:
    """DST-I along ``axis``: ``X_k = sum_{j=1}^{n-1} x_j sin(pi j k / n)``.

    The axis must have length ``n - 1`` with ``n`` a power of two. Computed
    from a real FFT of the length-``2n`` odd extension. Applying the
    transform twice returns ``n / 2`` times the input.
    """
    x = np.moveaxis(np.asarray(x, dtype=float), axis, -1)
    n = x.shape[-1] + 1
    _check_power_of_two(n)
    ext = np.zeros(x.shape[:-1] + (2 * n,))
    ext[..., 1:n] = x
    ext[..., n + 1 :] = -x[..., ::-1]
    out = -0.5 * np.fft.rfft(ext, axis=-1).imag[..., 1:n]
    return np.moveaxis(out, -1, axis)


def eigenvalues(grid: LevelGrid) -> np.ndarray:
    """Eigenvalues of the unscaled discrete Laplacian for every interior mode, shape ``(n-1,)*dim``."""
    n, h = grid.cells, grid.h
    k = np.arange(1, n)
    lam1 = (4.0 / h**2) * np.sin(k * np.pi * h / 2) ** 2
    lam = np.zeros((n - 1,) * grid.dim)
    for a in range(grid.dim):
        shape = [1] * grid.dim
        shape[a] = n - 1
        lam = lam + lam1.reshape(shape)
    return lam


def poisson_direct(dim: int, depth: int, f_samples) -> GridField:
    """Solve ``-Laplace_h u = f`` with zero Dirichlet data on the ``(2**depth + 1)**dim`` grid.

    Parameters
    ----------
    dim, depth
        Dimension and level count; the grid has ``n = 2**depth`` cells per axis.
    f_samples : GridField, ndarray or callable
        Unscaled ``f`` on the full grid (boundary values ignored), or ``f(x, y[, z])``.

    Returns
    -------
    GridField
        The exact solution of the discrete system, zero on the boundary.
    """
    grid = LevelGrid.for_depth(dim, depth, 0)
    if callable(f_samples):
        f_samples = GridField.sample(grid, f_samples)
    values = f_samples.values if isinstance(f_samples, GridField) else np.asarray(f_samples, float)
    if values.shape != grid.shape:
        raise ValueError(f"expected samples of shape {grid.shape}, got {values.shape}")
    n = grid.cells
    fhat = values[(slice(1, n),) * dim]
    for a in range(dim):
        fhat = sine_transform(fhat, axis=a)
    lam = eigenvalues(grid)
    assert np.all(lam > 0), "Dirichlet interior modes have positive eigenvalues"
    uhat = fhat / lam
    for a in range(dim):
        uhat = sine_transform(uhat, axis=a)
    u = GridField.zeros(grid, name="u")
    u.values[(slice(1, n),) * dim] = uhat * (2.0 / n) ** dim
    return u


def spectral_flops(dim: int, depth: int) -> float:
    """Operation count of :func:`poisson_direct`.

    Each 1D transform is a real FFT of length ``M = 2n`` at ``2.5 M log2 M``
    operations. The forward and the inverse pass each transform every line
    along every axis, and the division costs one operation per unknown.
    """
    n = 2**depth
    m = 2 * n
    lines = dim * (n - 1) ** (dim - 1)
    per_pass = lines * 2.5 * m * math.log2(m)
    return 2 * per_pass + (n - 1) ** dim
