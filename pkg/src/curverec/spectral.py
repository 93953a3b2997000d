"""Direct DFT solvers for the elliptic systems used in every solver iteration.

Two problem classes: the screened Laplacian  -a*lap(u) + b*u = c  for
scalar fields, and the screened grad-div system  -a*grad(div(v)) + b*v = c
for 2D vector fields. The spectral symbols are derived from the exact
difference stencils of :mod:`curverec.grid`, so solving and then applying
the discrete forward operator reproduces the right-hand side to roundoff.
"""

from __future__ import annotations

import numpy as np

from . import grid


def _validate_rhs(rhs: np.ndarray, a: float, b: float) -> None:
    if not np.all(np.isfinite(rhs)):
        raise ValueError("right-hand side contains non-finite values")
    if b <= 0:
        raise ValueError(f"mass weight b must be positive, got {b}")
    if a < 0:
        raise ValueError(f"diffusion weight a must be nonnegative, got {a}")


def laplacian_symbol(dims) -> np.ndarray:
    """Fourier symbol of grid.laplacian: sum over axes of 2cos(2*pi*k/n) - 2."""
    dims = grid.check_dims(dims)
    sym = np.zeros(dims)
    for ax, n in enumerate(dims):
        shape = [1] * len(dims)
        shape[ax] = n
        k = np.arange(n, dtype=float)
        sym = sym + (2.0 * np.cos(2.0 * np.pi * k / n) - 2.0).reshape(shape)
    return sym


def helmholtz_apply(u: np.ndarray, a: float, b: float) -> np.ndarray:
    """Forward operator -a*lap(u) + b*u with the grid module stencil."""
    return -a * grid.laplacian(u) + b * u


def solve_helmholtz(rhs: np.ndarray, a: float, b: float) -> np.ndarray:
    """Solve -a*lap(u) + b*u = rhs on the periodic grid by DFT division.

    The denominator b - a*symbol is bounded below by b > 0 because the
    Laplacian symbol is nonpositive, so every mode is well posed.
    """
    rhs = np.asarray(rhs, dtype=float)
    _validate_rhs(rhs, a, b)
    denom = b - a * laplacian_symbol(rhs.shape)
    return np.fft.ifftn(np.fft.fftn(rhs) / denom).real


def grad_div_apply(v: np.ndarray, a: float, b: float) -> np.ndarray:
    """Forward operator -a*grad(div(v)) + b*v, discretized one-sided.

    div is the backward-difference divergence and grad the forward
    difference, the composition whose symbol factorizes mode by mode.
    """
    if v.ndim != 3 or v.shape[-1] != 2:
        raise ValueError("grad_div_apply expects a 2D vector field")
    w = grid.diff_backward(v[..., 0], 0) + grid.diff_backward(v[..., 1], 1)
    c0 = -a * grid.diff_forward(w, 0) + b * v[..., 0]
    c1 = -a * grid.diff_forward(w, 1) + b * v[..., 1]
    return np.stack([c0, c1], axis=-1)


def solve_vector_helmholtz(rhs: np.ndarray, a: float, b: float) -> np.ndarray:
    """Solve -a*grad(div(v)) + b*v = rhs for a 2D vector field.

    Each Fourier mode gives a 2x2 complex system solved in closed form.
    The mode matrix is b*I minus a rank-one update with nonpositive
    trace, so its determinant is at least b**2 and never vanishes.
    """
    rhs = np.asarray(rhs, dtype=float)
    if rhs.ndim != 3 or rhs.shape[-1] != 2:
        raise ValueError("solve_vector_helmholtz expects a 2D vector field")
    _validate_rhs(rhs, a, b)
    m, n = rhs.shape[:2]
    ki = np.arange(m).reshape(m, 1)
    kj = np.arange(n).reshape(1, n)
    # one-sided difference symbols along each axis
    fwd_i = np.exp(2j * np.pi * ki / m) - 1.0
    bwd_i = 1.0 - np.exp(-2j * np.pi * ki / m)
    fwd_j = np.exp(2j * np.pi * kj / n) - 1.0
    bwd_j = 1.0 - np.exp(-2j * np.pi * kj / n)

    a11 = b - a * fwd_i * bwd_i
    a12 = -a * fwd_i * bwd_j
    a21 = -a * fwd_j * bwd_i
    a22 = b - a * fwd_j * bwd_j
    det = a11 * a22 - a12 * a21
    assert np.all(np.abs(det) > 0), "singular mode matrix (cannot happen for b>0)"

    c1 = np.fft.fft2(rhs[..., 0])
    c2 = np.fft.fft2(rhs[..., 1])
    v1 = (a22 * c1 - a12 * c2) / det
    v2 = (a11 * c2 - a21 * c1) / det
    return np.stack([np.fft.ifft2(v1).real, np.fft.ifft2(v2).real], axis=-1)
