"""Uniform periodic Cartesian grids and finite-difference operators.

Fields are plain numpy arrays with one axis per spatial dimension (2D or
3D) and unit grid spacing. Scalar fields have shape ``dims``; vector
fields carry one extra trailing axis holding the components. All
difference operators wrap periodically, matching a domain that is a
discrete torus; callers are expected to keep interfaces away from the
boundary.
"""

from __future__ import annotations

import numpy as np

MIN_DIM = 4


def check_dims(dims) -> tuple[int, ...]:
    """Validate a grid shape: 2 or 3 axes, every extent >= MIN_DIM."""
    dims = tuple(int(d) for d in dims)
    if len(dims) not in (2, 3):
        raise ValueError(f"grid must be 2D or 3D, got {len(dims)} axes")
    if any(d < MIN_DIM for d in dims):
        raise ValueError(f"every grid extent must be >= {MIN_DIM}, got {dims}")
    return dims


def node_coords(dims) -> list[np.ndarray]:
    """Per-axis node coordinate arrays (0, 1, ..., n-1), ready to broadcast."""
    dims = check_dims(dims)
    coords = []
    for ax, n in enumerate(dims):
        shape = [1] * len(dims)
        shape[ax] = n
        coords.append(np.arange(n, dtype=float).reshape(shape))
    return coords


def _check_axis(u: np.ndarray, axis: int) -> None:
    if not 0 <= axis < u.ndim:
        raise ValueError(f"axis {axis} out of range for a {u.ndim}D field")


def diff_forward(u: np.ndarray, axis: int) -> np.ndarray:
    """Forward difference u(next) - u(here), wrapping at the last index."""
    _check_axis(u, axis)
    return np.roll(u, -1, axis=axis) - u


def diff_backward(u: np.ndarray, axis: int) -> np.ndarray:
    """Backward difference u(here) - u(previous), wrapping at the first index."""
    _check_axis(u, axis)
    return u - np.roll(u, 1, axis=axis)


def gradient(u: np.ndarray) -> np.ndarray:
    """Central gradient: per-axis average of forward and backward differences.

    Returns a vector field with one component per axis in the trailing
    dimension.
    """
    comps = [0.5 * (np.roll(u, -1, axis=ax) - np.roll(u, 1, axis=ax))
             for ax in range(u.ndim)]
    return np.stack(comps, axis=-1)


def divergence(v: np.ndarray) -> np.ndarray:
    """Central divergence of a vector field (components on the last axis)."""
    ndim = v.shape[-1]
    if v.ndim != ndim + 1:
        raise ValueError(f"vector field shape {v.shape} inconsistent")
    out = np.zeros(v.shape[:-1])
    for ax in range(ndim):
        comp = v[..., ax]
        out += 0.5 * (np.roll(comp, -1, axis=ax) - np.roll(comp, 1, axis=ax))
    return out


def laplacian(u: np.ndarray) -> np.ndarray:
    """Periodic 5-point (2D) / 7-point (3D) Laplacian."""
    out = -2.0 * u.ndim * u
    for ax in range(u.ndim):
        out += np.roll(u, -1, axis=ax) + np.roll(u, 1, axis=ax)
    return out


def magnitude(v: np.ndarray) -> np.ndarray:
    """Euclidean norm of a vector field, per node."""
    return np.sqrt(np.sum(v * v, axis=-1))


def write_field(path, u: np.ndarray) -> None:
    """Write a scalar field as text: 'dims: M N [P]' then row-major rows."""
    u = np.asarray(u, dtype=float)
    dims = check_dims(u.shape)
    with open(path, "w") as fh:
        fh.write("dims: " + " ".join(str(d) for d in dims) + "\n")
        rows = u.reshape(-1, dims[-1])
        for row in rows:
            fh.write(" ".join(repr(float(x)) for x in row) + "\n")


def read_field(path) -> np.ndarray:
    """Read a scalar field written by write_field."""
    with open(path) as fh:
        header = fh.readline().strip()
        if not header.startswith("dims:"):
            raise ValueError(f"bad field header: {header!r}")
        dims = check_dims(int(t) for t in header[len("dims:"):].split())
        values = np.loadtxt(fh, dtype=float, ndmin=2)
    expected_rows = int(np.prod(dims[:-1]))
    if values.shape != (expected_rows, dims[-1]):
        raise ValueError(f"field body {values.shape} does not match dims {dims}")
    return values.reshape(dims)
