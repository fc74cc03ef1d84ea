"""Uniform truncation of R^n, discrete fields, and the non-local convolution term.

Fields are extended beyond the truncation window by constant far-field values,
so bounded non-decaying solutions keep a consistent non-local term near the
window edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.signal import fftconvolve

from .errors import (
    DimMismatchError,
    NonFiniteSampleError,
    PadInsufficientError,
)
from .kernels import KernelSpec, effective_radius, eval_kernel, kernel_norms

PAD_TAIL_FRACTION = 1e-8
PAD_MASS_TOLERANCE = 1e-6


@dataclass(frozen=True)
class Grid:
    """Uniform grid on [-L, L]^n with constant far-field extension values.

    far_field holds one (low-side, high-side) pair per axis.
    """

    dimension: int
    halfwidth: float
    npoints: int
    far_field: tuple = ((0.0, 0.0),)

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise ValueError("dimension must be 1 or 2")
        if self.npoints < 8:
            raise ValueError("need at least 8 points per axis")
        if self.halfwidth <= 0:
            raise ValueError("halfwidth must be positive")
        if len(self.far_field) != self.dimension:
            raise ValueError("far_field needs one (lo, hi) pair per axis")
        for lo, hi in self.far_field:
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise ValueError("far_field values must be finite")

    @property
    def spacing(self) -> float:
        return 2.0 * self.halfwidth / (self.npoints - 1)

    def axis(self) -> np.ndarray:
        return np.linspace(-self.halfwidth, self.halfwidth, self.npoints)

    def points(self) -> np.ndarray:
        """n=1: (N,) coordinates; n=2: (N, N, 2) coordinate array."""
        x = self.axis()
        if self.dimension == 1:
            return x
        xx, yy = np.meshgrid(x, x, indexing="ij")
        return np.stack([xx, yy], axis=-1)

    @property
    def shape(self) -> tuple:
        return (self.npoints,) * self.dimension


def _as_readonly(values: np.ndarray) -> np.ndarray:
    out = np.array(values, dtype=float)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class Field:
    """One scalar function sampled on a grid at a single time level."""

    grid: Grid
    values: np.ndarray
    time_label: float = 0.0

    def __post_init__(self):
        vals = _as_readonly(self.values)
        if vals.shape != self.grid.shape:
            raise DimMismatchError(
                f"field shape {vals.shape} does not match grid {self.grid.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise NonFiniteSampleError("field contains NaN or Inf")
        if self.time_label < 0:
            raise ValueError("time_label must be >= 0")
        object.__setattr__(self, "values", vals)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def with_values(self, values, time_label=None) -> "Field":
        return Field(self.grid, values,
                     self.time_label if time_label is None else time_label)


@dataclass(frozen=True)
class SpaceTimeField:
    """Ordered sequence of fields at strictly increasing time levels."""

    grid: Grid
    times: np.ndarray
    values: np.ndarray  # shape (len(times),) + grid.shape
    metadata: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        times = _as_readonly(self.times)
        vals = _as_readonly(self.values)
        if times.ndim != 1 or len(times) < 1:
            raise ValueError("need at least one time level")
        if np.any(np.diff(times) <= 0):
            raise ValueError("time labels must be strictly increasing")
        if vals.shape != (len(times),) + self.grid.shape:
            raise DimMismatchError("values shape does not match times x grid")
        if not np.all(np.isfinite(vals)):
            raise NonFiniteSampleError("space-time field contains NaN or Inf")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.times)

    def field(self, k: int) -> Field:
        return Field(self.grid, self.values[k], float(self.times[k]))

    def final(self) -> Field:
        return self.field(len(self.times) - 1)


def discretize(grid: Grid, fn, t: float = 0.0) -> Field:
    """Sample a pointwise function fn(x, t) on the grid."""
    pts = grid.points()
    try:
        vals = np.asarray(fn(pts, t), dtype=float)
        if vals.shape != grid.shape:
            raise TypeError
    except (TypeError, ValueError):
        if grid.dimension == 1:
            vals = np.array([fn(float(x), t) for x in pts], dtype=float)
        else:
            vals = np.array([[fn(pts[i, j], t) for j in range(grid.npoints)]
                             for i in range(grid.npoints)], dtype=float)
    return Field(grid, vals, t)


def _pad_width(kernel: KernelSpec, grid: Grid, norms) -> int:
    radius = effective_radius(kernel, PAD_TAIL_FRACTION, norms)
    return int(math.ceil(radius / grid.spacing)) + 1


def _kernel_taps(kernel: KernelSpec, grid: Grid, pad: int) -> np.ndarray:
    h = grid.spacing
    offsets = np.arange(-pad, pad + 1) * h
    if grid.dimension == 1:
        return np.asarray(eval_kernel(kernel, offsets)) * h
    ox, oy = np.meshgrid(offsets, offsets, indexing="ij")
    return kernel.profile(np.sqrt(ox * ox + oy * oy)) * h * h


def _check_pad_mass(kernel: KernelSpec, grid: Grid, pad: int, norms) -> None:
    total = norms.l1_norm
    if total == 0.0:
        return
    sup = kernel.support_halfwidth()
    covered_radius = pad * grid.spacing
    if covered_radius >= sup:
        return
    from .kernels import _quad_partial  # partial-mass quadrature

    inside = _quad_partial(kernel, covered_radius, 0, 1e-10)
    if total - inside > PAD_MASS_TOLERANCE * total:
        raise PadInsufficientError(
            f"kernel mass outside pad: {total - inside:g} of {total:g}"
        )


def _extend(u: Field, pad: int) -> np.ndarray:
    g = u.grid
    if g.dimension == 1:
        lo, hi = g.far_field[0]
        return np.concatenate([np.full(pad, lo), u.values, np.full(pad, hi)])
    out = np.empty((g.npoints + 2 * pad,) * 2)
    (lo0, hi0), (lo1, hi1) = g.far_field
    out[pad:-pad, pad:-pad] = u.values
    out[:pad, :] = lo0
    out[-pad:, :] = hi0
    out[pad:-pad, :pad] = lo1
    out[pad:-pad, -pad:] = hi1
    return out


def convolve(kernel: KernelSpec, u: Field, backend: str = "fast",
             norms=None) -> Field:
    """Discrete non-local term Ju(x_i) = sum_j phi(x_i - y_j) u~(y_j) h^n.

    u~ extends u beyond the window by the grid's far-field constants.  The
    'direct' backend evaluates the kernel pairwise; 'fast' runs the identical
    extended sum through an FFT.
    """
    if kernel.dimension != u.grid.dimension:
        raise DimMismatchError("kernel and field dimensions differ")
    if backend not in ("direct", "fast"):
        raise ValueError(f"unknown backend {backend!r}")
    if norms is None:
        norms = kernel_norms(kernel)
    grid = u.grid
    pad = _pad_width(kernel, grid, norms)
    _check_pad_mass(kernel, grid, pad, norms)
    upad = _extend(u, pad)
    if backend == "fast":
        taps = _kernel_taps(kernel, grid, pad)
        out = fftconvolve(upad, taps, mode="valid")
    else:
        # the sum runs over the same |offset| <= pad stencil as the taps, so
        # the two backends evaluate the identical truncated quadrature
        h = grid.spacing
        npts = grid.npoints
        idx = np.arange(npts)[:, None] + pad - np.arange(npts + 2 * pad)[None, :]
        if grid.dimension == 1:
            x = grid.axis()
            ypad = np.concatenate([
                x[0] + np.arange(-pad, 0) * h, x, x[-1] + np.arange(1, pad + 1) * h,
            ])
            phi = np.asarray(eval_kernel(kernel, x[:, None] - ypad[None, :]))
            phi[np.abs(idx) > pad] = 0.0
            out = (phi @ upad) * h
        else:
            x = grid.axis()
            axpad = np.concatenate([
                x[0] + np.arange(-pad, 0) * h, x, x[-1] + np.arange(1, pad + 1) * h,
            ])
            out = np.empty(grid.shape)
            for i, xi in enumerate(x):
                dx2 = (xi - axpad) ** 2
                in_i = np.abs(np.arange(npts + 2 * pad) - (i + pad)) <= pad
                for j, xj in enumerate(x):
                    r = np.sqrt(dx2[:, None] + (xj - axpad[None, :]) ** 2)
                    phi = kernel.profile(r)
                    in_j = np.abs(np.arange(npts + 2 * pad) - (j + pad)) <= pad
                    phi *= np.outer(in_i, in_j)
                    out[i, j] = np.sum(phi * upad) * h * h
    return Field(grid, out, u.time_label)


@dataclass(frozen=True)
class BoundaryTrace:
    """Values of a space-time field on its parabolic boundary surrogate."""

    initial: Field
    lateral: dict  # face name -> array over time levels (n=1 scalars, n=2 rows)

    def min_value(self) -> float:
        m = float(np.min(self.initial.values))
        for trace in self.lateral.values():
            m = min(m, float(np.min(trace)))
        return m


def parabolic_boundary(u: SpaceTimeField) -> BoundaryTrace:
    """Initial slice plus the time series on the truncation faces."""
    if u.grid.dimension == 1:
        lateral = {
            "x_lo": u.values[:, 0].copy(),
            "x_hi": u.values[:, -1].copy(),
        }
    else:
        lateral = {
            "x_lo": u.values[:, 0, :].copy(),
            "x_hi": u.values[:, -1, :].copy(),
            "y_lo": u.values[:, :, 0].copy(),
            "y_hi": u.values[:, :, -1].copy(),
        }
    return BoundaryTrace(initial=u.field(0), lateral=lateral)


def field_to_csv(u: Field, path) -> None:
    g = u.grid
    if g.dimension == 1:
        data = np.column_stack([g.axis(), u.values])
        header = "x,value"
    else:
        pts = g.points().reshape(-1, 2)
        data = np.column_stack([pts, u.values.reshape(-1)])
        header = "x,y,value"
    np.savetxt(path, data, delimiter=",", header=header, comments="",
               fmt="%.12g")


def spacetime_to_csv(u: SpaceTimeField, directory) -> None:
    """One CSV per time level plus an index file."""
    import os

    os.makedirs(directory, exist_ok=True)
    lines = ["index,time,file"]
    for k in range(len(u)):
        name = f"level_{k:05d}.csv"
        field_to_csv(u.field(k), os.path.join(directory, name))
        lines.append(f"{k},{u.times[k]:.12g},{name}")
    with open(os.path.join(directory, "index.csv"), "w") as fh:
        fh.write("\n".join(lines) + "\n")
