"""Method-of-lines IBVP solver: implicit diffusion, explicit reaction/non-local term.

Dirichlet data on the truncation faces is taken from the grid's far-field
constants and held fixed in time.  Coefficients are evaluated at t = 0 and
assumed time-independent (all registry entries are).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import solve_banded
from scipy.sparse import csr_matrix, eye as sp_eye, kron as sp_kron, diags
from scipy.sparse.linalg import splu

from .errors import (
    SolverSingularError,
    StepDivergedError,
    UnstableTimestepError,
    UnsupportedFamilyError,
)
from .grid import Field, Grid, SpaceTimeField, convolve, discretize
from .kernels import kernel_norms
from .operator import OperatorSpec, apply_spatial_L

SCHEMES = ("backward-euler", "crank-nicolson")


@dataclass(frozen=True)
class SolverConfig:
    dt: float
    t_final: float
    scheme: str = "backward-euler"
    truncation_monitor: bool = False
    stability_check: bool = True
    record_residuals: bool = True
    backend: str = "fast"
    divergence_factor: float = 1e6

    def __post_init__(self):
        if self.dt <= 0 or self.t_final < self.dt:
            raise ValueError("need dt > 0 and t_final >= dt")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")


def _boundary_mask(grid: Grid) -> np.ndarray:
    mask = np.zeros(grid.shape, dtype=bool)
    if grid.dimension == 1:
        mask[0] = mask[-1] = True
    else:
        mask[0, :] = mask[-1, :] = True
        mask[:, 0] = mask[:, -1] = True
    return mask


def _boundary_values(grid: Grid) -> np.ndarray:
    vals = np.zeros(grid.shape)
    if grid.dimension == 1:
        (lo, hi) = grid.far_field[0]
        vals[0], vals[-1] = lo, hi
    else:
        (lo0, hi0), (lo1, hi1) = grid.far_field
        vals[:, 0] = lo1
        vals[:, -1] = hi1
        vals[0, :] = lo0   # axis-0 faces win at the corners
        vals[-1, :] = hi0
    return vals


class _Tridiag:
    """1D spatial operator a u_xx + b u_x with zeroed Dirichlet rows."""

    def __init__(self, op: OperatorSpec, grid: Grid):
        h = grid.spacing
        x = grid.axis()
        a = np.array([op.diffusion.a_matrix(float(xi), 0.0)[0, 0] for xi in x])
        b = np.array([op.diffusion.b_vector(float(xi), 0.0)[0] for xi in x])
        self.sub = a / h**2 - b / (2.0 * h)   # coefficient of u[i-1]
        self.diag = -2.0 * a / h**2
        self.sup = a / h**2 + b / (2.0 * h)   # coefficient of u[i+1]
        self.n = grid.npoints

    def matvec(self, u: np.ndarray) -> np.ndarray:
        out = np.zeros_like(u)
        out[1:-1] = (self.sub[1:-1] * u[:-2] + self.diag[1:-1] * u[1:-1]
                     + self.sup[1:-1] * u[2:])
        return out

    def solve_shifted(self, gamma: float, rhs: np.ndarray) -> np.ndarray:
        """Solve (I - gamma A) u = rhs with identity boundary rows."""
        band = np.zeros((3, self.n))
        band[0, 2:] = -gamma * self.sup[1:-1]
        band[0, 1] = 0.0
        band[1, :] = 1.0 - gamma * self.diag
        band[1, 0] = band[1, -1] = 1.0
        band[2, :-2] = -gamma * self.sub[1:-1]
        band[2, -2] = 0.0
        try:
            return solve_banded((1, 1), band, rhs)
        except Exception as exc:  # LinAlgError or ValueError from LAPACK
            raise SolverSingularError(str(exc)) from exc


class _Sparse2D:
    """2D spatial operator with zeroed Dirichlet rows (sparse LU per shift)."""

    def __init__(self, op: OperatorSpec, grid: Grid):
        n = grid.npoints
        h = grid.spacing
        e = np.ones(n)
        d2 = diags([e[:-1], -2.0 * e, e[:-1]], [-1, 0, 1]) / h**2
        d1 = diags([-e[:-1], np.zeros(n), e[:-1]], [-1, 0, 1]) / (2.0 * h)
        eye = sp_eye(n)
        pts = grid.points().reshape(-1, 2)
        amats = np.array([op.diffusion.a_matrix(p, 0.0) for p in pts])
        bvecs = np.array([op.diffusion.b_vector(p, 0.0) for p in pts])
        A = (diags(amats[:, 0, 0]) @ sp_kron(d2, eye)
             + diags(amats[:, 1, 1]) @ sp_kron(eye, d2)
             + diags(amats[:, 0, 1] + amats[:, 1, 0]) @ sp_kron(d1, d1)
             + diags(bvecs[:, 0]) @ sp_kron(d1, eye)
             + diags(bvecs[:, 1]) @ sp_kron(eye, d1))
        A = A.tolil()
        mask = _boundary_mask(grid).reshape(-1)
        A[mask, :] = 0.0
        self.A = csr_matrix(A)
        self.mask = mask
        self.shape = grid.shape
        self._lu = {}

    def matvec(self, u: np.ndarray) -> np.ndarray:
        return (self.A @ u.reshape(-1)).reshape(self.shape)

    def solve_shifted(self, gamma: float, rhs: np.ndarray) -> np.ndarray:
        if gamma not in self._lu:
            m = (sp_eye(self.A.shape[0]) - gamma * self.A).tocsc()
            try:
                self._lu[gamma] = splu(m)
            except Exception as exc:
                raise SolverSingularError(str(exc)) from exc
        return self._lu[gamma].solve(rhs.reshape(-1)).reshape(self.shape)


def _lipschitz_estimate(op: OperatorSpec, l1: float):
    if op.linear is not None:
        return abs(op.linear.C) + op.linear.D * l1
    r = op.reaction
    if r.k_u is None or r.k_v is None:
        return None
    return abs(r.k_u) + r.k_v * l1


def solve_ibvp(op: OperatorSpec, u0: Field, cfg: SolverConfig) -> SpaceTimeField:
    """Time-march P[u] = 0 with u = u0 at t=0 and far-field Dirichlet data."""
    grid = u0.grid
    norms = kernel_norms(op.kernel)
    if cfg.stability_check:
        lip = _lipschitz_estimate(op, norms.l1_norm)
        if lip is not None and cfg.dt * lip > 1.0:
            raise UnstableTimestepError(
                f"dt={cfg.dt:g} exceeds 1/Lip(f)={1.0 / lip:g} for the explicit term"
            )
    bmask = _boundary_mask(grid)
    bvals = _boundary_values(grid)
    if np.max(np.abs(u0.values[bmask] - bvals[bmask])) > 1e-8:
        raise ValueError("u0 is inconsistent with the far-field Dirichlet data")
    spatial = _Tridiag(op, grid) if grid.dimension == 1 else _Sparse2D(op, grid)
    pts = grid.points()
    nsteps = int(round(cfg.t_final / cfg.dt))
    times = np.arange(nsteps + 1) * cfg.dt
    u = u0.values.copy()
    u[bmask] = bvals[bmask]
    history = [u.copy()]
    residuals = []
    div_limit = cfg.divergence_factor * (1.0 + float(np.max(np.abs(u0.values))))

    def explicit_term(vals, t):
        ju = convolve(op.kernel, Field(grid, vals, max(t, 0.0)),
                      backend=cfg.backend, norms=norms).values
        return op.reaction_term(pts, t, vals, ju)

    e_prev = None
    e_curr = explicit_term(u, 0.0)
    for k in range(nsteps):
        t_now = times[k]
        t_new = times[k + 1]
        if cfg.scheme == "backward-euler":
            rhs = u + cfg.dt * e_curr
            rhs[bmask] = bvals[bmask]
            u_new = spatial.solve_shifted(cfg.dt, rhs)
        else:
            half = 0.5 * cfg.dt
            base = u + half * spatial.matvec(u)
            if e_prev is None:
                # trapezoidal predictor-corrector start
                rhs = base + cfg.dt * e_curr
                rhs[bmask] = bvals[bmask]
                u_star = spatial.solve_shifted(half, rhs)
                e_hat = 0.5 * (e_curr + explicit_term(u_star, t_new))
            else:
                e_hat = 1.5 * e_curr - 0.5 * e_prev
            rhs = base + cfg.dt * e_hat
            rhs[bmask] = bvals[bmask]
            u_new = spatial.solve_shifted(half, rhs)
        if not np.all(np.isfinite(u_new)) or np.max(np.abs(u_new)) > div_limit:
            raise StepDivergedError(
                f"solution diverged at t={t_new:g}", reached_time=float(t_now),
                partial=SpaceTimeField(grid, times[: k + 1], np.array(history)))
        history.append(u_new.copy())
        e_prev, e_curr = e_curr, explicit_term(u_new, t_new)
        if cfg.record_residuals:
            lu = apply_spatial_L(op.diffusion, Field(grid, u_new, t_new)).values
            defect = (u_new - u) / cfg.dt - (lu + e_curr)
            interior = ~bmask
            residuals.append(float(np.max(np.abs(defect[interior]))))
        u = u_new
    meta = {
        "dt": cfg.dt,
        "scheme": cfg.scheme,
        "residual_history": tuple(residuals),
        "residual_max": max(residuals) if residuals else None,
    }
    result = SpaceTimeField(grid, times, np.array(history), metadata=meta)
    if cfg.truncation_monitor:
        meta = dict(meta)
        meta["truncation_discrepancy"] = _truncation_discrepancy(op, u0, cfg, result)
        result = SpaceTimeField(grid, times, result.values, metadata=meta)
    return result


def _truncation_discrepancy(op: OperatorSpec, u0: Field, cfg: SolverConfig,
                            base: SpaceTimeField) -> float:
    """Companion solve on a doubled window; max gap on the inner half-window."""
    grid = u0.grid
    if grid.dimension != 1:
        raise UnsupportedFamilyError("truncation monitor supports n=1 only")
    n2 = 2 * grid.npoints - 1
    big = Grid(1, 2.0 * grid.halfwidth, n2, grid.far_field)
    pad = (n2 - grid.npoints) // 2
    (lo, hi) = grid.far_field[0]
    vals = np.concatenate([np.full(pad, lo), u0.values, np.full(pad, hi)])
    cfg2 = replace(cfg, truncation_monitor=False, record_residuals=False)
    sol2 = solve_ibvp(op, Field(big, vals, u0.time_label), cfg2)
    inner = np.abs(grid.axis()) <= 0.5 * grid.halfwidth
    gap = np.abs(base.values[:, inner] - sol2.values[:, pad:pad + grid.npoints][:, inner])
    return float(np.max(gap))


HEAT_REFERENCE_FAMILIES = ("gaussian", "plane-wave", "point-mass")


def exact_heat_reference(family: str, grid: Grid, diffusion: float, t: float,
                         sigma0: float = 1.0, amplitude: float = 1.0,
                         wavenumber: float = 1.0) -> Field:
    """Closed-form heat evolution used as a solver oracle."""
    pts = grid.points()
    n = grid.dimension
    r2 = pts * pts if n == 1 else np.sum(pts * pts, axis=-1)
    if family == "gaussian":
        var = sigma0**2 + 2.0 * diffusion * t
        vals = amplitude * (sigma0**2 / var) ** (n / 2.0) * np.exp(-0.5 * r2 / var)
    elif family == "plane-wave":
        x = pts if n == 1 else pts[..., 0]
        vals = amplitude * np.cos(wavenumber * x) * math.exp(-diffusion * wavenumber**2 * t)
    elif family == "point-mass":
        if t <= 0:
            raise ValueError("point-mass reference needs t > 0")
        vals = (4.0 * math.pi * diffusion * t) ** (-n / 2.0) \
            * np.exp(-r2 / (4.0 * diffusion * t))
    else:
        raise UnsupportedFamilyError(
            f"family must be one of {HEAT_REFERENCE_FAMILIES}")
    return Field(grid, vals, t)


@dataclass(frozen=True)
class ConvergenceRow:
    h: float
    dt: float
    sup_error: float
    observed_order: float | str  # 'EXACT' when all errors vanish


def convergence_study(make_solution, make_reference, levels) -> list:
    """Errors and fitted orders over refinement levels.

    make_solution(level) -> SpaceTimeField; make_reference(level) -> Field at
    the final time; levels is a list of (h, dt) pairs in refinement order.
    """
    rows = []
    errors = []
    for lvl, (h, dt) in enumerate(levels):
        sol = make_solution(lvl)
        ref = make_reference(lvl)
        err = float(np.max(np.abs(sol.final().values - ref.values)))
        errors.append(err)
        if lvl == 0:
            order = float("nan")
        elif errors[-2] == 0.0 and err == 0.0:
            order = "EXACT"
        elif err == 0.0:
            order = math.inf
        else:
            order = math.log2(errors[-2] / err)
        rows.append(ConvergenceRow(h, dt, err, order))
    if all(e == 0.0 for e in errors):
        rows = [ConvergenceRow(r.h, r.dt, r.sup_error, "EXACT") for r in rows]
    return rows
