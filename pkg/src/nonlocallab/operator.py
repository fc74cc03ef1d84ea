"""The integro-differential operator: discrete application and hypothesis audits.

P[u] = sum_ij a_ij d2u/dx_i dx_j + sum_i b_i du/dx_i + f(x, t, u, Ju) - du/dt

with the linear mode f = c(x,t) u + d(x,t) Ju as a special case.  The audits
are sampled numerical checks with explicit margins, never proofs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.stats import qmc

from .errors import (
    AsymmetricDiffusionError,
    DimMismatchError,
    NonFiniteReactionError,
    NonFiniteSampleError,
)
from .grid import Field, Grid, SpaceTimeField, convolve
from .kernels import KernelSpec, kernel_norms


# -- finite-difference stencils (second order, one-sided at the faces) ----

def diff1(values: np.ndarray, h: float, axis: int = 0) -> np.ndarray:
    v = np.moveaxis(values, axis, 0)
    out = np.empty_like(v)
    out[1:-1] = (v[2:] - v[:-2]) / (2.0 * h)
    out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
    out[-1] = (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * h)
    return np.moveaxis(out, 0, axis)


def diff2(values: np.ndarray, h: float, axis: int = 0) -> np.ndarray:
    v = np.moveaxis(values, axis, 0)
    out = np.empty_like(v)
    out[1:-1] = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / (h * h)
    out[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / (h * h)
    out[-1] = (2.0 * v[-1] - 5.0 * v[-2] + 4.0 * v[-3] - v[-4]) / (h * h)
    return np.moveaxis(out, 0, axis)


# -- coefficient / reaction descriptions ------------------------------------

def _constant_matrix(value, n):
    mat = np.atleast_2d(np.asarray(value, dtype=float) * np.eye(n)) \
        if np.ndim(value) == 0 else np.asarray(value, dtype=float)
    return mat


@dataclass(frozen=True)
class DiffusionCoefficients:
    """Diffusion matrix a(x, t) and drift b(x, t) with declared constants.

    a(x, t) returns an (n, n) symmetric matrix (a scalar is promoted to a
    multiple of the identity); b(x, t) returns an n-vector (scalar for n=1).
    Growth constants A, B bound the quadratic-growth regime; A_min / A_max
    bound the uniformly-parabolic regime.  All declared constants are
    optional claims checked by the audits, not enforced here.
    """

    a: object
    b: object
    dimension: int = 1
    A: float | None = None
    B: float | None = None
    A_min: float | None = None
    A_max: float | None = None

    def a_matrix(self, x, t) -> np.ndarray:
        return _constant_matrix(self.a(x, t), self.dimension)

    def b_vector(self, x, t) -> np.ndarray:
        return np.atleast_1d(np.asarray(self.b(x, t), dtype=float))

    @classmethod
    def constant(cls, diffusion: float, drift=0.0, dimension: int = 1,
                 **declared) -> "DiffusionCoefficients":
        drift_vec = np.full(dimension, drift, dtype=float) if np.ndim(drift) == 0 \
            else np.asarray(drift, dtype=float)
        declared.setdefault("A", float(diffusion))
        declared.setdefault("B", float(np.max(np.abs(drift_vec))))
        declared.setdefault("A_min", float(diffusion))
        declared.setdefault("A_max", float(diffusion))
        return cls(a=lambda x, t: diffusion, b=lambda x, t: drift_vec,
                   dimension=dimension, **declared)


@dataclass(frozen=True)
class ReactionSpec:
    """Reaction f(x, t, u, v) with v the non-local slot, on a declared box.

    f must be vectorized over numpy arrays of u and v.
    """

    f: object
    box: tuple = (0.0, 1.0, 0.0, 1.0)  # (u_lo, u_hi, v_lo, v_hi)
    k_u_upper: float | None = None
    k_u: float | None = None
    k_v: float | None = None
    monotone_in_v: bool | None = None

    def __call__(self, x, t, u, v):
        return self.f(x, t, u, v)


@dataclass(frozen=True)
class LinearCoefficients:
    """Linear mode c(x,t) u + d(x,t) Ju with declared bounds c <= C, 0 <= d <= D."""

    c: object
    d: object
    C: float = 0.0
    D: float = 0.0

    @classmethod
    def constant(cls, c: float, d: float) -> "LinearCoefficients":
        return cls(c=lambda x, t: c, d=lambda x, t: d, C=float(c), D=float(d))


@dataclass(frozen=True)
class OperatorSpec:
    diffusion: DiffusionCoefficients
    kernel: KernelSpec
    reaction: ReactionSpec | None = None
    linear: LinearCoefficients | None = None

    def __post_init__(self):
        if (self.reaction is None) == (self.linear is None):
            raise ValueError("exactly one of reaction / linear mode must be set")
        if self.kernel.dimension != self.diffusion.dimension:
            raise DimMismatchError("kernel and coefficient dimensions differ")

    @property
    def mode(self) -> str:
        return "linear" if self.linear is not None else "reaction"

    def reaction_term(self, pts, t, u, ju):
        if self.linear is not None:
            c = _eval_coeff(self.linear.c, pts, t, u.shape)
            d = _eval_coeff(self.linear.d, pts, t, u.shape)
            return c * u + d * ju
        vals = np.asarray(self.reaction.f(pts, t, u, ju), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise NonFiniteReactionError("reaction produced non-finite values")
        return vals


def _eval_coeff(fn, pts, t, shape):
    out = np.asarray(fn(pts, t), dtype=float)
    if out.shape != shape:
        out = np.broadcast_to(out, shape).copy()
    return out


def apply_spatial_L(coeffs: DiffusionCoefficients, u: Field) -> Field:
    """Second-order finite-difference application of the spatial part of L."""
    g = u.grid
    n = g.dimension
    h = g.spacing
    vals = u.values
    if not np.all(np.isfinite(vals)):
        raise NonFiniteSampleError("field contains non-finite values")
    pts = g.points()
    out = np.zeros_like(vals)
    if n == 1:
        a = np.array([coeffs.a_matrix(float(x), u.time_label)[0, 0] for x in pts])
        b = np.array([coeffs.b_vector(float(x), u.time_label)[0] for x in pts])
        out = a * diff2(vals, h) + b * diff1(vals, h)
    else:
        d1 = [diff1(vals, h, axis=i) for i in range(2)]
        d2 = [diff2(vals, h, axis=i) for i in range(2)]
        cross = diff1(d1[0], h, axis=1)
        flat = pts.reshape(-1, 2)
        a = np.array([coeffs.a_matrix(p, u.time_label) for p in flat])
        b = np.array([coeffs.b_vector(p, u.time_label) for p in flat])
        a = a.reshape(g.shape + (2, 2))
        b = b.reshape(g.shape + (2,))
        out = (a[..., 0, 0] * d2[0] + a[..., 1, 1] * d2[1]
               + (a[..., 0, 1] + a[..., 1, 0]) * cross
               + b[..., 0] * d1[0] + b[..., 1] * d1[1])
    return Field(g, out, u.time_label)


def apply_P_residual(op: OperatorSpec, u: SpaceTimeField,
                     backend: str = "fast") -> SpaceTimeField:
    """Residual P[u] at interior time levels (central time differences)."""
    if len(u) < 3:
        raise ValueError("need at least 3 time levels for interior residuals")
    norms = kernel_norms(op.kernel)
    pts = u.grid.points()
    residuals = []
    for k in range(1, len(u) - 1):
        fld = u.field(k)
        lu = apply_spatial_L(op.diffusion, fld).values
        ju = convolve(op.kernel, fld, backend=backend, norms=norms).values
        reac = op.reaction_term(pts, float(u.times[k]), fld.values, ju)
        ut = (u.values[k + 1] - u.values[k - 1]) / (u.times[k + 1] - u.times[k - 1])
        residuals.append(lu + reac - ut)
    return SpaceTimeField(u.grid, u.times[1:-1], np.array(residuals),
                          metadata={"derived_from": "residual"})


# -- hypothesis audits ------------------------------------------------------

def _unit_directions(n: int, count: int) -> np.ndarray:
    if n == 1:
        return np.array([[1.0], [-1.0]])
    angles = (np.arange(count) + 0.5) * (2.0 * math.pi / count)
    return np.column_stack([np.cos(angles), np.sin(angles)])


@dataclass(frozen=True)
class ParabolicityReport:
    rayleigh_min: float
    rayleigh_max: float
    growth_quotient_max: float  # max of eta.a(x,t)eta / ((1+|x|^2)|eta|^2)
    drift_quotient_max: float   # max of sum b_i x_i / (1 + |x|^2)
    quadratic_growth_ok: bool | None   # against declared A, B
    uniform_bounds_ok: bool | None     # against declared A_min, A_max
    margins: dict = dc_field(default_factory=dict)


def check_parabolicity_growth(coeffs: DiffusionCoefficients, grid: Grid,
                              direction_samples: int = 64,
                              times=(0.0,), sym_tol: float = 1e-12) -> ParabolicityReport:
    if grid.dimension != coeffs.dimension:
        raise DimMismatchError("grid/coefficient dimension mismatch")
    dirs = _unit_directions(grid.dimension, max(direction_samples, 64))
    pts = grid.points().reshape(-1, grid.dimension) if grid.dimension == 2 \
        else grid.points().reshape(-1, 1)
    # thin the grid: the audit samples, it does not enumerate
    stride = max(1, len(pts) // 256)
    pts = pts[::stride]
    r_min, r_max = math.inf, -math.inf
    g_max, d_max = -math.inf, -math.inf
    for t in times:
        for p in pts:
            x = float(p[0]) if coeffs.dimension == 1 else p
            a = coeffs.a_matrix(x, t)
            if np.max(np.abs(a - a.T)) > sym_tol:
                raise AsymmetricDiffusionError(
                    f"a(x, t) asymmetric at x={x}, t={t}"
                )
            b = coeffs.b_vector(x, t)
            quad = np.einsum("di,ij,dj->d", dirs, a, dirs)
            r_min = min(r_min, float(np.min(quad)))
            r_max = max(r_max, float(np.max(quad)))
            x2 = float(np.dot(p, p))
            g_max = max(g_max, float(np.max(quad)) / (1.0 + x2))
            d_max = max(d_max, float(np.dot(b, p)) / (1.0 + x2))
    margins = {}
    quad_ok = None
    if coeffs.A is not None and coeffs.B is not None:
        quad_ok = g_max <= coeffs.A + 1e-12 and d_max <= coeffs.B + 1e-12
        margins["quadratic_growth_a"] = coeffs.A - g_max
        margins["quadratic_growth_b"] = coeffs.B - d_max
    unif_ok = None
    if coeffs.A_min is not None and coeffs.A_max is not None:
        unif_ok = (r_min >= coeffs.A_min - 1e-12
                   and r_max <= coeffs.A_max + 1e-12)
        margins["uniform_lower"] = r_min - coeffs.A_min
        margins["uniform_upper"] = coeffs.A_max - r_max
    return ParabolicityReport(r_min, r_max, g_max, d_max, quad_ok, unif_ok, margins)


@dataclass(frozen=True)
class ReactionConstantsReport:
    k_u_upper: float        # sup of signed forward quotients in u
    k_u: float              # sup of |quotient| in u
    k_v: float              # sup of |quotient| in v
    monotone_in_v: bool
    monotone_margin: float  # min forward difference in v
    monotone_witness: tuple | None
    matches_declared: bool | None


MONOTONE_TOL = 1e-10


def estimate_reaction_constants(reaction: ReactionSpec, grid: Grid,
                                t_final: float = 1.0, samples: int = 10000,
                                seed: int = 0) -> ReactionConstantsReport:
    """Sampled difference-quotient audit of the declared reaction constants.

    Deterministic low-discrepancy sampling; difference quotients only (the
    reaction need not be differentiable).
    """
    u_lo, u_hi, v_lo, v_hi = reaction.box
    if not (u_hi > u_lo and v_hi > v_lo):
        raise ValueError("reaction box must be non-degenerate")
    n = grid.dimension
    sampler = qmc.Halton(d=n + 1 + 4, scramble=True, seed=seed)
    raw = sampler.random(max(samples, 10000))
    xs = (raw[:, :n] * 2.0 - 1.0) * grid.halfwidth
    ts = raw[:, n] * t_final
    u1 = u_lo + raw[:, n + 1] * (u_hi - u_lo)
    u2 = u_lo + raw[:, n + 2] * (u_hi - u_lo)
    v1 = v_lo + raw[:, n + 3] * (v_hi - v_lo)
    v2 = v_lo + raw[:, n + 4] * (v_hi - v_lo)
    ua, ub = np.maximum(u1, u2), np.minimum(u1, u2)
    va, vb = np.maximum(v1, v2), np.minimum(v1, v2)
    pts = xs[:, 0] if n == 1 else xs

    def f(u, v):
        out = np.asarray(reaction.f(pts, ts, u, v), dtype=float)
        if not np.all(np.isfinite(out)):
            raise NonFiniteReactionError("reaction non-finite inside its box")
        return out

    du = ua - ub
    mask_u = du > 1e-12 * (1.0 + np.abs(ua))
    qu = (f(ua, v1) - f(ub, v1))[mask_u] / du[mask_u]
    dv = va - vb
    mask_v = dv > 1e-12 * (1.0 + np.abs(va))
    fwd_v = (f(u1, va) - f(u1, vb))[mask_v]
    qv = fwd_v / dv[mask_v]
    k_u_upper = float(np.max(qu)) if qu.size else 0.0
    k_u = float(np.max(np.abs(qu))) if qu.size else 0.0
    k_v = float(np.max(np.abs(qv))) if qv.size else 0.0
    margin = float(np.min(fwd_v)) if fwd_v.size else 0.0
    scale = float(np.max(np.abs(f(u1, v1)))) + 1.0
    monotone = margin >= -MONOTONE_TOL * scale
    witness = None
    if not monotone:
        i = int(np.argmin(fwd_v))
        idx = np.nonzero(mask_v)[0][i]
        witness = (float(u1[idx]), float(vb[idx]), float(va[idx]), margin)
    matches = None
    if reaction.k_u_upper is not None or reaction.k_v is not None \
            or reaction.monotone_in_v is not None:
        matches = True
        if reaction.k_u_upper is not None and k_u_upper > reaction.k_u_upper + 1e-8:
            matches = False
        if reaction.k_u is not None and k_u > reaction.k_u + 1e-8:
            matches = False
        if reaction.k_v is not None and k_v > reaction.k_v + 1e-8:
            matches = False
        if reaction.monotone_in_v is not None and monotone != reaction.monotone_in_v:
            matches = False
    return ReactionConstantsReport(k_u_upper, k_u, k_v, monotone, margin,
                                   witness, matches)


DENOM_REL_THRESHOLD = 1e-14


def factorize_difference(reaction: ReactionSpec, ubar: Field, jubar: Field,
                         ulow: Field, julow: Field) -> tuple[Field, Field]:
    """Difference-quotient fields (c, d) with

    f(x,t,ubar,Jubar) - f(x,t,ulow,Julow) = c (ubar - ulow) + d (Jubar - Julow)

    pointwise.  The quotient is taken only where the denominator differs
    (relative threshold), zero otherwise.
    """
    for other in (jubar, ulow, julow):
        if other.grid is not ubar.grid and other.grid != ubar.grid:
            raise DimMismatchError("all four fields must share one grid")
    g = ubar.grid
    pts = g.points()
    t = ubar.time_label
    ub, jb = ubar.values, jubar.values
    ul, jl = ulow.values, julow.values
    scale_u = max(np.max(np.abs(ub)), np.max(np.abs(ul)), 1.0)
    scale_j = max(np.max(np.abs(jb)), np.max(np.abs(jl)), 1.0)
    du = ub - ul
    dj = jb - jl
    f = reaction.f
    num_c = np.asarray(f(pts, t, ub, jb), dtype=float) \
        - np.asarray(f(pts, t, ul, jb), dtype=float)
    num_d = np.asarray(f(pts, t, ul, jb), dtype=float) \
        - np.asarray(f(pts, t, ul, jl), dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        c = np.where(np.abs(du) > DENOM_REL_THRESHOLD * scale_u, num_c / du, 0.0)
        d = np.where(np.abs(dj) > DENOM_REL_THRESHOLD * scale_j, num_d / dj, 0.0)
    c = np.nan_to_num(c, nan=0.0, posinf=0.0, neginf=0.0)
    d = np.nan_to_num(d, nan=0.0, posinf=0.0, neginf=0.0)
    return Field(g, c, t), Field(g, d, t)


# -- built-in registry -------------------------------------------------------

def _registry_entries():
    def heat(D=1.0, dimension=1):
        coeffs = DiffusionCoefficients.constant(D, 0.0, dimension)
        reaction = ReactionSpec(f=lambda x, t, u, v: np.zeros_like(np.asarray(u, dtype=float)),
                                k_u_upper=0.0, k_u=0.0, k_v=0.0, monotone_in_v=True)
        return coeffs, reaction

    def drifted_heat(D=1.0, drift=1.0, dimension=1):
        coeffs = DiffusionCoefficients.constant(D, drift, dimension)
        _, reaction = heat(D, dimension)
        return coeffs, reaction

    def unbounded_a(D=1.0, dimension=1):
        def a(x, t):
            x2 = float(np.dot(np.atleast_1d(x), np.atleast_1d(x)))
            return D * (1.0 + x2)
        coeffs = DiffusionCoefficients(a=a, b=lambda x, t: np.zeros(dimension),
                                       dimension=dimension, A=D, B=0.0)
        _, reaction = heat(D, dimension)
        return coeffs, reaction

    def fkpp_nonlocal(D=1.0, dimension=1, u_max=2.0):
        coeffs = DiffusionCoefficients.constant(D, 0.0, dimension)
        reaction = ReactionSpec(f=lambda x, t, u, v: u * (1.0 - v),
                                box=(0.0, u_max, 0.0, u_max),
                                k_u_upper=1.0, k_u=1.0, k_v=u_max,
                                monotone_in_v=False)
        return coeffs, reaction

    def fkpp_clipped(D=1.0, dimension=1):
        coeffs = DiffusionCoefficients.constant(D, 0.0, dimension)
        reaction = ReactionSpec(f=lambda x, t, u, v: np.maximum(v * (1.0 - u), 0.0),
                                box=(0.0, 1.0, 0.0, 1.0),
                                k_u_upper=1.0, k_u=1.0, k_v=1.0,
                                monotone_in_v=True)
        return coeffs, reaction

    def fkpp_unclipped(D=1.0, dimension=1):
        coeffs = DiffusionCoefficients.constant(D, 0.0, dimension)
        reaction = ReactionSpec(f=lambda x, t, u, v: v * (1.0 - u),
                                box=(0.0, 1.0, 0.0, 1.0),
                                k_u_upper=1.0, k_u=1.0, k_v=1.0,
                                monotone_in_v=True)
        return coeffs, reaction

    def logistic_local(D=1.0, dimension=1):
        coeffs = DiffusionCoefficients.constant(D, 0.0, dimension)
        reaction = ReactionSpec(f=lambda x, t, u, v: u * (1.0 - u),
                                box=(0.0, 1.0, 0.0, 1.0),
                                k_u_upper=1.0, k_u=1.0, k_v=0.0,
                                monotone_in_v=True)
        return coeffs, reaction

    return {
        "heat": heat,
        "drifted-heat": drifted_heat,
        "unbounded-a": unbounded_a,
        "fkpp-nonlocal": fkpp_nonlocal,
        "fkpp-clipped": fkpp_clipped,
        "fkpp-unclipped": fkpp_unclipped,
        "logistic-local": logistic_local,
    }


_REGISTRY = _registry_entries()


def registry_names() -> tuple:
    return tuple(sorted(_REGISTRY)) + ("linear",)


def make_operator(name: str, kernel: KernelSpec, **params) -> OperatorSpec:
    """Build an OperatorSpec from the named registry entry.

    'linear' takes c and d (constants) plus D (diffusion) and optional drift.
    """
    if name == "linear":
        D_diff = params.pop("diffusion", 1.0)
        drift = params.pop("drift", 0.0)
        c = params.pop("c", 0.0)
        d = params.pop("d", 0.0)
        dimension = params.pop("dimension", kernel.dimension)
        if params:
            raise ValueError(f"unknown linear parameters: {sorted(params)}")
        coeffs = DiffusionCoefficients.constant(D_diff, drift, dimension)
        return OperatorSpec(diffusion=coeffs, kernel=kernel,
                            linear=LinearCoefficients.constant(c, d))
    if name not in _REGISTRY:
        raise ValueError(f"unknown operator {name!r}; have {registry_names()}")
    coeffs, reaction = _REGISTRY[name](**params)
    return OperatorSpec(diffusion=coeffs, kernel=kernel, reaction=reaction)
