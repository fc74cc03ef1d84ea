"""Machine checks of the minimum and comparison principles.

Every check audits the hypotheses numerically (sampled, with explicit
margins) and then tests the conclusion.  A violated conclusion is meaningful
only when some hypothesis fails (counterexample mode); with all hypotheses
passing it flags an internal inconsistency of the pipeline itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import integrate

from .errors import (
    BoundViolatedError,
    NoExceedanceError,
    NuInsufficientError,
)
from .grid import Field, Grid, SpaceTimeField, convolve, discretize, parabolic_boundary
from .kernels import (
    KernelSpec,
    classify_kernel,
    effective_radius,
    eval_kernel,
    jquotient_field,
    kernel_norms,
)
from .operator import (
    OperatorSpec,
    apply_P_residual,
    check_parabolicity_growth,
    estimate_reaction_constants,
    make_operator,
)
from .profiles import front, front_value_integral
from .solver import SolverConfig, solve_ibvp


@dataclass(frozen=True)
class HypothesisItem:
    cond_id: str
    description: str
    passed: bool
    margin: float
    witness: tuple | None = None


@dataclass(frozen=True)
class HypothesisReport:
    items: tuple

    @property
    def all_pass(self) -> bool:
        return all(item.passed for item in self.items)

    def item(self, cond_id: str) -> HypothesisItem:
        for it in self.items:
            if it.cond_id == cond_id:
                return it
        raise KeyError(cond_id)


HOLDS = "HOLDS"
VIOLATED = "VIOLATED"
THEOREM_APPLIES = "THEOREM_APPLIES"
HYPOTHESES_FAIL = "HYPOTHESES_FAIL"


@dataclass(frozen=True)
class ComparisonVerdict:
    hypotheses: HypothesisReport
    conclusion: str            # HOLDS or VIOLATED
    conclusion_margin: float   # >= 0 distance from violation when HOLDS
    witness: tuple | None      # (x, t, gap) when VIOLATED
    applicability: str         # THEOREM_APPLIES or HYPOTHESES_FAIL

    @property
    def internal_inconsistency(self) -> bool:
        return self.conclusion == VIOLATED and self.applicability == THEOREM_APPLIES


def _residual_tolerance(u: SpaceTimeField, tol: float) -> float:
    """Discrete solutions satisfy the operator only up to the scheme defect."""
    est = u.metadata.get("residual_max")
    dt = u.metadata.get("dt")
    scale = 1.0 + float(np.max(np.abs(u.values)))
    base = 1e-6 * scale
    if est is not None:
        # central time differences see a larger O(dt) defect than the
        # scheme's own forward-difference residual
        base = max(base, 10.0 * est)
    if dt is not None:
        base = max(base, dt * scale)
    return max(base, tol)


def _sample_linear_coeffs(op: OperatorSpec, grid: Grid, times) -> tuple:
    pts = grid.points()
    cs, ds = [], []
    for t in times:
        c = np.broadcast_to(np.asarray(op.linear.c(pts, t), dtype=float), grid.shape)
        d = np.broadcast_to(np.asarray(op.linear.d(pts, t), dtype=float), grid.shape)
        cs.append(c)
        ds.append(d)
    return np.array(cs), np.array(ds)


def verify_weak_minimum(op: OperatorSpec, u: SpaceTimeField,
                        tol: float = 1e-8,
                        residual_tol: float | None = None) -> ComparisonVerdict:
    """Hypothesis audit + conclusion check of the weak minimum principle."""
    if op.linear is None:
        raise ValueError("weak minimum check requires the linear mode (c, d)")
    grid = u.grid
    if residual_tol is None:
        residual_tol = _residual_tolerance(u, tol)
    items = []

    res = apply_P_residual(op, u)
    res_max = float(np.max(res.values))
    items.append(HypothesisItem(
        "residual_nonpositive", "P[u] <= 0 in the interior",
        res_max <= residual_tol, residual_tol - res_max))

    tr = parabolic_boundary(u)
    bmin = tr.min_value()
    items.append(HypothesisItem(
        "boundary_nonnegative", "u >= 0 on the parabolic boundary",
        bmin >= -tol, bmin + tol))

    t_samples = (float(u.times[0]), float(u.times[len(u) // 2]), float(u.times[-1]))
    cvals, dvals = _sample_linear_coeffs(op, grid, t_samples)
    c_max = float(np.max(cvals))
    items.append(HypothesisItem(
        "c_bounded_above", f"c <= C = {op.linear.C:g}",
        c_max <= op.linear.C + 1e-12, op.linear.C - c_max))
    d_min, d_max = float(np.min(dvals)), float(np.max(dvals))
    items.append(HypothesisItem(
        "d_in_range", f"0 <= d <= D = {op.linear.D:g}",
        d_min >= -1e-12 and d_max <= op.linear.D + 1e-12,
        min(d_min, op.linear.D - d_max)))

    moments = kernel_norms(op.kernel)
    items.append(HypothesisItem(
        "second_moment_finite", "kernel second moment summable",
        moments.second_moment_finite,
        moments.second_moment if moments.second_moment_finite else -math.inf))

    par = check_parabolicity_growth(op.diffusion, grid)
    growth_ok = par.quadratic_growth_ok
    if growth_ok is None:
        growth_ok = False
    margin = min(par.margins.get("quadratic_growth_a", -math.inf),
                 par.margins.get("quadratic_growth_b", -math.inf))
    items.append(HypothesisItem(
        "coefficient_growth", "quadratic growth bounds on a and b",
        bool(growth_ok), margin))

    report = HypothesisReport(tuple(items))
    u_min = float(np.min(u.values))
    if u_min >= -tol:
        return ComparisonVerdict(report, HOLDS, u_min + tol, None,
                                 THEOREM_APPLIES if report.all_pass else HYPOTHESES_FAIL)
    k, flat = divmod(int(np.argmin(u.values)), int(np.prod(grid.shape)))
    if grid.dimension == 1:
        wx = float(grid.axis()[flat])
    else:
        idx = np.unravel_index(flat, grid.shape)
        wx = tuple(float(grid.axis()[i]) for i in idx)
    witness = (wx, float(u.times[k]), -u_min)
    return ComparisonVerdict(report, VIOLATED, u_min + tol, witness,
                             THEOREM_APPLIES if report.all_pass else HYPOTHESES_FAIL)


@dataclass(frozen=True)
class StrongMinimumVerdict:
    weak: ComparisonVerdict
    kind: str            # 'STRICTLY_POSITIVE' or 'IDENTICALLY_ZERO'
    inner_min: float
    probe_time: float
    passed: bool


def strong_minimum_check(op: OperatorSpec, u: SpaceTimeField, t_probe: float,
                         inner_fraction: float = 0.5, tol: float = 1e-8,
                         tol_strict: float = 0.0) -> StrongMinimumVerdict:
    """Either u vanishes identically or it is strictly positive inside.

    The probe is restricted to the inner part of the window; the truncation
    faces are artificial boundaries.
    """
    weak = verify_weak_minimum(op, u, tol=tol)
    if not weak.hypotheses.all_pass:
        raise ValueError("strong minimum probe requires the weak hypotheses to pass")
    if t_probe <= 0:
        raise ValueError("probe time must be interior (t > 0)")
    k = int(np.argmin(np.abs(u.times - t_probe)))
    k = max(k, 1)
    grid = u.grid
    if float(np.max(np.abs(u.values[0]))) <= tol:
        sup = float(np.max(np.abs(u.values)))
        return StrongMinimumVerdict(weak, "IDENTICALLY_ZERO", sup,
                                    float(u.times[k]), sup <= tol)
    if grid.dimension == 1:
        inner = np.abs(grid.axis()) <= inner_fraction * grid.halfwidth
        inner_min = float(np.min(u.values[k][inner]))
    else:
        ax = np.abs(grid.axis()) <= inner_fraction * grid.halfwidth
        inner_min = float(np.min(u.values[k][np.ix_(ax, ax)]))
    return StrongMinimumVerdict(weak, "STRICTLY_POSITIVE", inner_min,
                                float(u.times[k]), inner_min > tol_strict)


@dataclass(frozen=True)
class AuxiliaryTransform:
    nu: float
    nu_formulaic: bool
    theta: Field
    bbar: np.ndarray          # shape grid.shape + (n,)
    cbar: Field
    jh_quotient: Field        # theta(x) h^n sum phi(x-y)/theta(y)
    transformed_constant_max: float  # max of cbar + d * jh (must be < 0)


def formulaic_nu(A: float, B: float, C: float, D: float, n: int,
                 l1: float, second_moment: float) -> float:
    """Rate making the transformed zero-order coefficient strictly negative."""
    return C + 2.0 * B + 2.0 * n * A + 3.0 * D * (l1 + second_moment) + 1.0


def auxiliary_transform(op: OperatorSpec, grid: Grid,
                        max_doublings: int = 40) -> AuxiliaryTransform:
    """Weight transform fields and the discrete negativity check on constants."""
    if op.linear is None:
        raise ValueError("auxiliary transform requires the linear mode")
    coeffs = op.diffusion
    if coeffs.A is None or coeffs.B is None:
        raise ValueError("growth constants A and B must be declared")
    n = grid.dimension
    moments = kernel_norms(op.kernel)
    if not moments.second_moment_finite:
        raise NuInsufficientError("kernel second moment is not summable")
    nu = formulaic_nu(coeffs.A, coeffs.B, op.linear.C, op.linear.D, n,
                      moments.l1_norm, moments.second_moment)
    pts = grid.points()
    flat = pts.reshape(-1, n) if n == 2 else pts.reshape(-1, 1)
    x2 = np.sum(flat * flat, axis=1)
    theta = (1.0 / (x2 + 1.0)).reshape(grid.shape)
    a = np.array([coeffs.a_matrix(float(p[0]) if n == 1 else p, 0.0) for p in flat])
    b = np.array([coeffs.b_vector(float(p[0]) if n == 1 else p, 0.0) for p in flat])
    theta_flat = theta.reshape(-1)
    bbar = b + 2.0 * np.einsum("pj,pij->pi", flat, a + np.transpose(a, (0, 2, 1))) \
        * theta_flat[:, None]
    c_field = np.broadcast_to(np.asarray(op.linear.c(pts, 0.0), dtype=float),
                              grid.shape).reshape(-1)
    d_field = np.broadcast_to(np.asarray(op.linear.d(pts, 0.0), dtype=float),
                              grid.shape).reshape(-1)
    trace_a = np.einsum("pii->p", a)
    drift_dot = np.einsum("pi,pi->p", b, flat)
    jh = jquotient_field(op.kernel, grid).reshape(-1)

    def cbar_for(nu_val):
        return c_field + 2.0 * drift_dot * theta_flat \
            + 2.0 * trace_a * theta_flat - nu_val

    formulaic = True
    for _ in range(max_doublings + 1):
        cbar = cbar_for(nu)
        trans_max = float(np.max(cbar + d_field * jh))
        if trans_max < 0.0:
            break
        formulaic = False
        nu *= 2.0
    else:
        raise NuInsufficientError(
            "transformed constant test stayed non-negative", max_value=trans_max)
    return AuxiliaryTransform(
        nu=nu, nu_formulaic=formulaic,
        theta=Field(grid, theta),
        bbar=bbar.reshape(grid.shape + (n,)),
        cbar=Field(grid, cbar.reshape(grid.shape)),
        jh_quotient=Field(grid, jh.reshape(grid.shape)),
        transformed_constant_max=trans_max,
    )


REGIME_MOMENT = "moment-kernel"       # finite second moment, growth coefficients
REGIME_INTEGRABLE = "integrable-kernel"  # uniformly parabolic, L1 kernel only


def _ju_extrema(kernel: KernelSpec, u: SpaceTimeField, norms) -> tuple:
    lo, hi = math.inf, -math.inf
    for k in range(len(u)):
        ju = convolve(kernel, u.field(k), norms=norms).values
        lo = min(lo, float(np.min(ju)))
        hi = max(hi, float(np.max(ju)))
    return lo, hi


def verify_comparison(op: OperatorSpec, u_low: SpaceTimeField,
                      u_up: SpaceTimeField, regime: str = REGIME_MOMENT,
                      tol: float = 1e-8,
                      residual_tol: float | None = None) -> ComparisonVerdict:
    """Audit the comparison-principle hypotheses and check u_low <= u_up."""
    if op.reaction is None:
        raise ValueError("comparison check requires the reaction mode")
    if regime not in (REGIME_MOMENT, REGIME_INTEGRABLE):
        raise ValueError(f"unknown regime {regime!r}")
    if u_low.grid != u_up.grid:
        raise ValueError("both solutions must live on one grid")
    if len(u_low) != len(u_up) or np.max(np.abs(u_low.times - u_up.times)) > 0:
        raise ValueError("both solutions must share time levels")
    grid = u_low.grid
    norms = kernel_norms(op.kernel)
    if residual_tol is None:
        residual_tol = max(_residual_tolerance(u_low, tol),
                           _residual_tolerance(u_up, tol))
    # the box K: grid inf/sup plus far-field values (grid extrema only
    # approximate the exact inf/sup over the closure)
    far = [v for pair in grid.far_field for v in pair]
    u_lo = min(float(np.min(u_low.values)), float(np.min(u_up.values)), *far)
    u_hi = max(float(np.max(u_low.values)), float(np.max(u_up.values)), *far)
    j_lo_1, j_hi_1 = _ju_extrema(op.kernel, u_low, norms)
    j_lo_2, j_hi_2 = _ju_extrema(op.kernel, u_up, norms)
    box = (u_lo, u_hi + 1e-12, min(j_lo_1, j_lo_2), max(j_hi_1, j_hi_2) + 1e-12)
    reaction = replace(op.reaction, box=box)

    items = []
    par = check_parabolicity_growth(op.diffusion, grid)
    if regime == REGIME_MOMENT:
        ok = bool(par.quadratic_growth_ok) if par.quadratic_growth_ok is not None else False
        items.append(HypothesisItem(
            "coefficient_growth", "quadratic growth bounds on a and b", ok,
            min(par.margins.get("quadratic_growth_a", -math.inf),
                par.margins.get("quadratic_growth_b", -math.inf))))
        items.append(HypothesisItem(
            "second_moment_finite", "kernel second moment summable",
            norms.second_moment_finite,
            norms.second_moment if norms.second_moment_finite else -math.inf))
    else:
        ok = bool(par.uniform_bounds_ok) if par.uniform_bounds_ok is not None else False
        items.append(HypothesisItem(
            "uniform_parabolicity", "A_min <= Rayleigh quotient <= A_max", ok,
            min(par.margins.get("uniform_lower", -math.inf),
                par.margins.get("uniform_upper", -math.inf))))
        items.append(HypothesisItem(
            "kernel_integrable", "phi in L1 and phi >= 0",
            math.isfinite(norms.l1_norm), norms.l1_norm))

    t_final = float(u_low.times[-1])
    audit = estimate_reaction_constants(reaction, grid, t_final=max(t_final, 1e-6))
    if regime == REGIME_MOMENT:
        items.append(HypothesisItem(
            "upper_lipschitz_u", "upper Lipschitz quotient in u bounded",
            math.isfinite(audit.k_u_upper), audit.k_u_upper))
    else:
        items.append(HypothesisItem(
            "lipschitz_u", "Lipschitz quotient in u bounded",
            math.isfinite(audit.k_u), audit.k_u))
    items.append(HypothesisItem(
        "lipschitz_v", "Lipschitz quotient in the non-local slot bounded",
        math.isfinite(audit.k_v), audit.k_v))
    items.append(HypothesisItem(
        "monotone_in_v", "reaction non-decreasing in the non-local slot",
        audit.monotone_in_v, audit.monotone_margin, audit.monotone_witness))

    res_low = apply_P_residual(op, u_low).values
    res_up = apply_P_residual(op, u_up).values
    order_min = float(np.min(res_low - res_up))
    items.append(HypothesisItem(
        "residual_ordering", "P[u_low] >= P[u_up] in the interior",
        order_min >= -residual_tol, order_min + residual_tol))

    tr_low, tr_up = parabolic_boundary(u_low), parabolic_boundary(u_up)
    bgap = float(np.max(tr_low.initial.values - tr_up.initial.values))
    for name in tr_low.lateral:
        bgap = max(bgap, float(np.max(tr_low.lateral[name] - tr_up.lateral[name])))
    items.append(HypothesisItem(
        "boundary_ordering", "u_low <= u_up on the parabolic boundary",
        bgap <= tol, tol - bgap))

    report = HypothesisReport(tuple(items))
    applicability = THEOREM_APPLIES if report.all_pass else HYPOTHESES_FAIL
    gap_field = u_low.values - u_up.values
    gap = float(np.max(gap_field))
    if gap <= tol:
        return ComparisonVerdict(report, HOLDS, tol - gap, None, applicability)
    k, flat = divmod(int(np.argmax(gap_field)), int(np.prod(grid.shape)))
    if grid.dimension == 1:
        wx = float(grid.axis()[flat])
    else:
        idx = np.unravel_index(flat, grid.shape)
        wx = tuple(float(grid.axis()[i]) for i in idx)
    return ComparisonVerdict(report, VIOLATED, tol - gap,
                             (wx, float(u_low.times[k]), gap), applicability)


# -- end-to-end scenarios ----------------------------------------------------

@dataclass(frozen=True)
class CounterexampleConfig:
    kernel: KernelSpec
    diffusion: float = 0.1
    halfwidth: float = 40.0
    npoints: int = 2048
    dt: float = 1e-3
    t_final: float = 1.0
    delta: float = 1e-3
    scheme: str = "backward-euler"
    backend: str = "fast"


@dataclass(frozen=True)
class CounterexampleReport:
    forward_difference: float
    predictor: float          # 1 - Ju0(0) by quadrature
    relative_gap: float
    exceedance_time: float
    exceedance_location: float
    max_u: float
    times: np.ndarray
    max_over_x: np.ndarray


def nonlocal_front_depletion(kernel: KernelSpec) -> float:
    """Quadrature of the non-local term of the front datum at the interface.

    For an even kernel, Ju0(0) = int_0^inf phi + int_0^1 phi(y) eta(y) dy.
    """
    radius = effective_radius(kernel, 1e-12)
    half_mass, _ = integrate.quad(lambda y: float(eval_kernel(kernel, y)),
                                  0.0, radius, limit=200)
    overlap, _ = integrate.quad(
        lambda y: float(eval_kernel(kernel, y)) * float(front(y)),
        0.0, min(1.0, radius), limit=200)
    return half_mass + overlap


def reproduce_counterexample(cfg: CounterexampleConfig) -> CounterexampleReport:
    """Solve the non-monotone front problem and locate the overshoot above 1."""
    cert = classify_kernel(cfg.kernel,
                           overlap_halfwidth=min(1.0, cfg.kernel.support_halfwidth()))
    if not cert.passes("even_normalized_overlap"):
        raise ValueError("kernel must be even, normalized, with overlapping support")
    if cfg.diffusion <= 0:
        raise ValueError("diffusion must be positive")
    grid = Grid(1, cfg.halfwidth, cfg.npoints, far_field=((1.0, 0.0),))
    u0 = discretize(grid, front, 0.0)
    op = make_operator("fkpp-nonlocal", cfg.kernel, D=cfg.diffusion)
    sol = solve_ibvp(op, u0, SolverConfig(
        dt=cfg.dt, t_final=cfg.t_final, scheme=cfg.scheme, backend=cfg.backend,
        record_residuals=False))
    ju0 = nonlocal_front_depletion(cfg.kernel)
    predictor = 1.0 - ju0
    if not (0.0 < ju0 < 1.0):
        raise ValueError(f"front depletion Ju0(0)={ju0:g} outside (0, 1)")
    i0 = int(np.argmin(np.abs(grid.axis())))
    fd = float((sol.values[1, i0] - sol.values[0, i0]) / cfg.dt)
    if fd < 0.5 * predictor:
        raise AssertionError(
            f"forward difference {fd:g} below half the predictor {predictor:g}")
    max_over_x = np.max(sol.values, axis=1)
    max_u = float(np.max(max_over_x))
    exceed = np.nonzero(max_over_x > 1.0 + cfg.delta)[0]
    if exceed.size == 0:
        raise NoExceedanceError(
            f"no exceedance above 1 + {cfg.delta:g} before t={cfg.t_final:g}",
            max_value=max_u)
    k = int(exceed[0])
    x_star = float(grid.axis()[int(np.argmax(sol.values[k]))])
    return CounterexampleReport(
        forward_difference=fd, predictor=predictor,
        relative_gap=abs(fd - predictor) / predictor,
        exceedance_time=float(sol.times[k]), exceedance_location=x_star,
        max_u=max_u, times=sol.times, max_over_x=max_over_x)


@dataclass(frozen=True)
class InvariantRegionConfig:
    kernel: KernelSpec
    diffusion: float = 0.1
    halfwidth: float = 40.0
    npoints: int = 2048
    dt: float = 1e-3
    t_final: float = 2.0
    tol: float = 1e-6
    scheme: str = "backward-euler"
    backend: str = "fast"
    u0: object = None  # optional pointwise function, defaults to the front profile


@dataclass(frozen=True)
class InvariantRegionReport:
    min_u_clipped: float
    max_u_clipped: float
    min_u_plain: float
    max_u_plain: float
    max_gap: float
    passed: bool


def invariant_region_check(cfg: InvariantRegionConfig) -> InvariantRegionReport:
    """Solutions with the clipped and plain growth reactions stay in [0, 1]
    and coincide."""
    moments = kernel_norms(cfg.kernel)
    if not math.isfinite(moments.l1_norm):
        raise ValueError("kernel must be integrable")
    grid = Grid(1, cfg.halfwidth, cfg.npoints, far_field=((1.0, 0.0),))
    u0_fn = cfg.u0 if cfg.u0 is not None else front
    u0 = discretize(grid, u0_fn, 0.0)
    if float(np.min(u0.values)) < 0.0 or float(np.max(u0.values)) > 1.0:
        raise ValueError("initial datum must take values in [0, 1]")
    solver_cfg = SolverConfig(dt=cfg.dt, t_final=cfg.t_final, scheme=cfg.scheme,
                              backend=cfg.backend, record_residuals=False)
    sols = {}
    for name in ("fkpp-clipped", "fkpp-unclipped"):
        op = make_operator(name, cfg.kernel, D=cfg.diffusion)
        sols[name] = solve_ibvp(op, u0, solver_cfg)
    stats = {}
    for name, sol in sols.items():
        lo, hi = float(np.min(sol.values)), float(np.max(sol.values))
        stats[name] = (lo, hi)
        if lo < -cfg.tol or hi > 1.0 + cfg.tol:
            k, flat = divmod(int(np.argmax(np.abs(sol.values - 0.5))), grid.npoints)
            raise BoundViolatedError(
                f"{name} left [0 - tol, 1 + tol]: min={lo:g}, max={hi:g}",
                witness=(name, lo, hi))
    gap = float(np.max(np.abs(sols["fkpp-clipped"].values
                              - sols["fkpp-unclipped"].values)))
    lo_c, hi_c = stats["fkpp-clipped"]
    lo_p, hi_p = stats["fkpp-unclipped"]
    return InvariantRegionReport(lo_c, hi_c, lo_p, hi_p, gap, gap <= cfg.tol)
