"""Closed-form fundamental solutions for constant-coefficient operators,
their Gaussian envelope bounds, the integral representation inequality, and
the discrete Bellman-Gronwall step.

Only constant coefficients are supported: the closed form makes every check
exact-oracle-backed.  L[u] = D laplace(u) + b . grad(u) + c u - du/dt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BoundFailedError,
    QuadratureUnderresolvedError,
    TimeOrderError,
    UnsupportedFamilyError,
)
from .grid import Field, SpaceTimeField, convolve
from .kernels import KernelSpec, kernel_norms


@dataclass(frozen=True)
class ConstCoeffParams:
    diffusion: float
    drift: tuple = (0.0,)
    zeroth: float = 0.0
    dimension: int = 1

    def __post_init__(self):
        if self.diffusion <= 0:
            raise ValueError("diffusion must be positive")
        if len(self.drift) != self.dimension:
            raise ValueError("drift length must match the dimension")

    @property
    def drift_vec(self) -> np.ndarray:
        return np.asarray(self.drift, dtype=float)


def _as_points(x, n):
    pts = np.asarray(x, dtype=float)
    if n == 1:
        return pts.reshape(-1, 1), pts.shape if pts.ndim else ()
    if pts.shape[-1] != n:
        raise ValueError("point array must end with the coordinate axis")
    return pts.reshape(-1, n), pts.shape[:-1]


def gamma_eval(p: ConstCoeffParams, x, t: float, xi, tau: float):
    """Fundamental solution value(s) at (x, t) with pole at (xi, tau)."""
    if t <= tau:
        raise TimeOrderError(f"need t > tau, got t={t}, tau={tau}")
    dt = t - tau
    n = p.dimension
    X, shape_x = _as_points(x, n)
    Xi, shape_xi = _as_points(xi, n)
    diff = X[:, None, :] - Xi[None, :, :] + p.drift_vec * dt
    r2 = np.sum(diff * diff, axis=-1)
    vals = (4.0 * math.pi * p.diffusion * dt) ** (-n / 2.0) \
        * np.exp(-r2 / (4.0 * p.diffusion * dt)) * math.exp(p.zeroth * dt)
    vals = vals.reshape(shape_x + shape_xi)
    return float(vals) if vals.shape == () else vals


def gamma_gradient(p: ConstCoeffParams, x, t: float, xi, tau: float):
    """Spatial gradient of gamma with respect to x (vector of length n)."""
    if t <= tau:
        raise TimeOrderError(f"need t > tau, got t={t}, tau={tau}")
    dt = t - tau
    n = p.dimension
    X, _ = _as_points(x, n)
    Xi, _ = _as_points(xi, n)
    diff = X - Xi + p.drift_vec * dt
    g = gamma_eval(p, x, t, xi, tau)
    grad = -diff / (2.0 * p.diffusion * dt) * np.atleast_1d(g).reshape(-1, 1)
    return grad[0] if np.ndim(x) <= 1 and n == 1 and np.size(X) == 1 else grad


def gamma_adjoint_eval(p: ConstCoeffParams, x, t: float, xi, tau: float):
    """Adjoint fundamental solution, defined by swapping the two arguments."""
    if t >= tau:
        raise TimeOrderError(f"need t < tau, got t={t}, tau={tau}")
    return gamma_eval(p, xi, tau, x, t)


def apply_L(p: ConstCoeffParams, fn, x, t: float, h: float = 1e-4):
    """Finite-difference application of L to a scalar function fn(x, t)."""
    n = p.dimension
    x = np.atleast_1d(np.asarray(x, dtype=float))
    val = fn(x, t)
    lap = 0.0
    grad = np.zeros(n)
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        up, dn = fn(x + e, t), fn(x - e, t)
        lap += (up - 2.0 * val + dn) / h**2
        grad[i] = (up - dn) / (2.0 * h)
    ut = (fn(x, t + h) - fn(x, t - h)) / (2.0 * h)
    return p.diffusion * lap + float(np.dot(p.drift_vec, grad)) \
        + p.zeroth * val - ut


def apply_L_adjoint(p: ConstCoeffParams, fn, x, t: float, h: float = 1e-4):
    """Finite-difference application of the adjoint operator to fn(x, t)."""
    n = p.dimension
    x = np.atleast_1d(np.asarray(x, dtype=float))
    val = fn(x, t)
    lap = 0.0
    grad = np.zeros(n)
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        up, dn = fn(x + e, t), fn(x - e, t)
        lap += (up - 2.0 * val + dn) / h**2
        grad[i] = (up - dn) / (2.0 * h)
    ut = (fn(x, t + h) - fn(x, t - h)) / (2.0 * h)
    return p.diffusion * lap - float(np.dot(p.drift_vec, grad)) \
        + p.zeroth * val + ut


DELTA_TEST_FUNCTIONS = ("constant", "cosine", "bump")


def _delta_test_fn(name: str):
    if name == "constant":
        return lambda xi: np.ones_like(np.sum(np.atleast_2d(xi), axis=-1))
    if name == "cosine":
        return lambda xi: np.cos(np.sum(np.atleast_2d(xi), axis=-1))
    if name == "bump":
        return lambda xi: np.exp(-np.sum(np.atleast_2d(xi) ** 2, axis=-1))
    raise UnsupportedFamilyError(f"test function must be one of {DELTA_TEST_FUNCTIONS}")


def delta_family_check(p: ConstCoeffParams, f_name: str, x_samples, t_sequence,
                       window: float = 20.0, min_points_per_width: int = 6):
    """Quadrature of int gamma(x,t;xi,0) f(xi) dxi at decreasing t.

    Returns rows (t, max deviation from f(x) over the samples).
    """
    f = _delta_test_fn(f_name)
    n = p.dimension
    rows = []
    for t in t_sequence:
        width = math.sqrt(2.0 * p.diffusion * t)
        npts = int(math.ceil(2.0 * window / (width / min_points_per_width))) + 1
        npts = min(max(npts, 201), 2_000_001)
        spacing = 2.0 * window / (npts - 1)
        if width < 3.0 * spacing:
            raise QuadratureUnderresolvedError(
                f"kernel width {width:g} below 3 spacings at t={t:g}")
        dev = 0.0
        for xs in np.atleast_1d(np.asarray(x_samples, dtype=float)):
            if n == 1:
                xi = np.linspace(xs - window, xs + window, npts)
                g = gamma_eval(p, float(xs), t, xi, 0.0)
                integral = float(np.trapezoid(g * f(xi[:, None]), xi))
                target = float(f(np.array([[xs]]))[0])
            else:
                ax = np.linspace(-window, window, npts)
                xx, yy = np.meshgrid(xs[0] + ax, xs[1] + ax, indexing="ij")
                pts = np.stack([xx.ravel(), yy.ravel()], axis=-1)
                g = gamma_eval(p, xs, t, pts, 0.0).reshape(npts, npts)
                fv = f(pts).reshape(npts, npts)
                integral = float(np.trapezoid(np.trapezoid(g * fv, ax, axis=1), ax))
                target = float(f(np.atleast_2d(xs))[0])
            dev = max(dev, abs(integral - target))
        rows.append((float(t), dev))
    return rows


@dataclass(frozen=True)
class GammaBoundFit:
    kappa: float
    kappa_gradient: float
    lam: float
    parabolicity_floor: float  # A_min of the operator (= D here)
    sample_count: int
    max_ratio: float
    max_ratio_gradient: float
    min_log_gamma: float  # finite iff every sampled gamma is positive

    def __post_init__(self):
        if not (0.0 < self.lam < self.parabolicity_floor):
            raise ValueError("lam must lie strictly inside (0, A_min)")
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")


def derive_envelope_constants(p: ConstCoeffParams, horizon: float,
                              lam: float | None = None) -> tuple:
    """Admissible (kappa, kappa_gradient, lam) for the closed-form solution.

    lam is kept strictly below both the parabolicity floor D and the natural
    decay rate 1/D so the envelope exponent absorbs the drift shift; kappa
    absorbs the polynomial prefactor and the zeroth-order growth over the
    horizon.
    """
    D = p.diffusion
    n = p.dimension
    if lam is None:
        lam = 0.9 * min(D, 1.0 / D)
    if not (0.0 < lam < D and lam * D < 1.0):
        raise ValueError("need 0 < lam < A_min and lam * D < 1")
    bmag = float(np.linalg.norm(p.drift_vec))
    # value bound: the worst-case exponent gap is linear in t - tau
    slope = p.zeroth + bmag**2 * lam / (4.0 * (1.0 - lam * D))
    kappa = 1.05 * (4.0 * math.pi * D) ** (-n / 2.0) * math.exp(max(0.0, slope * horizon))
    # gradient bound: numeric sup of the ratio over (radius, elapsed) grids
    rho_max = 50.0 * (1.0 + bmag * horizon + math.sqrt(4.0 * D * horizon / (1.0 - lam * D)))
    rho = np.linspace(0.0, rho_max, 2001)
    tp = np.geomspace(1e-6, horizon, 400)
    rr, tt = np.meshgrid(rho, tp, indexing="ij")
    q = np.abs(rr - bmag * tt)  # worst alignment of drift against the offset
    ratio = ((4.0 * math.pi * D * tt) ** (-n / 2.0) * (q + bmag * tt + rr) / (2.0 * D * tt)
             * np.exp(-(rr - bmag * tt) ** 2 / (4.0 * D * tt)
                      + lam * rr**2 / (4.0 * tt) + p.zeroth * tt)
             * tt ** ((n + 1) / 2.0))
    kappa_grad = 1.05 * float(np.max(ratio))
    return kappa, kappa_grad, lam


def gaussian_bound_check(p: ConstCoeffParams, horizon: float,
                         samples: int = 10000, seed: int = 0,
                         lam: float | None = None,
                         window: float = 10.0) -> GammaBoundFit:
    """Check the Gaussian envelope bounds on gamma and its gradient at random
    space-time samples."""
    kappa, kappa_grad, lam = derive_envelope_constants(p, horizon, lam)
    rng = np.random.default_rng(seed)
    n = p.dimension
    count = max(samples, 10000)
    x = rng.uniform(-window, window, size=(count, n))
    xi = rng.uniform(-window, window, size=(count, n))
    dt = rng.uniform(1e-4, horizon, size=count)
    diff = x - xi + p.drift_vec * dt[:, None]
    r2_shift = np.sum(diff * diff, axis=1)
    r2 = np.sum((x - xi) ** 2, axis=1)
    # log-space comparison: both sides underflow to 0.0 in double precision
    # far in the Gaussian tails, so ratios are formed from exact logarithms
    log_g = (-n / 2.0) * np.log(4.0 * math.pi * p.diffusion * dt) \
        - r2_shift / (4.0 * p.diffusion * dt) + p.zeroth * dt
    log_env = math.log(kappa) - (n / 2.0) * np.log(dt) - lam * r2 / (4.0 * dt)
    ratios = np.exp(np.minimum(log_g - log_env, 50.0))
    with np.errstate(divide="ignore"):
        log_grad = log_g + 0.5 * np.log(r2_shift) \
            - np.log(2.0 * p.diffusion * dt)
    log_env_grad = math.log(kappa_grad) - ((n + 1) / 2.0) * np.log(dt) \
        - lam * r2 / (4.0 * dt)
    ratios_grad = np.where(r2_shift == 0.0, 0.0,
                           np.exp(np.minimum(log_grad - log_env_grad, 50.0)))
    max_ratio = float(np.max(ratios))
    max_ratio_grad = float(np.max(ratios_grad))
    if max_ratio > 1.0 or max_ratio_grad > 1.0:
        i = int(np.argmax(np.maximum(ratios, ratios_grad)))
        raise BoundFailedError(
            f"envelope bound failed at sample {i}: x={x[i]}, xi={xi[i]}, "
            f"dt={dt[i]:g}, ratio={max(ratios[i], ratios_grad[i]):g}")
    return GammaBoundFit(
        kappa=kappa, kappa_gradient=kappa_grad, lam=lam,
        parabolicity_floor=p.diffusion, sample_count=count,
        max_ratio=max_ratio, max_ratio_gradient=max_ratio_grad,
        min_log_gamma=float(np.min(log_g)))


def mass_integral(p: ConstCoeffParams, x, t: float, tau: float = 0.0,
                  window: float | None = None, npts: int = 20001) -> float:
    """Quadrature of int gamma(x, t; xi, tau) dxi (equals e^{c (t-tau)})."""
    dt = t - tau
    if window is None:
        window = 14.0 * math.sqrt(2.0 * p.diffusion * dt) \
            + float(np.linalg.norm(p.drift_vec)) * dt + 1.0
    n = p.dimension
    if n == 1:
        xi = np.linspace(float(np.atleast_1d(x)[0]) - window,
                         float(np.atleast_1d(x)[0]) + window, npts)
        return float(np.trapezoid(gamma_eval(p, x, t, xi, tau), xi))
    m = min(npts, 801)
    ax = np.linspace(-window, window, m)
    base = np.atleast_1d(np.asarray(x, dtype=float))
    xx, yy = np.meshgrid(base[0] + ax, base[1] + ax, indexing="ij")
    pts = np.stack([xx.ravel(), yy.ravel()], axis=-1)
    g = gamma_eval(p, x, t, pts, tau).reshape(m, m)
    return float(np.trapezoid(np.trapezoid(g, ax, axis=1), ax))


def chapman_kolmogorov_gap(p: ConstCoeffParams, x, t: float, xi, tau: float,
                           s: float, window: float = 30.0,
                           npts: int = 20001) -> float:
    """|int gamma(x,t;z,s) gamma(z,s;xi,tau) dz - gamma(x,t;xi,tau)|."""
    if not (tau < s < t):
        raise TimeOrderError("need tau < s < t")
    if p.dimension != 1:
        raise UnsupportedFamilyError("composition check implemented for n=1")
    z = np.linspace(-window, window, npts)
    left = gamma_eval(p, x, t, z, s)
    right = gamma_eval(p, z, s, xi, tau)
    composed = float(np.trapezoid(left * right, z))
    return abs(composed - gamma_eval(p, x, t, xi, tau))


@dataclass(frozen=True)
class RepresentationRow:
    x: float
    t: float
    lhs: float
    rhs: float
    slack: float
    passed: bool


def integral_representation_check(p: ConstCoeffParams, c_fn, d_fn,
                                  kernel: KernelSpec, w: SpaceTimeField,
                                  sample_points, tol: float = 1e-3,
                                  eps2_frac: float = 1e-4,
                                  backend: str = "fast") -> list:
    """Check w(x,t) >= int gamma*(y,0;x,t) w(y,0) dy + space-time source term.

    c_fn, d_fn >= 0 evaluate on grid points at a time level.  Space quadrature
    is trapezoid on the solver grid; time quadrature is midpoint over the
    stored levels, truncated at t - eps2 (the truncated tail is non-negative,
    so dropping it only weakens the right-hand side).
    """
    grid = w.grid
    if grid.dimension != 1:
        raise UnsupportedFamilyError("representation check implemented for n=1")
    y = grid.axis()
    norms = kernel_norms(kernel)
    pts = grid.points()
    source = []
    for k in range(len(w)):
        fld = w.field(k)
        jw = convolve(kernel, fld, backend=backend, norms=norms).values
        tk = float(w.times[k])
        c = np.broadcast_to(np.asarray(c_fn(pts, tk), dtype=float), grid.shape)
        d = np.broadcast_to(np.asarray(d_fn(pts, tk), dtype=float), grid.shape)
        if float(np.min(c)) < -1e-12 or float(np.min(d)) < -1e-12:
            raise ValueError("the representation inequality needs c, d >= 0")
        source.append(c * fld.values + d * jw)
    source = np.array(source)
    rows = []
    for (xs, ts) in sample_points:
        k_t = int(np.argmin(np.abs(w.times - ts)))
        if k_t == 0:
            raise ValueError("sample times must be interior (t > 0)")
        t_val = float(w.times[k_t])
        i_x = int(np.argmin(np.abs(y - xs)))
        x_val = float(y[i_x])
        lhs = float(w.values[k_t, i_x])
        rhs = float(np.trapezoid(gamma_eval(p, x_val, t_val, y, 0.0)
                                 * w.values[0], y))
        eps2 = eps2_frac * t_val
        for k in range(k_t):
            s_mid = 0.5 * (float(w.times[k]) + float(w.times[k + 1]))
            if s_mid > t_val - eps2:
                break
            ds = float(w.times[k + 1] - w.times[k])
            src_mid = 0.5 * (source[k] + source[k + 1])
            g = gamma_eval(p, x_val, t_val, y, s_mid)
            rhs += ds * float(np.trapezoid(g * src_mid, y))
        rows.append(RepresentationRow(x_val, t_val, lhs, rhs,
                                      lhs - rhs, lhs >= rhs - tol))
    return rows


@dataclass(frozen=True)
class GronwallVerdict:
    premise_ok: bool
    first_violation: int | None
    conclusion_asserted: bool
    conclusion_ok: bool
    max_value: float
    envelope_max: float


def discrete_gronwall(times, psi_values, rate: float,
                      tol: float = 1e-12) -> GronwallVerdict:
    """Discrete Bellman-Gronwall: if psi <= rate * int_0^t psi + tol and
    psi(0) <= tol, then psi stays below tol * exp(rate * t)."""
    if rate < 0:
        raise ValueError("rate must be non-negative")
    times = np.asarray(times, dtype=float)
    psi = np.asarray(psi_values, dtype=float)
    if times.shape != psi.shape or times.ndim != 1:
        raise ValueError("times and psi series must be 1D and aligned")
    integral = np.concatenate([[0.0], np.cumsum(
        0.5 * (psi[1:] + psi[:-1]) * np.diff(times))])
    premise = psi <= rate * integral + tol
    first = None if bool(np.all(premise)) else int(np.argmin(premise))
    if first is not None:
        return GronwallVerdict(False, first, False, False,
                               float(np.max(psi)), math.nan)
    if psi[0] > tol:
        return GronwallVerdict(True, None, False, False,
                               float(np.max(psi)), math.nan)
    envelope = tol * np.exp(rate * times)
    ok = bool(np.all(psi <= envelope))
    return GronwallVerdict(True, None, True, ok, float(np.max(psi)),
                           float(np.max(envelope)))


def gronwall_rate_constant(kappa: float, lam: float, dimension: int,
                           c_sup: float, d_sup: float, kernel_l1: float) -> float:
    """The rate produced by the envelope bound in the comparison argument."""
    return kappa * (c_sup + d_sup * kernel_l1) \
        * (2.0 * math.sqrt(math.pi) / math.sqrt(lam)) ** dimension


def ordered_gap_series(u_low: SpaceTimeField, u_up: SpaceTimeField,
                       rate_shift: float = 0.0) -> tuple:
    """Positive-part sup series of (u_low - u_up) e^{k t} over the window."""
    gap = (u_low.values - u_up.values) \
        * np.exp(rate_shift * u_low.times)[(...,) + (None,) * u_low.grid.dimension]
    flat = gap.reshape(len(u_low), -1)
    return np.asarray(u_low.times, dtype=float), np.maximum(flat, 0.0).max(axis=1)
