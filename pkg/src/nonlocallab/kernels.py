"""Integral kernels: evaluation, norms/moments, and admissibility classification.

A kernel is a non-negative integrable function on R^n (n = 1 or 2).  For
n = 2 only radial profiles are supported: phi(x) = profile(|x|) with the
profile taken from one of the 1D families.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import DivergentMomentError, NegativeKernelError

DIVERGENT = math.inf

_FAMILIES = ("gaussian", "box", "triangle", "exponential", "cauchy", "tabulated")


@dataclass(frozen=True)
class KernelSpec:
    """Immutable description of a kernel phi >= 0.

    Use the class-method constructors; the generic constructor only
    validates consistency.
    """

    family: str
    dimension: int = 1
    params: tuple = ()
    # tabulated kernels only: uniformly spaced sample values on
    # [-window, window] (1D profile; for n=2 interpreted radially on [0, window])
    samples: tuple = field(default=(), repr=False)
    sample_spacing: float = 0.0

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}")
        if self.dimension not in (1, 2):
            raise ValueError("dimension must be 1 or 2")
        if self.family == "tabulated":
            if len(self.samples) < 2 or self.sample_spacing <= 0:
                raise ValueError("tabulated kernel needs >=2 samples and spacing > 0")
            vals = np.asarray(self.samples, dtype=float)
            if not np.all(np.isfinite(vals)):
                raise ValueError("tabulated samples must be finite")
            if np.any(vals < -1e-12):
                raise NegativeKernelError(
                    f"tabulated kernel has negative sample min={vals.min():g}"
                )

    # -- constructors -------------------------------------------------

    @classmethod
    def gaussian(cls, sigma: float, dimension: int = 1) -> "KernelSpec":
        if sigma <= 0:
            raise ValueError("sigma must be positive")
        return cls("gaussian", dimension, (float(sigma),))

    @classmethod
    def box(cls, halfwidth: float, height: float | None = None, dimension: int = 1) -> "KernelSpec":
        if halfwidth <= 0:
            raise ValueError("halfwidth must be positive")
        if height is None:
            height = 1.0 / (2.0 * halfwidth)
        if height < 0:
            raise NegativeKernelError("box height must be non-negative")
        return cls("box", dimension, (float(halfwidth), float(height)))

    @classmethod
    def triangle(cls, halfwidth: float, dimension: int = 1) -> "KernelSpec":
        if halfwidth <= 0:
            raise ValueError("halfwidth must be positive")
        return cls("triangle", dimension, (float(halfwidth),))

    @classmethod
    def exponential(cls, rate: float, dimension: int = 1) -> "KernelSpec":
        if rate <= 0:
            raise ValueError("rate must be positive")
        return cls("exponential", dimension, (float(rate),))

    @classmethod
    def cauchy(cls, scale: float, dimension: int = 1) -> "KernelSpec":
        if scale <= 0:
            raise ValueError("scale must be positive")
        return cls("cauchy", dimension, (float(scale),))

    @classmethod
    def tabulated(cls, spacing: float, values, dimension: int = 1) -> "KernelSpec":
        """Samples on a uniform symmetric grid x_i = -W + i*spacing, zero outside.

        ``values`` must have odd length so that x = 0 is a sample point.
        """
        values = tuple(float(v) for v in values)
        if len(values) % 2 == 0:
            raise ValueError("tabulated kernels need an odd number of samples")
        return cls("tabulated", dimension, (), values, float(spacing))

    @classmethod
    def from_text(cls, path, dimension: int = 1) -> "KernelSpec":
        """Read a tabulated kernel from two-column text (x, phi(x))."""
        data = np.loadtxt(path)
        if data.ndim != 2 or data.shape[1] != 2:
            raise ValueError("expected two numeric columns (x, phi)")
        x, v = data[:, 0], data[:, 1]
        dx = np.diff(x)
        if len(dx) == 0 or not np.allclose(dx, dx[0], rtol=1e-8):
            raise ValueError("tabulated kernel grid must be uniform")
        return cls.tabulated(float(dx[0]), v, dimension=dimension)

    # -- profile ------------------------------------------------------

    @property
    def window_halfwidth(self) -> float:
        """Halfwidth of the tabulated sample window."""
        if self.family != "tabulated":
            raise ValueError("only tabulated kernels have a sample window")
        return (len(self.samples) - 1) // 2 * self.sample_spacing

    def profile(self, r):
        """Radial profile value(s) at |x| = r (vectorized)."""
        r = np.abs(np.asarray(r, dtype=float))
        if self.family == "gaussian":
            (sigma,) = self.params
            return np.exp(-0.5 * (r / sigma) ** 2) / (sigma * math.sqrt(2.0 * math.pi))
        if self.family == "box":
            k, height = self.params
            return np.where(r <= k, height, 0.0)
        if self.family == "triangle":
            (a,) = self.params
            return np.maximum(0.0, 1.0 - r / a) / a
        if self.family == "exponential":
            (rate,) = self.params
            return 0.5 * rate * np.exp(-rate * r)
        if self.family == "cauchy":
            (gamma,) = self.params
            return gamma / (math.pi * (r * r + gamma * gamma))
        # tabulated: linear interpolation inside the window, zero outside
        w = self.window_halfwidth
        xs = np.linspace(-w, w, len(self.samples))
        return np.interp(r, xs, np.asarray(self.samples), left=0.0, right=0.0)

    def support_halfwidth(self) -> float:
        """Radius beyond which phi vanishes identically (inf if unbounded)."""
        if self.family == "box":
            return self.params[0]
        if self.family == "triangle":
            return self.params[0]
        if self.family == "tabulated":
            return self.window_halfwidth
        return math.inf


def eval_kernel(kernel: KernelSpec, x):
    """Evaluate phi at a point (scalar for n=1, length-2 vector for n=2).

    Vectorized: for n=1, ``x`` may be an array; for n=2 the last axis holds
    the two coordinates.
    """
    if kernel.dimension == 1:
        if kernel.family == "tabulated":
            # signed interpolation; non-even tables are honoured
            w = kernel.window_halfwidth
            xs = np.linspace(-w, w, len(kernel.samples))
            out = np.interp(np.asarray(x, dtype=float), xs,
                            np.asarray(kernel.samples), left=0.0, right=0.0)
            return out if np.ndim(x) else float(out)
        out = kernel.profile(x)
        return out if np.ndim(x) else float(out)
    pt = np.asarray(x, dtype=float)
    r = np.sqrt(np.sum(pt * pt, axis=-1))
    out = kernel.profile(r)
    return out if np.ndim(r) else float(out)


@dataclass(frozen=True)
class QuadratureConfig:
    """Controls the increasing-cutoff quadrature for kernel moments."""

    initial_radius: float = 10.0
    growth: float = 3.0
    max_rounds: int = 8
    rtol: float = 1e-8
    # two consecutive >1% relative jumps when tripling the cutoff mean the
    # integral does not converge
    divergence_rel: float = 0.01


@dataclass(frozen=True)
class MomentReport:
    l1_norm: float
    second_moment: float  # DIVERGENT (= inf) when not summable
    is_even: bool
    support_halfwidth: float  # inf = unbounded
    normalized: bool
    divergence_evidence: tuple = ()  # ((radius, partial integral), ...)

    @property
    def second_moment_finite(self) -> bool:
        return math.isfinite(self.second_moment)


def _radial_weight(n: int):
    # surface measure factor for radial integration over R^n
    return (lambda r: 2.0) if n == 1 else (lambda r: 2.0 * math.pi * r)


def _analytic_moments(kernel: KernelSpec):
    """Closed-form (l1, second moment) where the family admits one, else None."""
    if kernel.dimension != 1:
        return None
    if kernel.family == "gaussian":
        (sigma,) = kernel.params
        return 1.0, sigma * sigma
    if kernel.family == "box":
        k, height = kernel.params
        return 2.0 * k * height, 2.0 * height * k ** 3 / 3.0
    if kernel.family == "triangle":
        (a,) = kernel.params
        return 1.0, a * a / 6.0
    if kernel.family == "exponential":
        (rate,) = kernel.params
        return 1.0, 2.0 / rate ** 2
    if kernel.family == "cauchy":
        (gamma,) = kernel.params
        return 1.0, DIVERGENT
    return None


def _quad_partial(kernel: KernelSpec, radius: float, power: int, rtol: float) -> float:
    """integral over |x| <= radius of phi(x) |x|^power."""
    n = kernel.dimension
    weight = _radial_weight(n)
    upper = min(radius, kernel.support_halfwidth())
    if upper <= 0:
        return 0.0

    def f(r):
        return float(kernel.profile(r)) * weight(r) * r ** power

    if kernel.family == "tabulated":
        # trapezoid on the sample grid (positivity preserving, matches the
        # linear-interpolation evaluation exactly)
        m = max(int(math.ceil(upper / kernel.sample_spacing)), 1)
        rs = np.linspace(0.0, min(m * kernel.sample_spacing, upper), 4 * m + 1)
        vals = kernel.profile(rs) * np.array([weight(r) for r in rs]) * rs ** power
        return float(np.trapezoid(vals, rs))
    pts = None
    if math.isfinite(kernel.support_halfwidth()):
        pts = [kernel.support_halfwidth()] if kernel.support_halfwidth() < upper else None
    val, _ = integrate.quad(f, 0.0, upper, epsrel=rtol, epsabs=1e-14,
                            limit=200, points=pts)
    return val


def _increasing_cutoff(kernel: KernelSpec, power: int, cfg: QuadratureConfig):
    """Quadrature over increasing cutoffs; returns (value, evidence, diverged)."""
    evidence = []
    prev = None
    jumps = 0
    radius = cfg.initial_radius
    value = 0.0
    for _ in range(cfg.max_rounds):
        value = _quad_partial(kernel, radius, power, cfg.rtol)
        evidence.append((radius, value))
        if prev is not None and prev > 0:
            rel = (value - prev) / prev
            if rel > cfg.divergence_rel:
                jumps += 1
                if jumps >= 2:
                    return DIVERGENT, tuple(evidence), True
            else:
                jumps = 0
                if rel <= cfg.rtol:
                    return value, tuple(evidence), False
        if math.isfinite(kernel.support_halfwidth()) and radius >= kernel.support_halfwidth():
            return value, tuple(evidence), False
        prev = value
        radius *= cfg.growth
    return value, tuple(evidence), False


def _check_nonnegative(kernel: KernelSpec, tol: float = 1e-12):
    r_max = kernel.support_halfwidth()
    if not math.isfinite(r_max):
        r_max = 50.0
    rs = np.linspace(0.0, r_max, 2001)
    if kernel.dimension == 1 and kernel.family == "tabulated":
        vals = eval_kernel(kernel, np.linspace(-r_max, r_max, 4001))
    else:
        vals = kernel.profile(rs)
    if np.any(np.asarray(vals) < -tol):
        raise NegativeKernelError(
            f"kernel has negative values (min {np.min(vals):g})"
        )


def _is_even(kernel: KernelSpec, tol: float = 1e-10) -> bool:
    if kernel.family != "tabulated":
        return True  # all closed families are radial/even by construction
    vals = np.asarray(kernel.samples)
    return bool(np.max(np.abs(vals - vals[::-1])) <= tol * (1.0 + np.max(np.abs(vals))))


def kernel_norms(kernel: KernelSpec, quadrature: QuadratureConfig | None = None) -> MomentReport:
    """L1 norm and second moment, analytic where possible, else by quadrature."""
    if quadrature is None:
        rtol = 1e-4 if kernel.family == "tabulated" else 1e-8
        quadrature = QuadratureConfig(rtol=rtol)
    _check_nonnegative(kernel)
    evidence = ()
    analytic = _analytic_moments(kernel)
    if analytic is not None and kernel.family != "cauchy":
        l1, second = analytic
    else:
        l1, _, l1_div = _increasing_cutoff(kernel, 0, quadrature)
        second, evidence, diverged = _increasing_cutoff(kernel, 2, quadrature)
        if l1_div:
            l1 = DIVERGENT
        if not diverged:
            evidence = ()
        if analytic is not None:
            # cauchy: exact L1; keep the quadrature evidence for the
            # divergent second moment
            l1 = analytic[0]
            if not math.isfinite(analytic[1]):
                second = DIVERGENT
    return MomentReport(
        l1_norm=l1,
        second_moment=second,
        is_even=_is_even(kernel),
        support_halfwidth=kernel.support_halfwidth(),
        normalized=bool(math.isfinite(l1) and abs(l1 - 1.0) <= 1e-6),
        divergence_evidence=evidence,
    )


def effective_radius(kernel: KernelSpec, tail_fraction: float = 1e-8,
                     norms: MomentReport | None = None) -> float:
    """Radius containing (1 - tail_fraction) of the kernel's L1 mass."""
    sup = kernel.support_halfwidth()
    if math.isfinite(sup):
        return sup
    if norms is None:
        norms = kernel_norms(kernel)
    total = norms.l1_norm
    if total == 0.0:
        return 0.0
    if not math.isfinite(total):
        raise DivergentMomentError("kernel is not integrable")
    target = (1.0 - tail_fraction) * total
    lo, hi = 0.0, 1.0
    while _quad_partial(kernel, hi, 0, 1e-10) < target:
        hi *= 2.0
        if hi > 1e9:
            raise DivergentMomentError("could not bracket the kernel mass radius")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _quad_partial(kernel, mid, 0, 1e-10) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-9 * max(1.0, hi):
            break
    return hi


@dataclass(frozen=True)
class AdmissibilityCondition:
    cond_id: str
    passed: bool
    measured: float
    detail: str = ""


@dataclass(frozen=True)
class KernelCertificate:
    """Pass/fail record of the kernel admissibility conditions.

    Conditions: (i) integrable and non-negative; (ii) finite second moment
    (moment-kernel comparison regime); (iii) integrable-kernel comparison
    regime (only (i) needed); (iv) even + normalized + support contains
    [-k, k] (front-overlap construction).
    """

    conditions: tuple
    moments: MomentReport

    def condition(self, cond_id: str) -> AdmissibilityCondition:
        for c in self.conditions:
            if c.cond_id == cond_id:
                return c
        raise KeyError(cond_id)

    def passes(self, cond_id: str) -> bool:
        return self.condition(cond_id).passed


def classify_kernel(kernel: KernelSpec, overlap_halfwidth: float = 1.0,
                    quadrature: QuadratureConfig | None = None) -> KernelCertificate:
    moments = kernel_norms(kernel, quadrature)
    l1_ok = math.isfinite(moments.l1_norm) and moments.l1_norm >= 0.0
    second_ok = moments.second_moment_finite
    support_ok = moments.support_halfwidth >= overlap_halfwidth
    conds = (
        AdmissibilityCondition("integrable_nonnegative", l1_ok, moments.l1_norm,
                               "phi in L1 and phi >= 0"),
        AdmissibilityCondition("second_moment_finite", l1_ok and second_ok,
                               moments.second_moment,
                               "second moment summable"),
        AdmissibilityCondition("integrable_only", l1_ok, moments.l1_norm,
                               "integrable-kernel comparison regime"),
        AdmissibilityCondition(
            "even_normalized_overlap",
            l1_ok and moments.is_even and moments.normalized and support_ok,
            moments.l1_norm,
            f"even, unit mass, support contains [-{overlap_halfwidth:g}, {overlap_halfwidth:g}]",
        ),
    )
    return KernelCertificate(conds, moments)


@dataclass(frozen=True)
class JQuotientReport:
    bound: float
    measured_max: float
    argmax_x: float


def jquotient_bound_check(kernel: KernelSpec, grid, tolerance: float = 1e-6) -> JQuotientReport:
    """Discrete check of the weighted-kernel quotient bound 3(||phi||_1 + ||psi||_1).

    measured_max = max over grid x of theta(x) * sum_y phi(x - y) / theta(y) * h^n
    with theta(x) = 1 / (|x|^2 + 1).
    """
    moments = kernel_norms(kernel)
    if not moments.second_moment_finite:
        raise DivergentMomentError("quotient bound requires a finite second moment")
    bound = 3.0 * (moments.l1_norm + moments.second_moment)
    field = jquotient_field(kernel, grid)
    i = int(np.argmax(field))
    measured = float(field.flat[i])
    if measured > bound + tolerance:
        raise AssertionError(
            f"measured quotient {measured:g} exceeds bound {bound:g}"
        )
    if grid.dimension == 1:
        arg = float(grid.axis()[i])
    else:
        arg = float(np.sqrt(np.sum(grid.points()[np.unravel_index(i, field.shape)] ** 2)))
    return JQuotientReport(bound=bound, measured_max=measured, argmax_x=arg)


def jquotient_field(kernel: KernelSpec, grid) -> np.ndarray:
    """theta(x) * h^n * sum_{y on grid} phi(x - y) / theta(y) for every grid x."""
    if kernel.dimension != grid.dimension:
        raise DivergentMomentError("kernel/grid dimension mismatch")
    if grid.dimension == 1:
        x = grid.axis()
        theta = 1.0 / (x * x + 1.0)
        diff = x[:, None] - x[None, :]
        phi = np.asarray(eval_kernel(kernel, diff))
        return theta * (phi @ (1.0 / theta)) * grid.spacing
    pts = grid.points()  # (N, N, 2)
    x = pts.reshape(-1, 2)
    theta = 1.0 / (np.sum(x * x, axis=1) + 1.0)
    out = np.empty(x.shape[0])
    inv_theta = 1.0 / theta
    for i in range(x.shape[0]):
        d = x[i] - x
        out[i] = theta[i] * np.dot(kernel.profile(np.sqrt(np.sum(d * d, axis=1))), inv_theta)
    return (out * grid.spacing ** 2).reshape(pts.shape[:2])
