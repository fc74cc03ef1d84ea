import numpy as np
import pytest

from nonlocallab import (
    AsymmetricDiffusionError,
    DiffusionCoefficients,
    Field,
    Grid,
    KernelSpec,
    LinearCoefficients,
    OperatorSpec,
    ReactionSpec,
    SpaceTimeField,
    apply_P_residual,
    apply_spatial_L,
    check_parabolicity_growth,
    convolve,
    discretize,
    estimate_reaction_constants,
    factorize_difference,
    make_operator,
    registry_names,
)
from nonlocallab.operator import diff1, diff2


class TestStencils:
    def test_exact_on_quadratics(self):
        h = 0.1
        x = np.arange(12) * h
        v = 3.0 * x**2 - 2.0 * x + 1.0
        assert np.allclose(diff1(v, h), 6.0 * x - 2.0, atol=1e-10)
        assert np.allclose(diff2(v, h), 6.0, atol=1e-8)

    def test_axis_argument(self):
        h = 0.5
        x = np.arange(8) * h
        v = np.add.outer(x**2, 0.0 * x)
        assert np.allclose(diff2(v, h, axis=0), 2.0, atol=1e-9)
        assert np.allclose(diff2(v, h, axis=1), 0.0, atol=1e-9)


class TestSpatialL:
    def test_heat_on_quadratic(self):
        g = Grid(1, 5.0, 64)
        coeffs = DiffusionCoefficients.constant(2.0)
        u = discretize(g, lambda x, t: np.asarray(x) ** 2)
        lu = apply_spatial_L(coeffs, u)
        assert np.allclose(lu.values, 4.0, atol=1e-7)

    def test_drift_term(self):
        g = Grid(1, 5.0, 64)
        coeffs = DiffusionCoefficients.constant(1.0, drift=3.0)
        u = discretize(g, lambda x, t: np.asarray(x))
        lu = apply_spatial_L(coeffs, u)
        assert np.allclose(lu.values, 3.0, atol=1e-8)

    def test_2d_cross_term(self):
        g = Grid(2, 3.0, 24, far_field=((0.0, 0.0), (0.0, 0.0)))
        a = np.array([[1.0, 0.25], [0.25, 1.0]])
        coeffs = DiffusionCoefficients(a=lambda x, t: a,
                                       b=lambda x, t: np.zeros(2), dimension=2)
        u = discretize(g, lambda p, t: p[..., 0] * p[..., 1])
        lu = apply_spatial_L(coeffs, u)
        # L[xy] = 2 a_12 = 0.5
        assert np.allclose(lu.values, 0.5, atol=1e-7)


class TestOperatorSpec:
    def test_exactly_one_mode(self):
        coeffs = DiffusionCoefficients.constant(1.0)
        kern = KernelSpec.gaussian(1.0)
        with pytest.raises(ValueError):
            OperatorSpec(coeffs, kern)
        with pytest.raises(ValueError):
            OperatorSpec(coeffs, kern,
                         reaction=ReactionSpec(f=lambda x, t, u, v: u),
                         linear=LinearCoefficients.constant(0.0, 0.0))

    def test_registry_names(self):
        names = registry_names()
        for expected in ("heat", "fkpp-nonlocal", "fkpp-clipped", "linear"):
            assert expected in names

    def test_make_linear(self):
        op = make_operator("linear", KernelSpec.gaussian(1.0),
                           diffusion=2.0, c=-1.0, d=0.5)
        assert op.mode == "linear"
        assert op.linear.C == -1.0 and op.linear.D == 0.5

    def test_unknown_name(self):
        with pytest.raises(ValueError):
            make_operator("unknown", KernelSpec.gaussian(1.0))


class TestParabolicityAudit:
    def test_constant_coefficients(self):
        g = Grid(1, 10.0, 128)
        coeffs = DiffusionCoefficients.constant(1.5, drift=0.5)
        rep = check_parabolicity_growth(coeffs, g)
        assert rep.rayleigh_min == pytest.approx(1.5)
        assert rep.rayleigh_max == pytest.approx(1.5)
        assert rep.quadratic_growth_ok and rep.uniform_bounds_ok

    def test_quadratically_growing_diffusion(self):
        g = Grid(1, 10.0, 128)
        op = make_operator("unbounded-a", KernelSpec.gaussian(1.0), D=1.0)
        rep = check_parabolicity_growth(op.diffusion, g)
        # a(x) = 1 + x^2 satisfies the growth bound with A = 1 exactly
        assert rep.quadratic_growth_ok
        assert rep.growth_quotient_max == pytest.approx(1.0, abs=1e-10)

    def test_asymmetric_rejected(self):
        g = Grid(2, 3.0, 16, far_field=((0.0, 0.0), (0.0, 0.0)))
        coeffs = DiffusionCoefficients(
            a=lambda x, t: np.array([[1.0, 0.2], [0.0, 1.0]]),
            b=lambda x, t: np.zeros(2), dimension=2)
        with pytest.raises(AsymmetricDiffusionError):
            check_parabolicity_growth(coeffs, g)


class TestReactionAudit:
    def test_nonlocal_growth_constants(self):
        g = Grid(1, 10.0, 64)
        op = make_operator("fkpp-nonlocal", KernelSpec.box(1.0), D=1.0)
        rep = estimate_reaction_constants(op.reaction, g)
        # f = u(1 - v) on [0,2]^2: df/du in [-1, 1], df/dv = -u in [-2, 0]
        assert rep.k_u_upper == pytest.approx(1.0, abs=1e-3)
        assert rep.k_v == pytest.approx(2.0, abs=1e-2)
        assert not rep.monotone_in_v
        assert rep.monotone_witness is not None
        assert rep.matches_declared

    def test_clipped_growth_monotone(self):
        g = Grid(1, 10.0, 64)
        op = make_operator("fkpp-clipped", KernelSpec.box(1.0), D=1.0)
        rep = estimate_reaction_constants(op.reaction, g)
        assert rep.monotone_in_v
        assert rep.monotone_witness is None
        assert rep.matches_declared

    def test_determinism(self):
        g = Grid(1, 10.0, 64)
        op = make_operator("fkpp-nonlocal", KernelSpec.box(1.0), D=1.0)
        a = estimate_reaction_constants(op.reaction, g, seed=11)
        b = estimate_reaction_constants(op.reaction, g, seed=11)
        assert a == b


class TestFactorization:
    def test_reconstructs_difference(self):
        g = Grid(1, 10.0, 128)
        kern = KernelSpec.gaussian(1.0)
        reaction = make_operator("fkpp-nonlocal", kern, D=1.0).reaction
        rng = np.random.default_rng(5)
        ubar = Field(g, 0.5 + 0.4 * rng.random(128))
        ulow = Field(g, 0.1 + 0.3 * rng.random(128))
        jubar = convolve(kern, ubar)
        julow = convolve(kern, ulow)
        c, d = factorize_difference(reaction, ubar, jubar, ulow, julow)
        lhs = reaction.f(g.points(), 0.0, ubar.values, jubar.values) \
            - reaction.f(g.points(), 0.0, ulow.values, julow.values)
        rhs = c.values * (ubar.values - ulow.values) \
            + d.values * (jubar.values - julow.values)
        assert np.allclose(lhs, rhs, atol=1e-12)

    def test_zero_quotient_on_equal_inputs(self):
        g = Grid(1, 10.0, 64)
        kern = KernelSpec.gaussian(1.0)
        reaction = make_operator("logistic-local", kern, D=1.0).reaction
        u = Field(g, np.full(64, 0.5))
        ju = convolve(kern, u)
        c, d = factorize_difference(reaction, u, ju, u, ju)
        assert np.all(c.values == 0.0)
        assert np.all(d.values == 0.0)


class TestResidual:
    def test_exact_linear_solution_small_residual(self):
        # u(x, t) = e^{-t} cos(x) solves u_t = u_xx exactly
        g = Grid(1, np.pi * 4, 512)
        op = make_operator("heat", KernelSpec.gaussian(1.0), D=1.0)
        times = np.linspace(0.0, 0.2, 21)
        vals = np.array([np.exp(-t) * np.cos(g.axis()) for t in times])
        stf = SpaceTimeField(g, times, vals)
        res = apply_P_residual(op, stf)
        interior = res.values[:, 2:-2]
        assert np.max(np.abs(interior)) < 5e-4
