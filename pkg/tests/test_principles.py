import numpy as np
import pytest

from nonlocallab import (
    HOLDS,
    THEOREM_APPLIES,
    CounterexampleConfig,
    Grid,
    InvariantRegionConfig,
    KernelSpec,
    NoExceedanceError,
    SolverConfig,
    auxiliary_transform,
    discretize,
    formulaic_nu,
    front,
    front_value_integral,
    invariant_region_check,
    make_operator,
    nonlocal_front_depletion,
    reproduce_counterexample,
    solve_ibvp,
    strong_minimum_check,
    verify_comparison,
    verify_weak_minimum,
)
from nonlocallab.principles import HYPOTHESES_FAIL, VIOLATED


def bump_datum(grid, amplitude=1.0, sigma=1.0, center=0.0):
    return discretize(grid, lambda x, t: amplitude
                      * np.exp(-0.5 * (np.asarray(x) - center) ** 2 / sigma**2))


class TestWeakMinimum:
    def _solution(self, c=-0.5, d=0.3, dt=5e-3):
        g = Grid(1, 20.0, 257)
        op = make_operator("linear", KernelSpec.gaussian(1.0),
                           diffusion=1.0, c=c, d=d)
        sol = solve_ibvp(op, bump_datum(g), SolverConfig(dt=dt, t_final=0.5))
        return op, sol

    def test_holds_with_all_hypotheses(self):
        op, sol = self._solution()
        v = verify_weak_minimum(op, sol)
        assert v.conclusion == HOLDS
        assert v.applicability == THEOREM_APPLIES
        assert not v.internal_inconsistency
        assert float(np.min(sol.values)) >= -1e-8

    def test_undeclared_positive_c_fails_hypothesis(self):
        # the actual coefficient exceeds its declared upper bound
        from nonlocallab import DiffusionCoefficients, LinearCoefficients, OperatorSpec
        g = Grid(1, 20.0, 257)
        op = OperatorSpec(
            diffusion=DiffusionCoefficients.constant(1.0),
            kernel=KernelSpec.gaussian(1.0),
            linear=LinearCoefficients(c=lambda x, t: 0.4 + 0.0 * np.asarray(x),
                                      d=lambda x, t: 0.0 * np.asarray(x),
                                      C=0.0, D=0.0))
        sol = solve_ibvp(op, bump_datum(g), SolverConfig(dt=5e-3, t_final=0.2))
        v = verify_weak_minimum(op, sol)
        assert not v.hypotheses.item("c_bounded_above").passed
        assert v.applicability == HYPOTHESES_FAIL

    def test_negative_datum_violates_conclusion(self):
        g = Grid(1, 20.0, 257)
        op = make_operator("linear", KernelSpec.gaussian(1.0),
                           diffusion=1.0, c=-0.5, d=0.0)
        u0 = discretize(g, lambda x, t: -np.exp(-0.5 * np.asarray(x) ** 2))
        sol = solve_ibvp(op, u0, SolverConfig(dt=5e-3, t_final=0.2))
        v = verify_weak_minimum(op, sol)
        assert v.conclusion == VIOLATED
        assert not v.hypotheses.item("boundary_nonnegative").passed
        # a failed hypothesis explains the violation: no inconsistency
        assert not v.internal_inconsistency
        assert v.witness is not None

    def test_strong_minimum_positive_inside(self):
        op, sol = self._solution()
        sm = strong_minimum_check(op, sol, t_probe=0.25)
        assert sm.kind == "STRICTLY_POSITIVE"
        assert sm.passed

    def test_strong_minimum_zero_branch(self):
        g = Grid(1, 20.0, 257)
        op = make_operator("linear", KernelSpec.gaussian(1.0),
                           diffusion=1.0, c=-0.5, d=0.3)
        zero = discretize(g, lambda x, t: 0.0 * np.asarray(x))
        sol = solve_ibvp(op, zero, SolverConfig(dt=5e-3, t_final=0.2))
        sm = strong_minimum_check(op, sol, t_probe=0.1)
        assert sm.kind == "IDENTICALLY_ZERO"
        assert sm.passed


class TestAuxiliaryTransform:
    def test_reference_rate_value(self):
        # constant unit diffusion, no drift, c=0, d=1, unit gaussian kernel:
        # 0 + 0 + 2*1*1 + 3*1*(1+1) + 1 = 9
        assert formulaic_nu(1.0, 0.0, 0.0, 1.0, 1, 1.0, 1.0) == 9.0

    def test_formulaic_rate_suffices(self):
        g = Grid(1, 20.0, 513)
        op = make_operator("linear", KernelSpec.gaussian(1.0),
                           diffusion=1.0, c=0.0, d=1.0)
        aux = auxiliary_transform(op, g)
        assert aux.nu == 9.0
        assert aux.nu_formulaic
        assert aux.transformed_constant_max < 0.0

    def test_transform_fields_shapes(self):
        g = Grid(1, 10.0, 65)
        op = make_operator("linear", KernelSpec.box(1.0),
                           diffusion=0.5, c=-1.0, d=0.2)
        aux = auxiliary_transform(op, g)
        assert aux.theta.values.shape == g.shape
        assert aux.bbar.shape == g.shape + (1,)
        assert np.all(aux.theta.values > 0.0)
        assert np.all(aux.theta.values <= 1.0)

    def test_divergent_kernel_rejected(self):
        from nonlocallab import NuInsufficientError
        g = Grid(1, 10.0, 65)
        op = make_operator("linear", KernelSpec.cauchy(1.0),
                           diffusion=1.0, c=0.0, d=1.0)
        with pytest.raises(NuInsufficientError):
            auxiliary_transform(op, g)


class TestComparison:
    def _pair(self, op, g, low_amp, up_amp, dt=5e-3, t_final=0.4):
        cfg = SolverConfig(dt=dt, t_final=t_final)
        low = solve_ibvp(op, bump_datum(g, low_amp, 1.0), cfg)
        up = solve_ibvp(op, bump_datum(g, up_amp, 2.0), cfg)
        return low, up

    def test_ordered_pair_holds(self):
        g = Grid(1, 20.0, 257)
        op = make_operator("fkpp-clipped", KernelSpec.gaussian(1.0), D=1.0)
        low, up = self._pair(op, g, 0.3, 0.6)
        v = verify_comparison(op, low, up)
        assert v.conclusion == HOLDS
        assert v.applicability == THEOREM_APPLIES

    def test_integrable_regime(self):
        g = Grid(1, 20.0, 257)
        op = make_operator("fkpp-clipped", KernelSpec.gaussian(1.0), D=1.0)
        low, up = self._pair(op, g, 0.3, 0.6)
        v = verify_comparison(op, low, up, regime="integrable-kernel")
        assert v.conclusion == HOLDS
        assert v.hypotheses.item("uniform_parabolicity").passed

    def test_unordered_boundary_detected(self):
        g = Grid(1, 20.0, 257)
        op = make_operator("fkpp-clipped", KernelSpec.gaussian(1.0), D=1.0)
        low, up = self._pair(op, g, 0.6, 0.3)  # deliberately swapped
        v = verify_comparison(op, low, up)
        assert not v.hypotheses.item("boundary_ordering").passed
        assert v.conclusion == VIOLATED
        assert not v.internal_inconsistency

    def test_non_monotone_reaction_flagged(self):
        g = Grid(1, 20.0, 257)
        op = make_operator("fkpp-nonlocal", KernelSpec.gaussian(1.0), D=1.0)
        low, up = self._pair(op, g, 0.3, 0.6, t_final=0.2)
        v = verify_comparison(op, low, up)
        assert not v.hypotheses.item("monotone_in_v").passed
        assert v.hypotheses.item("monotone_in_v").witness is not None


class TestCounterexample:
    def test_front_depletion_quadrature(self):
        # box(1): half mass 0.5 plus the overlap integral 0.5 * 0.5
        assert front_value_integral() == pytest.approx(0.5)
        ju0 = nonlocal_front_depletion(KernelSpec.box(1.0))
        assert ju0 == pytest.approx(0.75, abs=1e-10)

    def test_front_profile_shape(self):
        assert front(-1.0) == 1.0
        assert front(0.0) == 1.0
        assert front(1.0) == 0.0
        assert front(2.0) == 0.0
        assert front(0.5) == pytest.approx(0.5)

    def test_reproduction_box_kernel(self):
        cfg = CounterexampleConfig(kernel=KernelSpec.box(1.0),
                                   npoints=1024, dt=1e-3, t_final=0.5)
        rep = reproduce_counterexample(cfg)
        assert rep.predictor == pytest.approx(0.25, abs=1e-10)
        assert rep.relative_gap <= 0.2
        assert 0.0 < rep.exceedance_time <= 0.5
        assert rep.max_u > 1.0 + cfg.delta

    def test_no_exceedance_raises(self):
        cfg = CounterexampleConfig(kernel=KernelSpec.box(1.0),
                                   npoints=1025, dt=1e-3, t_final=0.002,
                                   delta=0.5)
        with pytest.raises(NoExceedanceError) as exc:
            reproduce_counterexample(cfg)
        assert exc.value.max_value is not None

    def test_unnormalized_kernel_rejected(self):
        cfg = CounterexampleConfig(kernel=KernelSpec.box(1.0, height=0.3))
        with pytest.raises(ValueError):
            reproduce_counterexample(cfg)


class TestInvariantRegion:
    def test_front_stays_in_unit_interval(self):
        cfg = InvariantRegionConfig(kernel=KernelSpec.box(1.0),
                                    npoints=1024, dt=2e-3, t_final=1.0)
        rep = invariant_region_check(cfg)
        assert rep.passed
        assert rep.min_u_clipped >= -1e-6 and rep.max_u_clipped <= 1.0 + 1e-6
        assert rep.min_u_plain >= -1e-6 and rep.max_u_plain <= 1.0 + 1e-6
        assert rep.max_gap <= 1e-6

    def test_datum_outside_unit_interval_rejected(self):
        cfg = InvariantRegionConfig(
            kernel=KernelSpec.box(1.0), npoints=512,
            u0=lambda x, t: 2.0 * front(x))
        with pytest.raises(ValueError):
            invariant_region_check(cfg)
