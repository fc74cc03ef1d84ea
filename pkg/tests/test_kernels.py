import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nonlocallab import (
    DIVERGENT,
    Grid,
    KernelSpec,
    NegativeKernelError,
    classify_kernel,
    effective_radius,
    eval_kernel,
    jquotient_bound_check,
    kernel_norms,
)


class TestMoments:
    def test_gaussian_unit(self):
        m = kernel_norms(KernelSpec.gaussian(1.0))
        assert m.l1_norm == pytest.approx(1.0, abs=1e-12)
        assert m.second_moment == pytest.approx(1.0, abs=1e-12)
        assert m.normalized and m.is_even

    def test_gaussian_sigma_scaling(self):
        m = kernel_norms(KernelSpec.gaussian(2.5))
        assert m.second_moment == pytest.approx(2.5**2, rel=1e-10)

    def test_box_default_height_is_density(self):
        m = kernel_norms(KernelSpec.box(1.0))
        assert m.l1_norm == pytest.approx(1.0)
        assert m.second_moment == pytest.approx(1.0 / 3.0)

    def test_box_explicit_height(self):
        # mass 2kh, second moment 2hk^3/3
        m = kernel_norms(KernelSpec.box(2.0, height=0.5))
        assert m.l1_norm == pytest.approx(2.0)
        assert m.second_moment == pytest.approx(0.5 * 2.0 * 8.0 / 3.0)

    def test_triangle_second_moment(self):
        m = kernel_norms(KernelSpec.triangle(3.0))
        assert m.l1_norm == pytest.approx(1.0)
        assert m.second_moment == pytest.approx(9.0 / 6.0)

    def test_exponential_second_moment(self):
        m = kernel_norms(KernelSpec.exponential(2.0))
        assert m.l1_norm == pytest.approx(1.0)
        assert m.second_moment == pytest.approx(2.0 / 4.0)

    def test_cauchy_divergent_second_moment(self):
        m = kernel_norms(KernelSpec.cauchy(1.0))
        assert m.l1_norm == pytest.approx(1.0)
        assert m.second_moment == DIVERGENT
        assert not m.second_moment_finite
        # the increasing-cutoff quadrature recorded the runaway partials
        assert len(m.divergence_evidence) >= 2
        radii = [r for r, _ in m.divergence_evidence]
        assert radii == sorted(radii)

    def test_tabulated_matches_closed_form(self):
        xs = np.linspace(-8.0, 8.0, 3201)
        vals = np.exp(-0.5 * xs**2) / math.sqrt(2.0 * math.pi)
        kern = KernelSpec.tabulated(float(xs[1] - xs[0]), vals)
        m = kernel_norms(kern)
        assert m.l1_norm == pytest.approx(1.0, abs=1e-4)
        assert m.second_moment == pytest.approx(1.0, abs=1e-2)

    def test_radial_2d_gaussian(self):
        m = kernel_norms(KernelSpec.gaussian(1.0, dimension=2))
        # 2D integral of the 1D profile rotated: int_0^inf p(r) 2 pi r dr
        assert m.l1_norm == pytest.approx(math.sqrt(2.0 * math.pi), rel=1e-6)


class TestValidation:
    def test_negative_tabulated_rejected(self):
        with pytest.raises(NegativeKernelError):
            KernelSpec.tabulated(0.1, [0.0, 1.0, -0.5, 1.0, 0.0])

    def test_even_sample_count_rejected(self):
        with pytest.raises(ValueError):
            KernelSpec.tabulated(0.1, [0.0, 1.0, 1.0, 0.0])

    def test_bad_params(self):
        with pytest.raises(ValueError):
            KernelSpec.gaussian(-1.0)
        with pytest.raises(ValueError):
            KernelSpec.box(0.0)
        with pytest.raises(ValueError):
            KernelSpec("lorentz", 1, ())

    def test_from_text_roundtrip(self, tmp_path):
        xs = np.linspace(-2.0, 2.0, 41)
        vals = np.maximum(0.0, 1.0 - np.abs(xs) / 2.0) / 2.0
        path = tmp_path / "kern.txt"
        np.savetxt(path, np.column_stack([xs, vals]))
        kern = KernelSpec.from_text(path)
        assert kern.family == "tabulated"
        assert eval_kernel(kern, 0.0) == pytest.approx(0.5)
        assert eval_kernel(kern, 3.0) == 0.0


class TestEval:
    @given(st.floats(-10.0, 10.0))
    @settings(max_examples=50, deadline=None)
    def test_closed_families_even(self, x):
        for kern in (KernelSpec.gaussian(1.3), KernelSpec.box(0.7),
                     KernelSpec.triangle(2.0), KernelSpec.exponential(1.1)):
            assert eval_kernel(kern, x) == pytest.approx(eval_kernel(kern, -x))

    @given(st.floats(-5.0, 5.0))
    @settings(max_examples=50, deadline=None)
    def test_nonnegative(self, x):
        for kern in (KernelSpec.gaussian(0.5), KernelSpec.cauchy(2.0)):
            assert eval_kernel(kern, x) >= 0.0

    def test_vectorized_matches_scalar(self):
        kern = KernelSpec.triangle(1.5)
        xs = np.linspace(-3, 3, 17)
        vec = eval_kernel(kern, xs)
        assert np.allclose(vec, [eval_kernel(kern, float(x)) for x in xs])

    def test_2d_radial(self):
        kern = KernelSpec.gaussian(1.0, dimension=2)
        assert eval_kernel(kern, (3.0, 4.0)) == pytest.approx(
            float(kern.profile(5.0)))


class TestClassification:
    def test_gaussian_all_conditions(self):
        cert = classify_kernel(KernelSpec.gaussian(1.0))
        for cond in ("integrable_nonnegative", "second_moment_finite",
                     "integrable_only", "even_normalized_overlap"):
            assert cert.passes(cond)

    def test_cauchy_fails_second_moment_only(self):
        cert = classify_kernel(KernelSpec.cauchy(1.0))
        assert cert.passes("integrable_nonnegative")
        assert cert.passes("integrable_only")
        assert not cert.passes("second_moment_finite")

    def test_small_support_fails_overlap(self):
        cert = classify_kernel(KernelSpec.box(0.25), overlap_halfwidth=1.0)
        assert not cert.passes("even_normalized_overlap")
        assert cert.passes("second_moment_finite")

    def test_unnormalized_fails_overlap(self):
        cert = classify_kernel(KernelSpec.box(1.0, height=0.75))
        assert not cert.passes("even_normalized_overlap")


class TestEffectiveRadius:
    def test_compact_support_exact(self):
        assert effective_radius(KernelSpec.box(1.5)) == 1.5
        assert effective_radius(KernelSpec.triangle(2.0)) == 2.0

    def test_gaussian_bracket(self):
        r = effective_radius(KernelSpec.gaussian(1.0), tail_fraction=1e-8)
        assert 5.0 < r < 7.0


class TestQuotientBound:
    def test_gaussian_bound_six(self):
        grid = Grid(1, 20.0, 1024)
        rep = jquotient_bound_check(KernelSpec.gaussian(1.0), grid)
        assert rep.bound == pytest.approx(6.0)
        assert rep.measured_max <= rep.bound + 1e-6

    def test_box_bound_four(self):
        grid = Grid(1, 20.0, 1024)
        rep = jquotient_bound_check(KernelSpec.box(1.0), grid)
        assert rep.bound == pytest.approx(4.0)
        assert rep.measured_max <= rep.bound + 1e-6

    def test_divergent_moment_rejected(self):
        from nonlocallab import DivergentMomentError
        with pytest.raises(DivergentMomentError):
            jquotient_bound_check(KernelSpec.cauchy(1.0), Grid(1, 10.0, 64))

    def test_2d_bound(self):
        grid = Grid(2, 5.0, 24, far_field=((0.0, 0.0), (0.0, 0.0)))
        kern = KernelSpec.gaussian(1.0, dimension=2)
        m = kernel_norms(kern)
        rep = jquotient_bound_check(kern, grid)
        assert rep.bound == pytest.approx(3.0 * (m.l1_norm + m.second_moment))
        assert rep.measured_max <= rep.bound + 1e-6
