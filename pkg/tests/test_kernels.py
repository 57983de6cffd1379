"""Kernels and rates: pointwise values, mass balance, envelopes, invariants."""

import numpy as np
import pytest

from fragkit.errors import InvalidKernelError
from fragkit.kernels import (FragmentKernel, RateFunction, classify_mass,
                             eval_kernel, eval_rate, mass_integral, rate_envelope)


class TestRateEvaluation:
    def test_power_identity(self):
        assert eval_rate(RateFunction.power(1.0), 3.0) == 3.0

    def test_power_zero_exponent_is_constant_one(self):
        assert eval_rate(RateFunction.power(0.0), 7.0) == 1.0

    def test_tabulated_midpoint(self):
        rate = RateFunction.tabulated([(0.0, 0.0), (2.0, 4.0)])
        assert eval_rate(rate, 1.0) == 2.0

    def test_negative_table_rejected(self):
        with pytest.raises(InvalidKernelError):
            RateFunction.tabulated([(0.0, 1.0), (1.0, -0.5)])

    def test_negative_power_rejected(self):
        with pytest.raises(InvalidKernelError):
            RateFunction.power(-1.0)


class TestRateEnvelope:
    def test_monotone_rate_is_its_own_envelope(self):
        assert rate_envelope(RateFunction.power(2.0), 3.0) == 9.0

    def test_tabulated_running_max(self):
        # peak at x=0 dominates the later dip and rise
        rate = RateFunction.tabulated([(0.0, 5.0), (1.0, 1.0), (2.0, 3.0)])
        assert rate_envelope(rate, 1.5) == 5.0

    def test_constant(self):
        rate = RateFunction.constant(4.0)
        for x in (0.1, 1.0, 37.0):
            assert rate_envelope(rate, x) == 4.0

    def test_envelope_dominates_and_is_nondecreasing(self):
        rng = np.random.default_rng(11)
        for rate in (RateFunction.tabulated([(0.0, 2.0), (0.5, 0.1), (1.0, 3.0), (4.0, 1.0)]),
                     RateFunction.custom(lambda x: 2.0 + np.sin(3.0 * x))):
            xs = np.sort(rng.uniform(0.01, 6.0, size=400))
            env = rate_envelope(rate, xs)
            assert np.all(np.diff(env) >= -1e-12)
            assert np.all(env >= eval_rate(rate, xs) - 1e-12)


class TestKernelEvaluation:
    def test_boundary_binary_pieces(self):
        bb = FragmentKernel.boundary_binary()
        assert eval_kernel(bb, 0.5, 5.0) == 1.0
        assert eval_kernel(bb, 2.5, 5.0) == 0.0
        assert eval_kernel(bb, 4.5, 5.0) == 1.0
        assert eval_kernel(bb, 1.0, 1.5) == pytest.approx(2.0 / 1.5)

    def test_concentrated_pieces(self):
        conc = FragmentKernel.concentrated()
        assert eval_kernel(conc, 3.9, 4.0) == 4.0
        assert eval_kernel(conc, 2.0, 4.0) == 0.0
        assert eval_kernel(conc, 0.3, 4.0) == 0.0
        assert eval_kernel(conc, 0.1, 4.0) == 4.0

    def test_homogeneous_value(self):
        hom = FragmentKernel.homogeneous_power(0.0)
        assert eval_kernel(hom, 1.0, 4.0) == 0.5

    def test_support_rule_random(self):
        rng = np.random.default_rng(42)
        y = rng.uniform(0.1, 50.0, size=10_000)
        x = y * rng.uniform(1.0 + 1e-12, 3.0, size=y.size)  # strictly above support
        for kern in (FragmentKernel.homogeneous_power(-0.7),
                     FragmentKernel.boundary_binary(),
                     FragmentKernel.concentrated()):
            vals = eval_kernel(kern, x, y)
            assert np.all(vals == 0.0)

    def test_homogeneous_scaling(self):
        hom = FragmentKernel.homogeneous_power(-1.3)
        rng = np.random.default_rng(5)
        x = rng.uniform(0.01, 1.0, size=1000)
        y = x * rng.uniform(1.0, 10.0, size=x.size)
        lam = rng.uniform(0.1, 100.0, size=x.size)
        lhs = eval_kernel(hom, lam * x, lam * y) * lam
        rhs = eval_kernel(hom, x, y)
        np.testing.assert_allclose(lhs, rhs, rtol=1e-12)

    def test_nonpositive_parent_rejected(self):
        with pytest.raises(InvalidKernelError):
            eval_kernel(FragmentKernel.boundary_binary(), 0.5, 0.0)

    def test_invalid_nu_rejected(self):
        with pytest.raises(InvalidKernelError):
            FragmentKernel.homogeneous_power(-2.0)
        with pytest.raises(InvalidKernelError):
            FragmentKernel.homogeneous_power(0.5)


class TestMassIntegral:
    def test_boundary_binary_conserves(self):
        m = mass_integral(FragmentKernel.boundary_binary(), 5.0)
        assert m.exact
        assert m.value == pytest.approx(5.0, rel=1e-14)

    def test_homogeneous_conserves(self):
        m = mass_integral(FragmentKernel.homogeneous_power(-1.0), 2.0)
        assert m.value == pytest.approx(2.0, rel=1e-14)

    def test_zero_kernel(self):
        m = mass_integral(FragmentKernel.zero(), 3.0)
        assert m.value == pytest.approx(0.0, abs=1e-15)

    def test_quadrature_path_matches_closed_form(self):
        # force the generic path by a custom clone of the homogeneous kernel
        nu = -0.5
        clone = FragmentKernel.custom(
            lambda x, y: (nu + 2.0) * np.where(x > 0, x, np.nan) ** nu / y ** (nu + 1.0))
        m = mass_integral(clone, 3.0)
        assert not m.exact
        assert m.value == pytest.approx(3.0, rel=1e-9)

    def test_mass_homogeneity(self):
        hom = FragmentKernel.homogeneous_power(-0.5)
        rng = np.random.default_rng(3)
        for _ in range(20):
            y = rng.uniform(0.1, 5.0)
            lam = rng.uniform(0.5, 20.0)
            m1 = mass_integral(hom, lam * y).value
            m2 = lam * mass_integral(hom, y).value
            np.testing.assert_allclose(m1, m2, rtol=1e-12)

    def test_partial_mass_matches_quadrature(self):
        from fragkit.quadrature import integrate
        for kern in (FragmentKernel.boundary_binary(), FragmentKernel.concentrated(),
                     FragmentKernel.homogeneous_power(-1.2)):
            for y in (1.1, 3.0, 8.0):
                for s in (0.3 * y, 0.8 * y, y):
                    ref, _ = integrate(lambda x: eval_kernel(kern, x, y) * x, 0.0, s,
                                       breakpoints=kern.breakpoints(y), grade_lo=True)
                    np.testing.assert_allclose(kern.mass_partial(s, y), ref,
                                               rtol=1e-8, atol=1e-12)


class TestClassifyMass:
    def test_boundary_binary_conserving(self):
        rep = classify_mass(FragmentKernel.boundary_binary(), [3.0, 5.0, 10.0], tol=1e-8)
        assert rep.classification == "conserving"

    def test_homogeneous_conserving(self):
        rep = classify_mass(FragmentKernel.homogeneous_power(-0.5), [1.0, 10.0], tol=1e-8)
        assert rep.classification == "conserving"

    def test_sub_conserving_kernel(self):
        # b(x,y) = x/y^2 has m(y) = y/3 (hand integral of x^2/y^2)
        kern = FragmentKernel.custom(lambda x, y: x / y**2)
        rep = classify_mass(kern, [1.0, 2.0], tol=1e-8)
        assert rep.classification == "sub_conserving"
        np.testing.assert_allclose(rep.m_values, [1.0 / 3.0, 2.0 / 3.0], rtol=1e-9)

    def test_violating_kernel(self):
        kern = FragmentKernel.custom(lambda x, y: 3.0 * x / y**2)  # m(y) = y
        rep = classify_mass(kern, [1.0, 4.0], tol=1e-8)
        assert rep.classification == "conserving"
        kern2 = FragmentKernel.custom(lambda x, y: 4.0 * x / y**2)  # m(y) = 4y/3
        rep2 = classify_mass(kern2, [1.0, 4.0], tol=1e-8)
        assert rep2.classification == "violating"
        assert rep2.max_excess == pytest.approx(1.0 / 3.0, rel=1e-8)

    def test_empty_samples_rejected(self):
        with pytest.raises(InvalidKernelError):
            classify_mass(FragmentKernel.boundary_binary(), [])
