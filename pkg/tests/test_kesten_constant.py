import math

import numpy as np
import pytest

from rotsum.arithmetic import estimate_levy_constant
from rotsum.kesten_constant import (
    TAU_ANALYTIC,
    closed_form_on_triangle,
    compute_I,
    compute_rho,
    integrand_series,
    kesten_report,
)

I_EXACT = math.pi**2 / 24
RHO_EXACT = 4 * math.pi


class TestIntegrandSeries:
    def test_zero_on_axis(self):
        for y in (0.1, 0.37, 0.9):
            assert integrand_series(0.0, y, 100) == 0.0

    def test_quarter_point_classical_sum(self):
        # sin(pi k / 2)^2 = 1 for odd k, 0 for even: sum over odd k of k^-2
        brute = float(np.sum(1.0 / np.arange(1, 10**6, 2, dtype=float) ** 2))
        assert brute == pytest.approx(math.pi**2 / 8, abs=1e-6)
        assert integrand_series(0.25, 0.25, 10**6) == pytest.approx(math.pi**2 / 8, abs=1e-6)

    def test_truncation_tail_bound(self):
        a = integrand_series(0.1, 0.3, 10**4)
        b = integrand_series(0.1, 0.3, 10**5)
        assert abs(a - b) <= 1e-4

    def test_eightfold_symmetry(self, rng42):
        for _ in range(20):
            x, y = rng42.random(2)
            base = abs(integrand_series(x, y, 400))
            assert abs(integrand_series(y, x, 400)) == pytest.approx(base, abs=1e-12)
            assert abs(integrand_series(1 - x, y, 400)) == pytest.approx(base, abs=1e-9)
            assert abs(integrand_series(x, 1 - y, 400)) == pytest.approx(base, abs=1e-9)


class TestClosedForm:
    def test_boundary_zeros(self):
        assert closed_form_on_triangle(0.3, 0.0) == 0.0
        assert closed_form_on_triangle(0.5, 0.2) == 0.0

    def test_interior_value_matches_series_oracle(self):
        value = closed_form_on_triangle(0.25, 0.1)
        assert value == pytest.approx(math.pi**2 * 0.05, rel=1e-12)
        assert abs(integrand_series(0.25, 0.1, 10**6)) == pytest.approx(value, abs=2e-6)

    def test_matches_series_at_random_interior_points(self, rng42):
        for _ in range(50):
            x = 0.5 * rng42.random()
            y = x * rng42.random()
            series = integrand_series(x, y, 20_000)
            assert abs(series) == pytest.approx(closed_form_on_triangle(x, y), abs=2e-4)

    def test_outside_triangle_rejected(self):
        with pytest.raises(ValueError):
            closed_form_on_triangle(0.7, 0.1)
        with pytest.raises(ValueError):
            closed_form_on_triangle(0.3, 0.4)


class TestComputeI:
    def test_closed_form_is_exact(self):
        res = compute_I("closed-form")
        assert res.value == pytest.approx(I_EXACT, rel=1e-15)
        assert res.error_bound == 0.0

    def test_quadrature_default(self):
        res = compute_I("quadrature", K=10_000, panels=256)
        assert abs(res.value - I_EXACT) <= 1e-4
        assert abs(res.value - I_EXACT) <= res.error_bound
        assert res.error_bound <= 1e-3

    def test_quadrature_loose_truncation(self):
        res = compute_I("quadrature", K=10, panels=64)
        assert abs(res.value - I_EXACT) <= 0.1
        assert abs(res.value - I_EXACT) <= res.error_bound

    def test_methods_agree_within_bounds(self):
        closed = compute_I("closed-form")
        quad = compute_I("quadrature", K=5000, panels=128)
        assert abs(closed.value - quad.value) <= closed.error_bound + quad.error_bound

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            compute_I("monte-carlo")


class TestComputeRho:
    def test_analytic_combination_is_4pi(self):
        rho = compute_rho(TAU_ANALYTIC, compute_I("closed-form"))
        assert abs(rho - RHO_EXACT) / RHO_EXACT <= 1e-12

    def test_estimated_tau_within_tolerance(self):
        est = estimate_levy_constant(10_000, 30, rng_seed=7)
        rho = compute_rho(est, compute_I("closed-form"))
        assert abs(rho - RHO_EXACT) / RHO_EXACT <= 0.015

    def test_homogeneity(self):
        rho1 = compute_rho(TAU_ANALYTIC, I_EXACT)
        rho2 = compute_rho(2 * TAU_ANALYTIC, I_EXACT)
        assert rho2 == pytest.approx(rho1 / 2, rel=1e-15)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            compute_rho(0.0, I_EXACT)


def test_kesten_report_rows():
    rows = kesten_report(seed=None)
    assert {(r.tau_source, r.I_method) for r in rows} == {
        ("analytic", "closed-form"), ("analytic", "quadrature")}
    rows = kesten_report(seed=7, n_samples=500, depth=20, K=2000, panels=64)
    assert len(rows) == 4
    for row in rows:
        assert row.rho > 0
        assert abs(row.rho_relative_error) < 0.15
