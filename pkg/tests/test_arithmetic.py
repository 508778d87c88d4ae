import math
from fractions import Fraction

import pytest

from rotsum.arithmetic import (
    BUILTIN_POINTS,
    E_MINUS_2,
    GOLDEN_MEAN,
    PI_MINUS_3,
    SQRT2_MINUS_1,
    PrecisionExhausted,
    UnitPoint,
    continued_fraction,
    estimate_levy_constant,
    is_badly_approximable,
    levy_ratio,
    parse_unit_point,
)

TAU = 12 * math.log(2) / math.pi**2


def euclid_expansion(num: int, den: int, depth: int):
    """Oracle: integer Euclidean algorithm for num/den in [0, 1)."""
    coeffs, denoms = [], []
    q_prev, q_cur = 0, 1
    p, q = num, den
    for _ in range(depth):
        if p == 0:
            break
        a, r = divmod(q, p)
        coeffs.append(a)
        q_prev, q_cur = q_cur, a * q_cur + q_prev
        denoms.append(q_cur)
        p, q = r, p
    return coeffs, denoms


def test_golden_mean_coefficients():
    cf = continued_fraction(GOLDEN_MEAN, 8)
    assert cf.coefficients == (1,) * 8
    assert not cf.terminated


def test_e_minus_2_coefficients():
    cf = continued_fraction(E_MINUS_2, 8)
    assert cf.coefficients == (1, 2, 1, 1, 4, 1, 1, 6)


def test_rational_terminates_with_flag():
    cf = continued_fraction(UnitPoint.from_fraction(Fraction(1, 2)), 8)
    assert cf.coefficients == (2,)
    assert cf.terminated


def test_pi_minus_3_against_integer_oracle():
    # oracle first: exact Euclid on a 50-digit rational approximation
    approx = Fraction("0.14159265358979323846264338327950288419716939937511")
    coeffs, denoms = euclid_expansion(approx.numerator, approx.denominator, 4)
    assert coeffs == [7, 15, 1, 292]
    assert denoms == [7, 106, 113, 33102]
    cf = continued_fraction(PI_MINUS_3, 4)
    assert cf.coefficients == tuple(coeffs)
    assert cf.denominators == tuple(denoms)


def test_exhaustive_rationals_match_oracle():
    for q in range(2, 201):
        for p in range(1, q):
            if math.gcd(p, q) != 1:
                continue
            cf = continued_fraction(UnitPoint.from_fraction(Fraction(p, q)), 40)
            coeffs, denoms = euclid_expansion(p, q, 40)
            assert list(cf.coefficients) == coeffs
            assert list(cf.denominators) == denoms
            assert cf.terminated
            # convergent recursion and coprimality
            q_prev, q_cur = 0, 1
            p_prev, p_cur = 1, 0
            for a, (pk, qk) in zip(cf.coefficients, cf.convergents):
                p_prev, p_cur = p_cur, a * p_cur + p_prev
                q_prev, q_cur = q_cur, a * q_cur + q_prev
                assert (pk, qk) == (p_cur, q_cur)
                assert math.gcd(pk, qk) == 1
            assert cf.convergents[-1] == (p, q)


def test_denominators_strictly_increase_from_second():
    for point in BUILTIN_POINTS.values():
        qs = continued_fraction(point, 30).denominators
        for k in range(1, len(qs)):
            assert qs[k] > qs[k - 1] or k == 1 and qs[k] >= qs[k - 1]
        assert all(qs[k] > qs[k - 1] for k in range(2, len(qs)))


def test_approximation_quality_bound():
    for point in BUILTIN_POINTS.values():
        cf = continued_fraction(point, 30)
        x = point.value
        for k in range(cf.depth - 1):
            p, q = cf.convergents[k]
            q_next = cf.convergents[k + 1][1]
            assert abs(x - Fraction(p, q)) < Fraction(1, q * q_next)


def test_quadratic_irrationals_periodic():
    assert set(continued_fraction(SQRT2_MINUS_1, 40).coefficients) == {2}
    assert set(continued_fraction(GOLDEN_MEAN, 40).coefficients) == {1}


def test_badly_approximable_classification():
    golden = continued_fraction(GOLDEN_MEAN, 40)
    e2 = continued_fraction(E_MINUS_2, 40)
    sqrt2 = continued_fraction(SQRT2_MINUS_1, 40)
    assert is_badly_approximable(golden, 5)
    assert not is_badly_approximable(e2, 5)
    assert is_badly_approximable(sqrt2, 5)


def test_float_precision_exhausts():
    x = UnitPoint.from_float(math.pi - 3)
    with pytest.raises(PrecisionExhausted):
        continued_fraction(x, 40)


def test_precision_exhausted_mentions_position():
    x = UnitPoint.from_decimal("0.141592", exact=False)
    with pytest.raises(PrecisionExhausted, match="coefficient"):
        continued_fraction(x, 30)


def test_levy_ratio_golden_approaches_inverse_log_phi():
    target = 1.0 / math.log((1 + math.sqrt(5)) / 2)
    r60 = levy_ratio(GOLDEN_MEAN, 60)
    r120 = levy_ratio(GOLDEN_MEAN, 120)
    assert abs(r120 - target) / target < 0.01
    assert abs(r120 - target) < abs(r60 - target)  # monotone approach


def test_levy_estimate_hits_analytic_value():
    est = estimate_levy_constant(10_000, 30, rng_seed=7)
    assert abs(est.tau_hat - TAU) / TAU < 0.01
    assert est.std_error is not None and est.std_error < 0.01
    assert est.sample_count == 10_000


def test_levy_estimate_deterministic():
    a = estimate_levy_constant(500, 20, rng_seed=123)
    b = estimate_levy_constant(500, 20, rng_seed=123)
    assert a.tau_hat == b.tau_hat and a.std_error == b.std_error
    c = estimate_levy_constant(500, 20, rng_seed=124)
    assert c.tau_hat != a.tau_hat


def test_levy_estimate_single_sample_has_no_stderr():
    est = estimate_levy_constant(1, 30, rng_seed=7)
    assert est.std_error is None
    assert est.tau_hat > 0


def test_unit_point_validation():
    with pytest.raises(ValueError):
        UnitPoint.from_fraction(Fraction(3, 2))
    with pytest.raises(ValueError):
        UnitPoint.from_float(-0.1)


def test_parse_unit_point():
    assert parse_unit_point("golden") is GOLDEN_MEAN
    assert float(parse_unit_point("0.25")) == 0.25
    with pytest.raises(ValueError):
        parse_unit_point("not-a-number")


def test_depth_validation():
    with pytest.raises(ValueError):
        continued_fraction(GOLDEN_MEAN, 0)
