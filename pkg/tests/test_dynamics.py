import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rotsum.arithmetic import BUILTIN_POINTS, GOLDEN_MEAN, PI_MINUS_3, continued_fraction
from rotsum.dynamics import (
    Observable,
    OrbitSpec,
    ergodic_sum_final,
    ergodic_sum_series,
    evaluate,
    rotate,
)

SAW = Observable.sawtooth()


def exact_final(x0: float, alpha: float, T: int, observable: Observable) -> float:
    """Extended-precision oracle: the orbit of the exact rationals behind the
    float inputs, summed without rounding."""
    fx, fa = Fraction(x0), Fraction(alpha)
    den = math.lcm(fx.denominator, fa.denominator)
    n = fx.numerator * (den // fx.denominator)
    na = fa.numerator * (den // fa.denominator)
    if observable.kind == "sawtooth":
        total = 0
        for _ in range(T):
            total += n
            n += na
            if n >= den:
                n -= den
        return float(Fraction(total, den) - Fraction(T, 2))
    gamma = Fraction(observable.gamma)
    cut = gamma.numerator * (den // gamma.denominator) if den % gamma.denominator == 0 else None
    count = 0
    for _ in range(T):
        inside = n < cut if cut is not None else Fraction(n, den) < gamma
        count += inside
        n += na
        if n >= den:
            n -= den
    return float(count - T * gamma)


def test_rotate_trivial_cases():
    assert rotate(0.25, 0.5) == 0.75
    assert rotate(0.75, 0.5) == 0.25
    assert rotate(0.3, 0.0) == 0.3


def test_evaluate_trivial_cases():
    assert evaluate(SAW, 0.0) == -0.5
    ind = Observable.indicator(0.5)
    assert evaluate(ind, 0.25) == 0.5
    assert evaluate(ind, 0.75) == -0.5
    assert evaluate(ind, 0.5) == -0.5  # right endpoint excluded


def test_indicator_half_is_minus_sign_of_sawtooth_over_two():
    ind = Observable.indicator(0.5)
    for x in np.linspace(0.01, 0.99, 197):
        if x in (0.0, 0.5):
            continue
        assert evaluate(ind, x) == pytest.approx(-math.copysign(0.5, evaluate(SAW, x)))


def test_series_half_rotation_hand_values():
    series = ergodic_sum_series(OrbitSpec(0.0, 0.5, 4, SAW))
    assert list(series.times) == [1, 2, 3, 4]
    assert list(series.values) == [-0.5, -0.5, -1.0, -1.0]


def test_final_trivial_cases():
    assert ergodic_sum_final(OrbitSpec(0.0, 0.5, 4, SAW)) == -1.0
    assert ergodic_sum_final(OrbitSpec(0.3, 0.0, 10, SAW)) == pytest.approx(-2.0, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(
    x0=st.floats(0.0, 0.999999),
    alpha=st.floats(0.0, 0.999999),
    T=st.integers(1, 2000),
    kind=st.sampled_from(["sawtooth", "indicator"]),
)
def test_final_bit_identical_to_series_last(x0, alpha, T, kind):
    obs = SAW if kind == "sawtooth" else Observable.indicator(0.5)
    spec = OrbitSpec(x0, alpha, T, obs)
    series = ergodic_sum_series(spec)
    assert ergodic_sum_final(spec) == series.values[-1]


@settings(max_examples=20, deadline=None)
@given(x0=st.floats(0.0, 0.99), alpha=st.floats(0.0, 0.99), T=st.integers(10, 500))
def test_strided_series_subsamples_full(x0, alpha, T):
    spec = OrbitSpec(x0, alpha, T, SAW)
    full = ergodic_sum_series(spec)
    strided = ergodic_sum_series(spec, stride=7)
    assert strided.times[-1] == T
    lookup = dict(zip(full.times.tolist(), full.values.tolist()))
    for t, v in zip(strided.times, strided.values):
        assert v == lookup[int(t)]


def test_adjacent_pair_difference_is_observable():
    spec = OrbitSpec(0.1234, float(GOLDEN_MEAN), 500, SAW)
    series = ergodic_sum_series(spec)
    x = spec.x0
    for t in range(spec.T - 1):
        x_next = rotate(x, spec.alpha)
        diff = series.values[t + 1] - series.values[t]
        assert diff == pytest.approx(evaluate(SAW, x_next), abs=1e-12)
        x = x_next


@settings(max_examples=20, deadline=None)
@given(x0=st.floats(0.0, 0.99), alpha=st.floats(0.001, 0.99), T=st.integers(5, 300))
def test_coboundary_shift(x0, alpha, T):
    spec_old = OrbitSpec(x0, alpha, T + 1, SAW)
    spec_new = OrbitSpec(rotate(x0, alpha), alpha, T, SAW)
    old = ergodic_sum_series(spec_old)
    new = ergodic_sum_series(spec_new)
    shift = old.values[1:] - old.values[0]
    assert np.allclose(new.values, shift, atol=1e-10)


def test_golden_mean_sums_stay_bounded():
    series = ergodic_sum_series(OrbitSpec(0.0, float(GOLDEN_MEAN), 10**5, SAW))
    assert np.max(np.abs(series.values)) < 3.0


def test_pi_minus_3_bursts_with_convergent_period():
    # the denominator 33102 bounds |S| while the stretch in between swings wide
    series = ergodic_sum_series(OrbitSpec(0.0, float(PI_MINUS_3), 10**5, SAW))
    values = series.values
    assert abs(values[33102 - 1]) <= 1.0
    assert abs(values[2 * 33102 - 1]) <= 2.0
    assert np.max(np.abs(values[:33102])) > 20.0


def test_denjoy_koksma_at_convergent_denominators():
    for name in ("golden", "e-2"):
        alpha = BUILTIN_POINTS[name]
        denoms = [q for q in continued_fraction(alpha, 40).denominators if q <= 10**5]
        for x0 in (0.0, 0.137, 0.618):
            for q in denoms:
                s = ergodic_sum_final(OrbitSpec(x0, float(alpha), q, SAW))
                assert abs(s) <= 1.0, f"alpha={name} q={q} x0={x0}: {s}"


@pytest.mark.parametrize("T", [1 << 14, 1 << 16, 1 << 18])
def test_compensated_sum_tracks_exact_oracle(T):
    x0, alpha = 0.123456789, float(PI_MINUS_3)
    computed = ergodic_sum_final(OrbitSpec(x0, alpha, T, SAW))
    assert abs(computed - exact_final(x0, alpha, T, SAW)) < 1e-6


def test_indicator_matches_exact_oracle():
    obs = Observable.indicator(0.5)
    x0, alpha = 0.25, float(GOLDEN_MEAN)
    computed = ergodic_sum_final(OrbitSpec(x0, alpha, 4096, obs))
    assert computed == pytest.approx(exact_final(x0, alpha, 4096, obs), abs=1e-9)


def test_observable_validation():
    with pytest.raises(ValueError):
        Observable.indicator(1.5)
    with pytest.raises(ValueError):
        Observable("sawtooth", 0.3)
    with pytest.raises(ValueError):
        Observable("unknown")


def test_orbit_spec_validation():
    with pytest.raises(ValueError):
        OrbitSpec(0.0, 0.5, 0, SAW)
    with pytest.raises(ValueError):
        OrbitSpec(1.5, 0.5, 10, SAW)
