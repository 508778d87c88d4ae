"""Continued fractions, convergents, and the Khinchin-Levy constant.

Expansions are computed with exact rational interval arithmetic rather than
64-bit floats: the Gauss map loses roughly one coefficient's worth of
precision per step, so a double gives out after ~15 coefficients.  A
`UnitPoint` therefore carries an exact `Fraction` representative together
with an optional uncertainty radius (`digits` decimal places), and every
coefficient is emitted only when the whole uncertainty interval agrees on it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "PrecisionExhausted",
    "UnitPoint",
    "CFExpansion",
    "LevyEstimate",
    "continued_fraction",
    "is_badly_approximable",
    "levy_ratio",
    "estimate_levy_constant",
    "GOLDEN_MEAN",
    "E_MINUS_2",
    "PI_MINUS_3",
    "SQRT2_MINUS_1",
    "BUILTIN_POINTS",
    "parse_unit_point",
]


class PrecisionExhausted(ArithmeticError):
    """The uncertainty interval no longer determines the next coefficient."""


@dataclass(frozen=True)
class UnitPoint:
    """A point of the unit circle [0, 1).

    `value` is an exact rational representative.  When `digits` is None the
    point is the rational `value` itself; otherwise it stands for an unknown
    real within +/- 10**-digits of `value` (the case for irrational
    constants stored as decimal literals).
    """

    value: Fraction
    digits: int | None = None
    label: str | None = None

    def __post_init__(self):
        if not 0 <= self.value < 1:
            raise ValueError(f"unit point must lie in [0, 1), got {self.value}")

    @staticmethod
    def from_fraction(value: Fraction, label: str | None = None) -> "UnitPoint":
        return UnitPoint(Fraction(value), None, label)

    @staticmethod
    def from_decimal(literal: str, exact: bool = True, label: str | None = None) -> "UnitPoint":
        """Parse a decimal literal.  `exact=False` marks it as a truncated
        representation of an unknown real (uncertainty one unit in the last
        digit)."""
        frac = Fraction(literal)
        digits = None
        if not exact:
            point = literal.find(".")
            digits = 0 if point < 0 else len(literal) - point - 1
        return UnitPoint(frac, digits, label)

    @staticmethod
    def from_float(value: float, label: str | None = None) -> "UnitPoint":
        """Wrap a double.  The binary value is taken as the centre of a
        half-ulp uncertainty interval, since a float64 rarely denotes the
        exact dyadic rational it stores."""
        if not 0 <= value < 1:
            raise ValueError(f"unit point must lie in [0, 1), got {value}")
        # half-ulp expressed in decimal digits, conservatively
        digits = 16
        return UnitPoint(Fraction(value), digits, label)

    def __float__(self) -> float:
        return float(self.value)

    def interval(self) -> tuple[Fraction, Fraction]:
        if self.digits is None:
            return self.value, self.value
        eps = Fraction(1, 10**self.digits)
        return self.value - eps, self.value + eps


# Named constants used throughout the experiments, stored to 60 decimal
# digits so expansions and orbit parameters do not depend on caller precision.
GOLDEN_MEAN = UnitPoint.from_decimal(
    "0.618033988749894848204586834365638117720309179805762862135449", exact=False, label="golden"
)
E_MINUS_2 = UnitPoint.from_decimal(
    "0.718281828459045235360287471352662497757247093699959574966968", exact=False, label="e-2"
)
PI_MINUS_3 = UnitPoint.from_decimal(
    "0.141592653589793238462643383279502884197169399375105820974945", exact=False, label="pi-3"
)
SQRT2_MINUS_1 = UnitPoint.from_decimal(
    "0.414213562373095048801688724209698078569671875376948073176680", exact=False, label="sqrt2-1"
)

BUILTIN_POINTS = {
    "golden": GOLDEN_MEAN,
    "e-2": E_MINUS_2,
    "pi-3": PI_MINUS_3,
    "sqrt2-1": SQRT2_MINUS_1,
}


def parse_unit_point(spec: str) -> UnitPoint:
    """Resolve a CLI-style point spec: a builtin name or a decimal literal.

    Decimal literals are taken as exact rationals (`0.5` means 1/2)."""
    if spec in BUILTIN_POINTS:
        return BUILTIN_POINTS[spec]
    try:
        return UnitPoint.from_fraction(Fraction(spec))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"cannot parse unit point {spec!r}: "
                         f"expected one of {sorted(BUILTIN_POINTS)} or a decimal in [0,1)") from exc


@dataclass(frozen=True)
class CFExpansion:
    """Coefficients a_1..a_n of x = [0; a_1, a_2, ...] with convergents.

    `convergents[k-1] = (p_k, q_k)` follows q_k = a_k q_{k-1} + q_{k-2},
    q_0 = 1, q_{-1} = 0 (and p_0 = 0, p_{-1} = 1).  `terminated` is set when
    the remainder hit exactly zero before the requested depth (rational
    input)."""

    coefficients: tuple[int, ...]
    convergents: tuple[tuple[int, int], ...]
    source: UnitPoint
    depth: int
    terminated: bool = False

    @property
    def denominators(self) -> tuple[int, ...]:
        return tuple(q for _, q in self.convergents)


def continued_fraction(x: UnitPoint, depth: int) -> CFExpansion:
    """Expand `x` to at most `depth` coefficients with the Gauss map
    a_k = floor(1/r), r <- frac(1/r), carried out on the exact uncertainty
    interval of `x`.

    Raises PrecisionExhausted when the interval straddles a coefficient
    decision; returns early with `terminated=True` when the remainder is
    exactly zero (rational input)."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    lo, hi = x.interval()
    coeffs: list[int] = []
    convergents: list[tuple[int, int]] = []
    p_prev, p_cur = 1, 0  # p_{-1}, p_0
    q_prev, q_cur = 0, 1  # q_{-1}, q_0
    terminated = False
    for _ in range(depth):
        if hi == 0:
            terminated = True
            break
        if lo <= 0:
            # interval contains 0 but is not the point 0: cannot tell a huge
            # coefficient from rational termination
            raise PrecisionExhausted(
                f"remainder interval [{lo}, {hi}] straddles zero after "
                f"{len(coeffs)} coefficients")
        a_lo = hi.denominator // hi.numerator
        a_hi = lo.denominator // lo.numerator
        if a_lo != a_hi:
            raise PrecisionExhausted(
                f"coefficient {len(coeffs) + 1} undetermined: interval admits "
                f"{a_lo}..{a_hi}")
        a = a_lo
        lo, hi = 1 / hi - a, 1 / lo - a
        coeffs.append(a)
        p_prev, p_cur = p_cur, a * p_cur + p_prev
        q_prev, q_cur = q_cur, a * q_cur + q_prev
        convergents.append((p_cur, q_cur))
    return CFExpansion(tuple(coeffs), tuple(convergents), x, len(coeffs), terminated)


def is_badly_approximable(cf: CFExpansion, bound: int) -> bool:
    """Finite-depth surrogate for bounded partial quotients: true iff every
    computed coefficient is <= `bound`.  Says nothing about coefficients
    beyond `cf.depth`."""
    if cf.depth < 1:
        raise ValueError("expansion has no coefficients")
    return max(cf.coefficients) <= bound


def levy_ratio(x: UnitPoint, depth: int) -> float:
    """Single-point diagnostic depth / ln q_depth(x); approaches the
    Khinchin-Levy constant for almost every x, and 1/ln(phi) for the golden
    mean."""
    cf = continued_fraction(x, depth)
    if cf.terminated and cf.depth < depth:
        raise ValueError("expansion terminated before requested depth")
    return depth / math.log(cf.denominators[-1])


@dataclass(frozen=True)
class LevyEstimate:
    """Monte Carlo estimate of tau = lim n / ln q_n."""

    tau_hat: float
    sample_count: int
    depth: int
    std_error: float | None

    def __post_init__(self):
        if self.tau_hat <= 0:
            raise ValueError("tau_hat must be positive")


_SAMPLE_DIGITS = 60
_SAMPLE_DEN = 10**_SAMPLE_DIGITS


def _draw_sample_numerator(rng_seed: int, index: int) -> int:
    """Uniform integer in [0, 10^60), a pure function of (seed, index) so
    results never depend on evaluation order or worker count."""
    ss = np.random.SeedSequence(entropy=rng_seed, spawn_key=(index,))
    words = ss.generate_state(5, np.uint64)
    big = 0
    for w in words:
        big = (big << 64) | int(w)
    return big % _SAMPLE_DEN


def _log_denominators(num: int, den: int, depth: int, half: int) -> tuple[float, float] | None:
    """ln q_half and ln q_depth of num/den by the integer Euclidean
    algorithm; None if the expansion terminates early."""
    p, q = num, den
    q_prev, q_cur = 0, 1
    ln_half = 0.0
    for k in range(1, depth + 1):
        if p == 0:
            return None
        a, r = divmod(q, p)
        q_prev, q_cur = q_cur, a * q_cur + q_prev
        p, q = r, p
        if k == half:
            ln_half = math.log(q_cur)
    return ln_half, math.log(q_cur)


def estimate_levy_constant(n_samples: int, depth: int, rng_seed: int) -> LevyEstimate:
    """Estimate tau from the growth of convergent denominators of uniform
    random points.

    The naive plug-in mean of depth/ln q_depth carries an O(1/depth) bias of
    a few percent at depth 30 (E[ln q_n] = n/tau + C with C ~ -0.35, plus a
    Jensen term), so the estimator telescopes the upper half of the
    expansion instead: tau_hat = (depth - depth//2) / mean(ln q_depth -
    ln q_{depth//2}), in which the additive constant cancels.  Samples whose
    expansion terminates (rational draws) are rejected and redrawn.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if depth < 5:
        raise ValueError("depth must be >= 5")
    half = depth // 2
    span = depth - half
    increments = np.empty(n_samples)
    accepted = 0
    index = 0
    while accepted < n_samples:
        pair = _log_denominators(_draw_sample_numerator(rng_seed, index), _SAMPLE_DEN, depth, half)
        index += 1
        if pair is None:
            continue
        ln_half, ln_full = pair
        increments[accepted] = ln_full - ln_half
        accepted += 1
    mean_inc = float(increments.mean())
    tau_hat = span / mean_inc
    if n_samples == 1:
        std_error = None
    else:
        se_inc = float(increments.std(ddof=1)) / math.sqrt(n_samples)
        std_error = tau_hat * se_inc / mean_inc
    return LevyEstimate(tau_hat, n_samples, depth, std_error)
