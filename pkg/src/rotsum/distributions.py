"""Empirical distributions and parametric fits: Cauchy, Gaussian, q-Gaussian.

The Cauchy family is parametrized throughout as CDF(y) = 1/2 + arctan(rho*y)/pi,
i.e. density (rho/pi) / (1 + rho^2 y^2): larger rho means a narrower law, the
quartiles sit at +/- 1/rho, and the q-Gaussian with q = 2, beta = rho^2
coincides with it pointwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

__all__ = [
    "DegenerateSample",
    "FitDiverged",
    "Histogram",
    "EmpiricalDist",
    "CauchyFit",
    "GaussianFit",
    "QGaussianFit",
    "MomentSummary",
    "cauchy_cdf",
    "cauchy_quantile",
    "q_normalization",
    "q_gaussian_pdf",
    "fit_cauchy",
    "fit_gaussian",
    "fit_q_gaussian",
    "ks_distance",
    "ks_distance_two_sample",
    "moment_summary",
    "make_histogram",
    "density_at_zero",
]


class DegenerateSample(ValueError):
    """The sample carries no usable scale information (e.g. zero IQR)."""


class FitDiverged(RuntimeError):
    """Likelihood refinement left the admissible parameter region."""


# ---------------------------------------------------------------------------
# parametric families


def cauchy_cdf(y, rho: float):
    """CDF 1/2 + arctan(rho*y)/pi of the centred Cauchy with scale 1/rho."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    return 0.5 + np.arctan(rho * np.asarray(y, dtype=float)) / np.pi


def cauchy_quantile(p, rho: float):
    """Inverse of `cauchy_cdf`; the sampling oracle used by the fit tests."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    return np.tan(np.pi * (np.asarray(p, dtype=float) - 0.5)) / rho


def q_normalization(q: float) -> float:
    """Closed-form normalization C_q of the q-Gaussian family on (0, 3).

    Evaluated through lgamma so the q -> 1 limit (sqrt(pi)) does not
    overflow; very close to q = 1 the lgamma difference itself loses
    precision, so the asymptotic ratio Gamma(z+a)/Gamma(z) ~ z^a (1 +
    a(a-1)/(2z)) takes over.  C_2 = pi."""
    if q >= 3:
        raise ValueError("q-Gaussian is not normalizable for q >= 3")
    if q <= 0:
        raise ValueError("q must be positive")
    if abs(q - 1.0) < 1e-5:
        # Gamma(z-1/2)/Gamma(z) = z^{-1/2}(1 + 3/(8z) + ...) for q > 1 and
        # Gamma(z)/Gamma(z+1/2) = z^{-1/2}(1 + 1/(8z) + ...) for q < 1 both
        # collapse to the same first-order expression in q - 1
        return math.sqrt(math.pi) * (1.0 + 0.375 * (q - 1.0))
    if q > 1:
        z = 1.0 / (q - 1.0)
        return math.sqrt(math.pi) / math.sqrt(q - 1.0) * math.exp(
            math.lgamma(z - 0.5) - math.lgamma(z))
    z = 1.0 / (1.0 - q)
    return (2.0 * math.sqrt(math.pi) / ((3.0 - q) * math.sqrt(1.0 - q))
            * math.exp(math.lgamma(z) - math.lgamma(z + 0.5)))


def q_gaussian_pdf(s, q: float, beta: float):
    """P_q(s) = sqrt(beta)/C_q * [1 + (q-1) beta s^2]^(-1/(q-1)).

    q = 1 is the Gaussian limit; q = 2 is the Cauchy law with rho =
    sqrt(beta); values of q slightly below 1 (compact support) are admitted
    because the fit window extends there."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    cq = q_normalization(q)
    s = np.asarray(s, dtype=float)
    amp = math.sqrt(beta) / cq
    if abs(q - 1.0) < 1e-12:
        return amp * np.exp(-beta * s * s)
    if q > 1:
        return amp * (1.0 + (q - 1.0) * beta * s * s) ** (-1.0 / (q - 1.0))
    base = np.maximum(1.0 - (1.0 - q) * beta * s * s, 0.0)
    return amp * base ** (1.0 / (1.0 - q))


def _q_gaussian_loglik(samples: np.ndarray, q: float, beta: float) -> float:
    if beta <= 0 or not 0.0 < q < 3.0:
        return -math.inf
    amp = 0.5 * math.log(beta) - math.log(q_normalization(q))
    s2 = samples * samples
    if abs(q - 1.0) < 1e-12:
        return samples.size * amp - beta * float(s2.sum())
    if q > 1:
        tail = np.log1p((q - 1.0) * beta * s2)
        return samples.size * amp - float(tail.sum()) / (q - 1.0)
    base = 1.0 - (1.0 - q) * beta * s2
    if np.any(base <= 0.0):
        return -math.inf
    return samples.size * amp + float(np.log(base).sum()) / (1.0 - q)


# ---------------------------------------------------------------------------
# histograms and empirical distributions


@dataclass(frozen=True)
class Histogram:
    """Contiguous ordered bins.  Samples beyond the covered range are clipped
    into the outermost bins, so counts always sum to the sample count."""

    edges: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        if len(self.edges) != len(self.counts) + 1:
            raise ValueError("edges/counts length mismatch")
        if np.any(np.diff(self.edges) <= 0):
            raise ValueError("edges must be strictly increasing")

    @property
    def lefts(self) -> np.ndarray:
        return self.edges[:-1]

    @property
    def rights(self) -> np.ndarray:
        return self.edges[1:]

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @property
    def density(self) -> np.ndarray:
        total = self.counts.sum()
        widths = np.diff(self.edges)
        if total == 0:
            return np.zeros_like(widths)
        return self.counts / (total * widths)

    def csv_rows(self):
        dens = self.density
        for left, right, count, d in zip(self.lefts, self.rights, self.counts, dens):
            yield float(left), float(right), int(count), float(d)


def make_histogram(samples, bins: int | None = None, trim: float = 0.995,
                   symmetric: bool = False) -> Histogram:
    """Freedman-Diaconis binning over the central `trim` mass of the sample
    (heavy tails would otherwise dictate the bin width); `bins` overrides the
    rule.  `symmetric=True` forces edges mirror-symmetric about zero so bins
    pair up exactly under z -> -z."""
    xs = np.sort(np.asarray(samples, dtype=float))
    n = xs.size
    if n < 2:
        raise DegenerateSample("need at least two samples to bin")
    tail = (1.0 - trim) / 2.0
    lo, hi = np.quantile(xs, [tail, 1.0 - tail])
    if symmetric:
        hi = max(abs(lo), abs(hi))
        lo = -hi
    if hi <= lo:
        raise DegenerateSample("trimmed sample has zero spread")
    if bins is None:
        q25, q75 = np.quantile(xs, [0.25, 0.75])
        width = 2.0 * (q75 - q25) / n ** (1.0 / 3.0)
        if width <= 0:
            raise DegenerateSample("zero interquartile range")
        bins = max(1, int(math.ceil((hi - lo) / width)))
    if symmetric and bins % 2:
        bins += 1
    edges = np.linspace(lo, hi, bins + 1)
    if symmetric:
        # rebuild from the positive half so paired edges are exactly opposite
        half = edges[bins // 2:]
        edges = np.concatenate([-half[::-1][:-1], half])
        edges[bins // 2] = 0.0
    clipped = np.clip(xs, edges[0], edges[-1])
    counts, _ = np.histogram(clipped, bins=edges)
    return Histogram(edges, counts)


def density_at_zero(samples, bins: int | None = None) -> float:
    """Histogram estimate of the density at the origin (mean of the two bins
    adjacent to zero under symmetric binning)."""
    hist = make_histogram(samples, bins=bins, symmetric=True)
    mid = len(hist.counts) // 2
    return float(hist.density[mid - 1:mid + 1].mean())


@dataclass
class EmpiricalDist:
    """Samples of a normalized statistic plus histogram and provenance."""

    samples: np.ndarray
    histogram: Histogram
    meta: dict = field(default_factory=dict)

    @property
    def sorted_samples(self) -> np.ndarray:
        return np.sort(self.samples)

    def ecdf(self, y) -> np.ndarray:
        xs = self.sorted_samples
        return np.searchsorted(xs, np.asarray(y, dtype=float), side="right") / xs.size


def from_samples(samples, meta: dict | None = None, bins: int | None = None,
                 symmetric: bool = False) -> EmpiricalDist:
    samples = np.asarray(samples, dtype=float)
    return EmpiricalDist(samples, make_histogram(samples, bins=bins, symmetric=symmetric),
                         meta or {})


# ---------------------------------------------------------------------------
# goodness of fit and moments


def ks_distance(samples, cdf) -> float:
    """One-sample Kolmogorov-Smirnov statistic via the sorted-sample formula."""
    xs = np.sort(np.asarray(samples, dtype=float))
    n = xs.size
    if n < 1:
        raise ValueError("need at least one sample")
    F = np.asarray(cdf(xs), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))


def ks_distance_two_sample(a, b) -> float:
    """Two-sample KS statistic: sup |ECDF_a - ECDF_b|."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


@dataclass(frozen=True)
class MomentSummary:
    mean: float
    variance: float
    skewness: float
    excess_kurtosis: float
    n: int


def moment_summary(samples) -> MomentSummary:
    """Unbiased mean/variance plus the conventional sample skewness
    g1 = m3/m2^(3/2) and excess kurtosis g2 = m4/m2^2 - 3."""
    xs = np.asarray(samples, dtype=float)
    n = xs.size
    if n < 4:
        raise ValueError("need at least four samples")
    mean = float(xs.mean())
    d = xs - mean
    m2 = float((d * d).mean())
    variance = float(d.dot(d) / (n - 1))
    if m2 == 0.0:
        return MomentSummary(mean, 0.0, 0.0, 0.0, n)
    m3 = float((d ** 3).mean())
    m4 = float((d ** 4).mean())
    return MomentSummary(mean, variance, m3 / m2 ** 1.5, m4 / m2 ** 2 - 3.0, n)


# ---------------------------------------------------------------------------
# fits


@dataclass(frozen=True)
class CauchyFit:
    rho: float
    ks_distance: float

    def __post_init__(self):
        if self.rho <= 0:
            raise ValueError("rho must be positive")


def fit_cauchy(samples) -> CauchyFit:
    """Quartile estimator: the law's quartiles sit at +/- 1/rho, so rho =
    2/IQR.  Robust under the heavy tails where moment estimators fail."""
    xs = np.sort(np.asarray(samples, dtype=float))
    if xs.size < 100:
        raise ValueError("need at least 100 samples")
    q25, q75 = np.quantile(xs, [0.25, 0.75])
    iqr = q75 - q25
    if iqr <= 0:
        raise DegenerateSample("interquartile range is zero")
    rho = 2.0 / iqr
    return CauchyFit(rho, ks_distance(xs, lambda y: cauchy_cdf(y, rho)))


@dataclass(frozen=True)
class GaussianFit:
    mu: float
    sigma: float
    ks_distance: float


def fit_gaussian(samples) -> GaussianFit:
    xs = np.asarray(samples, dtype=float)
    if xs.size < 4:
        raise ValueError("need at least four samples")
    mu = float(xs.mean())
    sigma = float(xs.std())
    if sigma == 0:
        raise DegenerateSample("zero standard deviation")

    def cdf(y):
        z = (np.asarray(y, dtype=float) - mu) / (sigma * math.sqrt(2.0))
        return 0.5 * (1.0 + np.array([math.erf(v) for v in np.atleast_1d(z)]))

    return GaussianFit(mu, sigma, ks_distance(xs, cdf))


@dataclass(frozen=True)
class QGaussianFit:
    q: float
    beta: float
    c_q: float
    log_likelihood: float

    @property
    def p_zero(self) -> float:
        """Peak density P(0) = sqrt(beta)/C_q."""
        return math.sqrt(self.beta) / self.c_q


def fit_q_gaussian(samples, q_min: float = 1.0, q_max: float = 2.9) -> QGaussianFit:
    """Maximum likelihood over (q, beta): a coarse grid (0.1 steps in q,
    log-spaced beta around the quartile scale) followed by Nelder-Mead on
    (q, log beta).  Deterministic: samples are sorted internally and the
    refinement starts from the best grid node with a fixed simplex."""
    xs = np.sort(np.asarray(samples, dtype=float))
    if xs.size < 1000:
        raise ValueError("need at least 1000 samples")
    q25, q75 = np.quantile(xs, [0.25, 0.75])
    iqr = q75 - q25
    if iqr <= 0:
        raise DegenerateSample("interquartile range is zero")
    beta0 = (2.0 / iqr) ** 2
    q_grid = np.arange(q_min, min(q_max, 2.95) + 1e-9, 0.1)
    beta_grid = beta0 * np.logspace(-2.0, 2.0, 17)
    best = (-math.inf, q_grid[0], beta_grid[0])
    for q in q_grid:
        for beta in beta_grid:
            ll = _q_gaussian_loglik(xs, float(q), float(beta))
            if ll > best[0]:
                best = (ll, float(q), float(beta))
    q_floor = max(q_min - 0.05, 0.01)
    q_ceil = min(q_max + 0.05, 2.999)

    def negloglik(params):
        q, log_beta = params
        if not q_floor <= q <= q_ceil:
            return math.inf
        return -_q_gaussian_loglik(xs, q, math.exp(log_beta))

    result = minimize(negloglik, x0=[best[1], math.log(best[2])], method="Nelder-Mead",
                      options={"xatol": 1e-6, "fatol": 1e-8, "maxiter": 2000})
    q_hat, log_beta_hat = result.x
    ll_hat = -result.fun
    if not math.isfinite(ll_hat) or not q_floor < q_hat < q_ceil:
        raise FitDiverged(f"refinement left the window ({q_floor}, {q_ceil}): q={q_hat}")
    beta_hat = math.exp(log_beta_hat)
    return QGaussianFit(float(q_hat), float(beta_hat), q_normalization(float(q_hat)),
                        float(ll_hat))
