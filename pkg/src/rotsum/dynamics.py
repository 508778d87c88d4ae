"""The circle rotation, its observables, and ergodic-sum series.

Orbits are iterated in float64 with the additive recurrence x <- x + alpha
(one conditional subtraction per step) rather than frac(x0 + k*alpha); the
recurrence drift stays far below every statistical tolerance used here, and
an exact-rational oracle lives in the tests.  Partial sums are accumulated
with compensated summation because the quantities of interest are O(ln T)
while the individual terms are O(1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .arithmetic import UnitPoint

__all__ = [
    "Observable",
    "OrbitSpec",
    "SumSeries",
    "rotate",
    "evaluate",
    "ergodic_sum_series",
    "ergodic_sum_final",
]


@dataclass(frozen=True)
class Observable:
    """A zero-mean observable on the circle.

    `sawtooth` is {x} - 1/2.  `indicator(gamma)` is the centred indicator of
    [0, gamma): it takes 1 - gamma on [0, gamma) and -gamma elsewhere, with
    the right endpoint excluded so the value at x = gamma is -gamma."""

    kind: str
    gamma: float | None = None

    def __post_init__(self):
        if self.kind not in ("sawtooth", "indicator"):
            raise ValueError(f"unknown observable kind {self.kind!r}")
        if self.kind == "indicator":
            if self.gamma is None or not 0.0 < self.gamma < 1.0:
                raise ValueError("indicator needs gamma in (0, 1)")
        elif self.gamma is not None:
            raise ValueError("sawtooth takes no gamma")

    @staticmethod
    def sawtooth() -> "Observable":
        return Observable("sawtooth")

    @staticmethod
    def indicator(gamma: float) -> "Observable":
        return Observable("indicator", float(gamma))

    def _kernel_args(self) -> tuple[int, float]:
        if self.kind == "sawtooth":
            return _kernels.OBS_SAWTOOTH, 0.0
        return _kernels.OBS_INDICATOR, self.gamma


def _as_float(x) -> float:
    v = float(x)
    if not 0.0 <= v < 1.0:
        raise ValueError(f"circle coordinate must lie in [0, 1), got {v}")
    return v


def rotate(x, alpha) -> float:
    """One step of the rotation: frac(x + alpha), matching the kernel
    arithmetic exactly."""
    s = _as_float(x) + _as_float(alpha)
    if s >= 1.0:
        s -= 1.0
    return s


def evaluate(observable: Observable, x) -> float:
    xf = float(x)
    xf -= math.floor(xf)
    if observable.kind == "sawtooth":
        return xf - 0.5
    return (1.0 - observable.gamma) if xf < observable.gamma else -observable.gamma


@dataclass(frozen=True)
class OrbitSpec:
    """One orbit-sum computation: start point, rotation number, horizon, and
    observable.  Accepts UnitPoint or float coordinates; dynamics run in
    float64 either way."""

    x0: float
    alpha: float
    T: int
    observable: Observable

    def __init__(self, x0, alpha, T: int, observable: Observable):
        object.__setattr__(self, "x0", _as_float(x0))
        object.__setattr__(self, "alpha", _as_float(alpha))
        object.__setattr__(self, "T", int(T))
        object.__setattr__(self, "observable", observable)
        if self.T < 1:
            raise ValueError("T must be >= 1")


@dataclass(frozen=True)
class SumSeries:
    """Stored values S_t for t in `times` (ascending, ending at spec.T).

    With stride 1 the full series S_1..S_T is kept; otherwise every
    stride-th value plus the final one, so long horizons fit in memory."""

    spec: OrbitSpec
    times: np.ndarray
    values: np.ndarray
    stride: int = 1

    @property
    def final(self) -> float:
        return float(self.values[-1])


def _checkpoint_times(T: int, stride: int) -> np.ndarray:
    if stride < 1:
        raise ValueError("stride must be >= 1")
    times = np.arange(stride, T + 1, stride, dtype=np.int64)
    if times.size == 0 or times[-1] != T:
        times = np.append(times, np.int64(T))
    return times


def ergodic_sum_series(spec: OrbitSpec, stride: int = 1) -> SumSeries:
    """S_t = sum_{k<t} h(frac(x0 + k alpha)) at the stored checkpoints."""
    kind, gamma = spec.observable._kernel_args()
    times = _checkpoint_times(spec.T, stride)
    values, _ = _kernels.series_at_times(spec.x0, spec.alpha, times, kind, gamma)
    return SumSeries(spec, times, values, stride)


def ergodic_sum_final(spec: OrbitSpec) -> float:
    """S_T alone, in O(1) memory; bit-identical to the last stored value of
    `ergodic_sum_series` (same kernel, single checkpoint)."""
    kind, gamma = spec.observable._kernel_args()
    times = np.array([spec.T], dtype=np.int64)
    values, _ = _kernels.series_at_times(spec.x0, spec.alpha, times, kind, gamma)
    return float(values[0])
