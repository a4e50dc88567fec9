"""Time-dependent parameter schedules and their harmonic decompositions.

Every frequency-like quantity in the package is an angular frequency with
hbar = 1, so schedules double as energy schedules.  The sinusoidal sign
convention is fixed to

    value(t) = mean - depth * sin(mod_frequency * t + phase)

and harmonic (Bessel) amplitudes follow

    R_0 = base * J_0(depth / mod_frequency)
    R_n = (-i)**|n| * base * J_|n|(depth / mod_frequency)
"""

from __future__ import annotations

import bisect
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ScheduleDomainError, ValidationError
from .numerics import bessel_j

BESSEL_SUM_RULE_DEFICIT = 1e-10


class ModulationSchedule:
    """Base class: a real-valued function of time with an exact integral."""

    def value(self, t: float) -> float:
        raise NotImplementedError

    def phase_integral(self, t0: float, t1: float) -> float:
        """Integral of the schedule over [t0, t1] (radians when the
        schedule is an angular frequency)."""
        raise NotImplementedError

    def __call__(self, t: float) -> float:
        return self.value(t)

    def sample(self, times) -> np.ndarray:
        return np.array([self.value(float(t)) for t in np.asarray(times).ravel()])

    def mean_value(self) -> float | None:
        """Time-averaged value when one is well defined, else None."""
        return None


@dataclass(frozen=True)
class Constant(ModulationSchedule):
    level: float

    def value(self, t: float) -> float:
        return self.level

    def phase_integral(self, t0: float, t1: float) -> float:
        return self.level * (t1 - t0)

    def mean_value(self) -> float:
        return self.level


@dataclass(frozen=True)
class Sinusoidal(ModulationSchedule):
    """value(t) = mean - depth * sin(mod_frequency * t + phase)."""

    mean: float
    depth: float
    mod_frequency: float
    phase: float = 0.0

    def __post_init__(self):
        if self.depth < 0:
            raise ValidationError(f"sinusoidal depth must be >= 0, got {self.depth}")
        if self.mod_frequency <= 0:
            raise ValidationError(
                f"sinusoidal mod_frequency must be > 0, got {self.mod_frequency}"
            )

    def value(self, t: float) -> float:
        return self.mean - self.depth * math.sin(self.mod_frequency * t + self.phase)

    def phase_integral(self, t0: float, t1: float) -> float:
        w = self.mod_frequency
        return self.mean * (t1 - t0) + (self.depth / w) * (
            math.cos(w * t1 + self.phase) - math.cos(w * t0 + self.phase)
        )

    def mean_value(self) -> float:
        return self.mean


@dataclass(frozen=True)
class LinearSweep(ModulationSchedule):
    """value(t) = offset + rate * t."""

    rate: float
    offset: float = 0.0

    def value(self, t: float) -> float:
        return self.offset + self.rate * t

    def phase_integral(self, t0: float, t1: float) -> float:
        return self.offset * (t1 - t0) + 0.5 * self.rate * (t1 * t1 - t0 * t0)


@dataclass(frozen=True)
class Piecewise(ModulationSchedule):
    """Strictly increasing break times; schedules[i] applies on
    [breaks[i-1], breaks[i]) with schedules[0] before the first break and
    schedules[-1] after the last.  An optional bounded domain turns
    evaluation outside it into a ScheduleDomainError.

    Sub-schedules are evaluated at absolute time, so continuity across a
    break is the caller's responsibility (the spec only requires continuity
    within each piece).
    """

    breaks: tuple
    schedules: tuple
    domain: tuple = (None, None)
    _cums: tuple = field(init=False, repr=False, compare=False, default=())

    def __post_init__(self):
        breaks = tuple(float(b) for b in self.breaks)
        scheds = tuple(self.schedules)
        if len(scheds) != len(breaks) + 1:
            raise ValidationError(
                f"piecewise needs len(schedules) == len(breaks) + 1, "
                f"got {len(scheds)} and {len(breaks)}"
            )
        if any(b1 <= b0 for b0, b1 in zip(breaks, breaks[1:])):
            raise ValidationError("piecewise break times must be strictly increasing")
        object.__setattr__(self, "breaks", breaks)
        object.__setattr__(self, "schedules", scheds)
        # cumulative integral from breaks[0] to each subsequent break,
        # so phase_integral costs O(log n) instead of O(n)
        cums = [0.0]
        for i in range(1, len(breaks)):
            cums.append(cums[-1] + scheds[i].phase_integral(breaks[i - 1], breaks[i]))
        object.__setattr__(self, "_cums", tuple(cums))

    def _check_domain(self, t: float) -> None:
        lo, hi = self.domain
        if (lo is not None and t < lo) or (hi is not None and t > hi):
            raise ScheduleDomainError(
                f"t = {t} outside piecewise domain [{lo}, {hi}]"
            )

    def _segment(self, t: float) -> int:
        return bisect.bisect_right(self.breaks, t)

    def value(self, t: float) -> float:
        self._check_domain(t)
        return self.schedules[self._segment(t)].value(t)

    def phase_integral(self, t0: float, t1: float) -> float:
        if t1 < t0:
            raise ValueError("phase_integral requires t0 <= t1")
        self._check_domain(t0)
        self._check_domain(t1)
        i0, i1 = self._segment(t0), self._segment(t1)
        if i0 == i1:
            return self.schedules[i0].phase_integral(t0, t1)
        total = self.schedules[i0].phase_integral(t0, self.breaks[i0])
        total += self._cums[i1 - 1] - self._cums[i0]
        total += self.schedules[i1].phase_integral(self.breaks[i1 - 1], t1)
        return total


def as_schedule(value) -> ModulationSchedule:
    """Coerce a bare number to a Constant schedule."""
    if isinstance(value, ModulationSchedule):
        return value
    return Constant(float(value))


def piecewise_linear(times, values) -> Piecewise:
    """Interpolating piecewise-linear schedule through sampled points,
    bounded to [times[0], times[-1]]."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.ndim != 1 or times.size < 2 or times.shape != values.shape:
        raise ValidationError("piecewise_linear needs matching 1-d arrays, >= 2 points")
    pieces = []
    for t0, t1, y0, y1 in zip(times[:-1], times[1:], values[:-1], values[1:]):
        rate = (y1 - y0) / (t1 - t0)
        pieces.append(LinearSweep(rate=rate, offset=y0 - rate * t0))
    return Piecewise(
        breaks=tuple(times[1:-1]),
        schedules=tuple(pieces),
        domain=(float(times[0]), float(times[-1])),
    )


@dataclass(frozen=True)
class HarmonicAmplitudes:
    """Fourier amplitudes R_n of a modulated coupling, |n| <= n_max."""

    base_rabi: complex
    amplitudes: dict

    @property
    def n_max(self) -> int:
        return max(abs(n) for n in self.amplitudes)

    def __getitem__(self, n: int) -> complex:
        return self.amplitudes[n]

    def sum_rule_total(self) -> float:
        """sum_n |R_n|^2 / |base|^2; tends to 1 by the Bessel sum rule."""
        if self.base_rabi == 0:
            return 0.0
        return sum(abs(r) ** 2 for r in self.amplitudes.values()) / abs(self.base_rabi) ** 2


def harmonic_amplitudes(
    base_rabi: complex,
    depth: float,
    mod_frequency: float,
    n_max: int = 20,
) -> HarmonicAmplitudes:
    """Bessel decomposition of a sinusoidally frequency-modulated coupling.

    R_0 = base * J_0(x), R_n = (-i)**|n| * base * J_|n|(x) with
    x = depth / mod_frequency; R_{-n} = R_n since the prefactor depends
    on |n| only.
    """
    if mod_frequency <= 0:
        raise ValidationError(f"mod_frequency must be > 0, got {mod_frequency}")
    if n_max < 0:
        raise ValidationError(f"n_max must be >= 0, got {n_max}")
    if depth < 0:
        raise ValidationError(f"depth must be >= 0, got {depth}")
    x = depth / mod_frequency
    base = complex(base_rabi)
    amps = {0: base * bessel_j(0, x)}
    for n in range(1, n_max + 1):
        r = ((-1j) ** n) * base * bessel_j(n, x)
        amps[n] = r
        amps[-n] = r
    result = HarmonicAmplitudes(base_rabi=base, amplitudes=amps)
    if base != 0:
        deficit = 1.0 - result.sum_rule_total()
        if deficit > BESSEL_SUM_RULE_DEFICIT:
            warnings.warn(
                f"harmonic truncation at n_max={n_max} leaves a Bessel sum-rule "
                f"deficit of {deficit:.3e}; increase n_max",
                stacklevel=2,
            )
    return result
