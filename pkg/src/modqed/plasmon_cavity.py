"""Gap-plasmon modes of a planar cavity in the electrostatic limit:
dispersion, quantization-normalized boundary fields, and conversion of a
modulated gap height d(t) into frequency and coupling schedules.

The cavity occupies |z| < d between claddings with permittivity
epsilon(omega) < 0; the gap has constant permittivity eps_g.  Symmetric
and antisymmetric potentials satisfy

    tanh(k d) = -epsilon/eps_g      (symmetric)
    coth(k d) = -epsilon/eps_g      (antisymmetric)

and the mode amplitude is fixed by the electrostatic normalization
S int d(omega eps)/domega |E|^2 dz = 4 pi hbar omega (hbar = 1 here; the
magnetic term vanishes in this approximation).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import NoModeError, ValidationError
from .numerics import find_root_bracketed
from .schedule import ModulationSchedule, Piecewise, Sinusoidal, as_schedule, piecewise_linear

SYMMETRIC = "symmetric"
ANTISYMMETRIC = "antisymmetric"

KD_MIN = 1e-6
KD_MAX = 50.0
DISPERSION_TOL = 1e-12


@dataclass(frozen=True)
class DrudeCladding:
    """epsilon(omega) = 1 - (omega_pl / omega)^2."""

    plasma_frequency: float

    def __post_init__(self):
        if self.plasma_frequency <= 0:
            raise ValidationError("plasma frequency must be > 0")

    def epsilon(self, omega: float) -> float:
        return 1.0 - (self.plasma_frequency / omega) ** 2

    def d_omega_epsilon(self, omega: float) -> float:
        """d(omega * epsilon)/domega = 1 + (omega_pl / omega)^2."""
        return 1.0 + (self.plasma_frequency / omega) ** 2

    def bracket(self) -> tuple[float, float]:
        return 1e-6 * self.plasma_frequency, self.plasma_frequency * (1.0 - 1e-14)


@dataclass(frozen=True)
class TabulatedCladding:
    """Sampled epsilon(omega), monotone on its grid; linear interpolation."""

    omegas: tuple
    eps_values: tuple

    def __post_init__(self):
        w = np.asarray(self.omegas, dtype=float)
        e = np.asarray(self.eps_values, dtype=float)
        if w.ndim != 1 or w.size < 2 or w.shape != e.shape:
            raise ValidationError("tabulated cladding needs matching 1-d arrays")
        if np.any(np.diff(w) <= 0):
            raise ValidationError("tabulated frequencies must increase")
        diffs = np.diff(e)
        if not (np.all(diffs >= 0) or np.all(diffs <= 0)):
            raise ValidationError("tabulated epsilon must be monotone on the bracket")
        object.__setattr__(self, "omegas", tuple(w))
        object.__setattr__(self, "eps_values", tuple(e))

    def epsilon(self, omega: float) -> float:
        return float(np.interp(omega, self.omegas, self.eps_values))

    def d_omega_epsilon(self, omega: float) -> float:
        h = 1e-6 * (self.omegas[-1] - self.omegas[0])
        lo = max(omega - h, self.omegas[0])
        hi = min(omega + h, self.omegas[-1])
        return (hi * self.epsilon(hi) - lo * self.epsilon(lo)) / (hi - lo)

    def bracket(self) -> tuple[float, float]:
        return self.omegas[0], self.omegas[-1]


@dataclass(frozen=True)
class CavityGeometry:
    """In-plane wavenumber k, quantization area, gap half-height schedule
    d(t), gap permittivity, and the cladding dispersion model.  Supplying
    light_speed enables the electrostatic-validity check k >> eps_g omega/c.
    """

    k: float
    area: float
    half_height: ModulationSchedule
    cladding: DrudeCladding | TabulatedCladding
    gap_permittivity: float = 1.0
    light_speed: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "half_height", as_schedule(self.half_height))
        if self.k <= 0 or self.area <= 0:
            raise ValidationError("k and area must be > 0")
        if self.gap_permittivity <= 0:
            raise ValidationError("gap permittivity must be a small positive real")

    def kd(self, t: float) -> float:
        kd = self.k * self.half_height.value(t)
        if not (KD_MIN < kd < KD_MAX):
            raise ValidationError(
                f"k*d = {kd} outside the conditioned range ({KD_MIN}, {KD_MAX})"
            )
        return kd

    def check_electrostatic(self, omega: float) -> None:
        if self.light_speed is None:
            return
        if self.k <= 10.0 * self.gap_permittivity * omega / self.light_speed:
            warnings.warn(
                f"electrostatic approximation marginal: k = {self.k:.3g} is not "
                f">> eps_g*omega/c = {self.gap_permittivity * omega / self.light_speed:.3g}",
                stacklevel=3,
            )


@dataclass(frozen=True)
class PlasmonMode:
    """One gap-plasmon mode: parity, frequency, and the quantization field
    at the lower boundary z = -d (components ordered x, y, z with x along
    the in-plane wavevector)."""

    parity: str
    frequency: float
    boundary_field: np.ndarray
    potential_amplitude: float
    k: float
    half_height: float

    def parallel_field(self) -> complex:
        return complex(self.boundary_field[0])

    def normal_field(self) -> complex:
        return complex(self.boundary_field[2])

    def electric_field(self, z: float) -> np.ndarray:
        """Mode field (E_x, E_y, E_z) at height z, same normalization as
        the boundary field."""
        phi = self.potential_amplitude
        k, d = self.k, self.half_height
        if self.parity == SYMMETRIC:
            if abs(z) <= d:
                ex = -1j * k * phi * math.cosh(k * z)
                ez = -k * phi * math.sinh(k * z)
            else:
                amp = phi * math.cosh(k * d) * math.exp(k * d)
                decay = math.exp(-k * abs(z))
                ex = -1j * k * amp * decay
                ez = math.copysign(1.0, z) * k * amp * decay
        else:
            if abs(z) <= d:
                ex = -1j * k * phi * math.sinh(k * z)
                ez = -k * phi * math.cosh(k * z)
            else:
                amp = math.copysign(1.0, z) * phi * math.sinh(k * d) * math.exp(k * d)
                decay = math.exp(-k * abs(z))
                ex = -1j * k * amp * decay
                ez = math.copysign(1.0, z) * k * amp * decay
        return np.array([ex, 0.0, ez], dtype=complex)


def _parity_ratio(parity: str, kd: float) -> float:
    if parity == SYMMETRIC:
        return math.tanh(kd)
    if parity == ANTISYMMETRIC:
        return 1.0 / math.tanh(kd)
    raise ValidationError(f"parity must be '{SYMMETRIC}' or '{ANTISYMMETRIC}'")


def dispersion_solve(g: CavityGeometry, t: float = 0.0, parity: str = SYMMETRIC) -> float:
    """Mode frequency solving tanh/coth(k d(t)) = -epsilon(omega)/eps_g by
    bisection; for a Drude cladding with eps_g = 1 this lands on the closed
    forms omega_pl/sqrt(1 + tanh(kd)) and omega_pl/sqrt(1 + coth(kd))."""
    kd = g.kd(t)
    ratio = _parity_ratio(parity, kd)

    def residual(omega: float) -> float:
        return g.cladding.epsilon(omega) + g.gap_permittivity * ratio

    lo, hi = g.cladding.bracket()
    flo, fhi = residual(lo), residual(hi)
    if flo * fhi > 0:
        raise NoModeError(
            f"no {parity} mode on bracket ({lo:.4g}, {hi:.4g}): "
            f"residuals ({flo:.3g}, {fhi:.3g})"
        )
    omega = find_root_bracketed(residual, lo, hi, tol=DISPERSION_TOL)
    g.check_electrostatic(omega)
    return omega


def drude_closed_form(g: CavityGeometry, t: float = 0.0, parity: str = SYMMETRIC) -> float:
    """Closed-form Drude dispersion omega_pl/sqrt(1 + eps_g * tanh/coth(kd))."""
    if not isinstance(g.cladding, DrudeCladding):
        raise ValidationError("closed form applies to a Drude cladding only")
    ratio = _parity_ratio(parity, g.kd(t))
    return g.cladding.plasma_frequency / math.sqrt(1.0 + g.gap_permittivity * ratio)


def mode_normalization(
    g: CavityGeometry,
    parity: str,
    omega: float,
    t: float = 0.0,
    k: float | None = None,
) -> PlasmonMode:
    """Quantization amplitude and boundary field of a mode at (k, d(t)).

    The potential amplitude follows from the electrostatic normalization;
    re-integrating d(omega eps)/domega |E(z)|^2 over z recovers
    4 pi hbar omega.  The (omega, k, parity) triple must satisfy the
    dispersion relation.
    """
    k = g.k if k is None else k
    d = g.half_height.value(t)
    kd = k * d
    if not (KD_MIN < kd < KD_MAX):
        raise ValidationError(f"k*d = {kd} outside the conditioned range")
    ratio = _parity_ratio(parity, kd)
    eps = g.cladding.epsilon(omega)
    if abs(eps + g.gap_permittivity * ratio) > 1e-8 * max(abs(eps), 1.0):
        raise ValidationError(
            f"inconsistent mode: epsilon({omega:.6g}) = {eps:.6g} does not "
            f"satisfy the {parity} dispersion at k*d = {kd:.6g}"
        )
    deps = g.cladding.d_omega_epsilon(omega)
    if parity == SYMMETRIC:
        bracket = g.gap_permittivity * math.sinh(2 * kd) + 2 * math.cosh(kd) ** 2 * deps
    else:
        bracket = g.gap_permittivity * math.sinh(2 * kd) + 2 * math.sinh(kd) ** 2 * deps
    phi = math.sqrt(4.0 * math.pi * omega / (g.area * k * bracket))
    # boundary values are the gap-side limits of the potential's gradient,
    # so the in-plane / normal relative sign stays consistent with E(z)
    if parity == SYMMETRIC:
        field = np.array(
            [-1j * k * math.cosh(kd) * phi, 0.0, k * math.sinh(kd) * phi],
            dtype=complex,
        )
    else:
        field = np.array(
            [1j * k * math.sinh(kd) * phi, 0.0, -k * math.cosh(kd) * phi],
            dtype=complex,
        )
    return PlasmonMode(
        parity=parity,
        frequency=omega,
        boundary_field=field,
        potential_amplitude=phi,
        k=k,
        half_height=d,
    )


def solve_mode(g: CavityGeometry, t: float = 0.0, parity: str = SYMMETRIC) -> PlasmonMode:
    """dispersion_solve followed by mode_normalization at the same instant."""
    omega = dispersion_solve(g, t, parity)
    return mode_normalization(g, parity, omega, t=t)


@dataclass(frozen=True)
class CouplingSchedules:
    """Sampled mode frequency and emitter coupling over one modulation
    window, plus interpolating schedules consumable by the dynamics
    engines (frequency-only modulation: the adiabatic photon number is
    untouched by construction)."""

    times: np.ndarray
    omega: np.ndarray
    rabi: np.ndarray
    boundary_fields: np.ndarray  # (m, 3) complex
    omega_schedule: Piecewise
    rabi_schedule: Piecewise


def coupling_schedule(
    g: CavityGeometry,
    dipole,
    parity: str,
    times,
) -> CouplingSchedules:
    """Evaluate omega(t) and Omega_R(t) = |dipole . E~(t)| (hbar = 1) of the
    boundary-placed emitter on a sample grid and wrap them as schedules.

    The dipole is a 3-vector in charge*length units consistent with the
    field units; at least 16 samples per modulation period are required
    when d(t) is sinusoidal.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 2:
        raise ValidationError("times must be a 1-d grid with >= 2 samples")
    sched = g.half_height
    if isinstance(sched, Sinusoidal):
        period = 2.0 * math.pi / sched.mod_frequency
        per_period = times.size / max((times[-1] - times[0]) / period, 1e-300)
        if per_period < 16:
            raise ValidationError(
                f"need >= 16 samples per modulation period, got {per_period:.1f}"
            )
    dip = np.asarray(dipole, dtype=complex)
    if dip.shape != (3,):
        raise ValidationError("dipole must be a 3-vector")
    omega = np.empty(times.size)
    rabi = np.empty(times.size)
    fields = np.empty((times.size, 3), dtype=complex)
    for i, t in enumerate(times):
        mode = solve_mode(g, float(t), parity)
        omega[i] = mode.frequency
        fields[i] = mode.boundary_field
        rabi[i] = abs(np.dot(dip, mode.boundary_field))
    if np.max(rabi) == 0.0:
        warnings.warn(
            "dipole is orthogonal to the mode field everywhere: zero coupling",
            stacklevel=2,
        )
    return CouplingSchedules(
        times=times,
        omega=omega,
        rabi=rabi,
        boundary_fields=fields,
        omega_schedule=piecewise_linear(times, omega),
        rabi_schedule=piecewise_linear(times, rabi),
    )
