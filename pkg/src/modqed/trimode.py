"""Closed dynamics of two cavity modes coupled to one emitter on the
single-excitation manifold {|000>, |001>, |100>, |010>} (photon_a,
photon_b, atom ordering inside each ket).

Covers both modulation targets: sinusoidally modulated cavity frequencies
with a fixed transition, or a modulated transition with fixed cavities.
The harmonic-resonance reduction keeps only the resonant Fourier amplitude
of each coupling, giving a 3x3 system whose closed solution, cumulative
Rabi frequency, and transparency (dark) state are implemented here.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import IntegrationError, ResonanceError, ValidationError
from .numerics import IntegratorConfig, bessel_j, integrate_complex_ode
from .schedule import Constant, ModulationSchedule, Sinusoidal, as_schedule

NORM_TOL = 1e-12
RESONANCE_RTOL = 1e-9
REDUCTION_COUPLING_RATIO = 0.1
RWA_COUPLING_RATIO = 0.1

CAVITY = "cavity"
ATOM = "atom"

# basis order used throughout: (|000>, |001>, |100>, |010>)
BASIS_LABELS = ("000", "001", "100", "010")


@dataclass(frozen=True)
class TrimodeParams:
    """Two mode-frequency schedules, the transition schedule W(t)/hbar,
    constant complex couplings chi_{a,b}/hbar, which parameter carries the
    modulation, and the harmonic order m of the mode-b resonance."""

    omega_a: ModulationSchedule
    omega_b: ModulationSchedule
    transition: ModulationSchedule
    rabi_a: complex
    rabi_b: complex
    modulation_target: str = CAVITY
    harmonic_order: int = 1

    def __post_init__(self):
        object.__setattr__(self, "omega_a", as_schedule(self.omega_a))
        object.__setattr__(self, "omega_b", as_schedule(self.omega_b))
        object.__setattr__(self, "transition", as_schedule(self.transition))
        object.__setattr__(self, "rabi_a", complex(self.rabi_a))
        object.__setattr__(self, "rabi_b", complex(self.rabi_b))
        if self.modulation_target not in (CAVITY, ATOM):
            raise ValidationError(
                f"modulation_target must be '{CAVITY}' or '{ATOM}', "
                f"got {self.modulation_target!r}"
            )
        if self.modulation_target == ATOM:
            if not isinstance(self.omega_a, Constant) or not isinstance(
                self.omega_b, Constant
            ):
                raise ValidationError(
                    "atom modulation target requires constant mode frequencies"
                )
        means = [s.mean_value() for s in (self.omega_a, self.omega_b)]
        known = [m for m in means if m is not None]
        if known:
            w_min = min(abs(m) for m in known)
            r_max = max(abs(self.rabi_a), abs(self.rabi_b))
            if r_max >= RWA_COUPLING_RATIO * w_min and w_min > 0:
                warnings.warn(
                    f"RWA validity: max coupling {r_max:.3g} is not small "
                    f"against mode frequency {w_min:.3g}",
                    stacklevel=2,
                )

    # accumulated phases of the four basis states and the two detunings

    def _base_integrals(self, t: float):
        pa = self.omega_a.phase_integral(0.0, t)
        pb = self.omega_b.phase_integral(0.0, t)
        pw = self.transition.phase_integral(0.0, t)
        return pa, pb, pw

    def state_phases(self, t: float):
        """(phi_000, phi_001, phi_100, phi_010) = int_0^t omega_state."""
        pa, pb, pw = self._base_integrals(t)
        return (
            0.5 * pa + 0.5 * pb,
            0.5 * pa + 0.5 * pb + pw,
            1.5 * pa + 0.5 * pb,
            0.5 * pa + 1.5 * pb,
        )

    def detuning_integrals(self, t: float):
        """(int (omega_a - W), int (omega_b - W)) over [0, t]."""
        pa, pb, pw = self._base_integrals(t)
        return pa - pw, pb - pw


@dataclass(frozen=True)
class TrimodeState:
    """Lab-frame amplitudes of the single-excitation manifold."""

    c000: complex
    c001: complex
    c100: complex
    c010: complex

    def norm_sq(self) -> float:
        return sum(abs(c) ** 2 for c in self.as_array())

    def as_array(self) -> np.ndarray:
        return np.array([self.c000, self.c001, self.c100, self.c010], dtype=complex)

    @classmethod
    def from_array(cls, arr) -> "TrimodeState":
        a = np.asarray(arr, dtype=complex)
        return cls(c000=a[0], c001=a[1], c100=a[2], c010=a[3])

    def populations(self) -> np.ndarray:
        return np.abs(self.as_array()) ** 2

    def require_normalized(self, tol: float = NORM_TOL) -> None:
        if abs(self.norm_sq() - 1.0) > tol:
            raise ValidationError(
                f"state not normalized: sum |c|^2 = {self.norm_sq()}"
            )


@dataclass(frozen=True)
class TrimodeTrajectory:
    """Sampled trajectory; g holds rotating-frame amplitudes in basis order."""

    params: TrimodeParams
    t: np.ndarray
    g: np.ndarray  # shape (m, 4)

    def populations(self) -> np.ndarray:
        return np.abs(self.g) ** 2

    def norm_drift(self) -> float:
        norms = np.sum(np.abs(self.g) ** 2, axis=1)
        return float(np.max(np.abs(norms - norms[0])))

    def lab_amplitudes(self) -> np.ndarray:
        out = np.empty_like(self.g)
        for i, t in enumerate(self.t):
            phases = self.params.state_phases(float(t))
            for j in range(4):
                out[i, j] = self.g[i, j] * cmath.exp(-1j * phases[j])
        return out


def integrate_trimode_full(
    params: TrimodeParams,
    init: TrimodeState,
    t_span,
    cfg: IntegratorConfig = IntegratorConfig(),
    t_eval=None,
) -> TrimodeTrajectory:
    """Integrate the four amplitude equations with every harmonic retained.

    Rotating-frame form: with Phi_x(t) = int_0^t (omega_x - W),

        dG_001/dt = i rabi_a e^{-i Phi_a} G_100 + i rabi_b e^{-i Phi_b} G_010
        dG_100/dt = i conj(rabi_a) e^{+i Phi_a} G_001
        dG_010/dt = i conj(rabi_b) e^{+i Phi_b} G_001

    and G_000 is constant.  Norm drift beyond 10 * rel_tol raises.
    """
    init.require_normalized()
    ra, rb = params.rabi_a, params.rabi_b
    ra_c, rb_c = ra.conjugate(), rb.conjugate()
    detunings = params.detuning_integrals

    def rhs(t, y):
        phi_a, phi_b = detunings(t)
        ea = cmath.exp(-1j * phi_a)
        eb = cmath.exp(-1j * phi_b)
        g0, ga, gb = y
        return np.array(
            [
                1j * (ra * ea * ga + rb * eb * gb),
                1j * ra_c / ea * g0,
                1j * rb_c / eb * g0,
            ],
            dtype=complex,
        )

    # rotating-frame init: G_alpha(t0) = c_alpha(t0) e^{+i phi_alpha(t0)}
    t0 = float(t_span[0])
    phases0 = params.state_phases(t0)
    arr = init.as_array()
    g_init = np.array(
        [arr[j] * cmath.exp(1j * phases0[j]) for j in range(4)], dtype=complex
    )
    sol = integrate_complex_ode(rhs, g_init[1:], t_span, cfg, t_eval=t_eval)
    g = np.empty((sol.t.size, 4), dtype=complex)
    g[:, 0] = g_init[0]
    g[:, 1:] = sol.y
    traj = TrimodeTrajectory(params=params, t=sol.t, g=g)
    drift = traj.norm_drift()
    if drift > 10.0 * cfg.rel_tol:
        raise IntegrationError(
            f"norm drift {drift:.3e} exceeds 10 * rel_tol = {10 * cfg.rel_tol:.3e}"
        )
    return traj


@dataclass(frozen=True)
class ReducedSystem:
    """Resonant harmonic amplitudes, cumulative Rabi frequency, and the 3x3
    coefficient matrix of dG/dt + M G = 0 on (G_001, G_100, G_010)."""

    r_a0: complex
    r_bm: complex
    cumulative: float
    matrix: np.ndarray
    params: TrimodeParams

    def coupling_matrix(self) -> np.ndarray:
        """Hermitian H_R with M = -i H_R; eigenvalues {0, +-cumulative}."""
        return np.array(
            [
                [0.0, self.r_a0, self.r_bm],
                [self.r_a0.conjugate(), 0.0, 0.0],
                [self.r_bm.conjugate(), 0.0, 0.0],
            ],
            dtype=complex,
        )


def _modulation_depths(params: TrimodeParams):
    """(depth_a, depth_b, mod_frequency) for either modulation target."""
    if params.modulation_target == ATOM:
        sched = params.transition
        if isinstance(sched, Sinusoidal):
            return sched.depth, sched.depth, sched.mod_frequency
        if isinstance(sched, Constant):
            return 0.0, 0.0, None
        raise ValidationError(
            "atom modulation target needs a constant or sinusoidal transition"
        )
    depths = []
    freqs = []
    for sched in (params.omega_a, params.omega_b):
        if isinstance(sched, Sinusoidal):
            depths.append(sched.depth)
            freqs.append(sched.mod_frequency)
        elif isinstance(sched, Constant):
            depths.append(0.0)
            freqs.append(None)
        else:
            raise ValidationError(
                "cavity modulation target needs constant or sinusoidal modes"
            )
    known = {f for f in freqs if f is not None}
    if len(known) > 1:
        raise ValidationError(f"mode modulation frequencies differ: {sorted(known)}")
    freq = known.pop() if known else None
    return depths[0], depths[1], freq


def _mean_of(sched: ModulationSchedule, name: str) -> float:
    mean = sched.mean_value()
    if mean is None:
        raise ValidationError(f"{name} schedule has no well-defined mean")
    return mean


def reduced_resonant_system(params: TrimodeParams) -> ReducedSystem:
    """Keep only the resonant Fourier harmonics of the two couplings.

    Requires mean resonances omega_a = W and omega_b + m * Omega = W; the
    resonant amplitudes are R_a0 = rabi_a J_0(dw_a/Omega) and
    R_bm = (-i)^|m| rabi_b J_|m|(dw_b/Omega).  Identical construction for
    both modulation targets, which is why atom- and cavity-modulated
    scenarios share one reduced system.
    """
    m = params.harmonic_order
    w_mean = _mean_of(params.transition, "transition")
    wa_mean = _mean_of(params.omega_a, "omega_a")
    wb_mean = _mean_of(params.omega_b, "omega_b")
    depth_a, depth_b, mod_freq = _modulation_depths(params)
    scale = max(abs(w_mean), 1.0)
    if abs(wa_mean - w_mean) > RESONANCE_RTOL * scale:
        raise ResonanceError(
            f"mode a off resonance: omega_a mean = {wa_mean!r} vs W = {w_mean!r}"
        )
    if mod_freq is None:
        if m != 0 or depth_a != 0.0 or depth_b != 0.0:
            raise ValidationError(
                "no modulation frequency available but harmonic order m != 0"
            )
        mod_freq = math.inf  # unused below: both depths are zero
        wb_shifted = wb_mean
    else:
        wb_shifted = wb_mean + m * mod_freq
    if abs(wb_shifted - w_mean) > RESONANCE_RTOL * scale:
        raise ResonanceError(
            f"mode b off harmonic resonance: omega_b + m*Omega = {wb_shifted!r} "
            f"vs W = {w_mean!r}"
        )
    if mod_freq != math.inf:
        r_max = max(abs(params.rabi_a), abs(params.rabi_b))
        if r_max > REDUCTION_COUPLING_RATIO * mod_freq:
            warnings.warn(
                f"resonant reduction validity: couplings ({r_max:.3g}) are not "
                f"small against the modulation frequency ({mod_freq:.3g})",
                stacklevel=2,
            )
    xa = depth_a / mod_freq if depth_a else 0.0
    xb = depth_b / mod_freq if depth_b else 0.0
    r_a0 = params.rabi_a * bessel_j(0, xa)
    r_bm = ((-1j) ** abs(m)) * params.rabi_b * bessel_j(abs(m), xb)
    sigma = cumulative_rabi(r_a0, r_bm)
    matrix = np.array(
        [
            [0.0, -1j * r_a0, -1j * r_bm],
            [-1j * r_a0.conjugate(), 0.0, 0.0],
            [-1j * r_bm.conjugate(), 0.0, 0.0],
        ],
        dtype=complex,
    )
    return ReducedSystem(
        r_a0=r_a0, r_bm=r_bm, cumulative=sigma, matrix=matrix, params=params
    )


def cumulative_rabi(r_a0: complex, r_bm: complex) -> float:
    """sqrt(|R_a0|^2 + |R_bm|^2)."""
    return math.hypot(abs(r_a0), abs(r_bm))


def _reduced_g_solution(rs: ReducedSystem, init: TrimodeState, t: float):
    """Rotating-frame (G_001, G_100, G_010) of the reduced system at time t."""
    c001, c100, c010 = init.c001, init.c100, init.c010
    sigma = rs.cumulative
    if rs.r_a0 == 0 and rs.r_bm == 0:
        return c001, c100, c010
    if rs.r_bm == 0:
        # mode b decoupled: 2x2 oscillation between |001> and |100>
        u = rs.r_a0 / abs(rs.r_a0)
        cos, sin = math.cos(sigma * t), math.sin(sigma * t)
        g0 = c001 * cos + 1j * u * sin * c100
        ga = c100 * cos + 1j * u.conjugate() * sin * c001
        return g0, ga, c010
    if rs.r_a0 == 0:
        u = rs.r_bm / abs(rs.r_bm)
        cos, sin = math.cos(sigma * t), math.sin(sigma * t)
        g0 = c001 * cos + 1j * u * sin * c010
        gb = c010 * cos + 1j * u.conjugate() * sin * c001
        return g0, c100, gb
    ratio = rs.r_bm / rs.r_a0
    denom = 1.0 + abs(ratio) ** 2
    a_const = (c100 * abs(ratio) ** 2 - c010 * ratio) / denom
    symmetric = (c100 + c010 * ratio) / denom
    osc = c001 * rs.r_a0.conjugate() / sigma
    b_const = 0.5 * (symmetric + osc)
    c_const = 0.5 * (symmetric - osc)
    em = cmath.exp(-1j * sigma * t)
    ep = cmath.exp(1j * sigma * t)
    g0 = (b_const * em - c_const * ep) * sigma / rs.r_a0.conjugate()
    ga = a_const + b_const * em + c_const * ep
    gb = -a_const / ratio + (b_const * em + c_const * ep) * ratio.conjugate()
    return g0, ga, gb


def analytic_closed_solution(
    rs: ReducedSystem, init: TrimodeState, t: float
) -> TrimodeState:
    """Closed solution of the reduced system, lab-frame phases restored.

    At t = 0 this returns init exactly.  When R_bm = 0 the constant branch
    degenerates to the bare mode-b state and the remaining pair performs
    plain Rabi oscillation.
    """
    init.require_normalized()
    g0, ga, gb = _reduced_g_solution(rs, init, t)
    phases = rs.params.state_phases(t)
    return TrimodeState(
        c000=init.c000 * cmath.exp(-1j * phases[0]),
        c001=g0 * cmath.exp(-1j * phases[1]),
        c100=ga * cmath.exp(-1j * phases[2]),
        c010=gb * cmath.exp(-1j * phases[3]),
    )


def analytic_trajectory(rs: ReducedSystem, init: TrimodeState, times) -> TrimodeTrajectory:
    """analytic_closed_solution sampled on a time grid (rotating frame)."""
    init.require_normalized()
    times = np.asarray(times, dtype=float)
    g = np.empty((times.size, 4), dtype=complex)
    for i, t in enumerate(times):
        g0, ga, gb = _reduced_g_solution(rs, init, float(t))
        g[i] = (init.c000, g0, ga, gb)
    return TrimodeTrajectory(params=rs.params, t=times, g=g)


def transparency_condition(rs: ReducedSystem, c100_0: complex) -> complex:
    """Mode-b amplitude that makes the emitter dark: c010 = -c100 R_a0/R_bm.

    The resulting state has zero projection on both oscillating branches,
    so all three populations stay constant under the reduced dynamics.
    """
    if rs.r_bm == 0:
        raise ValidationError(
            "R_bm = 0: no transparency state involving mode b exists"
        )
    return -complex(c100_0) * rs.r_a0 / rs.r_bm


@dataclass(frozen=True)
class BranchTable:
    """Continuity-ordered eigenstructure along a detuning grid.

    frequencies[i, j] is branch j's shifted eigenfrequency at detunings[i];
    weights[i, j] holds |(C_001, C_100, C_010)| of that branch's normalized
    eigenvector.
    """

    detunings: np.ndarray
    frequencies: np.ndarray  # (n, 3)
    weights: np.ndarray  # (n, 3, 3)
    vectors: np.ndarray  # (n, 3, 3) complex, column j = branch j


def eigenstructure_vs_detuning(
    rabi_a: complex,
    rabi_b: complex,
    omega_b_minus_omega_a: float,
    detunings,
    modulation_target: str = CAVITY,
) -> BranchTable:
    """Dressed branches of the unmodulated tri-state system versus the
    detuning omega_a - W.

    The plotted eigenfrequencies are shifted by the value of
    (omega_a/2 + omega_b/2 + W) at resonance, which removes the absolute
    frequency scale; for the cavity target both mode frequencies track the
    sweep at equal rates, for the atom target the transition is swept.
    Branches are ordered by eigenvector continuity (maximal overlap with
    the previous grid point), not by eigenvalue sorting.
    """
    detunings = np.asarray(detunings, dtype=float)
    dba = float(omega_b_minus_omega_a)
    ra, rb = complex(rabi_a), complex(rabi_b)
    n = detunings.size
    freqs = np.empty((n, 3))
    weights = np.empty((n, 3, 3))
    vectors = np.empty((n, 3, 3), dtype=complex)
    prev = None
    for i, d in enumerate(detunings):
        if modulation_target == ATOM:
            diag = (-d, 0.0, dba)
        else:
            diag = (d, 2.0 * d, 2.0 * d + dba)
        h = np.array(
            [
                [diag[0], -ra, -rb],
                [-ra.conjugate(), diag[1], 0.0],
                [-rb.conjugate(), 0.0, diag[2]],
            ],
            dtype=complex,
        )
        vals, vecs = np.linalg.eigh(h)
        if prev is not None:
            overlap = np.abs(prev.conj().T @ vecs)  # rows: old branch, cols: new
            _, cols = linear_sum_assignment(-overlap)
            vals = vals[cols]
            vecs = vecs[:, cols]
        freqs[i] = vals.real
        vectors[i] = vecs
        weights[i] = np.abs(vecs).T  # row j = branch j component moduli
        prev = vecs
    return BranchTable(
        detunings=detunings, frequencies=freqs, weights=weights, vectors=vectors
    )
