"""Open dynamics of the modulated tri-state system: relaxation-rate
composition, noise-averaged dyadic evolution (equal to the density matrix
on the truncated basis), stochastic trajectory sampling at zero
temperature, damped eigenstructure, and the steady-state transparency
analysis.

The dyadic engine is the primary deterministic path; trajectories are a
stochastic cross-check whose noise correlators close in mean field (the
feeding variance at step k uses ensemble averages from step k-1).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import IntegrationError, UnsupportedModelError, ValidationError
from .numerics import IntegratorConfig, integrate_complex_ode, stream_rng
from .schedule import Sinusoidal
from .trimode import ReducedSystem, TrimodeParams, TrimodeState

PSD_ABORT = -1e-8
TRACE_TOL = 1e-9

ZERO_TEMPERATURE = "zero_temperature"
POPULATION_PRESERVING = "population_preserving"
TWO_LEVEL_T1T2 = "two_level_T1T2"


@dataclass(frozen=True)
class RelaxationRates:
    """Partial reservoir rates: gamma (atom inelastic), gamma_el (atom pure
    dephasing), mu_a/mu_b (mode decay), with reservoir temperatures in
    energy units (hbar = 1 makes them frequencies).  The reference
    frequencies are only needed when the matching temperature is nonzero.
    """

    gamma: float = 0.0
    gamma_el: float = 0.0
    mu_a: float = 0.0
    mu_b: float = 0.0
    temp_atom: float = 0.0
    temp_field: float = 0.0
    transition_frequency: float | None = None
    omega_a: float | None = None
    omega_b: float | None = None

    def __post_init__(self):
        for name in ("gamma", "gamma_el", "mu_a", "mu_b", "temp_atom", "temp_field"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be >= 0, got {getattr(self, name)}")
        if self.temp_atom > 0 and self.transition_frequency is None:
            raise ValidationError("temp_atom > 0 requires transition_frequency")
        if self.temp_field > 0 and (self.omega_a is None or self.omega_b is None):
            raise ValidationError("temp_field > 0 requires omega_a and omega_b")

    def atom_occupations(self) -> tuple[float, float]:
        """Thermal weights (N_0, N_1) of the two atomic levels."""
        if self.temp_atom == 0:
            return 1.0, 0.0
        boltz = math.exp(-self.transition_frequency / self.temp_atom)
        return 1.0 / (1.0 + boltz), boltz / (1.0 + boltz)

    def mode_occupation(self, which: str) -> float:
        """Bose-Einstein occupation of mode 'a' or 'b'."""
        if self.temp_field == 0:
            return 0.0
        omega = self.omega_a if which == "a" else self.omega_b
        return 1.0 / math.expm1(omega / self.temp_field)

    def is_zero_temperature(self) -> bool:
        return self.temp_atom == 0 and self.temp_field == 0


def compose_rates(rates: RelaxationRates, n_a: int, n_b: int, level: int) -> float:
    """Amplitude relaxation rate gamma_{n_a n_b level} of a product basis
    state, combining the partial reservoir rates with thermal factors.
    The elastic dephasing rate adds to every atom-excited state.
    """
    if n_a < 0 or n_b < 0:
        raise ValidationError("occupation numbers must be >= 0")
    if level not in (0, 1):
        raise ValidationError(f"level must be 0 or 1, got {level}")
    n0, n1 = rates.atom_occupations()
    atom = 0.5 * rates.gamma * (n1 if level == 0 else n0)
    nbar_a = rates.mode_occupation("a")
    nbar_b = rates.mode_occupation("b")
    mode_a = 0.5 * rates.mu_a * (nbar_a * (n_a + 1) + (nbar_a + 1) * n_a)
    mode_b = 0.5 * rates.mu_b * (nbar_b * (n_b + 1) + (nbar_b + 1) * n_b)
    elastic = rates.gamma_el if level == 1 else 0.0
    return atom + mode_a + mode_b + elastic


def amplitude_rates(rates: RelaxationRates) -> np.ndarray:
    """(gamma_000, gamma_001, gamma_100, gamma_010) on the basis order."""
    return np.array(
        [
            compose_rates(rates, 0, 0, 0),
            compose_rates(rates, 0, 0, 1),
            compose_rates(rates, 1, 0, 0),
            compose_rates(rates, 0, 1, 0),
        ]
    )


@dataclass(frozen=True)
class NoiseModel:
    """Diagonal noise correlators D_aa as functions of the averaged
    populations.  Modes:

    - zero_temperature: every decay feeds the global ground state; the
      elastic part feeds the atom-excited population back to itself, which
      is exactly the Lindblad-equivalent correlator on this basis.
    - population_preserving: D_aa = 2 gamma_a |C_a|^2, each population kept.
    - two_level_T1T2: the two-level closure (modes idle), D_00 = |C_1|^2/T1
      and D_11 = 2 gamma_el |C_1|^2.
    """

    mode: str = ZERO_TEMPERATURE

    def __post_init__(self):
        allowed = (ZERO_TEMPERATURE, POPULATION_PRESERVING, TWO_LEVEL_T1T2)
        if self.mode not in allowed:
            raise ValidationError(f"noise model must be one of {allowed}")

    def validate_rates(self, rates: RelaxationRates) -> None:
        if self.mode in (ZERO_TEMPERATURE, TWO_LEVEL_T1T2):
            if not rates.is_zero_temperature():
                raise UnsupportedModelError(
                    f"{self.mode} noise model requires zero reservoir "
                    "temperatures; use the lindblad_oracle engine instead"
                )
        if self.mode == TWO_LEVEL_T1T2 and (rates.mu_a > 0 or rates.mu_b > 0):
            raise UnsupportedModelError(
                "two_level_T1T2 describes the bare emitter; mode decay "
                "rates must be zero"
            )

    def feed_diagonal(self, rates: RelaxationRates, populations) -> np.ndarray:
        """D_aa given mean populations in basis order (000, 001, 100, 010)."""
        p = np.asarray(populations, dtype=float)
        d = np.zeros(4)
        if self.mode == POPULATION_PRESERVING:
            return 2.0 * amplitude_rates(rates) * p
        if self.mode == TWO_LEVEL_T1T2:
            d[0] = rates.gamma * p[1]
            d[1] = 2.0 * rates.gamma_el * p[1]
            return d
        # zero temperature: inelastic decays feed |000>, dephasing feeds back
        d[0] = rates.gamma * p[1] + rates.mu_a * p[2] + rates.mu_b * p[3]
        d[1] = 2.0 * rates.gamma_el * p[1]
        return d

    def conserves_norm(self) -> bool:
        return self.mode in (ZERO_TEMPERATURE, POPULATION_PRESERVING, TWO_LEVEL_T1T2)


@dataclass(frozen=True)
class DyadicState:
    """Noise-averaged dyadics on the basis (000, 001, 100, 010): the mixed
    state's density matrix on the truncated manifold."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (4, 4):
            raise ValidationError(f"dyadic matrix must be 4x4, got {m.shape}")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_pure(cls, state: TrimodeState) -> "DyadicState":
        v = state.as_array()
        return cls(matrix=np.outer(v, v.conj()))

    def populations(self) -> np.ndarray:
        return np.real(np.diag(self.matrix))

    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def require_valid(self, psd_tol: float = 1e-10, trace_tol: float = 1e-9) -> None:
        m = self.matrix
        if np.max(np.abs(m - m.conj().T)) > 1e-10:
            raise ValidationError("dyadic matrix is not Hermitian")
        eigs = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
        if eigs.min() < -psd_tol:
            raise ValidationError(
                f"dyadic matrix not positive semidefinite: min eig {eigs.min():.3e}"
            )
        if abs(self.trace() - 1.0) > trace_tol:
            raise ValidationError(f"dyadic trace {self.trace()} != 1")


@dataclass(frozen=True)
class DyadicTrajectory:
    """Rotating-frame dyadic samples rho[i] at times t[i]."""

    params: TrimodeParams
    t: np.ndarray
    rho: np.ndarray  # (m, 4, 4)

    def populations(self) -> np.ndarray:
        return np.real(np.einsum("mii->mi", self.rho))

    def traces(self) -> np.ndarray:
        return np.real(np.einsum("mii->m", self.rho))

    def lab_matrices(self) -> np.ndarray:
        """Restore the lab-frame fast phases on every sample."""
        out = np.empty_like(self.rho)
        for i, t in enumerate(self.t):
            ph = np.array(self.params.state_phases(float(t)))
            u = np.exp(-1j * ph)
            out[i] = self.rho[i] * np.outer(u, u.conj())
        return out


def _hamiltonian_full(params: TrimodeParams):
    ra, rb = params.rabi_a, params.rabi_b

    def h(t: float) -> np.ndarray:
        phi_a, phi_b = params.detuning_integrals(t)
        ca = -ra * cmath.exp(-1j * phi_a)
        cb = -rb * cmath.exp(-1j * phi_b)
        m = np.zeros((4, 4), dtype=complex)
        m[1, 2] = ca
        m[2, 1] = ca.conjugate()
        m[1, 3] = cb
        m[3, 1] = cb.conjugate()
        return m

    return h


def _hamiltonian_reduced(reduced: ReducedSystem):
    m = np.zeros((4, 4), dtype=complex)
    m[1, 2] = -reduced.r_a0
    m[2, 1] = -reduced.r_a0.conjugate()
    m[1, 3] = -reduced.r_bm
    m[3, 1] = -reduced.r_bm.conjugate()

    def h(t: float) -> np.ndarray:
        return m

    return h


def integrate_dyadics(
    params: TrimodeParams,
    rates: RelaxationRates,
    noise: NoiseModel,
    init: DyadicState,
    t_span,
    cfg: IntegratorConfig = IntegratorConfig(),
    t_eval=None,
    hamiltonian: str = "full",
    reduced: ReducedSystem | None = None,
) -> DyadicTrajectory:
    """Evolve the averaged dyadics in the rotating frame:

        drho/dt = -i [H(t), rho] - (gamma_a + gamma_b) rho_ab + D(rho)

    with composed amplitude rates on the diagonal damping and the noise
    model's feeding terms D.  hamiltonian='reduced' keeps only the resonant
    harmonic couplings (requires the matching ReducedSystem).
    """
    init.require_valid()
    noise.validate_rates(rates)
    if hamiltonian == "reduced":
        if reduced is None:
            raise ValidationError("hamiltonian='reduced' needs a ReducedSystem")
        h_of_t = _hamiltonian_reduced(reduced)
    elif hamiltonian == "full":
        h_of_t = _hamiltonian_full(params)
    else:
        raise ValidationError("hamiltonian must be 'full' or 'reduced'")
    gam = amplitude_rates(rates)
    damp = gam[:, None] + gam[None, :]

    def rhs(t, y):
        rho = y.reshape(4, 4)
        h = h_of_t(t)
        d = -1j * (h @ rho - rho @ h) - damp * rho
        feed = noise.feed_diagonal(rates, np.real(np.diag(rho)))
        d[np.diag_indices(4)] += feed
        return d.reshape(-1)

    sol = integrate_complex_ode(
        rhs, init.matrix.reshape(-1), t_span, cfg, t_eval=t_eval
    )
    rho = sol.y.reshape(-1, 4, 4)
    traj = DyadicTrajectory(params=params, t=sol.t, rho=rho)
    _check_dyadic_health(traj, noise)
    return traj


def _check_dyadic_health(traj: DyadicTrajectory, noise: NoiseModel) -> None:
    for i in range(traj.rho.shape[0]):
        m = traj.rho[i]
        eigs = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
        if eigs.min() < PSD_ABORT:
            raise IntegrationError(
                f"dyadic positivity breached at t = {traj.t[i]}: "
                f"min eigenvalue {eigs.min():.3e}"
            )
    if noise.conserves_norm():
        traces = traj.traces()
        span = max(traj.t[-1] - traj.t[0], 1.0)
        drift = np.max(np.abs(traces - traces[0]))
        if drift > TRACE_TOL * span:
            raise IntegrationError(
                f"dyadic trace drift {drift:.3e} exceeds {TRACE_TOL:.0e} per unit time"
            )


@dataclass(frozen=True)
class TrajectoryEnsemble:
    """Ensemble statistics of the stochastic state-vector integration."""

    t: np.ndarray
    mean_populations: np.ndarray  # (m, 4)
    sem_populations: np.ndarray  # (m, 4)
    mean_norm: np.ndarray  # (m,)
    sem_norm: np.ndarray  # (m,)
    n_traj: int
    seed: int
    dt: float


def _characteristic_frequency(params: TrimodeParams) -> float:
    freqs = [abs(params.rabi_a), abs(params.rabi_b)]
    w_mean = params.transition.mean_value()
    for sched in (params.omega_a, params.omega_b, params.transition):
        if isinstance(sched, Sinusoidal):
            mean_det = abs(sched.mean - (w_mean if w_mean is not None else sched.mean))
            freqs.append(mean_det + sched.depth + sched.mod_frequency)
        else:
            mean = sched.mean_value()
            if mean is not None and w_mean is not None:
                freqs.append(abs(mean - w_mean))
    return max(freqs)


def integrate_trajectories(
    params: TrimodeParams,
    rates: RelaxationRates,
    noise: NoiseModel,
    init: TrimodeState,
    t_span,
    n_traj: int,
    seed: int,
    dt: float | None = None,
    n_samples: int = 200,
) -> TrajectoryEnsemble:
    """Stochastic state-vector sampling at zero reservoir temperature.

    The amplitudes damp deterministically with the composed rates while
    each basis amplitude receives an independent complex Gaussian increment
    of variance D_aa * dt per step; D uses the ensemble-mean populations of
    the previous step (mean-field closure).  Noise is drawn from a Philox
    counter-based stream keyed by the seed, so a fixed (seed, n_traj, dt)
    reproduces results exactly.
    """
    if n_traj < 1:
        raise ValidationError(f"n_traj must be >= 1, got {n_traj}")
    if not rates.is_zero_temperature():
        raise UnsupportedModelError(
            "trajectory sampling supports zero reservoir temperatures only; "
            "use integrate_dyadics / lindblad_oracle for thermal reservoirs"
        )
    noise.validate_rates(rates)
    init.require_normalized()
    t0, t1 = float(t_span[0]), float(t_span[1])
    gam = amplitude_rates(rates)
    max_rate = max(gam.max(), 1e-300)
    char = _characteristic_frequency(params)
    if dt is None:
        # 0.01/max-rate caps the mean-field closure; 0.04/char resolves the
        # fastest rotating-frame oscillation well within RK4 accuracy
        dt = min(0.01 / max_rate, 0.04 / max(char, 1e-300), (t1 - t0) / 10.0)
    n_steps = max(1, int(math.ceil((t1 - t0) / dt)))
    dt = (t1 - t0) / n_steps

    h_of_t = _hamiltonian_full(params)
    gam_diag = np.diag(gam).astype(complex)

    def generator(t):
        return -1j * h_of_t(t) - gam_diag

    eye = np.eye(4, dtype=complex)

    def step_propagator(t):
        # RK4 one-step propagator of the linear drift, shared by the ensemble
        k1 = generator(t)
        k_mid = generator(t + 0.5 * dt)
        k2 = k_mid @ (eye + 0.5 * dt * k1)
        k3 = k_mid @ (eye + 0.5 * dt * k2)
        k4 = generator(t + dt) @ (eye + dt * k3)
        return eye + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    rng = stream_rng(seed, 0)
    y = np.tile(init.as_array()[:, None], (1, n_traj))
    sample_every = max(1, n_steps // max(n_samples - 1, 1))
    ts, means, sems, norm_means, norm_sems = [], [], [], [], []

    def record(t, y):
        p = y.real**2 + y.imag**2
        mean = p.mean(axis=1)
        if n_traj > 1:
            sem = p.std(axis=1, ddof=1) / math.sqrt(n_traj)
        else:
            sem = np.zeros(4)
        norms = p.sum(axis=0)
        ts.append(t)
        means.append(mean)
        sems.append(sem)
        norm_means.append(norms.mean())
        norm_sems.append(
            norms.std(ddof=1) / math.sqrt(n_traj) if n_traj > 1 else 0.0
        )
        return mean

    mean_pop = record(t0, y)
    scale = 1.0 / math.sqrt(2.0)
    # amplitudes that can ever receive noise under this model
    probe = noise.feed_diagonal(rates, np.ones(4))
    active = np.nonzero(probe > 0)[0]
    n_active = active.size
    for step in range(1, n_steps + 1):
        y = step_propagator(t0 + (step - 1) * dt) @ y
        t = t0 + step * dt
        if n_active:
            # Ito noise kick with mean-field variances from the previous step
            feed = noise.feed_diagonal(rates, mean_pop)
            draws = rng.standard_normal((n_active, 2, n_traj))
            xi = scale * (draws[:, 0, :] + 1j * draws[:, 1, :])
            y[active] += np.sqrt(feed[active] * dt)[:, None] * xi
        mean_pop = (y.real**2 + y.imag**2).mean(axis=1)
        if step % sample_every == 0 or step == n_steps:
            record(t, y)

    return TrajectoryEnsemble(
        t=np.array(ts),
        mean_populations=np.array(means),
        sem_populations=np.array(sems),
        mean_norm=np.array(norm_means),
        sem_norm=np.array(norm_sems),
        n_traj=n_traj,
        seed=seed,
        dt=dt,
    )


def damped_eigen(cumulative: float, gamma: float) -> tuple[complex, complex, complex]:
    """Eigenvalues of the damped reduced system (solutions ~ e^{-Gamma t}):
    Gamma_0 = 0 and Gamma_{1,2} = gamma/4 +- i sqrt(sigma^2 - gamma^2/16),
    the square root continuing to a real damping splitting when
    sigma < gamma/4."""
    if cumulative < 0 or gamma < 0:
        raise ValidationError("cumulative Rabi frequency and gamma must be >= 0")
    root = cmath.sqrt(cumulative**2 - gamma**2 / 16.0)
    return 0.0 + 0.0j, gamma / 4.0 + 1j * root, gamma / 4.0 - 1j * root


def decoupled_amplitude(rs: ReducedSystem, init: TrimodeState) -> complex:
    """Projection A of the initial state on the dark (transparency) branch."""
    if rs.r_bm == 0:
        raise ValidationError("R_bm = 0: the dark branch reduces to mode b alone")
    ratio = rs.r_bm / rs.r_a0
    denom = 1.0 + abs(ratio) ** 2
    return (init.c100 * abs(ratio) ** 2 - init.c010 * ratio) / denom


def steady_state_quanta(init: TrimodeState, rs: ReducedSystem) -> float:
    """Average steady-state number of field quanta, normalized by its
    initial value, after atomic decay has emptied the bright branches:

        N_q = |A|^2 (1 + |R_a0|^2/|R_bm|^2) / (|c100(0)|^2 + |c010(0)|^2)

    Equals 1 exactly at the transparency-optimal ratio c010/c100.
    """
    init.require_normalized()
    if rs.r_bm == 0:
        raise ValidationError("R_bm = 0: steady-state analysis needs mode b coupled")
    field0 = abs(init.c100) ** 2 + abs(init.c010) ** 2
    if field0 == 0:
        raise ValidationError("zero initial field quanta: normalization undefined")
    a = decoupled_amplitude(rs, init)
    return abs(a) ** 2 * (1.0 + abs(rs.r_a0) ** 2 / abs(rs.r_bm) ** 2) / field0


def tail_average(t: np.ndarray, values: np.ndarray, window: float) -> np.ndarray:
    """Mean of a sampled quantity over the trailing time window (used to
    read steady-state values off oscillating tails)."""
    mask = t >= (t[-1] - window)
    return np.mean(values[mask], axis=0)
