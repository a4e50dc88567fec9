"""modqed: dynamics and control of a two-level emitter coupled to
time-modulated cavity modes, closed and open, plus the gap-plasmon mode
geometry that generates the modulation schedules."""

__version__ = "0.1.0"

from .errors import (
    BracketError,
    ConfigError,
    IntegrationError,
    ModqedError,
    NoModeError,
    ResonanceError,
    ScheduleDomainError,
    UnsupportedModelError,
    ValidationError,
)
from .jaynes_cummings import (
    JCBlockState,
    JCEigenmodes,
    JCParams,
    adiabatic_mode_phase,
    integrate_jc_block,
    jc_eigenmodes,
    sweep_transition_probability,
)
from .numerics import IntegratorConfig, bessel_j, find_root_bracketed, integrate_complex_ode
from .open_system import (
    DyadicState,
    NoiseModel,
    RelaxationRates,
    TrajectoryEnsemble,
    compose_rates,
    damped_eigen,
    integrate_dyadics,
    integrate_trajectories,
    steady_state_quanta,
)
from .plasmon_cavity import (
    CavityGeometry,
    CouplingSchedules,
    DrudeCladding,
    PlasmonMode,
    TabulatedCladding,
    coupling_schedule,
    dispersion_solve,
    mode_normalization,
)
from .schedule import (
    Constant,
    HarmonicAmplitudes,
    LinearSweep,
    ModulationSchedule,
    Piecewise,
    Sinusoidal,
    harmonic_amplitudes,
    piecewise_linear,
)
from .trimode import (
    ReducedSystem,
    TrimodeParams,
    TrimodeState,
    analytic_closed_solution,
    cumulative_rabi,
    eigenstructure_vs_detuning,
    integrate_trimode_full,
    reduced_resonant_system,
    transparency_condition,
)
