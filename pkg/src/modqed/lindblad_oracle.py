"""Dense Lindblad master-equation integrator on a truncated
two-mode x two-level product basis.

This is the ground-truth oracle for the open-system dyadic engine: it
builds the thermal dissipators of both modes and the emitter (plus pure
dephasing) as explicit jump operators and integrates

    drho/dt = -i [H(t), rho] + L(rho)

with the time-dependent RWA Hamiltonian.  Dimensions stay small (<= a few
tens), so everything is dense.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import IntegrationError, ValidationError
from .numerics import IntegratorConfig, integrate_complex_ode
from .open_system import RelaxationRates
from .trimode import TrimodeParams

PSD_ABORT = -1e-8


@dataclass(frozen=True)
class ProductBasis:
    """Fock truncation (n_max_a, n_max_b) per mode; states are indexed as
    (n_a, n_b, s) with s the emitter level."""

    n_max_a: int = 1
    n_max_b: int = 1

    def __post_init__(self):
        if self.n_max_a < 1 or self.n_max_b < 1:
            raise ValidationError(
                "single-excitation coverage needs n_max_a, n_max_b >= 1"
            )

    @property
    def dimension(self) -> int:
        return 2 * (self.n_max_a + 1) * (self.n_max_b + 1)

    def index(self, n_a: int, n_b: int, s: int) -> int:
        if not (0 <= n_a <= self.n_max_a and 0 <= n_b <= self.n_max_b and s in (0, 1)):
            raise ValidationError(f"state ({n_a}, {n_b}, {s}) outside basis")
        return (n_a * (self.n_max_b + 1) + n_b) * 2 + s

    def state(self, i: int) -> tuple[int, int, int]:
        s = i % 2
        rest = i // 2
        n_b = rest % (self.n_max_b + 1)
        n_a = rest // (self.n_max_b + 1)
        return n_a, n_b, s

    def states(self):
        return [self.state(i) for i in range(self.dimension)]

    def single_excitation_indices(self) -> list[int]:
        """Indices of (|000>, |001>, |100>, |010>) in trimode basis order."""
        return [
            self.index(0, 0, 0),
            self.index(0, 0, 1),
            self.index(1, 0, 0),
            self.index(0, 1, 0),
        ]


def lowering_a(basis: ProductBasis) -> np.ndarray:
    d = basis.dimension
    op = np.zeros((d, d))
    for n_a, n_b, s in basis.states():
        if n_a >= 1:
            op[basis.index(n_a - 1, n_b, s), basis.index(n_a, n_b, s)] = np.sqrt(n_a)
    return op


def lowering_b(basis: ProductBasis) -> np.ndarray:
    d = basis.dimension
    op = np.zeros((d, d))
    for n_a, n_b, s in basis.states():
        if n_b >= 1:
            op[basis.index(n_a, n_b - 1, s), basis.index(n_a, n_b, s)] = np.sqrt(n_b)
    return op


def lowering_atom(basis: ProductBasis) -> np.ndarray:
    d = basis.dimension
    op = np.zeros((d, d))
    for n_a, n_b, s in basis.states():
        if s == 1:
            op[basis.index(n_a, n_b, 0), basis.index(n_a, n_b, 1)] = 1.0
    return op


def number_diagonals(basis: ProductBasis) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(n_a, n_b, s) along the basis diagonal."""
    states = np.array(basis.states())
    return states[:, 0].astype(float), states[:, 1].astype(float), states[:, 2].astype(float)


def _jump_operators(rates: RelaxationRates, basis: ProductBasis):
    """(rate, operator) pairs of the summed partial Lindbladians."""
    sig = lowering_atom(basis)
    a = lowering_a(basis)
    b = lowering_b(basis)
    n0, n1 = rates.atom_occupations()
    nbar_a = rates.mode_occupation("a")
    nbar_b = rates.mode_occupation("b")
    jumps = [
        (rates.gamma * n0, sig),
        (rates.gamma * n1, sig.T),
        (rates.mu_a * (nbar_a + 1.0), a),
        (rates.mu_a * nbar_a, a.T),
        (rates.mu_b * (nbar_b + 1.0), b),
        (rates.mu_b * nbar_b, b.T),
        (2.0 * rates.gamma_el, sig.T @ sig),
    ]
    return [(r, op) for r, op in jumps if r > 0]


def build_lindbladian(
    params: TrimodeParams, rates: RelaxationRates, basis: ProductBasis
):
    """Superoperator application rho -> L(rho) summing the atomic,
    both-mode thermal, and pure-dephasing dissipators.  Trace(L(rho)) = 0
    for every rho by construction."""
    terms = []
    for rate, op in _jump_operators(rates, basis):
        op_dag = op.conj().T
        terms.append((rate, op, op_dag, op_dag @ op))

    def lindblad(rho: np.ndarray) -> np.ndarray:
        out = np.zeros_like(rho)
        for rate, op, op_dag, op2 in terms:
            out += rate * (op @ rho @ op_dag - 0.5 * (op2 @ rho + rho @ op2))
        return out

    return lindblad


def hamiltonian(params: TrimodeParams, basis: ProductBasis, t: float) -> np.ndarray:
    """Lab-frame RWA Hamiltonian on the truncated product basis."""
    na, nb, s = number_diagonals(basis)
    diag = (
        params.omega_a.value(t) * (na + 0.5)
        + params.omega_b.value(t) * (nb + 0.5)
        + params.transition.value(t) * s
    )
    h = np.diag(diag.astype(complex))
    coupling = params.rabi_a * (lowering_atom(basis).T @ lowering_a(basis))
    coupling = coupling + params.rabi_b * (lowering_atom(basis).T @ lowering_b(basis))
    h -= coupling + coupling.conj().T
    return h


def effective_hamiltonian(
    params: TrimodeParams,
    rates: RelaxationRates,
    basis: ProductBasis,
    t: float = 0.0,
) -> np.ndarray:
    """H(t) - i Lambda with the anti-Hermitian relaxation part built from
    the jump operators: Lambda = (1/2) sum_k rate_k l_k^dag l_k."""
    lam = np.zeros((basis.dimension, basis.dimension))
    for rate, op in _jump_operators(rates, basis):
        lam += 0.5 * rate * (op.conj().T @ op)
    return hamiltonian(params, basis, t) - 1j * lam


@dataclass(frozen=True)
class DensityTrajectory:
    """Sampled density matrices rho[i] (lab frame) at times t[i]."""

    basis: ProductBasis
    t: np.ndarray
    rho: np.ndarray  # (m, d, d)

    def populations(self) -> np.ndarray:
        return np.real(np.einsum("mii->mi", self.rho))

    def single_excitation_block(self) -> np.ndarray:
        idx = np.array(self.basis.single_excitation_indices())
        return self.rho[:, idx[:, None], idx[None, :]]


def assert_valid_density_matrix(rho: np.ndarray, tol: float = 1e-8) -> None:
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise ValidationError("density matrix not Hermitian")
    if abs(np.trace(rho).real - 1.0) > tol:
        raise ValidationError(f"density matrix trace {np.trace(rho)} != 1")
    if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() < -max(tol, 1e-10):
        raise ValidationError("density matrix not positive semidefinite")


def integrate_master(
    lindblad,
    hamiltonian_of_t,
    rho0: np.ndarray,
    t_span,
    cfg: IntegratorConfig = IntegratorConfig(),
    t_eval=None,
) -> tuple[np.ndarray, np.ndarray]:
    """Generic master-equation integration
    drho/dt = -i [H(t), rho] + L(rho); returns (t, rho) samples.

    Positivity is checked on every sample; a breach below -1e-8 aborts.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    d = rho0.shape[0]

    def rhs(t, y):
        rho = y.reshape(d, d)
        h = hamiltonian_of_t(t)
        out = -1j * (h @ rho - rho @ h) + lindblad(rho)
        return out.reshape(-1)

    sol = integrate_complex_ode(rhs, rho0.reshape(-1), t_span, cfg, t_eval=t_eval)
    rho = sol.y.reshape(-1, d, d)
    for i in range(rho.shape[0]):
        eigs = np.linalg.eigvalsh(0.5 * (rho[i] + rho[i].conj().T))
        if eigs.min() < PSD_ABORT:
            raise IntegrationError(
                f"density matrix positivity breached at t = {sol.t[i]}: "
                f"min eigenvalue {eigs.min():.3e}"
            )
    return sol.t, rho


def integrate_lindblad(
    params: TrimodeParams,
    rates: RelaxationRates,
    basis: ProductBasis,
    rho0: np.ndarray,
    t_span,
    cfg: IntegratorConfig = IntegratorConfig(),
    t_eval=None,
    frame: str = "interaction",
) -> DensityTrajectory:
    """Integrate the full master equation for the modulated tri-state
    scenario and return lab-frame density matrices.

    frame='interaction' removes the time-dependent diagonal part exactly
    (the dissipators are invariant because every jump operator is an
    eigenoperator of the diagonal Hamiltonian), which keeps steps large;
    frame='lab' integrates H(t) directly and is only sensible for small
    absolute frequencies.
    """
    lindblad = build_lindbladian(params, rates, basis)
    rho0 = np.asarray(rho0, dtype=complex)
    na, nb, s = number_diagonals(basis)

    def diag_phases(t: float) -> np.ndarray:
        pa = params.omega_a.phase_integral(0.0, t)
        pb = params.omega_b.phase_integral(0.0, t)
        pw = params.transition.phase_integral(0.0, t)
        return (na + 0.5) * pa + (nb + 0.5) * pb + s * pw

    if frame == "lab":
        h_of_t = lambda t: hamiltonian(params, basis, t)
        t_out, rho = integrate_master(lindblad, h_of_t, rho0, t_span, cfg, t_eval)
        return DensityTrajectory(basis=basis, t=t_out, rho=rho)
    if frame != "interaction":
        raise ValidationError("frame must be 'interaction' or 'lab'")

    coup_a = lowering_atom(basis).T @ lowering_a(basis)
    coup_b = lowering_atom(basis).T @ lowering_b(basis)
    ra, rb = params.rabi_a, params.rabi_b

    def h_int(t: float) -> np.ndarray:
        phi_a, phi_b = params.detuning_integrals(t)
        v = -(ra * cmath.exp(-1j * phi_a)) * coup_a
        v = v - (rb * cmath.exp(-1j * phi_b)) * coup_b
        return v + v.conj().T

    # into the interaction picture at t0, out at each sample
    t0 = float(t_span[0])
    u0 = np.exp(1j * diag_phases(t0))
    rho_tilde0 = rho0 * np.outer(u0, u0.conj())
    t_out, rho_tilde = integrate_master(lindblad, h_int, rho_tilde0, t_span, cfg, t_eval)
    rho = np.empty_like(rho_tilde)
    for i, t in enumerate(t_out):
        u = np.exp(-1j * diag_phases(float(t)))
        rho[i] = rho_tilde[i] * np.outer(u, u.conj())
    return DensityTrajectory(basis=basis, t=t_out, rho=rho)
