"""Shared numerical kernels: Bessel evaluation, complex adaptive ODE
integration, bracketed root finding, small eigensolvers, and reproducible
counter-based random streams.

The ODE kernel wraps scipy's embedded Runge-Kutta integrators on complex
state vectors; everything here is deterministic for fixed inputs and seeds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox
from scipy.integrate import solve_ivp
from scipy.special import jv

from .errors import BracketError, IntegrationError, ScheduleDomainError

BESSEL_X_MAX = 50.0


def bessel_j(n: int, x):
    """Bessel function of the first kind J_n for integer n >= 0.

    Accepts scalars or arrays; |x| must stay within the artifact's
    operating range (<= 50).
    """
    if n < 0 or n != int(n):
        raise ValueError(f"bessel_j requires integer n >= 0, got {n}")
    arr = np.asarray(x, dtype=float)
    if np.any(np.abs(arr) > BESSEL_X_MAX):
        raise ScheduleDomainError(
            f"bessel_j argument outside operating range |x| <= {BESSEL_X_MAX}"
        )
    out = jv(int(n), arr)
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances and stepping controls for the adaptive RK integrators."""

    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_step: float = math.inf
    initial_step: float | None = None
    method: str = "DOP853"

    def __post_init__(self):
        if not (0 < self.rel_tol <= 1e-3):
            raise ValueError(f"rel_tol must be in (0, 1e-3], got {self.rel_tol}")
        if self.abs_tol <= 0:
            raise ValueError(f"abs_tol must be > 0, got {self.abs_tol}")


@dataclass(frozen=True)
class OdeSolution:
    """Sampled trajectory: t has shape (m,), y has shape (m, n_state)."""

    t: np.ndarray
    y: np.ndarray


def integrate_complex_ode(
    f,
    y0,
    t_span,
    cfg: IntegratorConfig = IntegratorConfig(),
    t_eval=None,
) -> OdeSolution:
    """Adaptive integration of dy/dt = f(t, y) on a complex state vector.

    Returns samples at t_eval (or the integrator's own steps).  A step-size
    failure raises IntegrationError carrying the failure time.
    """
    y0 = np.asarray(y0, dtype=complex)
    kwargs = {}
    if cfg.initial_step is not None:
        kwargs["first_step"] = cfg.initial_step
    sol = solve_ivp(
        f,
        tuple(t_span),
        y0,
        method=cfg.method,
        rtol=cfg.rel_tol,
        atol=cfg.abs_tol,
        max_step=cfg.max_step,
        t_eval=None if t_eval is None else np.asarray(t_eval, dtype=float),
        dense_output=False,
        **kwargs,
    )
    if not sol.success:
        t_fail = sol.t[-1] if sol.t.size else t_span[0]
        raise IntegrationError(
            f"integrator {cfg.method} failed near t = {t_fail}: {sol.message}"
        )
    return OdeSolution(t=sol.t, y=sol.y.T.copy())


def find_root_bracketed(f, lo: float, hi: float, tol: float = 1e-12) -> float:
    """Bisection on [lo, hi]; stops when |hi - lo| <= tol * |midpoint|."""
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise BracketError(
            f"no sign change on bracket [{lo}, {hi}]: f = ({flo}, {fhi})"
        )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if abs(hi - lo) <= tol * max(abs(mid), 1e-300):
            return mid
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if flo * fmid < 0:
            hi = mid
        else:
            lo, flo = mid, fmid
    return 0.5 * (lo + hi)


def hermitian_eigen(matrix):
    """Eigenvalues (ascending) and column eigenvectors of a Hermitian matrix."""
    return np.linalg.eigh(np.asarray(matrix, dtype=complex))


def stream_rng(seed: int, stream: int = 0) -> Generator:
    """Counter-based Philox generator keyed by (seed, stream).

    Streams with distinct keys are statistically independent, so parallel
    consumers get schedule-independent results.
    """
    key = np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF), np.uint64(stream)], dtype=np.uint64)
    return Generator(Philox(key=key))


def complex_gaussians(rng: Generator, shape) -> np.ndarray:
    """Standard complex normals with E|z|^2 = 1 (Re, Im each N(0, 1/2))."""
    scale = 1.0 / math.sqrt(2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
