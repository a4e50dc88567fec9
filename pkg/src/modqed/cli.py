"""Scenario-driven command line: validate a JSON config, dispatch to the
dynamics or plasmon engines, and write self-describing CSV/JSON tables
(plus rendered figures) for reproducing the modulated-cavity results.

    modqed run <config.json> [--out DIR] [--format csv|json] [--seed N]
               [--preset NAME] [--no-figures] [--error-json]

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
Identical config + seed reruns produce byte-identical delimited outputs.
"""

from __future__ import annotations

import argparse
import importlib.resources
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, ModqedError, ValidationError
from .jaynes_cummings import jc_eigenmodes, sweep_transition_probability
from .open_system import (
    DyadicState,
    NoiseModel,
    RelaxationRates,
    integrate_dyadics,
    integrate_trajectories,
    steady_state_quanta,
)
from .plasmon_cavity import (
    ANTISYMMETRIC,
    SYMMETRIC,
    CavityGeometry,
    DrudeCladding,
    dispersion_solve,
    solve_mode,
)
from .report import render_figure, write_csv, write_json
from .schedule import Constant, Sinusoidal
from .trimode import (
    TrimodeParams,
    TrimodeState,
    analytic_trajectory,
    eigenstructure_vs_detuning,
    integrate_trimode_full,
    reduced_resonant_system,
)

KINDS = (
    "jc_eigen_scan",
    "jc_sweep",
    "trimode_closed",
    "trimode_reduced",
    "trimode_eigen_scan",
    "trimode_open",
    "steady_quanta_scan",
    "plasmon_scan",
)

PRESETS = ("fig2", "fig3", "fig4", "fig5", "fig6", "fig7")

DEFAULT_SAMPLES = {
    "jc_eigen_scan": 201,
    "jc_sweep": 5,
    "trimode_closed": 401,
    "trimode_reduced": 201,
    "trimode_eigen_scan": 201,
    "trimode_open": 401,
    "steady_quanta_scan": 0,  # grid sizes set by n_abs / n_arg
    "plasmon_scan": 201,
}


class _Issues:
    """Collects every config problem with its field path before failing."""

    def __init__(self):
        self.items: list[str] = []

    def add(self, path: str, message: str):
        self.items.append(f"{path}: {message}")

    def raise_if_any(self):
        if self.items:
            raise ConfigError(self.items)


def _get_number(params, issues, name, default=None, required=False, positive=False, nonneg=False):
    path = f"parameters.{name}"
    if name not in params:
        if required:
            issues.add(path, "required")
            return None
        return default
    v = params.pop(name)
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        issues.add(path, f"expected a number, got {v!r}")
        return default
    v = float(v)
    if positive and v <= 0:
        issues.add(path, f"must be > 0, got {v}")
    if nonneg and v < 0:
        issues.add(path, f"must be >= 0, got {v}")
    return v


def _get_int(params, issues, name, default=None, required=False, minimum=None):
    path = f"parameters.{name}"
    if name not in params:
        if required:
            issues.add(path, "required")
            return None
        return default
    v = params.pop(name)
    if not isinstance(v, int) or isinstance(v, bool):
        issues.add(path, f"expected an integer, got {v!r}")
        return default
    if minimum is not None and v < minimum:
        issues.add(path, f"must be >= {minimum}, got {v}")
    return v


def _get_choice(params, issues, name, choices, default):
    path = f"parameters.{name}"
    if name not in params:
        return default
    v = params.pop(name)
    if v not in choices:
        issues.add(path, f"must be one of {choices}, got {v!r}")
        return default
    return v


def _get_complex(value, issues, path):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if (
        isinstance(value, (list, tuple))
        and len(value) == 2
        and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in value)
    ):
        return complex(value[0], value[1])
    issues.add(path, f"expected a number or [re, im] pair, got {value!r}")
    return 0j


def _get_init(params, issues, default):
    if "init" not in params:
        return dict(default)
    raw = params.pop("init")
    path = "parameters.init"
    if not isinstance(raw, dict):
        issues.add(path, f"expected an object of amplitudes, got {raw!r}")
        return dict(default)
    out = {k: 0j for k in ("c000", "c001", "c100", "c010")}
    for key, value in raw.items():
        if key not in out:
            issues.add(f"{path}.{key}", "unknown amplitude (use c000/c001/c100/c010)")
            continue
        out[key] = _get_complex(value, issues, f"{path}.{key}")
    norm = sum(abs(v) ** 2 for v in out.values())
    if abs(norm - 1.0) > 1e-9:
        issues.add(path, f"amplitudes must be normalized: sum |c|^2 = {norm}")
    return out


@dataclass
class Scenario:
    """A validated run request with every default resolved."""

    kind: str
    params: dict
    output_dir: Path
    formats: list
    seed: int
    samples: int
    resolved: dict = field(repr=False, default_factory=dict)
    stem: str = "scenario"


def _ser(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, dict):
        return {k: _ser(x) for k, x in v.items()}
    return v


def parse_scenario(raw: dict, stem: str = "scenario") -> Scenario:
    """Validate a config mapping into a Scenario; reports all problems at
    once with field paths, rejects unknown fields, and fills defaults."""
    issues = _Issues()
    if not isinstance(raw, dict):
        issues.add("$", f"config must be a JSON object, got {type(raw).__name__}")
        issues.raise_if_any()
    raw = dict(raw)
    kind = raw.pop("kind", None)
    if kind not in KINDS:
        issues.add("kind", f"must be one of {KINDS}, got {kind!r}")
        issues.raise_if_any()
    params = raw.pop("parameters", {})
    if not isinstance(params, dict):
        issues.add("parameters", "must be an object")
        params = {}
    params = dict(params)
    output = raw.pop("output", {})
    if not isinstance(output, dict):
        issues.add("output", "must be an object")
        output = {}
    output = dict(output)
    out_dir = output.pop("directory", ".")
    formats = output.pop("formats", ["csv"])
    if not isinstance(formats, list) or not formats or any(
        f not in ("csv", "json") for f in formats
    ):
        issues.add("output.formats", f"must be a non-empty list from ('csv', 'json'), got {formats!r}")
        formats = ["csv"]
    for key in output:
        issues.add(f"output.{key}", "unknown field")
    seed = raw.pop("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        issues.add("seed", f"must be a non-negative integer, got {seed!r}")
        seed = 0
    samples = raw.pop("samples", DEFAULT_SAMPLES[kind])
    if not isinstance(samples, int) or isinstance(samples, bool) or samples < 0:
        issues.add("samples", f"must be a non-negative integer, got {samples!r}")
        samples = DEFAULT_SAMPLES[kind]
    for key in raw:
        issues.add(key, "unknown field")

    parser = _PARAM_PARSERS[kind]
    typed = parser(params, issues)
    for key in params:
        issues.add(f"parameters.{key}", "unknown field")
    issues.raise_if_any()

    resolved = {
        "kind": kind,
        "parameters": {k: _ser(v) for k, v in sorted(typed.items())},
        "output": {"directory": str(out_dir), "formats": list(formats)},
        "seed": seed,
        "samples": samples,
    }
    return Scenario(
        kind=kind,
        params=typed,
        output_dir=Path(out_dir),
        formats=list(formats),
        seed=seed,
        samples=samples,
        resolved=resolved,
        stem=stem,
    )


def validate_config(path) -> Scenario:
    """Load and validate a JSON config file."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError([f"$: cannot read {path}: {exc}"]) from exc
    except json.JSONDecodeError as exc:
        raise ConfigError([f"$: malformed JSON in {path}: {exc}"]) from exc
    return parse_scenario(raw, stem=path.stem)


# per-kind parameter parsing ------------------------------------------------


def _parse_jc_eigen(params, issues):
    rabi = _get_number(params, issues, "rabi", default=1.0, positive=True)
    rabi = rabi if rabi else 1.0
    return {
        "rabi": rabi,
        "grid_min": _get_number(params, issues, "grid_min", default=-5.0 * rabi),
        "grid_max": _get_number(params, issues, "grid_max", default=5.0 * rabi),
    }


def _parse_jc_sweep(params, issues):
    rabi = _get_number(params, issues, "rabi", default=1.0, positive=True) or 1.0
    exps = params.pop("lz_exponents", [0.2, 0.5, 1.0, 2.0, 5.0])
    if not isinstance(exps, list) or not exps or any(
        not isinstance(x, (int, float)) or isinstance(x, bool) or x <= 0 for x in exps
    ):
        issues.add("parameters.lz_exponents", f"must be a list of positive numbers, got {exps!r}")
        exps = [1.0]
    window_factor = _get_number(params, issues, "window_factor", default=30.0, positive=True)
    return {"rabi": rabi, "lz_exponents": [float(x) for x in exps], "window_factor": window_factor}


def _parse_trimode_common(params, issues):
    mod = _get_number(params, issues, "mod_frequency", default=1.0, positive=True) or 1.0
    out = {
        "mod_frequency": mod,
        "rabi": _get_number(params, issues, "rabi", default=0.1 * mod, positive=True),
        "depth": _get_number(params, issues, "depth", default=mod, nonneg=True),
        "transition": _get_number(params, issues, "transition", default=100.0 * mod, positive=True),
        "harmonic_order": _get_int(params, issues, "harmonic_order", default=1, minimum=0),
        "modulation_target": _get_choice(
            params, issues, "modulation_target", ("cavity", "atom"), "cavity"
        ),
    }
    return out


FIG5_INIT = {"c000": 0j, "c001": 0j, "c100": 0.5 + 0j, "c010": math.sqrt(3) / 2 + 0j}


def _parse_trimode_closed(params, issues):
    out = _parse_trimode_common(params, issues)
    out["init"] = _get_init(params, issues, FIG5_INIT)
    out["periods"] = _get_number(params, issues, "periods", default=10.0, positive=True)
    return out


def _parse_trimode_reduced(params, issues):
    mod = _get_number(params, issues, "mod_frequency", default=1.0, positive=True) or 1.0
    return {
        "mod_frequency": mod,
        "rabi": _get_number(params, issues, "rabi", default=0.05 * mod, positive=True),
        "transition": _get_number(params, issues, "transition", default=100.0 * mod, positive=True),
        "harmonic_order": _get_int(params, issues, "harmonic_order", default=1, minimum=0),
        "dw_min": _get_number(params, issues, "dw_min", default=0.0, nonneg=True),
        "dw_max": _get_number(params, issues, "dw_max", default=10.0 * mod, positive=True),
    }


def _parse_trimode_eigen(params, issues):
    rabi = _get_number(params, issues, "rabi", default=1.0, positive=True) or 1.0
    return {
        "rabi": rabi,
        "omega_b_minus_omega_a": _get_number(
            params, issues, "omega_b_minus_omega_a", default=5.0 * rabi
        ),
        "grid_min": _get_number(params, issues, "grid_min", default=-10.0 * rabi),
        "grid_max": _get_number(params, issues, "grid_max", default=5.0 * rabi),
        "modulation_target": _get_choice(
            params, issues, "modulation_target", ("cavity", "atom"), "atom"
        ),
    }


def _parse_trimode_open(params, issues):
    out = _parse_trimode_common(params, issues)
    defaults_init = {"c000": 0j, "c001": 1.0 + 0j, "c100": 0j, "c010": 0j}
    out["init"] = _get_init(params, issues, defaults_init)
    out["gamma"] = _get_number(params, issues, "gamma", default=None, nonneg=True)
    out["gamma_el"] = _get_number(params, issues, "gamma_el", default=0.0, nonneg=True)
    out["mu_a"] = _get_number(params, issues, "mu_a", default=0.0, nonneg=True)
    out["mu_b"] = _get_number(params, issues, "mu_b", default=0.0, nonneg=True)
    out["engine"] = _get_choice(params, issues, "engine", ("dyadics", "trajectories"), "dyadics")
    out["hamiltonian"] = _get_choice(params, issues, "hamiltonian", ("full", "reduced"), "full")
    out["n_traj"] = _get_int(params, issues, "n_traj", default=2000, minimum=1)
    out["t_final_over_gamma"] = _get_number(
        params, issues, "t_final_over_gamma", default=20.0, positive=True
    )
    return out


def _parse_steady_quanta(params, issues):
    mod = _get_number(params, issues, "mod_frequency", default=1.0, positive=True) or 1.0
    return {
        "mod_frequency": mod,
        "rabi": _get_number(params, issues, "rabi", default=0.05 * mod, positive=True),
        "depth": _get_number(params, issues, "depth", default=mod, nonneg=True),
        "transition": _get_number(params, issues, "transition", default=100.0 * mod, positive=True),
        "harmonic_order": _get_int(params, issues, "harmonic_order", default=1, minimum=1),
        "abs_z_min": _get_number(params, issues, "abs_z_min", default=0.1, positive=True),
        "abs_z_max": _get_number(params, issues, "abs_z_max", default=4.0, positive=True),
        "n_abs": _get_int(params, issues, "n_abs", default=40, minimum=2),
        "n_arg": _get_int(params, issues, "n_arg", default=72, minimum=2),
    }


def _parse_plasmon(params, issues):
    return {
        "scan": _get_choice(params, issues, "scan", ("time", "kd"), "time"),
        "plasma_frequency": _get_number(params, issues, "plasma_frequency", default=1.0, positive=True),
        "eps_gap": _get_number(params, issues, "eps_gap", default=1.0, positive=True),
        "k": _get_number(params, issues, "k", default=1.0, positive=True),
        "d0": _get_number(params, issues, "d0", default=1.0, positive=True),
        "relative_depth": _get_number(params, issues, "relative_depth", default=0.1, nonneg=True),
        "mod_frequency": _get_number(params, issues, "mod_frequency", default=1.0, positive=True),
        "area": _get_number(params, issues, "area", default=1.0, positive=True),
        "periods": _get_number(params, issues, "periods", default=1.0, positive=True),
        "kd_min": _get_number(params, issues, "kd_min", default=0.01, positive=True),
        "kd_max": _get_number(params, issues, "kd_max", default=20.0, positive=True),
    }


_PARAM_PARSERS = {
    "jc_eigen_scan": _parse_jc_eigen,
    "jc_sweep": _parse_jc_sweep,
    "trimode_closed": _parse_trimode_closed,
    "trimode_reduced": _parse_trimode_reduced,
    "trimode_eigen_scan": _parse_trimode_eigen,
    "trimode_open": _parse_trimode_open,
    "steady_quanta_scan": _parse_steady_quanta,
    "plasmon_scan": _parse_plasmon,
}


# scenario execution ---------------------------------------------------------


def _scan_map(fn, items):
    workers = int(os.environ.get("MODQED_THREADS", "1"))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _build_trimode_params(p) -> TrimodeParams:
    w = p["transition"]
    mod = p["mod_frequency"]
    m = p["harmonic_order"]
    depth = p["depth"]
    wb = w - m * mod
    if p["modulation_target"] == "atom":
        return TrimodeParams(
            omega_a=Constant(w),
            omega_b=Constant(wb),
            transition=Sinusoidal(mean=w, depth=depth, mod_frequency=mod),
            rabi_a=p["rabi"],
            rabi_b=p["rabi"],
            modulation_target="atom",
            harmonic_order=m,
        )
    return TrimodeParams(
        omega_a=Sinusoidal(mean=w, depth=depth, mod_frequency=mod),
        omega_b=Sinusoidal(mean=wb, depth=depth, mod_frequency=mod),
        transition=Constant(w),
        rabi_a=p["rabi"],
        rabi_b=p["rabi"],
        modulation_target="cavity",
        harmonic_order=m,
    )


def _trimode_init(p) -> TrimodeState:
    init = p["init"]
    return TrimodeState(
        c000=init["c000"], c001=init["c001"], c100=init["c100"], c010=init["c010"]
    )


def _run_jc_eigen_scan(s: Scenario):
    p = s.params
    deltas = np.linspace(p["grid_min"], p["grid_max"], s.samples)
    rows = []
    for d in deltas:
        em = jc_eigenmodes(float(d), p["rabi"])
        rows.append((d / p["rabi"], em.nu1 / p["rabi"], em.nu2 / p["rabi"]))
    return ["delta_over_rabi", "nu1", "nu2"], rows


def _run_jc_sweep(s: Scenario):
    p = s.params

    def one(x):
        beta = 2.0 * math.pi * p["rabi"] ** 2 / x
        prob = sweep_transition_probability(
            p["rabi"], beta, window=p["window_factor"] * max(p["rabi"], math.sqrt(beta))
        )
        return (x, beta, prob, math.exp(-x))

    rows = _scan_map(one, p["lz_exponents"])
    return ["lz_exponent", "beta", "survival_probability", "lz_formula"], rows


def _run_trimode_closed(s: Scenario):
    p = s.params
    params = _build_trimode_params(p)
    init = _trimode_init(p)
    rs = reduced_resonant_system(params)
    t_final = p["periods"] * 2.0 * math.pi / rs.cumulative
    t_eval = np.linspace(0.0, t_final, s.samples)
    traj = integrate_trimode_full(params, init, (0.0, t_final), t_eval=t_eval)
    ana = analytic_trajectory(rs, init, t_eval)
    lab = traj.lab_amplitudes()
    pops = traj.populations()
    ana_pops = ana.populations()
    columns = ["t"]
    for name in ("c000", "c001", "c100", "c010"):
        columns += [f"re_{name}", f"im_{name}"]
    columns += ["p000", "p001", "p100", "p010", "analytic_p001", "analytic_p100", "analytic_p010"]
    rows = []
    for i, t in enumerate(t_eval):
        row = [t]
        for j in range(4):
            row += [lab[i, j].real, lab[i, j].imag]
        row += list(pops[i]) + [ana_pops[i, 1], ana_pops[i, 2], ana_pops[i, 3]]
        rows.append(tuple(row))
    return columns, rows


def _run_trimode_reduced(s: Scenario):
    p = s.params
    dws = np.linspace(p["dw_min"], p["dw_max"], s.samples)
    mod = p["mod_frequency"]

    def one(dw):
        params = TrimodeParams(
            omega_a=Sinusoidal(mean=p["transition"], depth=dw, mod_frequency=mod),
            omega_b=Sinusoidal(
                mean=p["transition"] - p["harmonic_order"] * mod, depth=dw, mod_frequency=mod
            ),
            transition=Constant(p["transition"]),
            rabi_a=p["rabi"],
            rabi_b=p["rabi"],
            harmonic_order=p["harmonic_order"],
        )
        rs = reduced_resonant_system(params)
        return (
            dw / mod,
            rs.cumulative / p["rabi"],
            abs(rs.r_a0) / p["rabi"],
            abs(rs.r_bm) / p["rabi"],
        )

    rows = _scan_map(one, [float(x) for x in dws])
    return (
        ["dw_over_omega", "cumulative_rabi_over_rabi", "abs_r_a0_over_rabi", "abs_r_bm_over_rabi"],
        rows,
    )


def _run_trimode_eigen_scan(s: Scenario):
    p = s.params
    rabi = p["rabi"]
    detunings = np.linspace(p["grid_min"], p["grid_max"], s.samples)
    table = eigenstructure_vs_detuning(
        rabi, rabi, p["omega_b_minus_omega_a"], detunings, p["modulation_target"]
    )
    columns = ["detuning_over_rabi", "nu1", "nu2", "nu3"]
    for j in (1, 2, 3):
        columns += [f"w{j}_c001", f"w{j}_c100", f"w{j}_c010"]
    rows = []
    for i, d in enumerate(detunings):
        row = [d / rabi] + [table.frequencies[i, j] / rabi for j in range(3)]
        for j in range(3):
            row += list(table.weights[i, j])
        rows.append(tuple(row))
    return columns, rows


def _run_trimode_open(s: Scenario):
    p = s.params
    params = _build_trimode_params(p)
    init = _trimode_init(p)
    rs = reduced_resonant_system(params)
    gamma = p["gamma"] if p["gamma"] is not None else 0.2 * rs.cumulative
    p["gamma"] = gamma  # echo the resolved default
    rates = RelaxationRates(
        gamma=gamma, gamma_el=p["gamma_el"], mu_a=p["mu_a"], mu_b=p["mu_b"]
    )
    noise = NoiseModel()
    t_final = p["t_final_over_gamma"] / gamma if gamma > 0 else (
        p["t_final_over_gamma"] * 2.0 * math.pi / rs.cumulative
    )
    if p["engine"] == "trajectories":
        ens = integrate_trajectories(
            params, rates, noise, init, (0.0, t_final), n_traj=p["n_traj"], seed=s.seed,
            n_samples=s.samples,
        )
        columns = (
            ["t"]
            + [f"mean_p{b}" for b in ("000", "001", "100", "010")]
            + [f"sem_p{b}" for b in ("000", "001", "100", "010")]
            + ["mean_norm", "sem_norm"]
        )
        rows = [
            tuple(
                [ens.t[i]]
                + list(ens.mean_populations[i])
                + list(ens.sem_populations[i])
                + [ens.mean_norm[i], ens.sem_norm[i]]
            )
            for i in range(ens.t.size)
        ]
        return columns, rows
    t_eval = np.linspace(0.0, t_final, s.samples)
    traj = integrate_dyadics(
        params,
        rates,
        noise,
        DyadicState.from_pure(init),
        (0.0, t_final),
        t_eval=t_eval,
        hamiltonian=p["hamiltonian"],
        reduced=rs if p["hamiltonian"] == "reduced" else None,
    )
    pops = traj.populations()
    traces = traj.traces()
    columns = ["t", "p000", "p001", "p100", "p010", "trace"]
    rows = [
        tuple([t_eval[i]] + list(pops[i]) + [traces[i]]) for i in range(t_eval.size)
    ]
    return columns, rows


def _run_steady_quanta(s: Scenario):
    p = s.params
    params = _build_trimode_params(
        {
            "transition": p["transition"],
            "mod_frequency": p["mod_frequency"],
            "harmonic_order": p["harmonic_order"],
            "depth": p["depth"],
            "rabi": p["rabi"],
            "modulation_target": "cavity",
        }
    )
    rs = reduced_resonant_system(params)
    abs_grid = np.linspace(p["abs_z_min"], p["abs_z_max"], p["n_abs"])
    arg_grid = np.linspace(-math.pi, math.pi, p["n_arg"])
    rows = []
    for r in abs_grid:
        for th in arg_grid:
            z = r * complex(math.cos(th), math.sin(th))
            c100 = 1.0 / math.sqrt(1.0 + r * r)
            state = TrimodeState(c000=0, c001=0, c100=c100, c010=z * c100)
            rows.append((r, th, steady_state_quanta(state, rs)))
    return ["abs_z", "arg_z", "n_quanta"], rows


def _run_plasmon(s: Scenario):
    p = s.params
    cladding = DrudeCladding(p["plasma_frequency"])
    if p["scan"] == "kd":
        kds = np.geomspace(p["kd_min"], p["kd_max"], s.samples)

        def one(kd):
            g = CavityGeometry(
                k=p["k"],
                area=p["area"],
                half_height=Constant(kd / p["k"]),
                cladding=cladding,
                gap_permittivity=p["eps_gap"],
            )
            ws = dispersion_solve(g, 0.0, SYMMETRIC)
            was = dispersion_solve(g, 0.0, ANTISYMMETRIC)
            ms = solve_mode(g, 0.0, SYMMETRIC)
            mas = solve_mode(g, 0.0, ANTISYMMETRIC)
            return (
                kd,
                ws / p["plasma_frequency"],
                was / p["plasma_frequency"],
                float(np.linalg.norm(ms.boundary_field)),
                float(np.linalg.norm(mas.boundary_field)),
            )

        rows = _scan_map(one, [float(x) for x in kds])
        return ["kd", "omega_sym_over_pl", "omega_asym_over_pl", "field_sym", "field_asym"], rows

    # time scan: d(t) = d0 (1 + relative_depth sin(mod_frequency t))
    height = (
        Sinusoidal(
            mean=p["d0"],
            depth=p["relative_depth"] * p["d0"],
            mod_frequency=p["mod_frequency"],
            phase=math.pi,
        )
        if p["relative_depth"] > 0
        else Constant(p["d0"])
    )
    g = CavityGeometry(
        k=p["k"],
        area=p["area"],
        half_height=height,
        cladding=cladding,
        gap_permittivity=p["eps_gap"],
    )
    t_final = p["periods"] * 2.0 * math.pi / p["mod_frequency"]
    times = np.linspace(0.0, t_final, s.samples)

    def one(t):
        ms = solve_mode(g, t, SYMMETRIC)
        mas = solve_mode(g, t, ANTISYMMETRIC)
        return (
            ms.frequency,
            mas.frequency,
            float(np.linalg.norm(ms.boundary_field)),
            float(np.linalg.norm(mas.boundary_field)),
        )

    raw = np.array(_scan_map(one, [float(t) for t in times]))
    means = raw.mean(axis=0)
    rows = [
        (
            p["mod_frequency"] * times[i],
            raw[i, 0] / means[0],
            raw[i, 1] / means[1],
            raw[i, 2] / means[2],
            raw[i, 3] / means[3],
        )
        for i in range(times.size)
    ]
    return (
        ["omega_t", "omega_sym_norm", "omega_asym_norm", "field_sym_norm", "field_asym_norm"],
        rows,
    )


_RUNNERS = {
    "jc_eigen_scan": _run_jc_eigen_scan,
    "jc_sweep": _run_jc_sweep,
    "trimode_closed": _run_trimode_closed,
    "trimode_reduced": _run_trimode_reduced,
    "trimode_eigen_scan": _run_trimode_eigen_scan,
    "trimode_open": _run_trimode_open,
    "steady_quanta_scan": _run_steady_quanta,
    "plasmon_scan": _run_plasmon,
}


@dataclass
class RunResult:
    columns: list
    rows: list
    paths: list


def run_scenario(scenario: Scenario, render_figures: bool = True) -> RunResult:
    """Execute a validated scenario and write its outputs."""
    columns, rows = _RUNNERS[scenario.kind](scenario)
    scenario.resolved["parameters"] = {
        k: _ser(v) for k, v in sorted(scenario.params.items())
    }
    outdir = scenario.output_dir
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []
    if "csv" in scenario.formats:
        paths.append(
            write_csv(outdir / f"{scenario.stem}.csv", scenario.resolved, columns, rows, __version__)
        )
    if "json" in scenario.formats:
        paths.append(
            write_json(outdir / f"{scenario.stem}.json", scenario.resolved, columns, rows, __version__)
        )
    if render_figures:
        fig = render_figure(
            scenario.kind, columns, rows, outdir / f"{scenario.stem}.png", title=scenario.stem
        )
        if fig is not None:
            paths.append(fig)
    return RunResult(columns=columns, rows=rows, paths=paths)


def load_preset(name: str) -> dict:
    if name not in PRESETS:
        raise ConfigError([f"--preset: unknown preset {name!r}; choose from {PRESETS}"])
    text = importlib.resources.files("modqed").joinpath(f"presets/{name}.json").read_text()
    return json.loads(text)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="modqed", description="Modulated-cavity QED scenario runner"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="validate a config and run its scenario")
    run_p.add_argument("config", nargs="?", help="path to a scenario JSON config")
    run_p.add_argument("--preset", help=f"named preset from {PRESETS}")
    run_p.add_argument("--out", help="output directory (overrides config)")
    run_p.add_argument("--format", choices=("csv", "json"), help="restrict output format")
    run_p.add_argument("--seed", type=int, help="override the config seed")
    run_p.add_argument("--no-figures", action="store_true", help="write tables only")
    run_p.add_argument(
        "--error-json", action="store_true", help="print machine-readable errors to stdout"
    )
    args = parser.parse_args(argv)

    try:
        if args.preset and args.config:
            raise ConfigError(["$: give either a config path or --preset, not both"])
        if args.preset:
            scenario = parse_scenario(load_preset(args.preset), stem=args.preset)
        elif args.config:
            scenario = validate_config(args.config)
        else:
            raise ConfigError(["$: a config path or --preset is required"])
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError(["--seed: must be non-negative"])
            scenario.seed = args.seed
            scenario.resolved["seed"] = args.seed
        if args.out:
            scenario.output_dir = Path(args.out)
            scenario.resolved["output"]["directory"] = args.out
        if args.format:
            scenario.formats = [args.format]
            scenario.resolved["output"]["formats"] = [args.format]
        result = run_scenario(scenario, render_figures=not args.no_figures)
    except ConfigError as exc:
        _report_error(args, exc, 2)
        return 2
    except ModqedError as exc:
        _report_error(args, exc, 3)
        return 3
    for path in result.paths:
        print(path)
    return 0


def _report_error(args, exc, code):
    if getattr(args, "error_json", False):
        payload = {"error": str(exc), "exit_code": code}
        if isinstance(exc, ConfigError):
            payload["issues"] = exc.issues
        print(json.dumps(payload, sort_keys=True))
    else:
        kind = "configuration" if code == 2 else "numerical"
        print(f"modqed: {kind} error: {exc}", file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
