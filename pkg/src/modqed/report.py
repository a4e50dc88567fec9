"""Tabular output and figure rendering for scenario runs.

Every delimited file is self-describing: a comment header carries the
artifact version, the fully resolved configuration (canonical JSON), and
the seed, so the run can be reproduced byte-identically from the file
alone.  Figures are rendered next to the data as PNG; they are a visual
report, not part of the byte-stability contract.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

ARTIFACT = "modqed"


def _format_value(x) -> str:
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, (np.floating,)):
        return repr(float(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return str(x)


def canonical_config(resolved: dict) -> str:
    return json.dumps(resolved, sort_keys=True, separators=(",", ":"))


def write_csv(path: Path, resolved: dict, columns, rows, version: str) -> Path:
    lines = [
        f"# {ARTIFACT} {version}",
        f"# config: {canonical_config(resolved)}",
        f"# seed: {resolved.get('seed', 0)}",
        ",".join(columns),
    ]
    for row in rows:
        lines.append(",".join(_format_value(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_json(path: Path, resolved: dict, columns, rows, version: str) -> Path:
    payload = {
        "artifact": ARTIFACT,
        "version": version,
        "config": resolved,
        "seed": resolved.get("seed", 0),
        "columns": list(columns),
        "rows": [[_format_value(v) for v in row] for row in rows],
    }
    path.write_text(
        json.dumps(payload, sort_keys=True, indent=1) + "\n", encoding="utf-8"
    )
    return path


def read_csv_table(path: Path) -> tuple[list[str], np.ndarray]:
    """Columns and data of a file written by write_csv."""
    lines = [ln for ln in Path(path).read_text().splitlines() if ln and not ln.startswith("#")]
    columns = lines[0].split(",")
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    return columns, data


def _column(columns, rows, name):
    return np.array([row[columns.index(name)] for row in rows], dtype=float)


def render_figure(kind: str, columns, rows, path: Path, title: str | None = None) -> Path | None:
    """Render the scenario's primary curves; returns the path or None when
    the kind has no figure."""
    fn = _FIGURES.get(kind)
    if fn is None:
        return None
    fig = fn(list(columns), rows)
    fig.suptitle(title or kind)
    fig.savefig(path, dpi=140, bbox_inches="tight")
    plt.close(fig)
    return path


def _fig_jc_eigen(columns, rows):
    d = _column(columns, rows, "delta_over_rabi")
    fig, ax = plt.subplots(figsize=(5, 3.4))
    ax.plot(d, _column(columns, rows, "nu1"), label=r"$\nu_1$")
    ax.plot(d, _column(columns, rows, "nu2"), label=r"$\nu_2$")
    ax.plot(d, d, "k:", lw=0.8)
    ax.axhline(0.0, color="k", ls=":", lw=0.8)
    ax.set_xlabel(r"$\delta/\Omega_R$")
    ax.set_ylabel(r"$\nu/\Omega_R$")
    ax.legend()
    return fig


def _fig_jc_sweep(columns, rows):
    x = _column(columns, rows, "lz_exponent")
    fig, ax = plt.subplots(figsize=(5, 3.4))
    ax.semilogy(x, _column(columns, rows, "survival_probability"), "o", label="numerical")
    ax.semilogy(x, np.exp(-x), "-", label=r"$e^{-2\pi\Omega_R^2/\beta}$")
    ax.set_xlabel(r"$2\pi\Omega_R^2/\beta$")
    ax.set_ylabel("survival probability")
    ax.legend()
    return fig


def _fig_trimode_closed(columns, rows):
    t = _column(columns, rows, "t")
    fig, axes = plt.subplots(3, 1, figsize=(5.5, 6.5), sharex=True)
    pairs = [
        ("p001", "analytic_p001", "atom energy"),
        ("p100", "analytic_p100", "quanta in mode a"),
        ("p010", "analytic_p010", "quanta in mode b"),
    ]
    for ax, (num, ana, label) in zip(axes, pairs):
        ax.plot(t, _column(columns, rows, num), label="full")
        if ana in columns:
            ax.plot(t, _column(columns, rows, ana), "--", label="reduced analytic")
        ax.set_ylabel(label)
        ax.legend(loc="upper right", fontsize=8)
    axes[-1].set_xlabel("t")
    return fig


def _fig_trimode_reduced(columns, rows):
    x = _column(columns, rows, "dw_over_omega")
    fig, ax = plt.subplots(figsize=(5, 3.4))
    ax.plot(x, _column(columns, rows, "cumulative_rabi_over_rabi"), label=r"$\Omega_{R\Sigma}$")
    ax.plot(x, _column(columns, rows, "abs_r_a0_over_rabi"), "--", label=r"$|R_{a0}|$")
    ax.plot(x, _column(columns, rows, "abs_r_bm_over_rabi"), ":", label=r"$|R_{bm}|$")
    ax.set_xlabel(r"$\Delta\omega/\Omega$")
    ax.set_ylabel(r"frequency / $\Omega_R$")
    ax.legend()
    return fig


def _fig_trimode_eigen(columns, rows):
    d = _column(columns, rows, "detuning_over_rabi")
    fig, axes = plt.subplots(2, 1, figsize=(5.5, 6.0), sharex=True)
    for j in range(1, 4):
        axes[0].plot(d, _column(columns, rows, f"nu{j}"), label=f"branch {j}")
    axes[0].set_ylabel(r"shifted eigenfrequency / $\Omega_R$")
    axes[0].legend(fontsize=8)
    styles = {"c001": "-", "c100": "--", "c010": ":"}
    colors = ["C0", "C1", "C2"]
    for j in range(1, 4):
        for comp, ls in styles.items():
            axes[1].plot(
                d,
                _column(columns, rows, f"w{j}_{comp}"),
                ls,
                color=colors[j - 1],
                lw=1.0,
            )
    axes[1].set_ylabel("|amplitude| (solid 001, dashed 100, dotted 010)")
    axes[1].set_xlabel(r"$(\omega_a - W)/\Omega_R$")
    return fig


def _fig_trimode_open(columns, rows):
    t = _column(columns, rows, "t")
    fig, ax = plt.subplots(figsize=(5.5, 3.6))
    labels = {"p000": "ground", "p001": "atom", "p100": "mode a", "p010": "mode b"}
    prefix = "mean_" if "mean_p001" in columns else ""
    for key, label in labels.items():
        ax.plot(t, _column(columns, rows, prefix + key), label=label)
    ax.set_xlabel("t")
    ax.set_ylabel("population")
    ax.legend(fontsize=8)
    return fig


def _fig_steady_quanta(columns, rows):
    r = _column(columns, rows, "abs_z")
    th = _column(columns, rows, "arg_z")
    nq = _column(columns, rows, "n_quanta")
    r_u = np.unique(r)
    th_u = np.unique(th)
    grid = nq.reshape(r_u.size, th_u.size)
    fig, ax = plt.subplots(subplot_kw={"projection": "polar"}, figsize=(5, 4.4))
    mesh = ax.pcolormesh(th_u, r_u, grid, shading="nearest", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label=r"$\bar N_q$")
    imax = int(np.argmax(nq))
    ax.plot([th[imax]], [r[imax]], "r*", ms=10)
    return fig


def _fig_plasmon(columns, rows):
    fig, axes = plt.subplots(2, 1, figsize=(5.5, 6.0), sharex=True)
    if "omega_t" in columns:
        x = _column(columns, rows, "omega_t")
        axes[0].plot(x, _column(columns, rows, "omega_sym_norm"), "-", label="symmetric")
        axes[0].plot(x, _column(columns, rows, "omega_asym_norm"), "--", label="antisymmetric")
        axes[0].set_ylabel(r"$\omega(t)/\langle\omega\rangle$")
        axes[1].plot(x, _column(columns, rows, "field_sym_norm"), "-")
        axes[1].plot(x, _column(columns, rows, "field_asym_norm"), "--")
        axes[1].set_ylabel(r"$|\tilde E(t)|/\langle|\tilde E|\rangle$")
        axes[1].set_xlabel(r"$\Omega t$")
        axes[0].legend(fontsize=8)
    else:
        x = _column(columns, rows, "kd")
        axes[0].semilogx(x, _column(columns, rows, "omega_sym_over_pl"), "-", label="symmetric")
        axes[0].semilogx(x, _column(columns, rows, "omega_asym_over_pl"), "--", label="antisymmetric")
        axes[0].axhline(1 / math.sqrt(2), color="k", ls=":", lw=0.8)
        axes[0].set_ylabel(r"$\omega/\omega_{pl}$")
        axes[1].semilogx(x, _column(columns, rows, "field_sym"), "-")
        axes[1].semilogx(x, _column(columns, rows, "field_asym"), "--")
        axes[1].set_ylabel(r"$|\tilde E|$")
        axes[1].set_xlabel(r"$kd$")
        axes[0].legend(fontsize=8)
    return fig


_FIGURES = {
    "jc_eigen_scan": _fig_jc_eigen,
    "jc_sweep": _fig_jc_sweep,
    "trimode_closed": _fig_trimode_closed,
    "trimode_reduced": _fig_trimode_reduced,
    "trimode_eigen_scan": _fig_trimode_eigen,
    "trimode_open": _fig_trimode_open,
    "steady_quanta_scan": _fig_steady_quanta,
    "plasmon_scan": _fig_plasmon,
}
