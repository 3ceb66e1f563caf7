"""Datasets behind the published figures.

Each preset writes one CSV file plus a JSON manifest into a directory.
"""

from __future__ import annotations

import math
import time
from pathlib import Path

import numpy as np

from . import dynamics, oscillators, qubit_chain, two_qubit
from .sweep import write_table

FIG8_CAPS = {1: 1000, 2: 60, 3: 20}


def fig3(n_points: int = 201):
    """Two-qubit work (in units of the summed frequencies) and efficiency."""
    rows = []
    for gamma in np.geomspace(1e-2, 1e2, n_points):
        m = two_qubit.metrics(two_qubit.TwoQubitSpec.from_reduced(1.0, float(gamma)))
        rows.append({"gamma": float(gamma), "work_over_sum": m.work, "efficiency": m.efficiency})
    return ["gamma", "work_over_sum", "efficiency"], rows, {"gamma": ["log", 1e-2, 1e2, n_points]}


def fig4(n_k0: int = 40, n_g: int = 41):
    """Two-oscillator contour grid."""
    rows = []
    k0_values = np.linspace(0.05, 2.0, n_k0)
    g_values = np.linspace(0.0, 2.0, n_g)
    for k0 in k0_values:
        for g in g_values:
            m = oscillators.metrics_two_oscillator(oscillators.TwoOscSpec(float(k0), float(g)))
            rows.append({"k0": float(k0), "g": float(g), "work": m.work, "efficiency": m.efficiency})
    params = {"k0": ["linear", 0.05, 2.0, n_k0], "g": ["linear", 0.0, 2.0, n_g]}
    return ["k0", "g", "work", "efficiency"], rows, params


def fig5(n_min: int = 3, n_max: int = 100, g_max: float = 3.0, g_step: float = 0.01):
    """Closed-chain work per qubit and efficiency over ``(N, g)`` with ``omega = 1``."""
    steps = int(round(g_max / g_step)) + 1
    g_values = np.linspace(0.0, g_max, steps)
    rows = []
    for n in range(n_min, n_max + 1):
        for g in g_values:
            m = qubit_chain.metrics_closed_chain(n, 1.0, float(g))
            rows.append({"n": n, "g": float(g), "work_per_qubit": m.work / n, "efficiency": m.efficiency})
    params = {"n": [n_min, n_max], "g": ["linear", 0.0, g_max, steps], "omega": 1.0}
    return ["n", "g", "work_per_qubit", "efficiency"], rows, params


def _fig8_sides(cap: int) -> list:
    sides = sorted({int(round(v)) for v in np.geomspace(2, cap, 30)} | {cap})
    return [m for m in sides if m >= 2]


def fig8(caps=None, k0: float = 1.0):
    """Work per oscillator and efficiency for open cubic lattices."""
    caps = dict(FIG8_CAPS if caps is None else caps)
    rows = []
    for dim in sorted(caps):
        for m_side in _fig8_sides(caps[dim]):
            met = oscillators.lattice_metrics(m_side, dim, k0)
            n = m_side**dim
            rows.append(
                {
                    "dim": dim,
                    "m_side": m_side,
                    "n": n,
                    "work_per_oscillator": met.work / n,
                    "efficiency": met.efficiency,
                }
            )
    return ["dim", "m_side", "n", "work_per_oscillator", "efficiency"], rows, {"caps": caps, "k0": k0}


def _measurement_setup():
    spec = two_qubit.TwoQubitSpec(0.5, 0.5, 10.0)
    meter = dynamics.MeterSpec(50.0)
    return spec, meter


def _trajectory(n_points: int):
    spec, meter = _measurement_setup()
    t_m, _ = dynamics.measurement_time(spec, meter)
    t_end = 2 * t_m
    traj = dynamics.evolve_measurement(spec, meter, t_end, t_end / (n_points - 1))
    params = {"omega_a": spec.omega_a, "omega_b": spec.omega_b, "g": spec.g, "g_m": meter.g_m, "t_m": t_m}
    return traj, params


def figA6(n_points: int = 401):
    """Populations of the four reachable three-qubit basis states."""
    traj, params = _trajectory(n_points)
    pops = traj.populations
    rows = [
        {"t": float(t), "p000": pops[i, 0], "p001": pops[i, 1], "p110": pops[i, 6], "p111": pops[i, 7]}
        for i, t in enumerate(traj.times)
    ]
    return ["t", "p000", "p001", "p110", "p111"], rows, params


def figA7(n_points: int = 401):
    """Energy exchanged between the coupled pair and the meter qubit."""
    traj, params = _trajectory(n_points)
    rows = [
        {
            "t": float(t),
            "e_loc": float(traj.e_loc[i]),
            "e_int": float(traj.e_int[i]),
            "e_meter": float(traj.e_meter[i]),
            "e_two_qubit_total": float(traj.e_two_qubit[i]),
        }
        for i, t in enumerate(traj.times)
    ]
    return ["t", "e_loc", "e_int", "e_meter", "e_two_qubit_total"], rows, params


PRESETS = {"fig3": fig3, "fig4": fig4, "fig5": fig5, "fig8": fig8, "figA6": figA6, "figA7": figA7}


def run_preset(name: str, out_dir, fmt: str = "csv") -> Path:
    """Build preset ``name`` and write it as ``<out_dir>/<name>.<fmt>``."""
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    start = time.perf_counter()
    columns, rows, params = PRESETS[name]()
    seconds = time.perf_counter() - start
    path = Path(out_dir) / f"{name}.{fmt}"
    params = {"preset": name, **params}
    return write_table(path, columns, rows, fmt, params, seconds)


def peak_time_from_rows(rows) -> float:
    """Time of the first local maximum of ``p111`` in a ``figA6`` table."""
    p = [r["p111"] for r in rows]
    for i in range(1, len(p) - 1):
        if p[i] >= p[i - 1] and p[i] > p[i + 1]:
            return rows[i]["t"]
    return math.nan
