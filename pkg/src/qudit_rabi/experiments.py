"""Experiment definitions: config schema, runners and tabular output.

Every runner takes a resolved config (``dict[section][key]``) and returns an
:class:`Outcome` with named tables and extra metadata. Energies, couplings and
frequencies in tables are in units of the resonator frequency; times in units
of its inverse.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from . import dynamics, entanglement, strong, weak
from .model import ModelParams, exact_spectrum, ground_state, min_n_max

REQUIRED = object()


@dataclass(frozen=True)
class Field:
    kind: str  # int | float | str | floats
    default: Any = REQUIRED
    choices: tuple = ()
    doc: str = ""


@dataclass
class Table:
    columns: list[str]  # header labels including units, e.g. "g1 [omega]"
    rows: np.ndarray


@dataclass
class Outcome:
    tables: dict[str, Table]
    extra: dict[str, Any] = field(default_factory=dict)
    probe: ModelParams | None = None  # most demanding parameter point, for truncation diagnostics


@dataclass(frozen=True)
class Experiment:
    name: str
    description: str
    figure: str
    fields: dict[str, Field]
    runner: Callable[[ModelParams, dict], Outcome]


MODEL_FIELDS = {
    "d": Field("int"),
    "omega": Field("float", 1.0),
    "Omega1": Field("float", 0.0),
    "Omega2": Field("float", 0.0),
    "g1": Field("float", 0.0),
    "g2": Field("float", 0.0),
    "n_max": Field("int", None),
}

EXPERIMENT_FIELDS = {
    "name": Field("str"),
    "seed": Field("int", 0),
}


def _sweep(cfg: dict) -> np.ndarray:
    return np.linspace(cfg["g_min"], cfg["g_max"], cfg["points"])


def _cutoff_for(p: ModelParams, g_max: float) -> int:
    return p.n_max if p.n_max is not None else min_n_max(p.d, g_max, g_max, p.omega)


# ---------------------------------------------------------------------------
# Runners
# ---------------------------------------------------------------------------

def _nan_on(errors, fn, size):
    try:
        return fn()
    except errors:
        return np.full(size, np.nan)


def run_spectrum(p: ModelParams, cfg: dict) -> Outcome:
    gs = _sweep(cfg)
    n_lv = cfg["n_levels"]
    base = p.replace(n_max=_cutoff_for(p, gs[-1]))
    n_weak = 2 * p.d if p.d <= 4 else 0
    rows = []
    for g in gs:
        q = base.replace(g1=float(g), g2=float(g))
        exact = exact_spectrum(q, n_lv, vectors=False).values
        kw = {"variant": cfg["ququart_variant"]} if p.d == 4 else {}
        w = _nan_on(weak.ResonanceError, lambda: weak.weak_energies(q, **kw), n_weak) if n_weak else np.empty(0)

        def _strong():
            r = strong.perturbative_energies(q)
            return np.array([r.E_minus, r.E_plus])

        s = _nan_on(strong.SingularDenominator, _strong, 2)
        rows.append(np.concatenate([[g], exact, w, s]))
    cols = (
        ["g [omega]"]
        + [f"E_exact_{k} [omega]" for k in range(n_lv)]
        + [f"E_weak_{k} [omega]" for k in range(n_weak)]
        + ["E_strong_minus [omega]", "E_strong_plus [omega]"]
    )
    return Outcome({"data": Table(cols, np.array(rows))}, probe=base.replace(g1=gs[-1], g2=gs[-1]))


def run_ghz_fidelity(p: ModelParams, cfg: dict) -> Outcome:
    gs = _sweep(cfg)
    base = p.replace(n_max=_cutoff_for(p, gs[-1]))
    rows = []
    for g in gs:
        q = base.replace(g1=float(g), g2=float(g))
        _, psi, parity = ground_state(q)
        f_ghz = abs(np.vdot(strong.ghz_state(q, parity), psi))
        try:
            f_first = abs(np.vdot(strong.psi_pm_firstorder(q, parity), psi))
        except strong.SingularDenominator:
            f_first = np.nan
        rows.append([g, parity, min(1.0, f_ghz), min(1.0, f_first), strong.branch_overlap(q)])
    cols = ["g [omega]", "parity [1]", "fidelity_ghz [1]", "fidelity_firstorder [1]", "branch_overlap [1]"]
    return Outcome({"data": Table(cols, np.array(rows))}, probe=base.replace(g1=gs[-1], g2=gs[-1]))


def run_negativity_map(p: ModelParams, cfg: dict) -> Outcome:
    ax1 = np.linspace(cfg["g1_min"], cfg["g1_max"], cfg["g1_points"])
    ax2 = np.linspace(cfg["g2_min"], cfg["g2_max"], cfg["g2_points"])
    grid = entanglement.negativity_map(p, ax1, ax2, workers=cfg["workers"])
    g1, g2 = np.meshgrid(ax1, ax2, indexing="ij")
    rows = np.column_stack([g1.ravel(), g2.ravel(), grid.values.ravel()])
    am = grid.argmax()
    extra = {"argmax": {"g1": am[0], "g2": am[1]}, "max_negativity": float(grid.values.max())}
    cols = ["g1 [omega]", "g2 [omega]", "negativity [1]"]
    return Outcome({"data": Table(cols, rows)}, extra, probe=grid.params.replace(g1=ax1[-1], g2=ax2[-1]))


def run_quench(p: ModelParams, cfg: dict) -> Outcome:
    times = dynamics.default_times(cfg["t_max"], cfg["samples"])
    res = dynamics.quench_run(p, times)
    an_f = dynamics.analytic_quench_fidelity(p, times, cfg["n_terms"])
    an_n = dynamics.analytic_photon(p, times)
    series = [res.fidelity, res.sigma_z, res.J_z, res.photon_number, an_f, an_n]
    data = Table(
        ["t [1/omega]"] + [f"{s.label} [1]" for s in series],
        np.column_stack([times] + [s.values for s in series]),
    )
    spec_cols, spec_vals = ["frequency [omega]"], []
    for s in series[:4]:
        f, m = dynamics.spectrum_of(s)
        spec_cols.append(f"{s.label}_magnitude [1]")
        spec_vals.append(m)
    spectrum = Table(spec_cols, np.column_stack([f] + spec_vals))
    extra = {
        "frequency_resolution": dynamics.frequency_resolution(res.photon_number),
        "photon_first_peak": dynamics.first_peak(res.photon_number, 2 * math.pi / p.omega),
        "photon_dominant_frequency": dynamics.dominant_frequency(res.photon_number),
    }
    return Outcome({"data": data, "spectrum": spectrum}, extra, probe=p)


def run_adiabatic(p: ModelParams, cfg: dict) -> Outcome:
    if cfg["scheme"] == "I":
        sched = dynamics.RampSchedule.couplings_on(p, cfg["t_f"])
    else:
        sched = dynamics.RampSchedule.frequencies_down(p, cfg["Omega_start"], cfg["t_f"])
    res = dynamics.adiabatic_run(sched, cfg["n_steps"])
    every = cfg["record_every"]
    keep = np.unique(np.r_[np.arange(0, res.fidelity.times.size, every), res.fidelity.times.size - 1])
    rows = np.column_stack([res.fidelity.times[keep], res.fidelity.values[keep]])
    extra = {"final_fidelity": float(res.fidelity.values[-1]), "parity": res.parity}
    return Outcome({"data": Table(["t [1/omega]", "fidelity [1]"], rows)}, extra, probe=sched.end)


def run_splitting_scaling(p: ModelParams, cfg: dict) -> Outcome:
    pairs = strong.ground_splitting_scaling(p, cfg["omega2_samples"])
    x, y = zip(*pairs)
    extra = {"fitted_slope": strong.fit_power_law(x, y), "expected_slope": p.d - 1}
    return Outcome({"data": Table(["Omega2 [omega]", "gap [omega]"], np.array(pairs))}, extra, probe=p)


EXPERIMENTS: dict[str, Experiment] = {
    e.name: e
    for e in [
        Experiment(
            "spectrum",
            "Low-lying levels along g1 = g2 = g: exact, weak- and strong-coupling",
            "Fig. 2",
            {
                "g_min": Field("float", 0.0),
                "g_max": Field("float"),
                "points": Field("int", 101),
                "n_levels": Field("int", 10),
                "ququart_variant": Field("str", "printed", ("printed", "corrected")),
            },
            run_spectrum,
        ),
        Experiment(
            "ghz-fidelity",
            "Overlap of the exact ground state with the GHZ reference state",
            "Fig. 3",
            {"g_min": Field("float", 0.0), "g_max": Field("float"), "points": Field("int", 41)},
            run_ghz_fidelity,
        ),
        Experiment(
            "negativity-map",
            "Qubit-qudit ground-state negativity over the (g1, g2) plane",
            "Fig. 4",
            {
                "g1_min": Field("float", 0.0),
                "g1_max": Field("float", 0.5),
                "g1_points": Field("int", 41),
                "g2_min": Field("float", 0.0),
                "g2_max": Field("float", 0.5),
                "g2_points": Field("int", 41),
                "workers": Field("int", 1),
            },
            run_negativity_map,
        ),
        Experiment(
            "quench",
            "Dynamics after switching on the coupling, with DFT spectra",
            "Figs. 5-6",
            {
                "t_max": Field("float", dynamics.DEFAULT_T_MAX),
                "samples": Field("int", dynamics.DEFAULT_SAMPLES),
                "n_terms": Field("int", 10),
            },
            run_quench,
        ),
        Experiment(
            "adiabatic",
            "GHZ-state preparation by a linear ramp (scheme I or II)",
            "Fig. 7",
            {
                "scheme": Field("str", "I", ("I", "II")),
                "t_f": Field("float", 500.0),
                "n_steps": Field("int", 5000),
                "Omega_start": Field("float", 2.0),
                "record_every": Field("int", 10),
            },
            run_adiabatic,
        ),
        Experiment(
            "splitting-scaling",
            "Exact ground doublet splitting against Omega2 and its power-law slope",
            "Appendix C",
            {"omega2_samples": Field("floats", (0.02, 0.04, 0.08))},
            run_splitting_scaling,
        ),
    ]
}


def tail_mass(p: ModelParams, top: int = 5) -> float:
    """Ground-state probability in the highest ``top`` Fock levels."""
    _, psi, _ = ground_state(p)
    amp = np.abs(psi.reshape(2 * p.d, p.cutoff + 1)) ** 2
    return float(amp[:, -top:].sum())
