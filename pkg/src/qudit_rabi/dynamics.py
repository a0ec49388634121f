"""Quench and adiabatic-ramp dynamics, strong-coupling analytic curves, DFT analysis."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import scipy.linalg
from scipy.stats import binom, poisson

from . import core
from .model import ModelParams, build_full_hamiltonian, ground_state, sector_indices
from .strong import ghz_state

DEFAULT_T_MAX = 100.0
DEFAULT_SAMPLES = 8192
NORM_ATOL = 1e-8


class UnsupportedRegime(ValueError):
    """The analytic formula is only derived for a narrower parameter set."""


def default_times(t_max: float = DEFAULT_T_MAX, samples: int = DEFAULT_SAMPLES) -> np.ndarray:
    return np.linspace(0.0, t_max, samples)


@dataclass
class TimeSeries:
    times: np.ndarray
    values: np.ndarray
    label: str = ""

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.times.shape != self.values.shape or self.times.ndim != 1:
            raise ValueError(f"times {self.times.shape} and values {self.values.shape} must be equal-length vectors")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly ascending")

    def is_uniform(self, rtol: float = 1e-12) -> bool:
        t = self.times
        if t.size < 3:
            return True
        dt = (t[-1] - t[0]) / (t.size - 1)
        ideal = t[0] + dt * np.arange(t.size)
        return bool(np.max(np.abs(t - ideal)) <= rtol * (abs(t[-1]) + abs(t[0]) + dt))


def _check_state(psi: np.ndarray, dim: int) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (dim,):
        raise ValueError(f"state has shape {psi.shape}, expected ({dim},)")
    nrm = np.linalg.norm(psi)
    if abs(nrm - 1) > 1e-10:
        raise core.ContractViolation(f"state not normalized (norm {nrm!r})")
    return psi


def evolve_static(h: np.ndarray, psi0: np.ndarray, times) -> np.ndarray:
    """Rows are ``exp(-i H t) psi0`` for each time, from one eigendecomposition."""
    w, v = core.eigh(h)
    psi0 = _check_state(psi0, h.shape[0])
    c = v.conj().T @ psi0
    times = np.asarray(times, float)
    states = (np.exp(-1j * np.outer(times, w)) * c[None, :]) @ v.T
    states[times == 0] = psi0  # exact at t = 0, free of eigenbasis round-off
    return states


@dataclass
class QuenchResult:
    fidelity: TimeSeries
    sigma_z: TimeSeries
    J_z: TimeSeries
    photon_number: TimeSeries
    params: ModelParams


def observable_diagonals(p: ModelParams) -> dict[str, np.ndarray]:
    """Diagonals of sigma_z, Jz and a^dag a in the product basis."""
    n = p.cutoff + 1
    jz = np.diag(core.spin_operators(p.d)[0]).real
    return {
        "sigma_z": np.repeat([1.0, -1.0], p.d * n),
        "J_z": np.tile(np.repeat(jz, n), 2),
        "photon_number": np.tile(np.arange(n, dtype=float), 2 * p.d),
    }


def quench_run(p: ModelParams, times=None) -> QuenchResult:
    """Evolve |g 0 0> (global index 0) under the full Hamiltonian."""
    times = default_times() if times is None else np.asarray(times, float)
    if times[0] != 0:
        raise ValueError("quench times must start at 0")
    psi0 = core.basis_state(0, p.dim)
    states = evolve_static(build_full_hamiltonian(p), psi0, times)
    prob = np.abs(states) ** 2
    obs = {k: prob @ diag for k, diag in observable_diagonals(p).items()}
    return QuenchResult(
        fidelity=TimeSeries(times, np.minimum(np.abs(states[:, 0]), 1.0), "fidelity"),
        sigma_z=TimeSeries(times, obs["sigma_z"], "sigma_z"),
        J_z=TimeSeries(times, obs["J_z"], "J_z"),
        photon_number=TimeSeries(times, obs["photon_number"], "photon_number"),
        params=p,
    )


# ---------------------------------------------------------------------------
# Strong-coupling analytic approximations (atomic free terms dropped)
# ---------------------------------------------------------------------------

def qudit_branch_weights(d: int) -> np.ndarray:
    """``|<lambda_m|0>|^2`` for the J+ + J- eigenstates: binomial(d-1, 1/2)."""
    return binom.pmf(np.arange(d), d - 1, 0.5)


def analytic_quench_fidelity(p: ModelParams, times, n_terms: int = 10) -> TimeSeries:
    """Return amplitude of |g 0 0> in the displaced basis, summing N <= n_terms.

    Each qudit branch m has displacement ``(g1 + lambda_m g2) / w`` and enters
    with the weight ``|<lambda_m|0>|^2``; the weights are 1/2 each for d = 2
    and binomial in general.
    """
    times = np.asarray(times, float)
    lam = 2 * np.arange(p.d) - (p.d - 1)
    x2 = ((p.g1 + lam * p.g2) / p.omega) ** 2
    n = np.arange(n_terms + 1)
    amp = np.zeros(times.shape, dtype=complex)
    for wm, xm in zip(qudit_branch_weights(p.d), x2):
        energies = p.omega * (n - xm)
        amp += wm * (np.exp(-1j * np.outer(times, energies)) @ poisson.pmf(n, xm))
    return TimeSeries(times, np.abs(amp), "fidelity_analytic")


def _require_symmetric_qubit(p: ModelParams) -> None:
    if p.d != 2:
        raise UnsupportedRegime(f"closed-form population only for d=2 (got d={p.d})")
    if not math.isclose(p.g1, p.g2, rel_tol=1e-12, abs_tol=1e-15):
        raise UnsupportedRegime(f"closed-form population needs g1 == g2 (got {p.g1}, {p.g2})")


def _sigma_z_series(p: ModelParams, times, normalized: bool, n_terms: int | None) -> np.ndarray:
    _require_symmetric_qubit(p)
    times = np.asarray(times, float)
    x = 4 * p.g1**2 / p.omega**2
    if n_terms is None:
        n_terms = int(math.ceil(x + 12 * math.sqrt(x) + 20))
    n = np.arange(n_terms + 1)
    if normalized:
        weights = poisson.pmf(n, x)
    else:
        # bare truncated series, x^N / N!
        weights = poisson.pmf(n, x) * math.exp(x)
    phase = np.outer(times, x * p.omega - n * p.omega)
    return np.cos(phase) @ weights


def analytic_sigma_z(p: ModelParams, times, normalized: bool = True, n_terms: int | None = None) -> TimeSeries:
    """Qubit population for ``d=2, g1=g2``: ``sum_N w_N cos[(4g^2/w - N w) t]``.

    With ``normalized=True`` the weights are Poisson, ``w_N = e^{-x} x^N / N!``
    with ``x = 4 g^2 / w^2``, so that the series starts at 1. ``normalized=False``
    evaluates the bare truncated series without ``e^{-x}``.
    """
    return TimeSeries(times, _sigma_z_series(p, times, normalized, n_terms), "sigma_z_analytic")


def analytic_qudit_z(p: ModelParams, times, normalized: bool = True, n_terms: int | None = None) -> TimeSeries:
    """``<Jz>`` for ``d=2, g1=g2``: minus one half of the qubit series."""
    return TimeSeries(times, -0.5 * _sigma_z_series(p, times, normalized, n_terms), "J_z_analytic")


def analytic_photon(p: ModelParams, times) -> TimeSeries:
    times = np.asarray(times, float)
    amp = 4 * (p.g1**2 + (p.d - 1) * p.g2**2) / p.omega**2
    return TimeSeries(times, amp * np.sin(0.5 * p.omega * times) ** 2, "photon_number_analytic")


# ---------------------------------------------------------------------------
# Frequency analysis
# ---------------------------------------------------------------------------

def spectrum_of(series: TimeSeries) -> tuple[np.ndarray, np.ndarray]:
    """One-sided DFT magnitude of the mean-subtracted series.

    Frequencies are angular, ``2 pi k / (n dt)``; magnitudes are scaled so a
    sinusoid of amplitude A on a bin gives A.
    """
    if series.times.size < 64:
        raise ValueError("spectrum needs at least 64 samples")
    if not series.is_uniform():
        raise ValueError("spectrum needs a uniform time grid")
    n = series.times.size
    dt = (series.times[-1] - series.times[0]) / (n - 1)
    x = series.values - series.values.mean()
    mags = 2 * np.abs(np.fft.rfft(x)) / n
    freqs = 2 * np.pi * np.fft.rfftfreq(n, dt)
    return freqs, mags


def dominant_frequency(series: TimeSeries) -> float:
    freqs, mags = spectrum_of(series)
    return float(freqs[np.argmax(mags)])


def frequency_resolution(series: TimeSeries) -> float:
    n = series.times.size
    return 2 * np.pi / (n * (series.times[-1] - series.times[0]) / (n - 1))


def first_peak(series: TimeSeries, window: float) -> float:
    """Maximum of the series over ``0 <= t <= window``."""
    mask = series.times <= window
    return float(series.values[mask].max())


# ---------------------------------------------------------------------------
# Adiabatic ramps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RampSchedule:
    """Linear interpolation ``H(t) = (1 - mu) H_start + mu H_end`` with ``mu = t / t_f``."""

    scheme: Literal["I", "II"]
    t_f: float
    start: ModelParams
    end: ModelParams
    mu_shape: Literal["linear"] = "linear"

    def __post_init__(self) -> None:
        if self.scheme not in ("I", "II"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if not self.t_f > 0:
            raise ValueError("t_f must be > 0")
        if self.mu_shape != "linear":
            raise ValueError("only linear ramps are supported")
        s, e = self.start, self.end
        if (s.d, s.omega, s.cutoff) != (e.d, e.omega, e.cutoff):
            raise ValueError("start and end must share d, omega and the Fock cutoff")
        if self.scheme == "I":
            if s.g1 != 0 or s.g2 != 0 or (s.Omega1, s.Omega2) != (e.Omega1, e.Omega2):
                raise ValueError("scheme I starts uncoupled and keeps the atomic frequencies")
        elif (s.g1, s.g2) != (e.g1, e.g2):
            raise ValueError("scheme II changes only the atomic frequencies")

    @classmethod
    def couplings_on(cls, end: ModelParams, t_f: float = 500.0) -> "RampSchedule":
        end = end.replace(n_max=end.cutoff)
        return cls("I", t_f, end.replace(g1=0.0, g2=0.0), end)

    @classmethod
    def frequencies_down(cls, end: ModelParams, Omega_start: float = 2.0, t_f: float = 500.0) -> "RampSchedule":
        end = end.replace(n_max=end.cutoff)
        return cls("II", t_f, end.replace(Omega1=Omega_start, Omega2=Omega_start), end)

    def mu(self, t):
        return np.clip(np.asarray(t, float) / self.t_f, 0.0, 1.0)


@dataclass
class AdiabaticResult:
    fidelity: TimeSeries
    final_state: np.ndarray
    parity: int
    schedule: RampSchedule = field(repr=False)


def adiabatic_run(schedule: RampSchedule, n_steps: int = 5000, target: np.ndarray | None = None) -> AdiabaticResult:
    """Piecewise-constant midpoint propagation from the ground state of the start Hamiltonian.

    Evolution is restricted to the parity sector of the initial state, which
    the ramp preserves. The default target is the GHZ state of matching parity
    at the end parameters. Fidelity is recorded at ``t_k = k t_f / n_steps``.
    """
    if int(n_steps) != n_steps or n_steps < 1:
        raise ValueError("n_steps must be a positive integer")
    p0, p1 = schedule.start, schedule.end
    _, psi0, parity = ground_state(p0)
    target = ghz_state(p1, parity) if target is None else _check_state(target, p1.dim)
    idx = sector_indices(p0, parity)
    h0 = build_full_hamiltonian(p0)[np.ix_(idx, idx)].real
    h1 = build_full_hamiltonian(p1)[np.ix_(idx, idx)].real
    psi = psi0[idx]
    tgt = target[idx].conj()
    dt = schedule.t_f / n_steps
    fid = np.empty(n_steps + 1)
    fid[0] = abs(tgt @ psi)
    for k in range(n_steps):
        mu = schedule.mu((k + 0.5) * dt)
        w, v = scipy.linalg.eigh((1 - mu) * h0 + mu * h1, driver="evd")
        psi = v @ (np.exp(-1j * w * dt) * (v.T @ psi))
        fid[k + 1] = abs(tgt @ psi)
    nrm = np.linalg.norm(psi)
    if abs(nrm - 1) > NORM_ATOL:
        raise core.ContractViolation(f"norm drifted to {nrm!r} during the ramp")
    final = np.zeros(p1.dim, dtype=complex)
    final[idx] = psi
    times = np.linspace(0.0, schedule.t_f, n_steps + 1)
    return AdiabaticResult(TimeSeries(times, np.minimum(fid, 1.0), "fidelity"), final, parity, schedule)
