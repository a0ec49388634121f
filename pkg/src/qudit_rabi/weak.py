"""Closed-form low-energy levels from the dispersive (Schrieffer-Wolff) expansion.

Valid for ``g_i << w`` and far-detuned atoms. No validity gate is applied: the
formulas are evaluated everywhere so that their breakdown can be compared
against exact diagonalization.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .model import ModelParams

RESONANCE_RTOL = 1e-6


class ResonanceError(ValueError):
    """An atomic frequency sits on the resonator frequency; the expansion is undefined."""


@dataclass(frozen=True)
class DispersiveParams:
    eps1: float
    eps2: float
    xi1: float
    xi2: float
    g_eff: float
    Omega1_t: float
    Omega2_t: float
    # level shifts g_i (eps_i + xi_i)
    shift1: float = 0.0
    shift2: float = 0.0


def dispersive_params(p: ModelParams) -> DispersiveParams:
    for name, big_omega in (("Omega1", p.Omega1), ("Omega2", p.Omega2)):
        if abs(p.omega - big_omega) < RESONANCE_RTOL * p.omega:
            raise ResonanceError(f"{name}={big_omega} is resonant with omega={p.omega}")
    eps1 = p.g1 / (p.omega - p.Omega1)
    eps2 = p.g2 / (p.omega - p.Omega2)
    xi1 = p.g1 / (p.omega + p.Omega1)
    xi2 = p.g2 / (p.omega + p.Omega2)
    return DispersiveParams(
        eps1=eps1,
        eps2=eps2,
        xi1=xi1,
        xi2=xi2,
        g_eff=0.5 * (p.g1 * (eps2 + xi2) + p.g2 * (eps1 + xi1)),
        Omega1_t=p.Omega1 - p.g1 * (eps1 - xi1),
        Omega2_t=p.Omega2 - p.g2 * (eps2 - xi2),
        shift1=p.g1 * (eps1 + xi1),
        shift2=p.g2 * (eps2 + xi2),
    )


def _require_d(p: ModelParams, d: int) -> None:
    if p.d != d:
        raise ValueError(f"formula is for d={d}, got d={p.d}")


def energies_qubit(p: ModelParams) -> np.ndarray:
    """The four N=0 levels for ``d = 2``, ascending."""
    _require_d(p, 2)
    dp = dispersive_params(p)
    shift = -0.5 * (dp.shift1 + dp.shift2)
    levels = [
        s * np.sqrt(0.25 * (dp.Omega1_t + r * dp.Omega2_t) ** 2 + dp.g_eff**2) + shift
        for s in (-1, 1)
        for r in (-1, 1)
    ]
    return np.sort(levels)


def energies_qutrit(p: ModelParams) -> np.ndarray:
    """Six N=0 levels for ``d = 3`` in the order E_0..E_5 (pairs are +, -)."""
    _require_d(p, 3)
    dp = dispersive_params(p)
    a, b = dp.shift1, dp.shift2
    o1, o2, ge = dp.Omega1_t, dp.Omega2_t, dp.g_eff
    base = -0.5 * a - 1.5 * b
    out = []
    for s in (1, -1):
        out.append(-0.5 * a - b + s * (0.5 * o1 - o2))
    for s in (1, -1):
        out.append(base - 0.5 * o2 + s * 0.5 * np.sqrt((o1 + o2 + b) ** 2 + 8 * ge**2))
    for s in (1, -1):
        out.append(base + 0.5 * o2 + s * 0.5 * np.sqrt((o1 + o2 - b) ** 2 + 8 * ge**2))
    return np.array(out)


def energies_ququart(p: ModelParams, variant: Literal["printed", "corrected"] = "printed") -> np.ndarray:
    """Eight N=0 levels for ``d = 4`` in the order E_0..E_7.

    ``variant="printed"`` uses ``+-2(W1t - 3 W2t)`` for the first pair, which
    does not reduce to the bare levels at zero coupling. ``"corrected"``
    replaces it with ``+-(W1t/2 - 3 W2t/2)``, the analogue of the qutrit pair.
    """
    _require_d(p, 4)
    if variant not in ("printed", "corrected"):
        raise ValueError(f"unknown variant {variant!r}")
    dp = dispersive_params(p)
    a, b = dp.shift1, dp.shift2
    o1, o2, ge = dp.Omega1_t, dp.Omega2_t, dp.g_eff
    split01 = 2 * (o1 - 3 * o2) if variant == "printed" else 0.5 * o1 - 1.5 * o2
    out = [-0.5 * a - 1.5 * b + s * split01 for s in (1, -1)]
    out += [-0.5 * a - 3.5 * b + s * 0.5 * np.sqrt((o1 + o2) ** 2 + 16 * ge**2) for s in (1, -1)]
    out += [
        -0.5 * a - 2.5 * b - o2 + s * 0.5 * np.sqrt((o1 + o2 - 2 * b) ** 2 + 12 * ge**2)
        for s in (1, -1)
    ]
    out += [
        -0.5 * a - 2.5 * b + o2 + s * 0.5 * np.sqrt((o1 + o2 + 2 * b) ** 2 + 12 * ge**2)
        for s in (1, -1)
    ]
    return np.array(out)


def weak_energies(p: ModelParams, **kwargs) -> np.ndarray:
    """Dispatch on ``d``; returns the levels sorted ascending."""
    if p.d == 2:
        return energies_qubit(p)
    if p.d == 3:
        return np.sort(energies_qutrit(p))
    if p.d == 4:
        return np.sort(energies_ququart(p, **kwargs))
    raise NotImplementedError(f"no closed-form weak-coupling levels for d={p.d}")


def match_levels(analytic: np.ndarray, exact: np.ndarray) -> np.ndarray:
    """For each analytic level, the nearest exact level (sorted inputs, nearest-value match)."""
    analytic = np.sort(np.asarray(analytic, dtype=float))
    exact = np.sort(np.asarray(exact, dtype=float))
    idx = np.abs(analytic[:, None] - exact[None, :]).argmin(axis=1)
    return exact[idx]
