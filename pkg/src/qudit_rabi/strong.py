"""Strong-coupling analysis in the displaced-oscillator (polaron) basis.

With the atomic free terms dropped, the Hamiltonian is diagonal in product
states |sigma> (x) |m> (x) D^dag(x_{sigma,m}) |N>, where sigma = +-1 labels the
sigma_x eigenstates, m labels the eigenstates of J+ + J- with eigenvalue
lambda_m = 2m - (d-1), and x_{sigma,m} = (sigma g1 + lambda_m g2) / w. The
energies are w (N - x^2). The atomic terms ``H' = -(W1/2) sigma_z + W2 Jz`` are
then restored perturbatively around the doubly degenerate minimum
{(up, m=d-1), (down, m=0)}.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import core
from .model import ModelParams, build_full_hamiltonian

DEGENERACY_ATOL = 1e-9

UP, DOWN = 1, -1
_SIGMA_VECTORS = {
    UP: np.array([1.0, 1.0], dtype=complex) / np.sqrt(2),
    DOWN: np.array([1.0, -1.0], dtype=complex) / np.sqrt(2),
}


class SingularDenominator(ZeroDivisionError):
    """A perturbative denominator vanishes (zero coupling or accidental degeneracy)."""


@functools.lru_cache(maxsize=None)
def qudit_eigenbasis(d: int) -> tuple[np.ndarray, np.ndarray]:
    """Integer eigenvalues ``2m - (d-1)`` and phase-fixed eigenvectors (columns) of J+ + J-."""
    _, jp, jm = core.spin_operators(d)
    w, v = core.eigh(jp + jm)
    lam = 2 * np.arange(d) - (d - 1)
    assert np.allclose(w, lam, atol=1e-10)
    v.setflags(write=False)
    return lam, v


def sigma_vector(sigma: int) -> np.ndarray:
    return _SIGMA_VECTORS[sigma].copy()


@dataclass(frozen=True)
class DisplacedLevel:
    sigma: int
    m_index: int
    N: int
    displacement: float
    energy: float


def displaced_level(p: ModelParams, sigma: int, m_index: int, N: int = 0) -> DisplacedLevel:
    lam, _ = qudit_eigenbasis(p.d)
    x = (sigma * p.g1 + int(lam[m_index]) * p.g2) / p.omega
    return DisplacedLevel(sigma, m_index, N, x, p.omega * (N - x * x))


def displaced_spectrum(p: ModelParams, n_photons: int | None = None) -> list[DisplacedLevel]:
    """All displaced levels with ``N <= n_photons`` (default: the Fock cutoff), by energy."""
    n_photons = p.cutoff if n_photons is None else n_photons
    levels = [
        displaced_level(p, sigma, m, n)
        for sigma in (UP, DOWN)
        for m in range(p.d)
        for n in range(n_photons + 1)
    ]
    return sorted(levels, key=lambda lv: (lv.energy, -lv.sigma, lv.m_index, lv.N))


def ground_pair(p: ModelParams) -> tuple[DisplacedLevel, DisplacedLevel]:
    """The degenerate minimum: (up, largest lambda) and (down, smallest lambda)."""
    return displaced_level(p, UP, p.d - 1), displaced_level(p, DOWN, 0)


def displaced_fock(x: float, N: int, n_max: int) -> np.ndarray:
    """``D^dag(x)|N> = D(-x)|N>`` in the truncated Fock basis."""
    return core.displacement(-x, n_max)[:, N]


def build_displaced_state(level: DisplacedLevel, p: ModelParams) -> np.ndarray:
    _, vecs = qudit_eigenbasis(p.d)
    return core.kron(
        sigma_vector(level.sigma),
        vecs[:, level.m_index],
        displaced_fock(level.displacement, level.N, p.cutoff),
    )


def _displaced_block(p: ModelParams, sigma: int, m: int, n_photons: int) -> np.ndarray:
    """Columns |sigma, m, N_{sigma,m}> for N = 0..n_photons."""
    _, vecs = qudit_eigenbasis(p.d)
    lv = displaced_level(p, sigma, m)
    spin = core.kron(sigma_vector(sigma), vecs[:, m])
    osc = core.displacement(-lv.displacement, p.cutoff)[:, : n_photons + 1]
    return np.kron(spin[:, None], osc)


def _intermediate_states(p: ModelParams, n_photons: int):
    """Displaced states outside the degenerate pair, with their energies."""
    excluded = {(UP, p.d - 1, 0), (DOWN, 0, 0)}
    cols, energies = [], []
    for sigma in (UP, DOWN):
        for m in range(p.d):
            block = _displaced_block(p, sigma, m, n_photons)
            for n in range(n_photons + 1):
                if (sigma, m, n) in excluded:
                    continue
                cols.append(block[:, n])
                energies.append(displaced_level(p, sigma, m, n).energy)
    return np.array(cols).T, np.array(energies)


def perturbation_diagonal(p: ModelParams) -> np.ndarray:
    """Diagonal of ``H' = -(W1/2) sigma_z + W2 Jz`` in the product basis."""
    jz = np.diag(core.spin_operators(p.d)[0]).real
    qubit = np.array([1.0, -1.0])
    spin = np.add.outer(-0.5 * p.Omega1 * qubit, p.Omega2 * jz).ravel()
    return np.repeat(spin, p.cutoff + 1)


def branch_overlap(p: ModelParams) -> float:
    """Oscillator overlap of the two ground branches, ``exp(-2 x0^2)``."""
    x0 = (p.g1 + (p.d - 1) * p.g2) / p.omega
    return math.exp(-2 * x0 * x0)


def ghz_branches(p: ModelParams) -> tuple[np.ndarray, np.ndarray]:
    up, down = ground_pair(p)
    return build_displaced_state(up, p), build_displaced_state(down, p)


def ghz_state(p: ModelParams, sign: int = 1) -> np.ndarray:
    """Normalized ``|up,+,0> + sign |down,-,0>``.

    The two branches carry orthogonal qubit factors, so the norm is sqrt(2)
    for every coupling; it is computed rather than assumed. With the phase
    conventions used here, ``sign`` equals the state's parity eigenvalue.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    b1, b2 = ghz_branches(p)
    psi = b1 + sign * b2
    nrm = np.linalg.norm(psi)
    if nrm < 1e-12:
        raise core.ContractViolation("GHZ branches cancel; state undefined")
    return psi / nrm


# ---------------------------------------------------------------------------
# Perturbative energies
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PerturbationResult:
    E0: float
    E_plus: float
    E_minus: float
    M00: float
    M01: float
    splitting_order: int

    @property
    def pair(self) -> np.ndarray:
        return np.sort([self.E_minus, self.E_plus])


def _check_couplings(p: ModelParams) -> None:
    if p.g1 <= 0 or p.g2 <= 0:
        raise SingularDenominator(f"perturbative formulas need g1, g2 > 0 (got g1={p.g1}, g2={p.g2})")


def second_order_matrix(p: ModelParams, n_photons: int = 0) -> np.ndarray:
    """2x2 degenerate second-order matrix summed over intermediate displaced levels.

    Basis order is (|up,+,0>, |down,-,0>). ``n_photons=0`` keeps only N=0
    intermediates, which is what the closed forms for d <= 4 contain.
    """
    _check_couplings(p)
    e0 = displaced_level(p, UP, p.d - 1).energy
    inter, energies = _intermediate_states(p, n_photons)
    denom = e0 - energies
    if np.any(np.abs(denom) < DEGENERACY_ATOL):
        raise SingularDenominator("intermediate level degenerate with the ground pair")
    hd = perturbation_diagonal(p)
    branches = np.column_stack(ghz_branches(p))
    amps = inter.conj().T @ (hd[:, None] * branches)
    m = amps.conj().T @ (amps / denom[:, None])
    return m.real


def _closed_form_matrix(p: ModelParams) -> tuple[float, float]:
    w, o1, o2, g1, g2 = p.omega, p.Omega1, p.Omega2, p.g1, p.g2
    e1 = math.exp(-4 * g1 * g1 / w**2)
    e2 = math.exp(-4 * g2 * g2 / w**2)
    if p.d == 2:
        m00 = -w / (16 * g1 * g2) * (o1**2 * e1 + o2**2 * e2)
        m01 = w * o1 * o2 / (8 * g1 * g2) * math.exp(-2 * (g1 * g1 + g2 * g2) / w**2)
    elif p.d == 3:
        m00 = -w * o1**2 / (32 * g1 * g2) * e1 - w * o2**2 / (8 * (g2 * g2 + g1 * g2)) * e2
        m01 = 0.0
    elif p.d == 4:
        m00 = -w * o1**2 / (48 * g1 * g2) * e1 - 3 * w * o2**2 / (4 * (8 * g2 * g2 + 4 * g1 * g2)) * e2
        m01 = 0.0
    else:
        raise NotImplementedError(f"no closed form for d={p.d}")
    return m00, m01


def perturbative_energies(p: ModelParams) -> PerturbationResult:
    """Second-order energies of the ground doublet.

    For ``d >= 3`` the doublet stays degenerate at this order (``E_plus ==
    E_minus``); it splits only at order d in ``H'``.
    """
    _check_couplings(p)
    d, w, o1, o2, g1, g2 = p.d, p.omega, p.Omega1, p.Omega2, p.g1, p.g2
    e0 = -((g1 + (d - 1) * g2) ** 2) / w
    base = (
        e0
        - w * o1**2 * math.exp(-4 * g1 * g1 / w**2) / (16 * (d - 1) * g1 * g2)
        - w * (d - 1) * o2**2 * math.exp(-4 * g2 * g2 / w**2) / (16 * (d - 2) * g2 * g2 + 16 * g1 * g2)
    )
    split = 0.0
    if d == 2:
        split = (
            w * o1 * o2 / (8 * (d - 1) * g1 * g2)
            * math.exp(-2 * (g1 * g1 + (d - 1) ** 2 * g2 * g2) / w**2)
        )
    if d <= 4:
        m00, m01 = _closed_form_matrix(p)
    else:
        # two applications of H' reach the other branch only when d = 2
        m00, m01 = float(second_order_matrix(p)[0, 0]), 0.0
    return PerturbationResult(
        E0=e0, E_plus=base + split, E_minus=base - split, M00=m00, M01=m01, splitting_order=d
    )


def psi_pm_firstorder(p: ModelParams, sign: int = 1, n_photons: int = 6) -> np.ndarray:
    """GHZ combination plus first-order admixture of all displaced levels with N <= n_photons."""
    psi0 = ghz_state(p, sign)
    if p.Omega1 == 0 and p.Omega2 == 0:
        return psi0
    e0 = displaced_level(p, UP, p.d - 1).energy
    inter, energies = _intermediate_states(p, n_photons)
    denom = e0 - energies
    if np.any(np.abs(denom) < DEGENERACY_ATOL):
        raise SingularDenominator("admixed level degenerate with the ground pair")
    coeffs = (inter.conj().T @ (perturbation_diagonal(p) * psi0)) / denom
    return core.normalize(psi0 + inter @ coeffs)


def ground_splitting_scaling(p: ModelParams, omega2_samples) -> list[tuple[float, float]]:
    """Exact gap ``E1 - E0`` of the full Hamiltonian for each qudit frequency."""
    out = []
    for o2 in omega2_samples:
        q = p.replace(Omega2=float(o2))
        w = scipy.linalg.eigh(build_full_hamiltonian(q), subset_by_index=[0, 1], eigvals_only=True)
        out.append((float(o2), float(w[1] - w[0])))
    return out


def fit_power_law(x, y) -> float:
    """Slope of log(y) against log(x) by least squares."""
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)[0])
