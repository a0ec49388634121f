"""Hamiltonians of the qubit-qudit Rabi model.

    H = w a^dag a - (W1/2) sigma_z + W2 Jz + [g1 sigma_x + g2 (J+ + J-)] (a^dag + a)

All builders share the (qubit, qudit, oscillator) layout of :mod:`qudit_rabi.core`.
"""
from __future__ import annotations

import dataclasses
import logging
import math
import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np
import scipy.linalg

from . import core
from .core import TruncationWarning

logger = logging.getLogger(__name__)

# Sector minima closer than this (relative) count as degenerate; the even
# sector then wins so that branch selection is deterministic.
DEGENERACY_RTOL = 1e-11


class InvalidParams(ValueError):
    pass


def min_n_max(d: int, g1: float, g2: float, omega: float = 1.0) -> int:
    """Smallest Fock cutoff that keeps the most displaced vacuum's tail below ~1e-10."""
    alpha = (abs(g1) + (d - 1) * abs(g2)) / omega
    # round before ceil so that e.g. 8 * 0.36 = 2.8800000000000003 stays 3
    return math.ceil(round(8 * alpha * alpha, 9)) + 10


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the model; energies in the same units as ``omega``.

    ``n_max=None`` selects the smallest adequate cutoff for the current
    couplings (see :func:`min_n_max`); read the resolved value from
    :attr:`cutoff`.
    """

    d: int
    omega: float = 1.0
    Omega1: float = 0.0
    Omega2: float = 0.0
    g1: float = 0.0
    g2: float = 0.0
    n_max: int | None = None

    def __post_init__(self) -> None:
        if isinstance(self.d, bool) or int(self.d) != self.d or self.d < 2:
            raise InvalidParams(f"d must be an integer >= 2, got {self.d!r}")
        object.__setattr__(self, "d", int(self.d))
        for name in ("omega", "Omega1", "Omega2", "g1", "g2"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value < 0:
                raise InvalidParams(f"{name} must be finite and >= 0, got {value!r}")
            object.__setattr__(self, name, value)
        if self.omega <= 0:
            raise InvalidParams("omega must be > 0")
        if self.n_max is not None:
            if int(self.n_max) != self.n_max or self.n_max < 1:
                raise InvalidParams(f"n_max must be an integer >= 1, got {self.n_max!r}")
            object.__setattr__(self, "n_max", int(self.n_max))
            needed = self.required_cutoff
            if self.n_max < needed:
                msg = f"n_max={self.n_max} below the adequate cutoff {needed} for {self}"
                logger.warning(msg)
                warnings.warn(msg, TruncationWarning, stacklevel=3)

    @property
    def required_cutoff(self) -> int:
        return min_n_max(self.d, self.g1, self.g2, self.omega)

    @property
    def cutoff(self) -> int:
        return self.n_max if self.n_max is not None else self.required_cutoff

    @property
    def dims(self) -> tuple[int, int, int]:
        return (2, self.d, self.cutoff + 1)

    @property
    def dim(self) -> int:
        return 2 * self.d * (self.cutoff + 1)

    def replace(self, **changes) -> "ModelParams":
        return dataclasses.replace(self, **changes)

    def index(self, s: int, m: int, n: int) -> int:
        """Flat index of the product state |s, m, n>."""
        return (s * self.d + m) * (self.cutoff + 1) + n


def _operators(p: ModelParams):
    n_max = p.cutoff
    sx, sz = core.pauli("x"), core.pauli("z")
    jz, jp, jm = core.spin_operators(p.d)
    a, adag, num = core.boson_operators(n_max)
    i2, id_, io = np.eye(2), np.eye(p.d), np.eye(n_max + 1)
    return sx, sz, jz, jp + jm, adag + a, num, i2, id_, io


def build_uncoupled(p: ModelParams) -> np.ndarray:
    """``H0 = w a^dag a - (W1/2) sigma_z + W2 Jz`` (diagonal)."""
    _, sz, jz, _, _, num, i2, id_, io = _operators(p)
    return (
        p.omega * core.kron(i2, id_, num)
        - 0.5 * p.Omega1 * core.kron(sz, id_, io)
        + p.Omega2 * core.kron(i2, jz, io)
    )


def _coupling(p: ModelParams) -> np.ndarray:
    sx, _, _, jx2, x, _, i2, id_, io = _operators(p)
    return p.g1 * core.kron(sx, id_, x) + p.g2 * core.kron(i2, jx2, x)


def build_full_hamiltonian(p: ModelParams) -> np.ndarray:
    return build_uncoupled(p) + _coupling(p)


def build_reduced(p: ModelParams) -> np.ndarray:
    """Hamiltonian with the atomic free terms dropped (``W1 = W2 = 0``)."""
    return build_full_hamiltonian(p.replace(Omega1=0.0, Omega2=0.0))


def parity_diagonal(p: ModelParams) -> np.ndarray:
    """Diagonal of the Z2 parity ``sigma_z (x) (-1)^m (x) (-1)^n``."""
    qubit = np.array([1.0, -1.0])
    qudit = (-1.0) ** np.arange(p.d)
    osc = (-1.0) ** np.arange(p.cutoff + 1)
    return np.kron(np.kron(qubit, qudit), osc)


def build_parity(p: ModelParams) -> np.ndarray:
    return np.diag(parity_diagonal(p)).astype(complex)


def sector_indices(p: ModelParams, parity: int) -> np.ndarray:
    if parity not in (1, -1):
        raise ValueError("parity must be +1 or -1")
    return np.flatnonzero(parity_diagonal(p) == parity)


@dataclass
class SpectrumResult:
    values: np.ndarray
    vectors: np.ndarray | None
    provenance: Literal["exact", "weak-analytic", "strong-analytic"] = "exact"


def exact_spectrum(p: ModelParams, n_levels: int | None = None, vectors: bool = True) -> SpectrumResult:
    h = build_full_hamiltonian(p)
    if vectors:
        w, v = core.eigh(h)
    else:
        w, v = np.linalg.eigvalsh(h), None
    if n_levels is not None:
        w = w[:n_levels]
        v = None if v is None else v[:, :n_levels]
    return SpectrumResult(w, v, "exact")


def _sector_ground(h: np.ndarray, idx: np.ndarray, vectors: bool):
    block = h[np.ix_(idx, idx)]
    if vectors:
        w, v = scipy.linalg.eigh(block, subset_by_index=[0, 0])
        return w[0], v[:, 0]
    w = scipy.linalg.eigh(block, subset_by_index=[0, 0], eigvals_only=True)
    return w[0], None


def sector_ground_energies(p: ModelParams, h: np.ndarray | None = None) -> dict[int, float]:
    """Lowest eigenvalue in each parity sector."""
    h = build_full_hamiltonian(p) if h is None else h
    return {s: float(_sector_ground(h, sector_indices(p, s), False)[0]) for s in (1, -1)}


def ground_state(p: ModelParams, h: np.ndarray | None = None) -> tuple[float, np.ndarray, int]:
    """Exact ground state resolved by parity.

    Returns ``(energy, state, parity)``. When the two sector minima coincide
    within ``DEGENERACY_RTOL`` the even-parity state is returned.
    """
    h = build_full_hamiltonian(p) if h is None else h
    best = None
    for s in (1, -1):
        idx = sector_indices(p, s)
        e, vec = _sector_ground(h, idx, True)
        if best is None or e < best[0] - DEGENERACY_RTOL * max(1.0, abs(best[0])):
            psi = np.zeros(p.dim, dtype=complex)
            psi[idx] = vec
            best = (float(e), core.fix_phases(psi), s)
    return best


def ground_gap(p: ModelParams, h: np.ndarray | None = None) -> float:
    """Splitting between the even and odd sector ground energies."""
    e = sector_ground_energies(p, h)
    return abs(e[1] - e[-1])
