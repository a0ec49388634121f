"""Qubit-qudit negativity of the oscillator-traced ground state."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import core
from .model import ModelParams, ground_state, min_n_max


def negativity(rho: np.ndarray, layout: Sequence[int]) -> float:
    """``(||rho^T_B||_1 - 1) / 2`` as the summed magnitude of negative PT eigenvalues."""
    rho = np.asarray(rho)
    core.check_density_matrix(rho)
    if len(layout) != 2:
        raise ValueError("negativity needs a bipartite layout (dA, dB)")
    pt = core.partial_transpose(rho, layout, 1)
    w = np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))
    return float(max(0.0, -w[w < 0].sum()))


def schmidt_negativity(psi: np.ndarray, layout: Sequence[int]) -> float:
    """Pure-state oracle: ``[(sum_i s_i)^2 - 1] / 2`` from the Schmidt coefficients."""
    s = np.linalg.svd(np.asarray(psi).reshape(layout), compute_uv=False)
    return float(max(0.0, 0.5 * (s.sum() ** 2 - 1)))


def reduced_atoms(psi: np.ndarray, p: ModelParams) -> np.ndarray:
    """Qubit-qudit density matrix with the oscillator traced out."""
    amp = np.asarray(psi).reshape(2 * p.d, p.cutoff + 1)
    return amp @ amp.conj().T


def ground_negativity(p: ModelParams) -> float:
    """Negativity over the (2, d) split of the parity-resolved exact ground state."""
    _, psi, _ = ground_state(p)
    return negativity(reduced_atoms(psi, p), (2, p.d))


def analytic_negativity(p: ModelParams) -> float:
    x0 = (p.g1 + (p.d - 1) * p.g2) / p.omega
    return 0.5 * math.exp(-2 * x0 * x0)


@dataclass
class NegativityGrid:
    g1_axis: np.ndarray
    g2_axis: np.ndarray
    values: np.ndarray  # values[i, j] at (g1_axis[i], g2_axis[j])
    params: ModelParams

    def __post_init__(self) -> None:
        if self.values.shape != (len(self.g1_axis), len(self.g2_axis)):
            raise ValueError("grid shape does not match axes")

    def argmax(self) -> tuple[float, float]:
        i, j = np.unravel_index(np.argmax(self.values), self.values.shape)
        return float(self.g1_axis[i]), float(self.g2_axis[j])


def _point(args) -> float:
    p, g1, g2 = args
    return ground_negativity(p.replace(g1=float(g1), g2=float(g2)))


def _check_axis(axis, name: str) -> np.ndarray:
    axis = np.asarray(axis, dtype=float)
    if axis.ndim != 1 or axis.size == 0:
        raise ValueError(f"{name} must be a non-empty vector")
    if np.any(np.diff(axis) <= 0):
        raise ValueError(f"{name} must be strictly ascending")
    return axis


def negativity_map(template: ModelParams, g1_axis, g2_axis, workers: int | None = None) -> NegativityGrid:
    """Ground-state negativity over a (g1, g2) grid.

    Every point uses the same Fock cutoff, chosen for the largest couplings
    on the grid unless ``template.n_max`` is set. ``workers > 1`` evaluates
    points in separate processes; results are identical to the serial path.
    """
    g1_axis = _check_axis(g1_axis, "g1_axis")
    g2_axis = _check_axis(g2_axis, "g2_axis")
    n_max = template.n_max or min_n_max(template.d, g1_axis[-1], g2_axis[-1], template.omega)
    base = template.replace(g1=0.0, g2=0.0, n_max=n_max)
    jobs = [(base, a, b) for a in g1_axis for b in g2_axis]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            vals = list(pool.map(_point, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        vals = [_point(j) for j in jobs]
    values = np.maximum(np.array(vals).reshape(len(g1_axis), len(g2_axis)), 0.0)
    return NegativityGrid(g1_axis, g2_axis, values, base)
