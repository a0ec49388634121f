"""Dense complex operator algebra for the qubit (x) qudit (x) oscillator space.

Operators and states are plain ``numpy`` arrays (complex128). The global basis
layout is (qubit, qudit, oscillator) with row-major flattening, i.e. the
product state |s, m, n> sits at index ``(s * d + m) * (n_max + 1) + n``.
"""
from __future__ import annotations

import functools
import logging
import warnings
from typing import Sequence

import numpy as np

logger = logging.getLogger(__name__)

HERMITIAN_ATOL = 1e-12
EIGH_HERMITIAN_ATOL = 1e-10
PHASE_THRESHOLD = 1e-8


class ContractViolation(ValueError):
    """An input breaks a numerical precondition (Hermiticity, trace, norm)."""


class InvalidDimension(ValueError):
    pass


class TruncationWarning(UserWarning):
    """The Fock cutoff is too small for the displacements involved."""


# ---------------------------------------------------------------------------
# Elementary operators
# ---------------------------------------------------------------------------

def pauli(which: str) -> np.ndarray:
    """Pauli matrix in the basis |g> = (1, 0), |e> = (0, 1), with sigma_z |g> = +|g>."""
    mats = {
        "x": [[0, 1], [1, 0]],
        "y": [[0, -1j], [1j, 0]],
        "z": [[1, 0], [0, -1]],
    }
    try:
        return np.array(mats[which], dtype=complex)
    except KeyError:
        raise ValueError(f"unknown Pauli axis {which!r}; expected 'x', 'y' or 'z'") from None


def spin_operators(d: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Spin-(d-1)/2 operators ``(Jz, J+, J-)`` in the qudit number basis |0..d-1>.

    ``Jz = diag(-j, ..., j)`` so the number state |0> has the lowest Jz
    eigenvalue; for ``d = 2`` this gives ``Jz = -sigma_z / 2`` in the qudit's
    own basis ordering.
    """
    if int(d) != d or d < 2:
        raise InvalidDimension(f"qudit dimension must be an integer >= 2, got {d!r}")
    d = int(d)
    j = (d - 1) / 2
    m = np.arange(d) - j
    jz = np.diag(m).astype(complex)
    jp = np.zeros((d, d), dtype=complex)
    for k in range(d - 1):
        jp[k + 1, k] = np.sqrt(j * (j + 1) - m[k] * (m[k] + 1))
    return jz, jp, jp.conj().T.copy()


def boson_operators(n_max: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Truncated ladder operators ``(a, a^dagger, a^dagger a)`` on |0..n_max>."""
    if int(n_max) != n_max or n_max < 1:
        raise InvalidDimension(f"Fock cutoff must be an integer >= 1, got {n_max!r}")
    a = np.diag(np.sqrt(np.arange(1, int(n_max) + 1)), k=1).astype(complex)
    adag = a.conj().T.copy()
    return a, adag, adag @ a


@functools.lru_cache(maxsize=32)
def _displacement_generator_eig(n_max: int) -> tuple[np.ndarray, np.ndarray]:
    a, adag, _ = boson_operators(n_max)
    # i (a^dag - a) is Hermitian; exp(alpha (a^dag - a)) = V exp(-i alpha w) V^dag
    w, v = np.linalg.eigh(1j * (adag - a))
    w.setflags(write=False)
    v.setflags(write=False)
    return w, v


def displacement(alpha: float, n_max: int) -> np.ndarray:
    """Displacement operator ``D(alpha) = exp[alpha (a^dagger - a)]`` for real alpha.

    Built from the eigendecomposition of the truncated generator, so the result
    is exactly unitary on the truncated space. Accuracy on low Fock states
    degrades once ``alpha**2`` approaches ``n_max``; a ``TruncationWarning`` is
    emitted when ``alpha**2 > n_max / 4``.
    """
    check_displacement(alpha, n_max)
    w, v = _displacement_generator_eig(int(n_max))
    return (v * np.exp(-1j * alpha * w)) @ v.conj().T


def check_displacement(alpha: float, n_max: int) -> bool:
    """Warn (and return False) when ``alpha`` is too large for the cutoff."""
    if alpha * alpha > n_max / 4:
        msg = f"displacement alpha={alpha:.4g} too large for n_max={n_max} (alpha^2 > n_max/4)"
        logger.warning(msg)
        warnings.warn(msg, TruncationWarning, stacklevel=3)
        return False
    return True


def kron(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product in argument order (qubit, qudit, oscillator)."""
    if not ops:
        raise ValueError("kron needs at least one operand")
    out = np.asarray(ops[0])
    for op in ops[1:]:
        out = np.kron(out, op)
    return out


# ---------------------------------------------------------------------------
# Checks and spectral decomposition
# ---------------------------------------------------------------------------

def hermiticity_error(m: np.ndarray) -> float:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ContractViolation(f"expected a square matrix, got shape {m.shape}")
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(m - m.conj().T)))


def is_hermitian(m: np.ndarray, atol: float = HERMITIAN_ATOL) -> bool:
    return hermiticity_error(m) <= atol


def fix_phases(vectors: np.ndarray, threshold: float = PHASE_THRESHOLD) -> np.ndarray:
    """Rotate each column so its first component above ``threshold`` is real positive."""
    vectors = np.array(vectors, dtype=complex)
    if vectors.ndim == 1:
        return fix_phases(vectors[:, None], threshold)[:, 0]
    mask = np.abs(vectors) > threshold
    first = np.argmax(mask, axis=0)
    cols = np.arange(vectors.shape[1])
    pivot = vectors[first, cols]
    phase = np.where(mask[first, cols], np.exp(-1j * np.angle(pivot)), 1.0)
    vectors *= phase[None, :]
    vectors[first, cols] = np.abs(vectors[first, cols])
    return vectors


def eigh(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and phase-fixed eigenvectors (columns) of a Hermitian matrix."""
    err = hermiticity_error(m)
    if err > EIGH_HERMITIAN_ATOL:
        raise ContractViolation(f"matrix is not Hermitian (max |M - M^dag| = {err:.3e})")
    w, v = np.linalg.eigh(np.asarray(m, dtype=complex))
    return w, fix_phases(v)


# ---------------------------------------------------------------------------
# Multipartite utilities
# ---------------------------------------------------------------------------

def _check_layout(rho: np.ndarray, layout: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(x) for x in layout)
    if not dims or any(x < 1 for x in dims):
        raise ValueError(f"invalid layout {layout!r}")
    total = int(np.prod(dims))
    if rho.shape != (total, total):
        raise ValueError(f"matrix shape {rho.shape} does not match layout {dims}")
    return dims


def partial_trace(rho: np.ndarray, layout: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Trace out every factor not listed in ``keep``; kept factors stay in layout order."""
    rho = np.asarray(rho)
    dims = _check_layout(rho, layout)
    keep = sorted(set(int(k) for k in keep))
    if not keep or keep[0] < 0 or keep[-1] >= len(dims):
        raise ValueError(f"keep={keep!r} must be a non-empty subset of 0..{len(dims) - 1}")
    n = len(dims)
    t = rho.reshape(dims + dims)
    for ax in sorted(set(range(n)) - set(keep), reverse=True):
        t = np.trace(t, axis1=ax, axis2=ax + t.ndim // 2)
    kept = int(np.prod([dims[k] for k in keep]))
    return t.reshape(kept, kept)


def partial_transpose(rho: np.ndarray, layout: Sequence[int], which: int) -> np.ndarray:
    """Transpose factor ``which`` of a multipartite operator."""
    rho = np.asarray(rho)
    dims = _check_layout(rho, layout)
    if not 0 <= which < len(dims):
        raise ValueError(f"factor index {which} out of range for layout {dims}")
    n = len(dims)
    t = rho.reshape(dims + dims).swapaxes(which, which + n)
    return t.reshape(rho.shape)


def check_density_matrix(rho: np.ndarray, atol: float = 1e-10) -> None:
    err = hermiticity_error(rho)
    if err > HERMITIAN_ATOL:
        raise ContractViolation(f"density matrix not Hermitian (error {err:.3e})")
    tr = np.trace(rho).real
    if abs(tr - 1) > atol:
        raise ContractViolation(f"density matrix trace is {tr!r}, expected 1")


def normalize(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    nrm = np.linalg.norm(psi)
    if nrm == 0:
        raise ContractViolation("cannot normalize the zero vector")
    return psi / nrm


def fidelity(phi: np.ndarray, psi: np.ndarray) -> float:
    """Overlap modulus ``|<phi|psi>|`` (not squared)."""
    phi = np.asarray(phi)
    psi = np.asarray(psi)
    if phi.shape != psi.shape:
        raise ValueError(f"state dimensions differ: {phi.shape} vs {psi.shape}")
    return float(min(1.0, abs(np.vdot(phi, psi))))


def basis_state(index: int, dim: int) -> np.ndarray:
    psi = np.zeros(dim, dtype=complex)
    psi[index] = 1.0
    return psi
