"""Numerical laboratory for a qubit and a qudit coupled to one resonator mode.

Exact diagonalization in a truncated Fock space, weak- and strong-coupling
analytic approximations, qubit-qudit negativity, and quench/ramp dynamics.
"""
from .core import ContractViolation, InvalidDimension, TruncationWarning
from .model import InvalidParams, ModelParams, build_full_hamiltonian, exact_spectrum, ground_state

__all__ = [
    "ContractViolation",
    "InvalidDimension",
    "InvalidParams",
    "ModelParams",
    "TruncationWarning",
    "build_full_hamiltonian",
    "exact_spectrum",
    "ground_state",
]
