import itertools
import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qudit_rabi import core
from qudit_rabi.model import (
    InvalidParams,
    ModelParams,
    build_full_hamiltonian,
    build_parity,
    build_reduced,
    build_uncoupled,
    exact_spectrum,
    ground_gap,
    ground_state,
    min_n_max,
    parity_diagonal,
    sector_ground_energies,
)

params_st = st.builds(
    ModelParams,
    d=st.integers(2, 4),
    Omega1=st.floats(0, 1),
    Omega2=st.floats(0, 1),
    g1=st.floats(0, 0.6),
    g2=st.floats(0, 0.6),
)


def loop_hamiltonian(p: ModelParams) -> np.ndarray:
    """Independent element-by-element construction."""
    d, n_max = p.d, p.cutoff
    j = (d - 1) / 2
    h = np.zeros((p.dim, p.dim))
    for s, m, n in itertools.product(range(2), range(d), range(n_max + 1)):
        i = p.index(s, m, n)
        h[i, i] = p.omega * n - 0.5 * p.Omega1 * (1 - 2 * s) + p.Omega2 * (m - j)
        for n2 in (n - 1, n + 1):
            if not 0 <= n2 <= n_max:
                continue
            x = math.sqrt(max(n, n2))
            h[p.index(1 - s, m, n2), i] += p.g1 * x
            for m2 in (m - 1, m + 1):
                if 0 <= m2 < d:
                    mz, mz2 = m - j, m2 - j
                    lad = math.sqrt(j * (j + 1) - mz * mz2)
                    h[p.index(s, m2, n2), i] += p.g2 * x * lad
    return h


@pytest.mark.filterwarnings("ignore::qudit_rabi.core.TruncationWarning")
@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_hamiltonian_matches_loop_oracle(d):
    p = ModelParams(d=d, Omega1=0.15, Omega2=0.1, g1=0.3, g2=0.2, n_max=12)
    assert np.allclose(build_full_hamiltonian(p), loop_hamiltonian(p), atol=1e-14)


@given(params_st)
def test_hermitian_and_parity_commutes(p):
    h = build_full_hamiltonian(p)
    assert core.is_hermitian(h)
    par = build_parity(p)
    assert np.max(np.abs(h @ par - par @ h)) == 0
    assert np.allclose(par @ par, np.eye(p.dim))


@pytest.mark.filterwarnings("ignore::qudit_rabi.core.TruncationWarning")
def test_uncoupled_spectrum():
    p = ModelParams(d=3, Omega1=0.15, Omega2=0.1, n_max=4)
    expected = sorted(
        n - 0.075 * sz + 0.1 * mz for n in range(5) for sz in (1, -1) for mz in (-1, 0, 1)
    )
    assert np.allclose(np.diag(build_uncoupled(p)).real, np.diag(build_uncoupled(p)))
    assert np.allclose(exact_spectrum(p, vectors=False).values, expected)


@pytest.mark.filterwarnings("ignore::qudit_rabi.core.TruncationWarning")
def test_index_layout_and_dims():
    p = ModelParams(d=3, n_max=5)
    assert p.dims == (2, 3, 6) and p.dim == 36
    assert p.index(1, 2, 5) == 35
    assert parity_diagonal(p)[p.index(0, 0, 0)] == 1
    assert parity_diagonal(p)[p.index(1, 0, 0)] == -1
    assert parity_diagonal(p)[p.index(0, 1, 1)] == 1


def test_min_n_max_rule():
    assert min_n_max(2, 0.3, 0.3) == 13  # ceil(8 * 0.36) + 10
    assert min_n_max(4, 0.5, 0.5) == 42
    assert ModelParams(d=2, g1=0.3, g2=0.3).cutoff == 13


def test_invalid_params():
    for kw in ({"d": 1}, {"d": 2.5}, {"d": 2, "omega": 0}, {"d": 2, "g1": -1}, {"d": 2, "Omega1": float("nan")}):
        with pytest.raises(InvalidParams):
            ModelParams(**kw)
    with pytest.raises(InvalidParams):
        ModelParams(d=2, n_max=0)


def test_small_cutoff_warns():
    with pytest.warns(core.TruncationWarning):
        ModelParams(d=2, g1=0.5, g2=0.5, n_max=5)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        ModelParams(d=2, g1=0.5, g2=0.5, n_max=30)


@given(params_st)
def test_truncation_variational_monotonicity(p):
    # a truncated Hamiltonian is a principal block of the next larger one
    base = p.cutoff
    energies = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", core.TruncationWarning)
        for n in (base - 4, base, base + 4):
            energies.append(exact_spectrum(p.replace(n_max=n), 1, vectors=False).values[0])
    assert energies[0] >= energies[1] - 1e-12 >= energies[2] - 2e-12


def test_qubit_exchange_symmetry():
    # for d = 2 the model is symmetric under swapping the two two-level systems
    p = ModelParams(d=2, Omega1=0.15, Omega2=0.1, g1=0.3, g2=0.2)
    q = p.replace(Omega1=0.1, Omega2=0.15, g1=0.2, g2=0.3)
    assert np.allclose(exact_spectrum(p, vectors=False).values, exact_spectrum(q, vectors=False).values, atol=1e-12)


def test_frozen_low_levels():
    frozen = {
        2: [-0.388733985158067, -0.364123224032508, 0.000916275961028, 0.021624411310189],
        3: [-0.82293655219147, -0.821171434423039, -0.188791218362306, -0.12592581467111],
        4: [-1.450304442621955, -1.450246278488597, -0.488256904681631, -0.474850906445726],
    }
    for d, ref in frozen.items():
        p = ModelParams(d=d, Omega1=0.15, Omega2=0.1, g1=0.3, g2=0.3)
        assert np.allclose(exact_spectrum(p, 4, vectors=False).values, ref, atol=1e-12)


def test_ground_state_parity_resolved():
    p = ModelParams(d=3, Omega1=0.15, Omega2=0.1, g1=0.2, g2=0.2)
    e, psi, parity = ground_state(p)
    assert np.isclose(e, exact_spectrum(p, 1, vectors=False).values[0])
    assert np.isclose(np.vdot(psi, parity_diagonal(p) * psi).real, parity)
    assert np.isclose(np.linalg.norm(psi), 1)
    assert np.allclose(build_full_hamiltonian(p) @ psi, e * psi, atol=1e-10)


def test_degenerate_sectors_pick_even():
    # without atomic frequencies the two parity sectors are exactly degenerate
    p = ModelParams(d=2, g1=0.4, g2=0.4)
    e = sector_ground_energies(p)
    assert abs(e[1] - e[-1]) < 1e-10
    assert ground_state(p)[2] == 1
    assert ground_gap(p) < 1e-10


def test_reduced_drops_atomic_terms():
    p = ModelParams(d=2, Omega1=0.3, Omega2=0.2, g1=0.1, g2=0.1)
    assert np.allclose(build_reduced(p), build_full_hamiltonian(p.replace(Omega1=0, Omega2=0)))
