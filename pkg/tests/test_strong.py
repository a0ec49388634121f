import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qudit_rabi import core, strong
from qudit_rabi.model import ModelParams, build_reduced, exact_spectrum, ground_state, parity_diagonal


def test_qutrit_eigenvectors():
    lam, v = strong.qudit_eigenbasis(3)
    assert list(lam) == [-2, 0, 2]
    refs = [np.array([1, -math.sqrt(2), 1]) / 2, np.array([-math.sqrt(2), 0, math.sqrt(2)]) / 2, np.array([1, math.sqrt(2), 1]) / 2]
    for k, ref in enumerate(refs):
        assert math.isclose(abs(np.vdot(ref, v[:, k])), 1, abs_tol=1e-12)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_displaced_states_are_reduced_eigenstates(d):
    p = ModelParams(d=d, g1=0.3, g2=0.2, n_max=40)
    h = build_reduced(p)
    for lv in strong.displaced_spectrum(p, n_photons=2):
        psi = strong.build_displaced_state(lv, p)
        assert np.linalg.norm(h @ psi - lv.energy * psi) < 1e-9
        assert math.isclose(lv.energy, p.omega * (lv.N - lv.displacement**2), abs_tol=1e-14)


def test_displaced_examples():
    p = ModelParams(d=2, g1=0.3, g2=0.3)
    low = strong.displaced_spectrum(p, n_photons=0)[:2]
    assert {(lv.sigma, lv.m_index) for lv in low} == {(1, 1), (-1, 0)}
    assert all(math.isclose(lv.energy, -0.36) for lv in low)
    up = strong.displaced_level(ModelParams(d=4, g1=0.2, g2=0.1), 1, 3)
    assert math.isclose(up.displacement, 0.5)
    zero = strong.displaced_spectrum(ModelParams(d=3), n_photons=2)
    assert [lv.energy for lv in zero] == [0.0] * 6 + [1.0] * 6 + [2.0] * 6


@given(st.integers(2, 5), st.floats(0.05, 0.6), st.floats(0.05, 0.6))
def test_ground_pair_is_degenerate_minimum(d, g1, g2):
    p = ModelParams(d=d, g1=g1, g2=g2)
    levels = strong.displaced_spectrum(p, n_photons=1)
    lo = min(lv.energy for lv in levels)
    minimal = [lv for lv in levels if abs(lv.energy - lo) < 1e-12]
    assert sorted((lv.sigma, lv.m_index, lv.N) for lv in minimal) == [(-1, 0, 0), (1, d - 1, 0)]


def test_same_spin_branch_overlap():
    g2 = 0.3
    p = ModelParams(d=2, g1=0.2, g2=g2)
    a = strong.displaced_fock(strong.displaced_level(p, 1, 1).displacement, 0, p.cutoff)
    b = strong.displaced_fock(strong.displaced_level(p, 1, 0).displacement, 0, p.cutoff)
    assert math.isclose(abs(np.vdot(a, b)), math.exp(-2 * g2**2), rel_tol=1e-10)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_branch_overlap_against_displacements(d):
    p = ModelParams(d=d, g1=0.3, g2=0.2)
    up, down = strong.ground_pair(p)
    a = core.displacement(-up.displacement, p.cutoff)[:, 0]
    b = core.displacement(-down.displacement, p.cutoff)[:, 0]
    assert abs(abs(np.vdot(a, b)) - strong.branch_overlap(p)) < 1e-8


@pytest.mark.parametrize("d", [2, 3, 4])
@pytest.mark.parametrize("sign", [1, -1])
def test_ghz_norm_and_parity(d, sign):
    p = ModelParams(d=d, g1=0.3, g2=0.3)
    psi = strong.ghz_state(p, sign)
    assert abs(np.linalg.norm(psi) - 1) < 1e-12
    assert abs(np.vdot(psi, parity_diagonal(p) * psi).real - sign) < 1e-12


def test_ghz_at_zero_coupling():
    # branches have orthogonal qubit factors, so both signs are well defined
    p = ModelParams(d=2)
    assert strong.branch_overlap(p) == 1.0
    for sign in (1, -1):
        assert abs(np.linalg.norm(strong.ghz_state(p, sign)) - 1) < 1e-12
    with pytest.raises(ValueError):
        strong.ghz_state(p, 0)


def test_ghz_fidelity_strong_coupling():
    p = ModelParams(d=2, Omega1=0.15, Omega2=0.1, g1=1.0, g2=1.0)
    _, psi, parity = ground_state(p)
    assert core.fidelity(strong.ghz_state(p, parity), psi) >= 0.999


def test_traced_ghz_reference_has_four_entries():
    from qudit_rabi.entanglement import reduced_atoms

    for d in (2, 3, 4):
        p = ModelParams(d=d, g1=0.3, g2=0.2)
        up, down = strong.ground_pair(p)
        lam, vecs = strong.qudit_eigenbasis(d)
        # rotate the traced GHZ state into the (sigma_x, J+ + J-) eigenbasis
        basis = np.kron(np.column_stack([strong.sigma_vector(1), strong.sigma_vector(-1)]), vecs)
        rho = basis.conj().T @ reduced_atoms(strong.ghz_state(p, 1), p) @ basis
        k = strong.branch_overlap(p)
        i_up, i_down = d - 1, d  # |up, m=d-1> and |down, m=0>
        ref = np.zeros((2 * d, 2 * d))
        ref[i_up, i_up] = ref[i_down, i_down] = 0.5
        ref[i_up, i_down] = ref[i_down, i_up] = 0.5 * k
        assert np.allclose(np.abs(rho), ref, atol=1e-10)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_numeric_second_order_matrix_matches_closed_form(d):
    for g1, g2, o1, o2 in [(0.3, 0.3, 0.15, 0.1), (0.5, 0.2, 0.1, 0.3), (0.25, 0.4, 0.2, 0.05)]:
        p = ModelParams(d=d, Omega1=o1, Omega2=o2, g1=g1, g2=g2)
        m = strong.second_order_matrix(p)
        r = strong.perturbative_energies(p)
        assert math.isclose(m[0, 0], r.M00, rel_tol=1e-10)
        assert math.isclose(m[1, 1], r.M00, rel_tol=1e-10)
        # off-diagonal sign depends on the relative phase of the two branches
        assert math.isclose(abs(m[0, 1]), abs(r.M01), abs_tol=1e-14, rel_tol=1e-10)


@given(st.integers(2, 6), st.floats(0.1, 0.6), st.floats(0.1, 0.6), st.floats(0, 0.3), st.floats(0, 0.3))
def test_general_energy_formula_equals_numeric_matrix(d, g1, g2, o1, o2):
    p = ModelParams(d=d, Omega1=o1, Omega2=o2, g1=g1, g2=g2)
    r = strong.perturbative_energies(p)
    m = strong.second_order_matrix(p)
    ev = r.E0 + np.linalg.eigvalsh(m)
    assert np.allclose(ev, r.pair, atol=1e-12)
    if d >= 3:
        assert r.M01 == 0.0 and r.E_plus == r.E_minus


def test_qubit_denominator_consistency():
    # the second term's denominator reduces to 16 g1 g2 at d = 2
    for g1, g2 in [(0.2, 0.3), (0.5, 0.5), (0.7, 0.1)]:
        p = ModelParams(d=2, Omega1=0.15, Omega2=0.1, g1=g1, g2=g2)
        r = strong.perturbative_energies(p)
        assert math.isclose(0.5 * (r.E_plus + r.E_minus) - r.E0, r.M00, rel_tol=1e-12)


def test_perturbative_limits():
    p = ModelParams(d=2, g1=0.3, g2=0.3)
    r = strong.perturbative_energies(p)
    assert r.E_plus == r.E_minus == r.E0 == -0.36
    devs = []
    for eps in (0.01, 0.02):
        r = strong.perturbative_energies(p.replace(Omega1=eps, Omega2=eps))
        devs.append(abs(r.E_minus - r.E0))
    assert math.isclose(devs[1] / devs[0], 4, rel_tol=1e-9)
    with pytest.raises(strong.SingularDenominator):
        strong.perturbative_energies(p.replace(g2=0))


def test_qubit_energy_against_exact():
    p = ModelParams(d=2, Omega1=0.15, Omega2=0.1, g1=0.3, g2=0.3)
    e0 = exact_spectrum(p, 1, vectors=False).values[0]
    assert abs(strong.perturbative_energies(p).E_minus - e0) <= 0.01


def test_firstorder_state():
    p = ModelParams(d=2, Omega1=0.1, Omega2=0.1, g1=0.5, g2=0.5)
    _, psi, parity = ground_state(p)
    f0 = core.fidelity(strong.ghz_state(p, parity), psi)
    f6 = core.fidelity(strong.psi_pm_firstorder(p, parity), psi)
    f8 = core.fidelity(strong.psi_pm_firstorder(p, parity, n_photons=8), psi)
    assert f6 > f0
    assert abs(f8 - f6) < 1e-6
    q = p.replace(Omega1=0.0, Omega2=0.0)
    assert np.allclose(strong.psi_pm_firstorder(q, 1), strong.ghz_state(q, 1))


def test_admixtures_decay_with_coupling():
    sizes = []
    for g in (0.3, 0.5, 0.7):
        p = ModelParams(d=2, Omega1=0.1, Omega2=0.1, g1=g, g2=g)
        sizes.append(np.linalg.norm(strong.psi_pm_firstorder(p, 1) - strong.ghz_state(p, 1)))
    assert sizes[0] > sizes[1] > sizes[2]


@pytest.mark.parametrize("d,tol", [(2, 0.1), (3, 0.15), (4, 0.2)])
def test_splitting_scaling_slope(d, tol):
    p = ModelParams(d=d, Omega1=0.15, g1=0.4, g2=0.4)
    pairs = strong.ground_splitting_scaling(p, [0.02, 0.04, 0.08])
    slope = strong.fit_power_law(*zip(*pairs))
    assert abs(slope - (d - 1)) <= tol
