from math import comb, log

import numpy as np
import pytest

from fermi_ent.dm import (
    amplitude_matrix,
    dense_amplitude_matrix,
    entropy,
    entropy_from_eigenvalues,
    ghz_state,
    max_entropy,
    normalized_entropy,
    paired_state,
    reduced_density_matrix,
    rotate_basis,
    spectra_match,
    subadditivity_check,
)
from fermi_ent.fock import FermionState, rank_subset, subset_from_orbitals
from fermi_ent.linalg import haar_unitary, jacobi_eigvalsh
from conftest import random_state
from oracles import charpoly_eigvals, rho_oracle


def single_sd(D, orbitals):
    return FermionState.build(D, len(orbitals), [(subset_from_orbitals(orbitals), 1.0)])


def test_amplitude_matrix_single_determinant():
    state = single_sd(4, [1, 2])
    g = amplitude_matrix(state, 1).mat
    assert g.shape == (4, 4)
    r1 = rank_subset(subset_from_orbitals([1]), 4, 1)
    r2 = rank_subset(subset_from_orbitals([2]), 4, 1)
    nz = {(i, j): g[i, j] for i in range(4) for j in range(4) if g[i, j] != 0}
    assert set(nz) == {(r1, r2), (r2, r1)}
    assert abs(nz[(r1, r2)]) == pytest.approx(1.0)
    assert nz[(r1, r2)] == pytest.approx(-nz[(r2, r1)])  # antisymmetry


def test_ghz_one_body_dm_is_maximally_mixed():
    state = ghz_state(4, 2)
    g = amplitude_matrix(state, 1).mat
    rho = g @ g.conj().T
    assert np.allclose(rho, 0.5 * np.eye(4), atol=1e-12)


def test_amplitude_matrix_norm():
    state = random_state(6, 3, seed=5)
    for M in (1, 2):
        amplitude_matrix(state, M).check_norm()


def test_dm_matches_operator_oracle():
    # entrywise agreement with direct operator action, all small sectors
    for D in range(2, 7):
        for N in range(2, min(D, 4) + 1):
            for M in range(1, N):
                for seed in (0, 1):
                    state = random_state(D, N, seed=seed)
                    got = reduced_density_matrix(state, M).mat
                    want = rho_oracle(state, M)
                    assert np.max(np.abs(got - want)) < 1e-12, (D, N, M)


def test_dense_amplitude_matrix_agrees_with_sparse():
    for D, N, M in [(5, 2, 1), (6, 3, 1), (6, 3, 2), (6, 4, 2)]:
        state = random_state(D, N, seed=3)
        amps = np.array([a for _, a in state.terms])
        dense = dense_amplitude_matrix(amps, D, N, M)
        assert np.allclose(dense, amplitude_matrix(state, M).mat, atol=1e-14)


def test_sd_spectrum_all_ones():
    state = single_sd(5, [1, 3])
    dm = reduced_density_matrix(state, 1)
    assert np.allclose(dm.spectrum(), [1, 1, 0, 0, 0], atol=1e-12)
    dm.validate()


def test_paired_state_one_body():
    state = paired_state(8, 2)
    assert state.num_terms() == 6
    rho = reduced_density_matrix(state, 1)
    assert np.allclose(rho.mat, 0.5 * np.eye(8), atol=1e-12)


def test_paired_vs_ghz_two_body_spectra_differ():
    ghz = reduced_density_matrix(ghz_state(8, 2), 2).spectrum()
    paired = reduced_density_matrix(paired_state(8, 2), 2).spectrum()
    assert not np.allclose(ghz, paired, atol=1e-8)


def test_entropy_examples():
    assert entropy(reduced_density_matrix(single_sd(6, [2, 4, 5]), 1)) == pytest.approx(
        0.0, abs=1e-12
    )
    ghz = ghz_state(8, 2)
    assert entropy(reduced_density_matrix(ghz, 1)) == pytest.approx(4 * log(2), abs=1e-9)
    assert entropy(reduced_density_matrix(ghz, 2)) == pytest.approx(6 * log(2), abs=1e-9)


def test_max_entropy():
    assert max_entropy(10, 5, 1) == pytest.approx(5 * log(2))
    assert max_entropy(13, 4, 2) == pytest.approx(6 * log(13))
    assert max_entropy(6, 3, 3) == pytest.approx(log(comb(6, 3)))


def test_normalized_entropy():
    sd = single_sd(6, [1, 2, 3])
    assert normalized_entropy(reduced_density_matrix(sd, 2)) == pytest.approx(
        log(comb(3, 2))
    )
    ghz = ghz_state(8, 2)
    assert normalized_entropy(reduced_density_matrix(ghz, 2)) == pytest.approx(
        log(2) + log(6)
    )


def test_spectrum_against_charpoly_oracle():
    rng = np.random.default_rng(11)
    x = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    h = x @ x.conj().T
    got = jacobi_eigvalsh(h)
    want = charpoly_eigvals(h)
    assert np.allclose(got, want, atol=1e-8)


def test_jacobi_matches_lapack():
    rng = np.random.default_rng(7)
    for n in (2, 5, 12, 30):
        x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        h = x + x.conj().T
        assert np.allclose(jacobi_eigvalsh(h), np.linalg.eigvalsh(h), atol=1e-10)


def test_spectrum_diagonal():
    from fermi_ent.dm import DensityMatrix

    dm = DensityMatrix(0.5 * np.eye(4, dtype=complex), D=4, N=2, M=1)
    assert np.allclose(dm.spectrum(), [0.5] * 4)


def test_rotate_basis_identity():
    state = random_state(5, 2, seed=9)
    rotated = rotate_basis(state, np.eye(5))
    assert rotated.terms == state.terms or all(
        abs(a - b) < 1e-12
        for (_, a), (_, b) in zip(rotated.terms, state.terms)
    )


def test_rotate_basis_preserves_spectra():
    rng = np.random.default_rng(21)
    for seed in range(3):
        state = random_state(6, 3, seed=seed)
        u = haar_unitary(6, rng)
        rotated = rotate_basis(state, u)
        for M in (1, 2):
            a = reduced_density_matrix(state, M).spectrum()
            b = reduced_density_matrix(rotated, M).spectrum()
            assert np.max(np.abs(a - b)) < 1e-8


def test_rotate_basis_two_orbital_block():
    # a rotation acting inside the occupied pair only changes the phase by det
    state = single_sd(4, [1, 2])
    theta = 0.7
    block = np.array(
        [[np.cos(theta), np.sin(theta)], [-np.sin(theta), np.cos(theta)]],
        dtype=complex,
    )
    u = np.eye(4, dtype=complex)
    u[:2, :2] = block
    rotated = rotate_basis(state, u)
    assert rotated.num_terms() == 1
    sd, amp = rotated.terms[0]
    assert sd == subset_from_orbitals([1, 2])
    assert amp == pytest.approx(np.linalg.det(block), abs=1e-12)


def test_rotate_basis_rejects_non_unitary():
    state = single_sd(4, [1, 2])
    with pytest.raises(ValueError):
        rotate_basis(state, np.ones((4, 4)))


def test_spectra_match():
    ok, dev = spectra_match(ghz_state(8, 2), 1)
    assert ok and dev < 1e-10
    ok, _ = spectra_match(single_sd(5, [1, 2]), 1)
    assert ok
    for seed in range(5):
        ok, _ = spectra_match(random_state(6, 3, seed=seed), 1)
        assert ok


def test_subadditivity_single_determinant():
    # closed form: ln C(N,2) <= 2 ln N
    for N, D in [(2, 5), (3, 6), (4, 8)]:
        res = subadditivity_check(single_sd(D, list(range(1, N + 1))), 1, 1)
        assert res.holds
        assert res.slack == pytest.approx(2 * log(N) - log(comb(N, 2)), abs=1e-9)


def test_subadditivity_ghz_and_random():
    res = subadditivity_check(ghz_state(8, 2), 1, 1)
    assert res.holds and res.slack >= 0
    for seed in range(3):
        res = subadditivity_check(random_state(8, 4, seed=seed), 1, 1, 1)
        assert res.holds and res.strong_holds


def test_entropy_bounds_random_states():
    for seed in range(5):
        state = random_state(7, 3, seed=seed)
        for M in (1, 2):
            s = entropy(reduced_density_matrix(state, M))
            assert -1e-9 <= s <= max_entropy(7, 3, M) + 1e-9


def test_generated_states_satisfy_dm_invariants():
    # Hermitian, PSD, trace C(N,M) for every generated state and cut
    rng = np.random.default_rng(2)
    from fermi_ent.linalg import haar_unitary as hu

    states = [
        ghz_state(8, 2),
        ghz_state(6, 3),
        paired_state(8, 2),
        random_state(7, 3, seed=0),
        rotate_basis(random_state(6, 3, seed=1), hu(6, rng)),
    ]
    for state in states:
        for M in range(1, state.N):
            reduced_density_matrix(state, M).validate()


def test_entropy_from_eigenvalues_clamps():
    assert entropy_from_eigenvalues([1.0, 0.0, -5e-11]) == pytest.approx(0.0)
    with pytest.raises(Exception):
        entropy_from_eigenvalues([1.0, -1e-6])
