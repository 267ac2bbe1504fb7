"""Reduced density matrices against a brute-force tensor-product oracle.

The oracle expands symmetric states into the full D**N product space and
performs the literal partial trace, so it is independent of every
moment-based formula under test (cost caps it at small N).
"""

import math

import numpy as np
import pytest

from udspin.basis import SymmetricBasis, basis_ket, expval_tables
from udspin.errors import CapacityError, IntegrityError
from udspin.rdm import (
    EntropyReport,
    check_density_matrix,
    dcat_one_qudit_purity,
    dcat_two_qudit_purity,
    dscs_level_weights,
    entropies,
    level_populations,
    level_purity,
    level_rdm,
    one_qudit_rdm,
    partial_trace_oracle,
    spectrum_entropies,
    two_qudit_purity,
    two_qudit_rdm,
    two_qudit_rdm_from_tables,
)
from udspin.states import dcat, dscs, nodon

from conftest import random_state


def oracle_level_rdm(state, i):
    """Mode-space reduction grouping amplitudes by the other levels' occupations."""
    basis = state.basis
    n = basis.n_particles
    rho = np.zeros((n + 1, n + 1), dtype=np.complex128)
    occ = basis.occupations
    rest_keys = {}
    for r in range(basis.dim):
        rest = tuple(np.delete(occ[r], i - 1))
        rest_keys.setdefault(rest, []).append(r)
    for rows in rest_keys.values():
        for a in rows:
            for b in rows:
                rho[occ[a, i - 1], occ[b, i - 1]] += state.coeffs[a] * np.conj(
                    state.coeffs[b]
                )
    return rho


def test_level_populations_basic(rng):
    basis = SymmetricBasis(6, 3)
    state = random_state(basis, rng)
    for i in (1, 2, 3):
        pops = level_populations(state, i)
        assert pops.shape == (7,)
        assert (pops >= 0).all()
        assert pops.sum() == pytest.approx(1.0, abs=1e-12)
        assert level_purity(state, i) == pytest.approx(np.sum(pops**2), abs=1e-14)
    with pytest.raises(ValueError):
        level_populations(state, 4)


def test_level_rdm_vs_mode_oracle(rng):
    basis = SymmetricBasis(5, 3)
    state = random_state(basis, rng)
    for i in (1, 2, 3):
        want = oracle_level_rdm(state, i)
        got = level_rdm(state, i)
        # the oracle confirms the reduction really is diagonal
        np.testing.assert_allclose(got, want, atol=1e-12)


@pytest.mark.parametrize("n", [6, 30])
def test_dscs_level_weights_vs_marginals(n, rng):
    z = rng.normal(size=3) + 1j * rng.normal(size=3)
    basis = SymmetricBasis(n, 3)
    state = dscs(basis, z)
    mod2 = np.abs(z) ** 2
    for i in (1, 2, 3):
        weights = dscs_level_weights(n, mod2[i - 1], mod2.sum() - mod2[i - 1])
        pops = level_populations(state, i)
        # weight index n corresponds to occupation N - n
        np.testing.assert_allclose(pops, weights[::-1], atol=1e-12)


def test_dscs_level_weights_edge_cases():
    w0 = dscs_level_weights(5, 0.0, 2.0)
    assert w0[5] == 1.0 and w0[:5].sum() == 0.0
    w1 = dscs_level_weights(5, 2.0, 0.0)
    assert w1[0] == 1.0 and w1[1:].sum() == 0.0
    with pytest.raises(ValueError):
        dscs_level_weights(5, 0.0, 0.0)
    with pytest.raises(ValueError):
        dscs_level_weights(5, -1.0, 1.0)


@pytest.mark.parametrize("n, d", [(3, 2), (5, 2), (4, 3), (6, 3)])
def test_one_qudit_rdm_vs_partial_trace(n, d, rng):
    basis = SymmetricBasis(n, d)
    state = random_state(basis, rng)
    got = one_qudit_rdm(state)
    want = partial_trace_oracle(state, keep=1)
    np.testing.assert_allclose(got, want, atol=1e-12)
    check_density_matrix(got)


@pytest.mark.parametrize("n, d", [(3, 2), (4, 2), (4, 3), (6, 3)])
def test_two_qudit_rdm_vs_partial_trace(n, d, rng):
    basis = SymmetricBasis(n, d)
    state = random_state(basis, rng)
    got = two_qudit_rdm(state)
    want = partial_trace_oracle(state, keep=2)
    np.testing.assert_allclose(got, want, atol=1e-12)
    check_density_matrix(got)


def test_two_qudit_requires_enough_particles():
    basis = SymmetricBasis(1, 3)
    state = basis_ket(basis, [1, 0, 0])
    with pytest.raises(ValueError):
        two_qudit_rdm(state)


def test_two_qudit_purity_matches_matrix(rng):
    for n, d in [(4, 3), (6, 3), (5, 4)]:
        basis = SymmetricBasis(n, d)
        state = random_state(basis, rng)
        rho = two_qudit_rdm(state)
        want = float(np.sum(np.abs(rho) ** 2))  # tr(rho^2), Hermitian
        assert two_qudit_purity(state) == pytest.approx(want, abs=1e-11)


def test_coherent_state_reductions_are_products(rng):
    # |z>^(x)N is a product state: rho2 = kron(rho1, rho1), rho1 pure
    n, d = 7, 3
    z = rng.normal(size=d) + 1j * rng.normal(size=d)
    basis = SymmetricBasis(n, d)
    state = dscs(basis, z)
    rho1 = one_qudit_rdm(state)
    rho2 = two_qudit_rdm(state)
    np.testing.assert_allclose(rho2, np.kron(rho1, rho1), atol=1e-11)
    zn = z / np.linalg.norm(z)
    np.testing.assert_allclose(rho1, np.outer(zn, zn.conj()), atol=1e-12)
    assert two_qudit_purity(state) == pytest.approx(1.0, abs=1e-11)


def test_nodon_reductions():
    n, d = 5, 3
    basis = SymmetricBasis(n, d)
    state = nodon(basis, [0.3, -0.7, 1.1])
    rho1 = one_qudit_rdm(state)
    np.testing.assert_allclose(rho1, np.eye(d) / d, atol=1e-12)
    rho2 = two_qudit_rdm(state)
    want = np.zeros((d * d, d * d), dtype=complex)
    for j in range(d):
        want[j * d + j, j * d + j] = 1.0 / d
    np.testing.assert_allclose(rho2, want, atol=1e-12)
    assert two_qudit_purity(state) == pytest.approx(1.0 / d, abs=1e-12)
    rep = entropies(rho2, "two_atom", n, d)
    assert rep.linear == pytest.approx(d / (d + 1.0), abs=1e-12)


def test_entropy_frozen_values():
    # two equal weights in a level reduction with N = 3: purity 1/2,
    # linear (4/3)(1/2) = 2/3, von Neumann ln2/ln4 = 1/2
    rep = spectrum_entropies([0.5, 0.5, 0.0, 0.0], "level", 3, 3)
    assert rep == EntropyReport(
        purity=pytest.approx(0.5),
        linear=pytest.approx(2.0 / 3.0),
        von_neumann=pytest.approx(0.5),
    )
    pure = spectrum_entropies([1.0, 0.0, 0.0], "one_atom", 5, 3)
    assert pure.purity == pytest.approx(1.0)
    assert pure.linear == 0.0 and pure.von_neumann == 0.0
    mixed = entropies(np.eye(3) / 3.0, "one_atom", 5, 3)
    assert mixed.linear == pytest.approx(1.0, abs=1e-12)
    assert mixed.von_neumann == pytest.approx(1.0, abs=1e-12)


def test_entropy_eigenvalue_guards():
    with pytest.raises(IntegrityError):
        spectrum_entropies([1.0 + 2e-8, -2e-8], "one_atom", 4, 2)
    rep = spectrum_entropies([1.0, -5e-9], "one_atom", 4, 2)
    assert rep.linear == 0.0
    with pytest.raises(ValueError):
        spectrum_entropies([1.0, 0.0], "three_atom", 4, 2)


@pytest.mark.parametrize(
    "n, z",
    [
        (6, [1.0, 0.8, 0.45]),
        (7, [1.0, 0.7 + 0.2j, 0.4 - 0.1j]),
        (8, [1.0, 1.3, 0.2]),
    ],
)
def test_dcat_purity_fast_paths(n, z):
    basis = SymmetricBasis(n, 3)
    cat = dcat(basis, z)
    rho1 = one_qudit_rdm(cat)
    want1 = float(np.sum(np.abs(rho1) ** 2))
    assert dcat_one_qudit_purity(z, n) == pytest.approx(want1, abs=1e-11)
    want2 = two_qudit_purity(cat)
    assert dcat_two_qudit_purity(z, n) == pytest.approx(want2, abs=1e-11)


def test_dcat_purity_large_n_finite():
    val1 = dcat_one_qudit_purity([1.0, 1.0, 0.3], 200)
    val2 = dcat_two_qudit_purity([1.0, 1.0, 0.3], 200)
    assert 0.0 < val1 <= 1.0
    assert 0.0 < val2 <= 1.0


def test_level_entropy_binomial_asymptote():
    # symmetric coherent state, level weight = half: purity C(2N,N)/4^N,
    # so the linear level entropy approaches 1 - 1/sqrt(pi N)
    n = 100
    purity_exact = math.comb(2 * n, n) / 4.0**n
    weights = dscs_level_weights(n, 1.0, 1.0)
    assert np.sum(weights**2) == pytest.approx(purity_exact, rel=1e-12)
    linear = (n + 1.0) / n * (1.0 - purity_exact)
    assert abs(linear - (1.0 - 1.0 / math.sqrt(math.pi * n))) < 2.0 / n


def test_partial_trace_oracle_guards(rng):
    basis = SymmetricBasis(9, 3)
    state = random_state(basis, rng)
    with pytest.raises(CapacityError):
        partial_trace_oracle(state, keep=1)
    small = random_state(SymmetricBasis(4, 3), rng)
    with pytest.raises(ValueError):
        partial_trace_oracle(small, keep=3)


def test_check_density_matrix_rejects_bad():
    good = np.eye(3) / 3.0
    check_density_matrix(good)
    with pytest.raises(IntegrityError):
        check_density_matrix(np.eye(3))  # trace 3
    bad = np.eye(3) / 3.0
    bad[0, 1] = 0.2
    with pytest.raises(IntegrityError):
        check_density_matrix(bad)


def test_two_qudit_rdm_from_tables_matches(rng):
    basis = SymmetricBasis(5, 3)
    state = random_state(basis, rng)
    S, Q = expval_tables(state)
    np.testing.assert_allclose(
        two_qudit_rdm_from_tables(S, Q, 5), two_qudit_rdm(state), atol=1e-13
    )
