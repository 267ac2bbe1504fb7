"""Shared fixtures and brute-force oracles used across the test modules."""

import numpy as np
import pytest

from udspin.basis import SymmetricBasis, SymmetricState, matrix_element


@pytest.fixture
def rng():
    return np.random.default_rng(20260815)


def random_state(basis: SymmetricBasis, rng) -> SymmetricState:
    c = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
    return SymmetricState(basis, c).normalized()


def random_even_state(basis: SymmetricBasis, rng) -> SymmetricState:
    """Random state supported on even occupations of levels 2..D."""
    c = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
    rest = basis.occupations[:, 1:]
    c[(rest % 2 != 0).any(axis=1)] = 0.0
    return SymmetricState(basis, c).normalized()


def dense_sij(basis: SymmetricBasis, i: int, j: int) -> np.ndarray:
    """Dense S_ij matrix built entry by entry from matrix_element (oracle)."""
    occ = basis.occupations
    out = np.zeros((basis.dim, basis.dim))
    for r in range(basis.dim):
        for c in range(basis.dim):
            out[r, c] = matrix_element(occ[r], occ[c], i, j)
    return out
