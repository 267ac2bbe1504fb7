"""Reduced density matrices and entanglement measures for symmetric states.

Three reductions are supported, all computable in polynomial time from
collective-operator moments because the state never leaves the
symmetric sector:

* the level reduction, diagonal in the occupation of one chosen level
  (eigenvalues are the marginal occupation probabilities);
* the one-particle reduction rho1[i, j] = <S_ji>/N;
* the two-particle reduction
  rho2[(i, k), (j, l)] = (<S_ji S_lk> - delta_il <S_jk>) / (N (N - 1)),
  laid out with composite row index (i-1) D + (k-1) so that product
  states satisfy rho2 = kron(rho1, rho1).

A brute-force partial trace over the full D**N tensor product is
included as a small-system oracle.  Entropy reports use normalized
linear entropies, prefactor d_eff/(d_eff - 1), and von Neumann entropies
in base d_eff, so every entropy lies in [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .basis import (
    SymmetricBasis,
    SymmetricState,
    expval_matrix,
    expval_tables,
)
from .errors import CapacityError, IntegrityError
from .states import _cat_context, dcat_expval_tables

__all__ = [
    "level_populations",
    "level_rdm",
    "level_purity",
    "dscs_level_weights",
    "one_qudit_rdm",
    "one_qudit_rdm_from_tables",
    "two_qudit_rdm",
    "two_qudit_rdm_from_tables",
    "two_qudit_purity",
    "two_qudit_purity_from_tables",
    "dcat_one_qudit_purity",
    "dcat_two_qudit_purity",
    "EntropyReport",
    "spectrum_entropies",
    "entropies",
    "partial_trace_oracle",
    "check_density_matrix",
    "clamp_unit",
    "clamp_nonneg",
]


def clamp_unit(value: float, tol: float = 1e-9) -> float:
    """Snap roundoff excursions outside [0, 1] back; fail on real violations."""
    if -tol <= value < 0.0:
        return 0.0
    if 1.0 < value <= 1.0 + tol:
        return 1.0
    if value < -tol or value > 1.0 + tol:
        raise IntegrityError(f"value {value!r} outside [0, 1] beyond tolerance")
    return float(value)


def clamp_nonneg(value: float, tol: float = 1e-9) -> float:
    """Snap tiny negative roundoff to zero; fail on real violations."""
    if -tol <= value < 0.0:
        return 0.0
    if value < -tol:
        raise IntegrityError(f"value {value!r} negative beyond tolerance")
    return float(value)


# ---------------------------------------------------------------------------
# level reduction


def level_populations(state: SymmetricState, i: int) -> np.ndarray:
    """Marginal probabilities P(n_i = p), p = 0..N; the level-RDM spectrum."""
    basis = state.basis
    if not 1 <= i <= basis.n_levels:
        raise ValueError(f"level index {i} outside 1..{basis.n_levels}")
    weights = np.abs(state.coeffs) ** 2
    return np.bincount(
        basis.occupations[:, i - 1], weights=weights, minlength=basis.n_particles + 1
    )


def level_rdm(state: SymmetricState, i: int) -> np.ndarray:
    """Level reduction as an (N+1) x (N+1) diagonal density matrix."""
    return np.diag(level_populations(state, i))


def level_purity(state: SymmetricState, i: int) -> float:
    pops = level_populations(state, i)
    return float(np.sum(pops**2))


def dscs_level_weights(n_particles: int, x: float, y: float) -> np.ndarray:
    """Level-RDM spectrum of a coherent state, closed binomial form.

    x is the squared amplitude of the chosen level, y the summed squared
    amplitude of the others.  Entry n is C(N, n) x^(N-n) y^n / (x+y)^N,
    which is the weight of occupation N - n of the chosen level (the
    returned array is indexed by n, not by occupation).
    """
    if x < 0 or y < 0 or x + y == 0:
        raise ValueError("need x, y >= 0 with x + y > 0")
    n = n_particles
    ks = np.arange(n + 1)
    if x == 0.0:
        out = np.zeros(n + 1)
        out[n] = 1.0
        return out
    if y == 0.0:
        out = np.zeros(n + 1)
        out[0] = 1.0
        return out
    log_binom = gammaln(n + 1) - gammaln(ks + 1) - gammaln(n - ks + 1)
    log_w = log_binom + (n - ks) * math.log(x) + ks * math.log(y) - n * math.log(x + y)
    return np.exp(log_w)


# ---------------------------------------------------------------------------
# one- and two-particle reductions


def one_qudit_rdm_from_tables(S: np.ndarray, n_particles: int) -> np.ndarray:
    """rho1[i, j] = <S_ji>/N from a first-moment table."""
    return np.asarray(S, dtype=np.complex128).T / n_particles


def one_qudit_rdm(state: SymmetricState) -> np.ndarray:
    return one_qudit_rdm_from_tables(expval_matrix(state), state.basis.n_particles)


def two_qudit_rdm_from_tables(S: np.ndarray, Q: np.ndarray, n_particles: int) -> np.ndarray:
    """rho2 from moment tables; composite index (i-1) D + (k-1), hermitized."""
    n = n_particles
    if n < 2:
        raise ValueError("two-particle reduction requires n_particles >= 2")
    S = np.asarray(S, dtype=np.complex128)
    Q = np.asarray(Q, dtype=np.complex128)
    d = S.shape[0]
    rho = np.empty((d * d, d * d), dtype=np.complex128)
    for i in range(d):
        for k in range(d):
            row = i * d + k
            for j in range(d):
                for l in range(d):
                    val = Q[j, i, l, k] - (i == l) * S[j, k]
                    rho[row, j * d + l] = val / (n * (n - 1))
    return 0.5 * (rho + rho.conj().T)


def two_qudit_rdm(state: SymmetricState) -> np.ndarray:
    n = state.basis.n_particles
    if n < 2:
        raise ValueError("two-particle reduction requires n_particles >= 2")
    S, Q = expval_tables(state)
    return two_qudit_rdm_from_tables(S, Q, n)


def two_qudit_purity_from_tables(S: np.ndarray, Q: np.ndarray, n_particles: int) -> float:
    """tr(rho2^2) directly from moment tables, no d^2 x d^2 matrix built.

    Expanding tr(rho2^2) with rho2[(i,k),(j,l)] = (Q[j,i,l,k] -
    delta_il S[j,k])/(N(N-1)) gives three contractions: the double-Q
    term, the cross term (twice), and tr(S)^2.
    """
    n = n_particles
    S = np.asarray(S, dtype=np.complex128)
    Q = np.asarray(Q, dtype=np.complex128)
    t1 = np.sum(Q.transpose(1, 0, 3, 2) * Q)
    t2 = np.einsum("jikj,ik->", Q, S)
    t3 = np.trace(S) ** 2
    val = (t1 - 2.0 * t2 + t3) / (n * (n - 1)) ** 2
    if abs(val.imag) > 1e-8 * max(1.0, abs(val.real)):
        raise IntegrityError(f"two-particle purity has imaginary part {val.imag!r}")
    return float(val.real)


def two_qudit_purity(state: SymmetricState) -> float:
    n = state.basis.n_particles
    if n < 2:
        raise ValueError("two-particle reduction requires n_particles >= 2")
    S, Q = expval_tables(state)
    return two_qudit_purity_from_tables(S, Q, n)


# ---------------------------------------------------------------------------
# cat-state purity fast paths


def dcat_one_qudit_purity(z, n_particles: int) -> float:
    """tr(rho1^2) for the even cat state, closed form.

    rho1 is diagonal, so the purity is a ratio of sign-weighted power
    sums; evaluated through the scale-invariant weights u_b.
    """
    n = n_particles
    z, u, signs, norm2, den = _cat_context(z, n)
    base = float(np.sum(u ** (n - 1)))
    acc = base**2
    for i0 in range(1, z.size):
        weighted = float(np.sum(signs[:, i0] * u ** (n - 1)))
        acc += abs(z[i0]) ** 4 * weighted**2
    return acc / (norm2**2 * den**2)


def dcat_two_qudit_purity(z, n_particles: int) -> float:
    """tr(rho2^2) for the even cat state from its closed moment tables.

    Uses the pairing structure of the cat moments: the general
    double-Q contraction splits into the j != k part plus diagonal
    corrections, avoiding any state-vector work.
    """
    n = n_particles
    S, Q = dcat_expval_tables(z, n)
    d = S.shape[0]
    total = 0j
    for i in range(d):
        for j in range(d):
            for k in range(d):
                if k == j:
                    continue
                for l in range(d):
                    total += Q[j, i, l, k] * Q[i, j, k, l]
    for i in range(d):
        for j in range(d):
            total += Q[j, i, i, j] * (Q[i, j, j, i] - 2.0 * S[i, i])
    total += np.trace(S) ** 2
    val = total / (n * (n - 1)) ** 2
    if abs(val.imag) > 1e-8 * max(1.0, abs(val.real)):
        raise IntegrityError(f"cat purity has imaginary part {val.imag!r}")
    return float(val.real)


# ---------------------------------------------------------------------------
# entropies


@dataclass(frozen=True)
class EntropyReport:
    """Purity plus normalized linear and von Neumann entropies of one reduction."""

    purity: float
    linear: float
    von_neumann: float


_EIG_CLIP = 1e-10
_EIG_FAIL = 1e-8


def _effective_dim(kind: str, n_particles: int, n_levels: int) -> int:
    if kind == "level":
        return n_particles + 1
    if kind == "one_atom":
        return n_levels
    if kind == "two_atom":
        return n_levels**2
    raise ValueError(f"unknown reduction kind {kind!r}")


def spectrum_entropies(
    weights, kind: str, n_particles: int, n_levels: int
) -> EntropyReport:
    """Entropy report from an eigenvalue spectrum (need not be sorted)."""
    w = np.asarray(weights, dtype=np.float64).ravel()
    if w.min() < -_EIG_FAIL:
        raise IntegrityError(
            f"reduced-density-matrix eigenvalue {w.min()!r} below -{_EIG_FAIL}"
        )
    if w.max() > 1.0 + _EIG_FAIL:
        raise IntegrityError(
            f"reduced-density-matrix eigenvalue {w.max()!r} above 1 + {_EIG_FAIL}"
        )
    w = np.clip(w, 0.0, 1.0)  # roundoff negatives above -1e-8 snap to zero
    d_eff = _effective_dim(kind, n_particles, n_levels)
    purity = float(np.sum(w**2))
    linear = clamp_unit(d_eff / (d_eff - 1.0) * (1.0 - purity))
    nz = w[w > _EIG_CLIP]
    # the + 0.0 turns an exact -0.0 (pure state) into +0.0
    von_neumann = clamp_unit(float(-(nz * np.log(nz)).sum() / math.log(d_eff)) + 0.0)
    return EntropyReport(purity=purity, linear=linear, von_neumann=von_neumann)


def entropies(rho, kind: str, n_particles: int, n_levels: int) -> EntropyReport:
    """Entropy report for a reduced density matrix (assumed Hermitian)."""
    w = np.linalg.eigvalsh(np.asarray(rho, dtype=np.complex128))
    return spectrum_entropies(w, kind, n_particles, n_levels)


def check_density_matrix(rho, tol: float = 1e-10) -> None:
    """Raise IntegrityError unless rho is Hermitian, unit-trace and PSD."""
    rho = np.asarray(rho, dtype=np.complex128)
    if not np.allclose(rho, rho.conj().T, atol=tol):
        raise IntegrityError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > 1e-9 or abs(np.trace(rho).imag) > 1e-12:
        raise IntegrityError(f"density matrix trace {np.trace(rho)!r} != 1")
    w = np.linalg.eigvalsh(rho)
    if w.min() < -_EIG_FAIL:
        raise IntegrityError(f"density matrix eigenvalue {w.min()!r} < -{_EIG_FAIL}")


# ---------------------------------------------------------------------------
# brute-force oracle


def partial_trace_oracle(state: SymmetricState, keep: int) -> np.ndarray:
    """Reduced density matrix by explicit partial trace over D**N indices.

    Expands the symmetric state into the full tensor-product space
    (particle 0 is the leftmost factor) and traces out all but `keep`
    particles.  Exponential cost: restricted to N <= 8, D <= 3.
    """
    if keep not in (1, 2):
        raise ValueError("keep must be 1 or 2")
    basis = state.basis
    n, d = basis.n_particles, basis.n_levels
    if n > 8 or d > 3:
        raise CapacityError("oracle restricted to N <= 8, D <= 3")
    if keep >= n + 1:
        raise ValueError("cannot keep more particles than present")
    total = d**n
    idx = np.arange(total)
    place = d ** np.arange(n - 1, -1, -1)
    digits = (idx[:, None] // place[None, :]) % d
    counts = np.stack([(digits == lvl).sum(axis=1) for lvl in range(d)], axis=1)
    ranks = np.fromiter(
        (basis._rank_of[tuple(map(int, row))] for row in counts),
        dtype=np.int64,
        count=total,
    )
    # amplitude of each tensor index: c_n / sqrt(multinomial(N; n))
    log_mult = gammaln(n + 1) - gammaln(counts + 1.0).sum(axis=1)
    psi = state.coeffs[ranks] * np.exp(-0.5 * log_mult)
    block = psi.reshape(d**keep, d ** (n - keep))
    return block @ block.conj().T
