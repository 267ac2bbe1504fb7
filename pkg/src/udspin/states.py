"""Named symmetric multi-quDit states and their closed-form moments.

Three families are provided:

* coherent states |z>: every particle occupies the same single-particle
  orbital z in C^D, giving multinomial amplitudes over occupations;
* even cat states: the projection of |z> onto the sector where the
  occupations of levels 2..D are all even, i.e. an equal-weight
  superposition of the 2**(D-1) sign-flipped coherent components
  |z_1, +-z_2, ..., +-z_D>;
* NOON-type states: equal-weight superpositions of the D single-level
  condensates |N e_j> with tunable phases.

For each family the closed-form first and second moments of the
collective operators S_ij are implemented next to the state-vector
constructor, so the two routes can be cross-checked numerically.
Closed forms are evaluated scale-invariantly (powers of t_b / |z|^2,
which lie in [-1, 1]) and stay finite for particle numbers in the
hundreds where naive powers of |z|^(2N) would overflow.

Level indices are 1-based (see basis module); level 1 is the reference
level of a cat state and must carry a nonzero amplitude for the closed
forms, which assume the representative normalization z_1 = 1.
"""

from __future__ import annotations

import numpy as np
from scipy.special import gammaln

from .basis import SymmetricBasis, SymmetricState
from .errors import EmptySectorError, IntegrityError

__all__ = [
    "representative",
    "dscs",
    "dscs_overlap",
    "dscs_expval_sij",
    "dscs_expval_sij_skl",
    "dscs_transition_sij",
    "dscs_expval_tables",
    "parity_apply",
    "parity_expval",
    "project_even",
    "project_odd",
    "dcat",
    "dcat_norm_squared",
    "dcat_expval_sij",
    "dcat_expval_sij_skl",
    "dcat_expval_tables",
    "nodon",
    "nodon_expval_sij",
    "nodon_expval_sij_skl",
    "nodon_expval_tables",
]


def _as_orbital(z, n_levels: int | None = None) -> np.ndarray:
    z = np.asarray(z, dtype=np.complex128).ravel()
    if n_levels is not None and z.size != n_levels:
        raise ValueError(f"orbital has {z.size} components, expected {n_levels}")
    if z.size < 2:
        raise ValueError("orbital needs at least two components")
    if not np.isfinite(z).all():
        raise ValueError("orbital components must be finite")
    if np.vdot(z, z).real == 0.0:
        raise ValueError("orbital must be nonzero")
    return z


def representative(z, level: int = 1) -> np.ndarray:
    """Rescale z so the given level (default 1) has amplitude exactly 1."""
    z = _as_orbital(z)
    pivot = z[level - 1]
    if pivot == 0:
        raise ValueError(f"level-{level} amplitude is zero, cannot rescale")
    return z / pivot


def dscs(basis: SymmetricBasis, z) -> SymmetricState:
    """Coherent state |z>: amplitudes sqrt(N!/prod n_i!) prod z_i^n_i / |z|^N.

    Log-space evaluation keeps the multinomial weights finite for any
    supported particle number.
    """
    z = _as_orbital(z, basis.n_levels)
    occ = basis.occupations
    n = basis.n_particles
    norm2 = float(np.vdot(z, z).real)
    finite = z != 0
    logz = np.zeros(basis.n_levels, dtype=np.complex128)
    logz[finite] = np.log(z[finite])
    log_mult = 0.5 * (gammaln(n + 1) - gammaln(occ + 1.0).sum(axis=1))
    w = occ.astype(np.float64) @ logz
    log_amp = log_mult + w.real - 0.5 * n * np.log(norm2)
    coeffs = np.exp(log_amp + 1j * w.imag)
    if not finite.all():
        dead = (occ[:, ~finite] > 0).any(axis=1)
        coeffs[dead] = 0.0
    return SymmetricState(basis, coeffs).normalized()


def dscs_overlap(z_bra, z_ket, n_particles: int) -> complex:
    """<z'|z> = (z'* . z)**N / (|z'| |z|)**N, unit-stable power form."""
    zb = _as_orbital(z_bra)
    zk = _as_orbital(z_ket, zb.size)
    inner = complex(np.vdot(zb, zk))
    scale = float(np.linalg.norm(zb) * np.linalg.norm(zk))
    return (inner / scale) ** n_particles


def _check_levels(n_levels: int, *indices: int) -> tuple:
    for idx in indices:
        if not 1 <= idx <= n_levels:
            raise ValueError(f"level index {idx} outside 1..{n_levels}")
    return tuple(i - 1 for i in indices)


def dscs_expval_sij(z, n_particles: int, i: int, j: int) -> complex:
    """<S_ij> on |z>: N z_i* z_j / |z|^2."""
    z = _as_orbital(z)
    i0, j0 = _check_levels(z.size, i, j)
    norm2 = float(np.vdot(z, z).real)
    return complex(n_particles * np.conj(z[i0]) * z[j0] / norm2)


def dscs_expval_sij_skl(z, n_particles: int, i: int, j: int, k: int, l: int) -> complex:
    """<S_ij S_kl> on |z>: (z_i* z_l / |z|^4)(N delta_jk |z|^2 + N(N-1) z_k* z_j)."""
    z = _as_orbital(z)
    i0, j0, k0, l0 = _check_levels(z.size, i, j, k, l)
    n = n_particles
    norm2 = float(np.vdot(z, z).real)
    front = np.conj(z[i0]) * z[l0] / norm2**2
    inner = n * (j == k) * norm2 + n * (n - 1) * np.conj(z[k0]) * z[j0]
    return complex(front * inner)


def dscs_transition_sij(z_bra, z_ket, n_particles: int, i: int, j: int) -> complex:
    """<z'| S_ij |z>: N z'_i* z_j (z'* . z)^(N-1) / (|z'| |z|)^N."""
    zb = _as_orbital(z_bra)
    zk = _as_orbital(z_ket, zb.size)
    i0, j0 = _check_levels(zb.size, i, j)
    nb, nk = np.linalg.norm(zb), np.linalg.norm(zk)
    unit = complex(np.vdot(zb, zk)) / (nb * nk)
    return complex(
        n_particles * np.conj(zb[i0]) * zk[j0] * unit ** (n_particles - 1) / (nb * nk)
    )


def dscs_expval_tables(z, n_particles: int):
    """Closed-form (S, Q) moment tables for |z>, same layout as expval_tables."""
    z = _as_orbital(z)
    d = z.size
    S = np.empty((d, d), dtype=np.complex128)
    Q = np.empty((d, d, d, d), dtype=np.complex128)
    for i in range(1, d + 1):
        for j in range(1, d + 1):
            S[i - 1, j - 1] = dscs_expval_sij(z, n_particles, i, j)
            for k in range(1, d + 1):
                for l in range(1, d + 1):
                    Q[i - 1, j - 1, k - 1, l - 1] = dscs_expval_sij_skl(
                        z, n_particles, i, j, k, l
                    )
    return S, Q


# ---------------------------------------------------------------------------
# parity operators and even projection


def parity_apply(state: SymmetricState, j: int) -> SymmetricState:
    """Pi_j |psi>: flips the sign of components with odd occupation of level j."""
    basis = state.basis
    (j0,) = _check_levels(basis.n_levels, j)
    signs = 1.0 - 2.0 * (basis.occupations[:, j0] % 2)
    return SymmetricState(basis, signs * state.coeffs)


def parity_expval(state: SymmetricState, j: int) -> float:
    """<Pi_j> = sum_n (-1)^(n_j) |c_n|^2, real by construction."""
    basis = state.basis
    (j0,) = _check_levels(basis.n_levels, j)
    signs = 1.0 - 2.0 * (basis.occupations[:, j0] % 2)
    return float(np.sum(signs * np.abs(state.coeffs) ** 2))


def _even_mask(basis: SymmetricBasis) -> np.ndarray:
    return (basis.occupations[:, 1:] % 2 == 0).all(axis=1)


def project_even(state: SymmetricState):
    """Project onto even occupations of levels 2..D.

    Returns (projected_state, squared_norm); the projected state is NOT
    renormalized.  Raises EmptySectorError if the projection vanishes.
    """
    mask = _even_mask(state.basis)
    kept = np.where(mask, state.coeffs, 0.0)
    sq = float(np.sum(np.abs(kept) ** 2))
    if sq < 1e-14:
        raise EmptySectorError("even-parity projection annihilated the state")
    return SymmetricState(state.basis, kept), sq


def project_odd(state: SymmetricState):
    """Complement of project_even; same return convention."""
    mask = _even_mask(state.basis)
    kept = np.where(mask, 0.0, state.coeffs)
    sq = float(np.sum(np.abs(kept) ** 2))
    if sq < 1e-14:
        raise EmptySectorError("odd-parity projection annihilated the state")
    return SymmetricState(state.basis, kept), sq


# ---------------------------------------------------------------------------
# even cat states


def _parity_signs(n_levels: int) -> np.ndarray:
    """(2**(D-1), D) table of sign patterns; column 1 is always +1."""
    m = n_levels - 1
    bits = (np.arange(2**m)[:, None] >> np.arange(m)[None, :]) & 1
    return np.hstack([np.ones((2**m, 1)), 1.0 - 2.0 * bits])


def _cat_weights(z: np.ndarray):
    """Normalized overlaps u_b = (z^b . z)/|z|^2 in [-1, 1] for all sign patterns."""
    x = np.abs(z) ** 2
    signs = _parity_signs(z.size)
    return (signs @ x) / x.sum(), signs


def dcat_norm_squared(z, n_particles: int) -> float:
    """Squared norm of the even projection of |z>: 2^(1-D) sum_b u_b^N."""
    z = _as_orbital(z)
    u, _ = _cat_weights(z)
    return float(2.0 ** (1 - z.size) * np.sum(u**n_particles))


def dcat(basis: SymmetricBasis, z) -> SymmetricState:
    """Normalized even cat state: projection of |z> onto the all-even sector.

    The projected norm is cross-checked against its closed form; a
    mismatch beyond 1e-10 raises IntegrityError.
    """
    z = _as_orbital(z, basis.n_levels)
    projected, sq = project_even(dscs(basis, z))
    closed = dcat_norm_squared(z, basis.n_particles)
    if abs(sq - closed) > 1e-10:
        raise IntegrityError(
            f"cat-state norm mismatch: projection {sq!r} vs closed form {closed!r}"
        )
    return projected.normalized()


def _cat_context(z, n_particles: int):
    z = representative(_as_orbital(z))
    u, signs = _cat_weights(z)
    norm2 = float(np.sum(np.abs(z) ** 2))
    den = float(np.sum(u**n_particles))
    if den <= 0.0:
        raise EmptySectorError("even-parity projection annihilated the state")
    return z, u, signs, norm2, den


def dcat_expval_sij(z, n_particles: int, i: int, j: int) -> complex:
    """<S_ij> on the even cat state: diagonal in (i, j).

    <S_ii> = N |z_i|^2 sum_b s_bi u_b^(N-1) / (|z|^2 sum_b u_b^N)
    with s_bi the sign of level i in pattern b (s_b1 = +1).
    """
    z, u, signs, norm2, den = _cat_context(z, n_particles)
    i0, j0 = _check_levels(z.size, i, j)
    if i0 != j0:
        return 0j
    num = float(np.sum(signs[:, i0] * u ** (n_particles - 1))) * abs(z[i0]) ** 2
    return complex(n_particles * num / (norm2 * den))


def _pairing_weight(i0: int, j0: int, k0: int, l0: int) -> int:
    # nonzero quadratic moments require index pairing (even parity sector):
    # (i=j, k=l), (i=k, j=l) or (i=l, j=k); the all-equal case counts once
    sel = (
        (i0 == j0) * (k0 == l0)
        + (i0 == k0) * (j0 == l0)
        + (i0 == l0) * (j0 == k0)
        - 2 * (i0 == j0) * (j0 == k0) * (k0 == l0)
    )
    return int(sel)


def dcat_expval_sij_skl(z, n_particles: int, i: int, j: int, k: int, l: int) -> complex:
    """<S_ij S_kl> on the even cat state.

    Vanishes unless the four indices pair up; otherwise

    N w sum_b s_bi z_i* z_l [delta_jk u_b^(N-1)/|z|^2
        + (N-1) s_bk z_k* z_j u_b^(N-2)/|z|^4] / sum_b u_b^N

    with pairing weight w in {0, 1}.
    """
    n = n_particles
    z, u, signs, norm2, den = _cat_context(z, n)
    i0, j0, k0, l0 = _check_levels(z.size, i, j, k, l)
    sel = _pairing_weight(i0, j0, k0, l0)
    if sel == 0:
        return 0j
    term_a = (j0 == k0) * float(np.sum(signs[:, i0] * u ** (n - 1))) / norm2
    term_b = 0j
    if n >= 2:
        term_b = (
            (n - 1)
            * np.conj(z[k0])
            * z[j0]
            * float(np.sum(signs[:, i0] * signs[:, k0] * u ** (n - 2)))
            / norm2**2
        )
    return complex(n * sel * np.conj(z[i0]) * z[l0] * (term_a + term_b) / den)


def dcat_expval_tables(z, n_particles: int):
    """Closed-form (S, Q) moment tables for the even cat state."""
    z = _as_orbital(z)
    d = z.size
    S = np.zeros((d, d), dtype=np.complex128)
    Q = np.zeros((d, d, d, d), dtype=np.complex128)
    for i in range(1, d + 1):
        S[i - 1, i - 1] = dcat_expval_sij(z, n_particles, i, i)
        for j in range(1, d + 1):
            for k in range(1, d + 1):
                for l in range(1, d + 1):
                    if _pairing_weight(i - 1, j - 1, k - 1, l - 1):
                        Q[i - 1, j - 1, k - 1, l - 1] = dcat_expval_sij_skl(
                            z, n_particles, i, j, k, l
                        )
    return S, Q


# ---------------------------------------------------------------------------
# NOON-type states


def nodon(basis: SymmetricBasis, phases=None) -> SymmetricState:
    """Equal superposition of single-level condensates, D**(-1/2) sum_j e^(i phi_j)|N e_j>."""
    d = basis.n_levels
    if phases is None:
        phases = np.zeros(d)
    phases = np.asarray(phases, dtype=np.float64).ravel()
    if phases.size != d:
        raise ValueError(f"need {d} phases, got {phases.size}")
    coeffs = np.zeros(basis.dim, dtype=np.complex128)
    occ = np.zeros(d, dtype=np.int64)
    for j0 in range(d):
        occ[:] = 0
        occ[j0] = basis.n_particles
        coeffs[basis.rank(occ)] = np.exp(1j * phases[j0]) / np.sqrt(d)
    return SymmetricState(basis, coeffs)


def nodon_expval_sij(n_particles: int, n_levels: int, i: int, j: int) -> complex:
    """<S_ij> = (N/D) delta_ij, phase-independent."""
    _check_levels(n_levels, i, j)
    return complex(n_particles / n_levels) if i == j else 0j


def nodon_expval_sij_skl(
    n_particles: int, n_levels: int, i: int, j: int, k: int, l: int
) -> complex:
    """<S_ij S_kl> = (N/D) delta_il (delta_jk + (N-1) delta_ik delta_ij), N >= 3.

    For N <= 2 a single S_ij can hop between two condensates and extra
    cross terms appear; callers must stay at N >= 3.
    """
    if n_particles < 3:
        raise ValueError("closed form requires n_particles >= 3")
    _check_levels(n_levels, i, j, k, l)
    if i != l:
        return 0j
    value = (j == k) + (n_particles - 1) * (i == k) * (i == j)
    return complex(n_particles * value / n_levels)


def nodon_expval_tables(n_particles: int, n_levels: int):
    """Closed-form (S, Q) moment tables for the NOON-type state."""
    d = n_levels
    S = np.zeros((d, d), dtype=np.complex128)
    Q = np.zeros((d, d, d, d), dtype=np.complex128)
    for i in range(1, d + 1):
        S[i - 1, i - 1] = nodon_expval_sij(n_particles, d, i, i)
        for j in range(1, d + 1):
            for k in range(1, d + 1):
                for l in range(1, d + 1):
                    Q[i - 1, j - 1, k - 1, l - 1] = nodon_expval_sij_skl(
                        n_particles, d, i, j, k, l
                    )
    return S, Q
