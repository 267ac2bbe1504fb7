"""Three-level all-to-all interacting atom model and its phase diagram.

The Hamiltonian, in intensive normalization,

    H = (eps/N) (S_33 - S_11) - (lam/(N(N-1))) sum_{i != j} S_ij^2

couples every pair of atoms symmetrically, so it acts within the
symmetric sector and commutes with every level parity Pi_j.  The ground
state lies in the fully even sector (n_2, n_3 both even); diagonalization
restricts there by default, which also picks a deterministic
representative among the near-degenerate finite-N levels of the broken
phases.  The full-space path stays available for degeneracy studies.

Closed forms implemented alongside the numerics: the mean-field energy
surface over coherent states (1, alpha, beta), its stationary points,
and the thermodynamic ground energy, a piecewise function of the
coupling with second-order transitions at lam = eps/2 and 3 eps/2.
thermo_energy keeps pure-Python arithmetic so exact Fraction inputs
propagate through the branch formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .basis import SymmetricBasis, SymmetricState
from .errors import EmptySectorError, IntegrityError
from .states import dcat, parity_expval

__all__ = [
    "DENSE_EIG_LIMIT",
    "LmgParams",
    "GroundStateResult",
    "StationaryPoint",
    "build_hamiltonian",
    "parity_sector_indices",
    "even_sector_indices",
    "ground_state",
    "energy_surface",
    "stationary_point",
    "thermo_energy",
    "thermo_curvature",
    "variational_energy",
    "variational_cat",
]

# dense symmetric eigensolver up to here; Lanczos beyond
DENSE_EIG_LIMIT = 4000


@dataclass(frozen=True)
class LmgParams:
    """Model parameters; lam is the coupling in the same units as epsilon."""

    n_particles: int
    lam: float
    epsilon: float = 1.0
    n_levels: int = 3

    def __post_init__(self):
        if self.n_particles < 3:
            raise ValueError(f"need n_particles >= 3, got {self.n_particles}")
        if not self.epsilon > 0:
            raise ValueError(f"need epsilon > 0, got {self.epsilon!r}")
        if self.lam < 0:
            raise ValueError(f"need lam >= 0, got {self.lam!r}")
        if self.n_levels != 3:
            raise ValueError("closed forms and Hamiltonian require n_levels == 3")


@dataclass(frozen=True)
class StationaryPoint:
    """Real non-negative minimizer of the energy surface, with phase label."""

    alpha0: float
    beta0: float
    phase: str


@dataclass
class GroundStateResult:
    energy: float
    state: SymmetricState
    parity_signature: np.ndarray


def _assemble(basis: SymmetricBasis):
    """Diagonal splitting vector n_D - n_1 and the coupling matrix sum_{i!=j} S_ij^2."""
    occ = basis.occupations
    d = basis.n_levels
    diag = (occ[:, d - 1] - occ[:, 0]).astype(np.float64)
    rows, cols, vals = [], [], []
    lookup = basis._rank_of
    for i0 in range(d):
        for j0 in range(d):
            if i0 == j0:
                continue
            src = np.flatnonzero(occ[:, j0] >= 2)
            if src.size == 0:
                continue
            ni = occ[src, i0].astype(np.float64)
            nj = occ[src, j0].astype(np.float64)
            amp = np.sqrt((ni + 1.0) * (ni + 2.0) * nj * (nj - 1.0))
            shifted = occ[src].copy()
            shifted[:, i0] += 2
            shifted[:, j0] -= 2
            dst = np.fromiter(
                (lookup[tuple(map(int, row))] for row in shifted),
                dtype=np.int64,
                count=src.size,
            )
            rows.append(dst)
            cols.append(src)
            vals.append(amp)
    coupling = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(basis.dim, basis.dim),
    ).tocsr()
    return diag, coupling


@lru_cache(maxsize=16)
def _workspace(n_particles: int):
    basis = SymmetricBasis(n_particles, 3)
    diag, coupling = _assemble(basis)
    return basis, diag, coupling


def build_hamiltonian(basis: SymmetricBasis, params: LmgParams) -> sp.csr_matrix:
    """Sparse real symmetric H on the given basis (D = 3 only)."""
    if basis.n_levels != 3:
        raise ValueError("Hamiltonian requires a three-level basis")
    if basis.n_particles != params.n_particles:
        raise ValueError("basis and params disagree on n_particles")
    diag, coupling = _assemble(basis)
    n = params.n_particles
    kin = sp.diags(params.epsilon / n * diag)
    return (kin - params.lam / (n * (n - 1)) * coupling).tocsr()


def parity_sector_indices(basis: SymmetricBasis, parities) -> np.ndarray:
    """Basis ranks whose occupations of levels 2..D have the given parities."""
    parities = tuple(int(p) for p in parities)
    if len(parities) != basis.n_levels - 1 or any(p not in (0, 1) for p in parities):
        raise ValueError(f"need {basis.n_levels - 1} parities from {{0, 1}}")
    rest = basis.occupations[:, 1:] % 2
    mask = (rest == np.asarray(parities)).all(axis=1)
    return np.flatnonzero(mask)


def even_sector_indices(basis: SymmetricBasis) -> np.ndarray:
    return parity_sector_indices(basis, (0,) * (basis.n_levels - 1))


@lru_cache(maxsize=64)
def _sector_structure(n_particles: int, parities):
    basis, diag, coupling = _workspace(n_particles)
    idx = parity_sector_indices(basis, parities)
    if idx.size == 0:
        raise EmptySectorError(f"parity sector {parities} is empty")
    sub = coupling[idx][:, idx]
    return basis, idx, diag[idx], sub


def ground_state(params: LmgParams, sector="even") -> GroundStateResult:
    """Lowest eigenpair of H, restricted to a parity sector.

    sector: "even" (default, where the ground state lives), "full", or an
    explicit parity tuple over levels 2..D for degeneracy studies.
    """
    n = params.n_particles
    if sector == "full":
        basis, dsub, sub = _workspace(n)
        idx = np.arange(basis.dim)
    else:
        parities = (0, 0) if sector == "even" else tuple(int(p) for p in sector)
        basis, idx, dsub, sub = _sector_structure(n, parities)
    coef = params.lam / (n * (n - 1))
    scale = params.epsilon / n
    if idx.size <= DENSE_EIG_LIMIT:
        dense = -coef * sub.toarray()
        dense[np.diag_indices_from(dense)] += scale * dsub
        eigvals, eigvecs = np.linalg.eigh(dense)
        energy = float(eigvals[0])
        vec = eigvecs[:, 0]
    else:
        ham = sp.diags(scale * dsub) - coef * sub
        v0 = np.full(idx.size, 1.0 / math.sqrt(idx.size))
        try:
            eigvals, eigvecs = eigsh(ham, k=1, which="SA", v0=v0)
        except ArpackNoConvergence as exc:
            raise IntegrityError(f"eigensolver failed to converge: {exc}") from exc
        energy = float(eigvals[0])
        vec = eigvecs[:, 0]
    full = np.zeros(basis.dim, dtype=np.complex128)
    full[idx] = vec
    # deterministic sign: largest-magnitude coefficient made positive
    pivot = int(np.argmax(np.abs(full)))
    if full[pivot].real < 0:
        full = -full
    state = SymmetricState(basis, full)
    signature = np.array(
        [parity_expval(state, j) for j in range(1, basis.n_levels + 1)]
    )
    return GroundStateResult(energy=energy, state=state, parity_signature=signature)


def energy_surface(alpha, beta, params: LmgParams) -> float:
    """Mean-field energy over coherent states (1, alpha, beta), exact form."""
    a = complex(alpha)
    b = complex(beta)
    eps, lam = params.epsilon, params.lam
    s = (a * a.conjugate() + b * b.conjugate() + 1.0).real
    quad = (
        a * a * (b.conjugate() ** 2 + 1.0)
        + (b * b + 1.0) * a.conjugate() ** 2
        + b.conjugate() ** 2
        + b * b
    )
    return float(eps * ((b * b.conjugate()).real - 1.0) / s - lam * quad.real / s**2)


def stationary_point(params: LmgParams) -> StationaryPoint:
    """Piecewise closed-form minimizer; boundaries at lam = eps/2 and 3 eps/2."""
    eps, lam = params.epsilon, params.lam
    if lam <= eps / 2:
        return StationaryPoint(alpha0=0.0, beta0=0.0, phase="I")
    if lam <= 3 * eps / 2:
        alpha0 = math.sqrt((2 * lam - eps) / (2 * lam + eps))
        return StationaryPoint(alpha0=alpha0, beta0=0.0, phase="II")
    alpha0 = math.sqrt(2 * lam / (2 * lam + 3 * eps))
    beta0 = math.sqrt((2 * lam - 3 * eps) / (2 * lam + 3 * eps))
    return StationaryPoint(alpha0=alpha0, beta0=beta0, phase="III")


def thermo_energy(params: LmgParams):
    """Thermodynamic ground energy density, piecewise in the coupling.

    Pure scalar arithmetic: exact rational inputs (fractions.Fraction)
    come back exact.  lam = 0 takes the first branch, no division.
    """
    eps = params.epsilon
    lam = params.lam
    if lam <= eps / 2:
        return -eps
    if lam <= 3 * eps / 2:
        return -((2 * lam + eps) ** 2) / (8 * lam)
    return -(4 * lam**2 + 3 * eps**2) / (6 * lam)


def thermo_curvature(params: LmgParams, phase: str | None = None):
    """Analytic d^2 E_0 / d lam^2 of a branch (default: the branch at lam).

    Branch I is flat; II gives -eps^2/(4 lam^3); III gives -eps^2/lam^3.
    Evaluating adjacent branches at a boundary exposes the curvature
    jump of the second-order transitions.
    """
    eps = params.epsilon
    lam = params.lam
    if phase is None:
        phase = stationary_point(params).phase
    if phase == "I":
        return 0 * eps
    if phase == "II":
        return -(eps**2) / (4 * lam**3)
    if phase == "III":
        return -(eps**2) / lam**3
    raise ValueError(f"unknown phase {phase!r}")


def variational_energy(state: SymmetricState, params: LmgParams) -> float:
    """Rayleigh quotient <psi|H|psi> for a normalized three-level state."""
    basis = state.basis
    if basis.n_levels != 3 or basis.n_particles != params.n_particles:
        raise ValueError("state sector does not match params")
    _, diag, coupling = _workspace(params.n_particles)
    c = state.coeffs
    n = params.n_particles
    kin = params.epsilon / n * float(np.sum(diag * np.abs(c) ** 2))
    quad = float(np.vdot(c, coupling @ c).real)
    return kin - params.lam / (n * (n - 1)) * quad


def variational_cat(basis: SymmetricBasis, params: LmgParams) -> SymmetricState:
    """Even cat state at the mean-field minimizer: the variational ground state."""
    point = stationary_point(params)
    return dcat(basis, [1.0, point.alpha0, point.beta0])
