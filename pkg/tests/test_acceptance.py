"""Acceptance suite: ten go/no-go gates on the assembled package.

Each test prints one `[criterion NN] PASS/FAIL` line (visible under the
repo's default `-rP` report, or with `pytest -s`).  Tolerances are frozen
here and are not to be loosened to force a pass.

Two gates are honestly red at the pinned sizes and carry their measured
evidence in the failure message (see README, "Known numerical findings"):
criterion 5 at coupling 3.0 (finite-size energy gap ~1.31/N exceeds the
0.02 budget at N = 50) and criterion 8's upper squeezing minimum (sits at
coupling 1.85 at N = 50, far outside the +/-0.1 target window).
"""

import math
import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np
import pytest

from udspin.basis import SymmetricBasis, SymmetricState, apply_sij, expval_tables
from udspin.cli import main
from udspin.lmg import LmgParams, ground_state, thermo_curvature, thermo_energy
from udspin.rdm import (
    dcat_one_qudit_purity,
    dcat_two_qudit_purity,
    dscs_level_weights,
    entropies,
    one_qudit_rdm,
    one_qudit_rdm_from_tables,
    partial_trace_oracle,
    spectrum_entropies,
    two_qudit_rdm,
    two_qudit_rdm_from_tables,
)
from udspin.squeezing import su2_xi, xi_pair, xi_total
from udspin.states import (
    dcat,
    dcat_expval_tables,
    dcat_norm_squared,
    dscs,
    dscs_expval_tables,
    nodon,
    project_even,
)
from udspin.sweep import SweepConfig, run_sweep

SEED = 20260815


@contextmanager
def criterion(num: int, description: str):
    try:
        yield
    except BaseException:
        print(f"[criterion {num:02d}] FAIL — {description}")
        raise
    print(f"[criterion {num:02d}] PASS — {description}")


def random_state(basis: SymmetricBasis, rng) -> SymmetricState:
    c = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
    return SymmetricState(basis, c).normalized()


def random_even_state(basis: SymmetricBasis, rng) -> SymmetricState:
    c = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
    rest = basis.occupations[:, 1:]
    c[(rest % 2 != 0).any(axis=1)] = 0.0
    return SymmetricState(basis, c).normalized()


@pytest.fixture(scope="module")
def default_sweep():
    """Ground-state + variational sweep over the default 121-point grid.

    Shared by criteria 6-8; the single-threaded wall time feeds the
    runtime gate of criterion 6.
    """
    start = time.perf_counter()
    records = run_sweep(SweepConfig(n_particles=50, jobs=1))
    elapsed = time.perf_counter() - start
    by = {(record.source, record.lam): record for record in records}
    lams = sorted({record.lam for record in records})
    return by, lams, elapsed


def grid_point(lams, target: float) -> float:
    return min(lams, key=lambda lam: abs(lam - target))


def test_criterion_01_rdms_match_partial_trace_oracle():
    with criterion(1, "collective-EV RDMs match brute-force partial trace"):
        rng = np.random.default_rng(SEED)
        start = time.perf_counter()
        worst = 0.0
        for n_levels in (2, 3):
            for n in (3, 4, 5, 6):
                basis = SymmetricBasis(n, n_levels)
                for _ in range(25):
                    state = random_state(basis, rng)
                    S, Q = expval_tables(state)
                    rho1 = one_qudit_rdm_from_tables(S, n)
                    rho2 = two_qudit_rdm_from_tables(S, Q, n)
                    dev1 = abs(rho1 - partial_trace_oracle(state, 1)).max()
                    dev2 = abs(rho2 - partial_trace_oracle(state, 2)).max()
                    worst = max(worst, dev1, dev2)
        elapsed = time.perf_counter() - start
        assert worst <= 1e-10, f"worst entrywise deviation {worst:.3e}"
        assert elapsed < 30.0, f"oracle comparison took {elapsed:.1f} s"


def test_criterion_02_casimir_and_bloch_identities():
    with criterion(2, "quadratic Casimir and Bloch-vector identities"):
        rng = np.random.default_rng(SEED)
        start = time.perf_counter()
        sectors = [(3, 2), (5, 2), (8, 2), (4, 3), (6, 3), (7, 3)]
        bases = {pair: SymmetricBasis(*pair) for pair in sectors}
        for k in range(100):
            n, n_levels = sectors[k % len(sectors)]
            state = random_state(bases[(n, n_levels)], rng)
            _, Q = expval_tables(state)
            casimir = np.einsum("ijji->", Q).real
            assert abs(casimir - n * (n + n_levels - 1)) <= 1e-10, (n, n_levels, casimir)
        for n, n_levels in ((8, 2), (7, 3)):
            basis = bases[(n, n_levels)]
            for _ in range(5):
                z = rng.normal(size=n_levels) + 1j * rng.normal(size=n_levels)
                S, _ = expval_tables(dscs(basis, z))
                total = float((abs(S) ** 2).sum())
                assert abs(total - n * n) <= 1e-10, total
                S, _ = expval_tables(dcat(basis, z))
                assert float((abs(S) ** 2).sum()) < n * n
        elapsed = time.perf_counter() - start
        assert elapsed < 10.0, f"identity checks took {elapsed:.1f} s"


def test_criterion_03_closed_form_cross_checks():
    with criterion(3, "closed-form coherent/cat/balanced-superposition values"):
        n = 10
        z3 = (1.0, 0.6 - 0.3j, -0.4 + 0.2j)
        basis3 = SymmetricBasis(n, 3)

        S_closed, Q_closed = dscs_expval_tables(z3, n)
        S_state, Q_state = expval_tables(dscs(basis3, z3))
        assert abs(S_closed - S_state).max() <= 1e-9
        assert abs(Q_closed - Q_state).max() <= 1e-9

        for n_levels, z in (
            (2, (1.0, 0.45 - 0.2j)),
            (3, z3),
            (4, (1.0, 0.5, -0.3j, 0.25 + 0.1j)),
        ):
            basis = SymmetricBasis(n, n_levels)
            _, even_weight = project_even(dscs(basis, z))
            assert abs(dcat_norm_squared(z, n) - even_weight) <= 1e-9

        cat = dcat(basis3, z3)
        rho1, rho2 = one_qudit_rdm(cat), two_qudit_rdm(cat)
        assert abs(dcat_one_qudit_purity(z3, n) - np.trace(rho1 @ rho1).real) <= 1e-9
        assert abs(dcat_two_qudit_purity(z3, n) - np.trace(rho2 @ rho2).real) <= 1e-9

        for n_levels in (2, 3):
            basis = SymmetricBasis(n, n_levels)
            state = nodon(basis)
            rho1 = one_qudit_rdm(state)
            assert abs(rho1 - np.eye(n_levels) / n_levels).max() <= 1e-9
            linear2 = entropies(two_qudit_rdm(state), "two_atom", n, n_levels).linear
            assert abs(linear2 - n_levels / (n_levels + 1)) <= 1e-9
            assert abs(xi_total(state) - 1.0) <= 1e-9


def test_criterion_04_two_level_squeezing_reduction():
    with criterion(4, "two-level squeezing equals the SU(2) parameter"):
        rng = np.random.default_rng(SEED)
        n = 6
        basis = SymmetricBasis(n, 2)
        thetas = np.linspace(0.0, np.pi, 10_000, endpoint=False)
        cos2, sin2 = np.cos(thetas) ** 2, np.sin(thetas) ** 2
        cross = np.sin(thetas) * np.cos(thetas)
        for _ in range(25):
            state = random_even_state(basis, rng)
            value = su2_xi(state)
            assert abs(value - xi_pair(state, 2, 1)) <= 1e-10
            raising = apply_sij(state, 1, 2).coeffs
            lowering = apply_sij(state, 2, 1).coeffs
            jx = 0.5 * (raising + lowering)
            jy = 0.5j * (lowering - raising)
            xx = np.vdot(jx, jx).real
            yy = np.vdot(jy, jy).real
            xy = 2.0 * np.vdot(jx, jy).real
            variances = xx * cos2 + yy * sin2 + xy * cross
            assert abs(value - 4.0 / n * variances.min()) <= 1e-6


def test_criterion_05_phase_boundaries_and_finite_size_energy():
    with criterion(5, "phase-boundary analytics and N=50 ground energy"):
        exact = lambda lam: LmgParams(n_particles=3, lam=lam, epsilon=Fraction(1))
        lam_low, lam_high = Fraction(1, 2), Fraction(3, 2)
        # continuity: the implementation's value at each boundary equals
        # the exact rational limit of the adjacent branch
        assert thermo_energy(exact(lam_low)) == -1
        assert -((2 * lam_low + 1) ** 2) / (8 * lam_low) == -1
        assert thermo_energy(exact(lam_high)) == Fraction(-4, 3)
        assert -(4 * lam_high**2 + 3) / (6 * lam_high) == Fraction(-4, 3)
        # second derivative jumps at both boundaries (second-order transitions)
        assert thermo_curvature(exact(lam_low), phase="I") == 0
        assert thermo_curvature(exact(lam_low), phase="II") == -2
        assert thermo_curvature(exact(lam_high), phase="II") == Fraction(-2, 27)
        assert thermo_curvature(exact(lam_high), phase="III") == Fraction(-8, 27)

        diffs = {}
        for lam in (0.25, 1.0, 3.0):
            params = LmgParams(n_particles=50, lam=lam)
            diffs[lam] = ground_state(params).energy - thermo_energy(params)
        worst = max(abs(d) for d in diffs.values())
        assert worst <= 0.02, (
            "N=50 ground energy vs infinite-size limit: deviations "
            + ", ".join(f"{lam}: {d:+.5f}" for lam, d in diffs.items())
            + "; the gap at coupling 3.0 is the zero-point energy below the "
            "mean-field minimum that shrinks as ~1.31/N (measured 0.0281 at "
            "N=50, 0.0134 at N=100, 0.0066 at N=200), so the 0.02 budget "
            "needs N >~ 70 there; the diagonalization itself is verified "
            "against a dense full-space oracle to 13 digits"
        )


def test_criterion_06_level_entropy_sweep_profile(default_sweep):
    with criterion(6, "level-entropy sweep profile and runtime"):
        by, lams, elapsed = default_sweep
        assert elapsed < 120.0, f"default sweep took {elapsed:.1f} s single-threaded"
        for lam in lams:
            record = by[("variational", lam)]
            if lam <= 0.5:
                assert max(record.L_level_1, record.L_level_2, record.L_level_3) <= 1e-12
            elif lam <= 1.5:
                assert record.L_level_3 < 0.05
        top = by[("variational", grid_point(lams, 6.0))]
        asymptote = 1.0 - 2.0 / math.sqrt(math.pi * 50)
        for value in (top.L_level_1, top.L_level_2, top.L_level_3):
            assert abs(value - asymptote) <= 0.03, (value, asymptote)


def test_criterion_07_atom_entanglement_growth(default_sweep):
    with criterion(7, "atom-entanglement saturation and transition steepness"):
        by, lams, _ = default_sweep
        top = grid_point(lams, 6.0)
        for source in ("numerical", "variational"):
            record = by[(source, top)]
            assert record.L1_atom > 0.95, (source, record.L1_atom)
            assert abs(record.L2_atom - 5.0 / 6.0) <= 0.03, (source, record.L2_atom)
            rise_low = (
                by[(source, grid_point(lams, 0.6))].L1_atom
                - by[(source, grid_point(lams, 0.4))].L1_atom
            )
            rise_high = (
                by[(source, grid_point(lams, 1.6))].L1_atom
                - by[(source, grid_point(lams, 1.4))].L1_atom
            )
            assert rise_low > rise_high, (source, rise_low, rise_high)


def test_criterion_08_squeezing_landscape(default_sweep):
    with criterion(8, "squeezing below coherent level across the transitions"):
        by, lams, _ = default_sweep
        positive = [lam for lam in lams if lam > 0]
        xi = [by[("numerical", lam)].xi2_total for lam in positive]
        assert max(xi) < 1.0, f"ground-state squeezing max {max(xi):.4f}"

        # variational squeezing appears only near the two critical couplings
        for center in (0.5, 1.5):
            window = tuple(round(center - 0.15 + 0.01 * k, 10) for k in range(31))
            records = run_sweep(
                SweepConfig(
                    n_particles=50,
                    lambdas=window,
                    sources=("variational",),
                    observables=("squeezing_total",),
                )
            )
            dip = min(record.xi2_total for record in records)
            assert dip < 0.85, (center, dip)
        far = [
            by[("variational", lam)].xi2_total
            for lam in positive
            if abs(lam - 0.5) > 0.3 and abs(lam - 1.5) > 0.3
        ]
        assert min(far) > 0.95, min(far)

        minima = [
            positive[i]
            for i in range(1, len(positive) - 1)
            if xi[i] < xi[i - 1] and xi[i] < xi[i + 1]
        ]
        assert minima and min(abs(m - 0.5) for m in minima) <= 0.1 + 1e-9, minima
        assert min(abs(m - 1.5) for m in minima) <= 0.1 + 1e-9, (
            f"ground-state squeezing minima sit at {sorted(round(m, 4) for m in minima)} "
            "on the 0.05-spaced grid at N=50; the upper minimum is 0.35 above the "
            "upper critical coupling and drifts toward it slowly with size "
            "(1.85 at N=50, 1.70 at N=100), so no minimum falls inside the "
            "+/-0.1 window around 1.5 at this size"
        )


def test_criterion_09_large_size_asymptotics():
    with criterion(9, "large-N entropy asymptotics"):
        n = 100
        weights = dscs_level_weights(n, 1.0, 1.0)
        linear = spectrum_entropies(weights, "level", n, 3).linear
        assert abs(linear - (1.0 - 1.0 / math.sqrt(math.pi * n))) <= 2.0 / n

        S, Q = dcat_expval_tables((1.0, 1.0, 1.0), 200)
        rho2 = two_qudit_rdm_from_tables(S, Q, 200)
        von_neumann = entropies(rho2, "two_atom", 200, 3).von_neumann
        assert abs(von_neumann - 0.62) <= 0.01, von_neumann


def test_criterion_10_deterministic_sweep_files(tmp_path, capsys):
    with criterion(10, "byte-identical sweep files across runs and jobs"):
        base = [
            "sweep",
            "--n", "16",
            "--lambda-min", "0",
            "--lambda-max", "3",
            "--lambda-count", "21",
        ]
        paths = [tmp_path / name for name in ("first.csv", "second.csv", "parallel.csv")]
        assert main(base + ["--out", str(paths[0])]) == 0
        assert main(base + ["--out", str(paths[1])]) == 0
        assert main(base + ["--out", str(paths[2]), "--jobs", "2"]) == 0
        capsys.readouterr()  # drop the three "wrote ..." progress lines
        first = paths[0].read_bytes()
        assert paths[1].read_bytes() == first
        assert paths[2].read_bytes() == first
