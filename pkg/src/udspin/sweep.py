"""Deterministic coupling sweeps and phase-space surface tables.

A sweep walks a grid of coupling values, obtains for each value the
numerical ground state (sector diagonalization) and/or the variational
even-cat state, and records energy, level and atom linear entropies,
and squeezing parameters -- one row per (coupling, source).  Output is
reproducible byte for byte: fixed column order, 12-significant-digit
floats, rows sorted by coupling with numerical before variational, and
a worker pool whose fan-out never changes the result.

A surface walks a real grid of state labels instead, tabulating one
observable per node for external contour plotting, together with a
sidecar table of the mean-field stationary curve.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace
from functools import lru_cache
from itertools import repeat

import numpy as np

from .basis import SymmetricBasis, expval_tables
from .errors import ConfigError, IntegrityError
from .lmg import (
    LmgParams,
    energy_surface,
    ground_state,
    stationary_point,
    variational_cat,
    variational_energy,
)
from .rdm import (
    dscs_level_weights,
    entropies,
    level_populations,
    one_qudit_rdm_from_tables,
    spectrum_entropies,
    two_qudit_rdm_from_tables,
)
from .squeezing import squeezing_report_from_tables
from .states import dcat, dscs

__all__ = [
    "SWEEP_SOURCES",
    "SWEEP_OBSERVABLES",
    "CSV_COLUMNS",
    "SweepConfig",
    "SweepRecord",
    "default_lambda_grid",
    "run_sweep",
    "render_records",
    "write_records",
    "validate_table",
    "SURFACE_KINDS",
    "SURFACE_COORDS",
    "SURFACE_OBSERVABLES",
    "SurfaceConfig",
    "surface_table",
    "stationary_table",
    "write_surface",
]

SWEEP_SOURCES = ("numerical", "variational")
SWEEP_OBSERVABLES = (
    "level_entropy_1",
    "level_entropy_2",
    "level_entropy_3",
    "one_atom",
    "two_atom",
    "squeezing_total",
    "squeezing_pairs",
    "energy",
)

#: Fixed sweep column order; the serialized name of the coupling is
#: "lambda" while the dataclass field is ``lam``.
CSV_COLUMNS = (
    "lambda",
    "source",
    "energy",
    "L_level_1",
    "L_level_2",
    "L_level_3",
    "L1_atom",
    "L2_atom",
    "xi2_total",
    "xi2_21",
    "xi2_31",
    "xi2_32",
    "alpha0",
    "beta0",
)

_ENTROPY_COLUMNS = frozenset(
    {"L_level_1", "L_level_2", "L_level_3", "L1_atom", "L2_atom"}
)
_SQUEEZING_COLUMNS = frozenset({"xi2_total", "xi2_21", "xi2_31", "xi2_32"})


def default_lambda_grid(epsilon: float = 1.0) -> tuple[float, ...]:
    """121 evenly spaced couplings on [0, 6*epsilon], criticals exact.

    The grid values nearest epsilon/2 and 3*epsilon/2 are snapped to
    those exact floats so both phase boundaries are always sampled.
    """
    grid = np.linspace(0.0, 6.0 * epsilon, 121)
    for exact in (0.5 * epsilon, 1.5 * epsilon):
        grid[int(np.argmin(np.abs(grid - exact)))] = exact
    return tuple(float(x) for x in grid)


def _canonical_subset(requested, universe, what: str) -> tuple[str, ...]:
    seen = set()
    for name in requested:
        if name not in universe:
            raise ConfigError(
                f"unknown {what} {name!r}; choose from {', '.join(universe)}"
            )
        seen.add(name)
    if not seen:
        raise ConfigError(f"at least one {what} is required")
    return tuple(name for name in universe if name in seen)


@dataclass(frozen=True)
class SweepConfig:
    """Validated inputs for one sweep run."""

    n_particles: int = 50
    epsilon: float = 1.0
    lambdas: tuple = ()
    sources: tuple = SWEEP_SOURCES
    observables: tuple = SWEEP_OBSERVABLES
    jobs: int = 1

    def validated(self) -> "SweepConfig":
        """Normalized copy; raises ConfigError on any bad field."""
        if self.n_particles < 3:
            raise ConfigError("n_particles must be at least 3")
        if not (math.isfinite(self.epsilon) and self.epsilon > 0):
            raise ConfigError("epsilon must be positive and finite")
        if not isinstance(self.jobs, int) or self.jobs < 1:
            raise ConfigError("jobs must be a positive integer")
        lams = tuple(float(x) for x in self.lambdas)
        if not lams:
            lams = default_lambda_grid(self.epsilon)
        for x in lams:
            if not math.isfinite(x) or x < 0:
                raise ConfigError(f"coupling values must be finite and >= 0, got {x!r}")
        if any(b <= a for a, b in zip(lams, lams[1:])):
            raise ConfigError("coupling grid must be strictly increasing")
        return replace(
            self,
            lambdas=lams,
            sources=_canonical_subset(self.sources, SWEEP_SOURCES, "source"),
            observables=_canonical_subset(
                self.observables, SWEEP_OBSERVABLES, "observable"
            ),
        )


@dataclass(frozen=True)
class SweepRecord:
    """One output row; unselected observables stay None."""

    lam: float
    source: str
    energy: float = None
    L_level_1: float = None
    L_level_2: float = None
    L_level_3: float = None
    L1_atom: float = None
    L2_atom: float = None
    xi2_total: float = None
    xi2_21: float = None
    xi2_31: float = None
    xi2_32: float = None
    alpha0: float = None
    beta0: float = None


_RECORD_FIELDS = tuple(f.name for f in fields(SweepRecord))
assert len(_RECORD_FIELDS) == len(CSV_COLUMNS)


@lru_cache(maxsize=4)
def _basis_for(n_particles: int) -> SymmetricBasis:
    return SymmetricBasis(n_particles, 3)


def _sweep_point(config: SweepConfig, lam: float) -> tuple:
    """All records for one coupling, sources in canonical order."""
    basis = _basis_for(config.n_particles)
    params = LmgParams(n_particles=config.n_particles, epsilon=config.epsilon, lam=lam)
    point = stationary_point(params)
    want = set(config.observables)
    need_tables = want & {"one_atom", "two_atom", "squeezing_total", "squeezing_pairs"}
    n, d = config.n_particles, 3
    records = []
    for source in config.sources:
        if source == "numerical":
            result = ground_state(params)
            state, energy = result.state, result.energy
        else:
            state = variational_cat(basis, params)
            energy = variational_energy(state, params)
        values = {"alpha0": point.alpha0, "beta0": point.beta0}
        if "energy" in want:
            values["energy"] = energy
        for i in (1, 2, 3):
            if f"level_entropy_{i}" in want:
                values[f"L_level_{i}"] = spectrum_entropies(
                    level_populations(state, i), "level", n, d
                ).linear
        if need_tables:
            S, Q = expval_tables(state)
            if "one_atom" in want:
                rho1 = one_qudit_rdm_from_tables(S, n)
                values["L1_atom"] = entropies(rho1, "one_atom", n, d).linear
            if "two_atom" in want:
                rho2 = two_qudit_rdm_from_tables(S, Q, n)
                values["L2_atom"] = entropies(rho2, "two_atom", n, d).linear
            if want & {"squeezing_total", "squeezing_pairs"}:
                report = squeezing_report_from_tables(Q, n)
                if "squeezing_total" in want:
                    values["xi2_total"] = report.total
                if "squeezing_pairs" in want:
                    values["xi2_21"] = report.pairwise[(2, 1)]
                    values["xi2_31"] = report.pairwise[(3, 1)]
                    values["xi2_32"] = report.pairwise[(3, 2)]
        records.append(SweepRecord(lam=lam, source=source, **values))
    return tuple(records)


def run_sweep(config: SweepConfig) -> list:
    """Compute all records, coupling ascending, numerical first.

    With jobs > 1 the couplings are dispatched to a process pool; the
    gathered rows are identical to a serial run because every point is
    computed independently and reassembled in grid order.
    """
    cfg = config.validated()
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            chunks = list(pool.map(_sweep_point, repeat(cfg), cfg.lambdas))
    else:
        chunks = [_sweep_point(cfg, lam) for lam in cfg.lambdas]
    records = [record for chunk in chunks for record in chunk]
    _check_records(records)
    return records


def _check_records(records) -> None:
    for record in records:
        for name, column in zip(_RECORD_FIELDS, CSV_COLUMNS):
            value = getattr(record, name)
            if value is None:
                continue
            if column in _ENTROPY_COLUMNS and not 0.0 <= value <= 1.0:
                raise IntegrityError(
                    f"{column} = {value!r} outside [0, 1] at lambda = {record.lam}"
                )
            if column in _SQUEEZING_COLUMNS and value < 0.0:
                raise IntegrityError(
                    f"{column} = {value!r} negative at lambda = {record.lam}"
                )


def _format_float(value) -> str:
    return "" if value is None else f"{value:.12g}"


def render_records(records, fmt: str = "csv") -> str:
    """Serialize records; floats carry 12 significant digits."""
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for record in records:
            writer.writerow(
                [
                    _format_float(record.lam),
                    record.source,
                    *(
                        _format_float(getattr(record, name))
                        for name in _RECORD_FIELDS[2:]
                    ),
                ]
            )
        return buffer.getvalue()
    if fmt == "json":
        rows = []
        for record in records:
            row = {"lambda": float(f"{record.lam:.12g}"), "source": record.source}
            for name, column in zip(_RECORD_FIELDS[2:], CSV_COLUMNS[2:]):
                value = getattr(record, name)
                row[column] = None if value is None else float(f"{value:.12g}")
            rows.append(row)
        return json.dumps(rows, indent=2) + "\n"
    raise ConfigError(f"unknown format {fmt!r}; choose csv or json")


def write_records(records, path, fmt: str = "csv") -> None:
    """Write the table, then re-read the file and validate its schema."""
    text = render_records(records, fmt)
    try:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from exc
    validate_table(path, fmt)


def _check_row_values(row: dict, where: str) -> None:
    for column in CSV_COLUMNS[2:]:
        raw = row.get(column)
        if raw is None or raw == "":
            continue
        value = float(raw)
        if column in _ENTROPY_COLUMNS and not 0.0 <= value <= 1.0:
            raise IntegrityError(f"{where}: {column} = {value} outside [0, 1]")
        if column in _SQUEEZING_COLUMNS and value < 0.0:
            raise IntegrityError(f"{where}: {column} = {value} negative")


def validate_table(path, fmt: str = "csv") -> int:
    """Post-write schema check of a sweep file; returns the row count."""
    with open(path, "r", encoding="utf-8", newline="") as handle:
        if fmt == "csv":
            reader = csv.DictReader(handle)
            if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
                raise IntegrityError(
                    f"{path}: header {reader.fieldnames!r} != {list(CSV_COLUMNS)!r}"
                )
            rows = list(reader)
        elif fmt == "json":
            rows = json.load(handle)
            for row in rows:
                if set(row) != set(CSV_COLUMNS):
                    raise IntegrityError(f"{path}: record keys {sorted(row)!r}")
        else:
            raise ConfigError(f"unknown format {fmt!r}; choose csv or json")
    for index, row in enumerate(rows):
        if row["source"] not in SWEEP_SOURCES:
            raise IntegrityError(f"{path}: row {index}: bad source {row['source']!r}")
        _check_row_values(row, f"{path}: row {index}")
    return len(rows)


# --------------------------------------------------------------------------
# Phase-space surfaces


SURFACE_KINDS = ("dscs", "dcat")
SURFACE_COORDS = ("alpha_beta", "xy")
SURFACE_OBSERVABLES = (
    "level_entropy_1",
    "level_entropy_2",
    "level_entropy_3",
    "one_atom",
    "two_atom",
    "squeezing_total",
    "energy",
)


@dataclass(frozen=True)
class SurfaceConfig:
    """Real grid of state labels and the observable to tabulate.

    With coords="alpha_beta" the node (a, b) labels the three-level
    state family (1, a, b); with coords="xy" the node is the pair
    (chosen-level weight, remaining weight), for which the level
    entropy of a coherent state depends only on x/(x+y) -- available
    for kind="dscs" and level observables only.  The "energy"
    observable is the mean-field surface (state-size independent).
    """

    n_particles: int = 10
    epsilon: float = 1.0
    lam: float = 1.0
    kind: str = "dcat"
    coords: str = "alpha_beta"
    observable: str = "level_entropy_1"
    a_min: float = 0.0
    a_max: float = 2.0
    a_count: int = 41
    b_min: float = 0.0
    b_max: float = 2.0
    b_count: int = 41

    def validated(self) -> "SurfaceConfig":
        if self.n_particles < 3:
            raise ConfigError("n_particles must be at least 3")
        if not (math.isfinite(self.epsilon) and self.epsilon > 0):
            raise ConfigError("epsilon must be positive and finite")
        if self.kind not in SURFACE_KINDS:
            raise ConfigError(f"unknown state kind {self.kind!r}")
        if self.coords not in SURFACE_COORDS:
            raise ConfigError(f"unknown coordinates {self.coords!r}")
        if self.observable not in SURFACE_OBSERVABLES:
            raise ConfigError(f"unknown observable {self.observable!r}")
        for lo, hi, count, axis in (
            (self.a_min, self.a_max, self.a_count, "a"),
            (self.b_min, self.b_max, self.b_count, "b"),
        ):
            if count < 2:
                raise ConfigError(f"{axis}_count must be at least 2")
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise ConfigError(f"need finite {axis}_min < {axis}_max")
        if self.coords == "xy":
            if self.kind != "dscs" or not self.observable.startswith("level_entropy"):
                raise ConfigError(
                    "xy coordinates apply to dscs level entropies only"
                )
            if self.a_min < 0 or self.b_min < 0:
                raise ConfigError("xy coordinates must be non-negative")
        return self


def _surface_value(config: SurfaceConfig, a: float, b: float) -> float:
    n = config.n_particles
    if config.coords == "xy":
        if a + b == 0.0:
            return 0.0
        weights = dscs_level_weights(n, a, b)
        return spectrum_entropies(weights, "level", n, 3).linear
    if config.observable == "energy":
        params = LmgParams(n_particles=n, epsilon=config.epsilon, lam=config.lam)
        return energy_surface(a, b, params)
    basis = _basis_for(n)
    z = (1.0, a, b)
    state = dscs(basis, z) if config.kind == "dscs" else dcat(basis, z)
    if config.observable.startswith("level_entropy"):
        level = int(config.observable[-1])
        return spectrum_entropies(level_populations(state, level), "level", n, 3).linear
    S, Q = expval_tables(state)
    if config.observable == "one_atom":
        return entropies(one_qudit_rdm_from_tables(S, n), "one_atom", n, 3).linear
    if config.observable == "two_atom":
        return entropies(two_qudit_rdm_from_tables(S, Q, n), "two_atom", n, 3).linear
    return squeezing_report_from_tables(Q, n).total


def surface_table(config: SurfaceConfig) -> list:
    """Rows (a, b, value) in row-major grid order."""
    cfg = config.validated()
    a_grid = np.linspace(cfg.a_min, cfg.a_max, cfg.a_count)
    b_grid = np.linspace(cfg.b_min, cfg.b_max, cfg.b_count)
    return [
        (float(a), float(b), _surface_value(cfg, float(a), float(b)))
        for a in a_grid
        for b in b_grid
    ]


def stationary_table(epsilon: float = 1.0, lambdas=None) -> list:
    """Rows (lambda, alpha0, beta0) of the mean-field minimizer curve."""
    if lambdas is None:
        lambdas = default_lambda_grid(epsilon)
    rows = []
    for lam in lambdas:
        point = stationary_point(LmgParams(n_particles=3, epsilon=epsilon, lam=lam))
        rows.append((float(lam), point.alpha0, point.beta0))
    return rows


def _render_rows(header, rows, fmt: str) -> str:
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format_float(v) for v in row])
        return buffer.getvalue()
    rounded = [
        {key: float(f"{v:.12g}") for key, v in zip(header, row)} for row in rows
    ]
    return json.dumps(rounded, indent=2) + "\n"


def write_surface(config: SurfaceConfig, path, fmt: str = "csv") -> str:
    """Write the surface table plus a stationary-curve sidecar.

    Returns the sidecar path.  The observable column is validated
    post-write: entropies must lie in [0, 1] and squeezing must be
    non-negative (the energy surface is unconstrained).
    """
    cfg = config.validated()
    if fmt not in ("csv", "json"):
        raise ConfigError(f"unknown format {fmt!r}; choose csv or json")
    header = ("x", "y", "value") if cfg.coords == "xy" else ("alpha", "beta", "value")
    rows = surface_table(cfg)
    sidecar = f"{path}.stationary.{fmt}"
    try:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(_render_rows(header, rows, fmt))
        with open(sidecar, "w", encoding="utf-8", newline="") as handle:
            handle.write(
                _render_rows(
                    ("lambda", "alpha0", "beta0"),
                    stationary_table(cfg.epsilon),
                    fmt,
                )
            )
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from exc
    for _, _, value in rows:
        if cfg.observable == "energy":
            continue
        if cfg.observable == "squeezing_total":
            if value < 0.0:
                raise IntegrityError(f"{path}: squeezing value {value} negative")
        elif not 0.0 <= value <= 1.0:
            raise IntegrityError(f"{path}: entropy value {value} outside [0, 1]")
    return sidecar
