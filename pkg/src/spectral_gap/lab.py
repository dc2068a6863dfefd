"""Experiment drivers: gap sweeps over the box size L with verdicts for each
potential class, the separable one-dimensional oracle for the strip, the
three-dimensional bound check, radial convergence tables and persistence.

All sweeps work with the scaled operator on the unit box; eigenvalues with a
tilde (``lambda0``, ``lambda1``, ``gap``) are those of the scaled operator,
``physical_gap = gap / L^2``.
"""
from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal

from . import model as md
from . import radial as rd
from . import specialfn as sf
from .eigen import DEFAULT_SEED, DEFAULT_TOL, smallest_eigenpairs

SCHEMA_VERSION = 1
CSV_COLUMNS = ("L", "lambda0", "lambda1", "gap", "physical_gap", "grid_n", "extrapolated")
PI2 = math.pi**2
ALPHA_TEST = 1.0
BETA_TEST = 5 * PI2


class SchemaError(ValueError):
    pass


@dataclass(frozen=True)
class GapSweepRecord:
    L: float
    lambda0: float
    lambda1: float
    gap: float
    physical_gap: float
    grid_n: int
    extrapolated: bool
    converged: bool = True


@dataclass(frozen=True)
class Verdict:
    name: str
    passed: bool | None  # None when a solve did not converge
    margin: float
    detail: str = ""


@dataclass
class SweepReport:
    potential: md.PotentialSpec
    records: list[GapSweepRecord]
    verdicts: list[Verdict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(v.passed is True for v in self.verdicts)


# ---------------------------------------------------------------------------
# solving one box
# ---------------------------------------------------------------------------

def _prolong_1d(v: np.ndarray, axis: int) -> np.ndarray:
    """Linear interpolation from n to 2n+1 interior nodes along one axis."""
    v = np.moveaxis(v, axis, 0)
    n = v.shape[0]
    out = np.zeros((2 * n + 1,) + v.shape[1:])
    out[1::2] = v
    padded = np.concatenate([np.zeros((1,) + v.shape[1:]), v, np.zeros((1,) + v.shape[1:])])
    out[0::2] = 0.5 * (padded[:-1] + padded[1:])
    return np.moveaxis(out, 0, axis)


def prolong(vectors: np.ndarray, grid_n: int, dim: int) -> np.ndarray:
    """Interpolate columns living on grid_n^dim nodes to (2 grid_n + 1)^dim nodes."""
    cols = []
    for j in range(vectors.shape[1]):
        v = vectors[:, j].reshape((grid_n,) * dim)
        for a in range(dim):
            v = _prolong_1d(v, a)
        cols.append(v.ravel())
    return np.column_stack(cols)


def solve_box(problem: md.BoxProblem, k: int = 3, tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED,
              start: np.ndarray | None = None, want_vectors: bool = False):
    return smallest_eigenpairs(md.assemble(problem), k, tol, seed, start=start, want_vectors=want_vectors)


def gap_record(potential: md.PotentialSpec, L: float, grid_n: int, richardson: bool = True,
               k: int = 3, tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED) -> GapSweepRecord:
    """lambda0, lambda1 of the scaled operator, optionally extrapolated over h and h/2."""
    coarse = solve_box(md.BoxProblem(L, potential, grid_n), k, tol, seed, want_vectors=richardson)
    lam = np.array(coarse.eigenvalues)
    ok = coarse.converged
    if richardson:
        start = prolong(coarse.vectors, grid_n, potential.dim)
        fine = solve_box(md.BoxProblem(L, potential, 2 * grid_n + 1), k, tol, seed, start=start)
        lam = (4 * np.array(fine.eigenvalues) - lam) / 3
        ok = ok and fine.converged
    l0, l1 = float(lam[0]), float(lam[1])
    gap = l1 - l0
    return GapSweepRecord(float(L), l0, l1, gap, gap / L**2, grid_n, richardson, ok)


# ---------------------------------------------------------------------------
# verdicts
# ---------------------------------------------------------------------------

def _state(ok: bool, cond: bool) -> bool | None:
    return bool(cond) if ok else None


def _boundedness(records, alpha, beta) -> list[Verdict]:
    ok = all(r.converged for r in records)
    tail = records[len(records) // 2:]
    gaps = [r.gap for r in tail]
    margin = min(min(g - alpha for g in gaps), min(beta - g for g in gaps))
    out = [Verdict("gap_bounded_window", _state(ok, margin > 0), margin,
                   f"gap in [{alpha:.6g}, {beta:.6g}] over the last half of the sweep")]
    a, b = records[-2], records[-1]
    change = abs(b.gap - a.gap) / abs(a.gap)
    out.append(Verdict("gap_settles_final_doubling", _state(ok, change <= 0.05), 0.05 - change,
                       f"relative change {change:.4g} between L={a.L:g} and L={b.L:g}"))
    return out


def _strip_verdicts(records) -> list[Verdict]:
    ok = all(r.converged for r in records)
    gaps = [r.gap for r in records]
    steps = [b - a for a, b in zip(gaps, gaps[1:])]
    out = [Verdict("gap_strictly_decreasing", _state(ok, all(s < 0 for s in steps)), -max(steps),
                   "scaled gap decreases along the sweep")]
    ratio = gaps[-1] / gaps[0]
    out.append(Verdict("gap_reduction_half", _state(ok, ratio <= 0.5), 0.5 - ratio,
                       f"gap(L_max)/gap(L_min) = {ratio:.4g}"))
    lam0 = [r.lambda0 for r in records]
    d0 = [b - a for a, b in zip(lam0, lam0[1:])]
    out.append(Verdict("ground_nondecreasing", _state(ok, all(s >= -1e-9 * b for s, b in zip(d0, lam0[1:]))),
                       min(d0), "lambda0 grows with the strip mass"))
    big = [r for r in records if r.L >= 100]
    if big:
        m = min(5 * PI2 + 1 - r.lambda1 for r in big)
        out.append(Verdict("first_excited_limsup", _state(ok, m >= 0), m, "lambda1 <= 5 pi^2 + 1 for L >= 100"))
    return out


def quadratic_lower_bound(c: float, factor: float = 0.5) -> float:
    """factor * (2 min(j_{sqrt(1+c),1}, j_{sqrt c,2})^2 - 4 j_{sqrt c,1}^2)."""
    m = min(sf.bessel_zero(math.sqrt(1 + c), 1), sf.bessel_zero(math.sqrt(c), 2))
    return factor * (2 * m * m - 4 * sf.bessel_zero(math.sqrt(c), 1) ** 2)


def verdicts_for(potential: md.PotentialSpec, records: Sequence[GapSweepRecord], *,
                 alpha: float = ALPHA_TEST, beta: float = BETA_TEST, lower_factor: float = 0.5) -> list[Verdict]:
    ok = all(r.converged for r in records)
    if isinstance(potential, md.Zero):
        m = min(0.01 - abs(r.gap / (3 * PI2) - 1) for r in records)
        return [Verdict("free_gap_3pi2", _state(ok, m >= 0), m, "gap = 3 pi^2 within 1%")]
    if isinstance(potential, md.OneSidedStrip):
        return _strip_verdicts(records)
    out = _boundedness(records, alpha, beta)
    if isinstance(potential, md.FastDecay):
        m = 5 * PI2 - records[-1].lambda0
        out.append(Verdict("ground_below_5pi2", _state(ok, m > 0), m, "lambda0(L_max) < 5 pi^2"))
    if isinstance(potential, md.RegularizedQuadratic):
        low = quadratic_lower_bound(potential.c, lower_factor)
        m = min(r.gap - low for r in records)
        held = rd.gap_condition_holds(potential.c, 1 / math.sqrt(2))
        out.append(Verdict("quadratic_lower_bound", _state(ok, m >= 0), m,
                           f"gap >= {low:.6g} (condition holds: {held})"))
    return out


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

def _record_task(args):
    return gap_record(*args)


def sweep_gap(potential: md.PotentialSpec, Ls: Sequence[float], grid_n: int, richardson: bool = True, *,
              k: int = 3, tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED, workers: int = 1,
              alpha: float = ALPHA_TEST, beta: float = BETA_TEST, lower_factor: float = 0.5) -> SweepReport:
    Ls = [float(L) for L in Ls]
    if len(Ls) < 2:
        raise ValueError("a sweep needs at least two values of L")
    if any(b <= a for a, b in zip(Ls, Ls[1:])):
        raise ValueError("Ls must be strictly ascending")
    # cell averaging keeps the strip's mass exact even when it is thinner than a cell,
    # so no L / grid_n guard is needed
    tasks = [(potential, L, grid_n, richardson, k, tol, seed) for L in Ls]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_record_task, tasks))
    else:
        records = [_record_task(t) for t in tasks]
    records.sort(key=lambda r: r.L)
    verdicts = verdicts_for(potential, records, alpha=alpha, beta=beta, lower_factor=lower_factor)
    return SweepReport(potential, records, verdicts)


def scaling_identity(potential: md.PotentialSpec, L: float, grid_n: int, k: int = 2) -> tuple[float, float]:
    """(L^2 * physical gap, scaled gap) from the two independent assemblies."""
    scaled = md.BoxProblem(L, potential, grid_n, md.Frame.SCALED)
    phys = md.scale_transform(scaled)
    a = smallest_eigenpairs(md.assemble(scaled), k)
    b = smallest_eigenpairs(md.assemble(phys), k)
    return (b.eigenvalues[1] - b.eigenvalues[0]) * L**2, a.eigenvalues[1] - a.eigenvalues[0]


# ---------------------------------------------------------------------------
# one-dimensional oracle for the strip
# ---------------------------------------------------------------------------

def strip_modes_1d(potential, L: float, n_1d: int, count: int = 2):
    """Lowest eigenpairs of -d^2/dx^2 + L^2 v(L x) on (-1/2, 1/2), Dirichlet,
    with the same cell-averaged potential as the planar assembly.
    Returns (eigenvalues, eigenvectors, nodes)."""
    h = 1.0 / (n_1d + 1)
    x = -0.5 + h * np.arange(1, n_1d + 1)
    pot = np.zeros(n_1d)
    if isinstance(potential, md.OneSidedStrip):
        e = md.cell_edges(n_1d)
        w = potential.delta / L
        overlap = np.clip(np.minimum(e[1:], w) - np.maximum(e[:-1], -w), 0.0, None)
        pot = L * L * potential.gamma * overlap / np.diff(e)
    elif not isinstance(potential, md.Zero):
        raise TypeError("the separable oracle covers the strip (and the free case) only")
    diag = 2.0 / h**2 + pot
    off = np.full(n_1d - 1, -1.0 / h**2)
    vals, vecs = eigh_tridiagonal(diag, off, select="i", select_range=(0, count - 1))
    return vals, vecs, x


def separable_gap_oracle(potential, L: float, n_1d: int = 10_000) -> tuple[float, float]:
    """(lambda0, lambda1) of the scaled strip operator by separation of variables.

    The y-direction contributes the free Dirichlet values pi^2, 4 pi^2, so
    lambda0 = e0 + pi^2 and lambda1 = min(e1 + pi^2, e0 + 4 pi^2).
    """
    if n_1d < 1000:
        raise ValueError("n_1d must be >= 1000")
    e, _, _ = strip_modes_1d(potential, L, n_1d)
    return float(e[0] + PI2), float(min(e[1] + PI2, e[0] + 4 * PI2))


# ---------------------------------------------------------------------------
# d = 3
# ---------------------------------------------------------------------------

@dataclass
class HigherDimReport:
    potential: md.PotentialSpec
    rows: list[dict]
    verdicts: list[Verdict]


def higher_dim_check(potential: md.PotentialSpec, Ls, grid_n: int, *, slack: float = 0.01,
                     tol: float = DEFAULT_TOL, seed: int = DEFAULT_SEED) -> HigherDimReport:
    """Checks, in three dimensions:
    (a) lambda0(L) <= 3 pi^2/L^2 + 8 ||v||_1 / L^3 (+ relative slack),
    (b) lambda1(L) >= 6 pi^2/L^2 (- relative slack),
    (c) L^2 * gap within 5% of 3 pi^2 at the largest L."""
    if potential.dim != 3:
        raise ValueError("higher_dim_check needs a three-dimensional potential")
    if grid_n > 96:
        raise ValueError("grid_n must be <= 96")
    Ls = sorted(float(L) for L in np.atleast_1d(Ls))
    d = 3
    mass = md.l1_norm(potential)
    rows, verdicts = [], []
    ok = True
    for L in Ls:
        res = solve_box(md.BoxProblem(L, potential, grid_n), k=2, tol=tol, seed=seed)
        ok = ok and res.converged
        l0, l1 = res.eigenvalues[0] / L**2, res.eigenvalues[1] / L**2
        bound = d * PI2 / L**2 + 2**d * mass / L**d
        lower = (d + 3) * PI2 / L**2
        rows.append({"L": L, "lambda0": l0, "lambda1": l1, "bound0": bound, "lower1": lower,
                     "scaled_gap": (l1 - l0) * L**2})
        ma = bound * (1 + slack) - l0
        verdicts.append(Verdict(f"ground_bound_L{L:g}", _state(res.converged, ma >= 0), ma * L**2,
                                "lambda0 <= d pi^2/L^2 + 2^d ||v||_1/L^d"))
        mb = l1 - lower * (1 - slack)
        verdicts.append(Verdict(f"first_excited_floor_L{L:g}", _state(res.converged, mb >= 0), mb * L**2,
                                "lambda1 >= (d+3) pi^2/L^2"))
    last = rows[-1]["scaled_gap"]
    mc = 0.05 - abs(last / (3 * PI2) - 1)
    verdicts.append(Verdict("scaled_gap_near_3pi2", _state(ok, mc >= 0), mc,
                            f"L^2 gap = {last:.6g} at L = {Ls[-1]:g}"))
    return HigherDimReport(potential, rows, verdicts)


# ---------------------------------------------------------------------------
# radial tables
# ---------------------------------------------------------------------------

def radial_convergence_study(c: float, rho: float, Ls: Sequence[float]) -> list[dict]:
    """nu_0, nu_1 (with multiplicity) for each L against the limit values."""
    limit = rd.limit_spectrum(c, rho, 2).counted()
    rows = []
    for L in Ls:
        p = rd.RadialProblem(0, c, rho, float(L))
        nu = rd.counted_eigenvalues(p, 2)
        rows.append({"L": float(L), "nu0": nu[0], "nu1": nu[1], "limit0": limit[0], "limit1": limit[1],
                     "err0": abs(nu[0] - limit[0]), "err1": abs(nu[1] - limit[1])})
    return rows


def quadratic_chain(c: float) -> dict:
    """The limit chain nu_1(inf, 1/sqrt2, c) - nu_0(inf, 1/2, c) and its closed form."""
    nu1 = rd.limit_spectrum(c, 1 / math.sqrt(2), 2).counted()[1]
    nu0 = rd.limit_spectrum(c, 0.5, 1).counted()[0]
    m = min(sf.bessel_zero(math.sqrt(1 + c), 1), sf.bessel_zero(math.sqrt(c), 2))
    closed = 2 * m * m - 4 * sf.bessel_zero(math.sqrt(c), 1) ** 2
    return {"c": c, "nu1_outer": nu1, "nu0_inner": nu0, "difference": nu1 - nu0, "closed_form": closed}


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------

def _record_row(r: GapSweepRecord) -> dict:
    return {k: getattr(r, k) for k in CSV_COLUMNS}


def report_to_json(report: SweepReport) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "potential": report.potential.to_dict(),
        "records": [dict(_record_row(r), converged=r.converged) for r in report.records],
        "verdicts": [{"name": v.name, "pass": v.passed, "margin": v.margin, "detail": v.detail}
                     for v in report.verdicts],
    }


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    return f"{x:.12g}"


def persist_report(report: SweepReport, path) -> tuple[Path, Path]:
    """Write ``path`` (JSON) and the same stem with ``.csv``."""
    path = Path(path)
    json_path = path if path.suffix == ".json" else path.with_suffix(".json")
    csv_path = json_path.with_suffix(".csv")
    json_path.parent.mkdir(parents=True, exist_ok=True)
    json_path.write_text(json.dumps(report_to_json(report), indent=2) + "\n")
    with open(csv_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in report.records:
            w.writerow([_fmt(v) for v in _record_row(r).values()])
    return json_path, csv_path


def load_report(path) -> SweepReport:
    data = json.loads(Path(path).read_text())
    if data.get("schema") != SCHEMA_VERSION:
        raise SchemaError(f"unsupported report schema {data.get('schema')!r}, expected {SCHEMA_VERSION}")
    potential = md.PotentialSpec.from_dict(data["potential"])
    records = [GapSweepRecord(**r) for r in data["records"]]
    verdicts = [Verdict(v["name"], v["pass"], v["margin"], v.get("detail", "")) for v in data["verdicts"]]
    return SweepReport(potential, records, verdicts)
