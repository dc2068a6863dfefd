"""Exact radial spectra: the regularised inverse-square operator on a disc,
the Dirichlet annulus, the limit set of zeros, and the gap condition that
decides which strengths ``c`` admit a quadratic lower bound on the gap.

The operator on the disc of radius ``rho`` is

    -Laplace + c * 1{|x| >= 1/L} / |x|**2      (Dirichlet at |x| = rho).

In angular sector ``n`` the radial solution is ``J_n`` inside the
regularisation radius and ``a J_nu + b Y_nu`` outside, ``nu = sqrt(n^2 + c)``.
Eigenvalues are the zeros of the secular function built from the matching
coefficients (see :func:`secular_value`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from . import specialfn as sf

MAX_COUNT = 64
GRID_PER_UNIT = 400  # scan points per unit of sqrt(lambda)
LAMBDA_TOL = 1e-9
RESCALE_THRESHOLD = 1e200
C_SCAN_LIMIT = 1e6


@dataclass(frozen=True)
class RadialProblem:
    n: int
    c: float
    rho: float
    L: float = math.inf

    def __post_init__(self):
        if self.n < 0 or int(self.n) != self.n:
            raise ValueError("angular mode n must be a nonnegative integer")
        if not self.c >= 0.0:
            raise ValueError("c must be >= 0")
        if not self.rho > 0.0:
            raise ValueError("rho must be > 0")
        if not self.L > 0.0:
            raise ValueError("L must be > 0 (or inf)")

    @property
    def nu(self) -> float:
        return math.sqrt(self.n * self.n + self.c)

    def with_n(self, n: int) -> "RadialProblem":
        return RadialProblem(n, self.c, self.rho, self.L)


@dataclass(frozen=True)
class RadialEigenvalue:
    lam: float
    n: int
    k_radial: int
    multiplicity: int


@dataclass(frozen=True)
class LimitSpectrum:
    c: float
    rho: float
    values: tuple[RadialEigenvalue, ...]

    def counted(self) -> list[float]:
        """Eigenvalues enumerated with multiplicity (nu_0, nu_1, ...)."""
        return expand_multiplicity(self.values)


def expand_multiplicity(levels: Sequence[RadialEigenvalue]) -> list[float]:
    out = []
    for lev in levels:
        out.extend([lev.lam] * lev.multiplicity)
    return out


# ---------------------------------------------------------------------------
# secular function
# ---------------------------------------------------------------------------

def secular_coefficients(p: RadialProblem, lam):
    """Matching coefficients ``(a, b)`` at ``s = sqrt(lam)/L``, up to the
    common nonzero factor ``pi s / 2``."""
    if math.isinf(p.L):
        raise ValueError("secular coefficients need a finite L")
    lam = np.asarray(lam, dtype=float)
    s = np.sqrt(lam) / p.L
    jn, jnp_, _, _ = _jy_at(p.n, s, need_y=False)
    jv, jvp, yv, yvp = _jy_at(p.nu, s, need_y=True)
    with np.errstate(over="ignore", invalid="ignore"):
        a = yvp * jn - yv * jnp_
        b = jv * jnp_ - jvp * jn
    return a, b


def _jy_at(order: float, x: np.ndarray, need_y: bool):
    flat = np.atleast_1d(x).ravel()
    ja, jb = sf._j_pair(order, flat, sf.SERIES_CROSSOVER)
    jp = (order / flat) * ja - jb
    if not need_y:
        return ja.reshape(x.shape), jp.reshape(x.shape), None, None
    ya, yb = sf._y_pair(order, flat, sf.SERIES_CROSSOVER)
    with np.errstate(over="ignore", invalid="ignore"):
        yp = (order / flat) * ya - yb
    return ja.reshape(x.shape), jp.reshape(x.shape), ya.reshape(x.shape), yp.reshape(x.shape)


def secular_value(p: RadialProblem, lam, *, rescale_threshold: float = RESCALE_THRESHOLD):
    """F_n(lambda); its zeros in lambda are the sector-n eigenvalues.

    F = [Y'_nu(s) J_n(s) - Y_nu(s) J'_n(s)] J_nu(sqrt(lam) rho)
        + [J_nu(s) J'_n(s) - J'_nu(s) J_n(s)] Y_nu(sqrt(lam) rho)

    with s = sqrt(lam)/L. Where |Y_nu(s)| exceeds ``rescale_threshold`` both
    coefficients are divided by |Y_nu(s)|; the second one is then below
    binary64 resolution and is dropped.
    """
    if math.isinf(p.L):
        raise ValueError("secular function needs a finite L; use limit_spectrum for L = inf")
    lam_a = np.asarray(lam, dtype=float)
    flat = np.atleast_1d(lam_a).ravel()
    if np.any(~(flat > 0.0)):
        raise ValueError("lambda must be > 0")
    if 1.0 / p.L >= p.rho:
        raise ValueError("regularisation radius 1/L must lie inside the disc (1/L < rho)")
    root = np.sqrt(flat)
    s = root / p.L
    r_out = root * p.rho
    nu = p.nu

    jn, jnp_, _, _ = _jy_at(p.n, s, need_y=False)
    jv, jvp, yv, yvp = _jy_at(nu, s, need_y=True)
    jr, _, yr, _ = _jy_at(nu, r_out, need_y=True)

    with np.errstate(over="ignore", invalid="ignore"):
        a = yvp * jn - yv * jnp_
        b = jv * jnp_ - jvp * jn
        out = a * jr + b * yr
    big = ~np.isfinite(yv) | ~np.isfinite(yvp) | (np.abs(yv) > rescale_threshold)
    if np.any(big):
        sb = s[big]
        # Y'/Y = nu/s - Y_{nu+1}/Y_nu, and Y_nu(s) < 0 for small s
        dlog = nu / sb - sf._y_ratio(nu, sb)
        sign = -1.0
        out[big] = sign * (dlog * jn[big] - jnp_[big]) * jr[big]
    return float(out[0]) if lam_a.ndim == 0 else out.reshape(lam_a.shape)


# ---------------------------------------------------------------------------
# root isolation
# ---------------------------------------------------------------------------

def _bisect_lambda(fun, lo: np.ndarray, hi: np.ndarray, f_lo: np.ndarray, tol: float) -> np.ndarray:
    """Vectorised bisection of sign-change brackets [lo, hi] in lambda."""
    lo = lo.copy()
    hi = hi.copy()
    f_lo = f_lo.copy()
    # bisect past ``tol`` down to a few ulps; the extra steps are cheap
    goal = np.maximum(tol * 1e-5, 8 * np.finfo(float).eps * hi)
    for _ in range(200):
        if np.all(hi - lo <= goal):
            break
        mid = 0.5 * (lo + hi)
        f_mid = fun(mid)
        left = (f_mid > 0) == (f_lo > 0)
        lo = np.where(left, mid, lo)
        f_lo = np.where(left, f_mid, f_lo)
        hi = np.where(left, hi, mid)
    return 0.5 * (lo + hi)


def _near_touches(vals: np.ndarray) -> np.ndarray:
    """Interior grid points where |f| dips towards zero without a sign change,
    the signature of two roots inside one grid cell."""
    a, m, b = vals[:-2], vals[1:-1], vals[2:]
    same = ((a > 0) == (m > 0)) & ((m > 0) == (b > 0))
    dip = (np.abs(m) < np.abs(a)) & (np.abs(m) < np.abs(b))
    small = np.abs(m) < 0.05 * np.minimum(np.abs(a), np.abs(b))
    return np.nonzero(same & dip & small)[0] + 1


def _scan_roots(fun, g_lo: float, g_hi: float, tol: float, per_unit: int = GRID_PER_UNIT,
                refine: int = 8) -> list[float]:
    """All roots in lambda of ``fun`` for sqrt(lambda) in [g_lo, g_hi]."""
    n_pts = max(int(math.ceil((g_hi - g_lo) * per_unit)) + 1, 3)
    g = np.linspace(g_lo, g_hi, n_pts)
    vals = fun(g * g)
    roots = _roots_on_grid(fun, g, vals, tol)
    for i in _near_touches(vals):
        gg = np.linspace(g[i - 1], g[i + 1], 2 * refine + 1)
        vv = fun(gg * gg)
        found = _roots_on_grid(fun, gg, vv, tol)
        if not found and np.any(_near_touches(vv)) and np.min(np.abs(vv)) < 1e-12 * np.max(np.abs(vv)):
            raise RuntimeError(
                f"two roots collide within grid resolution near lambda={g[i] ** 2:.6g}")
        roots.extend(found)
    return sorted(roots)


def _roots_on_grid(fun, g, vals, tol) -> list[float]:
    exact = np.nonzero(vals == 0.0)[0]
    roots = [float(g[i] ** 2) for i in exact]
    nz = vals != 0.0
    gi, vi = g[nz], vals[nz]
    ch = np.nonzero((vi[:-1] > 0) != (vi[1:] > 0))[0]
    if ch.size:
        lo = gi[ch] ** 2
        hi = gi[ch + 1] ** 2
        roots.extend(_bisect_lambda(fun, lo, hi, vi[ch], tol).tolist())
    return roots


# ---------------------------------------------------------------------------
# spectra
# ---------------------------------------------------------------------------

def limit_spectrum(c: float, rho: float, count: int) -> LimitSpectrum:
    """The ``count`` smallest levels j_{sqrt(n^2+c),k}^2 / rho^2."""
    if not 1 <= count <= MAX_COUNT:
        raise ValueError(f"count must be in 1..{MAX_COUNT}")
    if c < 0 or rho <= 0:
        raise ValueError("need c >= 0 and rho > 0")
    levels: list[tuple[float, int, int]] = []

    def kth_best() -> float:
        return sorted(levels)[count - 1][0] if len(levels) >= count else math.inf

    n = 0
    while True:
        nu = math.sqrt(n * n + c)
        if nu / rho > math.sqrt(kth_best()):  # j_{nu,1} > nu
            break
        k = 1
        while True:
            z = sf.bessel_zero(nu, k)
            lam = z * z / (rho * rho)
            if lam > kth_best():
                break
            levels.append((lam, n, k))
            k += 1
        if k == 1:
            break  # the lowest zero already misses; higher n only grows
        n += 1
    levels.sort()
    vals = tuple(RadialEigenvalue(lam, n, k, 1 if n == 0 else 2) for lam, n, k in levels[:count])
    return LimitSpectrum(c, rho, vals)


def sector_eigenvalues(p: RadialProblem, lam_max: float) -> list[RadialEigenvalue]:
    """Eigenvalues of sector ``p.n`` not exceeding ``lam_max``."""
    rho = p.rho
    lower = sf.bessel_zero(p.n, 1) / rho  # potential >= 0: free disc bounds below
    step = 1.0 / GRID_PER_UNIT
    g_lo = max(lower - 2 * step, 0.5 * lower)
    g_hi = math.sqrt(lam_max) + 2 * step
    if g_hi <= g_lo:
        return []
    roots = _scan_roots(lambda lam: secular_value(p, lam), g_lo, g_hi, LAMBDA_TOL)
    mult = 1 if p.n == 0 else 2
    return [RadialEigenvalue(r, p.n, k, mult) for k, r in enumerate(roots, start=1)
            if r <= lam_max * (1 + 1e-12) + LAMBDA_TOL]


def radial_eigenvalues(p: RadialProblem, count: int) -> list[RadialEigenvalue]:
    """The ``count`` lowest levels over all angular sectors.

    ``p.n`` is ignored (all sectors are merged). Each level carries its
    multiplicity (2 for n >= 1). For ``L = inf`` the limit set is returned.
    """
    if not 1 <= count <= MAX_COUNT:
        raise ValueError(f"count must be in 1..{MAX_COUNT}")
    limit = limit_spectrum(p.c, p.rho, count)
    if math.isinf(p.L):
        return list(limit.values)
    # sector-wise comparison with c/r^2 bounds every level by its limit
    lam_max = limit.values[-1].lam
    found: list[RadialEigenvalue] = []
    n = 0
    while n < math.sqrt(lam_max) * p.rho:  # j_{n,1} > n
        found.extend(sector_eigenvalues(p.with_n(n), lam_max))
        n += 1
    found.sort(key=lambda e: (e.lam, e.n, e.k_radial))
    return found[:count]


def sector_levels(p: RadialProblem, count: int) -> list[RadialEigenvalue]:
    """The ``count`` lowest eigenvalues of the single sector ``p.n``."""
    if not 1 <= count <= MAX_COUNT:
        raise ValueError(f"count must be in 1..{MAX_COUNT}")
    mult = 1 if p.n == 0 else 2
    limit = [sf.bessel_zero(p.nu, k) ** 2 / p.rho**2 for k in range(1, count + 1)]
    if math.isinf(p.L):
        return [RadialEigenvalue(lam, p.n, k, mult) for k, lam in enumerate(limit, start=1)]
    # c 1{r >= 1/L}/r^2 <= c/r^2, so each finite-L level sits below its limit
    return sector_eigenvalues(p, limit[-1])[:count]


def counted_eigenvalues(p: RadialProblem, count: int) -> list[float]:
    """nu_0(L, rho, c), nu_1(L, rho, c), ... counting multiplicities."""
    return expand_multiplicity(radial_eigenvalues(p, count))[:count]


def annulus_eigenvalue(delta: float, rho: float, n: int, k: int) -> float:
    """k-th Dirichlet eigenvalue of sector n on the annulus delta < r < rho."""
    if not 0.0 < delta < rho:
        raise ValueError("need 0 < delta < rho")
    if k < 1 or n < 0:
        raise ValueError("need n >= 0 and k >= 1")

    def cross(lam):
        g = np.sqrt(np.asarray(lam, dtype=float))
        ji, _, yi, _ = _jy_at(n, g * delta, need_y=True)
        jo, _, yo, _ = _jy_at(n, g * rho, need_y=True)
        return ji * yo - jo * yi

    # the annulus sits inside the disc, so its eigenvalues lie above j_{n,1}^2/rho^2
    g_lo = sf.bessel_zero(n, 1) / rho
    found: list[float] = []
    width = max(math.pi / (rho - delta), 1.0) * 2
    for _ in range(1000):
        g_hi = g_lo + width
        found.extend(r for r in _scan_roots(cross, g_lo, g_hi, LAMBDA_TOL)
                     if not found or r > found[-1] + LAMBDA_TOL)
        if len(found) >= k:
            return found[k - 1]
        g_lo = g_hi
    raise RuntimeError("annulus root isolation failed")


# ---------------------------------------------------------------------------
# gap condition and Table-style admissible c
# ---------------------------------------------------------------------------

def _condition_margin(c: float, ratio: float) -> float:
    first = sf.bessel_zero(math.sqrt(c), 1)
    second = min(sf.bessel_zero(math.sqrt(1.0 + c), 1), sf.bessel_zero(math.sqrt(c), 2))
    return ratio * second - first


def gap_condition_holds(c: float, ratio: float) -> bool:
    """True iff j_{sqrt c,1} < ratio * min(j_{sqrt(1+c),1}, j_{sqrt c,2})."""
    if not c > 0:
        raise ValueError("c must be > 0")
    if not 0 < ratio <= 1:
        raise ValueError("ratio must lie in (0, 1]")
    return _condition_margin(c, ratio) > 0.0


def max_c_for_ratio(ratio: float, *, scan_limit: float = C_SCAN_LIMIT, xtol: float = 1e-7) -> float:
    """Largest c for which the gap condition holds at this in/out-radius ratio.

    Returns ``math.inf`` when the condition holds on the whole scan range
    (up to ``scan_limit``), and ``0.0`` when it fails for every c > 0.
    """
    if not 0 < ratio <= 1:
        raise ValueError("ratio must lie in (0, 1]")
    if ratio == 1.0:
        # j_{nu,1} < j_{nu,2} and j_{nu,1} < j_{sqrt(nu^2+1),1} for every nu
        return math.inf
    grid = np.geomspace(1e-6, scan_limit, 25)
    prev = None
    for c in grid:
        if _condition_margin(float(c), ratio) <= 0.0:
            if prev is None:
                return 0.0
            return brentq(lambda cc: _condition_margin(cc, ratio), prev, float(c), xtol=xtol)
        prev = float(c)
    return math.inf


@dataclass(frozen=True)
class RegularPolygon:
    sides: int


@dataclass(frozen=True)
class Ball:
    pass


SQUARE = RegularPolygon(4)
NAMED_SHAPES = {"square": SQUARE, "hexagon": RegularPolygon(6),
                "octagon": RegularPolygon(8), "ball": Ball()}


def shape_ratio(shape) -> float:
    """Inradius / circumradius: cos(pi/m) for a regular m-gon, 1 for the ball.

    ``shape`` is a :class:`RegularPolygon`, :class:`Ball`, one of the names in
    ``NAMED_SHAPES`` or an integer number of sides.
    """
    if isinstance(shape, str):
        try:
            shape = NAMED_SHAPES[shape.lower()]
        except KeyError:
            raise ValueError(f"unknown shape {shape!r}") from None
    if isinstance(shape, Ball):
        return 1.0
    m = shape.sides if isinstance(shape, RegularPolygon) else int(shape)
    if m < 3:
        raise ValueError("a regular polygon needs at least 3 sides")
    return math.cos(math.pi / m)


def limit_gap_chain(c: float, inner: float = 0.5, outer: float = 1.0 / math.sqrt(2.0)) -> float:
    """nu_1(inf, outer, c) - nu_0(inf, inner, c).

    With the square's radii this is 2 min(j_{sqrt(1+c),1}, j_{sqrt c,2})^2 - 4 j_{sqrt c,1}^2,
    positive exactly when the gap condition holds at ratio inner/outer."""
    nu1 = limit_spectrum(c, outer, 2).counted()[1]
    nu0 = limit_spectrum(c, inner, 1).counted()[0]
    return nu1 - nu0
