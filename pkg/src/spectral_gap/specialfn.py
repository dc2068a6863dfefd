"""Real-order Bessel functions of the first and second kind, their zeros,
and the real Gamma function.

Everything is binary64 and vectorised over the argument ``x``; the order is
always a scalar. Two evaluation branches are used:

* ``x <= crossover``: ascending power series (Neumaier-compensated sums).
  For small ``x``, ``Y`` comes from the reflection formula for non-integer
  orders and from the logarithmic integer-order series otherwise; above
  that (``x >= 2``, or ``x >= 0.25`` for orders close to an integer) it is
  recovered from ``J`` and Steed's continued fraction, which avoids the
  cancellation of the reflection formula.
* ``x > crossover``: Hankel's large-argument expansion for the two lowest
  orders ``a0, a0 + 1`` (``a0`` the fractional part of the order), lifted to
  the requested order by forward recurrence. Forward recurrence is stable
  for ``Y`` at every order and for ``J`` while the order stays below ``x``;
  ``J`` falls back to the series otherwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

SERIES_CROSSOVER = 14.0
NEAR_INTEGER_TOL = 1e-8
EULER_GAMMA = 0.57721566490153286061

# Lanczos approximation with g = 7 and nine coefficients (Godfrey's set, as
# tabulated in Numerical Recipes 3rd ed. and Boost.Math). Relative error is
# below 2e-15 for x >= 0.5; smaller x goes through the reflection formula.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


class BesselKind(Enum):
    FIRST = "j"
    SECOND = "y"


@dataclass(frozen=True)
class BesselOrder:
    """A nonnegative real order ``alpha``."""

    alpha: float

    def __post_init__(self):
        if not (self.alpha >= 0.0 and math.isfinite(self.alpha)):
            raise ValueError(f"Bessel order must be finite and >= 0, got {self.alpha}")

    @property
    def near_integer(self) -> bool:
        return abs(self.alpha - round(self.alpha)) < NEAR_INTEGER_TOL


@dataclass(frozen=True)
class BesselZeroIndex:
    alpha: BesselOrder
    k: int
    kind: BesselKind = BesselKind.FIRST

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"zero index k must be >= 1, got {self.k}")


def _order(order) -> float:
    if isinstance(order, BesselOrder):
        return order.alpha
    return BesselOrder(float(order)).alpha


# ---------------------------------------------------------------------------
# Gamma
# ---------------------------------------------------------------------------

def _lanczos_sum(z):
    acc = np.full_like(z, _LANCZOS_COEF[0])
    for i, c in enumerate(_LANCZOS_COEF[1:], start=1):
        acc = acc + c / (z + i)
    return acc


def _gamma_upper(x):
    # valid for x >= 0.5; the power is split in two halves to delay overflow
    z = x - 1.0
    t = z + _LANCZOS_G + 0.5
    half = np.power(t, 0.5 * (z + 0.5))
    return _SQRT_2PI * half * (np.exp(-t) * half) * _lanczos_sum(z)


def gamma(x):
    """Gamma function for positive real ``x`` (scalar or array)."""
    xa = np.asarray(x, dtype=float)
    if np.any(~(xa > 0.0)):
        raise ValueError("gamma is only defined here for x > 0")
    with np.errstate(over="ignore"):
        small = xa < 0.5
        # reflection: Gamma(x) = pi / (sin(pi x) Gamma(1 - x))
        out = np.where(
            small,
            np.pi / (np.sin(np.pi * xa) * _gamma_upper(np.where(small, 1.0 - xa, 1.0))),
            _gamma_upper(np.where(small, 1.0, xa)),
        )
    return float(out) if out.ndim == 0 else out


def log_gamma(x: float) -> float:
    """log Gamma(x) for x > 0, without overflow for large x."""
    if not x > 0.0:
        raise ValueError("log_gamma requires x > 0")
    if x < 0.5:
        return math.log(math.pi / (math.sin(math.pi * x))) - log_gamma(1.0 - x)
    z = x - 1.0
    t = z + _LANCZOS_G + 0.5
    s = float(_lanczos_sum(np.array(z)))
    return 0.5 * math.log(2.0 * math.pi) + (z + 0.5) * math.log(t) - t + math.log(s)


def _sinpi(x: float) -> float:
    # reduce first so sin(pi x) keeps full relative accuracy near integers
    n = round(x)
    r = math.sin(math.pi * (x - n))
    return -r if n % 2 else r


def _cospi(x: float) -> float:
    n = round(x)
    r = math.cos(math.pi * (x - n))
    return -r if n % 2 else r


def rgamma(x: float) -> float:
    """1/Gamma(x) for any real x (zero at the poles)."""
    if x > 0.0:
        if x > 170.0:
            return math.exp(-log_gamma(x))
        return 1.0 / gamma(x)
    if x == math.floor(x):
        return 0.0
    # 1/Gamma(x) = sin(pi x) Gamma(1 - x) / pi
    return _sinpi(x) * gamma(1.0 - x) / math.pi


# ---------------------------------------------------------------------------
# series and asymptotic kernels (x is a 1-D float array)
# ---------------------------------------------------------------------------

def _j_series(nu: float, x: np.ndarray) -> np.ndarray:
    """J_nu(x) from the ascending series; nu may be negative non-integer."""
    if x.size == 0:
        return x.copy()
    if x.size == 1:
        return np.array([_j_series_scalar(nu, float(x[0]))])
    half = 0.5 * x
    if nu + 1.0 > 0.0:
        lead = np.exp(nu * np.log(half) - log_gamma(nu + 1.0))
    else:
        lead = np.power(half, nu) * rgamma(nu + 1.0)
    q = -half * half
    term = lead.copy()
    total = lead.copy()
    comp = np.zeros_like(x)
    abs_sum = np.abs(lead)
    k = 0
    while True:
        k += 1
        term = term * q / (k * (k + nu))
        # Neumaier compensated summation
        t = total + term
        big = np.abs(total) >= np.abs(term)
        comp += np.where(big, (total - t) + term, (term - t) + total)
        total = t
        abs_sum = abs_sum + np.abs(term)
        if k > 2 and k > np.max(half) and np.all(np.abs(term) <= 1e-17 * abs_sum):
            break
        if k > 500:
            break
    return total + comp


def _j_series_scalar(nu: float, x: float) -> float:
    # same summation as _j_series on plain floats; Newton steps call this a lot
    half = 0.5 * x
    if nu + 1.0 > 0.0:
        lead = math.exp(nu * math.log(half) - log_gamma(nu + 1.0))
    else:
        lead = half**nu * rgamma(nu + 1.0)
    q = -half * half
    term = total = lead
    comp = 0.0
    abs_sum = abs(lead)
    k = 0
    while True:
        k += 1
        term = term * q / (k * (k + nu))
        t = total + term
        if abs(total) >= abs(term):
            comp += (total - t) + term
        else:
            comp += (term - t) + total
        total = t
        abs_sum += abs(term)
        if (k > 2 and k > half and abs(term) <= 1e-17 * abs_sum) or k > 500:
            return total + comp


def _y_integer_pair(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Y_0 and Y_1 from the logarithmic series (small and moderate x)."""
    half = 0.5 * x
    q = -half * half
    j0 = _j_series(0.0, x)
    j1 = _j_series(1.0, x)
    log_half = np.log(half)

    # Y_0 = (2/pi)(ln(x/2) + gamma) J_0 + (2/pi) sum_{k>=1} (-1)^{k+1} H_k (x^2/4)^k / (k!)^2
    # Y_1 = -2/(pi x) + (2/pi) ln(x/2) J_1
    #       - (1/pi) sum_{k>=0} (psi(k+1) + psi(k+2)) (-x^2/4)^k (x/2) / (k! (k+1)!)
    s0 = np.zeros_like(x)
    c0 = np.zeros_like(x)
    t0 = np.ones_like(x)
    t1 = half.copy()
    psi_a = -EULER_GAMMA
    psi_b = 1.0 - EULER_GAMMA
    s1 = (psi_a + psi_b) * t1
    c1 = np.zeros_like(x)
    harmonic = 0.0
    k = 0
    abs0 = np.zeros_like(x)
    abs1 = np.abs(s1)
    while True:
        k += 1
        harmonic += 1.0 / k
        t0 = t0 * q / (k * k)
        term0 = -harmonic * t0
        t1 = t1 * q / (k * (k + 1))
        psi_a = psi_b
        psi_b = psi_b + 1.0 / (k + 1)
        term1 = (psi_a + psi_b) * t1
        for s, c, term in ((s0, c0, term0), (s1, c1, term1)):
            t = s + term
            big = np.abs(s) >= np.abs(term)
            c += np.where(big, (s - t) + term, (term - t) + s)
            s[...] = t
        abs0 += np.abs(term0)
        abs1 += np.abs(term1)
        if (k > 2 and k > np.max(half)
                and np.all(np.abs(term0) <= 1e-17 * (abs0 + 1e-300))
                and np.all(np.abs(term1) <= 1e-17 * abs1)):
            break
        if k > 500:
            break
    y0 = (2.0 / np.pi) * ((log_half + EULER_GAMMA) * j0 + (s0 + c0))
    y1 = -2.0 / (np.pi * x) + (2.0 / np.pi) * log_half * j1 - (s1 + c1) / np.pi
    return y0, y1


def _hankel(mu_order: float, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """J and Y of small order from Hankel's asymptotic expansion (x large)."""
    mu = 4.0 * mu_order * mu_order
    eight_x = 8.0 * x
    term = np.ones_like(x)
    p = np.ones_like(x)
    q = np.zeros_like(x)
    active = np.ones(x.shape, dtype=bool)
    prev = np.full_like(x, np.inf)
    k = 0
    while np.any(active) and k < 200:
        k += 1
        term = term * (mu - (2 * k - 1) ** 2) / (k * eight_x)
        mag = np.abs(term)
        # stop each lane once terms are negligible or start to grow
        active &= (mag < prev) & (mag > 1e-17)
        contrib = np.where(active, term, 0.0)
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2:
            q += sign * contrib
        else:
            p += sign * contrib
        prev = mag
    chi = x - (0.5 * mu_order + 0.25) * np.pi
    amp = np.sqrt(2.0 / (np.pi * x))
    c, s = np.cos(chi), np.sin(chi)
    return amp * (p * c - q * s), amp * (p * s + q * c)


def _recur_up(c0: np.ndarray, c1: np.ndarray, a0: float, steps: int, x: np.ndarray):
    """From (C_{a0}, C_{a0+1}) to (C_{a0+steps}, C_{a0+steps+1})."""
    for j in range(steps):
        c0, c1 = c1, (2.0 * (a0 + j + 1) / x) * c1 - c0
    return c0, c1


def _split_order(alpha: float) -> tuple[float, int, bool]:
    near = abs(alpha - round(alpha)) < NEAR_INTEGER_TOL
    if near:
        return 0.0, int(round(alpha)), True
    n = int(math.floor(alpha))
    return alpha - n, n, False


def _j_pair(alpha: float, x: np.ndarray, crossover: float):
    """(J_alpha, J_{alpha+1}) for x > 0."""
    j_a = np.empty_like(x)
    j_b = np.empty_like(x)
    asym = (x > crossover) & (x >= alpha)
    ser = ~asym
    if np.any(ser):
        xs = x[ser]
        j_a[ser] = _j_series(alpha, xs)
        j_b[ser] = _j_series(alpha + 1.0, xs)
    if np.any(asym):
        a0, n, _ = _split_order(alpha)
        xa = x[asym]
        ja0, _ = _hankel(a0, xa)
        ja1, _ = _hankel(a0 + 1.0, xa)
        j_a[asym], j_b[asym] = _recur_up(ja0, ja1, a0, n, xa)
    return j_a, j_b


def _steed_cf2(mu: float, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """p + iq = (J'_mu + i Y'_mu) / (J_mu + i Y_mu) by Steed's continued
    fraction (modified Lentz); converges quickly for x >= 2."""
    tiny = 1e-300
    xi = 1.0 / x
    a = 0.25 - mu * mu
    p = -0.5 * xi
    q = np.ones_like(x)
    br = 2.0 * x
    bi = 2.0
    fact = a * xi / (p * p + q * q)
    cr = br + q * fact
    ci = bi + p * fact
    den = br * br + bi * bi
    dr = br / den
    di = -bi / den
    dlr = cr * dr - ci * di
    dli = cr * di + ci * dr
    p, q = p * dlr - q * dli, p * dli + q * dlr
    active = np.ones(x.shape, dtype=bool)
    for i in range(1, 20000):
        a += 2 * i
        bi += 2.0
        dr = a * dr + br
        di = a * di + bi
        dr = np.where(np.abs(dr) + np.abs(di) < tiny, tiny, dr)
        fact = a / (cr * cr + ci * ci)
        cr = br + cr * fact
        ci = bi - ci * fact
        cr = np.where(np.abs(cr) + np.abs(ci) < tiny, tiny, cr)
        den = dr * dr + di * di
        dr = dr / den
        di = -di / den
        dlr = np.where(active, cr * dr - ci * di, 1.0)
        dli = np.where(active, cr * di + ci * dr, 0.0)
        p, q = p * dlr - q * dli, p * dli + q * dlr
        active &= np.abs(dlr - 1.0) + np.abs(dli) >= 1e-15
        if not active.any():
            break
    return p, q


CF2_MIN_X = 2.0
# orders this close to an integer make the reflection formula lose
# digits, so the continued fraction takes over from a smaller x
CF2_MIN_X_NEAR_INTEGER = 0.25


def _y_pair(alpha: float, x: np.ndarray, crossover: float):
    """(Y_alpha, Y_{alpha+1}) for x > 0."""
    a0, n, near = _split_order(alpha)
    y_a = np.empty_like(x)
    y_b = np.empty_like(x)
    asym = x > crossover
    cf_min = CF2_MIN_X_NEAR_INTEGER if min(a0, 1.0 - a0) < 1e-2 else CF2_MIN_X
    mid = ~asym & (x >= cf_min)
    low = ~asym & ~mid
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        if np.any(low):
            xs = x[low]
            if near:
                s0, s1 = _y_integer_pair(xs)
            else:
                # Y_mu = (J_mu cos(mu pi) - J_{-mu}) / sin(mu pi)
                s0 = (_j_series(a0, xs) * _cospi(a0) - _j_series(-a0, xs)) / _sinpi(a0)
                m1 = a0 + 1.0
                s1 = (_j_series(m1, xs) * _cospi(m1) - _j_series(-m1, xs)) / _sinpi(m1)
            y_a[low], y_b[low] = _recur_up(s0, s1, a0, n, xs)
        if np.any(mid):
            xs = x[mid]
            j0 = _j_series(a0, xs)
            jp0 = (a0 / xs) * j0 - _j_series(a0 + 1.0, xs)
            p, q = _steed_cf2(a0, xs)
            # J' = p J - q Y,  Y' = q J + p Y
            s0 = (p * j0 - jp0) / q
            s1 = (a0 / xs) * s0 - (q * j0 + p * s0)
            y_a[mid], y_b[mid] = _recur_up(s0, s1, a0, n, xs)
        if np.any(asym):
            xa = x[asym]
            _, h0 = _hankel(a0, xa)
            _, h1 = _hankel(a0 + 1.0, xa)
            y_a[asym], y_b[asym] = _recur_up(h0, h1, a0, n, xa)
    return y_a, y_b


def _y_ratio(alpha: float, x: np.ndarray, crossover: float = SERIES_CROSSOVER) -> np.ndarray:
    """Y_{alpha+1}(x) / Y_alpha(x) without forming Y_alpha itself.

    Used where Y_alpha overflows (tiny x, large order)."""
    a0, n, _ = _split_order(alpha)
    s0, s1 = _y_pair(a0, x, crossover)
    r = s1 / s0
    for j in range(n):
        r = 2.0 * (a0 + j + 1) / x - 1.0 / r
    return r


def _prep(x, allow_zero: bool):
    xa = np.asarray(x, dtype=float)
    flat = np.atleast_1d(xa).ravel()
    if allow_zero:
        if np.any(~(flat >= 0.0)):
            raise ValueError("Bessel argument must be >= 0")
    elif np.any(~(flat > 0.0)):
        raise ValueError("Bessel argument must be > 0")
    return xa, flat


def _finish(xa: np.ndarray, flat: np.ndarray):
    if xa.ndim == 0:
        return float(flat[0])
    return flat.reshape(xa.shape)


# ---------------------------------------------------------------------------
# public evaluators
# ---------------------------------------------------------------------------

def bessel_j(order, x, *, crossover: float = SERIES_CROSSOVER):
    """J_alpha(x) for real order alpha >= 0 and x >= 0."""
    alpha = _order(order)
    xa, flat = _prep(x, allow_zero=True)
    out = np.empty_like(flat)
    zero = flat == 0.0
    out[zero] = 1.0 if alpha == 0.0 else 0.0
    if np.any(~zero):
        out[~zero], _ = _j_pair(alpha, flat[~zero], crossover)
    return _finish(xa, out)


def bessel_y(order, x, *, crossover: float = SERIES_CROSSOVER):
    """Y_alpha(x) (standard sign convention, negative near 0) for x > 0."""
    alpha = _order(order)
    xa, flat = _prep(x, allow_zero=False)
    out, _ = _y_pair(alpha, flat, crossover)
    return _finish(xa, out)


def bessel_j_prime(order, x, *, crossover: float = SERIES_CROSSOVER):
    """dJ_alpha/dx, via C'_alpha = (alpha/x) C_alpha - C_{alpha+1}."""
    alpha = _order(order)
    xa, flat = _prep(x, allow_zero=False)
    ja, jb = _j_pair(alpha, flat, crossover)
    return _finish(xa, (alpha / flat) * ja - jb if alpha else -jb)


def bessel_y_prime(order, x, *, crossover: float = SERIES_CROSSOVER):
    alpha = _order(order)
    xa, flat = _prep(x, allow_zero=False)
    ya, yb = _y_pair(alpha, flat, crossover)
    with np.errstate(over="ignore", invalid="ignore"):
        out = (alpha / flat) * ya - yb if alpha else -yb
    return _finish(xa, out)


def bessel_jy(order, x, *, crossover: float = SERIES_CROSSOVER):
    """All four of J, J', Y, Y' at once, as arrays shaped like ``x``."""
    alpha = _order(order)
    xa, flat = _prep(x, allow_zero=False)
    ja, jb = _j_pair(alpha, flat, crossover)
    ya, yb = _y_pair(alpha, flat, crossover)
    with np.errstate(over="ignore", invalid="ignore"):
        jp = (alpha / flat) * ja - jb
        yp = (alpha / flat) * ya - yb
    shape = xa.shape
    return ja.reshape(shape), jp.reshape(shape), ya.reshape(shape), yp.reshape(shape)


# ---------------------------------------------------------------------------
# zeros
# ---------------------------------------------------------------------------

def mcmahon_guess(alpha: float, k: int, kind: BesselKind = BesselKind.FIRST) -> float:
    """McMahon's large-zero approximation (three terms)."""
    shift = 0.25 if kind is BesselKind.FIRST else 0.75
    beta = (k + 0.5 * alpha - shift) * math.pi
    mu = 4.0 * alpha * alpha
    return beta - (mu - 1.0) / (8.0 * beta) - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * (8.0 * beta) ** 3)


def _zero_start(alpha: float, kind: BesselKind) -> float:
    # j_{a,1} > a + 1.8557 a^{1/3} (Qu & Wong); y_{a,1} > a
    if kind is BesselKind.FIRST:
        return max(alpha + 1.855757 * alpha ** (1.0 / 3.0) - 1e-9, 1e-6) if alpha > 0 else 1e-6
    return max(alpha, 1e-6)


def bessel_zero(order, k: int | None = None, kind: BesselKind = BesselKind.FIRST,
                *, step: float = 0.25, xtol: float = 1e-13) -> float:
    """k-th positive zero of J_alpha (``FIRST``) or Y_alpha (``SECOND``).

    Accepts either ``(order, k, kind)`` or a single :class:`BesselZeroIndex`.
    Sign changes are bracketed on a grid of spacing ``step`` (well below
    the minimal zero spacing) and then refined by Newton steps kept inside
    the bracket, falling back to bisection.
    """
    if isinstance(order, BesselZeroIndex):
        idx = order
    else:
        if k is None:
            raise TypeError("bessel_zero needs k")
        idx = BesselZeroIndex(BesselOrder(float(order)) if not isinstance(order, BesselOrder) else order,
                              int(k), kind)
    alpha, k, kind = idx.alpha.alpha, idx.k, idx.kind
    pair = _j_pair if kind is BesselKind.FIRST else _y_pair

    def f(xv: np.ndarray) -> np.ndarray:
        return pair(alpha, xv, SERIES_CROSSOVER)[0]

    start = _zero_start(alpha, kind)
    lo_x, lo_v = start, float(f(np.array([start]))[0])
    found = 0
    bracket = None
    for _ in range(10000):
        xs = lo_x + step * np.arange(1, 129)
        vs = f(xs)
        xx = np.concatenate(([lo_x], xs))
        vv = np.concatenate(([lo_v], vs))
        changes = np.nonzero((vv[:-1] > 0) != (vv[1:] > 0))[0]
        if found + changes.size >= k:
            i = changes[k - found - 1]
            bracket = (float(xx[i]), float(xx[i + 1]), float(vv[i]), float(vv[i + 1]))
            break
        found += changes.size
        lo_x, lo_v = float(xs[-1]), float(vs[-1])
    if bracket is None:
        raise RuntimeError(f"could not bracket zero k={k} of order {alpha}")
    a, b, fa, fb = bracket
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b

    guess = mcmahon_guess(alpha, k, kind)
    x = guess if a < guess < b else 0.5 * (a + b)
    for _ in range(200):
        v_a, v_b = pair(alpha, np.array([x]), SERIES_CROSSOVER)
        fx = float(v_a[0])
        dfx = (alpha / x) * fx - float(v_b[0])
        if fx == 0.0:
            return x
        if (fx > 0) == (fa > 0):
            a, fa = x, fx
        else:
            b, fb = x, fx
        x_new = x - fx / dfx if dfx != 0.0 else a - 1.0
        if not (a < x_new < b):
            x_new = 0.5 * (a + b)
        if abs(x_new - x) <= xtol * max(1.0, x) or (b - a) <= xtol * max(1.0, x):
            return x_new
        x = x_new
    raise RuntimeError(f"zero refinement did not converge (order {alpha}, k={k})")
