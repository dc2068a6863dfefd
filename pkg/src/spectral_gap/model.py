"""Potentials, box problems and the finite-difference operator
``-Laplace + L^2 v(L x)`` on the unit box (or ``-Laplace + v`` on the box of
side L), assembled as a sparse symmetric matrix.

The unit box is centred at the origin, ``[-1/2, 1/2]^d``; the physical box is
``[-L/2, L/2]^d``. Grids have ``grid_n`` interior points per axis and
Dirichlet values are eliminated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from enum import Enum
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy import integrate

# ---------------------------------------------------------------------------
# potentials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PotentialSpec:
    """Base class; concrete variants below. ``dim`` is the space dimension."""

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("dim must be >= 2")
        for f in fields(self):
            if f.name != "dim" and not getattr(self, f.name) > 0:
                raise ValueError(f"{type(self).__name__}.{f.name} must be > 0")

    @property
    def kind(self) -> str:
        return type(self).__name__

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        out.update({f.name: getattr(self, f.name) for f in fields(self)})
        return out

    @staticmethod
    def from_dict(data: dict) -> "PotentialSpec":
        data = dict(data)
        try:
            cls = POTENTIALS[data.pop("kind")]
        except KeyError as exc:
            raise ValueError(f"unknown potential kind {exc.args[0]!r}") from None
        known = {f.name for f in fields(cls)}
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown keys for {cls.__name__}: {sorted(extra)}")
        return cls(**data)


@dataclass(frozen=True)
class Zero(PotentialSpec):
    dim: int = 2

    def __call__(self, x):
        return np.zeros(np.shape(x)[:-1])


@dataclass(frozen=True)
class FastDecay(PotentialSpec):
    """v(x) = min(cap, C / |x|^(2+mu)); cap defaults to C."""
    C: float = 1.0
    mu: float = 1.0
    cap: float | None = None
    dim: int = 2

    def __post_init__(self):
        if self.cap is None:
            object.__setattr__(self, "cap", self.C)
        super().__post_init__()

    def __call__(self, x):
        r = np.linalg.norm(np.asarray(x, dtype=float), axis=-1)
        with np.errstate(divide="ignore"):
            return np.minimum(self.cap, self.C / r ** (2 + self.mu))

    @property
    def kink_radius(self) -> float:
        return (self.C / self.cap) ** (1.0 / (2 + self.mu))


@dataclass(frozen=True)
class RegularizedQuadratic(PotentialSpec):
    """v(x) = c 1{|x| >= 1} / |x|^2."""
    c: float = 0.04
    dim: int = 2

    def __call__(self, x):
        r = np.linalg.norm(np.asarray(x, dtype=float), axis=-1)
        with np.errstate(divide="ignore"):
            return np.where(r >= 1.0, self.c / np.maximum(r, 1.0) ** 2, 0.0)


@dataclass(frozen=True)
class OneSidedStrip(PotentialSpec):
    """v(x, y) = gamma for |x| < delta, else 0 (planar only)."""
    gamma: float = 1.0
    delta: float = 1.0
    dim: int = 2

    def __post_init__(self):
        super().__post_init__()
        if self.dim != 2:
            raise ValueError("OneSidedStrip is defined for dim = 2 only")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(np.abs(x[..., 0]) < self.delta, self.gamma, 0.0)


@dataclass(frozen=True)
class Bump(PotentialSpec):
    """v = height on the ball of the given radius."""
    height: float = 1.0
    radius: float = 1.0
    dim: int = 2

    def __call__(self, x):
        r = np.linalg.norm(np.asarray(x, dtype=float), axis=-1)
        return np.where(r <= self.radius, self.height, 0.0)

    def l1_norm(self) -> float:
        d = self.dim
        vol = math.pi ** (d / 2) / math.gamma(d / 2 + 1) * self.radius**d
        return self.height * vol


POTENTIALS = {cls.__name__: cls for cls in (Zero, FastDecay, RegularizedQuadratic, OneSidedStrip, Bump)}


def l1_norm(spec: PotentialSpec) -> float:
    """||v||_{L^1(R^d)} where finite."""
    if isinstance(spec, Zero):
        return 0.0
    if isinstance(spec, Bump):
        return spec.l1_norm()
    if isinstance(spec, FastDecay):
        d, rk = spec.dim, spec.kink_radius
        if spec.mu + 2 <= d:
            return math.inf
        area = 2 * math.pi ** (d / 2) / math.gamma(d / 2)  # |S^{d-1}|
        inner = spec.cap * rk**d / d
        outer = spec.C * rk ** (d - 2 - spec.mu) / (2 + spec.mu - d)
        return area * (inner + outer)
    return math.inf


# ---------------------------------------------------------------------------
# cell averages
# ---------------------------------------------------------------------------

def _quarter_area(r, x, y):
    """Area of {0 <= X <= |x|, 0 <= Y <= |y|, X^2+Y^2 <= r^2}, signed by sign(x)sign(y)."""
    r, x, y = np.broadcast_arrays(*(np.asarray(t, dtype=float) for t in (r, x, y)))
    ax, ay = np.abs(x), np.abs(y)
    rs = np.where(r > 0, r, 1.0)
    xx, yy = np.minimum(ax, rs), np.minimum(ay, rs)
    sx = 0.5 * (xx * np.sqrt(rs * rs - xx * xx) + rs * rs * np.arcsin(xx / rs))
    sy = 0.5 * (yy * np.sqrt(rs * rs - yy * yy) + rs * rs * np.arcsin(yy / rs))
    out = np.where(ax * ax + ay * ay <= r * r, ax * ay, sx + sy - 0.25 * math.pi * rs * rs)
    out = np.where(r > 0, out, 0.0)
    return np.sign(x) * np.sign(y) * out


def _quarter_arc(r, x, y):
    """d/dr of :func:`_quarter_area`."""
    r, x, y = np.broadcast_arrays(*(np.asarray(t, dtype=float) for t in (r, x, y)))
    ax, ay = np.abs(x), np.abs(y)
    rs = np.where(r > 0, r, 1.0)
    t = np.arcsin(np.minimum(ax / rs, 1.0)) + np.arcsin(np.minimum(ay / rs, 1.0)) - 0.5 * math.pi
    out = np.where((ax * ax + ay * ay <= r * r) | (r <= 0), 0.0, rs * t)
    return np.sign(x) * np.sign(y) * out


def _rect_combine(fn, r, x0, x1, y0, y1):
    return fn(r, x1, y1) - fn(r, x0, y1) - fn(r, x1, y0) + fn(r, x0, y0)


def disc_rect_area(r: float, x0, x1, y0, y1):
    """Area of the disc of radius r (centred at 0) inside [x0,x1] x [y0,y1]."""
    return _rect_combine(_quarter_area, r, x0, x1, y0, y1)


def circle_rect_length(r: float, x0, x1, y0, y1):
    """Length of the circle of radius r inside [x0,x1] x [y0,y1]."""
    return _rect_combine(_quarter_arc, r, x0, x1, y0, y1)


_COS_NODES, _COS_WEIGHTS = np.polynomial.legendre.leggauss(24)


def _kink_free_quad(fn, edges: Sequence[float]) -> float:
    """Integrate a vectorised fn over consecutive [edges[i], edges[i+1]].

    Each piece is mapped by z = u + (v-u)(1 - cos phi)/2, which smooths the
    (z-u)^(3/2) behaviour that overlap areas show at geometric breakpoints.
    """
    phi = 0.5 * math.pi * (_COS_NODES + 1.0)
    total = 0.0
    for u, v in zip(edges[:-1], edges[1:]):
        if v <= u:
            continue
        z = u + 0.5 * (v - u) * (1.0 - np.cos(phi))
        jac = 0.25 * math.pi * (v - u) * np.sin(phi)
        total += float(np.sum(_COS_WEIGHTS * jac * fn(z)))
    return total


def ball_box_volume(r: float, lo: np.ndarray, hi: np.ndarray) -> float:
    """Volume of the ball of radius r inside the box [lo, hi] (d = 2 or 3)."""
    if len(lo) == 2:
        return float(disc_rect_area(r, lo[0], hi[0], lo[1], hi[1]))
    if len(lo) != 3:
        raise NotImplementedError("ball/box overlap implemented for d = 2, 3")
    a, b = max(lo[2], -r), min(hi[2], r)
    if a >= b:
        return 0.0
    x0, x1, y0, y1 = (float(t) for t in (lo[0], hi[0], lo[1], hi[1]))

    def slab(z):
        return disc_rect_area(np.sqrt(np.maximum(r * r - z * z, 0.0)), x0, x1, y0, y1)

    # slice areas have kinks where the slice circle meets an edge or a corner
    ts = {abs(x0), abs(x1), abs(y0), abs(y1)} | {math.hypot(u, v) for u in (x0, x1) for v in (y0, y1)}
    zs = {0.0}
    for t in ts:
        if t < r:
            zk = math.sqrt(r * r - t * t)
            zs |= {zk, -zk}
    return _kink_free_quad(slab, [a, *sorted(z for z in zs if a < z < b), b])


def _radial_profile(spec: PotentialSpec, L: float):
    """(f, r_k): the scaled potential as a function of |y| and its break radius."""
    if isinstance(spec, FastDecay):
        p = 2 + spec.mu
        rk = spec.kink_radius / L
        cap, C = spec.cap, spec.C

        def f(r):
            r = np.asarray(r, dtype=float)
            with np.errstate(divide="ignore"):
                return L * L * np.minimum(cap, C / (L * r) ** p)
        return f, rk
    if isinstance(spec, RegularizedQuadratic):
        rk = 1.0 / L
        c = spec.c

        def f(r):
            r = np.asarray(r, dtype=float)
            with np.errstate(divide="ignore"):
                return np.where(r >= rk, c / np.maximum(r, rk) ** 2, 0.0)
        return f, rk
    raise TypeError(f"{spec.kind} is not a radial profile")


def _radial_cut_integral(f, rk: float, lo: np.ndarray, hi: np.ndarray) -> float:
    """Integral of f(|y|) over a box straddling the sphere |y| = rk."""
    if len(lo) == 2:
        return _radial_integral_2d(f, rk, lo[0], hi[0], lo[1], hi[1], 0.0)
    if len(lo) != 3:
        raise NotImplementedError("radial cut cells implemented for d = 2, 3")
    g = lambda z: _radial_integral_2d(f, rk, lo[0], hi[0], lo[1], hi[1], z)
    pts = [p for p in (0.0, -rk, rk) if lo[2] < p < hi[2]]
    return integrate.quad(g, lo[2], hi[2], points=pts or None, epsabs=0, epsrel=1e-9, limit=200)[0]


def _radial_integral_2d(f, rk, x0, x1, y0, y1, z) -> float:
    """Integral over the rectangle of f(sqrt(rho^2 + z^2)), rho = planar radius."""
    ax = (min(abs(x0), abs(x1)) if x0 * x1 > 0 else 0.0)
    ay = (min(abs(y0), abs(y1)) if y0 * y1 > 0 else 0.0)
    rmin = math.hypot(ax, ay)
    rmax = math.hypot(max(abs(x0), abs(x1)), max(abs(y0), abs(y1)))
    pts = {abs(x0), abs(x1), abs(y0), abs(y1)}
    pts |= {math.hypot(a, b) for a in (x0, x1) for b in (y0, y1)}
    if rk > abs(z):
        pts.add(math.sqrt(rk * rk - z * z))
    pts = sorted(p for p in pts if rmin < p < rmax)
    g = lambda r: float(f(math.sqrt(r * r + z * z))) * float(circle_rect_length(r, x0, x1, y0, y1))
    total = 0.0
    edges = [rmin]
    for p in [*pts, rmax]:
        # breakpoints that coincide up to rounding would leave slivers quad cannot resolve
        if p - edges[-1] > 1e-12 * rmax:
            edges.append(p)
    edges[-1] = rmax
    for a, b in zip(edges[:-1], edges[1:]):
        if b > a:
            total += integrate.quad(g, a, b, epsabs=0, epsrel=1e-11, limit=200)[0]
    return total


_GL = {q: np.polynomial.legendre.leggauss(q) for q in (3, 4, 5, 6, 8)}


def _tensor_gl(f, lo: np.ndarray, hi: np.ndarray, q: int) -> np.ndarray:
    """Tensor Gauss-Legendre integral of f(|y|) over each box (rows of lo/hi)."""
    x, w = _GL[q]
    m, d = lo.shape
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    r2 = np.zeros((m,) + (q,) * d)
    wt = np.ones((q,) * d)
    for a in range(d):
        shape = [1] * d
        shape[a] = q
        coord = mid[:, a, None] + half[:, a, None] * x[None, :]
        r2 = r2 + (coord**2).reshape((m,) + tuple(shape))
        wt = wt * w.reshape(shape)
    vals = f(np.sqrt(r2))
    return np.prod(half, axis=1) * np.tensordot(vals, wt, axes=d)


def _smooth_integrals(f, lo: np.ndarray, hi: np.ndarray, rtol: float = 1e-10, depth: int = 10) -> np.ndarray:
    """Adaptive tensor Gauss-Legendre for boxes on which f(|y|) is smooth."""
    d = lo.shape[1]
    q_lo, q_hi = (4, 8) if d == 2 else (3, 5)
    out = np.empty(lo.shape[0])
    chunk = max(1, 2_000_000 // q_hi**d)
    for s in range(0, lo.shape[0], chunk):
        a, b = lo[s:s + chunk], hi[s:s + chunk]
        fine = _tensor_gl(f, a, b, q_hi)
        coarse = _tensor_gl(f, a, b, q_lo)
        bad = np.abs(fine - coarse) > rtol * np.abs(fine) + 1e-300
        if np.any(bad) and depth > 0:
            fine[bad] = _split_integrals(f, a[bad], b[bad], rtol, depth - 1)
        out[s:s + chunk] = fine
    return out


def _split_integrals(f, lo, hi, rtol, depth):
    m, d = lo.shape
    mid = 0.5 * (lo + hi)
    total = np.zeros(m)
    for corner in range(2**d):
        clo, chi = lo.copy(), hi.copy()
        for a in range(d):
            if corner >> a & 1:
                clo[:, a] = mid[:, a]
            else:
                chi[:, a] = mid[:, a]
        total += _smooth_integrals(f, clo, chi, rtol, depth)
    return total


def _distance_range(lo: np.ndarray, hi: np.ndarray):
    near = np.where(lo > 0, lo, np.where(hi < 0, -hi, 0.0))
    far = np.maximum(np.abs(lo), np.abs(hi))
    return np.sqrt(np.sum(near**2, axis=1)), np.sqrt(np.sum(far**2, axis=1))


def cell_integrals(spec: PotentialSpec, L: float, lo, hi) -> np.ndarray:
    """Integrals of the scaled potential L^2 v(L y) over boxes [lo_i, hi_i]."""
    lo = np.atleast_2d(np.asarray(lo, dtype=float))
    hi = np.atleast_2d(np.asarray(hi, dtype=float))
    if lo.shape != hi.shape or lo.shape[1] != spec.dim:
        raise ValueError("cell bounds must have shape (m, dim)")
    vol = np.prod(hi - lo, axis=1)
    if isinstance(spec, Zero):
        return np.zeros(lo.shape[0])
    if isinstance(spec, OneSidedStrip):
        w = spec.delta / L
        overlap = np.clip(np.minimum(hi[:, 0], w) - np.maximum(lo[:, 0], -w), 0.0, None)
        return L * L * spec.gamma * overlap * (hi[:, 1] - lo[:, 1])
    rmin, rmax = _distance_range(lo, hi)
    if isinstance(spec, Bump):
        R = spec.radius / L
        out = np.where(rmax <= R, vol, 0.0)
        for i in np.nonzero((rmin < R) & (rmax > R))[0]:
            out[i] = ball_box_volume(R, lo[i], hi[i])
        return L * L * spec.height * out
    f, rk = _radial_profile(spec, L)
    out = np.zeros(lo.shape[0])
    cut = (rmin < rk) & (rmax > rk)
    inside = (rmax <= rk) & ~cut
    outside = ~cut & ~inside
    out[inside] = float(f(0.5 * rk)) * vol[inside]  # constant below the break radius
    if np.any(outside):
        out[outside] = _smooth_integrals(f, lo[outside], hi[outside])
    for i in np.nonzero(cut)[0]:
        out[i] = _radial_cut_integral(f, rk, lo[i], hi[i])
    return out


def potential_cell_average(spec: PotentialSpec, L: float, cell: Sequence[tuple[float, float]]) -> float:
    """Mean of L^2 v(L y) over an axis-aligned cell given as ((lo, hi), ...)."""
    cell = np.asarray(cell, dtype=float)
    lo, hi = cell[:, 0], cell[:, 1]
    if np.any(hi <= lo) or np.any(lo < -0.5 - 1e-15) or np.any(hi > 0.5 + 1e-15):
        raise ValueError("cell must be a nondegenerate box inside [-1/2, 1/2]^d")
    return float(cell_integrals(spec, L, lo[None], hi[None])[0] / np.prod(hi - lo))


def cell_edges(grid_n: int) -> np.ndarray:
    """Edges of the cells attached to the interior nodes of the unit box.

    Node i sits at -1/2 + (i+1) h; its cell is [x_i - h/2, x_i + h/2], with
    the two outermost cells stretched to the wall so the cells tile the box.
    """
    h = 1.0 / (grid_n + 1)
    e = -0.5 + h * (np.arange(grid_n + 1) + 0.5)
    e[0], e[-1] = -0.5, 0.5
    return e


@lru_cache(maxsize=32)
def _grid_averages(spec: PotentialSpec, L: float, grid_n: int) -> np.ndarray:
    d = spec.dim
    e = cell_edges(grid_n)
    if isinstance(spec, Zero):
        out = np.zeros((grid_n,) * d)
    elif isinstance(spec, OneSidedStrip):
        col = cell_integrals(spec, L, np.c_[e[:-1], np.full(grid_n, -0.5)],
                             np.c_[e[1:], np.full(grid_n, 0.5)])
        out = np.repeat((col / np.diff(e))[:, None], grid_n, axis=1)
    else:
        axes = np.meshgrid(*([np.arange(grid_n)] * d), indexing="ij")
        idx = np.stack([a.ravel() for a in axes], axis=1)
        lo, hi = e[idx], e[idx + 1]
        out = (cell_integrals(spec, L, lo, hi) / np.prod(hi - lo, axis=1)).reshape((grid_n,) * d)
    out.setflags(write=False)
    return out


def grid_potential(spec: PotentialSpec, L: float, grid_n: int) -> np.ndarray:
    """Cell averages of L^2 v(L y) on the grid, shape (grid_n,)*dim, row-major."""
    return _grid_averages(spec, float(L), int(grid_n))


# ---------------------------------------------------------------------------
# problems and assembly
# ---------------------------------------------------------------------------

class Frame(Enum):
    PHYSICAL = "physical"  # -Laplace + v on the box of side L
    SCALED = "scaled"      # -Laplace + L^2 v(L .) on the unit box


MEMORY_BUDGET = {2: 2048**2, 3: 128**3}
DEFAULT_BUDGET = 128**3


class AssemblyBudgetError(MemoryError):
    pass


@dataclass(frozen=True)
class BoxProblem:
    L: float
    potential: PotentialSpec
    grid_n: int
    frame: Frame = Frame.SCALED

    def __post_init__(self):
        if not self.L > 0 or math.isinf(self.L):
            raise ValueError("L must be a positive finite number")
        if self.grid_n < 8:
            raise ValueError("grid_n must be >= 8")

    @property
    def dim(self) -> int:
        return self.potential.dim

    @property
    def h(self) -> float:
        side = 1.0 if self.frame is Frame.SCALED else self.L
        return side / (self.grid_n + 1)

    @property
    def size(self) -> int:
        return self.grid_n**self.dim


@dataclass(frozen=True, eq=False)
class DiscreteOperator:
    size: int
    row_offsets: np.ndarray
    col_indices: np.ndarray
    values: np.ndarray
    dim: int
    grid_n: int
    h: float
    symmetric: bool

    def to_scipy(self) -> sp.csr_matrix:
        return sp.csr_matrix((self.values, self.col_indices, self.row_offsets), shape=(self.size, self.size))

    def diagonal(self) -> np.ndarray:
        return self.to_scipy().diagonal()

    @classmethod
    def from_matrix(cls, mat, *, dim: int = 1, grid_n: int | None = None, h: float = 1.0) -> "DiscreteOperator":
        a = sp.csr_matrix(mat, dtype=float)
        a.sort_indices()
        n = a.shape[0]
        if a.shape != (n, n):
            raise ValueError("operator must be square")
        return cls(n, a.indptr.copy(), a.indices.copy(), a.data.copy(), dim,
                   n if grid_n is None else grid_n, h, _is_symmetric(a))


def _is_symmetric(a: sp.csr_matrix) -> bool:
    return (a != a.T).nnz == 0


def laplacian_1d(n: int, h: float) -> sp.csr_matrix:
    main = np.full(n, 2.0 / h**2)
    off = np.full(n - 1, -1.0 / h**2)
    return sp.diags([off, main, off], [-1, 0, 1], format="csr")


def laplacian(dim: int, n: int, h: float) -> sp.csr_matrix:
    """Dirichlet (2d+1)-point Laplacian, row-major over interior nodes."""
    t = laplacian_1d(n, h)
    eye = sp.identity(n, format="csr")
    out = None
    for a in range(dim):
        term = None
        for b in range(dim):
            m = t if a == b else eye
            term = m if term is None else sp.kron(term, m, format="csr")
        out = term if out is None else out + term
    return out.tocsr()


def assemble(problem: BoxProblem, *, budget: int | None = None) -> DiscreteOperator:
    d, n = problem.dim, problem.grid_n
    limit = budget if budget is not None else MEMORY_BUDGET.get(d, DEFAULT_BUDGET)
    if n**d > limit:
        raise AssemblyBudgetError(f"{n}^{d} unknowns exceed the assembly budget of {limit}")
    h = problem.h
    a = laplacian(d, n, h)
    pot = grid_potential(problem.potential, problem.L, n).ravel()
    if problem.frame is Frame.PHYSICAL:
        # v(x) averaged over L*cell equals (L^2 v(L y) averaged over cell) / L^2
        pot = pot / problem.L**2
    a = (a + sp.diags(pot, 0, format="csr")).tocsr()
    a.sort_indices()
    sym = _is_symmetric(a)
    if not sym:
        raise AssertionError("assembled operator is not symmetric")
    return DiscreteOperator(a.shape[0], a.indptr, a.indices, a.data, d, n, h, sym)


def scale_transform(problem: BoxProblem) -> BoxProblem:
    """Switch between the physical and the scaled frame."""
    other = Frame.SCALED if problem.frame is Frame.PHYSICAL else Frame.PHYSICAL
    return replace(problem, frame=other)


def grid_coordinates(problem: BoxProblem) -> np.ndarray:
    """Interior node coordinates, shape (size, dim), row-major."""
    n, d = problem.grid_n, problem.dim
    side = 1.0 if problem.frame is Frame.SCALED else problem.L
    x = side * (-0.5 + np.arange(1, n + 1) / (n + 1))
    axes = np.meshgrid(*([x] * d), indexing="ij")
    return np.stack([a.ravel() for a in axes], axis=1)


# ---------------------------------------------------------------------------
# free reference modes
# ---------------------------------------------------------------------------

class ModeKind(Enum):
    GROUND = "ground"
    FIRST_EXCITED_AXIS = "first_excited_axis"


@dataclass(frozen=True)
class ModeIndex:
    kind: ModeKind
    axis: int = 0  # 1-based axis for FIRST_EXCITED_AXIS


GROUND = ModeIndex(ModeKind.GROUND)


def first_excited(axis: int) -> ModeIndex:
    return ModeIndex(ModeKind.FIRST_EXCITED_AXIS, axis)


def reference_mode(d: int, index: ModeIndex) -> Callable[[np.ndarray], np.ndarray]:
    """Normalised free Dirichlet mode on the unit box, evaluated at points (..., d)."""
    if index.kind is ModeKind.FIRST_EXCITED_AXIS and not 1 <= index.axis <= d:
        raise ValueError("axis must lie in 1..d")
    root2 = math.sqrt(2.0)

    def mode(x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != d:
            raise ValueError(f"points must have trailing dimension {d}")
        out = np.ones(x.shape[:-1])
        for a in range(d):
            if index.kind is ModeKind.FIRST_EXCITED_AXIS and a == index.axis - 1:
                out = out * root2 * np.sin(2 * math.pi * x[..., a])
            else:
                out = out * root2 * np.cos(math.pi * x[..., a])
        return out
    return mode


def free_eigenvalues(d: int, L: float = 1.0) -> tuple[float, float]:
    """(mu_0, mu_1) = (d pi^2, (d+3) pi^2) / L^2 on the box of side L."""
    return d * math.pi**2 / L**2, (d + 3) * math.pi**2 / L**2


def discrete_free_eigenvalue(h: float, modes: Sequence[int]) -> float:
    """Eigenvalue of the discrete Dirichlet Laplacian for mode numbers (m_1, ..., m_d)."""
    return sum(4.0 / h**2 * math.sin(m * math.pi * h / 2) ** 2 for m in modes)
