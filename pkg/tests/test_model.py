import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from spectral_gap import eigen
from spectral_gap import model as md

PI2 = math.pi**2
ALL_2D = [md.Zero(), md.FastDecay(), md.RegularizedQuadratic(), md.OneSidedStrip(), md.Bump()]


# -- potentials --------------------------------------------------------------

def test_potential_validation():
    with pytest.raises(ValueError):
        md.FastDecay(C=0.0)
    with pytest.raises(ValueError):
        md.Bump(radius=-1.0)
    with pytest.raises(ValueError):
        md.Zero(dim=1)
    assert md.FastDecay(C=2.0).cap == 2.0


@pytest.mark.parametrize("spec", ALL_2D + [md.Bump(2.0, 0.5, dim=3), md.FastDecay(dim=3)])
def test_dict_round_trip(spec):
    assert md.PotentialSpec.from_dict(spec.to_dict()) == spec


def test_from_dict_rejects_unknown():
    with pytest.raises(ValueError, match="unknown keys"):
        md.PotentialSpec.from_dict({"kind": "Bump", "height": 1.0, "width": 2.0})
    with pytest.raises(ValueError, match="unknown potential"):
        md.PotentialSpec.from_dict({"kind": "Coulomb"})


def test_pointwise_values():
    assert md.FastDecay()([[0.0, 0.0]])[0] == 1.0
    assert md.FastDecay()([[2.0, 0.0]])[0] == pytest.approx(1 / 8)
    assert md.RegularizedQuadratic(0.04)([[0.5, 0.0], [2.0, 0.0]]).tolist() == [0.0, 0.01]
    assert md.OneSidedStrip()([[0.5, 9.0], [1.5, 0.0]]).tolist() == [1.0, 0.0]


def test_l1_norms():
    assert md.l1_norm(md.Zero()) == 0.0
    assert md.l1_norm(md.Bump(1.0, 1.0, dim=3)) == pytest.approx(4 / 3 * math.pi)
    # min(1, r^-3) over the plane: pi + 2 pi
    assert md.l1_norm(md.FastDecay()) == pytest.approx(3 * math.pi)


# -- geometry ----------------------------------------------------------------

@pytest.mark.parametrize("r,box", [(0.3, (-0.1, 0.4, 0.05, 0.5)), (1.0, (0.2, 0.9, -0.7, 0.3)),
                                   (0.5, (-1.0, 1.0, -1.0, 1.0)), (0.2, (0.3, 0.5, 0.3, 0.5))])
def test_disc_rect_area(r, box):
    x0, x1, y0, y1 = box

    def chord(x):
        half = math.sqrt(max(r * r - x * x, 0.0))
        return max(0.0, min(y1, half) - max(y0, -half))

    kinks = [0.0] + [s * math.sqrt(r * r - y * y) for y in (y0, y1) if abs(y) < r for s in (-1, 1)]
    a, b = max(x0, -r), min(x1, r)
    ref, _ = integrate.quad(chord, a, b, points=[k for k in kinks if a < k < b] or None, epsabs=1e-14)
    ref = ref if x0 < r and x1 > -r else 0.0
    assert md.disc_rect_area(r, x0, x1, y0, y1) == pytest.approx(ref, abs=1e-12)


def test_circle_rect_length_full_and_quarter():
    assert md.circle_rect_length(0.3, -1, 1, -1, 1) == pytest.approx(2 * math.pi * 0.3)
    assert md.circle_rect_length(0.3, 0, 1, 0, 1) == pytest.approx(math.pi * 0.3 / 2)


def test_ball_box_volume():
    assert md.ball_box_volume(0.4, np.full(3, -1.0), np.full(3, 1.0)) == pytest.approx(4 / 3 * math.pi * 0.4**3)
    assert md.ball_box_volume(0.4, np.zeros(3), np.ones(3)) == pytest.approx(math.pi * 0.4**3 / 6)


# -- cell averages -----------------------------------------------------------

def test_cell_average_examples():
    h = 0.1
    cell = [(-h / 2, h / 2), (-h / 2, h / 2)]
    assert md.potential_cell_average(md.Zero(), 100, cell) == 0.0
    assert md.potential_cell_average(md.OneSidedStrip(1, 1), 100, cell) == pytest.approx(2000, rel=1e-13)
    assert md.potential_cell_average(md.OneSidedStrip(1, 1), 100, [(0.2, 0.3), (-h / 2, h / 2)]) == 0.0


def test_cell_average_regquad_split_reference():
    spec, L = md.RegularizedQuadratic(0.04), 10.0
    cell = [(0.05, 0.15), (-0.02, 0.09)]

    def f(y, x):
        r = L * math.hypot(x, y)
        return L * L * spec.c / r**2 if r >= 1 else 0.0

    # split the x range at the kink circle so quad sees smooth pieces
    total = 0.0
    for xa, xb in [(0.05, 0.1), (0.1, 0.15)]:
        def inner(x):
            ys = [-0.02, 0.09]
            if abs(x) < 0.1:
                yk = math.sqrt(0.01 - x * x)
                ys = sorted({-0.02, 0.09, *[y for y in (-yk, yk) if -0.02 < y < 0.09]})
            return sum(integrate.quad(f, a, b, args=(x,), epsabs=1e-14)[0] for a, b in zip(ys, ys[1:]))
        total += integrate.quad(inner, xa, xb, epsabs=1e-13, limit=200)[0]
    ref = total / (0.1 * 0.11)
    assert md.potential_cell_average(spec, L, cell) == pytest.approx(ref, rel=1e-8)


@pytest.mark.parametrize("spec,L", [(md.OneSidedStrip(1, 1), 100.0), (md.Bump(), 50.0),
                                    (md.Bump(1.0, 1.0, dim=3), 40.0)])
def test_grid_mass_is_exact(spec, L):
    n = 31
    e = md.cell_edges(n)
    vol = np.diff(e)
    w = vol
    for _ in range(spec.dim - 1):
        w = np.multiply.outer(w, vol)
    mass = float(np.sum(md.grid_potential(spec, L, n) * w))
    # integral of L^2 v(L y) over the unit box equals L^(2-d) times the mass of v inside the box
    if isinstance(spec, md.OneSidedStrip):
        expected = 2 * spec.delta * spec.gamma * L
    else:
        expected = md.l1_norm(spec) * L ** (2 - spec.dim)
    assert mass == pytest.approx(expected, rel=1e-10)


def test_cell_edges_tile_the_box():
    e = md.cell_edges(15)
    assert e[0] == -0.5 and e[-1] == 0.5
    assert np.all(np.diff(e) > 0)


# -- assembly ----------------------------------------------------------------

def test_stencil_diagonal():
    op = md.assemble(md.BoxProblem(1.0, md.Zero(), 8))
    assert np.allclose(op.diagonal(), 4 / op.h**2)
    small = md.laplacian(2, 3, 0.25)
    assert np.all(small.diagonal() == 64.0)


def test_free_discrete_eigenvalue():
    op = md.assemble(md.BoxProblem(1.0, md.Zero(), 15))
    lam = np.linalg.eigvalsh(op.to_scipy().toarray())[0]
    assert lam == pytest.approx(md.discrete_free_eigenvalue(1 / 16, [1, 1]), rel=1e-12)
    # 8 * 256 * sin(pi/32)^2
    assert lam == pytest.approx(19.675872867092, abs=1e-9)


@pytest.mark.parametrize("spec", ALL_2D)
def test_assembled_symmetric_and_diagonal_floor(spec):
    op = md.assemble(md.BoxProblem(20.0, spec, 15))
    a = op.to_scipy()
    assert op.symmetric and (a != a.T).nnz == 0
    assert np.all(op.diagonal() >= 4 / op.h**2)


@pytest.mark.parametrize("spec", ALL_2D[1:])
def test_monotone_in_potential(spec):
    free = eigen.smallest_eigenpairs(md.assemble(md.BoxProblem(16.0, md.Zero(), 31)), 1)
    pert = eigen.smallest_eigenpairs(md.assemble(md.BoxProblem(16.0, spec, 31)), 1)
    assert pert.eigenvalues[0] >= free.eigenvalues[0]


def test_second_order_convergence():
    ratios = []
    for n in (63, 127, 255):
        h = 1 / (n + 1)
        lam = md.discrete_free_eigenvalue(h, [1, 1])
        lam_num = eigen.smallest_eigenpairs(md.assemble(md.BoxProblem(1.0, md.Zero(), n)), 1).eigenvalues[0]
        assert lam_num == pytest.approx(lam, rel=1e-10)
        ratios.append(abs(lam_num - 2 * PI2) / h**2)
    assert max(ratios) < 1.01 * min(ratios)
    assert max(ratios) < 2 * PI2 * PI2 / 12 * 1.01


@pytest.mark.parametrize("spec,L", [(md.Zero(), 7.0), (md.FastDecay(), 64.0), (md.OneSidedStrip(), 32.0)])
def test_frames_are_exact_multiples(spec, L):
    scaled = md.BoxProblem(L, spec, 31)
    phys = md.scale_transform(scaled)
    a = md.assemble(scaled).to_scipy()
    b = md.assemble(phys).to_scipy()
    assert abs(b * L**2 - a).max() <= 1e-12 * abs(a).max()
    la = np.linalg.eigvalsh(a.toarray())[0]
    lb = np.linalg.eigvalsh(b.toarray())[0]
    assert lb * L**2 == pytest.approx(la, rel=1e-12)


def test_scale_transform_round_trip():
    p = md.BoxProblem(3.0, md.Bump(), 9)
    assert md.scale_transform(p).frame is md.Frame.PHYSICAL
    assert md.scale_transform(md.scale_transform(p)) == p


def test_budget_error():
    with pytest.raises(md.AssemblyBudgetError):
        md.assemble(md.BoxProblem(1.0, md.Zero(), 2049))
    with pytest.raises(md.AssemblyBudgetError):
        md.assemble(md.BoxProblem(1.0, md.Zero(dim=3), 129))
    with pytest.raises(MemoryError):
        md.assemble(md.BoxProblem(1.0, md.Zero(), 20), budget=100)


def test_box_problem_validation():
    with pytest.raises(ValueError):
        md.BoxProblem(0.0, md.Zero(), 15)
    with pytest.raises(ValueError):
        md.BoxProblem(1.0, md.Zero(), 4)


# -- reference modes ---------------------------------------------------------

def test_reference_mode_values():
    g = md.reference_mode(2, md.GROUND)
    assert g(np.array([0.0, 0.0])) == pytest.approx(2.0)
    e1 = md.reference_mode(2, md.first_excited(1))
    ys = np.linspace(-0.5, 0.5, 11)
    assert np.allclose(e1(np.c_[np.zeros(11), ys]), 0.0)
    with pytest.raises(ValueError):
        md.reference_mode(2, md.first_excited(3))


@pytest.mark.parametrize("d,index", [(2, md.GROUND), (2, md.first_excited(2)), (3, md.first_excited(1))])
def test_reference_mode_normalised(d, index):
    x, w = np.polynomial.legendre.leggauss(40)
    x, w = x / 2, w / 2
    grids = np.meshgrid(*([x] * d), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    weights = np.prod(np.meshgrid(*([w] * d), indexing="ij"), axis=0).ravel()
    norm = float(np.sum(weights * md.reference_mode(d, index)(pts) ** 2))
    assert norm == pytest.approx(1.0, abs=1e-10)


def test_free_eigenvalues():
    assert md.free_eigenvalues(2) == pytest.approx((2 * PI2, 5 * PI2))
    assert md.free_eigenvalues(3, 2.0) == pytest.approx((3 * PI2 / 4, 6 * PI2 / 4))


@settings(max_examples=25, deadline=None)
@given(st.floats(0.01, 0.49), st.floats(0.01, 0.49), st.floats(0.05, 0.3))
def test_cell_integral_additivity(a, b, r):
    # splitting a cell in two conserves the bump's integral
    spec, L = md.Bump(1.0, r), 1.0
    lo, mid, hi = -a, (b - a) / 2, b
    whole = md.cell_integrals(spec, L, np.array([[lo, -0.3]]), np.array([[hi, 0.4]]))[0]
    parts = md.cell_integrals(spec, L, np.array([[lo, -0.3], [mid, -0.3]]), np.array([[mid, 0.4], [hi, 0.4]]))
    assert whole == pytest.approx(parts.sum(), abs=1e-12)
