import csv
import json
import math

import numpy as np
import pytest

from spectral_gap import lab
from spectral_gap import model as md
from spectral_gap import specialfn as sf

PI2 = math.pi**2


def rec(L, l0, l1, converged=True):
    return lab.GapSweepRecord(L, l0, l1, l1 - l0, (l1 - l0) / L**2, 31, False, converged)


@pytest.fixture(scope="module")
def zero_report():
    return lab.sweep_gap(md.Zero(), [1.0, 4.0], 63)


def test_zero_sweep_gives_free_gap(zero_report):
    for r in zero_report.records:
        assert r.gap == pytest.approx(3 * PI2, rel=1e-4)
        assert r.lambda0 == pytest.approx(2 * PI2, rel=1e-4)
        assert r.physical_gap * r.L**2 == r.gap
        assert r.extrapolated and r.converged
    assert [v.name for v in zero_report.verdicts] == ["free_gap_3pi2"]
    assert zero_report.passed


def test_richardson_improves_on_plain():
    plain = lab.gap_record(md.Zero(), 1.0, 31, richardson=False)
    extra = lab.gap_record(md.Zero(), 1.0, 31, richardson=True)
    assert abs(extra.lambda0 - 2 * PI2) < abs(plain.lambda0 - 2 * PI2) / 20


def test_prolong_reproduces_linear_function():
    n = 7
    x = -0.5 + np.arange(1, n + 1) / (n + 1)
    xf = -0.5 + np.arange(1, 2 * n + 2) / (2 * n + 2)
    # a function vanishing at the walls and linear between nodes is kept exactly
    f = lambda t: 0.5 - np.abs(t)
    out = lab.prolong(f(x)[:, None], n, 1)[:, 0]
    assert np.allclose(out, f(xf))
    assert lab.prolong(np.ones((n * n, 2)), n, 2).shape == ((2 * n + 1) ** 2, 2)


def test_sweep_validation():
    with pytest.raises(ValueError):
        lab.sweep_gap(md.Zero(), [1.0], 15)
    with pytest.raises(ValueError):
        lab.sweep_gap(md.Zero(), [2.0, 1.0], 15)


def test_parallel_sweep_matches_serial():
    Ls = [2.0, 4.0, 8.0]
    a = lab.sweep_gap(md.Bump(), Ls, 15, richardson=False)
    b = lab.sweep_gap(md.Bump(), Ls, 15, richardson=False, workers=2)
    assert a.records == b.records


# -- verdicts ----------------------------------------------------------------

def test_strip_verdicts_on_synthetic_records():
    good = [rec(10, 43.0, 53.0), rec(100, 48.0, 50.0), rec(1000, 49.0, 49.5)]
    v = {x.name: x for x in lab.verdicts_for(md.OneSidedStrip(), good)}
    assert v["gap_strictly_decreasing"].passed
    assert v["gap_reduction_half"].passed
    assert v["ground_nondecreasing"].passed
    assert v["first_excited_limsup"].passed
    bad = [rec(10, 43.0, 53.0), rec(100, 44.0, 54.5)]
    v = {x.name: x for x in lab.verdicts_for(md.OneSidedStrip(), bad)}
    assert v["gap_strictly_decreasing"].passed is False
    assert v["first_excited_limsup"].passed is False


def test_boundedness_verdicts():
    records = [rec(8, 30.0, 50.0), rec(16, 30.0, 50.5), rec(32, 30.0, 50.6)]
    v = {x.name: x for x in lab.verdicts_for(md.Bump(), records)}
    assert v["gap_bounded_window"].passed
    assert v["gap_settles_final_doubling"].passed
    jumpy = records[:2] + [rec(32, 30.0, 60.0)]
    v = {x.name: x for x in lab.verdicts_for(md.Bump(), jumpy)}
    assert v["gap_settles_final_doubling"].passed is False


def test_non_converged_record_gives_indeterminate():
    records = [rec(8, 30.0, 50.0), rec(16, 30.0, 50.5, converged=False)]
    for v in lab.verdicts_for(md.FastDecay(), records):
        assert v.passed is None


def test_quadratic_lower_bound_value():
    c = 0.04
    m = min(sf.bessel_zero(math.sqrt(1.04), 1), sf.bessel_zero(0.2, 2))
    expected = 0.5 * (2 * m * m - 4 * sf.bessel_zero(0.2, 1) ** 2)
    assert lab.quadratic_lower_bound(c) == pytest.approx(expected, rel=1e-14)
    assert expected > 0


# -- scaling identity --------------------------------------------------------

@pytest.mark.parametrize("spec", [md.Zero(), md.FastDecay(), md.Bump()])
def test_scaling_identity(spec):
    phys, scaled = lab.scaling_identity(spec, 7.0, 31)
    assert phys == pytest.approx(scaled, rel=1e-12)


# -- separable oracle --------------------------------------------------------

def test_oracle_free_case():
    l0, l1 = lab.separable_gap_oracle(md.Zero(), 10.0, 2000)
    assert l0 == pytest.approx(2 * PI2, rel=1e-6)
    assert l1 == pytest.approx(5 * PI2, rel=1e-6)


def test_oracle_strip_example():
    l0, l1 = lab.separable_gap_oracle(md.OneSidedStrip(1, 1), 100.0, 10_000)
    assert 2 * PI2 < l0 < 5 * PI2 + 1
    assert 2 * PI2 < l1 < 5 * PI2 + 1
    assert l1 - l0 < 3 * PI2


def test_oracle_odd_mode_parity():
    n = 2001  # odd, so x = 0 is a node
    _, vecs, x = lab.strip_modes_1d(md.OneSidedStrip(1, 1), 30.0, n)
    mid = n // 2
    assert x[mid] == pytest.approx(0.0, abs=1e-15)
    odd = vecs[:, 1] / np.max(np.abs(vecs[:, 1]))
    assert abs(odd[mid]) <= 1e-6
    even = vecs[:, 0]
    assert np.allclose(even, even[::-1], atol=1e-10)


def test_oracle_validation():
    with pytest.raises(ValueError):
        lab.separable_gap_oracle(md.OneSidedStrip(), 10.0, 999)
    with pytest.raises(TypeError):
        lab.separable_gap_oracle(md.Bump(), 10.0, 2000)


def test_oracle_matches_planar_solve_small_grid():
    # same x-discretisation in both; the planar y-direction carries an O(h^2) error only
    L, n = 10.0, 127
    r = lab.gap_record(md.OneSidedStrip(1, 1), L, n)
    l0, l1 = lab.separable_gap_oracle(md.OneSidedStrip(1, 1), L, 10_000)
    assert r.lambda0 == pytest.approx(l0, rel=2e-3)
    assert r.lambda1 == pytest.approx(l1, rel=2e-3)


# -- d = 3 -------------------------------------------------------------------

def test_higher_dim_zero_example():
    rep = lab.higher_dim_check(md.Zero(dim=3), [1.0], 63)
    row = rep.rows[0]
    assert row["lambda0"] == pytest.approx(3 * PI2, rel=1e-2)
    assert row["lambda1"] == pytest.approx(6 * PI2, rel=1e-2)


def test_higher_dim_validation():
    with pytest.raises(ValueError):
        lab.higher_dim_check(md.Bump(), [8.0], 31)
    with pytest.raises(ValueError):
        lab.higher_dim_check(md.Bump(dim=3), [8.0], 97)


# -- radial studies ----------------------------------------------------------

def test_radial_convergence_rows():
    rows = lab.radial_convergence_study(0.5, 1.0, [10.0, 100.0])
    assert rows[1]["err0"] < rows[0]["err0"]
    assert rows[0]["limit0"] == pytest.approx(sf.bessel_zero(math.sqrt(0.5), 1) ** 2, rel=1e-12)


def test_quadratic_chain():
    ch = lab.quadratic_chain(0.04)
    assert ch["difference"] == pytest.approx(ch["closed_form"], rel=1e-10)
    assert ch["difference"] > 0
    m = min(sf.bessel_zero(math.sqrt(1.04), 1), sf.bessel_zero(0.2, 2))
    assert ch["nu1_outer"] == pytest.approx(2 * m * m, rel=1e-10)


# -- persistence -------------------------------------------------------------

def test_persist_round_trip(zero_report, tmp_path):
    jp, cp = lab.persist_report(zero_report, tmp_path / "zero.json")
    back = lab.load_report(jp)
    assert back.potential == zero_report.potential
    assert back.verdicts == zero_report.verdicts
    for a, b in zip(back.records, zero_report.records):
        assert a == b
    with open(cp) as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == lab.CSV_COLUMNS
    assert len(rows) == 1 + len(zero_report.records)
    assert float(rows[1][1]) == pytest.approx(zero_report.records[0].lambda0, rel=1e-11)


def test_schema_mismatch(zero_report, tmp_path):
    jp, _ = lab.persist_report(zero_report, tmp_path / "r")
    data = json.loads(jp.read_text())
    data["schema"] = 99
    jp.write_text(json.dumps(data))
    with pytest.raises(lab.SchemaError):
        lab.load_report(jp)
