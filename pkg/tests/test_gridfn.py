import math

import numpy as np
import pytest

from coilcontact.contact_structure import build
from coilcontact.coefficients import make_simple
from coilcontact.errors import GridAlignmentError, InvalidInterval
from coilcontact.gridfn import (
    GridFunction,
    aligned_cells_per_unit,
    constraint_profile,
    contact_set,
    el_residual,
    energy,
    export_profile_csv,
    hamiltonian_profile,
    sample,
)

import oracles


def test_grid_basics():
    u = GridFunction(T=2.0, n=8, values=np.zeros(9))
    assert u.h == pytest.approx(0.25)
    assert u.cells_per_unit == 4
    assert u.x[0] == 0.0 and u.x[-1] == 2.0
    assert u.require_aligned() == 4


def test_grid_values_are_read_only():
    u = GridFunction(T=1.0, n=4, values=np.arange(5.0))
    with pytest.raises(ValueError):
        u.values[0] = 99.0


def test_grid_rejects_bad_shapes_and_domains():
    with pytest.raises(GridAlignmentError):
        GridFunction(T=1.0, n=4, values=np.zeros(4))
    with pytest.raises(InvalidInterval):
        GridFunction(T=-1.0, n=4, values=np.zeros(5))


def test_unaligned_grid_reports_none():
    u = GridFunction(T=1.37, n=100, values=np.zeros(101))
    assert u.cells_per_unit is None
    with pytest.raises(GridAlignmentError):
        u.require_aligned()


def test_aligned_cells_per_unit_search():
    assert aligned_cells_per_unit(6.0, k_min=256) == 256
    assert aligned_cells_per_unit(4.91635, k_min=256) == 20000
    assert aligned_cells_per_unit(2.75, k_min=250) == 252
    with pytest.raises(GridAlignmentError):
        aligned_cells_per_unit(math.pi, k_min=4, k_max=2000)


def test_piecewise_linear_call():
    u = GridFunction(T=1.0, n=2, values=np.array([0.0, 1.0, 0.0]))
    assert u(0.25) == pytest.approx(0.5)
    assert u(0.75) == pytest.approx(0.5)


def test_energy_of_constant_profile_is_exact():
    m = make_simple()
    u = sample(3.0, 64, lambda x: np.ones_like(x))
    # a-term vanishes, b(1) = 2, so F = 2 T exactly (trapezoid is exact here)
    assert energy(u, m) == pytest.approx(6.0, abs=1e-13)


def test_energy_second_order_convergence():
    # closed form for the symmetric cosh profile of the linear test model:
    # with c = cosh(T/2), integrand = 2 cosh(2(x-T/2))/c^2, F = 2 sinh(T)/c^2
    T = 3.0
    m = make_simple()
    exact = 2.0 * math.sinh(T) / math.cosh(T / 2.0) ** 2
    u_exact = oracles.unconstrained_exact(T)
    errs = []
    for k in (64, 128, 256):
        uk = sample(T, k, u_exact)
        errs.append(abs(energy(uk, m) - exact))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.15)
    assert errs[1] / errs[2] == pytest.approx(4.0, rel=0.15)


def test_constraint_profile_exact_for_piecewise_linear():
    # u(x) = x: the window integral over [x, x+1] is x + 1/2, and the
    # trapezoid sum is exact for piecewise-linear integrands
    u = sample(2.0, 4, lambda x: x)
    bu = constraint_profile(u)
    want = np.array([0.5, 0.75, 1.0, 1.25, 1.5])
    assert np.allclose(bu, want, atol=1e-14)
    assert bu.size == u.n - u.require_aligned() + 1


def test_constraint_profile_constant():
    u = sample(5.0, 32, lambda x: np.full_like(x, -0.3))
    assert np.allclose(constraint_profile(u), -0.3, atol=1e-14)


def test_contact_set_single_touch_point():
    # Bu(x) = A (x - c + 1/2)^2 for u = A (x-c)^2 - A/12: grazing contact
    A, c = 12.0, 1.7
    u = sample(3.0, 256, lambda x: A * (x - c) ** 2 - A / 12.0)
    # quadrature pushes the discrete Bu ~ A h^2/6 above zero at the graze,
    # so detection of a measure-zero touch needs a commensurate tolerance
    segs = contact_set(u, tol=1e-4)
    assert len(segs) == 1
    lo, hi = segs[0]
    assert lo <= c - 0.5 <= hi
    assert hi - lo < 0.02


def test_contact_set_interval_endpoints():
    # shift down by A eps^2 so Bu < 0 exactly on [c-1/2-eps, c-1/2+eps]
    A, c, eps = 12.0, 1.7, 0.3
    u = sample(3.0, 256, lambda x: A * (x - c) ** 2 - A / 12.0 - A * eps**2)
    segs = contact_set(u)
    assert len(segs) == 1
    lo, hi = segs[0]
    assert lo == pytest.approx(c - 0.5 - eps, abs=1e-3)
    assert hi == pytest.approx(c - 0.5 + eps, abs=1e-3)


def test_contact_set_empty_when_profile_positive():
    u = sample(3.0, 64, lambda x: np.ones_like(x))
    assert contact_set(u) == []


def test_contact_set_full_domain():
    u = sample(3.0, 64, lambda x: np.zeros_like(x))
    segs = contact_set(u)
    assert len(segs) == 1
    assert segs[0][0] == pytest.approx(0.0)
    assert segs[0][1] == pytest.approx(2.0)


def test_el_residual_on_manufactured_solution():
    # u = sin x solves -u'' + u + 1 = 2 sin x + 1
    m = make_simple()
    u = sample(3.0, 512, np.sin)
    res = el_residual(u, m, g=lambda x: 2.0 * np.sin(x) + 1.0)
    assert res[0] == 0.0 and res[-1] == 0.0
    assert np.max(np.abs(res)) < 1e-5


def test_el_residual_flags_wrong_multiplier():
    m = make_simple()
    u = sample(3.0, 512, np.sin)
    res = el_residual(u, m, g=None)
    assert np.max(np.abs(res)) > 0.5


def test_el_residual_excludes_delta_neighborhoods():
    m = make_simple()
    s = build(0.5, 1.5, 1.0, 4.0)
    u = sample(4.0, 64, lambda x: 0.1 * np.cos(x))
    res = el_residual(u, m, g=s)
    x = u.x
    h = u.h
    for pos, _ in s.deltas:
        assert np.all(res[np.abs(x - pos) <= h] == 0.0)


def test_hamiltonian_profile_single_segment_conserved():
    T = 3.0
    m = make_simple()
    u_exact = oracles.unconstrained_exact(T)
    u = sample(T, 512, u_exact)
    c = math.cosh(T / 2.0)
    up = lambda x: 2.0 * np.sinh(x - T / 2.0) / c

    segs = hamiltonian_profile(u, m, g=None, uprime=up(u.x))
    assert len(segs) == 1
    assert segs[0].g == 0.0
    assert segs[0].H == pytest.approx(2.0 / c**2, abs=1e-10)
    assert segs[0].deviation < 1e-10

    # with finite-difference u' the deviation is only quadrature-limited
    segs_fd = hamiltonian_profile(u, m, g=None)
    assert segs_fd[0].deviation < 1e-4


def test_hamiltonian_profile_segments_follow_structure():
    s = build(0.0, 1.5, 1.0, 4.0)
    u = sample(4.0, 64, lambda x: 0.05 * np.sin(x))
    segs = hamiltonian_profile(u, make_simple(), g=s)
    gvals = [seg.g for seg in segs]
    assert gvals == pytest.approx([0.8, 1.2, 0.8, 1.2, 0.8, 0.0])
    assert segs[-1].lo == pytest.approx(2.5)
    assert segs[-1].hi == pytest.approx(4.0)


def test_export_profile_roundtrip(tmp_path):
    m = make_simple()
    u = sample(2.0, 16, lambda x: np.cos(x))
    path = tmp_path / "profile.csv"
    export_profile_csv(path, u, model=m, g=None)
    rows = path.read_text().strip().splitlines()
    assert rows[0] == "x,u,uprime,Bu,g,residual"
    assert len(rows) == u.n + 2
    first = rows[1].split(",")
    assert float(first[0]) == 0.0
    assert float(first[1]) == pytest.approx(1.0, abs=1e-15)
    # Bu defined for the first n-k+1 rows, nan afterwards
    last = rows[-1].split(",")
    assert math.isnan(float(last[3]))
    mid = rows[2].split(",")
    assert not math.isnan(float(mid[3]))
