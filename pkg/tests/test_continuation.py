"""Branch-tracing tests.

Seeding, the fixed-point property of a zero-length step, branch
continuity against direct solves, the consistency parameter's size, step
adaptation failure, and the sweep table/CSV interface.
"""

import csv
import math
from dataclasses import replace

import numpy as np
import pytest

from coilcontact import bvp, continuation
from coilcontact.coefficients import make_simple
from coilcontact.errors import InvalidInterval, NotConverged, StepFailure


@pytest.fixture(scope="module")
def simple():
    return make_simple()


@pytest.fixture(scope="module")
def seed(simple):
    return bvp.solve_structured(simple, 5.0)


@pytest.fixture(scope="module")
def short_sweep(simple):
    return continuation.sweep(simple, 5.0, 6.0)


def test_init_seeds_state(seed):
    state = continuation.init_from_solution(seed)
    assert state.A == 1000.0
    assert state.beta == 0.0
    assert state.T == 5.0
    assert state.x0 == seed.structure.x0
    assert len(state.history) == 1
    # the linear model's window force is known a priori and held fixed
    assert state.window_force == 1.0


def test_init_rejects_sloppy_seed(seed):
    bad = replace(seed, residual_norm=1e-2)
    with pytest.raises(NotConverged):
        continuation.init_from_solution(bad)


def test_init_rejects_contact_free(simple):
    free = bvp.solve_unconstrained(simple, 2.0)
    with pytest.raises(NotConverged):
        continuation.init_from_solution(free)


def test_zero_step_is_fixed_point(seed):
    state = continuation.init_from_solution(seed)
    st1 = continuation.step(state, 0.25)
    st2 = continuation.step(st1, 0.0)
    assert st2.T == st1.T
    assert abs(st2.x0 - st1.x0) < 1e-7
    assert abs(st2.beta - st1.beta) < 1e-7
    assert len(st2.history) == len(st1.history)


def test_branch_continuity(short_sweep):
    x0s = [r["x0"] for r in short_sweep]
    for a, b in zip(x0s[:-1], x0s[1:]):
        assert abs(b - a) < 0.2


def test_branch_matches_direct_solve(simple, short_sweep):
    direct = bvp.solve_structured(simple, 6.0)
    last = short_sweep[-1]
    assert last["T"] == 6.0
    assert abs(last["x0"] - direct.structure.x0) < 2e-3
    assert abs(last["G"] - direct.structure.G) < 2e-3


def test_beta_stays_small(short_sweep):
    betas = [abs(r["beta"]) for r in short_sweep[1:]]
    assert max(betas) < 1e-2
    assert float(np.median(betas)) < 1e-3


def test_history_monotone(short_sweep):
    ts = [r["T"] for r in short_sweep]
    assert all(b > a for a, b in zip(ts[:-1], ts[1:]))


def test_energy_column_consistent(short_sweep):
    for r in short_sweep:
        assert r["energy_minus_half_T"] == pytest.approx(
            r["energy"] - 0.5 * r["T"], abs=1e-12
        )


def test_refining_smoothing_approaches_sharp_solve(simple):
    direct = bvp.solve_structured(simple, 6.0)
    err = {}
    for A in (10.0, 1000.0):
        rows = continuation.sweep(simple, 5.0, 6.0, A=A)
        err[A] = abs(rows[-1]["x0"] - direct.structure.x0)
    assert err[10.0] < 0.1
    assert err[1000.0] < 2e-3
    # the deviation scales like 1/A, so two decades of A buy about two
    # decades of agreement
    assert err[1000.0] < err[10.0] / 10.0


def test_accepted_point_solution(seed):
    state = continuation.step(continuation.init_from_solution(seed), 0.25)
    sol = state.solution
    assert sol.u.T == state.T
    assert sol.structure.x0 == pytest.approx(state.x0)
    assert sol.residual_norm < 1e-9
    assert sol.diagnostics["beta"] == state.beta
    # smoothing leaks a little force outside the contact set, so the
    # profile may graze the constraint but must not truly cross it
    assert sol.diagnostics["min_Bu"] > -1e-3
    assert math.isfinite(sol.energy)


def test_step_failure_after_halvings(seed):
    state = continuation.init_from_solution(seed)
    # an onset past T - 1 leaves no room for the contact window at any
    # trial length, so every halved step fails
    broken = replace(state, x0=4.6, s=5.0)
    with pytest.raises(StepFailure):
        continuation.step(broken, 0.25)


def test_sweep_rejects_bad_range(simple):
    with pytest.raises(InvalidInterval):
        continuation.sweep(simple, 6.0, 5.0)


def test_sweep_csv_roundtrip(simple, short_sweep, tmp_path):
    path = tmp_path / "sweep.csv"
    continuation.write_sweep_csv(path, short_sweep)
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == len(short_sweep)
    assert tuple(rows[0].keys()) == continuation.SWEEP_COLUMNS
    for got, want in zip(rows, short_sweep):
        for key in continuation.SWEEP_COLUMNS:
            assert float(got[key]) == pytest.approx(want[key], rel=1e-15, abs=1e-300)


def test_lattice_snapping():
    assert continuation.snap_length(5.0) == 5.0
    snapped = continuation.snap_length(5.1)
    assert snapped * continuation.LATTICE == round(snapped * continuation.LATTICE)
    assert abs(snapped - 5.1) <= 0.5 / continuation.LATTICE
