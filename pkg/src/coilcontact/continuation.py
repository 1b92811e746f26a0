"""Branch tracing in the domain length T.

Each accepted point solves the full-domain boundary value problem with an
arctan-smoothed force profile of steepness A: shooting unknowns are the
boundary slope, the contact onset x0, and a consistency parameter beta
added to every plateau value of the profile. For the linear test model the
window force of any interior-contact solution is exactly 1, so it is fixed
and beta absorbs the whole numerical defect of the smoothing; analytically
beta = 0, and its observed size at accepted points is a running health
check on the discretization. Models without a known window value carry the
force as a fourth unknown, paired with the slope symmetry of the branch.

All visited lengths are snapped to a dyadic lattice so an aligned output
grid always exists for the solved profile.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import bvp
from . import contact_structure as cs
from . import gridfn
from .coefficients import CoefficientModel
from .errors import (
    InvalidInterval,
    NotConverged,
    SolverError,
    StepFailure,
)

# Denominator of the dyadic lattice the sweep walks on. Any T = m / LATTICE
# admits an aligned output grid with LATTICE cells per unit, so building
# the solved profile never fails on grid alignment no matter where the
# step adaptation lands.
LATTICE = 4096

MIN_STEP = 1.0 / LATTICE
MAX_STEP = 1.0

# beta soaks up the arctan tails, which scale like 1/A, so the acceptance
# bound follows suit; at the reference steepness A = 1000 it is 1e-2.
BETA_SCALE = 10.0


def beta_bound(A: float) -> float:
    return BETA_SCALE / A

# Width of the refined integration zone around each smoothed jump and the
# step used inside it, both in units of the smoothing scale 1/A. Outside
# the zones the profile varies on the scale of the plateau widths and the
# nominal step handles it.
ZONE_HALFWIDTH = 32.0
ZONE_REFINEMENT = 8.0


def snap_length(T: float) -> float:
    """Round a domain length onto the sweep lattice."""
    return round(T * LATTICE) / LATTICE


@dataclass
class ContinuationState:
    """One accepted point on the branch plus what the next step needs."""

    solution: gridfn.Solution
    T: float
    x0: float
    G: float
    beta: float
    s: float  # boundary slope u'(0), the shooting unknown
    A: float
    step: float
    history: list = field(default_factory=list)  # (T, x0, G, beta, energy)
    window_force: float | None = None  # fixed window value; None = solve for it
    tol: float = 1e-9
    h: float = 1e-3
    _prev: tuple | None = None  # (T, z) of the previous accepted point


def _default_window_force(model: CoefficientModel) -> float | None:
    """A priori window force, when the model admits one.

    Integrating the stationarity operator over one contact cell kills the
    derivative terms (the cell profile is 1-periodic) and, for the linear
    test model, reduces the forcing integral to db(0) + the cell average
    of u, which vanishes. No such closed value exists for the rod.
    """
    if model.kind == "simple":
        return 1.0
    return None


def _smoothed_profile(T: float, x0: float, G: float, beta: float, A: float):
    """Full-domain smoothed forcing: (gfun, jumps, structure).

    Plateau values are the sharp window-recurrence levels shifted by beta;
    every Heaviside edge of the sharp profile becomes an arctan ramp of
    steepness A. Raises InvalidInterval (via the structure build) when the
    trial x0 leaves no contact interval; the Newton line search treats
    that as a failed trial point.
    """
    x1 = T - x0 - 1.0
    if x1 < x0:
        raise InvalidInterval(f"no contact interval for T={T}, x0={x0}")
    structure = cs.build(x0, x1, max(G, 0.0), T)
    if structure.integer_case:
        jumps = [structure.x0, structure.x1 + 1.0]
        levels = [structure.G + beta]
    else:
        jumps = structure.jump_points()
        levels = [
            (structure.g1 if i % 2 == 0 else structure.g2) + beta
            for i in range(len(jumps) - 1)
        ]

    def gfun(x):
        return cs.smoothed_steps(x, jumps, levels, A)

    return gfun, jumps, structure


def _zones(jumps, cuts, hi_end: float, A: float, h: float):
    """Partition [0, hi_end] into (lo, hi, h_local) integration zones.

    Zone boundaries include the forced cut points (window ends, so the
    chained state is available exactly there) and the smoothing cores
    around each jump, which get the refined step.
    """
    w = ZONE_HALFWIDTH / A
    pts = {0.0, hi_end}
    for j in jumps:
        for c in (j - w, j, j + w):
            if 0.0 < c < hi_end:
                pts.add(c)
    for c in cuts:
        if 0.0 < c < hi_end:
            pts.add(c)
    bounds = sorted(pts)
    h_fine = min(h, 1.0 / (ZONE_REFINEMENT * A))
    out = []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        if hi - lo < 1e-12:
            continue
        mid = 0.5 * (lo + hi)
        near = min(abs(mid - j) for j in jumps) <= w + 1e-12
        out.append((lo, hi, h_fine if near else h))
    return out


def _shoot_branch(
    model: CoefficientModel,
    T: float,
    z,
    A: float,
    h: float,
    window_force: float | None,
    record: bool = False,
):
    """Integrate the smoothed full-domain problem at trial point z.

    With a fixed window force z = (s, x0, beta) and the domain is cut at
    T/2, where symmetry supplies the far boundary condition; the residuals
    are (u'(T/2), cell periodicity, window integral). With the force free
    z = (s, x0, G, beta), the integration runs to T and the residuals are
    (u(T)-1, cell periodicity, window integral, u'(T)+s).

    Returns (residuals, chain) where chain holds the recorded node arrays
    when record is set.
    """
    if window_force is None:
        s, x0, G, beta = (float(v) for v in z)
    else:
        s, x0, beta = (float(v) for v in z)
        G = float(window_force)
    gfun, jumps, structure = _smoothed_profile(T, x0, G, beta, A)
    half = window_force is not None
    hi_end = 0.5 * T if half else T
    if half and x0 + 1.0 >= hi_end - 1e-9:
        # window must sit strictly inside the half domain for the cut
        raise InvalidInterval(
            f"window [x0, x0+1] = [{x0}, {x0 + 1.0}] reaches past T/2 = {hi_end}"
        )

    u, w, q = 1.0, s, 0.0
    u_at, q_at = {}, {}
    chain = [] if record else None
    for lo, hi, h_loc in _zones(jumps, (x0, x0 + 1.0), hi_end, A, h):
        n = bvp._steps_for(hi - lo, h_loc)
        lattice = np.linspace(lo, hi, 2 * n + 1)
        gs = gfun(lattice)
        if record:
            xs, us, ws, qs = bvp._rk4_sampled(
                model, gs, lo, hi, u, w, q, n, record=True
            )
            u, w, q = float(us[-1]), float(ws[-1]), float(qs[-1])
            chain.append((xs, us, ws, qs))
        else:
            u, w, q = bvp._rk4_sampled(model, gs, lo, hi, u, w, q, n)
        u_at[hi] = u
        q_at[hi] = q

    r_cell = u_at[x0 + 1.0] - u_at[x0]
    r_win = q_at[x0 + 1.0] - q_at[x0]
    if half:
        res = np.array([w, r_cell, r_win])
    elif window_force is None:
        res = np.array([u - 1.0, r_cell, r_win, w + s])
    else:
        res = np.array([u - 1.0, r_cell, r_win])
    return res, chain


def _mirror_chain(chain, T: float):
    """Reflect a half-domain node chain about T/2 to cover [0, T]."""
    x = np.concatenate([seg[0][(1 if i else 0) :] for i, seg in enumerate(chain)])
    u = np.concatenate([seg[1][(1 if i else 0) :] for i, seg in enumerate(chain)])
    w = np.concatenate([seg[2][(1 if i else 0) :] for i, seg in enumerate(chain)])
    q = np.concatenate([seg[3][(1 if i else 0) :] for i, seg in enumerate(chain)])
    xf = np.concatenate([x, T - x[-2::-1]])
    uf = np.concatenate([u, u[-2::-1]])
    wf = np.concatenate([w, -w[-2::-1]])
    qf = np.concatenate([q, 2.0 * q[-1] - q[-2::-1]])
    return xf, uf, wf, qf


def _flatten_chain(chain):
    x = np.concatenate([seg[0][(1 if i else 0) :] for i, seg in enumerate(chain)])
    u = np.concatenate([seg[1][(1 if i else 0) :] for i, seg in enumerate(chain)])
    w = np.concatenate([seg[2][(1 if i else 0) :] for i, seg in enumerate(chain)])
    q = np.concatenate([seg[3][(1 if i else 0) :] for i, seg in enumerate(chain)])
    return x, u, w, q


def _build_solution(
    model: CoefficientModel,
    T: float,
    z,
    A: float,
    h: float,
    window_force: float | None,
    res_norm: float,
    iters: int,
) -> gridfn.Solution:
    """Record the trajectory at a converged point and package it."""
    _, chain = _shoot_branch(model, T, z, A, h, window_force, record=True)
    if window_force is None:
        s, x0, G, beta = (float(v) for v in z)
        xf, uf, wf, qf = _flatten_chain(chain)
    else:
        s, x0, beta = (float(v) for v in z)
        G = float(window_force)
        xf, uf, wf, qf = _mirror_chain(chain, T)
    gfun, _, structure = _smoothed_profile(T, x0, G, beta, A)
    traj = bvp.Trajectory(
        x=xf, u=uf, uprime=wf, q=qf, usecond=bvp._usecond_nodes(model, uf, wf, gfun(xf))
    )
    k = gridfn.aligned_cells_per_unit(T, k_min=max(4, round(1.0 / h)))
    n = int(round(k * T))
    xg = np.linspace(0.0, T, n + 1)
    u = gridfn.GridFunction(T=T, n=n, values=traj(xg))
    uprime = traj.derivative(xg)
    diag = {
        "s": s,
        "beta": beta,
        "A": A,
        "newton_iterations": iters,
        "min_Bu": float(np.min(gridfn.constraint_profile(u))),
    }
    return gridfn.Solution(
        u=u,
        structure=structure,
        energy=gridfn.energy(u, model),
        hamiltonian_segments=gridfn.hamiltonian_profile(
            u, model, g=structure, uprime=uprime
        ),
        residual_norm=res_norm,
        uprime=uprime,
        dense=lambda x: traj(x),
        dense_uprime=lambda x: traj.derivative(x),
        diagnostics=diag,
        model=model,
    )


def _correct(model, T, z0, A, tol, h, window_force):
    """Newton-correct the smoothed system from z0; returns (z, norm, iters)."""

    def resfun(z):
        r, _ = _shoot_branch(model, T, z, A, h, window_force)
        return r

    z, r, iters = bvp.newton_solve(resfun, np.asarray(z0, dtype=float), tol=tol)
    return z, float(np.max(np.abs(r))), iters


def init_from_solution(
    sol: gridfn.Solution,
    A: float = 1000.0,
    step: float = 0.25,
    tol: float = 1e-9,
    h: float = 1e-3,
) -> ContinuationState:
    """Seed a branch at an existing contact-bearing solution; beta starts 0."""
    if sol.structure is None:
        raise NotConverged("cannot continue a contact-free solution")
    if sol.residual_norm > 1e-6:
        raise NotConverged(
            f"seed residual {sol.residual_norm:.3e} too large to start a branch"
        )
    if sol.model is None:
        raise NotConverged("seed solution does not carry its coefficient model")
    st = sol.structure
    if sol.diagnostics.get("s") is not None:
        s = float(sol.diagnostics["s"])
    else:
        s = float(sol.uprime[0])
    T = float(sol.u.T)
    return ContinuationState(
        solution=sol,
        T=T,
        x0=float(st.x0),
        G=float(st.G),
        beta=0.0,
        s=s,
        A=float(A),
        step=float(min(max(step, MIN_STEP), MAX_STEP)),
        history=[(T, float(st.x0), float(st.G), 0.0, float(sol.energy))],
        window_force=_default_window_force(sol.model),
        tol=tol,
        h=h,
    )


def _pack(state: ContinuationState) -> np.ndarray:
    if state.window_force is None:
        return np.array([state.s, state.x0, state.G, state.beta])
    return np.array([state.s, state.x0, state.beta])


def _predict(state: ContinuationState, T_new: float) -> np.ndarray:
    z1 = _pack(state)
    if state._prev is None:
        return z1
    T0, z0 = state._prev
    if abs(state.T - T0) < 1e-12:
        return z1
    return z1 + (z1 - np.asarray(z0)) * ((T_new - state.T) / (state.T - T0))


def _unpack(state: ContinuationState, z) -> tuple[float, float, float, float]:
    if state.window_force is None:
        return float(z[0]), float(z[1]), float(z[2]), float(z[3])
    return float(z[0]), float(z[1]), float(state.window_force), float(z[2])


def step(state: ContinuationState, dT_target: float) -> ContinuationState:
    """Advance the branch by one accepted point toward T + dT_target.

    The trial increment starts at min(|dT_target|, state.step), halves on
    any corrector failure (and on a corrected point with G <= 0 or
    |beta| >= beta_bound(A), which is 1e-2 at the reference steepness),
    and grows 1.5x after a fast correction. StepFailure after ten
    halvings.
    """
    model = state.solution.model
    wf = state.window_force
    if dT_target == 0.0:
        z, res_norm, iters = _correct(
            model, state.T, _pack(state), state.A, state.tol, state.h, wf
        )
        s, x0, G, beta = _unpack(state, z)
        sol = _build_solution(model, state.T, z, state.A, state.h, wf, res_norm, iters)
        return replace(state, solution=sol, s=s, x0=x0, G=G, beta=beta)

    direction = 1.0 if dT_target > 0 else -1.0
    dt = min(abs(dT_target), max(state.step, MIN_STEP), MAX_STEP)
    last_error: Exception | None = None
    for _ in range(11):
        dt_lat = max(round(dt * LATTICE), 1) / LATTICE
        T_new = snap_length(state.T + direction * dt_lat)
        if abs(T_new - state.T) < 0.5 / LATTICE:
            break
        z_pred = _predict(state, T_new)
        try:
            z, res_norm, iters = _correct(
                model, T_new, z_pred, state.A, state.tol, state.h, wf
            )
        except (SolverError, InvalidInterval) as exc:
            last_error = exc
            dt *= 0.5
            continue
        s, x0, G, beta = _unpack(state, z)
        if G <= 0.0 or abs(beta) >= beta_bound(state.A):
            last_error = NotConverged(
                f"corrected point at T={T_new} left the branch "
                f"(G={G:.3e}, beta={beta:.3e})"
            )
            dt *= 0.5
            continue
        sol = _build_solution(model, T_new, z, state.A, state.h, wf, res_norm, iters)
        next_step = min(dt_lat * 1.5, MAX_STEP) if iters <= 4 else dt_lat
        return replace(
            state,
            solution=sol,
            T=T_new,
            s=s,
            x0=x0,
            G=G,
            beta=beta,
            step=next_step,
            history=state.history + [(T_new, x0, G, beta, float(sol.energy))],
            _prev=(state.T, _pack(state)),
        )
    raise StepFailure(
        f"no accepted step from T={state.T} after 10 halvings "
        f"(last trial dT={dt:.2e}): {last_error}"
    )


SWEEP_COLUMNS = ("T", "x0", "G", "beta", "energy", "energy_minus_half_T")


def sweep(
    model: CoefficientModel,
    T_from: float,
    T_to: float,
    A: float = 1000.0,
    dT: float = 0.25,
    tol: float = 1e-9,
    h: float = 1e-3,
    csv_path=None,
) -> list[dict]:
    """Trace the branch from T_from up to T_to; returns one row per point.

    The seed at T_from is a direct unsmoothed solve; every later point is
    a smoothed continuation step. Rows are dicts over SWEEP_COLUMNS.
    """
    if T_to <= T_from:
        raise InvalidInterval(f"sweep needs T_to > T_from, got {T_from} -> {T_to}")
    T_start = snap_length(T_from)
    seed = bvp.solve_structured(model, T_start, tol=tol, h=h)
    state = init_from_solution(seed, A=A, step=dT, tol=tol, h=h)
    T_end = snap_length(T_to)
    while state.T < T_end - 0.5 / LATTICE:
        state = step(state, min(dT, T_end - state.T))
    rows = [
        {
            "T": T,
            "x0": x0,
            "G": G,
            "beta": beta,
            "energy": energy,
            "energy_minus_half_T": energy - 0.5 * T,
        }
        for (T, x0, G, beta, energy) in state.history
    ]
    if csv_path is not None:
        write_sweep_csv(csv_path, rows)
    return rows


def write_sweep_csv(path, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: format(row[k], ".17g") for k in SWEEP_COLUMNS})
