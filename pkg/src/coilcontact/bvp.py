"""Shooting solvers for the stationarity system of the wound-rod energy.

Two entry points. solve_structured finds contact-bearing stationary points
by Newton iteration on three unknowns (initial slope s, contact onset x0,
window force G), integrating the Euler-Lagrange ODE across the collapsed
domain of length Ttilde = 2 x0 + p + 1 and re-inflating the 1-periodic
contact section afterwards. solve_unconstrained handles the contact-free
case by shooting on the conserved quantity -a(u) u'^2 + b(u).

The subdomain layout of the collapsed problem, for contact length
L = T - 2 x0 - 1 with p = frac(L):

    [0, x0]           g = 0        boundary layer
    [x0, x0+p]        g = g1
    [x0+p, x0+1]      g = g2       one period of the contact pattern
    [x0+1, x0+1+p]    g = g1
    [x0+1+p, Ttilde]  g = 0        mirrored boundary layer

with g1, g2 computed from the FULL contact length (P = ceil L), not from
the collapsed one; the collapse removes whole periods but keeps the
plateau heights of the original problem.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate as sci_integrate
from scipy import optimize as sci_optimize
from scipy.interpolate import CubicHermiteSpline

from . import contact_structure as cs
from . import gridfn
from .coefficients import CoefficientModel
from .errors import (
    AdmissibilityViolation,
    BlowUp,
    CoercivityLoss,
    InvalidInterval,
    NegativeG,
    NoConvergence,
    NoTurningPoint,
    SolverError,
)

BLOWUP_BOUND = 1.0e8


@dataclass(frozen=True)
class ShootingProblem:
    """Immutable description of one collapsed-domain solve."""

    model: CoefficientModel
    T: float
    h: float = 1e-3
    tol: float = 1e-9
    max_iter: int = 50
    newton_fd_step: float = 1e-6

    def __post_init__(self):
        if self.T <= 1.0:
            raise InvalidInterval(
                f"domain length T={self.T} leaves no room for a unit window"
            )
        if self.h <= 0:
            raise InvalidInterval(f"integrator step h={self.h} must be positive")


@dataclass
class Trajectory:
    """Dense-output result of one ODE integration."""

    x: np.ndarray
    u: np.ndarray
    uprime: np.ndarray
    q: np.ndarray  # running integral of u from x[0]
    usecond: np.ndarray
    _dense: CubicHermiteSpline | None = field(default=None, repr=False)
    _dense_up: object | None = field(default=None, repr=False)

    def __call__(self, x):
        if self._dense is None:
            self._dense = CubicHermiteSpline(self.x, self.u, self.uprime)
        return self._dense(x)

    def derivative(self, x):
        # Differentiate the u-spline rather than building a Hermite spline
        # on (u', u''): u'' jumps at plateau seams, and a spline fed the
        # one-sided value pollutes u' for a whole cell past each seam. The
        # u-spline uses only continuous data, so its derivative is clean
        # (O(h^3) instead of O(h^4) between nodes, exact at nodes).
        if self._dense_up is None:
            if self._dense is None:
                self._dense = CubicHermiteSpline(self.x, self.u, self.uprime)
            self._dense_up = self._dense.derivative()
        return self._dense_up(x)


def _steps_for(width: float, h: float) -> int:
    return max(1, int(math.ceil(width / h - 1e-12)))


def _rk4_const(model, gval, lo, hi, u, w, q, h, record=False):
    """Fixed-step RK4 over [lo, hi] with constant right-hand side g.

    State is (u, u', integral of u). Returns the final state, or full node
    arrays when record is set. Pure-float inner loop: this is the hot path
    of every Newton residual evaluation.
    """
    fa, fda, fdb = model._a, model._da, model._db
    floor = 0.5 * model.a0
    width = hi - lo
    if width <= 0.0:
        if record:
            one = np.array([lo]), np.array([u]), np.array([w]), np.array([q])
            return one
        return u, w, q
    n = _steps_for(width, h)
    st = width / n
    half = 0.5 * st
    sixth = st / 6.0
    if record:
        xs = np.empty(n + 1)
        us = np.empty(n + 1)
        ws = np.empty(n + 1)
        qs = np.empty(n + 1)
        xs[0], us[0], ws[0], qs[0] = lo, u, w, q
    for i in range(n):
        a1 = fa(u)
        if a1 < floor:
            raise CoercivityLoss(f"a(u)={a1:g} below floor at x={lo + i * st:g}")
        k1w = (fdb(u) - fda(u) * w * w - gval) / (2.0 * a1)
        u2 = u + half * w
        w2 = w + half * k1w
        k2w = (fdb(u2) - fda(u2) * w2 * w2 - gval) / (2.0 * fa(u2))
        u3 = u + half * w2
        w3 = w + half * k2w
        k3w = (fdb(u3) - fda(u3) * w3 * w3 - gval) / (2.0 * fa(u3))
        u4 = u + st * w3
        w4 = w + st * k3w
        k4w = (fdb(u4) - fda(u4) * w4 * w4 - gval) / (2.0 * fa(u4))
        q += sixth * (u + 2.0 * u2 + 2.0 * u3 + u4)
        u += sixth * (w + 2.0 * w2 + 2.0 * w3 + w4)
        w += sixth * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)
        if not (-BLOWUP_BOUND < u < BLOWUP_BOUND and -BLOWUP_BOUND < w < BLOWUP_BOUND):
            raise BlowUp(f"state escaped at x={lo + (i + 1) * st:g}: u={u:g}, u'={w:g}")
        if record:
            xs[i + 1] = lo + (i + 1) * st
            us[i + 1] = u
            ws[i + 1] = w
            qs[i + 1] = q
    if record:
        xs[-1] = hi
        return xs, us, ws, qs
    return u, w, q


def _rk4_sampled(model, gs, lo, hi, u, w, q, n, record=False):
    """RK4 with a precomputed g sample array on the half-step lattice.

    gs must hold g at lo + i*(hi-lo)/(2n) for i = 0..2n; used for smooth
    x-dependent right-hand sides (the arctan-smoothed continuation profile).
    """
    fa, fda, fdb = model._a, model._da, model._db
    floor = 0.5 * model.a0
    st = (hi - lo) / n
    half = 0.5 * st
    sixth = st / 6.0
    if record:
        xs = np.empty(n + 1)
        us = np.empty(n + 1)
        ws = np.empty(n + 1)
        qs = np.empty(n + 1)
        xs[0], us[0], ws[0], qs[0] = lo, u, w, q
    for i in range(n):
        g0 = gs[2 * i]
        gm = gs[2 * i + 1]
        g1 = gs[2 * i + 2]
        a1 = fa(u)
        if a1 < floor:
            raise CoercivityLoss(f"a(u)={a1:g} below floor at x={lo + i * st:g}")
        k1w = (fdb(u) - fda(u) * w * w - g0) / (2.0 * a1)
        u2 = u + half * w
        w2 = w + half * k1w
        k2w = (fdb(u2) - fda(u2) * w2 * w2 - gm) / (2.0 * fa(u2))
        u3 = u + half * w2
        w3 = w + half * k2w
        k3w = (fdb(u3) - fda(u3) * w3 * w3 - gm) / (2.0 * fa(u3))
        u4 = u + st * w3
        w4 = w + st * k3w
        k4w = (fdb(u4) - fda(u4) * w4 * w4 - g1) / (2.0 * fa(u4))
        q += sixth * (u + 2.0 * u2 + 2.0 * u3 + u4)
        u += sixth * (w + 2.0 * w2 + 2.0 * w3 + w4)
        w += sixth * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)
        if not (-BLOWUP_BOUND < u < BLOWUP_BOUND and -BLOWUP_BOUND < w < BLOWUP_BOUND):
            raise BlowUp(f"state escaped at x={lo + (i + 1) * st:g}: u={u:g}, u'={w:g}")
        if record:
            xs[i + 1] = lo + (i + 1) * st
            us[i + 1] = u
            ws[i + 1] = w
            qs[i + 1] = q
    if record:
        return xs, us, ws, qs
    return u, w, q


def _usecond_nodes(model, us, ws, gvals):
    return (model._db(us) - model._da(us) * ws * ws - gvals) / (2.0 * model._a(us))


def integrate_el(
    model: CoefficientModel,
    g,
    interval: tuple[float, float],
    u_init: float,
    uprime_init: float,
    h: float = 1e-3,
    jumps=None,
) -> Trajectory:
    """Integrate u'' = (b'(u) - a'(u) u'^2 - g)/(2 a(u)) over an interval.

    g may be None (free equation), a number, a ContactStructure, or a
    callable of x. Integration restarts exactly at every discontinuity of g
    so no step straddles a jump; between jumps a ContactStructure is treated
    as the constant it is there.
    """
    lo, hi = float(interval[0]), float(interval[1])
    if hi <= lo:
        raise InvalidInterval(f"empty integration interval [{lo}, {hi}]")
    if isinstance(g, cs.ContactStructure):
        cuts = [j for j in g.jump_points() if lo < j < hi]
    else:
        cuts = [float(j) for j in (jumps or []) if lo < float(j) < hi]
    bounds = [lo] + sorted(cuts) + [hi]

    xs_all, us_all, ws_all, qs_all, gs_all = [], [], [], [], []
    u, w, q = float(u_init), float(uprime_init), 0.0
    for a, b in zip(bounds[:-1], bounds[1:]):
        if isinstance(g, cs.ContactStructure):
            gval = cs.eval_g(g, 0.5 * (a + b))
            xs, us, ws, qs = _rk4_const(model, gval, a, b, u, w, q, h, record=True)
            gnodes = np.full_like(xs, gval)
        elif g is None or np.isscalar(g):
            gval = 0.0 if g is None else float(g)
            xs, us, ws, qs = _rk4_const(model, gval, a, b, u, w, q, h, record=True)
            gnodes = np.full_like(xs, gval)
        else:
            n = _steps_for(b - a, h)
            lattice = np.linspace(a, b, 2 * n + 1)
            gs = gridfn._g_values(g, lattice)
            # a segment end that is a declared discontinuity gets the
            # one-sided limit, not whatever value g assigns to the point
            eps = 1e-9 * max(1.0, abs(b - a))
            if a != lo:
                gs[0] = float(gridfn._g_values(g, np.array([a + eps]))[0])
            if b != hi:
                gs[-1] = float(gridfn._g_values(g, np.array([b - eps]))[0])
            xs, us, ws, qs = _rk4_sampled(model, gs, a, b, u, w, q, n, record=True)
            gnodes = gs[::2]
        u, w, q = float(us[-1]), float(ws[-1]), float(qs[-1])
        start = 1 if xs_all else 0
        xs_all.append(xs[start:])
        us_all.append(us[start:])
        ws_all.append(ws[start:])
        qs_all.append(qs[start:])
        gs_all.append(gnodes[start:])

    x = np.concatenate(xs_all)
    uu = np.concatenate(us_all)
    ww = np.concatenate(ws_all)
    qq = np.concatenate(qs_all)
    gg = np.concatenate(gs_all)
    upp = _usecond_nodes(model, uu, ww, gg)
    return Trajectory(x=x, u=uu, uprime=ww, q=qq, usecond=upp)


# --- collapsed-domain layout -------------------------------------------------


@dataclass(frozen=True)
class _Layout:
    pieces: tuple  # ((lo, hi, g), ...)
    Ttilde: float
    p: float
    P: int
    g1: float
    g2: float


def _layout(T: float, x0: float, G: float) -> _Layout:
    if not (0.0 < x0 < 0.5 * (T - 1.0) + 0.25):
        raise InvalidInterval(f"contact onset x0={x0:g} out of range for T={T:g}")
    L = T - 2.0 * x0 - 1.0
    if L < -1e-9:
        raise InvalidInterval(f"contact length {L:g} negative (x0 too large)")
    L = max(L, 0.0)
    nearest = round(L)
    if abs(L - nearest) < cs.INTEGER_GUARD:
        P = int(nearest)
        Ttilde = 2.0 * x0 + 1.0
        pieces = (
            (0.0, x0, 0.0),
            (x0, x0 + 1.0, G),
            (x0 + 1.0, Ttilde, 0.0),
        )
        return _Layout(pieces=pieces, Ttilde=Ttilde, p=0.0, P=P, g1=G, g2=G)
    P = int(math.ceil(L))
    p = L - math.floor(L)
    den = P + 1.0 - p
    g1 = G * P / den
    g2 = G * (P + 1.0) / den
    Ttilde = 2.0 * x0 + p + 1.0
    pieces = (
        (0.0, x0, 0.0),
        (x0, x0 + p, g1),
        (x0 + p, x0 + 1.0, g2),
        (x0 + 1.0, x0 + 1.0 + p, g1),
        (x0 + 1.0 + p, Ttilde, 0.0),
    )
    return _Layout(pieces=pieces, Ttilde=Ttilde, p=p, P=P, g1=g1, g2=g2)


def _shoot(prob: ShootingProblem, s, x0, G):
    """March the collapsed system once; return residuals and endpoint data."""
    lay = _layout(prob.T, x0, G)
    u, w, q = 1.0, float(s), 0.0
    u_x0 = u_x0p1 = None
    q_x0 = q_x0p1 = None
    for lo, hi, gval in lay.pieces:
        if abs(lo - x0) < 1e-14:
            u_x0, q_x0 = u, q
        if abs(lo - (x0 + 1.0)) < 1e-14:
            u_x0p1, q_x0p1 = u, q
        u, w, q = _rk4_const(prob.model, gval, lo, hi, u, w, q, prob.h)
    if u_x0p1 is None:  # x0+1 is the end of the middle piece in the p=0 layout
        u_x0p1, q_x0p1 = u, q
    r1 = u - 1.0
    r2 = u_x0p1 - u_x0
    r3 = q_x0p1 - q_x0
    return np.array([r1, r2, r3]), {"w_end": w, "layout": lay}


def shoot_residual(prob: ShootingProblem, s: float, x0: float, G: float):
    """Residuals (boundary, window periodicity, window integral) at (s,x0,G)."""
    r, _ = _shoot(prob, s, x0, G)
    return r[0], r[1], r[2]


# --- Newton with finite-difference Jacobian ----------------------------------

_RETRYABLE = (SolverError, InvalidInterval)


def newton_solve(
    resfun: Callable,
    z0,
    tol: float = 1e-9,
    max_iter: int = 50,
    fd_step: float = 1e-6,
    max_halvings: int = 8,
):
    """Damped Newton for square systems, Jacobian by forward differences.

    resfun maps an m-vector to an m-vector and may raise a solver error for
    infeasible trial points; such trials are treated as failed line-search
    steps. Returns (z, residual, iterations).
    """
    z = np.asarray(z0, dtype=float).copy()
    r = resfun(z)
    m = z.size
    for it in range(max_iter):
        nr = float(np.max(np.abs(r)))
        if nr < tol:
            return z, r, it
        J = np.empty((m, m))
        for j in range(m):
            step = fd_step * max(1.0, abs(z[j]))
            zt = z.copy()
            zt[j] += step
            try:
                rj = resfun(zt)
            except _RETRYABLE:
                step = -step
                zt[j] = z[j] + step
                rj = resfun(zt)
            J[:, j] = (rj - r) / step
        try:
            dz = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError as exc:
            raise NoConvergence(f"singular Jacobian at iteration {it}") from exc
        alpha = 1.0
        accepted = False
        for _ in range(max_halvings + 1):
            try:
                r_new = resfun(z + alpha * dz)
            except _RETRYABLE:
                alpha *= 0.5
                continue
            n_new = float(np.max(np.abs(r_new)))
            if n_new < nr or n_new < tol:
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            raise NoConvergence(
                f"line search stalled at iteration {it}, residual {nr:.3e}"
            )
        z = z + alpha * dz
        r = r_new
    if float(np.max(np.abs(r))) < tol:
        return z, r, max_iter
    raise NoConvergence(
        f"no convergence after {max_iter} iterations, residual "
        f"{float(np.max(np.abs(r))):.3e}"
    )


# --- expansion of the collapsed solution -------------------------------------


def _periodic_maps(x0: float, m: int, Ttilde: float):
    def map_x(x):
        xa = np.asarray(x, dtype=float)
        mapped = np.where(
            xa <= x0,
            xa,
            np.where(xa <= x0 + m, x0 + np.mod(xa - x0, 1.0), xa - m),
        )
        return np.clip(mapped, 0.0, Ttilde)

    return map_x


def _expand_solution(
    model: CoefficientModel,
    T: float,
    x0: float,
    G: float,
    traj: Trajectory,
    residual_norm: float,
    h: float,
    diagnostics: dict | None = None,
    validate: bool = True,
    tol: float = 1e-9,
) -> gridfn.Solution:
    """Inflate a collapsed trajectory to [0, T] and package diagnostics.

    The middle unit cell [x0, x0+1] is repeated m = T - Ttilde times; the
    right boundary layer is shifted outward. Admissibility (Bu >= -10 tol)
    is checked on an aligned grid at least as fine as the integrator step.
    """
    Ttilde = float(traj.x[-1])
    m = int(round(T - Ttilde))
    x1 = T - x0 - 1.0
    if x1 < x0 <= x1 + cs.INTEGER_GUARD:
        # point contact: Newton can stop a few ulp past the zero-length
        # junction x0 = (T-1)/2, which would invert the interval
        x0 = x1 = 0.5 * (x0 + x1)
    structure = cs.build(x0, x1, G, T)
    map_x = _periodic_maps(x0, m, Ttilde)

    k = gridfn.aligned_cells_per_unit(T, k_min=max(4, round(1.0 / h)))
    n = int(round(k * T))
    xg = np.linspace(0.0, T, n + 1)
    xm = map_x(xg)
    values = traj(xm)
    uprime = traj.derivative(xm)
    u = gridfn.GridFunction(T=T, n=n, values=values)

    diag = dict(diagnostics or {})
    bu = gridfn.constraint_profile(u)
    diag["min_Bu"] = float(np.min(bu))
    seam = abs(float(traj.derivative(x0 + 1.0)) - float(traj.derivative(x0)))
    diag["seam_uprime_mismatch"] = seam
    # the window integral on the output grid carries O(h_grid^2) trapezoid
    # error, so tol alone would reject genuine solutions on coarse grids
    floor = max(10.0 * tol, (1.0 / k) ** 2)
    if validate and diag["min_Bu"] < -floor:
        raise AdmissibilityViolation(
            f"expanded solution dips to Bu={diag['min_Bu']:.3e} (< {-floor:.1e})"
        )

    ham = gridfn.hamiltonian_profile(
        u, model, g=structure, uprime=uprime
    )
    dense = lambda x: traj(map_x(x))
    dense_up = lambda x: traj.derivative(map_x(x))
    return gridfn.Solution(
        u=u,
        structure=structure,
        energy=gridfn.energy(u, model),
        hamiltonian_segments=ham,
        residual_norm=residual_norm,
        uprime=uprime,
        dense=dense,
        dense_uprime=dense_up,
        diagnostics=diag,
        model=model,
    )


def _default_init(model: CoefficientModel, T: float):
    """Initial guess (s, x0, G) when the caller supplies none.

    The slope comes from the contact-free solution on a short probe domain
    (the boundary layer of the contacting solution looks like the entry arc
    of a short free dip); the window force from the straight-section value
    b'(0); the onset from the observation that x0 stays O(1) at every T.
    """
    s = -1.5
    try:
        probe = solve_unconstrained(model, min(T, 2.5), tol=1e-9, h=2e-3)
        s_probe = float(probe.uprime[0])
        # a very steep free dip (rod models dive far below the contact
        # band) says nothing about the boundary layer of the contacting
        # solution, so only shallow probes are trusted
        if abs(s_probe) < 5.0:
            s = s_probe
    except SolverError:
        pass
    G = max(float(model.db(0.0)), 0.1)
    # x0 = 1.17 keeps the initial contact length T - 2*x0 - 1 away from the
    # integer lattice at integer T; an integer-length start puts Newton on the
    # degenerate plateau branch where roots with mismatched seam slopes live
    return s, min(1.17, 0.45 * (T - 1.0)), G


# (x0 offset, flip slope sign) attempts tried in turn when a solve lands on
# a bad root; the sign flips matter for models whose boundary layers arc
# upward (the rod potential is cheap at large positive u)
_RETRY_SCHEDULE = (
    (0.0, False),
    (0.36, False),
    (-0.31, False),
    (0.0, True),
    (0.36, True),
    (0.59, False),
    (-0.31, True),
    (0.59, True),
)


def solve_structured(
    model: CoefficientModel,
    T: float,
    init: tuple[float, float, float] | None = None,
    tol: float = 1e-9,
    h: float = 1e-3,
    max_iter: int = 50,
    newton_fd_step: float = 1e-6,
) -> gridfn.Solution:
    """Contact-bearing stationary point at domain length T.

    Newton on (s, x0, G) driving the collapsed-system residuals below tol,
    then expansion to [0, T]. A converged root is accepted only if the slope
    is continuous across the repeated cell seam: the collapsed system never
    enforces u'(x0) = u'(x0+1) directly, so it admits algebraic roots that
    are not stationary points, and the seam check is what rejects them.
    With a caller-supplied init the solve is attempted once; the default
    init retries from a few shifted onsets before giving up.

    Raises NoConvergence, NegativeG (converged to a contact-free regime),
    or AdmissibilityViolation (expanded profile penetrates the constraint).
    """
    prob = ShootingProblem(
        model=model, T=T, h=h, tol=tol, max_iter=max_iter, newton_fd_step=newton_fd_step
    )
    z_base = np.asarray(init if init is not None else _default_init(model, T), dtype=float)
    schedule = ((0.0, False),) if init is not None else _RETRY_SCHEDULE

    def resfun(z):
        r, _ = _shoot(prob, z[0], z[1], z[2])
        return r

    errors: list[SolverError] = []
    for dx, flip in schedule:
        z0 = z_base.copy()
        if flip:
            z0[0] = -z0[0]
        # keep the starting onset strictly inside (0, (T-1)/2) so the
        # initial contact interval has positive length
        z0[1] = min(max(z0[1] + dx, 0.02 * (T - 1.0)), 0.45 * (T - 1.0))
        try:
            return _solve_structured_once(prob, resfun, z0)
        except NegativeG:
            raise
        except SolverError as err:
            errors.append(err)
    raise errors[-1]


def _solve_structured_once(prob: ShootingProblem, resfun, z0: np.ndarray) -> gridfn.Solution:
    model, T, tol, h = prob.model, prob.T, prob.tol, prob.h
    z, r, iters = newton_solve(
        resfun, z0, tol=tol, max_iter=prob.max_iter, fd_step=prob.newton_fd_step
    )
    s, x0, G = float(z[0]), float(z[1]), float(z[2])
    if G < 0.0:
        raise NegativeG(
            f"converged window force G={G:.3e} < 0 at T={T}: no contact here, "
            f"use solve_unconstrained"
        )
    lay = _layout(T, x0, G)
    traj = _integrate_pieces(model, lay, s, h)
    sol = _expand_solution(
        model,
        T,
        x0,
        G,
        traj,
        residual_norm=float(np.max(np.abs(r))),
        h=h,
        diagnostics={"newton_iterations": iters, "s": s},
        tol=tol,
    )
    seam = sol.diagnostics["seam_uprime_mismatch"]
    seam_tol = max(1e-6, 1e3 * tol) * max(1.0, abs(s))
    contact_length = T - 2.0 * x0 - 1.0
    # slope periodicity across the cell seam holds for every contact
    # interval of positive length; at exact point contact (length 0) the
    # two slopes are mirror images instead, so the check does not apply
    if contact_length > cs.INTEGER_GUARD and seam > seam_tol:
        raise NoConvergence(
            f"root at (s={s:.6g}, x0={x0:.6g}, G={G:.6g}) has a slope jump "
            f"{seam:.3e} across the cell seam (tol {seam_tol:.1e}); "
            f"not a stationary point"
        )
    return sol


def _integrate_pieces(model, lay: _Layout, s: float, h: float) -> Trajectory:
    xs_all, us_all, ws_all, qs_all, gs_all = [], [], [], [], []
    u, w, q = 1.0, float(s), 0.0
    for lo, hi, gval in lay.pieces:
        if hi - lo <= 0.0:
            continue
        xs, us, ws, qs = _rk4_const(model, gval, lo, hi, u, w, q, h, record=True)
        u, w, q = float(us[-1]), float(ws[-1]), float(qs[-1])
        start = 1 if xs_all else 0
        xs_all.append(xs[start:])
        us_all.append(us[start:])
        ws_all.append(ws[start:])
        qs_all.append(qs[start:])
        gs_all.append(np.full_like(xs[start:], gval))
    x = np.concatenate(xs_all)
    uu = np.concatenate(us_all)
    ww = np.concatenate(ws_all)
    qq = np.concatenate(qs_all)
    gg = np.concatenate(gs_all)
    return Trajectory(
        x=x, u=uu, uprime=ww, q=qq, usecond=_usecond_nodes(model, uu, ww, gg)
    )


# --- contact-free solver ------------------------------------------------------


def _half_period(model: CoefficientModel, u_min: float) -> float:
    """Length of the descent from u=1 to the turning value u_min.

    X(u_min) = integral over [u_min, 1] of sqrt(a(v)/(b(v) - b(u_min))) dv,
    computed after the substitution v = u_min + (1-u_min) t^2 that removes
    the square-root singularity at the turning point.
    """
    H = float(model.b(u_min))
    span = 1.0 - u_min
    dbm = float(model.db(u_min))
    if dbm <= 0.0:
        return math.nan
    limit0 = 2.0 * math.sqrt(float(model.a(u_min)) * span / dbm)

    def integrand(t):
        if t == 0.0:
            return limit0
        v = u_min + span * t * t
        diff = float(model.b(v)) - H
        if diff <= 0.0:
            # analytically diff > 0 for t > 0; tiny t can lose it to float
            # cancellation when b is nearly flat (deep rod dips), where the
            # turning-point limit is accurate to O(t^2 * span)
            if t < 3e-3:
                return limit0
            return math.nan
        return 2.0 * span * t * math.sqrt(float(model.a(v)) / diff)

    # full_output=1 silences the roundoff warning quad emits for very deep
    # turning values; the result still carries bracket-grade accuracy there
    val = sci_integrate.quad(integrand, 0.0, 1.0, limit=200, full_output=1)[0]
    return val


def _feasible_turning(model: CoefficientModel, u_min: float) -> bool:
    """b must exceed b(u_min) strictly between the turning point and 1."""
    if u_min >= 1.0:
        return False
    H = float(model.b(u_min))
    vs = u_min + (1.0 - u_min) * np.linspace(1e-4, 1.0, 200) ** 2
    return bool(np.all(model.b(vs[:-1]) > H) and float(model.b(1.0)) >= H)


def solve_unconstrained(
    model: CoefficientModel,
    T: float,
    tol: float = 1e-9,
    h: float = 1e-3,
) -> gridfn.Solution:
    """Symmetric contact-free stationary point with u(0) = u(T) = 1.

    Parameterizes the orbit by its minimum value, solves for the level whose
    half-period is T/2, then integrates the free equation across the whole
    domain. Raises NoTurningPoint when no admissible level fits: for
    coefficients with bounded half-period (the physical rod) this happens
    at every sufficiently large T, which is exactly the regime where the
    constraint must activate.
    """
    if T <= 0:
        raise InvalidInterval(f"domain length T={T} must be positive")
    target = 0.5 * T

    # Bracket the turning level on a descending scan of candidate minima.
    # Three regimes: shallow dips just below 1, dips approaching the
    # potential's critical level near -1 (half-period diverges there for
    # coefficients like the linear test model), and deep excursions below
    # -1 for coefficients whose half-period stays bounded (the rod).
    candidates = np.concatenate(
        [
            1.0 - np.geomspace(1e-6, 1.0, 30),
            -1.0 + np.geomspace(1.0, 1e-12, 60),
            -1.0 - np.geomspace(1e-6, 1000.0, 60),
        ]
    )
    prev = None  # (u_min, X - target)
    bracket = None
    for um in candidates:
        if not _feasible_turning(model, float(um)):
            prev = None
            continue
        X = _half_period(model, float(um))
        if not math.isfinite(X):
            prev = None
            continue
        cur = (float(um), X - target)
        if prev is not None and prev[1] * cur[1] <= 0.0:
            bracket = (cur[0], prev[0])
            break
        prev = cur
    if bracket is None:
        raise NoTurningPoint(
            f"no turning level reaches half-period {target:g} for this model"
        )
    u_min = sci_optimize.brentq(
        lambda um: _half_period(model, um) - target,
        bracket[0],
        bracket[1],
        xtol=1e-13,
        rtol=8.9e-16,
    )

    H = float(model.b(u_min))
    s0 = -math.sqrt(max(0.0, (float(model.b(1.0)) - H) / float(model.a(1.0))))
    traj = integrate_el(model, None, (0.0, T), 1.0, s0, h=h)

    k = gridfn.aligned_cells_per_unit(T, k_min=max(4, round(1.0 / h)))
    n = int(round(k * T))
    xg = np.linspace(0.0, T, n + 1)
    u = gridfn.GridFunction(T=T, n=n, values=traj(xg))
    uprime = traj.derivative(xg)
    ham = gridfn.hamiltonian_profile(u, model, g=None, uprime=uprime)
    res = abs(float(traj.u[-1]) - 1.0)
    diag = {"u_min": float(u_min), "H": H, "s": s0}
    if T >= 1.0:
        diag["min_Bu"] = float(np.min(gridfn.constraint_profile(u)))
    return gridfn.Solution(
        u=u,
        structure=None,
        energy=gridfn.energy(u, model),
        hamiltonian_segments=ham,
        residual_norm=res,
        uprime=uprime,
        dense=lambda x: traj(x),
        dense_uprime=lambda x: traj.derivative(x),
        diagnostics=diag,
        model=model,
    )
