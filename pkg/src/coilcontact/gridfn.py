"""Uniform-grid functions on [0, T] and diagnostics computed from them.

The unit-window constraint Bu(x) = integral of u over [x, x+1] only makes
sense on a grid whose spacing divides 1 exactly, so most window-aware
helpers require n/T to be an integer (cells per unit length). Constructors
check this once; downstream code can then shift node indices by k to move
the window by one unit.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .contact_structure import ContactStructure
from .coefficients import CoefficientModel, el_operator
from .errors import DomainTooShort, GridAlignmentError, InvalidInterval

_ALIGN_TOL = 1e-6


@dataclass(frozen=True)
class GridFunction:
    """Values at the n+1 nodes of a uniform grid on [0, T]."""

    T: float
    n: int
    values: np.ndarray

    def __post_init__(self):
        if self.T <= 0:
            raise InvalidInterval(f"domain length T={self.T} must be positive")
        if self.n < 1:
            raise GridAlignmentError(f"need at least one cell, got n={self.n}")
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.n + 1,):
            raise GridAlignmentError(
                f"expected {self.n + 1} node values, got shape {vals.shape}"
            )
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @property
    def h(self) -> float:
        return self.T / self.n

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, self.T, self.n + 1)

    @property
    def cells_per_unit(self) -> int | None:
        """n/T when it is integral (grid aligned to unit windows), else None."""
        k = self.n / self.T
        rk = round(k)
        if rk >= 1 and abs(k - rk) <= _ALIGN_TOL:
            return int(rk)
        return None

    def require_aligned(self) -> int:
        k = self.cells_per_unit
        if k is None:
            raise GridAlignmentError(
                f"grid with n={self.n}, T={self.T} has no whole number of "
                f"cells per unit length; window operations need one"
            )
        return k

    def __call__(self, x):
        """Piecewise-linear interpolation of the node values."""
        return np.interp(x, self.x, self.values)

    def derivative(self) -> np.ndarray:
        """Second-order finite-difference u' at the nodes."""
        return np.gradient(self.values, self.h, edge_order=2)


def sample(T: float, cells_per_unit: int, f: Callable) -> GridFunction:
    """Evaluate f on the aligned grid with the given resolution."""
    n = cells_per_unit * T
    n_int = round(n)
    if abs(n - n_int) > _ALIGN_TOL:
        raise GridAlignmentError(
            f"cells_per_unit={cells_per_unit} does not align with T={T}"
        )
    x = np.linspace(0.0, T, n_int + 1)
    return GridFunction(T=T, n=n_int, values=np.asarray(f(x), dtype=float))


def aligned_cells_per_unit(T: float, k_min: int = 4, k_max: int = 200_000) -> int:
    """Smallest k >= k_min with k*T integral, so the grid resolves unit windows."""
    if T <= 0:
        raise InvalidInterval(f"domain length T={T} must be positive")
    for k in range(k_min, k_max + 1):
        prod = k * T
        if abs(prod - round(prod)) <= _ALIGN_TOL:
            return k
    raise GridAlignmentError(
        f"no aligned resolution in [{k_min}, {k_max}] for T={T}"
    )


def energy(u: GridFunction, model: CoefficientModel) -> float:
    """Trapezoid-rule energy with the per-cell slope used inside a(u) u'^2.

    The gradient term pairs the averaged coefficient a over each cell with
    the exact slope of the piecewise-linear interpolant on that cell, which
    keeps the quadrature second order without smuggling in a global
    derivative estimate.
    """
    v = u.values
    h = u.h
    d = np.diff(v) / h
    av = model.a(v)
    bv = model.b(v)
    am = 0.5 * (av[:-1] + av[1:])
    bm = 0.5 * (bv[:-1] + bv[1:])
    return float(h * np.sum(am * d * d + bm))


def constraint_profile(u: GridFunction) -> np.ndarray:
    """Bu at the n-k+1 aligned window starts: integral of u over [x_j, x_j+1].

    Uses the exact integral of the piecewise-linear interpolant (composite
    trapezoid over the k cells of each window), via one cumulative sum.
    """
    k = u.require_aligned()
    if k > u.n:
        raise DomainTooShort(
            f"domain T={u.T} is shorter than the unit constraint window"
        )
    v = u.values
    h = u.h
    cell = 0.5 * h * (v[:-1] + v[1:])
    acc = np.concatenate(([0.0], np.cumsum(cell)))
    return acc[k:] - acc[:-k]


def contact_set(u: GridFunction, tol: float | None = None) -> list[tuple[float, float]]:
    """Intervals of [0, T-1] where Bu is at its zero lower bound.

    Crossing points of the piecewise-linear Bu profile through the threshold
    are located by interpolation; intervals separated by less than one grid
    cell are merged.
    """
    bu = constraint_profile(u)
    if tol is None:
        tol = 1e-7 * max(1.0, float(np.max(np.abs(bu))))
    k = u.require_aligned()
    h = u.h
    m = bu.size - 1  # windows span [0, T-1] with m cells
    xs = np.linspace(0.0, u.T - 1.0, bu.size) if m > 0 else np.array([0.0])

    below = bu <= tol
    intervals: list[tuple[float, float]] = []
    j = 0
    while j < bu.size:
        if not below[j]:
            j += 1
            continue
        j_end = j
        while j_end + 1 < bu.size and below[j_end + 1]:
            j_end += 1
        if j == 0:
            lo = xs[0]
        else:
            # interpolate the downward crossing in cell [j-1, j]
            dv = bu[j - 1] - bu[j]
            frac = (bu[j - 1] - tol) / dv if dv > 0 else 0.0
            lo = xs[j - 1] + frac * h
        if j_end == bu.size - 1:
            hi = xs[-1]
        else:
            dv = bu[j_end + 1] - bu[j_end]
            frac = (tol - bu[j_end]) / dv if dv > 0 else 1.0
            hi = xs[j_end] + frac * h
        intervals.append((lo, hi))
        j = j_end + 1

    merged: list[tuple[float, float]] = []
    for lo, hi in intervals:
        if merged and lo - merged[-1][1] < h:
            merged[-1] = (merged[-1][0], hi)
        else:
            merged.append((lo, hi))
    return merged


def _g_values(g, x: np.ndarray) -> np.ndarray:
    from . import contact_structure as cs

    if g is None:
        return np.zeros_like(x)
    if isinstance(g, ContactStructure):
        return cs.eval_g(g, x)
    if np.isscalar(g):
        return np.full_like(x, float(g))
    out = np.asarray(g(x), dtype=float)
    if out.shape != x.shape:
        out = np.array([float(g(xi)) for xi in x])
    return out


def el_residual(
    u: GridFunction,
    model: CoefficientModel,
    g=None,
) -> np.ndarray:
    """Pointwise Euler-Lagrange defect -2a u'' - a' u'^2 + b' - g at the nodes.

    Endpoints are reported as zero (no second-difference stencil there). If g
    is a ContactStructure, nodes within one cell of a force location are also
    zeroed: u'' genuinely jumps there and the centered stencil measures the
    jump, not a defect.
    """
    v = u.values
    h = u.h
    x = u.x
    up = (v[2:] - v[:-2]) / (2.0 * h)
    upp = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / (h * h)
    gv = _g_values(g, x)
    res = np.zeros_like(v)
    res[1:-1] = el_operator(model, v[1:-1], up, upp) - gv[1:-1]
    if isinstance(g, ContactStructure):
        guard = h * (1.0 + 1e-9)
        for pos, _w in g.deltas:
            res[np.abs(x - pos) <= guard] = 0.0
    return res


@dataclass(frozen=True)
class HamiltonianSegment:
    lo: float
    hi: float
    g: float
    H: float
    deviation: float


def hamiltonian_profile(
    u: GridFunction,
    model: CoefficientModel,
    g=None,
    jump_points: list[float] | None = None,
    uprime: np.ndarray | None = None,
) -> list[HamiltonianSegment]:
    """Per-segment value of -a(u) u'^2 + b(u) - g u between jumps of g.

    g must be piecewise constant between the jump points (taken from the
    ContactStructure when one is passed). Each segment reports the mean and
    the worst deviation from it, skipping one grid cell on either side of a
    jump where the finite-difference u' straddles the kink.
    """
    if jump_points is None:
        jump_points = g.jump_points() if isinstance(g, ContactStructure) else []
    cuts = [0.0] + [float(j) for j in jump_points if 0.0 < j < u.T] + [u.T]
    cuts = sorted(set(cuts))
    x = u.x
    v = u.values
    up = uprime if uprime is not None else u.derivative()
    h = u.h
    segs: list[HamiltonianSegment] = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        margin = h * 1.0000001
        mask = (x >= lo + margin) & (x <= hi - margin)
        if not mask.any():
            mask = (x >= lo) & (x <= hi)
        mid = 0.5 * (lo + hi)
        gval = float(_g_values(g, np.array([mid]))[0])
        hvals = (
            -model.a(v[mask]) * up[mask] ** 2 + model.b(v[mask]) - gval * v[mask]
        )
        mean = float(np.mean(hvals))
        dev = float(np.max(np.abs(hvals - mean)))
        segs.append(HamiltonianSegment(lo=lo, hi=hi, g=gval, H=mean, deviation=dev))
    return segs


@dataclass
class Solution:
    """A solved profile with the diagnostics the rest of the package consumes."""

    u: GridFunction
    structure: ContactStructure | None
    energy: float
    hamiltonian_segments: list[HamiltonianSegment]
    residual_norm: float
    uprime: np.ndarray | None = None
    dense: Callable | None = None
    dense_uprime: Callable | None = None
    diagnostics: dict = field(default_factory=dict)
    model: object | None = None  # the CoefficientModel that produced this profile

    def manifest_dict(self) -> dict:
        s = self.structure
        return {
            "T": self.u.T,
            "x0": None if s is None else s.x0,
            "G": None if s is None else s.G,
            "g1": None if s is None else s.g1,
            "g2": None if s is None else s.g2,
            "energy": self.energy,
            "residual_norm": self.residual_norm,
            "H_segments": [
                {
                    "lo": seg.lo,
                    "hi": seg.hi,
                    "g": seg.g,
                    "H": seg.H,
                    "deviation": seg.deviation,
                }
                for seg in self.hamiltonian_segments
            ],
        }


def export_profile_csv(
    path,
    u: GridFunction,
    model: CoefficientModel | None = None,
    g=None,
    uprime: np.ndarray | None = None,
) -> None:
    """Write x, u, u', Bu, g, residual columns with 17 significant digits.

    Bu is only defined for window starts x <= T-1; later rows carry nan.
    The residual column is nan when no coefficient model is supplied.
    """
    x = u.x
    v = u.values
    up = uprime if uprime is not None else u.derivative()
    gv = _g_values(g, x)
    if u.cells_per_unit is not None:
        bu_vals = constraint_profile(u)
        bu = np.full_like(v, np.nan)
        bu[: bu_vals.size] = bu_vals
    else:
        bu = np.full_like(v, np.nan)
    if model is not None:
        res = el_residual(u, model, g)
    else:
        res = np.full_like(v, np.nan)

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "u", "uprime", "Bu", "g", "residual"])
        for i in range(v.size):
            writer.writerow(
                [
                    format(val, ".17g")
                    for val in (x[i], v[i], up[i], bu[i], gv[i], res[i])
                ]
            )
