"""Coefficient models for the energy density a(u) u'^2 + b(u).

Two concrete models ship with the package. The "simple" model has a constant
leading coefficient and a quadratic potential, which makes the stationarity
equation linear and gives closed-form solutions used all over the test suite.
The "rod" model carries the physical coefficients of a thin elastic rod wound
on a cylinder of radius r under a combined moment load alpha.

All evaluators accept floats or numpy arrays. Evaluation is clamped to the
working range |u| <= 1e6; outside it the powers of (1+u^2) silently drown in
overflow/underflow, so we raise instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import EvaluationRange, NonPositiveRadius

WORKING_RANGE = 1.0e6


def _check_range(u):
    if isinstance(u, (float, int)):
        if not (-WORKING_RANGE <= u <= WORKING_RANGE):
            raise EvaluationRange(f"u={u!r} outside working range |u| <= {WORKING_RANGE:g}")
        return float(u)
    arr = np.asarray(u, dtype=float)
    if arr.size and float(np.max(np.abs(arr))) > WORKING_RANGE:
        raise EvaluationRange(f"array evaluation outside working range |u| <= {WORKING_RANGE:g}")
    return arr


@dataclass(frozen=True)
class CoefficientModel:
    """Immutable bundle (a, da, b, db) with metadata.

    a0 is a positive lower bound for a(u) on the range the solvers are
    expected to visit; integrators treat a(u) < a0/2 as loss of coercivity.
    """

    kind: str
    a0: float
    _a: Callable
    _da: Callable
    _b: Callable
    _db: Callable
    r: float | None = None
    alpha: float | None = None

    def a(self, u):
        return self._a(_check_range(u))

    def da(self, u):
        return self._da(_check_range(u))

    def b(self, u):
        return self._b(_check_range(u))

    def db(self, u):
        return self._db(_check_range(u))

    def describe(self) -> dict:
        d = {"kind": self.kind, "a0": self.a0}
        if self.r is not None:
            d["r"] = self.r
        if self.alpha is not None:
            d["alpha"] = self.alpha
        return d


def el_operator(model: CoefficientModel, u, uprime, usecond):
    """Left-hand side of the stationarity equation.

    N(u) = -2 a(u) u'' - a'(u) u'^2 + b'(u); equals the windowed contact
    force g(x) along constrained stationary points.
    """
    u = _check_range(u)
    return -2.0 * model._a(u) * usecond - model._da(u) * uprime**2 + model._db(u)


def make_simple() -> CoefficientModel:
    """a = 1/2, b = (u+1)^2 / 2. Stationarity equation: -u'' + u + 1 = g."""

    def a(u):
        return 0.5 * np.ones_like(u) if isinstance(u, np.ndarray) else 0.5

    def da(u):
        return np.zeros_like(u) if isinstance(u, np.ndarray) else 0.0

    def b(u):
        return 0.5 * (u + 1.0) ** 2

    def db(u):
        return u + 1.0

    return CoefficientModel(kind="simple", a0=0.5, _a=a, _da=da, _b=b, _db=db)


def make_rod(r: float, alpha: float) -> CoefficientModel:
    """Physical rod coefficients on a cylinder of radius r.

    a(u)  = (1/4 pi^2) (1+u^2)^(-5/2)
    b(u)  = (1/r^2) (1+u^2)^(-3/2) - alpha (sqrt(1+u^2) - u)/sqrt(1+u^2)
    alpha = 2M/(Br) bundles the end moment M and bending stiffness B.
    """
    if r <= 0:
        raise NonPositiveRadius(f"cylinder radius must be positive, got {r!r}")
    inv_r2 = 1.0 / (r * r)
    c_a = 1.0 / (4.0 * math.pi**2)

    def a(u):
        return c_a * (1.0 + u * u) ** -2.5

    def da(u):
        return -5.0 * c_a * u * (1.0 + u * u) ** -3.5

    def b(u):
        q = 1.0 + u * u
        s = np.sqrt(q)
        return inv_r2 * q**-1.5 - alpha * (s - u) / s

    def db(u):
        q = 1.0 + u * u
        return -3.0 * inv_r2 * u * q**-2.5 + alpha * q**-1.5

    # a is even and strictly decreasing in |u|, so its infimum over the
    # working range sits exactly at the range edge; that is the honest
    # stored coercivity floor (solutions of the rod problem can visit
    # surprisingly deep u before bending cost stops them)
    a0 = c_a * (1.0 + WORKING_RANGE**2) ** -2.5
    return CoefficientModel(kind="rod", a0=a0, _a=a, _da=da, _b=b, _db=db, r=r, alpha=alpha)


def make_rod_from_load(r: float, M: float, B: float) -> CoefficientModel:
    """Convenience constructor taking the raw moment M and stiffness B."""
    if r <= 0:
        raise NonPositiveRadius(f"cylinder radius must be positive, got {r!r}")
    if B <= 0:
        raise NonPositiveRadius(f"bending stiffness must be positive, got {B!r}")
    return make_rod(r, alpha=2.0 * M / (B * r))


def make_custom(a, da, b, db, a0: float, kind: str = "custom") -> CoefficientModel:
    """Wrap user-supplied evaluators. All four must be provided.

    No automatic differentiation is attempted; run validate_derivatives on a
    grid covering your use range before trusting a custom model.
    """
    if a0 <= 0:
        raise ValueError("a0 must be a positive coercivity floor")
    return CoefficientModel(kind=kind, a0=a0, _a=a, _da=da, _b=b, _db=db)


@dataclass(frozen=True)
class DerivativeReport:
    points: tuple
    err_da: tuple
    err_db: tuple
    tol: float
    passed: bool

    def worst(self) -> float:
        errs = self.err_da + self.err_db
        return max(errs) if errs else 0.0


def validate_derivatives(
    model: CoefficientModel,
    grid: Sequence[float],
    h: float = 1e-5,
    tol: float = 1e-6,
) -> DerivativeReport:
    """Check da and db against central differences of a and b.

    Errors are relative with a floor of 1 in the denominator, so flat spots
    of the exact derivative do not blow the ratio up. The report carries the
    per-point errors; passed is False if any exceeds tol.
    """
    if h <= 0 or tol <= 0:
        raise ValueError("h and tol must be positive")
    pts, eda, edb = [], [], []
    for u in grid:
        u = float(u)
        fd_a = (model.a(u + h) - model.a(u - h)) / (2.0 * h)
        fd_b = (model.b(u + h) - model.b(u - h)) / (2.0 * h)
        ex_a = model.da(u)
        ex_b = model.db(u)
        pts.append(u)
        eda.append(abs(fd_a - ex_a) / max(1.0, abs(ex_a)))
        edb.append(abs(fd_b - ex_b) / max(1.0, abs(ex_b)))
    passed = all(e <= tol for e in eda) and all(e <= tol for e in edb)
    return DerivativeReport(
        points=tuple(pts), err_da=tuple(eda), err_db=tuple(edb), tol=tol, passed=passed
    )


def coercivity_ok(model: CoefficientModel, grid: Sequence[float]) -> bool:
    """Sampled check of the stored floor: a(u) >= a0 on the given points."""
    return all(model.a(float(u)) >= model.a0 for u in grid)
