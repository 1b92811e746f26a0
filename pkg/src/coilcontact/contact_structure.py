"""Piecewise-constant contact force profile and its Dirac decomposition.

A contact interval [x0, x1] in a domain [0, T] carries a nonnegative measure
f supported on the two ladders of points X_i = x0 + i and Y_i = x0 + p + i,
where p is the fractional part of the contact length. The windowed profile
g(x) = sum of f-weights in (x-1, x] is piecewise constant with two plateau
values g1 (on [X_i, Y_i]) and g2 (on [Y_i, X_{i+1}]), and the window average
over any unit interval inside the contact region is the single number G.

The delta weights are obtained from the recurrence

    f(X_0) = g1,   f(X_i) + f(Y_i) = g2,   f(Y_i) + f(X_{i+1}) = g1,

solved forward. When the contact length is an integer the two plateaus
coincide (g == G) and every X_i carries the same weight G.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInterval, NegativeForce

# Contact lengths closer than this to an integer are treated as integral.
INTEGER_GUARD = 1e-9


@dataclass(frozen=True)
class ContactStructure:
    x0: float
    x1: float
    G: float
    T: float
    p: float
    P: int
    g1: float
    g2: float
    deltas: tuple  # ordered ((position, weight), ...)

    @property
    def integer_case(self) -> bool:
        return self.p == 0.0

    def jump_points(self) -> list[float]:
        """Positions where g jumps, in increasing order (support edges included)."""
        if self.integer_case:
            return [self.x0, self.x1 + 1.0]
        pts = []
        for i in range(self.P + 1):
            pts.append(self.x0 + i)
            pts.append(self.x0 + self.p + i)
        return pts

    def plateau_segments(self) -> list[tuple[float, float, float]]:
        """(lo, hi, g value) for every maximal constancy interval of g > 0."""
        if self.integer_case:
            return [(self.x0, self.x1 + 1.0, self.G)]
        segs = []
        for i in range(self.P + 1):
            segs.append((self.x0 + i, self.x0 + self.p + i, self.g1))
            if i < self.P:
                segs.append((self.x0 + self.p + i, self.x0 + i + 1.0, self.g2))
        return segs

    def to_dict(self) -> dict:
        return {
            "x0": self.x0,
            "x1": self.x1,
            "G": self.G,
            "p": self.p,
            "P": self.P,
            "g1": self.g1,
            "g2": self.g2,
            "deltas": [{"pos": pos, "w": w} for pos, w in self.deltas],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def build(x0: float, x1: float, G: float, T: float) -> ContactStructure:
    """Populate the full structure for a contact interval [x0, x1] in [0, T].

    The window of the rightmost contact point must fit in the domain
    (x1 + 1 <= T). G is the window integral of g and must be nonnegative.
    """
    if x1 < x0 or x0 < 0 or x1 + 1.0 > T + 1e-12:
        raise InvalidInterval(f"invalid contact interval [{x0}, {x1}] in [0, {T}]")
    if G < 0:
        raise NegativeForce(f"window force G={G} is negative")

    length = x1 - x0
    nearest = round(length)
    if abs(length - nearest) < INTEGER_GUARD:
        # Integer contact length, including the single-point case x0 == x1.
        P = int(nearest)
        weights = [(x0 + i, G) for i in range(P + 1)]
        return ContactStructure(
            x0=x0, x1=x1, G=G, T=T, p=0.0, P=P, g1=G, g2=G, deltas=tuple(weights)
        )

    P = int(math.ceil(length))
    p = length - math.floor(length)
    g1 = G * P / (P + 1 - p)
    g2 = G * (P + 1) / (P + 1 - p)

    # Forward solve of the recurrence; do not shortcut through a closed form.
    weights = []
    fx = g1  # f(X_0)
    for i in range(P):
        fy = g2 - fx
        weights.append((x0 + i, fx))
        weights.append((x0 + p + i, fy))
        fx = g1 - fy
    weights.sort(key=lambda t: t[0])
    return ContactStructure(
        x0=x0, x1=x1, G=G, T=T, p=p, P=P, g1=g1, g2=g2, deltas=tuple(weights)
    )


def _levels(s: ContactStructure) -> np.ndarray:
    """Plateau values left-to-right, padded with the outer zeros."""
    if s.integer_case:
        return np.array([0.0, s.G, 0.0])
    inner = [s.g1 if i % 2 == 0 else s.g2 for i in range(2 * s.P + 1)]
    return np.array([0.0] + inner + [0.0])


def eval_g(s: ContactStructure, x):
    """Windowed force profile at x (scalar or array), right-continuous at jumps.

    Zero outside [x0, x1+1); g1 on [X_i, Y_i), g2 on [Y_i, X_{i+1}). The
    lookup goes through the same jump coordinates that jump_points() reports,
    so an evaluation exactly at a reported jump lands on the right-hand
    plateau without any epsilon games.
    """
    scalar = np.isscalar(x)
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    jumps = np.asarray(s.jump_points())
    idx = np.searchsorted(jumps, xa, side="right")
    out = _levels(s)[idx]
    return float(out[0]) if scalar else out


# Positions this close to a window edge are resolved as if they sat exactly
# on it; keeps the half-open bookkeeping immune to 1-ulp drift in x-1.
_WINDOW_SLACK = 1e-12


def eval_g_window(s: ContactStructure, x) -> float:
    """Sum of delta weights in the half-open window (x-1, x].

    Matches eval_g(x) wherever defined; the half-open convention realizes
    the same right-continuity (a delta is counted from the moment the
    window's right edge reaches it until its left edge does).
    """
    x = float(x)
    lo, hi = x - 1.0, x
    return float(
        sum(
            w
            for pos, w in s.deltas
            if pos - lo > _WINDOW_SLACK and pos - hi <= _WINDOW_SLACK
        )
    )


def smoothed_steps(x, jumps, levels, A: float):
    """Smooth staircase: sum of level-weighted arctan ramps.

    jumps is an increasing sequence of m positions; levels the m-1 plateau
    values between consecutive jumps (profile is 0 before the first and after
    the last jump). Each Heaviside H(x - a) is replaced by
    arctan(A (x - a))/pi + 1/2.
    """
    xa = np.asarray(x, dtype=float)
    out = np.zeros_like(xa, dtype=float)
    inv_pi = 1.0 / math.pi

    def ramp(offs):
        return inv_pi * np.arctan(A * offs) + 0.5

    prev = 0.0
    for a, level in zip(jumps, list(levels) + [0.0]):
        out = out + (level - prev) * ramp(xa - a)
        prev = level
    return out if isinstance(x, np.ndarray) else float(out)


def smoothed_g(s: ContactStructure, x, A: float):
    """Arctan-smoothed version of eval_g with steepness A.

    Converges pointwise to eval_g away from jump points as A grows; at a jump
    it returns (up to far-tail corrections) the midpoint of the two adjacent
    plateau values.
    """
    if A <= 0:
        raise ValueError("steepness A must be positive")
    if s.integer_case:
        return smoothed_steps(x, [s.x0, s.x1 + 1.0], [s.G], A)
    jumps = s.jump_points()
    levels = []
    for i in range(len(jumps) - 1):
        levels.append(s.g1 if i % 2 == 0 else s.g2)
    return smoothed_steps(x, jumps, levels, A)


def from_dict(d: dict, T: float | None = None) -> ContactStructure:
    """Rebuild a structure from its JSON dict (inverse of to_dict)."""
    T = float(T if T is not None else d.get("T", d["x1"] + 1.0))
    s = build(float(d["x0"]), float(d["x1"]), float(d["G"]), T)
    return s
