"""Derivative-free minimization with Powell's direction-set method.

Each sweep line-minimizes along every direction in turn (golden-section
search on a bracketed interval), then may replace the direction of largest
decrease with the sweep's net displacement.  No gradients, so it works on
the noisy-but-deterministic objectives produced by fixed simulation seeds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

_GOLD = (math.sqrt(5.0) - 1.0) / 2.0       # 0.6180339887...
_EXPAND = 1.0 + _GOLD


@dataclass
class PowellResult:
    x: np.ndarray
    fun: float
    sweeps: int
    evaluations: int
    converged: bool


def minimize_powell(
    fn: Callable[[np.ndarray], float],
    x0: np.ndarray,
    ftol: float = 1e-6,
    max_sweeps: int = 200,
    line_tol: float = 1e-8,
    project: Callable[[np.ndarray], np.ndarray] | None = None,
) -> PowellResult:
    """Minimize ``fn`` starting from ``x0``.

    ``project`` (if given) maps every evaluation point back into the
    feasible set; the returned minimizer is always a projected point.
    Raises ValueError if the objective ever returns a non-finite value.
    The best point seen across all evaluations is returned even when the
    sweep loop stops without meeting the tolerance.
    """
    x0 = np.asarray(x0, dtype=np.float64)
    dim = x0.size
    evals = 0
    best_x = None
    best_f = math.inf

    def feasible(x: np.ndarray) -> np.ndarray:
        return project(x) if project is not None else x

    def f(x: np.ndarray) -> float:
        nonlocal evals, best_x, best_f
        x = feasible(np.asarray(x, dtype=np.float64))
        val = float(fn(x))
        if not math.isfinite(val):
            raise ValueError(f"objective returned non-finite value {val} at {x}")
        evals += 1
        if val < best_f:
            best_f, best_x = val, x.copy()
        return val

    x = feasible(x0.copy())
    f_cur = f(x)
    directions = np.eye(dim)

    converged = False
    sweep = 0
    for sweep in range(1, max_sweeps + 1):
        x_start = x.copy()
        f_start = f_cur
        biggest_drop = 0.0
        drop_idx = 0
        for i in range(dim):
            f_before = f_cur
            x, f_cur = _line_minimize(f, x, directions[i], line_tol)
            if f_before - f_cur > biggest_drop:
                biggest_drop = f_before - f_cur
                drop_idx = i

        if 2.0 * (f_start - f_cur) <= ftol * (abs(f_start) + abs(f_cur)) + 1e-20:
            converged = True
            break

        net = x - x_start
        if not np.any(net):
            continue
        f_ext = f(x + net)
        if f_ext < f_start:
            t = (
                2.0 * (f_start - 2.0 * f_cur + f_ext)
                * (f_start - f_cur - biggest_drop) ** 2
                - biggest_drop * (f_start - f_ext) ** 2
            )
            if t < 0.0:
                x, f_cur = _line_minimize(f, x, net, line_tol)
                directions[drop_idx] = directions[dim - 1]
                directions[dim - 1] = net
                if np.linalg.matrix_rank(directions) < dim:
                    directions = np.eye(dim)

    x = feasible(x)
    if best_f < f_cur:
        x, f_cur = best_x, best_f
    return PowellResult(x=x, fun=f_cur, sweeps=sweep, evaluations=evals, converged=converged)


def _line_minimize(f, x, direction, tol):
    """Minimize f along x + a*direction; returns (new x, new value)."""
    direction = np.asarray(direction, dtype=np.float64)
    scale = np.linalg.norm(direction)
    if scale == 0.0:
        return x, f(x)
    d = direction / scale
    phi = lambda a: f(x + a * d)
    a, b, c, fb = _bracket(phi)
    a_min, f_min = _golden(phi, a, b, c, fb, tol)
    return x + a_min * d, f_min


def _bracket(phi, a=0.0, b=1.0, max_grow=1e8):
    """Expand downhill until the middle point is lowest; returns a < b < c."""
    fa, fb = phi(a), phi(b)
    if fb > fa:
        a, b = b, a
        fa, fb = fb, fa
    c = b + _EXPAND * (b - a)
    fc = phi(c)
    while fc < fb:
        a, fa = b, fb
        b, fb = c, fc
        c = b + _EXPAND * (b - a)
        fc = phi(c)
        if abs(c) > max_grow:
            raise ValueError("line search failed to bracket a minimum")
    if a > c:
        a, c = c, a
    return a, b, c, fb


def _golden(phi, a, b, c, fb, tol):
    """Golden-section shrink of [a, c] around the known low point b."""
    x0, x3 = a, c
    # Put the second probe inside the wider half so x0 < x1 < x2 < x3.
    if c - b > b - a:
        x1, f1 = b, fb
        x2 = b + (1.0 - _GOLD) * (c - b)
        f2 = phi(x2)
    else:
        x2, f2 = b, fb
        x1 = b - (1.0 - _GOLD) * (b - a)
        f1 = phi(x1)
    while abs(x3 - x0) > tol * (abs(x1) + abs(x2)) + 1e-12:
        if f2 < f1:
            x0, x1, f1 = x1, x2, f2
            x2 = _GOLD * x1 + (1.0 - _GOLD) * x3
            f2 = phi(x2)
        else:
            x3, x2, f2 = x2, x1, f1
            x1 = _GOLD * x2 + (1.0 - _GOLD) * x0
            f1 = phi(x1)
    return (x1, f1) if f1 < f2 else (x2, f2)
