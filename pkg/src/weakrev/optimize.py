"""Scalar optimization helpers for reversal-strength sweeps.

`maximize_over_r` is deterministic by construction: a fixed coarse grid
chooses a bracket, golden-section refines it with a precomputed iteration
count, and ties always resolve toward smaller r.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import BracketError, NumericalError

GRID_POINTS = 201
# Objectives in this package often climb monotonically toward r = 1 with a
# supremum exactly on the open boundary; the ceiling sits close enough that
# the boundary deficit (slope times distance, slopes up to ~1e3 on the
# steepest sweeps) stays orders of magnitude inside every tolerance used.
R_CEILING = 1.0 - 1e-13
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OptResult:
    r_opt: float
    value_opt: float
    transmissivity_at_opt: float | None
    evaluations: int


@dataclass(frozen=True)
class CriticalResult:
    p_critical: float
    threshold_used: float
    bracket_width: float


def maximize_over_r(objective: Callable[[float], float], tolerance: float = 1e-7,
                    transmissivity: Callable[[float], float] | None = None) -> OptResult:
    """Maximize objective(r) over r in [0, 1).

    Scans a 201-point grid, then golden-section refines around the best
    grid point until the bracket is narrower than `tolerance`. The refined
    point is only accepted if it strictly beats the grid value, so a flat
    objective reports r_opt = 0 exactly. Non-finite objective values raise
    NumericalError.
    """
    if not tolerance > 0.0:
        raise NumericalError(f"tolerance must be positive, got {tolerance!r}")

    evaluations = 0

    def f(r: float) -> float:
        nonlocal evaluations
        evaluations += 1
        value = objective(r)
        if not math.isfinite(value):
            raise NumericalError(f"objective returned non-finite value {value!r} at r={r!r}")
        return float(value)

    step = R_CEILING / (GRID_POINTS - 1)
    grid = [i * step for i in range(GRID_POINTS - 1)] + [R_CEILING]
    best_i = 0
    best_v = -math.inf
    for i, r in enumerate(grid):
        v = f(r)
        if v > best_v:
            best_i, best_v = i, v

    lo = grid[best_i - 1] if best_i > 0 else grid[0]
    hi = grid[best_i + 1] if best_i < GRID_POINTS - 1 else grid[-1]
    r_opt, value_opt = grid[best_i], best_v

    width = hi - lo
    if width > tolerance:
        steps = math.ceil(math.log(tolerance / width) / math.log(_INV_PHI))
        a, b = lo, hi
        c = b - _INV_PHI * width
        d = a + _INV_PHI * width
        yc, yd = f(c), f(d)
        for _ in range(steps):
            if yc >= yd:  # ties keep the left segment: smaller r wins
                b, d, yd = d, c, yc
                c = b - _INV_PHI * (b - a)
                yc = f(c)
            else:
                a, c, yc = c, d, yd
                d = a + _INV_PHI * (b - a)
                yd = f(d)
        r_fine, v_fine = (c, yc) if yc >= yd else (d, yd)
        if v_fine > value_opt:
            r_opt, value_opt = r_fine, v_fine

    t_opt = None
    if transmissivity is not None:
        t_opt = float(transmissivity(r_opt))
    return OptResult(r_opt=r_opt, value_opt=value_opt,
                     transmissivity_at_opt=t_opt, evaluations=evaluations)


def find_critical_p(optimized_curve: Callable[[float], float], threshold: float,
                    p_lo: float, p_hi: float, width: float = 1e-5) -> CriticalResult:
    """Bisect the downward crossing of `optimized_curve` through `threshold`.

    Requires curve(p_lo) > threshold >= curve(p_hi); raises BracketError
    otherwise. Returns the midpoint of the final bracket, which is narrower
    than `width`.
    """
    if not width > 0.0:
        raise NumericalError(f"bracket width must be positive, got {width!r}")
    if not p_lo < p_hi:
        raise BracketError(f"need p_lo < p_hi, got [{p_lo!r}, {p_hi!r}]")
    f_lo = optimized_curve(p_lo)
    f_hi = optimized_curve(p_hi)
    if not (f_lo > threshold >= f_hi):
        raise BracketError(
            f"no downward crossing of {threshold!r} on [{p_lo!r}, {p_hi!r}]: "
            f"endpoint values {f_lo!r}, {f_hi!r}")

    lo, hi = p_lo, p_hi
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break  # float resolution floor reached
        if optimized_curve(mid) > threshold:
            lo = mid
        else:
            hi = mid
    return CriticalResult(p_critical=0.5 * (lo + hi), threshold_used=threshold,
                          bracket_width=hi - lo)
