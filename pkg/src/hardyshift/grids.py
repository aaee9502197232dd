"""Radial evaluation grids on the unit disk.

Everything in this package is radially symmetric, so suprema over the disk
reduce to suprema over the radius r in [0, 1).  The quantities of interest
(powers s^n with n up to ~10^6 times gap factors (1-r)^p) live on boundary
scales 1 - r ~ 1/n, so a uniform grid in r is useless.  We instead use a
grid that is uniform in u = -log2(1 - r), which resolves every dyadic
boundary scale equally, and augment it with the analytically known critical
radii m/(m+p) of the majorant family r^m (1-r)^p.
"""

from __future__ import annotations

from typing import Callable, Iterable

import numpy as np
from scipy.optimize import minimize_scalar


def boundary_refined_grid(count: int = 600, u_max: float = 40.0) -> np.ndarray:
    """Grid r = 1 - 2^{-u} for u uniform in [0, u_max], ascending, r[0] = 0."""
    if count < 2:
        raise ValueError("count must be at least 2")
    if u_max <= 0:
        raise ValueError("u_max must be positive")
    u = np.linspace(0.0, float(u_max), int(count))
    return 1.0 - np.exp2(-u)


def critical_radius(m: float, p: float) -> float:
    """Maximizer of r^m (1-r)^p on [0, 1]: r = m/(m+p)."""
    if m < 0 or p <= 0:
        raise ValueError("need m >= 0 and p > 0")
    return m / (m + p)


def peak_candidates(powers: Iterable[int], gaps: Iterable[int] = (1, 2, 3)) -> np.ndarray:
    """Critical radii m/(m+p) for all combinations of monomial power and gap power."""
    pts = [critical_radius(m, p) for m in powers for p in gaps if m > 0]
    return np.asarray(sorted(set(pts)), dtype=float)


def merge_grids(*parts: np.ndarray | Iterable[float]) -> np.ndarray:
    """Union of grids, sorted, deduplicated, clipped to [0, 1)."""
    vals = np.concatenate([np.atleast_1d(np.asarray(p, dtype=float)) for p in parts if p is not None])
    vals = vals[(vals >= 0.0) & (vals < 1.0)]
    return np.unique(vals)


def refined_supremum(
    fn: Callable[[np.ndarray], np.ndarray],
    grid: np.ndarray,
    refine: bool = True,
    top: int = 8,
) -> tuple[float, float]:
    """Supremum of a vectorized function over a radial grid.

    Takes the grid maximum, then polishes every local maximum among the
    `top` largest grid values with a bounded scalar minimizer on the
    bracketing interval.  Returns (argmax_r, value).
    """
    grid = np.asarray(grid, dtype=float)
    vals = np.asarray(fn(grid), dtype=float)
    if vals.shape != grid.shape:
        raise ValueError("fn must be vectorized over the grid")
    best_i = int(np.argmax(vals))
    best_r, best_v = float(grid[best_i]), float(vals[best_i])
    if not refine or len(grid) < 3:
        return best_r, best_v

    def scalar(r: float) -> float:
        return float(fn(np.array([r]))[0])

    interior = np.arange(1, len(grid) - 1)
    local = interior[(vals[interior] >= vals[interior - 1]) & (vals[interior] >= vals[interior + 1])]
    if len(local) == 0:
        local = np.array([min(max(best_i, 1), len(grid) - 2)])
    order = local[np.argsort(vals[local])[::-1][:top]]
    for i in order:
        lo, hi = float(grid[i - 1]), float(grid[i + 1])
        if hi <= lo:
            continue
        res = minimize_scalar(lambda r: -scalar(r), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-13})
        if res.success and -res.fun > best_v:
            best_v = float(-res.fun)
            best_r = float(res.x)
    return best_r, best_v


def sign_change_brackets(values: np.ndarray, grid: np.ndarray, floor: float = 1e-280) -> list[tuple[float, float]]:
    """Intervals of the grid where `values` crosses zero with both ends above `floor` in modulus."""
    values = np.asarray(values, dtype=float)
    grid = np.asarray(grid, dtype=float)
    out: list[tuple[float, float]] = []
    for i in range(len(grid) - 1):
        a, b = values[i], values[i + 1]
        if a == 0.0 or b == 0.0:
            continue
        if (a < 0) != (b < 0) and abs(a) > floor and abs(b) > floor:
            out.append((float(grid[i]), float(grid[i + 1])))
    return out
