"""Carleson-type window measures for radial densities on the unit disk.

Everything here integrates densities rho(|z|) dxdy over boundary windows

    W(t, arc) = {z : 1 - t <= |z| < 1, arg z in an arc of length arc},

so window masses factor as arc * integral of rho(r) r dr over [1-t, 1).

Two scalar summaries appear throughout:

* carleson_norm scans the full-circle window quotient
  (2 pi / t) * integral_{1-t}^{1} rho r dr over a dyadic grid of depths;
* radial_carleson_norm is the depth-one value 2 pi * integral_0^1 rho r dr,
  the total mass of the density.

The decay statements in this package control the total mass; the scan is
reported as a diagnostic and its supremum over shallow depths need not be
small even when the total mass vanishes.

The polynomial densities |G(r^2)| (1-r)^p are integrated exactly: their
pieces reduce to edge integrals

    integral_0^1 r^m (1-r)^p dr = m! p! / (m+p+1)!

evaluated in integer arithmetic, because the alternating float sum
sum_i (-1)^i C(p, i) / (m+i+1) loses all precision once m is large.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import betainc

from .grids import boundary_refined_grid, merge_grids, sign_change_brackets
from .series import RadialSeries

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------- #
# edge integrals


def edge_integral_exact(m: int, p: int) -> Fraction:
    """integral_0^1 r^m (1-r)^p dr as an exact rational, m! p! / (m+p+1)!."""
    if m < 0 or p < 0:
        raise ValueError("exponents must be nonnegative")
    return Fraction(1, (m + p + 1) * math.comb(m + p, p))


def edge_integral(m: int, p: int) -> float:
    """Float value of integral_0^1 r^m (1-r)^p dr.

    Equal to the alternating sum over binomial coefficients, but computed
    from the closed rational form; the alternating sum cancels
    catastrophically for m beyond about 10^5.
    """
    return float(edge_integral_exact(m, p))


def edge_integral_partial(m: int, p: int, r: float) -> float:
    """integral_0^r x^m (1-x)^p dx via the regularized incomplete beta."""
    if m < 0 or p < 0:
        raise ValueError("exponents must be nonnegative")
    if not 0.0 <= r <= 1.0:
        raise ValueError("r must lie in [0, 1]")
    if r == 0.0:
        return 0.0
    if r == 1.0:
        return float(edge_integral_exact(m, p))
    return float(edge_integral_exact(m, p)) * float(betainc(m + 1, p + 1, r))


# ---------------------------------------------------------------------- #
# densities


class RadialDensity:
    """Nonnegative radial density rho(r), integrated numerically.

    rho must accept numpy arrays.  breakpoints mark radii where rho has
    kinks (absolute values, window edges) so the quadrature can split
    there.
    """

    def __init__(self, rho: Callable, breakpoints: Sequence[float] = (), label: str = ""):
        self._rho = rho
        self.breakpoints = tuple(sorted(float(b) for b in breakpoints))
        self.label = label

    def rho(self, r):
        return self._rho(np.asarray(r, dtype=np.float64))

    def window_integral(self, a: float, b: float) -> float:
        """integral_a^b rho(r) r dr."""
        if not 0.0 <= a <= b <= 1.0:
            raise ValueError("window bounds must satisfy 0 <= a <= b <= 1")
        if a == b:
            return 0.0
        pts = [x for x in self.breakpoints if a < x < b]
        val, _ = quad(
            lambda r: float(self._rho(np.asarray([r]))[0]) * r,
            a,
            b,
            points=pts or None,
            limit=200 + 20 * len(pts),
            epsabs=1e-13,
            epsrel=1e-10,
        )
        return float(val)


class SeriesGapDensity(RadialDensity):
    """Density |G(r^2)| (1-r)^gap_power for a sparse radial series G.

    Window integrals are exact: on each interval where G keeps its sign
    the integrand is a polynomial in r, and every monomial piece is an
    incomplete edge integral.  Sign roots of G are located by bracketing
    on a boundary-refined grid enriched with the balance radii of each
    exponent, then polished by bisection.
    """

    def __init__(
        self,
        series: RadialSeries,
        gap_power: int = 1,
        nonneg: bool = False,
        label: str = "",
    ):
        if gap_power < 0:
            raise ValueError("gap_power must be nonnegative")
        self.series = series
        self.gap_power = int(gap_power)
        self.nonneg = bool(nonneg)

        def rho(r):
            r = np.asarray(r, dtype=np.float64)
            return np.abs(series.eval(r * r)) * (1.0 - r) ** self.gap_power

        super().__init__(rho, breakpoints=(), label=label)

    @cached_property
    def sign_roots(self) -> tuple[float, ...]:
        """Radii in (0, 1) where G(r^2) changes sign."""
        if self.nonneg or self.series.order < 0:
            return ()
        s_grid = self._root_scan_grid()
        vals = self.series.eval(s_grid)
        # grid points landing exactly on a root are cuts themselves; an
        # extra cut at a non-root is harmless
        root_ss = [float(s) for s, v in zip(s_grid, vals) if v == 0.0 and 0.0 < s]

        def f(s: float) -> float:
            return float(self.series.eval(s))

        for lo, hi in sign_change_brackets(vals, s_grid, floor=0.0):
            # re-taking signs scalar-by-scalar: vectorized and scalar
            # powers round differently at the last ulp, and brentq must
            # see a sign change under its own evaluations
            flo, fhi = f(lo), f(hi)
            if flo == 0.0:
                root_ss.append(lo)
            elif fhi == 0.0:
                root_ss.append(hi)
            elif (flo < 0.0) != (fhi < 0.0):
                root_ss.append(brentq(f, lo, hi, xtol=1e-15))
            else:
                # crossing sits at rounding level; either endpoint is a
                # root to within one ulp of the values
                root_ss.append(lo if abs(flo) <= abs(fhi) else hi)
        return tuple(sorted(set(math.sqrt(s) for s in root_ss)))

    def _root_scan_grid(self) -> np.ndarray:
        base_r = boundary_refined_grid(1201, 46.0)
        cands = []
        for e in self.series.exponents:
            e = int(e)
            if e >= 1:
                cands.append(e / (e + 1.0))
                cands.append((e * e) / ((e + 1.0) * (e + 1.0)))
                cands.append((e + 1.0) / (e + 2.0))
        cands = sorted(set(c for c in cands if 0.0 < c < 1.0))
        mids = [(x + y) / 2.0 for x, y in zip(cands, cands[1:])]
        return merge_grids(base_r * base_r, cands, mids)

    def _signed_piece(self, a: float, b: float) -> float:
        if a == 0.0 and b == 1.0:
            # full-interval pieces cancel catastrophically in float once
            # exponents are large; sum them as exact rationals
            total = Fraction(0)
            for e, c in zip(self.series.exponents, self.series.coeffs):
                total += Fraction(float(c)) * edge_integral_exact(2 * int(e) + 1, self.gap_power)
            return float(total)
        total = 0.0
        for e, c in zip(self.series.exponents, self.series.coeffs):
            m = 2 * int(e) + 1
            total += float(c) * (
                edge_integral_partial(m, self.gap_power, b)
                - edge_integral_partial(m, self.gap_power, a)
            )
        return total

    def window_integral(self, a: float, b: float) -> float:
        if not 0.0 <= a <= b <= 1.0:
            raise ValueError("window bounds must satisfy 0 <= a <= b <= 1")
        cuts = [a] + [x for x in self.sign_roots if a < x < b] + [b]
        return sum(abs(self._signed_piece(x0, x1)) for x0, x1 in zip(cuts, cuts[1:]))


# ---------------------------------------------------------------------- #
# windows and norms


@dataclass(frozen=True)
class CarlesonWindow:
    """Boundary window of depth t and arc length arc_length."""

    t: float
    arc_length: float = TWO_PI

    def __post_init__(self):
        if not 0.0 < self.t <= 1.0:
            raise ValueError("depth t must lie in (0, 1]")
        if not 0.0 < self.arc_length <= TWO_PI + 1e-12:
            raise ValueError("arc_length must lie in (0, 2 pi]")

    def measure(self, density: RadialDensity) -> float:
        return self.arc_length * density.window_integral(1.0 - self.t, 1.0)


def window_measure(density: RadialDensity, t: float, arc_length: float = TWO_PI) -> float:
    """Mass of the density over the window of depth t and given arc length."""
    return CarlesonWindow(t, arc_length).measure(density)


def window_quotient(density: RadialDensity, t: float) -> float:
    """Full-circle window mass divided by the depth t."""
    return window_measure(density, t, TWO_PI) / t


def dyadic_t_grid(j_max: int = 40) -> np.ndarray:
    """Depths 1, 1/2, ..., 2^{-j_max}."""
    if j_max < 0:
        raise ValueError("j_max must be nonnegative")
    return 2.0 ** -np.arange(0, j_max + 1, dtype=np.float64)


@dataclass(frozen=True)
class CarlesonScan:
    """Window quotient scan of a radial density over a grid of depths."""

    value: float          # sup of the quotient over the scanned depths
    t_star: float         # depth attaining it
    at_unit_depth: float  # quotient at t = 1, the total mass
    depths: tuple[float, ...]
    quotients: tuple[float, ...]


def carleson_norm(density: RadialDensity, t_grid: Sequence[float] | None = None) -> CarlesonScan:
    """Scan sup_t (2 pi / t) integral_{1-t}^1 rho r dr over a depth grid.

    The supremum over shallow depths is a diagnostic: for densities that
    live at a fixed distance from the boundary it stabilizes at an
    order-one plateau rather than following the total mass down.  Decay
    assertions should use at_unit_depth (or radial_carleson_norm).
    """
    if t_grid is None:
        t_grid = dyadic_t_grid()
    depths = [float(t) for t in t_grid]
    if not depths:
        raise ValueError("depth grid must be nonempty")
    quots = [window_quotient(density, t) for t in depths]
    i = int(np.argmax(quots))
    if 1.0 in depths:
        at_unit = quots[depths.index(1.0)]
    else:
        at_unit = window_quotient(density, 1.0)
    return CarlesonScan(
        value=quots[i],
        t_star=depths[i],
        at_unit_depth=at_unit,
        depths=tuple(depths),
        quotients=tuple(quots),
    )


def radial_carleson_norm(density: RadialDensity) -> float:
    """Total mass 2 pi integral_0^1 rho r dr, the depth-one window quotient.

    This is the quantity the vanishing estimates control for the densities
    built here.
    """
    return TWO_PI * density.window_integral(0.0, 1.0)
