"""Spike placement driving the curvature corrections below a budget.

The kernel ratio picks up one correction term per spike, and each
correction is a fixed combination of edge bumps s^m (1 - s) whose size in
every metric of interest decays as the bump power m grows.  So the
construction is a search problem: push the k-th spike far enough out that
its correction fits inside the budget delta / 2^k (delta / 4^k for the
quadratic Carleson quantity), and the budgets sum to at most delta.

Placement never measures the correction term directly.  It gates on
per-bump reports combined through the triangle inequality, which keeps
the search monotone in spirit and each candidate cheap.  Verification
then measures the assembled corrections and the full ratio, so the two
stages check each other.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.integrate import quad

from .carleson import (
    RadialDensity,
    SeriesGapDensity,
    TWO_PI,
    CarlesonScan,
    carleson_norm,
    edge_integral_exact,
    radial_carleson_norm,
)
from .grids import boundary_refined_grid, merge_grids, peak_candidates, refined_supremum
from .series import RadialSeries, edge_bump
from .spectral import (
    deficit_coefficients,
    kernel_ratio_series,
    ratio_log_laplacian,
    spike_ratio_term,
)
from .weights import SpikeSpec, WeightSequence, build_spiked_weights

MAX_SPIKES = 8


class InfeasibleConstructionError(RuntimeError):
    """No admissible spike position found below the search cap."""


# ---------------------------------------------------------------------- #
# single-bump decay report


def bump_peak(n: int) -> tuple[float, float]:
    """Peak of the edge bump s^n (1 - s) at s = r^2.

    Returns (r_star, value) with r_star = sqrt(n/(n+1)) and value
    n^n / (n+1)^{n+1}, computed in log form so large n stays exact to
    rounding.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return 0.0, 1.0
    value = math.exp(-n * math.log1p(1.0 / n)) / (n + 1)
    return math.sqrt(n / (n + 1.0)), value


@dataclass(frozen=True)
class LemmaReport:
    """Decay quantities of a single edge bump s^n (1 - s), s = |z|^2.

    sup_value       sup of the bump itself
    sup_laplacian   sup of |Laplacian| (1 - r)^2
    sup_grad_sq     sup of |gradient|^2 (1 - r)^2
    carl_laplacian  total mass of |Laplacian| (1 - r) dxdy
    carl_grad_sq    total mass of |gradient|^2 (1 - r) dxdy

    The five scale like 1/n, 1/n, 1/n^2, 1/n, 1/n^2.
    """

    n: int
    sup_value: float
    sup_laplacian: float
    sup_grad_sq: float
    carl_laplacian: float
    carl_grad_sq: float


def _bump_grid(n: int) -> np.ndarray:
    powers = [max(q, 1) for q in (2 * n - 2, 2 * n - 1, 2 * n, 2 * n + 1, 2 * n + 2,
                                  4 * n - 2, 4 * n, 4 * n + 2)]
    extras = [n / (n + 1.0)]
    if n >= 1:
        extras.append(math.sqrt(n / (n + 1.0)))
    return merge_grids(boundary_refined_grid(701, 45.0), peak_candidates(powers), extras)


@lru_cache(maxsize=None)
def lemma_bounds(n: int) -> LemmaReport:
    """Decay report for the edge bump of power n.

    Suprema come from a boundary-refined grid seeded with the exact
    critical radii and polished locally; the two Carleson masses are
    integrated exactly through edge integrals.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    bump = edge_bump(n)
    lap = bump.laplacian()
    grad = bump.grad_sq()
    grid = _bump_grid(n)

    _, sup_lap = refined_supremum(lambda r: np.abs(lap.eval(r * r)) * (1.0 - r) ** 2, grid)
    _, sup_grad = refined_supremum(lambda r: np.abs(grad.eval(r * r)) * (1.0 - r) ** 2, grid)
    return LemmaReport(
        n=n,
        sup_value=bump_peak(n)[1],
        sup_laplacian=sup_lap,
        sup_grad_sq=sup_grad,
        carl_laplacian=radial_carleson_norm(SeriesGapDensity(lap, 1)),
        carl_grad_sq=radial_carleson_norm(SeriesGapDensity(grad, 1, nonneg=True)),
    )


def bump_laplacian_carleson_bound(n: int) -> float:
    """Closed-form majorant for carl_laplacian, exact rational arithmetic.

    From |n^2 s^{n-1} - (n+1)^2 s^n| <= r^{2n-2} ((n+1)^2 (1-r^2) + 2n+1)
    and 1 + r <= 2, the mass is at most
    2 pi [2 (n+1)^2 B(2n-1, 2) + (2n+1) B(2n-1, 1)] with
    B(m, p) = integral r^m (1-r)^p dr.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    bound = 2 * Fraction((n + 1) ** 2) * edge_integral_exact(2 * n - 1, 2) \
        + Fraction(2 * n + 1) * edge_integral_exact(2 * n - 1, 1)
    return TWO_PI * float(bound)


def bump_gradient_sq_carleson_bound(n: int) -> float:
    """Closed-form majorant for carl_grad_sq.

    (n - (n+1) s)^2 <= 2 (n+1)^2 (1-s)^2 + 2 and (1+r)^2 <= 4 give the
    mass at most 2 pi [8 (n+1)^2 B(4n-1, 3) + 2 B(4n-1, 1)].
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    bound = 8 * Fraction((n + 1) ** 2) * edge_integral_exact(4 * n - 1, 3) \
        + 2 * edge_integral_exact(4 * n - 1, 1)
    return TWO_PI * float(bound)


# ---------------------------------------------------------------------- #
# spike gating


def spike_correction_thresholds(delta: float, k: int) -> tuple[float, float, float, float]:
    """Budgets for the k-th spike's correction term.

    In order: sup of |Laplacian| (1-r)^2, sup of |gradient| (1-r), mass of
    |Laplacian| (1-r), mass of |gradient|^2 (1-r).  The first three get
    delta / 2^k; the quadratic one gets delta / 4^k.  The plain sup of the
    term shares the first budget.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    if k < 1:
        raise ValueError("k must be at least 1")
    slice_k = delta / 2.0 ** k
    return slice_k, slice_k, slice_k, delta / 4.0 ** k


def _spike_member_powers(spike: SpikeSpec) -> list[int]:
    h = spike.half_width
    return [spike.start + j for j in range(1, h + 1)] + \
        [spike.start + 2 * h - j for j in range(1, h)]


def spike_budget(alpha: float, spike: SpikeSpec) -> float:
    """Sum of |deficit coefficients| over the spike interior, < 2 half_width."""
    c = np.abs(deficit_coefficients(alpha, spike.half_width))
    return float(np.sum(c) + np.sum(c[:-1]))


_GATE_NAMES = ("value_sup", "laplacian_sup", "gradient_sup",
               "laplacian_carleson", "gradient_sq_carleson")


@dataclass(frozen=True)
class SpikeGate:
    """Triangle-inequality bounds for one candidate spike against its budgets."""

    spike: SpikeSpec
    budget: float
    names: tuple[str, ...]
    values: tuple[float, ...]
    thresholds: tuple[float, ...]

    @property
    def passed(self) -> bool:
        return all(v <= t for v, t in zip(self.values, self.thresholds))

    @property
    def worst_margin(self) -> float:
        """Largest value/threshold ratio; <= 1 means the gate passes."""
        return max(v / t for v, t in zip(self.values, self.thresholds))


def spike_gate(alpha: float, delta: float, spike: SpikeSpec) -> SpikeGate:
    """Bound the spike's correction through its constituent bumps.

    The correction is a coefficient combination of bumps at the member
    powers; budget * max over members bounds each linear metric, and
    budget^2 * max bounds the squared-gradient mass (Cauchy-Schwarz).
    The gradient sup uses the root of the per-bump squared sup.
    """
    thr = spike_correction_thresholds(delta, spike.half_width)
    reports = [lemma_bounds(m) for m in _spike_member_powers(spike)]
    c_total = spike_budget(alpha, spike)
    values = (
        c_total * max(rep.sup_value for rep in reports),
        c_total * max(rep.sup_laplacian for rep in reports),
        c_total * max(math.sqrt(rep.sup_grad_sq) for rep in reports),
        c_total * max(rep.carl_laplacian for rep in reports),
        c_total ** 2 * max(rep.carl_grad_sq for rep in reports),
    )
    thresholds = (thr[0], thr[0], thr[1], thr[2], thr[3])
    return SpikeGate(spike=spike, budget=c_total, names=_GATE_NAMES,
                     values=values, thresholds=thresholds)


def select_spike_positions(
    alpha: float,
    delta: float,
    n_spikes: int,
    start_floor: int = 1,
    max_start: int = 2 ** 40,
) -> list[int]:
    """Choose spike starts so every gate passes, earliest first.

    For each k the admissible region is searched by doubling from the
    floor imposed by the previous spike, then bisected down to a start
    whose predecessor fails the gate, so each position is locally
    minimal.  Exceeding max_start raises InfeasibleConstructionError.
    """
    if alpha <= 0 or not math.isfinite(alpha):
        raise ValueError("alpha must be positive and finite")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    if not 0 <= n_spikes <= MAX_SPIKES:
        raise ValueError(f"n_spikes must lie in 0..{MAX_SPIKES}")

    starts: list[int] = []
    floor = max(1, int(start_floor))
    for k in range(1, n_spikes + 1):
        def ok(n: int) -> bool:
            return spike_gate(alpha, delta, SpikeSpec(n, k)).passed

        lo, hi = None, floor
        while not ok(hi):
            lo, hi = hi, hi * 2
            if hi > max_start:
                raise InfeasibleConstructionError(
                    f"no admissible start for spike {k} below {max_start} "
                    f"(alpha={alpha}, delta={delta})"
                )
        if lo is not None:
            while hi - lo > 1:
                mid = (lo + hi) // 2
                if ok(mid):
                    hi = mid
                else:
                    lo = mid
        starts.append(hi)
        floor = hi + 2 * k + 1  # next spike must start past this one's end
    return starts


# ---------------------------------------------------------------------- #
# configuration


@dataclass(frozen=True)
class ConstructionConfig:
    """Complete description of one constructed weight sequence.

    spike_starts pairs with half widths 1..n_spikes positionally; r_max
    and tol drive the kernel-ratio cross check and default sampling.
    """

    alpha: float
    delta: float
    n_spikes: int
    spike_starts: tuple[int, ...]
    r_max: float = 0.999
    tol: float = 1e-9

    def __post_init__(self):
        if self.alpha <= 0 or not math.isfinite(self.alpha):
            raise ValueError("alpha must be positive and finite")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        if not 0 <= self.n_spikes <= MAX_SPIKES:
            raise ValueError(f"n_spikes must lie in 0..{MAX_SPIKES}")
        object.__setattr__(self, "spike_starts", tuple(int(n) for n in self.spike_starts))
        if len(self.spike_starts) != self.n_spikes:
            raise ValueError("n_spikes must equal len(spike_starts)")
        if not 0.0 < self.r_max < 1.0:
            raise ValueError("r_max must lie in (0, 1)")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        self.weights()  # validates ordering and gaps

    @classmethod
    def plan(cls, alpha: float, delta: float, n_spikes: int,
             r_max: float = 0.999, tol: float = 1e-9) -> "ConstructionConfig":
        starts = select_spike_positions(alpha, delta, n_spikes)
        return cls(alpha=alpha, delta=delta, n_spikes=n_spikes,
                   spike_starts=tuple(starts), r_max=r_max, tol=tol)

    def weights(self) -> WeightSequence:
        return build_spiked_weights(self.alpha, self.spike_starts)

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "delta": self.delta,
            "K": self.n_spikes,
            "spike_starts": list(self.spike_starts),
            "r_max": self.r_max,
            "tol": self.tol,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ConstructionConfig":
        keys = {"alpha", "delta", "K", "spike_starts", "r_max", "tol"}
        missing = keys - set(data)
        if missing:
            raise ValueError(f"missing config keys: {sorted(missing)}")
        extra = set(data) - keys
        if extra:
            raise ValueError(f"unexpected config keys: {sorted(extra)}")
        return cls(
            alpha=float(data["alpha"]),
            delta=float(data["delta"]),
            n_spikes=int(data["K"]),
            spike_starts=tuple(int(n) for n in data["spike_starts"]),
            r_max=float(data["r_max"]),
            tol=float(data["tol"]),
        )

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_json(cls, text: str) -> "ConstructionConfig":
        return cls.from_dict(json.loads(text))


def delta_for_epsilon(epsilon: float) -> float:
    """Correction budget sufficient for the flatness level epsilon."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    return min(epsilon / (1.0 + epsilon), epsilon / 4.0)


# ---------------------------------------------------------------------- #
# verification


@dataclass(frozen=True)
class ConditionResult:
    condition: str
    threshold: float
    measured: float
    argmax_r: float | None
    passed: bool

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "threshold": self.threshold,
            "measured": self.measured,
            "argmax_r": self.argmax_r,
            "pass": self.passed,
        }


@dataclass(frozen=True)
class VerificationReport:
    conditions: tuple[ConditionResult, ...]
    meta: dict = field(default_factory=dict)
    scans: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    def failures(self) -> list[ConditionResult]:
        return [c for c in self.conditions if not c.passed]

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "meta": self.meta,
            "conditions": [c.to_dict() for c in self.conditions],
            "scans": {
                name: {
                    "value": scan.value,
                    "t_star": scan.t_star,
                    "at_unit_depth": scan.at_unit_depth,
                }
                for name, scan in self.scans.items()
            },
        }


def _row(name: str, threshold: float, measured: float,
         argmax_r: float | None = None) -> ConditionResult:
    return ConditionResult(condition=name, threshold=threshold, measured=measured,
                           argmax_r=argmax_r, passed=bool(measured <= threshold))


def _condition_grid(spikes: Sequence[SpikeSpec], count: int = 801, u_max: float = 46.0) -> np.ndarray:
    powers: set[int] = set()
    extras: list[float] = []
    for sp in spikes:
        for m in _spike_member_powers(sp):
            powers.update(q for q in (2 * m - 2, 2 * m - 1, 2 * m, 2 * m + 1, 2 * m + 2,
                                      4 * m - 2, 4 * m, 4 * m + 2) if q >= 1)
            extras.append(math.sqrt(m / (m + 1.0)))
            extras.append(m / (m + 1.0))
    return merge_grids(
        boundary_refined_grid(count, u_max),
        peak_candidates(sorted(powers)) if powers else None,
        extras if extras else None,
    )


def measure_spike_conditions(alpha: float, spike: SpikeSpec,
                             grid: np.ndarray | None = None) -> dict[str, float]:
    """Measured decay quantities of one spike's assembled correction term."""
    if grid is None:
        grid = _condition_grid([spike])
    h = spike_ratio_term(alpha, spike)
    lap = h.laplacian()
    grad = h.grad_sq()
    _, sup_value = refined_supremum(lambda r: np.abs(h.eval(r * r)), grid)
    _, sup_lap = refined_supremum(lambda r: np.abs(lap.eval(r * r)) * (1.0 - r) ** 2, grid)
    _, sup_grad = refined_supremum(
        lambda r: np.sqrt(np.maximum(grad.eval(r * r), 0.0)) * (1.0 - r), grid)
    return {
        "value_sup": sup_value,
        "laplacian_sup": sup_lap,
        "gradient_sup": sup_grad,
        "laplacian_carleson": radial_carleson_norm(SeriesGapDensity(lap, 1)),
        "gradient_sq_carleson": radial_carleson_norm(SeriesGapDensity(grad, 1, nonneg=True)),
    }


def verify_f_conditions(config: ConstructionConfig,
                        grid: np.ndarray | None = None,
                        include_spike_rows: bool = True) -> VerificationReport:
    """Measure the kernel ratio against its flatness budget delta.

    Rows cover the assembled ratio f = 1 + sum of corrections: deviation
    from 1, weighted Laplacian and gradient suprema, and the two Carleson
    masses.  With include_spike_rows each correction term is also checked
    against its own slice of the budget.  Carleson rows carry no argmax.
    """
    w = config.weights()
    delta = config.delta
    if grid is None:
        grid = _condition_grid(w.spikes)
    f = kernel_ratio_series(w, r_max=config.r_max, tol=config.tol)
    extra = f.add(RadialSeries.from_terms([(0, -1.0)]))
    lap = extra.laplacian()
    grad = extra.grad_sq()

    arg_dev, sup_dev = refined_supremum(lambda r: np.abs(extra.eval(r * r)), grid)
    arg_lap, sup_lap = refined_supremum(
        lambda r: np.abs(lap.eval(r * r)) * (1.0 - r) ** 2, grid)
    arg_grad, sup_grad = refined_supremum(
        lambda r: np.sqrt(np.maximum(grad.eval(r * r), 0.0)) * (1.0 - r), grid)

    lap_density = SeriesGapDensity(lap, 1)
    grad_density = SeriesGapDensity(grad, 1, nonneg=True)

    rows = [
        _row("ratio_deviation", delta, sup_dev, arg_dev),
        _row("laplacian_sup", delta, sup_lap, arg_lap),
        _row("gradient_sup", math.sqrt(delta), sup_grad, arg_grad),
        _row("laplacian_carleson", delta, radial_carleson_norm(lap_density)),
        _row("gradient_carleson", delta, radial_carleson_norm(grad_density)),
    ]

    if include_spike_rows:
        for sp in w.spikes:
            k = sp.half_width
            thr = spike_correction_thresholds(delta, k)
            measured = measure_spike_conditions(config.alpha, sp, grid)
            rows.extend([
                _row(f"spike{k}_value_sup", thr[0], measured["value_sup"]),
                _row(f"spike{k}_laplacian_sup", thr[0], measured["laplacian_sup"]),
                _row(f"spike{k}_gradient_sup", thr[1], measured["gradient_sup"]),
                _row(f"spike{k}_laplacian_carleson", thr[2], measured["laplacian_carleson"]),
                _row(f"spike{k}_gradient_sq_carleson", thr[3], measured["gradient_sq_carleson"]),
            ])

    scans = {
        "laplacian": carleson_norm(lap_density),
        "gradient_sq": carleson_norm(grad_density),
    }
    meta = {
        "config": config.to_dict(),
        "grid_points": int(len(grid)),
        "mode": "ratio_flatness",
    }
    return VerificationReport(conditions=tuple(rows), meta=meta, scans=scans)


def verify_theorem_conditions(config: ConstructionConfig, epsilon: float,
                           grid: np.ndarray | None = None) -> VerificationReport:
    """Certify flatness level epsilon for the constructed weights.

    Three rows: the kernel ratio stays inside [1/(1+eps), 1+eps]; the
    curvature deviation obeys |Delta log f| (1-r)^2 <= eps; and its
    Carleson mass 2 pi integral |Delta log f| (1-r) r dr stays below eps.
    The mass is integrated adaptively with splits at the sign roots of
    the numerator f Delta f - |grad f|^2.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    w = config.weights()
    if grid is None:
        grid = _condition_grid(w.spikes)
    f = kernel_ratio_series(w, r_max=config.r_max, tol=config.tol)

    def band(r):
        vals = f.eval(r * r)
        if np.any(vals <= 0.0):
            raise ArithmeticError("kernel ratio must stay positive")
        return np.maximum(vals, 1.0 / vals)

    arg_band, sup_band = refined_supremum(band, grid)

    arg_curv, sup_curv = refined_supremum(
        lambda r: np.abs(ratio_log_laplacian(f, r)) * (1.0 - r) ** 2, grid)

    # numerator of Delta log f; its sign roots split the mass integral
    dp = f.d_ds()
    numerator = f.multiply(f.laplacian()).add(dp.multiply(dp).shift(1).scale(-1.0))
    cuts = SeriesGapDensity(numerator, 0).sign_roots
    peak_hints = [math.sqrt(m / (m + 1.0)) for sp in w.spikes
                  for m in _spike_member_powers(sp)]
    density = RadialDensity(
        lambda r: np.abs(ratio_log_laplacian(f, r)) * (1.0 - r),
        breakpoints=merge_grids(cuts, peak_hints) if (len(cuts) or peak_hints) else (),
        label="curvature_deviation",
    )
    carl_curv = radial_carleson_norm(density)

    rows = [
        _row("ratio_band", 1.0 + epsilon, sup_band, arg_band),
        _row("curvature_sup", epsilon, sup_curv, arg_curv),
        _row("curvature_carleson", epsilon, carl_curv),
    ]
    meta = {
        "config": config.to_dict(),
        "epsilon": epsilon,
        "delta_sufficient": delta_for_epsilon(epsilon),
        "grid_points": int(len(grid)),
        "mode": "curvature_match",
    }
    scans = {"curvature": carleson_norm(density)}
    return VerificationReport(conditions=tuple(rows), meta=meta, scans=scans)
