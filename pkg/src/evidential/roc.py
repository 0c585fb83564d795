"""Binormal ROC geometry.

A test statistic is N(0, 1) when the condition is absent and N(delta, 1) when
it is present; a result counts as positive when it reaches ``cutoff``.  Each
cutoff gives a point (FPR, TPR).  The secant from the origin to that point has
slope LR+ = TPR/FPR, the secant from the point to (1, 1) has slope
LR- = (1-TPR)/(1-FPR), and their product is

    (TPR - TPR^2) / (FPR - FPR^2).

The tangent slope at the point is the density ratio exp(delta*c - delta^2/2).
On the binormal curve the tangent and the secant product are different
numbers; :func:`convexity_check` reports the gap.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .normal_math import DomainError, check_finite, std_normal_cdf, std_normal_sf

__all__ = [
    "RocModel",
    "RocPoint",
    "ConvexityReport",
    "INTERIOR_EPS",
    "roc_point",
    "roc_curve",
    "positive_secant_lr",
    "negative_secant_lr",
    "secant_product_lr",
    "tangent_lr",
    "convexity_check",
]

# Points closer than this to 0 or 1 on either axis are rejected by the LR ops.
INTERIOR_EPS = 1e-12


@dataclass(frozen=True)
class RocModel:
    separation: float

    def __post_init__(self):
        check_finite(self.separation, "separation")

    @property
    def proper(self):
        return self.separation > 0


@dataclass(frozen=True)
class RocPoint:
    fpr: float
    tpr: float
    cutoff: float = math.nan

    @property
    def interior(self):
        lo, hi = INTERIOR_EPS, 1.0 - INTERIOR_EPS
        return lo <= self.fpr <= hi and lo <= self.tpr <= hi


def _require_interior(pt: RocPoint):
    if not pt.interior:
        raise DomainError(
            f"ROC point (fpr={pt.fpr!r}, tpr={pt.tpr!r}) is not interior; "
            f"both rates must lie in [{INTERIOR_EPS}, {1 - INTERIOR_EPS}]"
        )


def roc_point(model: RocModel, cutoff: float) -> RocPoint:
    cutoff = check_finite(cutoff, "cutoff")
    return RocPoint(
        fpr=std_normal_sf(cutoff),
        tpr=std_normal_sf(cutoff - model.separation),
        cutoff=cutoff,
    )


def roc_curve(model: RocModel, cutoffs):
    return [roc_point(model, c) for c in cutoffs]


def positive_secant_lr(pt: RocPoint) -> float:
    """Slope of the chord from (0, 0) to the point."""
    _require_interior(pt)
    return pt.tpr / pt.fpr


def negative_secant_lr(pt: RocPoint) -> float:
    """Slope of the chord from the point to (1, 1)."""
    _require_interior(pt)
    return (1.0 - pt.tpr) / (1.0 - pt.fpr)


def secant_product_lr(pt: RocPoint) -> float:
    """LR+ times LR-, i.e. (TPR - TPR^2) / (FPR - FPR^2)."""
    _require_interior(pt)
    # factored form; x - x*x cancels badly as x -> 1
    return (pt.tpr * (1.0 - pt.tpr)) / (pt.fpr * (1.0 - pt.fpr))


def tangent_lr(model: RocModel, cutoff: float) -> float:
    """Exact slope dTPR/dFPR of the binormal curve at ``cutoff``."""
    cutoff = check_finite(cutoff, "cutoff")
    d = model.separation
    return math.exp(d * cutoff - 0.5 * d * d)


def _tail_diff(a, b):
    """Phi(a) - Phi(b) for a >= b, using whichever tail avoids cancellation."""
    if a <= 0.0:
        return std_normal_cdf(a) - std_normal_cdf(b)
    if b >= 0.0:
        return std_normal_sf(b) - std_normal_sf(a)
    return 1.0 - std_normal_sf(a) - std_normal_cdf(b)


@dataclass(frozen=True)
class ConvexityReport:
    """Shape diagnostics for a sampled ROC curve.

    ``slopes`` are chord slopes between neighbouring points ordered by
    increasing FPR.  ``max_tangent_secant_gap`` is the largest relative
    difference between the tangent slope and the secant-product LR over the
    interior points; it is reported, not asserted.
    """

    separation: float
    n_points: int
    monotone_increasing: bool
    slopes_strictly_decreasing: bool
    slopes: tuple
    max_tangent_secant_gap: float

    @property
    def proper(self):
        return self.monotone_increasing and self.slopes_strictly_decreasing

    @property
    def message(self):
        if self.proper:
            return "proper: monotone increasing with strictly decreasing slope"
        if not self.monotone_increasing:
            return "not monotone increasing"
        return "monotone but slope not strictly decreasing"

    def as_dict(self):
        return {
            "separation": self.separation,
            "n_points": self.n_points,
            "monotone_increasing": self.monotone_increasing,
            "slopes_strictly_decreasing": self.slopes_strictly_decreasing,
            "proper": self.proper,
            "max_tangent_secant_gap": self.max_tangent_secant_gap,
            "message": self.message,
        }


def convexity_check(model: RocModel, grid) -> ConvexityReport:
    cutoffs = [check_finite(c, "cutoff") for c in grid]
    if len(cutoffs) < 3:
        raise DomainError("convexity_check needs at least 3 cutoffs")
    if any(b <= a for a, b in zip(cutoffs, cutoffs[1:])):
        raise DomainError("cutoff grid must be strictly increasing")

    d = model.separation
    # Walk from the largest cutoff (near (0,0)) to the smallest (near (1,1)).
    ordered = cutoffs[::-1]
    d_fpr, d_tpr = [], []
    for hi, lo in zip(ordered, ordered[1:]):
        d_fpr.append(_tail_diff(-lo, -hi))
        d_tpr.append(_tail_diff(d - lo, d - hi))
    monotone = all(df > 0 and dt > 0 for df, dt in zip(d_fpr, d_tpr))
    slopes = tuple(dt / df if df > 0 else math.inf for df, dt in zip(d_fpr, d_tpr))
    decreasing = all(b < a for a, b in zip(slopes, slopes[1:]))

    gap = 0.0
    for c in cutoffs:
        pt = roc_point(model, c)
        if pt.interior:
            sp = secant_product_lr(pt)
            gap = max(gap, abs(tangent_lr(model, c) - sp) / sp)

    return ConvexityReport(
        separation=d,
        n_points=len(cutoffs),
        monotone_increasing=monotone,
        slopes_strictly_decreasing=decreasing,
        slopes=slopes,
        max_tangent_secant_gap=gap,
    )

