"""Calibrations turning a one-sided p-value into a likelihood ratio.

Four calibrations are provided:

* ``mle``      0.25 / (p - p^2), the ratio for the test whose cutoff sits at
               the observed effect (TPR = 0.5, FPR = p);
* ``marsman``  (1 - p) / p, reading p as the posterior probability of the
               opposite direction under a flat prior;
* ``goodman``  exp(z^2 / 2), the normal density ratio at the observed z;
* ``sellke``   the -e p ln p minimum Bayes factor bound.

Every value returned by the ``*_lr`` functions and carried by
:class:`CalibrationRow` is in favored-direction form: greater than one when
the data point toward the hypothesis being favored.  ``sellke_raw`` keeps the
native null-favoring bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .normal_math import (
    DomainError,
    Probability,
    ZScore,
    check_finite,
    check_probability,
    std_normal_sf,
)

__all__ = [
    "LikelihoodRatio",
    "Odds",
    "METHODS",
    "FAVORED",
    "NULL_FAVORING",
    "CalibrationRow",
    "mle_lr",
    "goodman_lr",
    "marsman_lr",
    "sellke_raw",
    "sellke_valid",
    "sellke_mbf",
    "odds_to_probability",
    "probability_to_odds",
    "posterior_odds",
    "posterior_from_lr",
    "calibration_rows",
    "calibration_table",
]

LikelihoodRatio = float
Odds = float

FAVORED = "favored-direction"
NULL_FAVORING = "null-favoring"

# Row order of the comparison table.
METHODS = ("marsman", "mle_lr", "goodman", "sellke")

_FORMULAS = {
    "marsman": "(1-P)/P",
    "mle_lr": "0.25/(P-P^2)",
    "goodman": "exp(Z^2/2)",
    "sellke": "-e*P*log(P)",
}
_PRIOR_TEXT = {
    "marsman": "Uniform",
    "mle_lr": "1:1 odds",
    "goodman": "1:1 odds",
    "sellke": "Beta prior",
}

_INV_E = math.exp(-1.0)


def _check_positive(x, name):
    x = check_finite(x, name)
    if x <= 0.0:
        raise DomainError(f"{name} must be > 0, got {x!r}")
    return x


def mle_lr(p: Probability) -> LikelihoodRatio:
    """Likelihood ratio of the test thresholded at the observed effect."""
    p = check_probability(p)
    return 0.25 / (p * (1.0 - p))


def goodman_lr(z: ZScore) -> LikelihoodRatio:
    z = check_finite(z, "z")
    return math.exp(0.5 * z * z)


def marsman_lr(p: Probability) -> LikelihoodRatio:
    p = check_probability(p)
    return (1.0 - p) / p


def sellke_valid(p: Probability) -> bool:
    """The -e p ln p bound only applies below p = 1/e."""
    return check_probability(p) < _INV_E


def sellke_raw(p: Probability) -> float:
    """Unclamped -e p ln p; the bound on the Bayes factor in favor of the null."""
    p = check_probability(p)
    return -math.e * p * math.log(p)


def sellke_mbf(p: Probability) -> LikelihoodRatio:
    """Sellke bound in favored-direction form, clamped to 1 for p >= 1/e."""
    if not sellke_valid(p):
        return 1.0
    return 1.0 / sellke_raw(p)


def odds_to_probability(odds: Odds) -> Probability:
    odds = _check_positive(odds, "odds")
    if math.isinf(odds):
        return 1.0
    return odds / (1.0 + odds)


def probability_to_odds(prob: Probability) -> Odds:
    prob = check_probability(prob, "prob")
    return prob / (1.0 - prob)


def posterior_odds(lr: LikelihoodRatio, prior: Odds) -> Odds:
    return _check_positive(prior, "prior") * _check_positive(lr, "lr")


def posterior_from_lr(lr: LikelihoodRatio, prior: Odds = 1.0) -> Probability:
    """Posterior probability from prior odds times the likelihood ratio."""
    post = posterior_odds(lr, prior)
    return post / (1.0 + post)


@dataclass(frozen=True)
class CalibrationRow:
    """One calibration evaluated at a single observed result.

    ``lr`` is in favored-direction form.  ``raw_value`` is what the formula
    itself produces at the observed-direction p, before clamping or
    reorientation; for Sellke this is the null-favoring bound.  ``valid`` is
    False only for Sellke rows outside p < 1/e.
    """

    method: str
    formula: str
    prior_description: str
    lr: LikelihoodRatio
    posterior: Probability
    raw_value: float
    raw_orientation: str
    valid: bool = True

    def as_dict(self):
        return {
            "method": self.method,
            "formula": self.formula,
            "prior_description": self.prior_description,
            "lr": self.lr,
            "posterior": self.posterior,
            "raw_value": self.raw_value,
            "raw_orientation": self.raw_orientation,
            "valid": self.valid,
        }


def calibration_rows(z: ZScore, prior: Odds = 1.0, *, toward_favored: bool = True,
                     p: Probability | None = None):
    """Evaluate all four calibrations in table order.

    ``p`` defaults to the observed-direction tail Phi(-|z|).  When
    ``toward_favored`` is False the observed effect opposes the favored
    direction and every likelihood ratio is inverted.  Goodman always uses
    ``z`` itself, which lets callers pass a display-rounded ``p`` without
    disturbing it.
    """
    z = check_finite(z, "z")
    prior = _check_positive(prior, "prior")
    if p is None:
        p = std_normal_sf(abs(z))
    p = check_probability(p)

    values = {
        "marsman": (marsman_lr(p), marsman_lr(p), FAVORED, True),
        "mle_lr": (mle_lr(p), mle_lr(p), FAVORED, True),
        "goodman": (goodman_lr(z), goodman_lr(z), FAVORED, True),
        "sellke": (sellke_mbf(p), sellke_raw(p), NULL_FAVORING, sellke_valid(p)),
    }
    rows = []
    for method in METHODS:
        lr, raw, raw_orientation, valid = values[method]
        if not toward_favored:
            lr = 1.0 / lr
        rows.append(CalibrationRow(
            method=method,
            formula=_FORMULAS[method],
            prior_description=_PRIOR_TEXT[method],
            lr=lr,
            posterior=posterior_from_lr(lr, prior),
            raw_value=raw,
            raw_orientation=raw_orientation,
            valid=valid,
        ))
    return rows


def calibration_table(z: ZScore, prior: Odds = 1.0):
    """All four calibrations at ``z`` sorted by descending likelihood ratio."""
    return sorted(calibration_rows(z, prior), key=lambda row: -row.lr)
