"""Evidential analysis of a trial summarised as (effect, standard error).

The trial is tested against a dividing value ``delta`` that splits the
parameter space into "true effect below delta" and "true effect above delta".
The one-sided p-value is taken toward the observed direction, so it is the
false positive rate of the test whose cutoff equals the observed effect.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

from .calibration import CalibrationRow, Odds, calibration_rows, posterior_from_lr
from .normal_math import (
    DomainError,
    Probability,
    ZScore,
    binomial_tail,
    check_finite,
    check_probability,
    std_normal_quantile,
    std_normal_sf,
)

__all__ = [
    "GREATER",
    "LESS",
    "TrialSpec",
    "PollSpec",
    "EvidentialReport",
    "PollReport",
    "z_statistic",
    "one_sided_p",
    "two_sided_p",
    "observed_power",
    "power",
    "evidential_report",
    "poll_trial",
    "poll_report",
    "report_fields",
    "report_to_json",
    "report_to_csv",
    "format_value",
]

GREATER = "greater"
LESS = "less"


@dataclass(frozen=True)
class TrialSpec:
    theta_obs: float
    se: float
    delta: float = 0.0
    favored_direction: str | None = None
    n: int | None = None

    def __post_init__(self):
        check_finite(self.theta_obs, "theta_obs")
        check_finite(self.delta, "delta")
        if not check_finite(self.se, "se") > 0:
            raise DomainError(f"se must be > 0, got {self.se!r}")
        if self.favored_direction not in (None, GREATER, LESS):
            raise DomainError(
                f"favored_direction must be 'greater', 'less' or None, "
                f"got {self.favored_direction!r}"
            )
        if self.n is not None and (int(self.n) != self.n or self.n < 1):
            raise DomainError(f"n must be a positive integer, got {self.n!r}")


@dataclass(frozen=True)
class PollSpec:
    n: int
    k: int
    p0: float = 0.5

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n!r}")
        if int(self.k) != self.k or not 0 <= self.k <= self.n:
            raise DomainError(f"k must be an integer in [0, n], got {self.k!r}")
        check_probability(self.p0, "p0")


def z_statistic(trial: TrialSpec) -> ZScore:
    return (trial.theta_obs - trial.delta) / trial.se


def one_sided_p(trial: TrialSpec) -> Probability:
    """Tail beyond the observed effect, taken toward the observed direction."""
    return std_normal_sf(abs(z_statistic(trial)))


def two_sided_p(trial: TrialSpec) -> Probability:
    return min(1.0, 2.0 * one_sided_p(trial))


def power(alpha: Probability, effect_z: ZScore) -> Probability:
    """Power of a one-sided level-``alpha`` z test when the true shift is ``effect_z``."""
    alpha = check_probability(alpha, "alpha")
    effect_z = check_finite(effect_z, "effect_z")
    # -quantile(alpha) rather than quantile(1 - alpha): 1 - alpha rounds to 1 for tiny alpha
    return std_normal_sf(-std_normal_quantile(alpha) - effect_z)


def observed_power(p: Probability) -> Probability:
    """Power with alpha set to the observed one-sided p and the true effect set
    to the observed one.  The critical value and the effect coincide, so the
    result is 0.5 whatever ``p`` is.
    """
    p = check_probability(p)
    if p >= 0.5:
        raise DomainError(f"observed_power needs 0 < p < 0.5, got {p!r}")
    return power(p, -std_normal_quantile(p))


@dataclass(frozen=True)
class EvidentialReport:
    """Everything derived from one trial and one prior.

    ``rows`` are oriented to the favored direction: a likelihood ratio above 1
    supports it.  ``sign_error_prob`` is the posterior probability that the
    true effect lies on the other side of ``delta`` from the observed one.
    """

    z: ZScore
    p_one_sided: Probability
    p_two_sided: Probability
    favored_direction: str
    observed_matches_favored: bool
    prior_odds: Odds
    rows: tuple = field(default_factory=tuple)
    posterior_favored: Probability = 0.5
    sign_error_prob: Probability = 0.5
    observed_power: Probability = 0.5

    def row(self, method) -> CalibrationRow:
        for r in self.rows:
            if r.method == method:
                return r
        raise KeyError(method)

    @property
    def mle_lr(self):
        return self.row("mle_lr").lr


def _observed_direction(z):
    return LESS if z < 0 else GREATER


def evidential_report(trial: TrialSpec, prior: Odds = 1.0) -> EvidentialReport:
    """Full report for ``trial``; ``prior`` is the prior odds on the favored direction.

    With no favored direction on the trial the report orients to the observed
    direction.  A trial exactly at ``delta`` carries no directional evidence:
    every likelihood ratio is 1 and it is treated as matching the favored
    direction.
    """
    z = z_statistic(trial)
    p = one_sided_p(trial)
    if p == 0.0:
        raise DomainError(f"|z| = {abs(z):.6g} is too large; the one-sided p underflows to 0")
    favored = trial.favored_direction or _observed_direction(z)
    matches = z == 0 or _observed_direction(z) == favored

    rows = tuple(calibration_rows(z, prior, toward_favored=matches, p=p))
    mle = next(r for r in rows if r.method == "mle_lr")
    posterior = posterior_from_lr(mle.lr, prior)
    # Probability the truth lies opposite the observed side.
    sign_error = 1.0 - posterior if matches else posterior

    return EvidentialReport(
        z=z,
        p_one_sided=p,
        p_two_sided=min(1.0, 2.0 * p),
        favored_direction=favored,
        observed_matches_favored=matches,
        prior_odds=float(prior),
        rows=rows,
        posterior_favored=posterior,
        sign_error_prob=sign_error,
        observed_power=observed_power(p) if p < 0.5 else 0.5,
    )


# --- serialization ---------------------------------------------------------

_SCALAR_FIELDS = (
    "z",
    "p_one_sided",
    "p_two_sided",
    "favored_direction",
    "observed_matches_favored",
    "prior_odds",
    "posterior_favored",
    "sign_error_prob",
    "observed_power",
)
_ROW_FIELDS = ("lr", "posterior", "raw_value", "valid")


def report_fields(report: EvidentialReport) -> dict:
    """Flatten a report into an ordered key/value mapping.

    Calibration rows become ``<method>_<field>`` keys, e.g. ``mle_lr_lr``.
    """
    out = {name: getattr(report, name) for name in _SCALAR_FIELDS}
    for row in report.rows:
        for name in _ROW_FIELDS:
            out[f"{row.method}_{name}"] = getattr(row, name)
    return out


def report_to_json(report: EvidentialReport, **extra) -> str:
    return json.dumps({**report_fields(report), **extra}, indent=2)


def report_to_csv(report: EvidentialReport, precision: int | None = None, **extra) -> str:
    """Header line plus one value line; floats to ``precision`` significant
    digits, or shortest round-trip form when ``precision`` is None.
    """
    fields = {**report_fields(report), **extra}
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields.keys())
    writer.writerow(format_value(v, precision) for v in fields.values())
    return buf.getvalue()


def format_value(v, precision: int | None = None) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v) if precision is None else format(v, f".{precision}g")
    return str(v)


# --- poll example ----------------------------------------------------------

@dataclass(frozen=True)
class PollReport:
    """Evidential report for a poll plus the exact binomial comparison."""

    poll: PollSpec
    report: EvidentialReport
    exact_tail: Probability
    normal_tail: Probability

    @property
    def approximation_error(self):
        return self.exact_tail - self.normal_tail


def poll_trial(poll: PollSpec, favored_direction: str | None = GREATER) -> TrialSpec:
    """Normal approximation with the standard error taken under p0, so a share
    one standard error above p0 gives z = 1 exactly.
    """
    se = math.sqrt(poll.p0 * (1.0 - poll.p0) / poll.n)
    return TrialSpec(theta_obs=poll.k / poll.n, se=se, delta=poll.p0,
                     favored_direction=favored_direction, n=poll.n)


def poll_report(poll: PollSpec, prior: Odds = 1.0,
                favored_direction: str | None = GREATER) -> PollReport:
    trial = poll_trial(poll, favored_direction)
    report = evidential_report(trial, prior)
    # Exact tail in the observed direction, matching the normal one-sided p.
    if poll.k >= poll.n * poll.p0:
        exact = binomial_tail(poll.n, poll.k, poll.p0)
    else:
        exact = binomial_tail(poll.n, poll.n - poll.k, 1.0 - poll.p0)
    return PollReport(poll=poll, report=report, exact_tail=exact,
                      normal_tail=report.p_one_sided)
