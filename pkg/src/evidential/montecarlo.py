"""Seeded simulation checks for the frequentist identities.

Random numbers come from the Philox4x64-10 counter-based generator.  A run is
split into fixed chunks of ``CHUNK`` draws; chunk ``c`` of stream ``s`` reads
the Philox sequence keyed by ``seed`` with counter words ``[0, 0, c, s]``.
Because every chunk's draws depend only on (seed, stream, chunk) and chunk
results are integer counts, the outcome is the same for any worker count.

Normal variates are produced by pushing open-interval uniforms through
:func:`~evidential.normal_math.std_normal_quantile_array`.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial

import numpy as np

from .normal_math import DomainError, check_finite, std_normal_quantile_array
from .roc import RocModel, roc_point, secant_product_lr, tangent_lr

__all__ = [
    "CHUNK",
    "DEFAULT_N_SIMS",
    "McConfig",
    "McEstimate",
    "Eq1Comparison",
    "uniforms",
    "normal_draws",
    "estimate_exceedance",
    "verify_eq1",
    "sign_error_frequency",
]

CHUNK = 1 << 16
DEFAULT_N_SIMS = 1_000_000
_SEED_LIMIT = 1 << 64

# Stream ids keep the independent estimates of one check on disjoint counters.
_STREAM_FPR = 0
_STREAM_TPR = 1
_STREAM_SIGN = 2


def _check_seed(seed):
    if isinstance(seed, bool) or int(seed) != seed or not 0 <= seed < _SEED_LIMIT:
        raise DomainError(f"seed must be an integer in [0, 2**64), got {seed!r}")
    return int(seed)


def _check_n_sims(n_sims):
    if isinstance(n_sims, bool) or int(n_sims) != n_sims or n_sims < 1:
        raise DomainError(f"n_sims must be a positive integer, got {n_sims!r}")
    return int(n_sims)


@dataclass(frozen=True)
class McConfig:
    seed: int
    n_sims: int = DEFAULT_N_SIMS
    true_theta: float = 0.0
    se: float = 1.0
    cutoff: float = 0.0
    stream: int = 0

    def __post_init__(self):
        _check_seed(self.seed)
        _check_n_sims(self.n_sims)
        check_finite(self.true_theta, "true_theta")
        if not check_finite(self.se, "se") > 0:
            raise DomainError(f"se must be > 0, got {self.se!r}")
        if math.isnan(self.cutoff):
            raise DomainError("cutoff must not be NaN")
        if int(self.stream) != self.stream or not 0 <= self.stream < _SEED_LIMIT:
            raise DomainError(f"stream must be a non-negative 64-bit integer, got {self.stream!r}")


@dataclass(frozen=True)
class McEstimate:
    estimate: float
    std_error: float
    n_sims: int
    seed: int

    @classmethod
    def from_count(cls, hits, n_sims, seed):
        est = hits / n_sims
        return cls(estimate=est, std_error=math.sqrt(est * (1.0 - est) / n_sims),
                   n_sims=n_sims, seed=seed)

    def z_score(self, expected):
        """Deviation from ``expected`` in units of the binomial standard error at ``expected``."""
        sd = math.sqrt(expected * (1.0 - expected) / self.n_sims)
        if sd == 0.0:
            return 0.0 if self.estimate == expected else math.inf
        return (self.estimate - expected) / sd

    def as_dict(self):
        return {"estimate": self.estimate, "std_error": self.std_error,
                "n_sims": self.n_sims, "seed": self.seed}


def uniforms(seed, stream, chunk, size):
    """``size`` uniforms on (0, 1) from the substream (seed, stream, chunk)."""
    bitgen = np.random.Philox(key=seed, counter=[0, 0, chunk, stream])
    raw = bitgen.random_raw(size)
    # Top 53 bits, shifted half a step so neither 0 nor 1 can occur.
    return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def normal_draws(seed, stream, chunk, size, loc=0.0, scale=1.0):
    return loc + scale * std_normal_quantile_array(uniforms(seed, stream, chunk, size))


def _chunk_sizes(n_sims):
    full, rest = divmod(n_sims, CHUNK)
    return [CHUNK] * full + ([rest] if rest else [])


def _exceedance_chunk(cfg: McConfig, chunk: int, size: int) -> int:
    x = normal_draws(cfg.seed, cfg.stream, chunk, size, cfg.true_theta, cfg.se)
    return int(np.count_nonzero(x >= cfg.cutoff))


def _opposite_side_chunk(seed, stream, true_theta, se, delta, chunk, size) -> int:
    x = normal_draws(seed, stream, chunk, size, true_theta, se)
    if true_theta > delta:
        return int(np.count_nonzero(x < delta))
    return int(np.count_nonzero(x > delta))


def _count(fn, n_sims, workers):
    sizes = _chunk_sizes(n_sims)
    chunks = range(len(sizes))
    if workers is None or workers <= 1 or len(sizes) == 1:
        return sum(fn(c, s) for c, s in zip(chunks, sizes))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return sum(pool.map(fn, chunks, sizes))


def estimate_exceedance(cfg: McConfig, workers: int = 1) -> McEstimate:
    """Fraction of Normal(true_theta, se) draws at or above ``cutoff``."""
    hits = _count(partial(_exceedance_chunk, cfg), cfg.n_sims, workers)
    return McEstimate.from_count(hits, cfg.n_sims, cfg.seed)


@dataclass(frozen=True)
class Eq1Comparison:
    """Simulated versus analytic likelihood ratios at one ROC cutoff.

    ``empirical_lr`` is the secant-product LR built from the simulated FPR and
    TPR; ``empirical_lr_se`` is its delta-method standard error.  The tangent
    slope is reported beside the secant product because the two differ on the
    binormal curve; ``tangent_differs`` flags that.
    """

    delta: float
    cutoff: float
    fpr: McEstimate
    tpr: McEstimate
    empirical_lr: float
    empirical_lr_se: float
    analytic_fpr: float
    analytic_tpr: float
    analytic_secant_lr: float
    tangent_lr: float

    @property
    def tangent_differs(self):
        return not math.isclose(self.tangent_lr, self.analytic_secant_lr, rel_tol=1e-9)

    @property
    def lr_z_score(self):
        if not self.empirical_lr_se > 0:
            return math.nan
        return (self.empirical_lr - self.analytic_secant_lr) / self.empirical_lr_se

    def as_dict(self):
        return {
            "delta": self.delta,
            "cutoff": self.cutoff,
            "n_sims": self.fpr.n_sims,
            "seed": self.fpr.seed,
            "fpr_estimate": self.fpr.estimate,
            "fpr_std_error": self.fpr.std_error,
            "fpr_analytic": self.analytic_fpr,
            "tpr_estimate": self.tpr.estimate,
            "tpr_std_error": self.tpr.std_error,
            "tpr_analytic": self.analytic_tpr,
            "empirical_lr": self.empirical_lr,
            "empirical_lr_se": self.empirical_lr_se,
            "analytic_secant_lr": self.analytic_secant_lr,
            "tangent_lr": self.tangent_lr,
            "tangent_differs": self.tangent_differs,
        }


def _secant_product_with_se(fpr: McEstimate, tpr: McEstimate):
    f, t = fpr.estimate, tpr.estimate
    denom = f * (1.0 - f)
    if denom == 0.0:
        return math.nan, math.nan
    lr = t * (1.0 - t) / denom
    d_t = (1.0 - 2.0 * t) / denom
    d_f = -lr * (1.0 - 2.0 * f) / denom
    return lr, math.hypot(d_t * tpr.std_error, d_f * fpr.std_error)


def verify_eq1(delta, cutoff, n_sims=DEFAULT_N_SIMS, seed=0, workers=1) -> Eq1Comparison:
    """Simulate FPR (true shift 0) and TPR (true shift ``delta``) at ``cutoff``."""
    delta = check_finite(delta, "delta")
    cutoff = check_finite(cutoff, "cutoff")
    fpr = estimate_exceedance(
        McConfig(seed=seed, n_sims=n_sims, true_theta=0.0, cutoff=cutoff, stream=_STREAM_FPR),
        workers)
    tpr = estimate_exceedance(
        McConfig(seed=seed, n_sims=n_sims, true_theta=delta, cutoff=cutoff, stream=_STREAM_TPR),
        workers)
    lr, lr_se = _secant_product_with_se(fpr, tpr)

    model = RocModel(delta)
    pt = roc_point(model, cutoff)
    return Eq1Comparison(
        delta=delta,
        cutoff=cutoff,
        fpr=fpr,
        tpr=tpr,
        empirical_lr=lr,
        empirical_lr_se=lr_se,
        analytic_fpr=pt.fpr,
        analytic_tpr=pt.tpr,
        analytic_secant_lr=secant_product_lr(pt),
        tangent_lr=tangent_lr(model, cutoff),
    )


def sign_error_frequency(true_theta, se, delta, n_sims=DEFAULT_N_SIMS, seed=0,
                         workers=1) -> McEstimate:
    """Fraction of simulated trials landing on the wrong side of ``delta``."""
    true_theta = check_finite(true_theta, "true_theta")
    delta = check_finite(delta, "delta")
    if not check_finite(se, "se") > 0:
        raise DomainError(f"se must be > 0, got {se!r}")
    if true_theta == delta:
        raise DomainError("true_theta equals delta; the sign of the effect is undefined")
    seed = _check_seed(seed)
    n_sims = _check_n_sims(n_sims)
    fn = partial(_opposite_side_chunk, seed, _STREAM_SIGN, true_theta, float(se), delta)
    return McEstimate.from_count(_count(fn, n_sims, workers), n_sims, seed)
