"""One-sided p-values read as likelihood ratios.

Calibrations from p or z to likelihood ratios, posterior probabilities from
prior odds, binormal ROC geometry, and seeded Monte Carlo checks.
"""

__version__ = "0.1.0"

from .calibration import (
    CalibrationRow,
    calibration_rows,
    calibration_table,
    goodman_lr,
    marsman_lr,
    mle_lr,
    posterior_from_lr,
    sellke_mbf,
    sellke_raw,
)
from .inference import (
    EvidentialReport,
    PollSpec,
    TrialSpec,
    evidential_report,
    observed_power,
    one_sided_p,
    poll_report,
    power,
    two_sided_p,
    z_statistic,
)
from .normal_math import (
    DomainError,
    binomial_tail,
    std_normal_cdf,
    std_normal_pdf,
    std_normal_quantile,
    std_normal_sf,
)
