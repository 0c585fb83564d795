import csv
import io
import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from evidential.inference import (
    GREATER,
    LESS,
    PollSpec,
    TrialSpec,
    evidential_report,
    observed_power,
    one_sided_p,
    poll_report,
    poll_trial,
    power,
    report_fields,
    report_to_csv,
    report_to_json,
    two_sided_p,
    z_statistic,
)
from evidential.normal_math import DomainError
from oracles import binomial_tail_exact, normal_cdf_decimal

P_AT_Z1 = normal_cdf_decimal(-1.0)


class TestTrialSpec:
    @pytest.mark.parametrize("kwargs", [
        dict(theta_obs=1, se=0),
        dict(theta_obs=1, se=-1),
        dict(theta_obs=math.nan, se=1),
        dict(theta_obs=1, se=1, delta=math.inf),
        dict(theta_obs=1, se=1, favored_direction="up"),
        dict(theta_obs=1, se=1, n=0),
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(DomainError):
            TrialSpec(**kwargs)


class TestPValues:
    def test_z_examples(self):
        assert z_statistic(TrialSpec(2.5, 1.3, delta=2.5)) == 0.0
        assert z_statistic(TrialSpec(1.96, 1.0)) == 1.96
        assert z_statistic(TrialSpec(3.0, 2.0, delta=1.0)) == 1.0

    def test_one_sided(self):
        assert one_sided_p(TrialSpec(0.0, 1.0)) == 0.5
        assert one_sided_p(TrialSpec(1.96, 1.0)) == pytest.approx(0.025, abs=1e-4)
        assert one_sided_p(TrialSpec(1.0, 1.0)) == pytest.approx(P_AT_Z1, rel=1e-14)
        assert one_sided_p(TrialSpec(-1.0, 1.0)) == pytest.approx(P_AT_Z1, rel=1e-14)

    def test_two_sided(self):
        assert two_sided_p(TrialSpec(1.96, 1.0)) == pytest.approx(0.05, abs=1e-4)
        assert two_sided_p(TrialSpec(0.0, 1.0)) == 1.0
        assert two_sided_p(TrialSpec(1.0, 1.0)) == pytest.approx(0.3173, abs=1e-4)

    @given(st.floats(-8, 8).filter(lambda z: z != 0))
    def test_two_sided_is_twice_one_sided(self, z):
        trial = TrialSpec(z, 1.0)
        assert two_sided_p(trial) == 2.0 * one_sided_p(trial)

    @given(st.floats(-30, 30), st.floats(0.01, 10), st.floats(-5, 5), st.floats(1e-3, 1e3))
    def test_scale_invariance(self, z, se, delta, k):
        theta = delta + z * se
        a = evidential_report(TrialSpec(theta, se, delta, GREATER))
        b = evidential_report(TrialSpec(theta * k, se * k, delta * k, GREATER))
        assert b.z == pytest.approx(a.z, rel=1e-12, abs=1e-12)
        assert b.p_one_sided == pytest.approx(a.p_one_sided, rel=1e-10)
        for ra, rb in zip(a.rows, b.rows):
            assert rb.lr == pytest.approx(ra.lr, rel=1e-9)


class TestPower:
    def test_null_effect(self):
        for alpha in (0.01, 0.05, 0.3):
            assert power(alpha, 0.0) == pytest.approx(alpha, rel=1e-12)

    def test_half(self):
        assert power(0.025, 1.959963984540054) == pytest.approx(0.5, abs=1e-12)
        assert power(0.025, 1.96) == pytest.approx(0.5, abs=1e-4)

    def test_eighty_percent(self):
        assert power(0.025, 2.80) == pytest.approx(0.80, abs=1e-3)
        # 1 - Phi(1.959964 - 2.80)
        assert power(0.025, 2.80) == pytest.approx(normal_cdf_decimal(2.80 - 1.959963984540054),
                                                   rel=1e-12)

    def test_never_below_alpha(self):
        for alpha in np.linspace(0.001, 0.999, 50):
            for z in np.linspace(0, 5, 51):
                assert power(alpha, z) >= alpha - 1e-15

    @pytest.mark.parametrize("p", [0.025, P_AT_Z1, 0.4])
    def test_observed_power_examples(self, p):
        assert observed_power(p) == 0.5

    def test_observed_power_grid(self):
        for p in np.linspace(0.001, 0.499, 500):
            assert abs(observed_power(p) - 0.5) <= 1e-12

    @pytest.mark.parametrize("p", [0.5, 0.7, 0.0, 1.0])
    def test_observed_power_domain(self, p):
        with pytest.raises(DomainError):
            observed_power(p)


class TestEvidentialReport:
    def test_underflow_rejected(self):
        with pytest.raises(DomainError, match="underflows"):
            evidential_report(TrialSpec(100.0, 1.0))

    def test_favored_direction_matches(self):
        r = evidential_report(TrialSpec(theta_obs=3.0, se=2.0, delta=1.0,
                                        favored_direction=GREATER), 1.0)
        assert r.observed_matches_favored
        assert r.mle_lr == pytest.approx(1.8729, abs=1e-4)
        assert r.posterior_favored == pytest.approx(0.6519, abs=1e-4)
        assert r.sign_error_prob == pytest.approx(0.3481, abs=1e-4)
        assert r.observed_power == 0.5

    def test_opposite_direction(self):
        r = evidential_report(TrialSpec(theta_obs=-1.0, se=2.0, delta=1.0,
                                        favored_direction=GREATER), 1.0)
        assert not r.observed_matches_favored
        assert r.mle_lr == pytest.approx(1 / 1.8729, abs=1e-4)
        assert r.mle_lr == pytest.approx(0.5339, abs=1e-4)
        assert r.posterior_favored == pytest.approx(0.3481, abs=1e-4)
        for row in r.rows:
            assert row.lr <= 1.0

    def test_at_dividing_value(self):
        for prior in (0.25, 1.0, 4.0):
            r = evidential_report(TrialSpec(2.0, 1.0, delta=2.0, favored_direction=LESS), prior)
            assert r.z == 0.0
            assert all(row.lr == 1.0 for row in r.rows)
            assert not r.row("sellke").valid
            assert r.posterior_favored == pytest.approx(prior / (1 + prior), rel=1e-15)
            assert r.p_two_sided == 1.0

    def test_no_favored_direction_orients_to_observed(self):
        r = evidential_report(TrialSpec(-1.0, 1.0))
        assert r.favored_direction == LESS
        assert r.observed_matches_favored
        assert r.mle_lr > 1

    @given(st.floats(0.01, 6), st.floats(0.1, 5))
    def test_antisymmetry(self, d, se):
        up = evidential_report(TrialSpec(d * se, se, 0.0, GREATER), 1.0)
        down = evidential_report(TrialSpec(-d * se, se, 0.0, GREATER), 1.0)
        assert up.mle_lr * down.mle_lr == pytest.approx(1.0, rel=1e-12)
        assert up.posterior_favored + down.posterior_favored == pytest.approx(1.0, rel=1e-12)

    @given(st.floats(-6, 6), st.floats(0.01, 100))
    def test_sign_error_is_posterior_of_other_side(self, z, prior):
        r = evidential_report(TrialSpec(z, 1.0, 0.0, GREATER), prior)
        if r.observed_matches_favored:
            assert r.sign_error_prob == pytest.approx(1 - r.posterior_favored, abs=1e-15)
        else:
            assert r.sign_error_prob == r.posterior_favored

    def test_prior_shifts_posterior(self):
        r = evidential_report(TrialSpec(1.0, 1.0, 0.0, GREATER), 3.0)
        lr = r.mle_lr
        assert r.posterior_favored == pytest.approx(3 * lr / (1 + 3 * lr), rel=1e-15)


class TestSerialization:
    report = evidential_report(TrialSpec(1.0, 1.0, 0.0, GREATER), 1.0)

    def test_fields(self):
        fields = report_fields(self.report)
        for name in ("z", "p_one_sided", "p_two_sided", "observed_matches_favored",
                     "posterior_favored", "sign_error_prob", "observed_power"):
            assert name in fields
        assert fields["mle_lr_lr"] == self.report.mle_lr
        assert fields["sellke_valid"] is True

    def test_json_round_trip(self):
        text = report_to_json(self.report)
        obj = json.loads(text)
        assert json.dumps(obj, indent=2) == text
        assert obj["posterior_favored"] == self.report.posterior_favored

    def test_csv_two_rows(self):
        text = report_to_csv(self.report)
        rows = list(csv.reader(io.StringIO(text)))
        assert len(rows) == 2
        assert rows[0] == list(report_fields(self.report))
        record = dict(zip(*rows))
        assert float(record["mle_lr_lr"]) == self.report.mle_lr
        assert record["observed_matches_favored"] == "true"

    def test_csv_precision(self):
        record = dict(zip(*csv.reader(io.StringIO(report_to_csv(self.report, precision=4)))))
        assert record["posterior_favored"] == "0.6519"


class TestPoll:
    def test_table_pipeline(self):
        result = poll_report(PollSpec(100, 55, 0.5), 1.0)
        assert result.report.z == pytest.approx(1.0, abs=1e-12)
        posts = [row.posterior for row in result.report.rows]
        assert posts == pytest.approx([0.8413, 0.6519, 0.6225, 0.5574], abs=1e-4)

    def test_level(self):
        result = poll_report(PollSpec(100, 50, 0.5))
        assert result.report.z == 0.0
        assert result.report.posterior_favored == 0.5

    def test_exact_annex(self):
        result = poll_report(PollSpec(100, 55, 0.5))
        assert result.exact_tail == pytest.approx(binomial_tail_exact(100, 55, 0.5), rel=1e-12)
        assert result.exact_tail == pytest.approx(0.1841, abs=1e-4)
        assert result.normal_tail == pytest.approx(0.1587, abs=1e-4)

    def test_exact_annex_other_side(self):
        result = poll_report(PollSpec(100, 42, 0.5))
        assert result.exact_tail == pytest.approx(binomial_tail_exact(100, 58, 0.5), rel=1e-12)
        assert not result.report.observed_matches_favored

    def test_null_anchored_se(self):
        trial = poll_trial(PollSpec(400, 200, 0.5))
        assert trial.se == pytest.approx(0.025, rel=1e-15)

    @pytest.mark.parametrize("args", [(0, 0, 0.5), (10, 11, 0.5), (10, -1, 0.5), (10, 5, 1.0)])
    def test_invalid(self, args):
        with pytest.raises(DomainError):
            PollSpec(*args)
