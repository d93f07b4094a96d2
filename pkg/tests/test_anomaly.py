"""Tests for wxreport.diagnostics.anomaly -- climatological anomaly scoring."""

import numpy as np
import pytest
from scipy.stats import norm

from wxreport.diagnostics.anomaly import (
    AnomalyParameter,
    AnomalySeverity,
    anomaly_score,
    month_spans,
    score_anomalies,
)

from tests.conftest import BASE_TS, make_normals, make_series

H = 3600

# Month index 5 = June, 6 = July.
TEMPS = [5.0, 6.0, 9.0, 12.0, 15.0, 18.0, 20.0, 20.0, 17.0, 13.0, 8.0, 5.0]
STDS = [1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 2.0, 2.0, 1.0, 1.0, 1.0, 1.0]


class TestZScoreMode:
    def test_two_and_a_half_sigma(self):
        series = make_series(24, temperature=25.0)
        a = anomaly_score(series, make_normals(temps=TEMPS, std=STDS), "temperature")
        assert a.mode == "z-score"
        assert a.baseline_mean == pytest.approx(20.0)
        assert a.z_score == pytest.approx(2.5)
        assert a.percentile == pytest.approx(norm.cdf(2.5) * 100.0)
        assert a.percentile == pytest.approx(99.379, abs=1e-3)
        assert a.severity is AnomalySeverity.HIGH

    def test_deviation_is_exact_difference(self):
        series = make_series(24, temperature=[18.0 + 0.3 * i for i in range(24)])
        a = anomaly_score(series, make_normals(temps=TEMPS, std=STDS), "temperature")
        assert a.deviation == a.forecast_aggregate - a.baseline_mean

    @pytest.mark.parametrize(
        "temp, severity",
        [(20.5, AnomalySeverity.NONE), (22.5, AnomalySeverity.MODERATE), (16.0, AnomalySeverity.HIGH)],
    )
    def test_bands(self, temp, severity):
        a = anomaly_score(make_series(24, temperature=temp), make_normals(temps=TEMPS, std=STDS), "temperature")
        assert a.severity is severity

    def test_monotone_in_forecast(self):
        normals = make_normals(temps=TEMPS, std=STDS)
        z = [
            anomaly_score(make_series(24, temperature=t), normals, "temperature").z_score
            for t in (14.0, 18.0, 20.0, 23.0, 27.0)
        ]
        assert z == sorted(z)
        assert len(set(z)) == len(z)

    def test_shift_never_lowers_z(self):
        normals = make_normals(temps=TEMPS, std=STDS)
        rng = np.random.default_rng(3)
        for _ in range(1000):
            temps = rng.normal(20.0, 3.0, 24)
            before = anomaly_score(make_series(24, temperature=temps), normals, "temperature").z_score
            after = anomaly_score(make_series(24, temperature=temps + 0.01), normals, "temperature").z_score
            assert after >= before


class TestBlending:
    START = BASE_TS - 30 * H  # 2024-06-29T18:00Z

    def test_month_spans(self):
        spans = month_spans(make_series(48, start=self.START))
        assert [(s.month, s.hours) for s in spans] == [(6, 30), (7, 18)]
        assert spans[0].month_hours == 720

    def test_hour_weighted_baseline(self):
        series = make_series(48, start=self.START, temperature=18.75)
        a = anomaly_score(series, make_normals(temps=TEMPS, std=STDS), "temperature")
        assert a.baseline_mean == pytest.approx((30 * 18.0 + 18 * 20.0) / 48)
        assert a.baseline_std == pytest.approx((30 * 1.0 + 18 * 2.0) / 48)
        assert a.z_score == pytest.approx(0.0, abs=1e-9)
        assert a.percentile == pytest.approx(50.0)
        assert a.months == (6, 7)

    def test_precipitation_scaled_to_month(self):
        series = make_series(48, start=self.START, precipitation=0.5)
        precip = [60.0] * 12
        a = anomaly_score(series, make_normals(precip=precip), "precipitation")
        month_hours = (30 * 720 + 18 * 744) / 48
        assert a.forecast_aggregate == pytest.approx(24.0 * month_hours / 48)


class TestThresholdMode:
    def test_no_std_falls_back(self):
        series = make_series(24, temperature=26.0)
        a = anomaly_score(series, make_normals(temps=TEMPS, std=None), "temperature")
        assert a.mode == "threshold"
        assert a.z_score is None and a.percentile is None
        assert a.deviation == pytest.approx(6.0)
        assert a.severity is AnomalySeverity.MODERATE

    def test_large_cold_deviation(self):
        series = make_series(24, temperature=11.0)
        a = anomaly_score(series, make_normals(temps=TEMPS, std=None), "temperature")
        assert a.severity is AnomalySeverity.HIGH

    @pytest.mark.parametrize(
        "rate, severity",
        [(0.0, AnomalySeverity.NONE), (0.25, AnomalySeverity.MODERATE), (1.0, AnomalySeverity.HIGH)],
    )
    def test_precipitation_ratio(self, rate, severity):
        # July: 744 h; 0.25 mm/h -> 186 mm/month against 100 mm.
        series = make_series(24, precipitation=rate)
        a = anomaly_score(series, make_normals(precip=100.0), "precipitation")
        assert a.severity is severity
        assert a.ratio == pytest.approx(rate * 744 / 100.0)

    def test_dry_normal(self):
        wet = anomaly_score(make_series(24, precipitation=0.5), make_normals(precip=0.0), "precipitation")
        dry = anomaly_score(make_series(24), make_normals(precip=0.0), "precipitation")
        assert wet.ratio is None
        assert wet.severity is AnomalySeverity.HIGH
        assert dry.severity is AnomalySeverity.NONE


class TestScoreAnomalies:
    def test_both_parameters_in_order(self):
        reports = score_anomalies(make_series(24), make_normals())
        assert [r.parameter for r in reports] == [AnomalyParameter.TEMPERATURE, AnomalyParameter.PRECIPITATION]

    def test_json_ready(self):
        d = score_anomalies(make_series(24), make_normals())[0].to_dict()
        assert d["parameter"] == "temperature"
        assert d["severity"] in {"none", "moderate", "high"}
        assert d["months"] == [7]
