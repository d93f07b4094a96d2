"""Tests for wxreport.diagnostics.hazards -- threshold hazards and flooding risk."""

import pytest

from wxreport.diagnostics.anomaly import score_anomalies
from wxreport.diagnostics.hazards import (
    HazardKind,
    HazardParams,
    HazardSeverity,
    detect_hazards,
    rolling_sums,
)
from wxreport.diagnostics.summary import run_diagnostics

from tests.conftest import BASE_TS, cold_front_series, make_normals, make_series

H = 3600


def rain(n: int, wet: dict[int, float]) -> list[float]:
    return [wet.get(i, 0.0) for i in range(n)]


class TestHeavyPrecipitation:
    def test_one_run(self):
        series = make_series(24, precipitation=rain(24, {5: 8.0, 6: 12.0, 7: 9.0}))
        [w] = detect_hazards(series)
        assert w.kind is HazardKind.HEAVY_PRECIPITATION
        assert w.time_range == (BASE_TS + 5 * H, BASE_TS + 7 * H)
        assert w.severity is HazardSeverity.WARNING
        assert [t.value for t in w.triggering_values] == [8.0, 12.0, 9.0]
        assert "12.0 mm/h" in w.rationale

    def test_separate_runs(self):
        series = make_series(24, precipitation=rain(24, {2: 8.0, 10: 20.0}))
        warnings = detect_hazards(series)
        assert [w.time_range[0] for w in warnings] == [BASE_TS + 2 * H, BASE_TS + 10 * H]
        assert warnings[1].severity is HazardSeverity.SEVERE

    def test_custom_threshold(self):
        series = make_series(24, precipitation=rain(24, {3: 6.0}))
        assert detect_hazards(series) == []
        assert len(detect_hazards(series, params=HazardParams(heavy_precipitation=5.0))) == 1


class TestHighWind:
    def test_gust_only(self):
        gusts = [26.0 if i == 3 else 8.0 for i in range(12)]
        [w] = detect_hazards(make_series(12, wind_gust=gusts))
        assert w.kind is HazardKind.HIGH_WIND
        assert w.severity is HazardSeverity.ADVISORY
        assert [(t.parameter, t.value) for t in w.triggering_values] == [("wind_gust", 26.0)]

    def test_sustained_and_gust(self):
        speed = [18.5 if i in (4, 5) else 5.0 for i in range(12)]
        gust = [27.0 if i in (4, 5) else 8.0 for i in range(12)]
        [w] = detect_hazards(make_series(12, wind_speed=speed, wind_gust=gust))
        assert w.time_range == (BASE_TS + 4 * H, BASE_TS + 5 * H)
        assert len(w.triggering_values) == 4

    def test_missing_gusts(self):
        speed = [20.0 if i == 1 else 5.0 for i in range(6)]
        [w] = detect_hazards(make_series(6, wind_speed=speed, wind_gust=None))
        assert "gusts" not in w.rationale


class TestLowVisibility:
    def test_fog(self):
        vis = [400.0 if i in (2, 3) else 10000.0 for i in range(8)]
        [w] = detect_hazards(make_series(8, visibility=vis))
        assert w.kind is HazardKind.LOW_VISIBILITY
        assert w.severity is HazardSeverity.SEVERE


class TestTemperatureExtremes:
    def test_heat_needs_anomaly(self):
        series = make_series(24, temperature=[30.0 if i == 10 else 20.0 for i in range(24)])
        assert detect_hazards(series) == []
        anomalies = score_anomalies(series, make_normals(temps=20.0, std=None))
        [w] = detect_hazards(series, anomalies)
        assert w.kind is HazardKind.HEAT
        assert w.severity is HazardSeverity.ADVISORY
        assert w.time_range == (BASE_TS + 10 * H, BASE_TS + 10 * H)

    def test_cold(self):
        series = make_series(24, temperature=[10.0 if i < 3 else 20.0 for i in range(24)])
        anomalies = score_anomalies(series, make_normals(temps=20.0, std=None))
        [w] = detect_hazards(series, anomalies)
        assert w.kind is HazardKind.COLD
        assert len(w.triggering_values) == 3


class TestFlooding:
    SERIES = make_series(24, precipitation=rain(24, {i: 6.0 for i in range(6)}))

    def test_gated_on_anomaly(self):
        anomalies = score_anomalies(self.SERIES, make_normals(precip=60.0))
        [w] = detect_hazards(self.SERIES, anomalies)
        assert w.kind is HazardKind.FLOODING_RISK
        assert w.time_range == (BASE_TS, BASE_TS + 5 * H)
        [trigger] = w.triggering_values
        assert trigger.parameter == "precipitation_6h_sum"
        assert trigger.value == pytest.approx(36.0)
        assert "high anomaly" in w.rationale

    def test_no_flooding_without_anomaly(self):
        anomalies = score_anomalies(self.SERIES, make_normals(precip=5000.0))
        assert detect_hazards(self.SERIES, anomalies) == []

    def test_rolling_sums(self):
        assert list(rolling_sums([1.0, 2.0, 3.0, 4.0], 2)) == [3.0, 5.0, 7.0]
        assert len(rolling_sums([1.0], 6)) == 0


class TestOrdering:
    def test_sorted_by_start_then_kind(self):
        speed = [20.0 if i == 8 else 5.0 for i in range(24)]
        series = make_series(24, wind_speed=speed, precipitation=rain(24, {8: 9.0, 2: 7.5}))
        warnings = detect_hazards(series)
        assert [w.kind for w in warnings] == [
            HazardKind.HEAVY_PRECIPITATION,
            HazardKind.HEAVY_PRECIPITATION,
            HazardKind.HIGH_WIND,
        ]
        starts = [w.time_range[0] for w in warnings]
        assert starts == sorted(starts)


class TestRunDiagnostics:
    def test_summary(self):
        summary = run_diagnostics(cold_front_series(), make_normals(temps=20.0))
        assert len(summary.fronts) == 1
        assert summary.hours == 24
        assert summary.has_findings
        d = summary.to_dict()
        assert d["fronts"][0]["kind"] == "cold_front"

    def test_short_series_skips_fronts(self, caplog):
        summary = run_diagnostics(make_series(6), make_normals(temps=20.0))
        assert summary.fronts == []
        assert "front detection needs" in caplog.text

    def test_quiet_series(self):
        summary = run_diagnostics(make_series(24), make_normals(temps=20.0, precip=60.0))
        assert not summary.has_findings
        assert summary.prevailing_wind_dir == pytest.approx(180.0)
