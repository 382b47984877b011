import datetime as dt
import io

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stlf.data import (
    CSV_HEADER,
    WEEKDAY,
    WEEKEND,
    SyntheticConfig,
    daytype_of,
    format_csv,
    format_holidays,
    generate_synthetic,
    parse_csv,
    parse_holidays,
    split_by_daytype,
    synthetic_load,
    wind_chill,
)
from stlf.domain import validate_dataset
from stlf.errors import ConfigError, GapInSeriesError, MalformedRowError, SchemaMismatchError

from conftest import MONDAY, make_dataset


def csv_text(n=96, start=dt.datetime(2024, 1, 1)):
    rows = [",".join(CSV_HEADER)]
    for i in range(n):
        ts = start + dt.timedelta(hours=i)
        rows.append(f"{ts:%Y-%m-%dT%H:%M},{500 + i},{3.5},{70},{2.0},{1.0}")
    return "\n".join(rows) + "\n"


class TestParseCsv:
    def test_well_formed(self):
        ds = parse_csv(csv_text(96))
        assert len(ds) == 96
        assert ds.load[5] == 505.0

    def test_accepts_stream(self):
        assert len(parse_csv(io.StringIO(csv_text(100)))) == 100

    def test_text_in_load_column_reports_line(self):
        lines = csv_text(96).splitlines()
        lines[4] = lines[4].replace(",503,", ",abc,")
        with pytest.raises(MalformedRowError) as err:
            parse_csv("\n".join(lines))
        assert err.value.line == 5

    def test_rows_out_of_order(self):
        lines = csv_text(96).splitlines()
        lines[3], lines[4] = lines[4], lines[3]
        with pytest.raises(GapInSeriesError):
            parse_csv("\n".join(lines))

    def test_wrong_header(self):
        with pytest.raises(SchemaMismatchError):
            parse_csv("time,load\n")

    def test_empty(self):
        with pytest.raises(SchemaMismatchError):
            parse_csv("")

    def test_wrong_field_count(self):
        lines = csv_text(96).splitlines()
        lines[2] += ",9"
        with pytest.raises(MalformedRowError):
            parse_csv("\n".join(lines))

    def test_round_trip_is_exact(self):
        ds = generate_synthetic(SyntheticConfig(num_days=5, seed=4))
        back = parse_csv(format_csv(ds), ds.holidays)
        assert back.equals(ds)

    def test_holidays_round_trip(self):
        days = {dt.date(2024, 12, 25), dt.date(2024, 1, 1)}
        assert parse_holidays(format_holidays(days)) == frozenset(days)

    def test_holidays_skip_comments(self):
        assert parse_holidays("# header\n\n2024-05-01\n") == {dt.date(2024, 5, 1)}

    def test_bad_holiday(self):
        with pytest.raises(MalformedRowError):
            parse_holidays("2024-13-01\n")


class TestSyntheticConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [{"num_days": 3}, {"base_peak": 0.0}, {"weekend_dip": 1.0}, {"weekend_dip": 0.0}, {"noise_std": -1.0}],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ConfigError):
            SyntheticConfig(**kwargs)


class TestGenerateSynthetic:
    def test_default_weekday_peak_near_one_gigawatt(self):
        ds = generate_synthetic(SyntheticConfig())
        days = ds.timestamps.astype("datetime64[D]").astype(dt.date)
        weekday = np.array([d.weekday() < 5 for d in days])
        assert abs(ds.load[weekday].max() - 1000.0) <= 100.0

    def test_saturday_below_wednesday(self):
        ds = generate_synthetic(SyntheticConfig(start_date=MONDAY, num_days=70, noise_std=0.0, weekend_dip=0.15))
        daily = ds.load.reshape(-1, 24).max(axis=1).reshape(-1, 7)
        assert np.all(daily[:, 5] < daily[:, 2])

    def test_deterministic(self):
        cfg = SyntheticConfig(num_days=30, seed=9)
        assert generate_synthetic(cfg).equals(generate_synthetic(cfg))

    def test_seed_matters(self):
        a = generate_synthetic(SyntheticConfig(num_days=10, seed=1))
        b = generate_synthetic(SyntheticConfig(num_days=10, seed=2))
        assert not a.equals(b)

    def test_passes_validation(self, quarter):
        assert validate_dataset(quarter) is quarter

    def test_daily_shape_has_two_peaks_and_night_trough(self, fortnight):
        wed = fortnight.load[2 * 24 : 3 * 24]
        assert 2 <= int(np.argmin(wed)) <= 5
        morning, evening = wed[6:13].max(), wed[16:23].max()
        assert morning > wed[13] and evening > wed[13]

    def test_holiday_shaped_like_sunday(self):
        hol = dt.date(2024, 1, 3)  # a Wednesday
        cfg = SyntheticConfig(start_date=MONDAY, num_days=14, noise_std=0.0, temp_coupling=0.0, holiday_dates={hol})
        ds = generate_synthetic(cfg)
        np.testing.assert_allclose(ds.load[2 * 24 : 3 * 24], ds.load[6 * 24 : 7 * 24], rtol=1e-12)

    def test_negative_temperature_coupling(self):
        ds = generate_synthetic(SyntheticConfig(num_days=365, noise_std=0.0, seed=2))
        daily_load = ds.load.reshape(-1, 24).mean(axis=1)
        daily_temp = ds.temperature.reshape(-1, 24).mean(axis=1)
        assert np.corrcoef(daily_load, daily_temp)[0, 1] < -0.5

    def test_noiseless_load_is_pure_function_of_inputs(self):
        cfg = SyntheticConfig(num_days=40, noise_std=0.0, seed=5)
        ds = generate_synthetic(cfg)
        sl = slice(17 * 24, 29 * 24)
        again = synthetic_load(ds.timestamps[sl], ds.temperature[sl], cfg)
        np.testing.assert_array_equal(again, ds.load[sl])

    def test_shorter_run_is_prefix(self):
        long = generate_synthetic(SyntheticConfig(num_days=20, seed=8))
        short = generate_synthetic(SyntheticConfig(num_days=6, seed=8))
        assert long.slice_hours(0, len(short)).equals(short)

    def test_wind_chill_at_zero_wind_is_temperature(self):
        assert wind_chill(np.array([-5.0]), np.array([0.0]))[0] == pytest.approx(-5.0)


class TestSplitByDaytype:
    def test_fortnight_from_monday(self, fortnight):
        weekday, weekend = split_by_daytype(fortnight)
        assert (len(weekday), len(weekend)) == (10, 4)

    def test_weekend_only(self):
        ds = make_dataset(np.full(48, 500.0), start=dt.datetime(2024, 1, 6))
        weekday, weekend = split_by_daytype(ds)
        assert weekday == []
        assert len(weekend) == 2

    def test_holiday_friday_is_weekend(self):
        fri = dt.date(2024, 1, 5)
        ds = make_dataset(np.full(7 * 24, 500.0), holidays={fri})
        weekday, weekend = split_by_daytype(ds)
        assert fri in weekend and fri not in weekday
        assert daytype_of(fri, {fri}) == WEEKEND
        assert daytype_of(fri) == WEEKDAY

    @given(st.integers(4, 40), st.sets(st.integers(0, 39), max_size=8))
    def test_disjoint_and_exhaustive(self, n_days, hol_idx):
        holidays = {MONDAY + dt.timedelta(days=i) for i in hol_idx}
        ds = make_dataset(np.full(n_days * 24, 500.0), holidays=holidays)
        weekday, weekend = split_by_daytype(ds)
        assert not set(weekday) & set(weekend)
        assert len(weekday) + len(weekend) == n_days
