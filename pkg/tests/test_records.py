import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from roboplat.dataset.records import (
    AdcSample,
    CameraIndexEntry,
    GnssNavMessage,
    GpsFix,
    ImuSample,
    MalformedLine,
    NonNumericField,
    RangeViolation,
    SensorKind,
    parse_line,
    write_line,
)

from conftest import ALL_KINDS, random_record


class TestParseExamples:
    def test_gyro_plain(self):
        record = parse_line("1000000000, 0.001, -0.002, 0.003, 0", SensorKind.GYRO)
        assert record == ImuSample(1000000000, (0.001, -0.002, 0.003), None, 0)

    def test_accel_with_bias(self):
        record = parse_line("5, 0.1, 0.2, 9.8, 0.01, 0.02, 0.03, 1", SensorKind.ACCEL)
        assert record == ImuSample(5, (0.1, 0.2, 9.8), (0.01, 0.02, 0.03), 1)

    def test_gps(self):
        record = parse_line("7, 45.0, 8.5, 430.2, 1.2, 90.0", SensorKind.GPS)
        assert record == GpsFix(7, 45.0, 8.5, 430.2, 1.2, 90.0)

    def test_spaces_optional(self):
        a = parse_line("1,2.0,3.0,4.0,0", SensorKind.GYRO)
        b = parse_line("1 ,  2.0 ,3.0 , 4.0,  0", SensorKind.GYRO)
        assert a == b


class TestWriteExamples:
    def test_zero_imu(self):
        assert write_line(ImuSample(0, (0, 0, 0), None, 0)) == "0,0.0,0.0,0.0,0"

    def test_gnss_nav_hex(self):
        record = GnssNavMessage(1, 5, 1, 2, 3, b"\xab\xcd")
        assert write_line(record) == "1,5,1,2,3,abcd"

    def test_adc_without_channel(self):
        assert write_line(AdcSample(10, 512)) == "10,512"

    def test_adc_with_channel(self):
        assert write_line(AdcSample(10, 512, 1)) == "10,512,1"


class TestErrors:
    def test_wrong_arity_imu(self):
        for n in (1, 2, 3, 4, 6, 7, 9):
            line = ",".join(["1"] + ["0.5"] * (n - 1))
            with pytest.raises(MalformedLine):
                parse_line(line, SensorKind.GYRO)

    def test_adc_arity(self):
        with pytest.raises(MalformedLine):
            parse_line("1,2,3,4", SensorKind.ADC)
        with pytest.raises(MalformedLine):
            parse_line("1", SensorKind.ADC)

    def test_non_numeric(self):
        with pytest.raises(NonNumericField):
            parse_line("1, x, 0.0, 0.0, 0", SensorKind.GYRO)
        with pytest.raises(NonNumericField):
            parse_line("nope, 0.0, 0.0, 0.0, 0", SensorKind.GYRO)

    def test_latitude_range(self):
        with pytest.raises(RangeViolation):
            parse_line("7, 91.0, 8.5, 430.2, 1.2, 90.0", SensorKind.GPS)

    def test_negative_velocity(self):
        with pytest.raises(RangeViolation):
            parse_line("7, 45.0, 8.5, 430.2, -1.2, 90.0", SensorKind.GPS)

    def test_out_of_range_bearing_is_accepted(self):
        record = parse_line("7, 45.0, 8.5, 430.2, 1.2, -10.0", SensorKind.GPS)
        assert record.bearing_deg == -10.0

    def test_non_finite_rejected(self):
        with pytest.raises(RangeViolation):
            parse_line("1, nan, 0.0, 0.0, 0", SensorKind.GYRO)
        with pytest.raises(RangeViolation):
            parse_line("1, inf, 0.0, 0.0, 0", SensorKind.GYRO)

    def test_odd_hex(self):
        with pytest.raises(MalformedLine):
            parse_line("1,5,1,2,3,abc", SensorKind.GNSS_NAV)

    def test_gnss_meas_partial_optional_pair(self):
        base = "1,2.0,3," + ",".join(["1.0"] * 7) + ",4,5"
        parse_line(base, SensorKind.GNSS_MEAS)
        with pytest.raises(MalformedLine):
            parse_line(base + ",6.0", SensorKind.GNSS_MEAS)

    def test_camera_path_rules(self):
        with pytest.raises(MalformedLine):
            parse_line("1,/abs/path.jpg", SensorKind.CAMERA)
        with pytest.raises(MalformedLine):
            parse_line("1,../escape.jpg", SensorKind.CAMERA)
        with pytest.raises(MalformedLine):
            parse_line("1,picture.txt", SensorKind.CAMERA)

    def test_negative_timestamp(self):
        with pytest.raises(RangeViolation):
            parse_line("-1,0.0,0.0,0.0,0", SensorKind.GYRO)


class TestRoundTrip:
    def test_randomized_all_kinds(self):
        rng = random.Random(7)
        for _ in range(2000):
            kind = rng.choice(ALL_KINDS)
            record = random_record(rng, kind)
            assert parse_line(write_line(record), kind) == record

    @given(st.integers(0, 2**62),
           st.tuples(*[st.floats(allow_nan=False, allow_infinity=False, width=64)] * 3),
           st.one_of(st.none(),
                     st.tuples(*[st.floats(allow_nan=False, allow_infinity=False, width=64)] * 3)),
           st.integers(0, 10))
    @settings(max_examples=200)
    def test_imu_round_trip_hypothesis(self, t, axes, bias, sensor_id):
        record = ImuSample(t, axes, bias, sensor_id)
        for kind in (SensorKind.GYRO, SensorKind.ACCEL, SensorKind.MAG):
            assert parse_line(write_line(record), kind) == record

    def test_float_precision_preserved(self):
        record = ImuSample(1, (0.1 + 0.2, 1e-300, math.pi), None, 0)
        back = parse_line(write_line(record), SensorKind.GYRO)
        assert back.axis_values == record.axis_values

    def test_empty_nav_data(self):
        record = GnssNavMessage(1, 2, 3, 4, 5, b"")
        assert parse_line(write_line(record), SensorKind.GNSS_NAV) == record

    def test_camera_round_trip(self):
        record = CameraIndexEntry(1, "images/000123.jpg")
        assert parse_line(write_line(record), SensorKind.CAMERA) == record
