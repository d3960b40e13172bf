import numpy as np
import pytest

from vrpcast import acf, generate_synthetic, load_csv, radiance_to_vrp
from vrpcast.data_ingest import save_csv
from vrpcast.errors import DataFormatError, DegenerateDataError


def write(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestRadianceToVrp:
    def test_unit_excess(self):
        assert radiance_to_vrp(3.0, 2.0) == pytest.approx(1.89e7)

    def test_zero_excess(self):
        assert radiance_to_vrp(5.5, 5.5) == 0.0

    def test_linear_scaling(self):
        assert radiance_to_vrp(4.5, 2.0) == pytest.approx(4.725e7)

    def test_shift_invariance(self, rng):
        for _ in range(50):
            a, b, c = rng.normal(size=3)
            assert radiance_to_vrp(a + c, b + c) == pytest.approx(
                radiance_to_vrp(a, b), rel=1e-9, abs=1e-3
            )

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            radiance_to_vrp(float("nan"), 1.0)


class TestLoadCsv:
    def test_clean_rows_identity(self, tmp_path):
        path = write(tmp_path, "timestamp,vrp_watts\n"
                               "2020-01-01,1e8\n2020-01-02,2e8\n2020-01-03,3e8\n")
        series = load_csv(path)
        assert len(series) == 3
        np.testing.assert_array_equal(series.values, [1e8, 2e8, 3e8])

    def test_missing_rows_dropped(self, tmp_path):
        # 4,720 rows of which 7 have a blank value field
        rows = ["timestamp,vrp_watts"] + [
            f"2000-01-01T00:00:00.{i:06d},{'' if i % 700 == 3 else 1e8 + i}"
            for i in range(4720)
        ]
        series = load_csv(write(tmp_path, "\n".join(rows) + "\n"))
        assert len(series) == 4713

    def test_nan_value_dropped(self, tmp_path):
        path = write(tmp_path, "timestamp,vrp_watts\n2020-01-01,nan\n2020-01-02,5.0\n")
        series = load_csv(path)
        assert len(series) == 1
        assert np.all(np.isfinite(series.values))

    def test_malformed_value_reports_row(self, tmp_path):
        path = write(tmp_path, "timestamp,vrp_watts\n2020-01-01,1.0\n2020-01-02,oops\n")
        with pytest.raises(DataFormatError, match="row 3"):
            load_csv(path)

    def test_bad_timestamp_reports_row(self, tmp_path):
        path = write(tmp_path, "timestamp,vrp_watts\nnot-a-date,1.0\n")
        with pytest.raises(DataFormatError, match="row 2"):
            load_csv(path)

    def test_zero_usable_rows(self, tmp_path):
        path = write(tmp_path, "timestamp,vrp_watts\n2020-01-01,\n")
        with pytest.raises(DataFormatError, match="no usable rows"):
            load_csv(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataFormatError):
            load_csv(tmp_path / "nope.csv")

    def test_radiance_mode(self, tmp_path):
        path = write(tmp_path, "timestamp,l_mir,l_mir_bk\n2020-01-01,3.0,2.0\n")
        series = load_csv(path, mode="radiance")
        assert series.values[0] == pytest.approx(1.89e7)

    def test_duplicate_timestamp_keeps_last(self, tmp_path):
        path = write(tmp_path, "timestamp,vrp_watts\n"
                               "2020-01-01,1.0\n2020-01-01,2.0\n2020-01-02,3.0\n")
        series = load_csv(path)
        assert len(series) == 2
        assert series.values[0] == 2.0

    def test_timestamps_strictly_increasing_after_sort(self, tmp_path):
        path = write(tmp_path, "timestamp,vrp_watts\n"
                               "2020-01-02,2.0\n2020-01-01,1.0\n")
        series = load_csv(path)
        assert series.timestamps[0] < series.timestamps[1]
        assert series.values[0] == 1.0

    def test_save_load_round_trip(self, tmp_path):
        series = generate_synthetic({"kind": "persistence_bursts", "n": 50}, 3)
        path = tmp_path / "rt.csv"
        save_csv(series, path)
        again = load_csv(path)
        np.testing.assert_array_equal(series.values, again.values)
        assert series.timestamps == again.timestamps


class TestGenerateSynthetic:
    def test_deterministic(self):
        a = generate_synthetic({"kind": "white_noise", "n": 500}, 1)
        b = generate_synthetic({"kind": "white_noise", "n": 500}, 1)
        np.testing.assert_array_equal(a.values, b.values)

    def test_random_walk_is_cumsum_of_white_noise(self):
        noise = generate_synthetic({"kind": "white_noise", "n": 500}, 7)
        walk = generate_synthetic({"kind": "random_walk", "n": 500}, 7)
        np.testing.assert_allclose(walk.values, np.cumsum(noise.values), rtol=0, atol=0)

    def test_ar1_sample_autocorrelation(self):
        series = generate_synthetic({"kind": "ar", "n": 2000, "phi": [0.9]}, 3)
        sample_acf = acf(series.values, 1)
        assert sample_acf[1] == pytest.approx(0.9, abs=0.05)

    def test_unstable_ar_rejected(self):
        with pytest.raises(DegenerateDataError):
            generate_synthetic({"kind": "ar", "n": 100, "phi": [1.01]}, 0)
        with pytest.raises(DegenerateDataError):
            generate_synthetic({"kind": "ar", "n": 100, "phi": [0.6, 0.6]}, 0)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            generate_synthetic({"kind": "fractal", "n": 10}, 0)

    def test_requested_length(self):
        for kind in ("white_noise", "random_walk", "persistence_bursts"):
            assert len(generate_synthetic({"kind": kind, "n": 37}, 0)) == 37
