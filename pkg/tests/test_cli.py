"""Command-line interface: parsing, output formats, exit codes, plots."""

import json

import numpy as np
import pytest

from cvxcav.cli import EXIT_OK, EXIT_PARSE, EXIT_USAGE, main, read_series


@pytest.fixture
def zigzag_csv(tmp_path):
    path = tmp_path / "data.csv"
    path.write_text("# zigzag\nx,f\n0,0\n1,1\n2,0\n3,1\n")
    return str(path)


class TestReadSeries:
    def test_header_and_comments(self, zigzag_csv):
        d = read_series(zigzag_csv)
        np.testing.assert_array_equal(d.x, [0, 1, 2, 3])
        np.testing.assert_array_equal(d.f, [0, 1, 0, 1])

    def test_duplicate_x_names_line(self, tmp_path):
        p = tmp_path / "dup.csv"
        p.write_text("0,0\n1,1\n1,2\n")
        with pytest.raises(Exception) as info:
            read_series(str(p))
        assert "line 3" in str(info.value)
        assert "duplicate" in str(info.value)

    def test_unsorted_x_names_line(self, tmp_path):
        p = tmp_path / "uns.csv"
        p.write_text("0,0\n2,1\n1,2\n")
        with pytest.raises(Exception) as info:
            read_series(str(p))
        assert "line 3" in str(info.value)

    def test_non_numeric_after_header(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("x,f\n0,0\noops,1\n")
        with pytest.raises(Exception) as info:
            read_series(str(p))
        assert "line 3" in str(info.value)

    def test_wrong_field_count(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("0,0,9\n")
        with pytest.raises(Exception) as info:
            read_series(str(p))
        assert "two comma-separated fields" in str(info.value)


class TestSmoothCommand:
    def test_worked_example_json(self, zigzag_csv, capsys):
        code = main(["smooth", "--input", zigzag_csv, "--q", "1"])
        assert code == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        assert doc["summary"]["h"] == 0.5
        assert doc["series"]["y"] == [0.5, 0.5, 0.5, 1.0]
        assert doc["summary"]["pieces"] == [[1, 3], [4, 4]]

    def test_feasible_input_returns_data(self, tmp_path, capsys):
        p = tmp_path / "line.csv"
        p.write_text("0,0\n1,1\n2,2\n")
        code = main(["smooth", "--input", str(p), "--q", "0"])
        assert code == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        assert doc["summary"]["h"] == 0.0
        assert doc["series"]["y"] == doc["series"]["f"]

    def test_csv_output_and_roundtrip(self, zigzag_csv, tmp_path, capsys):
        code = main(["smooth", "--input", zigzag_csv, "--q", "1", "--format", "csv"])
        assert code == EXIT_OK
        captured = capsys.readouterr()
        rows = [line.split(",") for line in captured.out.strip().splitlines()[1:]]
        assert "h = 0.5" in captured.err
        # Re-ingest the smoothed column: the method is projective.
        p2 = tmp_path / "round.csv"
        p2.write_text("\n".join(f"{r[0]},{r[2]}" for r in rows) + "\n")
        code = main(["smooth", "--input", str(p2), "--q", "1", "--format", "csv"])
        assert code == EXIT_OK
        captured2 = capsys.readouterr()
        rows2 = [line.split(",") for line in captured2.out.strip().splitlines()[1:]]
        assert "h = 0" in captured2.err
        assert [r[2] for r in rows2] == [r[2] for r in rows]

    def test_json_17g_reingests_bitfaithfully(self, tmp_path, capsys):
        rng = np.random.default_rng(5)
        x = np.sort(rng.uniform(0, 1, 9))
        f = rng.uniform(0, 1, 9)
        p = tmp_path / "r.csv"
        p.write_text("\n".join(f"{float(a)!r},{float(b)!r}" for a, b in zip(x, f)) + "\n")
        assert main(["smooth", "--input", str(p), "--q", "1"]) == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        assert np.asarray(doc["series"]["x"]).tolist() == x.tolist()
        y = np.asarray(doc["series"]["y"])
        p2 = tmp_path / "r2.csv"
        p2.write_text(
            "\n".join(f"{a},{b}" for a, b in zip(doc["series"]["x"], doc["series"]["y"]))
            + "\n"
        )
        assert main(["smooth", "--input", str(p2), "--q", "1"]) == EXIT_OK
        doc2 = json.loads(capsys.readouterr().out)
        assert doc2["summary"]["h"] == 0.0
        assert np.array_equal(np.asarray(doc2["series"]["y"]), y)

    def test_parse_error_exit_code(self, tmp_path, capsys):
        p = tmp_path / "dup.csv"
        p.write_text("0,0\n0,1\n")
        code = main(["smooth", "--input", str(p), "--q", "1"])
        assert code == EXIT_PARSE
        assert "line 2" in capsys.readouterr().err

    def test_usage_error_exit_code(self, capsys):
        assert main(["smooth", "--q", "1"]) == EXIT_USAGE
        assert main(["frobnicate"]) == EXIT_USAGE
        assert main(["smooth", "--input", "x.csv", "--q", "oops"]) == EXIT_USAGE

    def test_negative_q_is_usage_error(self, zigzag_csv, capsys):
        assert main(["smooth", "--input", zigzag_csv, "--q", "-1"]) == EXIT_USAGE

    def test_nonpositive_tol_is_usage_error(self, zigzag_csv, capsys):
        assert main(["smooth", "--input", zigzag_csv, "--q", "1", "--tol", "0"]) == EXIT_USAGE

    def test_orientation_best(self, zigzag_csv, capsys):
        code = main(["smooth", "--input", zigzag_csv, "--q", "1", "--orientation", "best"])
        assert code == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        assert doc["summary"]["h"] == 0.0  # concave-first fits the zigzag freely

    def test_plot_written(self, zigzag_csv, tmp_path, capsys):
        out = tmp_path / "fit.svg"
        code = main(["smooth", "--input", zigzag_csv, "--q", "1", "--plot", str(out)])
        assert code == EXIT_OK
        capsys.readouterr()
        svg = out.read_text()
        assert svg.startswith("<svg")
        assert svg.count("<polyline") == 2
        assert "<polygon" in svg  # one shaded parallelogram per open join


class TestExperimentCommand:
    def test_single_seed_text(self, capsys):
        code = main(["experiment", "zero", "--n", "51", "--epsilon", "0.1", "--q", "2"])
        assert code == EXIT_OK
        out = capsys.readouterr().out
        assert "h = " in out and "P_2 = " in out

    def test_single_seed_json(self, capsys):
        code = main(
            ["experiment", "sine", "--n", "41", "--epsilon", "0.1", "--q", "4",
             "--format", "json"]
        )
        assert code == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        assert doc["function"] == "sine"
        assert doc["q"] == 4

    def test_multi_seed_medians(self, capsys):
        code = main(
            ["experiment", "zero", "--n", "101", "--epsilon", "0.1", "--q", "2",
             "--seeds", "5"]
        )
        assert code == EXIT_OK
        out = capsys.readouterr().out
        assert out.count("seed ") == 5
        assert "median P_2" in out

    def test_noise_free_reports_undefined(self, capsys):
        code = main(["experiment", "zero", "--n", "21", "--epsilon", "0", "--q", "2"])
        assert code == EXIT_OK
        out = capsys.readouterr().out
        assert "undefined" in out
        assert "h = 0" in out

    def test_unknown_function_is_usage_error(self, capsys):
        assert main(["experiment", "bumps", "--n", "10", "--epsilon", "0.1"]) == EXIT_USAGE


class TestInternalErrors:
    def test_internal_failure_exits_3(self, zigzag_csv, capsys, monkeypatch):
        import cvxcav.cli as cli_mod

        def boom(*args, **kwargs):
            raise AssertionError("join re-run walked past the last join")

        monkeypatch.setattr(cli_mod, "solve", boom)
        code = main(["smooth", "--input", zigzag_csv, "--q", "1"])
        assert code == 3
        assert "internal error" in capsys.readouterr().err
