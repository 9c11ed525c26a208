import json
import subprocess
import sys

import pytest

from ulplab.cli import (
    GOLDEN_SCENARIOS,
    CliError,
    _fp_repr,
    _parse_range,
    _parse_x,
    main,
    run,
)
from ulplab.softfloat import FpNumber


def canonical(text: str) -> str:
    return json.dumps(json.loads(text), indent=2, sort_keys=True) + "\n"


class TestHelpers:
    def test_parse_range(self):
        assert _parse_range("7") == range(7, 8)
        assert _parse_range("3..8") == range(3, 9)
        with pytest.raises(CliError):
            _parse_range("8..3")
        with pytest.raises(CliError):
            _parse_range("x..3")

    def test_parse_x_forms(self):
        assert _parse_x("1", 24).to_fraction() == 1
        assert str(_parse_x("4097/4096", 24).to_fraction()) == "4097/4096"
        assert _parse_x("8473808/2^23", 24).significand == 8473808
        with pytest.raises(CliError):
            _parse_x("7/3", 24)  # not a binary float
        with pytest.raises(CliError):
            _parse_x("abc", 24)

    def test_fp_repr(self):
        x = _parse_x("8473808/2^23", 24)
        assert _fp_repr(x) == "8473808/2^23"
        # the significand stays visible even when the fraction would reduce
        assert _fp_repr(_parse_x("1", 24)) == "8388608/2^23"
        assert _fp_repr(FpNumber.zero(24)) == "0"

    def test_fp_repr_round_trips(self):
        for text in ["1", "6", "4097/4096", "8473808/2^23"]:
            x = _parse_x(text, 24)
            assert _parse_x(_fp_repr(x), 24) == x


class TestJsonIsCanonical:
    @pytest.mark.parametrize(
        "argv",
        [
            ["search", "--p", "8", "--n", "3..5", "--format", "json"],
            ["spot", "--p", "24", "--x", "8473808/2^23", "--n", "6", "--format", "json"],
            ["bounds", "--p", "24", "--n", "8..12", "--format", "json"],
            ["adversary", "--p", "24", "--n", "10", "--format", "json"],
            ["verify", "--format", "json"],
        ],
    )
    def test_parse_reserialize_is_identity(self, argv):
        code, text = run(argv)
        assert code == 0
        assert canonical(text) == text


class TestSearchCommand:
    def test_p8_table_values(self):
        code, text = run(["search", "--p", "8", "--n", "3..8", "--format", "json"])
        assert code == 0
        obj = json.loads(text)
        assert obj["schema_version"] == 1
        assert obj["mode"] == "even"
        decimals = [r["max_error"]["decimal"] for r in obj["rows"]]
        prefixes = ["1.35988", "1.73903", "2.21152", "2.53023", "2.69634", "3.42929"]
        for got, want in zip(decimals, prefixes):
            assert got.startswith(want)
        assert all(r["violations"] == 0 for r in obj["rows"])
        assert all(r["scanned"] == 128 for r in obj["rows"])

    def test_around_window(self):
        code, text = run(
            [
                "search", "--p", "24", "--n", "6", "--format", "json",
                "--around", "8473808", "--radius", "64",
            ]
        )
        assert code == 0
        row = json.loads(text)["rows"][0]
        assert row["argmax_x"] == "8473808/2^23"
        assert row["max_error"]["decimal"] == "4.328005618"
        assert row["scanned"] == 129

    def test_around_must_be_in_binade(self):
        with pytest.raises(CliError):
            run(["search", "--p", "24", "--n", "6", "--around", "1000"])

    def test_precision_guard_message(self):
        with pytest.raises(CliError, match="force"):
            run(["search", "--p", "30", "--n", "3"])

    def test_jobs_and_chunking_do_not_change_bytes(self):
        argv = ["search", "--p", "12", "--n", "4..6", "--format", "json",
                "--chunk-size", "128"]
        _, base = run(argv + ["--jobs", "1"])
        _, multi = run(argv + ["--jobs", "8"])
        assert multi == base

    def test_csv_format(self):
        code, text = run(["search", "--p", "8", "--n", "3", "--format", "csv"])
        lines = text.splitlines()
        assert lines[0] == "n,max_error_ulps,fraction,argmax_x,scanned,violations"
        assert lines[1].split(",")[0] == "3"
        assert len(lines) == 2

    def test_table_format_has_header(self):
        _, text = run(["search", "--p", "8", "--n", "3..4"])
        lines = text.splitlines()
        assert lines[0].startswith("n  ")
        assert len(lines) == 3


class TestSpotCommand:
    def test_exact_input_has_zero_error(self):
        _, text = run(["spot", "--p", "24", "--x", "1", "--n", "5", "--format", "json"])
        row = json.loads(text)["rows"][0]
        assert row["error"]["fraction"] == "0/1"
        assert row["error"]["decimal"] == "0.000000000"

    def test_published_argmax_values(self):
        _, text = run(
            ["spot", "--p", "53", "--x", "4503796447992526/2^52", "--n", "10",
             "--format", "json"]
        )
        row = json.loads(text)["rows"][0]
        assert row["error"]["decimal"] == "7.953418928"

    def test_digits_flag_truncates(self):
        _, text = run(
            ["spot", "--p", "24", "--x", "8473808/2^23", "--n", "6",
             "--format", "json", "--digits", "3"]
        )
        row = json.loads(text)["rows"][0]
        assert row["error"]["decimal"] == "4.328"

    def test_mode_flag(self):
        even = run(["spot", "--p", "8", "--x", "136/2^7", "--n", "3", "--format", "json"])
        away = run(
            ["spot", "--p", "8", "--x", "136/2^7", "--n", "3", "--format", "json",
             "--mode", "away"]
        )
        row_e = json.loads(even[1])["rows"][0]["error"]["fraction"]
        row_a = json.loads(away[1])["rows"][0]["error"]["fraction"]
        assert row_e == "256/289"  # 4352/4913 in lowest terms
        assert row_a == "3840/4913"


class TestBoundsCommand:
    def test_n_max_column_and_note(self):
        _, text = run(["bounds", "--p", "24", "--n", "2088..2089", "--format", "json"])
        obj = json.loads(text)
        assert obj["n_max"] == 2088
        assert obj["rows"][0]["within_n_max"] is True
        assert obj["rows"][1]["within_n_max"] is False

    def test_note_line_in_table_output(self):
        _, text = run(["bounds", "--p", "24", "--n", "2089"])
        assert "note: n=2089 exceeds n_max(24)=2088" in text

    def test_bound_ordering_in_rows(self):
        _, text = run(["bounds", "--p", "24", "--n", "10", "--format", "json"])
        row = json.loads(text)["rows"][0]
        simple = row["simple_ulps"]
        psi = float(row["psi_ulps"]["decimal"])
        gamma = float(row["gamma_ulps"]["decimal"])
        assert simple <= psi <= gamma

    def test_refuses_huge_n(self):
        with pytest.raises(CliError):
            run(["bounds", "--p", "24", "--n", "2000000"])


class TestAdversaryCommand:
    def test_json_report(self):
        code, text = run(
            ["adversary", "--p", "24", "--n", "10", "--format", "json",
             "--digits", "20"]
        )
        assert code == 0
        obj = json.loads(text)
        assert obj["passed"] is True
        assert obj["all_down"] is True
        assert obj["error_bound"] == 9
        assert obj["achieved_error"]["decimal"].startswith("8.99336984")
        assert obj["factors"][0] == "4097/4096"
        assert len(obj["factors"]) == 10

    def test_table_lists_factors(self):
        _, text = run(["adversary", "--p", "24", "--n", "4"])
        assert "a1" in text and "a4" in text
        assert "passed" in text

    def test_guard_becomes_cli_error(self):
        with pytest.raises(CliError):
            run(["adversary", "--p", "4", "--n", "10"])


class TestVerifyCommand:
    def test_builtin_checks_pass(self):
        code, text = run(["verify", "--format", "json"])
        assert code == 0
        obj = json.loads(text)
        assert obj["passed"] is True
        names = [c["name"] for c in obj["checks"]]
        assert len(names) == 3

    def test_sequence_checks_added(self):
        code, text = run(["verify", "--p", "24", "--n", "3..4", "--format", "json"])
        assert code == 0
        obj = json.loads(text)
        assert len(obj["checks"]) == 5
        assert all(c["passed"] for c in obj["checks"])


@pytest.fixture(scope="module")
def golden_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("goldens")
    code, _ = run(["regress", "--update", "--golden-dir", str(d)])
    assert code == 0
    return d


class TestRegressCommand:
    def test_update_writes_every_scenario(self, golden_dir):
        names = sorted(f.name for f in golden_dir.iterdir())
        assert names == sorted(name + ".json" for name, _ in GOLDEN_SCENARIOS)

    def test_clean_rerun_matches(self, golden_dir):
        code, text = run(["regress", "--golden-dir", str(golden_dir)])
        assert code == 0
        assert text.endswith(f"{len(GOLDEN_SCENARIOS)}/{len(GOLDEN_SCENARIOS)} scenarios ok\n")

    def test_tampered_golden_is_caught(self, golden_dir, tmp_path):
        copy = tmp_path / "g"
        copy.mkdir()
        for f in golden_dir.iterdir():
            (copy / f.name).write_text(f.read_text())
        victim = copy / "spot-p24-n6.json"
        victim.write_text(victim.read_text().replace("4.328005618", "4.328005619"))
        code, text = run(["regress", "--golden-dir", str(copy)])
        assert code == 1
        assert "MISMATCH spot-p24-n6" in text
        assert "first diff at line" in text
        total = len(GOLDEN_SCENARIOS)
        assert f"{total - 1}/{total} scenarios ok" in text

    def test_missing_golden_is_reported(self, golden_dir, tmp_path):
        copy = tmp_path / "g"
        copy.mkdir()
        for f in golden_dir.iterdir():
            (copy / f.name).write_text(f.read_text())
        (copy / "table1.json").unlink()
        code, text = run(["regress", "--golden-dir", str(copy)])
        assert code == 1
        assert "MISSING table1" in text


class TestMainEntry:
    def test_usage_error_exits_2(self, capsys):
        assert main(["spot", "--p", "24", "--x", "7/3", "--n", "2"]) == 2
        assert "not exactly representable" in capsys.readouterr().err

    def test_digits_guard(self):
        with pytest.raises(CliError):
            run(["spot", "--p", "24", "--x", "1", "--n", "2", "--digits", "0"])

    def test_success_prints_report(self, capsys):
        assert main(["bounds", "--p", "24", "--n", "10", "--format", "csv"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("n,simple_ulps")

    def test_console_script(self):
        proc = subprocess.run(
            [sys.executable, "-m", "ulplab.cli", "bounds", "--p", "24", "--n", "10",
             "--format", "json"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["n_max"] == 2088
